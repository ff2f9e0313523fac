// landmarks.hpp - paired source/target landmark sets in physical mm.
#pragma once

#include <string>
#include <vector>

#include "avocado/grid.hpp"

namespace avocado {

struct LandmarkPair {
    std::string id;
    Vec source;  // p_i, source-frame mm
    Vec target;  // c_i, target-frame mm
};

struct LandmarkSet {
    int ndims = 3;
    std::vector<LandmarkPair> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

}  // namespace avocado
