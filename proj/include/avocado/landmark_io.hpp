// landmark_io.hpp - CSV landmark file format: header `id,frame,x,y[,z]`,
// frame in {source, target}, rows paired across frames by id, coords in mm.
#pragma once

#include <string>

#include "avocado/landmarks.hpp"

namespace avocado {

LandmarkSet read_landmarks(const std::string& path);
void write_landmarks(const LandmarkSet& set, const std::string& path);

}  // namespace avocado
