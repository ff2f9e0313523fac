// metaimage.hpp - MetaImage (.mhd + .raw) detached-header volume IO.
// Headers are text key = value lines; payloads are little-endian 32-bit
// floats, x-fastest, channels interleaved for vector data.
#pragma once

#include <string>

#include "avocado/inverse_map.hpp"

namespace avocado {

ScalarField read_volume(const std::string& path);
void write_volume(const ScalarField& field, const std::string& path);

// Vector payloads carry ElementNumberOfChannels = ndims. Maps are stored as
// displacement from identity (mm); the Comment header key documents this.
VectorField read_vector_field(const std::string& path);
void write_vector_field(const VectorField& v, const std::string& path,
                        const std::string& comment = "");

InverseMap map_from_displacement(const VectorField& disp);
VectorField displacement_from_map(const InverseMap& map);

void write_map(const InverseMap& map, const std::string& path);
InverseMap read_map(const std::string& path);

}  // namespace avocado
