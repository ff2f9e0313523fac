// phantoms.hpp - deterministic synthetic cases: the 2D ellipse pair and 3D
// ground-truth-warp blob cases with landmark extraction.
#pragma once

#include <cstdint>
#include <optional>

#include "avocado/inverse_map.hpp"
#include "avocado/landmarks.hpp"

namespace avocado {

struct PhantomCase {
    ScalarField source{Grid::uniform(2, 2)};
    ScalarField target{Grid::uniform(2, 2)};
    ScalarField source_mask{Grid::uniform(2, 2)};
    ScalarField target_mask{Grid::uniform(2, 2)};
    LandmarkSet init_landmarks;
    LandmarkSet validation_landmarks;
    std::optional<InverseMap> ground_truth;  // target = compose_warp(source, ground_truth)
    std::uint64_t seed = 0;
};

// Two concentric axis-aligned ellipses (2:1 semi-axes) of the requested pixel
// areas, rasterized as binary masks and edge-smoothed for differentiable
// intensities. Six boundary landmark pairs at matching parametric angles plus
// six validation pairs at offset angles.
PhantomCase ellipse_pair(const Grid& canvas, double area_src, double area_tgt, double edge_sigma);

// Random band-limited divergence-free warp scaled to roughly max_disp voxels
// of displacement, integrated in small steps to a diffeomorphism with
// Jacobian determinant within [0.97, 1.03] everywhere.
InverseMap divfree_warp_3d(const Grid& grid, int modes, double max_disp, std::uint64_t seed);

// Sum-of-Gaussians source, target warped by `warp`, landmarks at blob centers
// with exact correspondences read from the warp. The first n_landmarks blobs
// become init landmarks; the remaining blobs become held-out validation pairs.
PhantomCase blob_case_3d(const Grid& grid, int n_blobs, const InverseMap& warp, int n_landmarks,
                         std::uint64_t seed);

// Binary ball mask, used for volume-preservation checks.
ScalarField sphere_mask(const Grid& grid, const Vec& center, double radius);

}  // namespace avocado
