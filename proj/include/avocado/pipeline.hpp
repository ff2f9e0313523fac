// pipeline.hpp - staged registration: rigid init, landmark flow, intensity
// flow, all folded into one inverse map.
#pragma once

#include <optional>

#include "avocado/intensity_flow.hpp"
#include "avocado/landmark_flow.hpp"
#include "avocado/metrics.hpp"

namespace avocado {

struct RegistrationResult {
    InverseMap map;  // target frame -> source frame, rigid included
    RigidTransform rigid;
    std::optional<FlowTrace> landmark_trace;
    std::optional<FlowTrace> intensity_trace;
    MetricsReport metrics;  // jacobian statistics always filled
};

// Full pipeline. i0 is the target image, i1 the source; both are min-max
// normalized to [0,1] internally. Landmarks are physical mm in their frames.
// The returned map satisfies: compose_warp(i1, result.map) is the registered
// source image on i0's grid.
RegistrationResult avocado(const ScalarField& i0, const ScalarField& i1,
                           const LandmarkSet& landmarks, const FlowParams& params);

// Warp a binary segmentation and re-threshold it back to {0,1}.
ScalarField warp_segmentation(const ScalarField& seg, const InverseMap& map,
                              double threshold = 0.5);

// Per-image min-max normalization to [0,1]; constant images map to zero.
ScalarField normalize_intensity(const ScalarField& f);

}  // namespace avocado
