// intensity_flow.hpp - image-similarity gradient flow with Cauchy-Navier
// smoothing and divergence-free projection.
#pragma once

#include "avocado/flow_params.hpp"
#include "avocado/inverse_map.hpp"
#include "avocado/spectral.hpp"

namespace avocado {

// Mean over voxels of (i1(phi(x)) - i0(x))^2. Intensities are expected in
// [0,1] (the pipeline normalizes), which makes eps_image scale-meaningful.
double image_energy(const ScalarField& i0, const ScalarField& i1, const InverseMap& phi);

// g(x) = (i1(phi(x)) - i0(x)) * grad_i1(phi(x)). grad_i1 is the periodic
// central-difference gradient of i1 on the source grid, computed once.
VectorField image_force(const ScalarField& i0, const ScalarField& i1, const VectorField& grad_i1,
                        const InverseMap& phi);

struct ImageFlowResult {
    InverseMap map;
    FlowTrace trace;
};

// Iterates force -> smooth -> project/blend -> advect from `init` until the
// accepted-energy change drops below params.eps_image or max_iter_intensity.
ImageFlowResult image_flow(const ScalarField& i0, const ScalarField& i1, const InverseMap& init,
                           const FlowParams& params, const SpectralPlan& plan);

}  // namespace avocado
