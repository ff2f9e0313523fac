// landmark_flow.hpp - RBF-driven gradient flow that carries deformed target
// landmarks onto the rigidly transformed source landmarks, projecting every
// step field onto the divergence-free subspace.
#pragma once

#include "avocado/flow_params.hpp"
#include "avocado/inverse_map.hpp"
#include "avocado/rigid.hpp"
#include "avocado/spectral.hpp"

namespace avocado {

// Snapshot of the flow state: current deformed landmark positions, their
// rigid targets, and the interpolation weights solved for the residuals.
struct RbfState {
    std::vector<Vec> centers;  // deformed target landmarks at flow time t
    std::vector<Vec> targets;  // R p_i
    std::vector<Vec> weights;  // b_i, one per landmark
    double energy = 0.0;       // sum of squared residuals, mm^2
    int iteration = 0;
};

// K(r) = sqrt(1 + (eps * r)^2).
double multiquadric(double r, double eps);

// Solves [K(r_ij)] b = d per spatial component, d_i = target_i - center_i.
// Throws NumericalError naming the closest pair when the kernel matrix is
// numerically singular (duplicate or near-duplicate centers).
std::vector<Vec> solve_rbf_weights(const RbfState& state, double eps);

// Dense velocity field v(x) = sum_i b_i K(|x - center_i|). By construction
// v(center_i) equals the residual for center_i.
VectorField rbf_velocity(const RbfState& state, const Grid& grid, double eps);

struct LandmarkFlowResult {
    InverseMap map;  // rigid transform folded in: target coords -> source coords
    FlowTrace trace;
};

// Runs the landmark stage on `grid` and returns the composed map R^-1(psi(x)),
// where psi is the flow's own target-frame deformation. Stops when the RMS
// landmark error sqrt(E/M) drops below params.eps_user, when the step size
// collapses, or at max_iter_landmark (flagged, not fatal).
LandmarkFlowResult landmark_flow(const RigidTransform& rigid, const LandmarkSet& landmarks,
                                 const Grid& grid, const FlowParams& params,
                                 const SpectralPlan& plan);

}  // namespace avocado
