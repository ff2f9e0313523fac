// flow_params.hpp - tunables shared by the landmark and intensity flows.
#pragma once

#include <optional>
#include <string>

#include "avocado/field.hpp"

namespace avocado {

struct FlowParams {
    double dt = 0.1;           // flow step size (dimensionless time)
    double eps_rbf = 1.0;      // multiquadric shape parameter
    double eps_user = 0.93;    // landmark-stage RMS stop threshold, mm
    double eps_image = 3e-4;   // intensity-stage |dE| stop threshold
    double alpha_cn = 2.0;     // Cauchy-Navier -alpha * Laplacian coefficient
    double gamma = 0.1;        // Cauchy-Navier + gamma * Identity coefficient
    double alpha_incomp = 1.0; // constant incompressibility weight, in [0,1]
    std::optional<ScalarField> alpha_field;  // spatially varying weight, overrides the constant
    int max_iter_landmark = 500;
    int max_iter_intensity = 500;
    bool skip_rigid = false;
    bool skip_landmark = false;
    bool skip_intensity = false;

    void validate() const {
        if (!(dt > 0.0)) throw DataError("params: dt must be positive");
        if (!(eps_rbf > 0.0)) throw DataError("params: eps_rbf must be positive");
        if (!(eps_user > 0.0)) throw DataError("params: eps_user must be positive");
        if (!(eps_image > 0.0)) throw DataError("params: eps_image must be positive");
        if (!(gamma > 0.0)) throw DataError("params: gamma must be positive");
        if (alpha_cn < 0.0) throw DataError("params: alpha_cn must be non-negative");
        if (!(alpha_incomp >= 0.0 && alpha_incomp <= 1.0))
            throw DataError("params: alpha_incomp must lie in [0,1]");
        if (max_iter_landmark < 1 || max_iter_intensity < 1)
            throw DataError("params: max_iter must be at least 1");
    }
};

// Per-stage audit trail: accepted energies (starting with the initial value),
// convergence flag, and the worst divergence-to-velocity ratio observed over
// all projected step fields.
struct FlowTrace {
    std::vector<double> energy;
    bool converged = false;
    int iterations = 0;
    double max_divergence_ratio = 0.0;
    std::string stop_reason;
};

}  // namespace avocado
