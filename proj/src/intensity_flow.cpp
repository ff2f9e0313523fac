#include "avocado/intensity_flow.hpp"

#include <cmath>

namespace avocado {

double image_energy(const ScalarField& i0, const ScalarField& i1, const InverseMap& phi) {
    require_same_grid(i0.grid(), phi.grid(), "image_energy");
    double sum = 0.0;
    const std::size_t n = phi.voxel_count();
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double r = sample_scalar(i1, phi.mapped_at(idx)) - i0[idx];
        sum += r * r;
    }
    return sum / static_cast<double>(n);
}

VectorField image_force(const ScalarField& i0, const ScalarField& i1, const VectorField& grad_i1,
                        const InverseMap& phi) {
    require_same_grid(i0.grid(), phi.grid(), "image_force");
    require_same_grid(i1.grid(), grad_i1.grid(), "image_force");
    const Grid& g = phi.grid();
    VectorField out(g);
    const int nd = g.ndims();
    for (std::size_t idx = 0; idx < phi.voxel_count(); ++idx) {
        const Vec m = phi.mapped_at(idx);
        const double r = sample_scalar(i1, m) - i0[idx];
        const Vec grad = sample_vector(grad_i1, m);
        for (int d = 0; d < nd; ++d) out.at(d, idx) = r * grad[d];
    }
    return out;
}

namespace {

bool can_audit(const Grid& g) {
    for (int d = 0; d < g.ndims(); ++d)
        if (g.dim(d) < 3) return false;
    return true;
}

}  // namespace

ImageFlowResult image_flow(const ScalarField& i0, const ScalarField& i1, const InverseMap& init,
                           const FlowParams& params, const SpectralPlan& plan) {
    params.validate();
    require_same_grid(i0.grid(), init.grid(), "image_flow");
    require_same_grid(i0.grid(), plan.grid(), "image_flow");
    if (params.alpha_field) require_same_grid(i0.grid(), params.alpha_field->grid(), "image_flow alpha");

    const Grid& grid = init.grid();
    const VectorField grad_i1 = gradient_periodic(i1);

    InverseMap map = init;
    double energy = image_energy(i0, i1, map);

    FlowTrace trace;
    trace.energy.push_back(energy);

    // Stop once the accepted-step improvement falls below eps_image relative
    // to the stage's initial energy. An absolute threshold on mean-normalized
    // energy would stop immediately on images whose foreground occupies a
    // small fraction of the grid.
    const double stop_delta = params.eps_image * energy;

    const bool audit = can_audit(grid);
    const bool const_alpha = !params.alpha_field.has_value();
    const bool want_smoothed = !(const_alpha && params.alpha_incomp == 1.0);
    const bool want_projected = !(const_alpha && params.alpha_incomp == 0.0);
    double dt = params.dt;
    int successes = 0;
    int accepted = 0;

    while (accepted < params.max_iter_intensity) {
        const VectorField g = image_force(i0, i1, grad_i1, map);

        VectorField smoothed(grid), projected(grid);
        smooth_and_project(g, plan, params.alpha_cn, params.gamma,
                           want_smoothed ? &smoothed : nullptr,
                           want_projected ? &projected : nullptr);
        if (want_projected && audit) {
            const double vm = max_norm(projected);
            if (vm > 0.0)
                trace.max_divergence_ratio =
                    std::max(trace.max_divergence_ratio, max_abs(divergence(projected)) / vm);
        }

        VectorField step(grid);
        if (!want_smoothed) {
            step = std::move(projected);
        } else if (!want_projected) {
            step = std::move(smoothed);
        } else if (const_alpha) {
            ScalarField a(grid, params.alpha_incomp);
            step = blend_incompressible(smoothed, projected, a);
        } else {
            step = blend_incompressible(smoothed, projected, *params.alpha_field);
        }

        bool stalled = false;
        double delta = 0.0;
        while (true) {
            InverseMap trial = advect_inverse_map(map, step, dt);
            const double trial_energy = image_energy(i0, i1, trial);
            if (trial_energy <= energy) {
                delta = energy - trial_energy;
                map = std::move(trial);
                energy = trial_energy;
                trace.energy.push_back(energy);
                ++accepted;
                if (++successes >= 3 && dt < params.dt) {
                    dt = std::min(dt * 2.0, params.dt);
                    successes = 0;
                }
                break;
            }
            dt *= 0.5;
            successes = 0;
            if (dt < params.dt * 1e-6) {
                stalled = true;
                break;
            }
        }
        if (stalled) {
            trace.stop_reason = "stalled";
            break;
        }
        if (delta <= stop_delta) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
    }
    if (trace.stop_reason.empty()) trace.stop_reason = "max_iterations";

    trace.iterations = accepted;
    return ImageFlowResult{std::move(map), std::move(trace)};
}

}  // namespace avocado
