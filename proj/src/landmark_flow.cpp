#include "avocado/landmark_flow.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace avocado {

double multiquadric(double r, double eps) {
    const double er = eps * r;
    return std::sqrt(1.0 + er * er);
}

std::vector<Vec> solve_rbf_weights(const RbfState& state, double eps) {
    const int m = static_cast<int>(state.centers.size());
    if (m == 0) return {};
    if (state.targets.size() != state.centers.size())
        throw DataError("solve_rbf_weights: centers/targets size mismatch");

    // Near-duplicate centers make the kernel matrix singular; report the pair.
    double min_d = std::numeric_limits<double>::infinity();
    int min_i = 0, min_j = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double d = (state.centers[i] - state.centers[j]).norm();
            if (d < min_d) {
                min_d = d;
                min_i = i;
                min_j = j;
            }
        }
    }
    if (m > 1 && min_d < 1e-9)
        throw NumericalError("solve_rbf_weights: kernel matrix singular, centers " +
                             std::to_string(min_i) + " and " + std::to_string(min_j) +
                             " nearly coincide");

    Eigen::MatrixXd G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            G(i, j) = multiquadric((state.centers[i] - state.centers[j]).norm(), eps);

    Eigen::MatrixXd rhs(m, 3);
    for (int i = 0; i < m; ++i) {
        const Vec d = state.targets[i] - state.centers[i];
        for (int c = 0; c < 3; ++c) rhs(i, c) = d[c];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible())
        throw NumericalError("solve_rbf_weights: kernel matrix singular, closest centers " +
                             std::to_string(min_i) + " and " + std::to_string(min_j));
    Eigen::MatrixXd sol = lu.solve(rhs);

    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double rel_res = (G * sol - rhs).norm() / rhs_norm;
        if (rel_res > 1e-8)
            throw NumericalError("solve_rbf_weights: kernel solve residual " +
                                 std::to_string(rel_res) + " exceeds 1e-8");
    }

    std::vector<Vec> weights(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int c = 0; c < 3; ++c) weights[static_cast<std::size_t>(i)][c] = sol(i, c);
    return weights;
}

VectorField rbf_velocity(const RbfState& state, const Grid& grid, double eps) {
    if (state.weights.size() != state.centers.size())
        throw DataError("rbf_velocity: weights inconsistent with state");
    VectorField v(grid);
    const int nd = grid.ndims();
    const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
    const std::size_t m = state.centers.size();
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx = grid.index(i, j, k);
                const Vec x = grid.coord(i, j, k);
                Vec sum;
                for (std::size_t l = 0; l < m; ++l) {
                    const double kr = multiquadric((x - state.centers[l]).norm(), eps);
                    sum += kr * state.weights[l];
                }
                for (int d = 0; d < nd; ++d) v.at(d, idx) = sum[d];
            }
        }
    }
    return v;
}

namespace {

// Spectral low-pass strength applied to the landmark step field.
constexpr double kSeamSmoothing = 4.0;

// Smooth taper to zero over a band at the grid faces. The multiquadric far
// field at domain corners is cancellation noise between large kernel values;
// left in place it dominates the projected field there and wrecks boundary
// Jacobians. Landmarks live in the interior, so the taper never touches the
// kernel interpolation property where it matters.
void taper_boundary(VectorField& v, double band_voxels) {
    const Grid& g = v.grid();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    auto smoothstep = [](double t) {
        t = std::clamp(t, 0.0, 1.0);
        return t * t * (3.0 - 2.0 * t);
    };
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int pos[3] = {i, j, k};
                double dmin = 1e300;
                for (int d = 0; d < g.ndims(); ++d)
                    dmin = std::min({dmin, static_cast<double>(pos[d]),
                                     static_cast<double>(g.dim(d) - 1 - pos[d])});
                if (dmin >= band_voxels) continue;
                const double w = smoothstep(dmin / band_voxels);
                const std::size_t idx = g.index(i, j, k);
                for (int d = 0; d < g.ndims(); ++d) v.at(d, idx) *= w;
            }
        }
    }
}

// Localizes the velocity to the landmark neighbourhood. The kernel system
// only constrains values at the centers; beyond the landmark hull the
// multiquadric sum is cancellation noise between large kernel values, and
// transporting it step after step folds the map at the domain corners. Full
// weight within `inner` of the nearest center, zero beyond `outer`.
void window_to_landmarks(VectorField& v, const std::vector<Vec>& centers, double inner,
                         double outer) {
    const Grid& g = v.grid();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    auto smoothstep = [](double t) {
        t = std::clamp(t, 0.0, 1.0);
        return t * t * (3.0 - 2.0 * t);
    };
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const Vec x = g.coord(i, j, k);
                double d2 = 1e300;
                for (const Vec& c : centers) d2 = std::min(d2, (x - c).norm2());
                const double d = std::sqrt(d2);
                if (d <= inner) continue;
                const double w = smoothstep((outer - d) / (outer - inner));
                const std::size_t idx = g.index(i, j, k);
                for (int dd = 0; dd < g.ndims(); ++dd) v.at(dd, idx) *= w;
            }
        }
    }
}

// Scale of the landmark configuration: the largest nearest-neighbour gap,
// used to size the velocity window.
double landmark_spread(const std::vector<Vec>& centers) {
    double spread = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double nn = 1e300;
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (j != i) nn = std::min(nn, (centers[i] - centers[j]).norm());
        if (centers.size() > 1) spread = std::max(spread, nn);
    }
    return spread;
}

// Deformed landmark positions in the rigid-aligned target frame: psi(c_i) =
// R(M(c_i)), consistent with the single composed map M = R^-1 o psi.
std::vector<Vec> track_centers(const InverseMap& map, const RigidTransform& rigid,
                               const LandmarkSet& landmarks) {
    std::vector<Vec> centers;
    centers.reserve(landmarks.size());
    for (const auto& pr : landmarks.pairs) centers.push_back(rigid.apply(sample_map(map, pr.target)));
    return centers;
}

double residual_energy(const std::vector<Vec>& centers, const std::vector<Vec>& targets) {
    double e = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) e += (targets[i] - centers[i]).norm2();
    return e;
}

bool can_audit(const Grid& g) {
    for (int d = 0; d < g.ndims(); ++d)
        if (g.dim(d) < 3) return false;
    return true;
}

}  // namespace

LandmarkFlowResult landmark_flow(const RigidTransform& rigid, const LandmarkSet& landmarks,
                                 const Grid& grid, const FlowParams& params,
                                 const SpectralPlan& plan) {
    params.validate();
    require_same_grid(grid, plan.grid(), "landmark_flow");
    if (landmarks.ndims != grid.ndims())
        throw DataError("landmark_flow: landmark dimensionality does not match grid");
    if (landmarks.empty()) throw DataError("landmark_flow: empty landmark set");
    if (params.alpha_field) require_same_grid(grid, params.alpha_field->grid(), "landmark_flow alpha");

    // Initial map is the identity pre-transformed by R^-1, so the rigid stage
    // is already folded in and downstream consumers see a single map.
    InverseMap map(grid);
    {
        const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    map.set_mapped(grid.index(i, j, k), rigid.apply_inverse(grid.coord(i, j, k)));
    }

    std::vector<Vec> targets;
    targets.reserve(landmarks.size());
    for (const auto& pr : landmarks.pairs) targets.push_back(rigid.apply(pr.source));

    std::vector<Vec> centers = track_centers(map, rigid, landmarks);
    double energy = residual_energy(centers, targets);
    const double m_count = static_cast<double>(landmarks.size());

    FlowTrace trace;
    trace.energy.push_back(energy);

    const bool audit = can_audit(grid);
    const bool const_alpha = !params.alpha_field.has_value();
    double dt = params.dt;
    int successes = 0;
    int accepted = 0;

    // Progress-stall window: when the squeeze is incompatible with the
    // incompressibility constraint the energy plateaus above eps_user, and
    // grinding on only accumulates map damage far from the landmarks.
    constexpr int kStallWindow = 25;
    constexpr double kStallRelImprovement = 1e-4;

    while (true) {
        if (std::sqrt(energy / m_count) < params.eps_user) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
        if (accepted >= params.max_iter_landmark) {
            trace.stop_reason = "max_iterations";
            break;
        }
        if (accepted >= kStallWindow) {
            const double past = trace.energy[trace.energy.size() - 1 - kStallWindow];
            if (past - energy < kStallRelImprovement * past) {
                trace.stop_reason = "stalled";
                break;
            }
        }

        RbfState state;
        state.centers = centers;
        state.targets = targets;
        state.iteration = accepted;
        state.energy = energy;
        state.weights = solve_rbf_weights(state, params.eps_rbf);

        VectorField v = rbf_velocity(state, grid, params.eps_rbf);
        // The multiquadric field is non-periodic and grows with distance; its
        // wrap seam turns into voxel-scale Gibbs oscillation under the
        // spectral projection, and the far field beyond the landmark hull is
        // pure cancellation noise. Window the field to the landmark
        // neighbourhood, quiet the faces, and strip the voxel-scale content;
        // the kernels themselves are broad, so the interpolation structure
        // survives where the landmarks constrain it.
        const double spread = landmark_spread(state.centers);
        if (spread > 0.0) window_to_landmarks(v, state.centers, 1.5 * spread, 3.0 * spread);
        taper_boundary(v, 6.0);
        v = cauchy_navier_smooth(v, plan, kSeamSmoothing, 1.0);
        VectorField step(grid);
        if (const_alpha && params.alpha_incomp == 0.0) {
            step = std::move(v);
        } else {
            VectorField proj = project_div_free(v, plan);
            if (audit) {
                const double vm = max_norm(proj);
                if (vm > 0.0)
                    trace.max_divergence_ratio =
                        std::max(trace.max_divergence_ratio, max_abs(divergence(proj)) / vm);
            }
            if (const_alpha && params.alpha_incomp == 1.0) {
                step = std::move(proj);
            } else if (const_alpha) {
                ScalarField a(grid, params.alpha_incomp);
                step = blend_incompressible(v, proj, a);
            } else {
                step = blend_incompressible(v, proj, *params.alpha_field);
            }
        }

        // Descent direction: under the update phi(x - s(x)) the map argument
        // must shift opposite to the residual field for phi(c_i) to approach
        // R p_i, so the advected step is the negated velocity.
        for (int d = 0; d < grid.ndims(); ++d)
            for (std::size_t i = 0; i < step.voxel_count(); ++i) step.at(d, i) = -step.at(d, i);

        // The step field is dt-independent; back-track dt alone on rejection.
        bool stalled = false;
        while (true) {
            InverseMap trial = advect_inverse_map(map, step, dt);
            std::vector<Vec> trial_centers = track_centers(trial, rigid, landmarks);
            const double trial_energy = residual_energy(trial_centers, targets);
            if (trial_energy <= energy) {
                map = std::move(trial);
                centers = std::move(trial_centers);
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
    }

    trace.iterations = accepted;
    return LandmarkFlowResult{std::move(map), std::move(trace)};
}

}  // namespace avocado
