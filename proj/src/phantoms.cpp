#include "avocado/phantoms.hpp"

#include <algorithm>
#include <cmath>

#include "avocado/rng.hpp"

namespace avocado {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Separable Gaussian blur with replicate boundary; the kernel is normalized,
// so values stay inside the input range.
ScalarField gaussian_blur(const ScalarField& f, double sigma_px) {
    if (sigma_px <= 0.0) return f;
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double w = std::exp(-0.5 * (t / sigma_px) * (t / sigma_px));
        kernel[static_cast<std::size_t>(t + radius)] = w;
        sum += w;
    }
    for (auto& w : kernel) w /= sum;

    const Grid& g = f.grid();
    ScalarField cur = f;
    for (int axis = 0; axis < g.ndims(); ++axis) {
        ScalarField next(g, 0.0);
        const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    double acc = 0.0;
                    for (int t = -radius; t <= radius; ++t) {
                        int pos[3] = {i, j, k};
                        pos[axis] = std::clamp(pos[axis] + t, 0, g.dim(axis) - 1);
                        acc += kernel[static_cast<std::size_t>(t + radius)] *
                               cur[g.index(pos[0], pos[1], pos[2])];
                    }
                    next[g.index(i, j, k)] = acc;
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

ScalarField rasterize_ellipse(const Grid& g, const Vec& center, double a, double b) {
    ScalarField mask(g, 0.0);
    for (int j = 0; j < g.dim(1); ++j) {
        for (int i = 0; i < g.dim(0); ++i) {
            const Vec p = g.coord(i, j);
            const double u = (p[0] - center[0]) / a;
            const double v = (p[1] - center[1]) / b;
            if (u * u + v * v <= 1.0) mask.at(i, j) = 1.0;
        }
    }
    return mask;
}

}  // namespace

PhantomCase ellipse_pair(const Grid& canvas, double area_src, double area_tgt, double edge_sigma) {
    if (canvas.ndims() != 2) throw DataError("ellipse_pair: canvas must be 2D");
    if (!(area_src > 0.0) || !(area_tgt > 0.0))
        throw DataError("ellipse_pair: areas must be positive");

    // Semi-axes at a 2:1 ratio: area = pi * a * b with a = 2b.
    const double b_src = std::sqrt(area_src / (2.0 * kPi)), a_src = 2.0 * b_src;
    const double b_tgt = std::sqrt(area_tgt / (2.0 * kPi)), a_tgt = 2.0 * b_tgt;

    Vec center;
    for (int d = 0; d < 2; ++d)
        center[d] = canvas.origin(d) + 0.5 * (canvas.dim(d) - 1) * canvas.spacing(d);
    const double margin = 8.0 * std::max(canvas.spacing(0), canvas.spacing(1));
    const double half_x = 0.5 * (canvas.dim(0) - 1) * canvas.spacing(0);
    const double half_y = 0.5 * (canvas.dim(1) - 1) * canvas.spacing(1);
    if (std::max(a_src, a_tgt) + margin > half_x || std::max(b_src, b_tgt) + margin > half_y)
        throw DataError("ellipse_pair: requested area does not fit the canvas with an 8 px margin");

    PhantomCase c;
    c.source_mask = rasterize_ellipse(canvas, center, a_src, b_src);
    c.target_mask = rasterize_ellipse(canvas, center, a_tgt, b_tgt);
    c.source = gaussian_blur(c.source_mask, edge_sigma / canvas.spacing(0));
    c.target = gaussian_blur(c.target_mask, edge_sigma / canvas.spacing(0));

    c.init_landmarks.ndims = 2;
    c.validation_landmarks.ndims = 2;
    for (int j = 0; j < 6; ++j) {
        const double th = 2.0 * kPi * j / 6.0;
        LandmarkPair pr;
        pr.id = std::to_string(j + 1);
        pr.source = Vec(center[0] + a_src * std::cos(th), center[1] + b_src * std::sin(th));
        pr.target = Vec(center[0] + a_tgt * std::cos(th), center[1] + b_tgt * std::sin(th));
        c.init_landmarks.pairs.push_back(pr);

        const double tv = th + kPi / 6.0;
        LandmarkPair vr;
        vr.id = std::to_string(j + 1);
        vr.source = Vec(center[0] + a_src * std::cos(tv), center[1] + b_src * std::sin(tv));
        vr.target = Vec(center[0] + a_tgt * std::cos(tv), center[1] + b_tgt * std::sin(tv));
        c.validation_landmarks.pairs.push_back(vr);
    }
    return c;
}

namespace {

bool jacobian_within(const InverseMap& map, double lo, double hi) {
    const ScalarField jac = jacobian_determinant(map);
    const Grid& g = map.grid();
    for (int k = 1; k < g.dim(2) - 1; ++k)
        for (int j = 1; j < g.dim(1) - 1; ++j)
            for (int i = 1; i < g.dim(0) - 1; ++i) {
                const double v = jac[g.index(i, j, k)];
                if (v < lo || v > hi) return false;
            }
    return true;
}

}  // namespace

namespace {

// One incompressible shear layer: the displaced axis moves by a sinusoid of
// the transverse coordinates only, the exact time-1 flow of a single-harmonic
// divergence-free velocity field. Its Jacobian is unit-determinant even under
// the discrete central-difference stencil (triangular structure).
struct ShearLayer {
    int axis = 0;
    std::array<int, 3> freq{0, 0, 0};  // zero on the displaced axis
    double phase = 0.0;
    double amp = 0.0;
};

Vec apply_shear(const ShearLayer& s, const Vec& p, const Grid& g) {
    double arg = s.phase;
    for (int d = 0; d < 3; ++d) {
        if (d == s.axis || s.freq[d] == 0) continue;
        arg += 2.0 * kPi * s.freq[d] * (p[d] - g.origin(d)) /
               (static_cast<double>(g.dim(d)) * g.spacing(d));
    }
    Vec q = p;
    q[s.axis] += s.amp * std::sin(arg);
    return q;
}

Vec apply_shear_stack(const std::vector<ShearLayer>& shears, Vec p, const Grid& g) {
    for (const auto& s : shears) p = apply_shear(s, p, g);
    return p;
}

}  // namespace

InverseMap divfree_warp_3d(const Grid& grid, int modes, double max_disp, std::uint64_t seed) {
    if (grid.ndims() != 3) throw DataError("divfree_warp_3d: grid must be 3D");
    if (max_disp < 0.0) throw DataError("divfree_warp_3d: max_disp must be non-negative");
    if (modes < 1) throw DataError("divfree_warp_3d: modes must be >= 1");
    if (max_disp == 0.0) return identity_map(grid);

    // Random band-limited stack of incompressible shear flows, composed
    // analytically (no resampling, so no interpolation diffusion).
    Rng rng(mix_seed(seed, 0x1234));
    const int layers = 12;
    std::vector<ShearLayer> shears(static_cast<std::size_t>(layers));
    for (auto& s : shears) {
        s.axis = static_cast<int>(rng.raw() % 3);
        for (int d = 0; d < 3; ++d) {
            if (d == s.axis) continue;
            s.freq[d] = static_cast<int>(rng.raw() % (2 * static_cast<unsigned>(modes) + 1)) - modes;
        }
        if (s.freq[(s.axis + 1) % 3] == 0 && s.freq[(s.axis + 2) % 3] == 0)
            s.freq[(s.axis + 1) % 3] = 1;
        s.phase = rng.uniform(0.0, 2.0 * kPi);
        s.amp = max_disp / layers;
    }

    const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
    for (int pass = 0; pass < 2; ++pass) {
        double dmax = 0.0;
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const Vec x = grid.coord(i, j, k);
                    dmax = std::max(dmax, (apply_shear_stack(shears, x, grid) - x).norm());
                }
        if (dmax == 0.0) return identity_map(grid);
        const double scale = max_disp / dmax;
        for (auto& s : shears) s.amp *= scale;
    }

    InverseMap map(grid);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                map.set_mapped(grid.index(i, j, k), apply_shear_stack(shears, grid.coord(i, j, k), grid));

    if (!jacobian_within(map, 0.97, 1.03))
        throw NumericalError(
            "divfree_warp_3d: sampled Jacobian left [0.97, 1.03]; max_disp is too large for this "
            "grid resolution (reduce max_disp or modes, or refine the grid)");
    return map;
}

PhantomCase blob_case_3d(const Grid& grid, int n_blobs, const InverseMap& warp, int n_landmarks,
                         std::uint64_t seed) {
    if (grid.ndims() != 3) throw DataError("blob_case_3d: grid must be 3D");
    require_same_grid(grid, warp.grid(), "blob_case_3d");
    if (n_landmarks < 4) throw DataError("blob_case_3d: n_landmarks must be >= 4");
    if (n_blobs < n_landmarks)
        throw DataError("blob_case_3d: need at least as many blobs as init landmarks");

    Rng rng(mix_seed(seed, 0xb10b));

    // Blob centers: rejection sampling with an interior margin and minimum
    // separation so extrema stay distinct and inside the deformed region.
    std::vector<Vec> centers;
    std::vector<double> sigmas, amps;
    double extent = 0.0;
    for (int d = 0; d < 3; ++d)
        extent = std::max(extent, (grid.dim(d) - 1) * grid.spacing(d));
    const double margin = 0.16 * extent;
    const double min_sep = std::max(0.085 * extent, 2.5 * grid.spacing(0));
    int guard = 0;
    while (static_cast<int>(centers.size()) < n_blobs) {
        if (++guard > 100000)
            throw NumericalError("blob_case_3d: could not place blobs (too many for the grid)");
        Vec p;
        for (int d = 0; d < 3; ++d) {
            const double lo = grid.origin(d) + margin;
            const double hi = grid.origin(d) + (grid.dim(d) - 1) * grid.spacing(d) - margin;
            p[d] = rng.uniform(lo, hi);
        }
        bool ok = true;
        for (const auto& q : centers)
            if ((p - q).norm() < min_sep) {
                ok = false;
                break;
            }
        if (!ok) continue;
        centers.push_back(p);
        sigmas.push_back(rng.uniform(2.8, 4.5) * grid.spacing(0));
        amps.push_back(rng.uniform(0.6, 1.0));
    }

    PhantomCase c;
    c.seed = seed;
    c.source = ScalarField(grid, 0.0);
    for (int k = 0; k < grid.dim(2); ++k) {
        for (int j = 0; j < grid.dim(1); ++j) {
            for (int i = 0; i < grid.dim(0); ++i) {
                const Vec x = grid.coord(i, j, k);
                double v = 0.0;
                for (std::size_t bi = 0; bi < centers.size(); ++bi) {
                    const double r2 = (x - centers[bi]).norm2();
                    v += amps[bi] * std::exp(-0.5 * r2 / (sigmas[bi] * sigmas[bi]));
                }
                c.source[grid.index(i, j, k)] = v;
            }
        }
    }
    c.target = compose_warp(c.source, warp);

    c.source_mask = ScalarField(grid, 0.0);
    c.target_mask = ScalarField(grid, 0.0);
    for (std::size_t i = 0; i < c.source.size(); ++i) {
        c.source_mask[i] = c.source[i] >= 0.5 ? 1.0 : 0.0;
        c.target_mask[i] = c.target[i] >= 0.5 ? 1.0 : 0.0;
    }

    // Exact correspondences: p_i is the blob extremum in the source; the
    // matching target point solves warp(c) = p by fixed-point iteration.
    c.init_landmarks.ndims = 3;
    c.validation_landmarks.ndims = 3;
    for (int bi = 0; bi < n_blobs; ++bi) {
        const Vec p = centers[static_cast<std::size_t>(bi)];
        Vec ct = p;
        for (int it = 0; it < 200; ++it) {
            const Vec err = p - sample_map(warp, ct);
            ct += err;
            if (err.norm() < 1e-12) break;
        }
        if ((p - sample_map(warp, ct)).norm() > 1e-8)
            throw NumericalError("blob_case_3d: landmark correspondence inversion did not converge");
        LandmarkPair pr;
        pr.id = std::to_string(bi + 1);
        pr.source = p;
        pr.target = ct;
        if (bi < n_landmarks)
            c.init_landmarks.pairs.push_back(pr);
        else
            c.validation_landmarks.pairs.push_back(pr);
    }
    c.ground_truth = warp;
    return c;
}

ScalarField sphere_mask(const Grid& grid, const Vec& center, double radius) {
    ScalarField mask(grid, 0.0);
    for (int k = 0; k < grid.dim(2); ++k)
        for (int j = 0; j < grid.dim(1); ++j)
            for (int i = 0; i < grid.dim(0); ++i)
                if ((grid.coord(i, j, k) - center).norm() <= radius)
                    mask[grid.index(i, j, k)] = 1.0;
    return mask;
}

}  // namespace avocado
