#include "avocado/spectral.hpp"

#include <fftw3.h>

#include <cmath>

namespace avocado {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FftwArray {
    fftw_complex* p = nullptr;
    explicit FftwArray(std::size_t n) {
        p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!p) throw std::bad_alloc();
    }
    ~FftwArray() { fftw_free(p); }
    FftwArray(const FftwArray&) = delete;
    FftwArray& operator=(const FftwArray&) = delete;
};

}  // namespace

struct SpectralPlan::Fftw {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    ~Fftw() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

SpectralPlan::SpectralPlan(const Grid& grid) : grid_(grid), fftw_(std::make_unique<Fftw>()) {
    for (int d = 0; d < 3; ++d) {
        const int n = grid_.dim(d);
        grad_sym_[d].assign(static_cast<std::size_t>(n), 0.0);
        lap_sym_[d].assign(static_cast<std::size_t>(n), 0.0);
        if (d >= grid_.ndims()) continue;
        const double dx = grid_.spacing(d);
        for (int k = 0; k < n; ++k) {
            if (k == 0) continue;  // symbols exactly zero at DC
            const double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
            grad_sym_[d][k] = (2 * k == n) ? 0.0 : std::sin(w) / dx;  // exact zero at Nyquist
            lap_sym_[d][k] = (2.0 - 2.0 * std::cos(w)) / (dx * dx);
        }
    }
    // FFTW is row-major with the last index fastest; our layout is x-fastest,
    // so the transform dims are (nz, ny, nx) reversed down to ndims.
    const std::size_t n = grid_.voxel_count();
    FftwArray a(n), b(n);
    int dims[3];
    const int nd = grid_.ndims();
    for (int d = 0; d < nd; ++d) dims[d] = grid_.dim(nd - 1 - d);
    fftw_->fwd = fftw_plan_dft(nd, dims, a.p, b.p, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_->bwd = fftw_plan_dft(nd, dims, a.p, b.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fftw_->fwd || !fftw_->bwd) throw NumericalError("spectral plan: FFTW planning failed");
}

SpectralPlan::~SpectralPlan() = default;
SpectralPlan::SpectralPlan(SpectralPlan&&) noexcept = default;
SpectralPlan& SpectralPlan::operator=(SpectralPlan&&) noexcept = default;

SpectralPlan make_plan(const Grid& grid) { return SpectralPlan(grid); }

void SpectralPlan::forward(const double* real_in, std::complex<double>* out) const {
    const std::size_t n = grid_.voxel_count();
    FftwArray in(n), res(n);
    for (std::size_t i = 0; i < n; ++i) {
        in.p[i][0] = real_in[i];
        in.p[i][1] = 0.0;
    }
    fftw_execute_dft(fftw_->fwd, in.p, res.p);
    for (std::size_t i = 0; i < n; ++i) out[i] = {res.p[i][0], res.p[i][1]};
}

void SpectralPlan::inverse(const std::complex<double>* in, double* real_out) const {
    const std::size_t n = grid_.voxel_count();
    FftwArray buf(n), res(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf.p[i][0] = in[i].real();
        buf.p[i][1] = in[i].imag();
    }
    fftw_execute_dft(fftw_->bwd, buf.p, res.p);
    const double scale = 1.0 / static_cast<double>(n);
    // Imaginary residue of the analytically real result is discarded.
    for (std::size_t i = 0; i < n; ++i) real_out[i] = res.p[i][0] * scale;
}

namespace {

using Spectrum = std::vector<std::complex<double>>;

// Applies the orthogonal projector that removes the span of the gradient
// symbol direction at every frequency. The symbol i*s has the real direction
// s, so the removed component is s * (s . F) / |s|^2.
void apply_projection(const SpectralPlan& plan, std::array<Spectrum, 3>& spec) {
    const Grid& g = plan.grid();
    const int nd = g.ndims();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    std::size_t idx = 0;
    for (int kz = 0; kz < nz; ++kz) {
        const double sz = (nd == 3) ? plan.gradient_sym(2, kz) : 0.0;
        for (int ky = 0; ky < ny; ++ky) {
            const double sy = plan.gradient_sym(1, ky);
            for (int kx = 0; kx < nx; ++kx, ++idx) {
                const double sx = plan.gradient_sym(0, kx);
                const double s2 = sx * sx + sy * sy + sz * sz;
                if (s2 == 0.0) continue;  // DC / Nyquist: pass unchanged
                std::complex<double> c = sx * spec[0][idx] + sy * spec[1][idx];
                if (nd == 3) c += sz * spec[2][idx];
                c /= s2;
                spec[0][idx] -= c * sx;
                spec[1][idx] -= c * sy;
                if (nd == 3) spec[2][idx] -= c * sz;
            }
        }
    }
}

void apply_smoothing(const SpectralPlan& plan, double alpha_cn, double gamma,
                     std::array<Spectrum, 3>& spec) {
    const Grid& g = plan.grid();
    const int nd = g.ndims();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    std::size_t idx = 0;
    for (int kz = 0; kz < nz; ++kz) {
        const double lz = (nd == 3) ? plan.laplacian_sym(2, kz) : 0.0;
        for (int ky = 0; ky < ny; ++ky) {
            const double lyz = lz + plan.laplacian_sym(1, ky);
            for (int kx = 0; kx < nx; ++kx, ++idx) {
                const double m = 1.0 / (gamma + alpha_cn * (lyz + plan.laplacian_sym(0, kx)));
                for (int d = 0; d < nd; ++d) spec[d][idx] *= m;
            }
        }
    }
}

std::array<Spectrum, 3> forward_all(const VectorField& v, const SpectralPlan& plan) {
    std::array<Spectrum, 3> spec;
    const std::size_t n = v.voxel_count();
    for (int d = 0; d < v.grid().ndims(); ++d) {
        spec[d].resize(n);
        plan.forward(v.component(d), spec[d].data());
    }
    return spec;
}

VectorField inverse_all(const std::array<Spectrum, 3>& spec, const SpectralPlan& plan) {
    VectorField out(plan.grid());
    for (int d = 0; d < plan.grid().ndims(); ++d) plan.inverse(spec[d].data(), out.component(d));
    return out;
}

}  // namespace

VectorField project_div_free(const VectorField& v, const SpectralPlan& plan) {
    require_same_grid(v.grid(), plan.grid(), "project_div_free");
    auto spec = forward_all(v, plan);
    apply_projection(plan, spec);
    return inverse_all(spec, plan);
}

VectorField blend_incompressible(const VectorField& v_orig, const VectorField& v_div,
                                 const ScalarField& alpha) {
    require_same_grid(v_orig.grid(), v_div.grid(), "blend_incompressible");
    require_same_grid(v_orig.grid(), alpha.grid(), "blend_incompressible");
    VectorField out(v_orig.grid());
    const int nd = v_orig.grid().ndims();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a = alpha[i];
        if (!(a >= 0.0 && a <= 1.0))
            throw DataError("blend_incompressible: alpha outside [0,1] at voxel " + std::to_string(i));
        for (int d = 0; d < nd; ++d)
            out.at(d, i) = (1.0 - a) * v_orig.at(d, i) + a * v_div.at(d, i);
    }
    return out;
}

VectorField cauchy_navier_smooth(const VectorField& g, const SpectralPlan& plan, double alpha_cn,
                                 double gamma) {
    require_same_grid(g.grid(), plan.grid(), "cauchy_navier_smooth");
    if (!(gamma > 0.0)) throw DataError("cauchy_navier_smooth: gamma must be positive");
    if (alpha_cn < 0.0) throw DataError("cauchy_navier_smooth: alpha_cn must be non-negative");
    auto spec = forward_all(g, plan);
    apply_smoothing(plan, alpha_cn, gamma, spec);
    return inverse_all(spec, plan);
}

void smooth_and_project(const VectorField& g, const SpectralPlan& plan, double alpha_cn,
                        double gamma, VectorField* smoothed, VectorField* projected) {
    require_same_grid(g.grid(), plan.grid(), "smooth_and_project");
    if (!(gamma > 0.0)) throw DataError("smooth_and_project: gamma must be positive");
    if (alpha_cn < 0.0) throw DataError("smooth_and_project: alpha_cn must be non-negative");
    auto spec = forward_all(g, plan);
    apply_smoothing(plan, alpha_cn, gamma, spec);
    if (smoothed) *smoothed = inverse_all(spec, plan);
    if (projected) {
        apply_projection(plan, spec);
        *projected = inverse_all(spec, plan);
    }
}

}  // namespace avocado
