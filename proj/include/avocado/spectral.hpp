// spectral.hpp - Fourier-domain operators: divergence-free projection,
// spatially varying incompressibility blend, and Cauchy-Navier smoothing.
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "avocado/field.hpp"

namespace avocado {

// Precomputed transform plans plus the discrete operator symbols on a grid.
// gradient_sym(axis, k) is the imaginary part s of the central-difference
// gradient symbol i*s, with s = sin(2*pi*k/N)/dx, built exactly zero at k = 0
// and at the Nyquist index of even axes. laplacian_sym(axis, k) is the
// (2 - 2cos(2*pi*k/N))/dx^2 stencil symbol, exactly zero at k = 0.
//
// Construction is not thread-safe; a completed plan is immutable and may be
// shared across threads. forward/inverse may run concurrently on distinct
// buffers.
class SpectralPlan {
public:
    explicit SpectralPlan(const Grid& grid);
    ~SpectralPlan();
    SpectralPlan(SpectralPlan&&) noexcept;
    SpectralPlan& operator=(SpectralPlan&&) noexcept;
    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    const Grid& grid() const { return grid_; }
    double gradient_sym(int axis, int k) const { return grad_sym_[axis][static_cast<std::size_t>(k)]; }
    double laplacian_sym(int axis, int k) const { return lap_sym_[axis][static_cast<std::size_t>(k)]; }

    // Unnormalized forward DFT of a real voxel array into out (voxel_count entries).
    void forward(const double* real_in, std::complex<double>* out) const;
    // Inverse DFT including the 1/N normalization; real part written to real_out.
    void inverse(const std::complex<double>* in, double* real_out) const;

private:
    Grid grid_;
    std::array<std::vector<double>, 3> grad_sym_;
    std::array<std::vector<double>, 3> lap_sym_;
    struct Fftw;
    std::unique_ptr<Fftw> fftw_;
};

SpectralPlan make_plan(const Grid& grid);

// Removes the curl-free part of v frequency by frequency, leaving the
// divergence-free component. Frequencies where the whole gradient symbol
// vanishes (DC, exact Nyquist) pass through unchanged.
VectorField project_div_free(const VectorField& v, const SpectralPlan& plan);

// v(x) = (1 - alpha(x)) * v_orig(x) + alpha(x) * v_div(x), alpha in [0,1].
VectorField blend_incompressible(const VectorField& v_orig, const VectorField& v_div,
                                 const ScalarField& alpha);

// Applies the inverse of L = -alpha_cn * Laplacian + gamma * Identity as a
// Fourier multiplier: F(omega) / (gamma + alpha_cn * laplacian_sym(omega)).
VectorField cauchy_navier_smooth(const VectorField& g, const SpectralPlan& plan, double alpha_cn,
                                 double gamma);

// One-pass variant used by the flow loops: computes the smoothed field and/or
// its divergence-free projection from a single forward transform. Either
// output pointer may be null. Equal to composing the two operators above.
void smooth_and_project(const VectorField& g, const SpectralPlan& plan, double alpha_cn,
                        double gamma, VectorField* smoothed, VectorField* projected);

}  // namespace avocado
