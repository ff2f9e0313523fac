#include "oracles.hpp"

#include <cmath>
#include <functional>

namespace oracles {

using avocado::Grid;
using avocado::ScalarField;
using avocado::Vec;

std::vector<std::complex<double>> brute_dft(const ScalarField& f) {
    const Grid& g = f.grid();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    const double tau = 2.0 * 3.14159265358979323846;
    std::vector<std::complex<double>> out(g.voxel_count());
    for (int kz = 0; kz < nz; ++kz)
        for (int ky = 0; ky < ny; ++ky)
            for (int kx = 0; kx < nx; ++kx) {
                std::complex<double> acc(0.0, 0.0);
                for (int z = 0; z < nz; ++z)
                    for (int y = 0; y < ny; ++y)
                        for (int x = 0; x < nx; ++x) {
                            const double phase = tau * (static_cast<double>(kx) * x / nx +
                                                        static_cast<double>(ky) * y / ny +
                                                        static_cast<double>(kz) * z / nz);
                            acc += f.at(x, y, z) *
                                   std::complex<double>(std::cos(phase), -std::sin(phase));
                        }
                out[g.index(kx, ky, kz)] = acc;
            }
    return out;
}

ScalarField brute_idft(const std::vector<std::complex<double>>& spec, const Grid& grid) {
    const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
    const double tau = 2.0 * 3.14159265358979323846;
    ScalarField out(grid, 0.0);
    const double norm = 1.0 / static_cast<double>(grid.voxel_count());
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                std::complex<double> acc(0.0, 0.0);
                for (int kz = 0; kz < nz; ++kz)
                    for (int ky = 0; ky < ny; ++ky)
                        for (int kx = 0; kx < nx; ++kx) {
                            const double phase = tau * (static_cast<double>(kx) * x / nx +
                                                        static_cast<double>(ky) * y / ny +
                                                        static_cast<double>(kz) * z / nz);
                            acc += spec[grid.index(kx, ky, kz)] *
                                   std::complex<double>(std::cos(phase), std::sin(phase));
                        }
                out.at(x, y, z) = acc.real() * norm;
            }
    return out;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) return left + right;
    return adaptive_simpson(f, a, m, fa, fm, flm, eps * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, eps * 0.5, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fb, fm, eps, 60);
}

}  // namespace

double t_two_sided_p_quadrature(double t, int dof) {
    const double T = std::abs(t);
    if (T == 0.0) return 1.0;
    const double nu = static_cast<double>(dof);
    const double ln_c =
        std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * 3.14159265358979323846);
    const double c = std::exp(ln_c);
    const auto density = [&](double x) {
        return c * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0));
    };
    // Tail integral over [T, inf) via x = T / u, u in (0, 1].
    const auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = T / u;
        return density(x) * T / (u * u);
    };
    const double tail = integrate(integrand, 1e-12, 1.0, 1e-14);
    return 2.0 * tail;
}

double dice_set_based(const ScalarField& a, const ScalarField& b) {
    std::set<std::size_t> sa, sb;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0.5) sa.insert(i);
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] > 0.5) sb.insert(i);
    std::size_t inter = 0;
    for (auto idx : sa) inter += sb.count(idx);
    if (sa.empty() && sb.empty()) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size());
}

double rigid_objective_2d(double theta, const std::vector<Vec>& p, const std::vector<Vec>& c) {
    const double ct = std::cos(theta), st = std::sin(theta);
    double obj = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double rx = ct * p[i][0] - st * p[i][1];
        const double ry = st * p[i][0] + ct * p[i][1];
        obj += (rx - c[i][0]) * (rx - c[i][0]) + (ry - c[i][1]) * (ry - c[i][1]);
    }
    return obj;
}

double best_rotation_objective_2d(const std::vector<Vec>& p, const std::vector<Vec>& c,
                                  double step_deg) {
    double best = std::numeric_limits<double>::infinity();
    const double step = step_deg * 3.14159265358979323846 / 180.0;
    for (double th = 0.0; th < 2.0 * 3.14159265358979323846; th += step)
        best = std::min(best, rigid_objective_2d(th, p, c));
    return best;
}

}  // namespace oracles
