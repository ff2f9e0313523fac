#include "avocado/field.hpp"

#include <algorithm>
#include <cmath>

namespace avocado {

SampleLoc locate(const Grid& g, const Vec& p) {
    SampleLoc loc;
    for (int d = 0; d < g.ndims(); ++d) {
        double u = (p[d] - g.origin(d)) / g.spacing(d);
        // Snap to the nearest integer index when within rounding noise, so
        // voxel-center queries are exact regardless of origin/spacing values.
        const double r = std::round(u);
        if (std::abs(u - r) <= 1e-12 * std::max(1.0, std::abs(r))) u = r;
        const int n = g.dim(d);
        if (u <= 0.0) {
            loc.base[d] = 0;
            loc.frac[d] = 0.0;
            continue;
        }
        if (u >= static_cast<double>(n - 1)) {
            loc.base[d] = n - 2;
            loc.frac[d] = 1.0;
            continue;
        }
        int i0 = static_cast<int>(std::floor(u));
        if (i0 > n - 2) i0 = n - 2;
        loc.base[d] = i0;
        loc.frac[d] = u - static_cast<double>(i0);
    }
    return loc;
}

namespace {

// Multilinear gather over the 2^ndims cell corners around loc.
inline double gather(const double* vals, const Grid& g, const SampleLoc& loc) {
    const int nd = g.ndims();
    if (nd == 2) {
        const std::size_t i00 = g.index(loc.base[0], loc.base[1]);
        const std::size_t i10 = i00 + 1;
        const std::size_t i01 = i00 + static_cast<std::size_t>(g.dim(0));
        const std::size_t i11 = i01 + 1;
        const double fx = loc.frac[0], fy = loc.frac[1];
        const double a = (1.0 - fx) * vals[i00] + fx * vals[i10];
        const double b = (1.0 - fx) * vals[i01] + fx * vals[i11];
        return (1.0 - fy) * a + fy * b;
    }
    const std::size_t nx = static_cast<std::size_t>(g.dim(0));
    const std::size_t nxy = nx * static_cast<std::size_t>(g.dim(1));
    const std::size_t i000 = g.index(loc.base[0], loc.base[1], loc.base[2]);
    const double fx = loc.frac[0], fy = loc.frac[1], fz = loc.frac[2];
    const double v000 = vals[i000], v100 = vals[i000 + 1];
    const double v010 = vals[i000 + nx], v110 = vals[i000 + nx + 1];
    const double v001 = vals[i000 + nxy], v101 = vals[i000 + nxy + 1];
    const double v011 = vals[i000 + nxy + nx], v111 = vals[i000 + nxy + nx + 1];
    const double a = (1.0 - fx) * v000 + fx * v100;
    const double b = (1.0 - fx) * v010 + fx * v110;
    const double c = (1.0 - fx) * v001 + fx * v101;
    const double d = (1.0 - fx) * v011 + fx * v111;
    const double ab = (1.0 - fy) * a + fy * b;
    const double cd = (1.0 - fy) * c + fy * d;
    return (1.0 - fz) * ab + fz * cd;
}

}  // namespace

double sample_scalar(const ScalarField& f, const Vec& p) {
    return gather(f.data(), f.grid(), locate(f.grid(), p));
}

Vec sample_vector(const VectorField& v, const Vec& p) {
    const SampleLoc loc = locate(v.grid(), p);
    Vec out;
    for (int d = 0; d < v.grid().ndims(); ++d) out[d] = gather(v.component(d), v.grid(), loc);
    return out;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    for (int d = 0; d < g.ndims(); ++d)
        if (g.dim(d) < 3)
            throw DataError("divergence: central differences need >= 3 voxels per axis");
    ScalarField out(g, 0.0);
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                double div = 0.0;
                for (int d = 0; d < g.ndims(); ++d) {
                    int ip[3] = {i, j, k}, im[3] = {i, j, k};
                    const int n = g.dim(d);
                    ip[d] = (ip[d] + 1) % n;
                    im[d] = (im[d] - 1 + n) % n;
                    const double fp = v.at(d, g.index(ip[0], ip[1], ip[2]));
                    const double fm = v.at(d, g.index(im[0], im[1], im[2]));
                    div += (fp - fm) / (2.0 * g.spacing(d));
                }
                out[idx] = div;
            }
        }
    }
    return out;
}

VectorField gradient_periodic(const ScalarField& f) {
    const Grid& g = f.grid();
    for (int d = 0; d < g.ndims(); ++d)
        if (g.dim(d) < 3)
            throw DataError("gradient: central differences need >= 3 voxels per axis");
    VectorField out(g);
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                for (int d = 0; d < g.ndims(); ++d) {
                    int ip[3] = {i, j, k}, im[3] = {i, j, k};
                    const int n = g.dim(d);
                    ip[d] = (ip[d] + 1) % n;
                    im[d] = (im[d] - 1 + n) % n;
                    out.at(d, idx) = (f[g.index(ip[0], ip[1], ip[2])] - f[g.index(im[0], im[1], im[2])]) /
                                     (2.0 * g.spacing(d));
                }
            }
        }
    }
    return out;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

double max_norm(const VectorField& v) {
    double m2 = 0.0;
    for (std::size_t i = 0; i < v.voxel_count(); ++i) m2 = std::max(m2, v.vector_at(i).norm2());
    return std::sqrt(m2);
}

}  // namespace avocado
