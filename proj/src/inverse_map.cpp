#include "avocado/inverse_map.hpp"

#include <cmath>

namespace avocado {

InverseMap identity_map(const Grid& grid) {
    InverseMap m(grid);
    const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                m.set_mapped(grid.index(i, j, k), grid.coord(i, j, k));
    return m;
}

namespace {

inline double gather_component(const double* vals, const Grid& g, const SampleLoc& loc) {
    if (g.ndims() == 2) {
        const std::size_t i00 = g.index(loc.base[0], loc.base[1]);
        const std::size_t i01 = i00 + static_cast<std::size_t>(g.dim(0));
        const double fx = loc.frac[0], fy = loc.frac[1];
        const double a = (1.0 - fx) * vals[i00] + fx * vals[i00 + 1];
        const double b = (1.0 - fx) * vals[i01] + fx * vals[i01 + 1];
        return (1.0 - fy) * a + fy * b;
    }
    const std::size_t nx = static_cast<std::size_t>(g.dim(0));
    const std::size_t nxy = nx * static_cast<std::size_t>(g.dim(1));
    const std::size_t i000 = g.index(loc.base[0], loc.base[1], loc.base[2]);
    const double fx = loc.frac[0], fy = loc.frac[1], fz = loc.frac[2];
    const double a = (1.0 - fx) * vals[i000] + fx * vals[i000 + 1];
    const double b = (1.0 - fx) * vals[i000 + nx] + fx * vals[i000 + nx + 1];
    const double c = (1.0 - fx) * vals[i000 + nxy] + fx * vals[i000 + nxy + 1];
    const double d = (1.0 - fx) * vals[i000 + nxy + nx] + fx * vals[i000 + nxy + nx + 1];
    return (1.0 - fz) * ((1.0 - fy) * a + fy * b) + fz * ((1.0 - fy) * c + fy * d);
}

}  // namespace

Vec sample_map(const InverseMap& m, const Vec& p) {
    const Grid& g = m.grid();
    const SampleLoc loc = locate(g, p);
    Vec out;
    for (int d = 0; d < g.ndims(); ++d) out[d] = gather_component(m.component(d), g, loc);
    // Outside the grid the map extends as identity plus the boundary
    // displacement: clamping the mapped coordinates themselves would compress
    // inflow boundaries and destroy the Jacobian there.
    for (int d = 0; d < g.ndims(); ++d) {
        const double lo = g.origin(d);
        const double hi = g.origin(d) + (g.dim(d) - 1) * g.spacing(d);
        if (p[d] < lo)
            out[d] += p[d] - lo;
        else if (p[d] > hi)
            out[d] += p[d] - hi;
    }
    return out;
}

InverseMap advect_inverse_map(const InverseMap& phi, const VectorField& v, double dt) {
    require_same_grid(phi.grid(), v.grid(), "advect_inverse_map");
    if (!(dt > 0.0)) throw DataError("advect_inverse_map: dt must be positive");
    const Grid& g = phi.grid();
    InverseMap out(g);
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t idx = g.index(i, j, k);
                const Vec x = g.coord(i, j, k);
                const Vec q = x - dt * v.vector_at(idx);
                out.set_mapped(idx, sample_map(phi, q));
            }
        }
    }
    return out;
}

ScalarField jacobian_determinant(const InverseMap& phi) {
    const Grid& g = phi.grid();
    for (int d = 0; d < g.ndims(); ++d)
        if (g.dim(d) < 3)
            throw DataError("jacobian_determinant: need >= 3 voxels per axis");
    ScalarField out(g, 1.0);
    const int nd = g.ndims();
    const int nx = g.dim(0), ny = g.dim(1), nz = g.dim(2);
    double J[3][3];
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                // d(mapped_r)/d(x_c): central stencil inside, one-sided at faces.
                for (int c = 0; c < nd; ++c) {
                    const int pos[3] = {i, j, k};
                    const int n = g.dim(c);
                    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
                    if (pos[c] == 0) {
                        hi[c] = 1;
                    } else if (pos[c] == n - 1) {
                        lo[c] = n - 2;
                    } else {
                        lo[c] = pos[c] - 1;
                        hi[c] = pos[c] + 1;
                    }
                    const std::size_t ilo = g.index(lo[0], lo[1], lo[2]);
                    const std::size_t ihi = g.index(hi[0], hi[1], hi[2]);
                    const double h = (hi[c] - lo[c]) * g.spacing(c);
                    for (int r = 0; r < nd; ++r)
                        J[r][c] = (phi.component(r)[ihi] - phi.component(r)[ilo]) / h;
                }
                double det;
                if (nd == 2) {
                    det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
                } else {
                    det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                          J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                          J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
                }
                out[g.index(i, j, k)] = det;
            }
        }
    }
    return out;
}

ScalarField compose_warp(const ScalarField& image, const InverseMap& phi) {
    const Grid& g = phi.grid();
    ScalarField out(g, 0.0);
    for (std::size_t idx = 0; idx < phi.voxel_count(); ++idx)
        out[idx] = sample_scalar(image, phi.mapped_at(idx));
    return out;
}

}  // namespace avocado
