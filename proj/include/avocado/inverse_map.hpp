// inverse_map.hpp - sampled inverse diffeomorphism and its semi-Lagrangian
// update, Jacobian evaluation and image warping.
#pragma once

#include <vector>

#include "avocado/field.hpp"

namespace avocado {

// Sampled inverse map: for each voxel of its grid (target frame) stores the
// physical source-frame coordinate that the map carries it to.
class InverseMap {
public:
    explicit InverseMap(Grid grid)
        : grid_(grid), mapped_(grid.voxel_count() * static_cast<std::size_t>(grid.ndims()), 0.0) {}

    const Grid& grid() const { return grid_; }
    std::size_t voxel_count() const { return grid_.voxel_count(); }

    double* component(int d) { return mapped_.data() + static_cast<std::size_t>(d) * voxel_count(); }
    const double* component(int d) const {
        return mapped_.data() + static_cast<std::size_t>(d) * voxel_count();
    }

    Vec mapped_at(std::size_t idx) const {
        Vec r;
        for (int d = 0; d < grid_.ndims(); ++d) r[d] = component(d)[idx];
        return r;
    }
    void set_mapped(std::size_t idx, const Vec& p) {
        for (int d = 0; d < grid_.ndims(); ++d) component(d)[idx] = p[d];
    }

    friend bool operator==(const InverseMap& a, const InverseMap& b) {
        return a.grid_.same_geometry(b.grid_) && a.mapped_ == b.mapped_;
    }

private:
    Grid grid_;
    std::vector<double> mapped_;
};

// phi(x,0) = x: every voxel maps to its own physical coordinate.
InverseMap identity_map(const Grid& grid);

// Multilinear sample of the mapped coordinates at physical point p. Points
// outside the grid extend as identity plus the clamped displacement, so the
// extension stays diffeomorphic.
Vec sample_map(const InverseMap& m, const Vec& p);

// Implicit-Euler / semi-Lagrangian step: out(x) = phi(x - dt * v(x)).
InverseMap advect_inverse_map(const InverseMap& phi, const VectorField& v, double dt);

// Determinant of the spatial Jacobian of the mapped coordinates, central
// differences in the interior and one-sided at the boundary (maps are not
// periodic). Requires >= 3 voxels per axis.
ScalarField jacobian_determinant(const InverseMap& phi);

// Pull-back warp: out(x) = image(phi(x)) on phi's grid.
ScalarField compose_warp(const ScalarField& image, const InverseMap& phi);

}  // namespace avocado
