// grid.hpp - physical sampling lattice and small point/vector type.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "avocado/errors.hpp"

namespace avocado {

// Fixed 3-slot point/vector in physical millimeters. 2D data leaves the
// third component at zero, so norms and arithmetic work unchanged.
struct Vec {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    Vec() = default;
    Vec(double x, double y) : v{x, y, 0.0} {}
    Vec(double x, double y, double z) : v{x, y, z} {}

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < 3; ++i) v[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    double dot(const Vec& o) const { return v[0] * o.v[0] + v[1] * o.v[1] + v[2] * o.v[2]; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

// Discrete sampling lattice shared by all fields: per-axis voxel counts,
// physical voxel size (mm) and the physical coordinate of voxel (0,...,0).
// Storage order everywhere is x-fastest.
class Grid {
public:
    Grid(int ndims, std::array<int, 3> dims, Vec spacing, Vec origin = Vec())
        : ndims_(ndims), dims_(dims), spacing_(spacing), origin_(origin) {
        if (ndims_ != 2 && ndims_ != 3)
            throw DataError("grid: ndims must be 2 or 3, got " + std::to_string(ndims_));
        for (int d = ndims_; d < 3; ++d) {
            dims_[d] = 1;
            spacing_[d] = 1.0;
            origin_[d] = 0.0;
        }
        for (int d = 0; d < ndims_; ++d) {
            if (dims_[d] < 2)
                throw DataError("grid: axis " + std::to_string(d) + " needs at least 2 voxels, got " +
                                std::to_string(dims_[d]));
            if (!(spacing_[d] > 0.0))
                throw DataError("grid: spacing on axis " + std::to_string(d) + " must be positive");
        }
    }

    // Isotropic n^ndims grid, convenient for tests and phantoms.
    static Grid uniform(int ndims, int n, double spacing = 1.0, double origin = 0.0) {
        return Grid(ndims, {n, n, n}, Vec(spacing, spacing, spacing), Vec(origin, origin, origin));
    }

    int ndims() const { return ndims_; }
    int dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double origin(int axis) const { return origin_[axis]; }
    const std::array<int, 3>& dims() const { return dims_; }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]) *
               static_cast<std::size_t>(dims_[2]);
    }

    std::size_t index(int i, int j, int k = 0) const {
        return (static_cast<std::size_t>(k) * dims_[1] + static_cast<std::size_t>(j)) * dims_[0] +
               static_cast<std::size_t>(i);
    }

    Vec coord(int i, int j, int k = 0) const {
        return Vec(origin_[0] + i * spacing_[0], origin_[1] + j * spacing_[1],
                   origin_[2] + k * spacing_[2]);
    }

    bool same_geometry(const Grid& o) const {
        if (ndims_ != o.ndims_) return false;
        for (int d = 0; d < ndims_; ++d)
            if (dims_[d] != o.dims_[d] || spacing_[d] != o.spacing_[d] || origin_[d] != o.origin_[d])
                return false;
        return true;
    }

    friend bool operator==(const Grid& a, const Grid& b) { return a.same_geometry(b); }

private:
    int ndims_;
    std::array<int, 3> dims_;
    Vec spacing_;
    Vec origin_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!a.same_geometry(b)) throw DataError(std::string(what) + ": grid mismatch");
}

}  // namespace avocado
