// field.hpp - scalar and vector voxel fields with multilinear sampling and
// periodic finite-difference operators.
#pragma once

#include <cstddef>
#include <vector>

#include "avocado/grid.hpp"

namespace avocado {

// One real value per voxel, x-fastest.
class ScalarField {
public:
    explicit ScalarField(Grid grid, double fill = 0.0)
        : grid_(grid), values_(grid.voxel_count(), fill) {}

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t idx) const { return values_[idx]; }
    double& operator[](std::size_t idx) { return values_[idx]; }
    double at(int i, int j, int k = 0) const { return values_[grid_.index(i, j, k)]; }
    double& at(int i, int j, int k = 0) { return values_[grid_.index(i, j, k)]; }

    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }

private:
    Grid grid_;
    std::vector<double> values_;
};

// One ndims-vector per voxel, component-planar storage (all x, then all y, ...).
// Units are physical mm (displacements or velocity times a step).
class VectorField {
public:
    explicit VectorField(Grid grid)
        : grid_(grid), values_(grid.voxel_count() * static_cast<std::size_t>(grid.ndims()), 0.0) {}

    const Grid& grid() const { return grid_; }
    std::size_t voxel_count() const { return grid_.voxel_count(); }

    double* component(int d) { return values_.data() + static_cast<std::size_t>(d) * voxel_count(); }
    const double* component(int d) const {
        return values_.data() + static_cast<std::size_t>(d) * voxel_count();
    }

    double at(int d, std::size_t idx) const { return component(d)[idx]; }
    double& at(int d, std::size_t idx) { return component(d)[idx]; }

    Vec vector_at(std::size_t idx) const {
        Vec r;
        for (int d = 0; d < grid_.ndims(); ++d) r[d] = component(d)[idx];
        return r;
    }
    void set_vector(std::size_t idx, const Vec& v) {
        for (int d = 0; d < grid_.ndims(); ++d) component(d)[idx] = v[d];
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

// Multilinear interpolation weights for a physical point. Out-of-grid
// coordinates clamp to the boundary face before interpolation. Continuous
// indices within 1e-12 (relative) of an integer snap to it so that sampling
// at voxel centers reproduces stored values bit-exactly.
struct SampleLoc {
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
};

SampleLoc locate(const Grid& g, const Vec& p);

double sample_scalar(const ScalarField& f, const Vec& p);
Vec sample_vector(const VectorField& v, const Vec& p);

// Central-difference divergence with periodic wrap, the exact finite-difference
// counterpart of the spectral gradient symbol. Requires >= 3 voxels per axis.
ScalarField divergence(const VectorField& v);

// Central-difference gradient with periodic wrap (same stencil convention).
VectorField gradient_periodic(const ScalarField& f);

double max_abs(const ScalarField& f);
double max_norm(const VectorField& v);

}  // namespace avocado
