// rigid.hpp - landmark-based affine least squares and its projection onto a
// volume-preserving rigid transform.
#pragma once

#include <array>

#include "avocado/landmarks.hpp"

namespace avocado {

// General linear map plus translation, row-major ndims x ndims.
struct AffineTransform {
    int ndims = 3;
    std::array<std::array<double, 3>, 3> linear{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Vec translation;

    Vec apply(const Vec& p) const {
        Vec r = translation;
        for (int i = 0; i < ndims; ++i)
            for (int j = 0; j < ndims; ++j) r[i] += linear[i][j] * p[j];
        return r;
    }
};

// Proper rotation (det = +1) plus translation.
struct RigidTransform {
    int ndims = 3;
    std::array<std::array<double, 3>, 3> rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Vec translation;

    static RigidTransform identity(int ndims) {
        RigidTransform r;
        r.ndims = ndims;
        return r;
    }

    Vec apply(const Vec& p) const {
        Vec r = translation;
        for (int i = 0; i < ndims; ++i)
            for (int j = 0; j < ndims; ++j) r[i] += rotation[i][j] * p[j];
        return r;
    }

    // Inverse of a rigid map: R^T (p - t).
    Vec apply_inverse(const Vec& p) const {
        const Vec q = p - translation;
        Vec r;
        for (int i = 0; i < ndims; ++i)
            for (int j = 0; j < ndims; ++j) r[i] += rotation[j][i] * q[j];
        return r;
    }
};

// Least-squares affine fit of c ~ A p + t over centroid-subtracted landmarks.
// Throws NumericalError when the source configuration is degenerate
// (coplanar/collinear) or the set is too small for the solve.
AffineTransform solve_affine(const LandmarkSet& landmarks);

// Closest proper rotation to the affine linear part via SVD, with a sign
// guard on the smallest singular direction so det is always +1. The
// translation is carried over unchanged.
RigidTransform project_to_rigid(const AffineTransform& a);

Vec apply_rigid(const RigidTransform& r, const Vec& p);

// Rigid stage used by the pipeline: affine fit, SVD projection, then the
// translation refit t = mean(c) - R * mean(p). Carrying the affine's own
// translation would mis-place the centroid whenever the affine carries scale.
RigidTransform rigid_from_landmarks(const LandmarkSet& landmarks);

}  // namespace avocado
