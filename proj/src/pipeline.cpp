#include "avocado/pipeline.hpp"

#include <cmath>

namespace avocado {

ScalarField normalize_intensity(const ScalarField& f) {
    double lo = f[0], hi = f[0];
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i];
        if (!std::isfinite(v)) throw DataError("normalize_intensity: non-finite voxel value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ScalarField out(f.grid(), 0.0);
    if (hi > lo) {
        const double s = 1.0 / (hi - lo);
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = (f[i] - lo) * s;
    }
    return out;
}

namespace {

void fill_jacobian_stats(const InverseMap& map, MetricsReport& m) {
    const ScalarField jac = jacobian_determinant(map);
    double mn = jac[0], mx = jac[0], sum = 0.0;
    for (std::size_t i = 0; i < jac.size(); ++i) {
        mn = std::min(mn, jac[i]);
        mx = std::max(mx, jac[i]);
        sum += jac[i];
    }
    m.jacobian_min = mn;
    m.jacobian_max = mx;
    m.jacobian_mean = sum / static_cast<double>(jac.size());
    m.has_jacobian = true;
}

InverseMap rigid_folded_identity(const Grid& grid, const RigidTransform& rigid) {
    InverseMap map(grid);
    const int nx = grid.dim(0), ny = grid.dim(1), nz = grid.dim(2);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                map.set_mapped(grid.index(i, j, k), rigid.apply_inverse(grid.coord(i, j, k)));
    return map;
}

}  // namespace

RegistrationResult avocado(const ScalarField& i0, const ScalarField& i1,
                           const LandmarkSet& landmarks, const FlowParams& params) {
    params.validate();
    const Grid& grid = i0.grid();
    if (landmarks.empty() && !params.skip_rigid)
        throw DataError("avocado: empty landmark set requires skip_rigid");
    if (!landmarks.empty() && landmarks.ndims != grid.ndims())
        throw DataError("avocado: landmark dimensionality does not match target grid");

    const ScalarField t0 = normalize_intensity(i0);
    const ScalarField t1 = normalize_intensity(i1);
    const SpectralPlan plan(grid);

    RigidTransform rigid = RigidTransform::identity(grid.ndims());
    if (!params.skip_rigid) rigid = rigid_from_landmarks(landmarks);

    std::optional<FlowTrace> landmark_trace;
    InverseMap map(grid);
    if (!params.skip_landmark && !landmarks.empty()) {
        LandmarkFlowResult lf = landmark_flow(rigid, landmarks, grid, params, plan);
        map = std::move(lf.map);
        landmark_trace = std::move(lf.trace);
    } else {
        map = rigid_folded_identity(grid, rigid);
    }

    std::optional<FlowTrace> intensity_trace;
    if (!params.skip_intensity) {
        ImageFlowResult imf = image_flow(t0, t1, map, params, plan);
        map = std::move(imf.map);
        intensity_trace = std::move(imf.trace);
    }

    RegistrationResult result{std::move(map), rigid, std::move(landmark_trace),
                              std::move(intensity_trace), MetricsReport{}};
    fill_jacobian_stats(result.map, result.metrics);
    return result;
}

ScalarField warp_segmentation(const ScalarField& seg, const InverseMap& map, double threshold) {
    for (std::size_t i = 0; i < seg.size(); ++i) {
        const double v = seg[i];
        if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12)
            throw DataError("warp_segmentation: input mask is not binary at voxel " +
                            std::to_string(i));
    }
    ScalarField warped = compose_warp(seg, map);
    for (std::size_t i = 0; i < warped.size(); ++i)
        warped[i] = (warped[i] >= threshold) ? 1.0 : 0.0;
    return warped;
}

}  // namespace avocado
