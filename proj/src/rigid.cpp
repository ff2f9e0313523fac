#include "avocado/rigid.hpp"

#include <Eigen/Dense>

namespace avocado {

AffineTransform solve_affine(const LandmarkSet& landmarks) {
    const int nd = landmarks.ndims;
    const int m = static_cast<int>(landmarks.size());
    if (m < nd + 1)
        throw NumericalError("solve_affine: need at least " + std::to_string(nd + 1) +
                             " landmark pairs in " + std::to_string(nd) + "D, got " +
                             std::to_string(m));

    Vec pbar, cbar;
    for (const auto& pr : landmarks.pairs) {
        pbar += pr.source;
        cbar += pr.target;
    }
    pbar *= 1.0 / m;
    cbar *= 1.0 / m;

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(nd, nd);  // sum c~ p~^T
    Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(nd, nd);  // sum p~ p~^T
    for (const auto& pr : landmarks.pairs) {
        Eigen::VectorXd pt(nd), ct(nd);
        for (int d = 0; d < nd; ++d) {
            pt[d] = pr.source[d] - pbar[d];
            ct[d] = pr.target[d] - cbar[d];
        }
        cov += ct * pt.transpose();
        mom += pt * pt.transpose();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(mom);
    if (!lu.isInvertible())
        throw NumericalError(
            "solve_affine: degenerate landmark configuration (source moment matrix singular)");
    // linear = cov * mom^-1; mom is symmetric so solve on the transpose.
    Eigen::MatrixXd linear = lu.solve(cov.transpose()).transpose();

    AffineTransform a;
    a.ndims = nd;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) a.linear[i][j] = linear(i, j);
    Vec ap;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) ap[i] += a.linear[i][j] * pbar[j];
    a.translation = cbar - ap;
    return a;
}

RigidTransform project_to_rigid(const AffineTransform& a) {
    const int nd = a.ndims;
    Eigen::MatrixXd lin(nd, nd);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) lin(i, j) = a.linear[i][j];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lin, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(nd - 1) < 1e-12 * sv(0))
        throw NumericalError("project_to_rigid: affine linear part is singular");

    Eigen::MatrixXd uvt = svd.matrixU() * svd.matrixV().transpose();
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(nd);
    if (uvt.determinant() < 0.0) diag(nd - 1) = -1.0;  // reflection guard
    Eigen::MatrixXd rot = svd.matrixU() * diag.asDiagonal() * svd.matrixV().transpose();

    RigidTransform r;
    r.ndims = nd;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) r.rotation[i][j] = rot(i, j);
    r.translation = a.translation;
    return r;
}

Vec apply_rigid(const RigidTransform& r, const Vec& p) { return r.apply(p); }

RigidTransform rigid_from_landmarks(const LandmarkSet& landmarks) {
    RigidTransform r = project_to_rigid(solve_affine(landmarks));
    const int nd = landmarks.ndims;
    Vec pbar, cbar;
    for (const auto& pr : landmarks.pairs) {
        pbar += pr.source;
        cbar += pr.target;
    }
    pbar *= 1.0 / static_cast<double>(landmarks.size());
    cbar *= 1.0 / static_cast<double>(landmarks.size());
    Vec rp;
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) rp[i] += r.rotation[i][j] * pbar[j];
    r.translation = cbar - rp;
    return r;
}

}  // namespace avocado
