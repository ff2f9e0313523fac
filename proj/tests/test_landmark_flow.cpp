#include <doctest.h>

#include <cmath>

#include "avocado/landmark_flow.hpp"
#include "avocado/phantoms.hpp"

using namespace avocado;

TEST_SUITE_BEGIN("landmark-flow");

TEST_CASE("multiquadric values") {
    CHECK(multiquadric(0.0, 1.0) == 1.0);
    CHECK(multiquadric(std::sqrt(3.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(multiquadric(1.0, 2.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
}

TEST_CASE("solve_rbf_weights: single landmark and zero residuals") {
    RbfState s;
    s.centers = {Vec(1.0, 2.0, 3.0)};
    s.targets = {Vec(2.0, 2.0, 3.0)};
    const auto w = solve_rbf_weights(s, 1.0);
    REQUIRE(w.size() == 1);
    CHECK(w[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w[0][1] == 0.0);
    CHECK(w[0][2] == 0.0);

    RbfState z;
    z.centers = {Vec(0, 0), Vec(1, 0), Vec(0, 1)};
    z.targets = z.centers;
    for (const auto& wi : solve_rbf_weights(z, 1.0)) CHECK(wi.norm() == 0.0);
}

TEST_CASE("solve_rbf_weights: two-landmark hand-solved system") {
    // G = [[1, sqrt(2)], [sqrt(2), 1]], d1 = (1,0), d2 = (0,0):
    // b1 = (-1, 0), b2 = (sqrt(2), 0); verified by substitution below.
    RbfState s;
    s.centers = {Vec(0.0, 0.0), Vec(1.0, 0.0)};
    s.targets = {Vec(1.0, 0.0), Vec(1.0, 0.0)};
    const auto w = solve_rbf_weights(s, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(w[1][0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(w[0][1]) < 1e-14);
    CHECK(std::abs(w[1][1]) < 1e-14);
    // Substitution: G b = d.
    const double g12 = multiquadric(1.0, 1.0);
    CHECK(w[0][0] + g12 * w[1][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g12 * w[0][0] + w[1][0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_rbf_weights names the coincident pair") {
    RbfState s;
    s.centers = {Vec(0, 0), Vec(5, 5), Vec(5.0 + 1e-12, 5.0)};
    s.targets = {Vec(1, 0), Vec(5, 5), Vec(5, 5)};
    try {
        solve_rbf_weights(s, 1.0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("rbf_velocity: zero weights, interpolation property") {
    const Grid g = Grid::uniform(2, 16);
    RbfState s;
    s.centers = {Vec(4.0, 4.0), Vec(10.0, 9.0)};
    s.targets = {Vec(5.0, 4.0), Vec(10.0, 9.0)};
    s.weights = {Vec(0, 0), Vec(0, 0)};
    const VectorField zero = rbf_velocity(s, g, 1.0);
    CHECK(max_norm(zero) == 0.0);

    s.weights = solve_rbf_weights(s, 1.0);
    RbfState eval = s;
    // v(center_i) must reproduce the residuals exactly.
    for (std::size_t i = 0; i < s.centers.size(); ++i) {
        Vec v;
        for (std::size_t l = 0; l < s.centers.size(); ++l)
            v += multiquadric((s.centers[i] - s.centers[l]).norm(), 1.0) * s.weights[l];
        const Vec resid = s.targets[i] - s.centers[i];
        CHECK((v - resid).norm() < 1e-10);
    }
    // And on the sampled field, at the grid point closest to an integer center.
    const VectorField v = rbf_velocity(eval, g, 1.0);
    const Vec at_c0 = v.vector_at(g.index(4, 4));
    CHECK(at_c0[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(at_c0[1]) < 1e-10);
    const Vec at_c1 = v.vector_at(g.index(10, 9));
    CHECK(at_c1.norm() < 1e-10);
}

TEST_CASE("landmark_flow: coincident landmarks stop at zero iterations") {
    const Grid g = Grid::uniform(2, 24);
    const SpectralPlan plan(g);
    LandmarkSet lm;
    lm.ndims = 2;
    lm.pairs = {LandmarkPair{"1", Vec(6, 6), Vec(6, 6)}, LandmarkPair{"2", Vec(16, 7), Vec(16, 7)},
                LandmarkPair{"3", Vec(11, 17), Vec(11, 17)}};
    FlowParams params;
    const auto res = landmark_flow(RigidTransform::identity(2), lm, g, params, plan);
    CHECK(res.trace.converged);
    CHECK(res.trace.iterations == 0);
    CHECK(res.map == identity_map(g));
}

TEST_CASE("landmark_flow: single pair offset by 2 mm converges under eps_user") {
    const Grid g = Grid::uniform(2, 32);
    const SpectralPlan plan(g);
    LandmarkSet lm;
    lm.ndims = 2;
    lm.pairs = {LandmarkPair{"1", Vec(17.0, 15.0), Vec(15.0, 15.0)}};  // source 2 mm right of target
    FlowParams params;

    for (double alpha : {1.0, 0.0}) {
        params.alpha_incomp = alpha;
        const auto res = landmark_flow(RigidTransform::identity(2), lm, g, params, plan);
        CHECK(res.trace.converged);
        const double final_rms = std::sqrt(res.trace.energy.back() / 1.0);
        CHECK(final_rms < params.eps_user);
        for (std::size_t i = 1; i < res.trace.energy.size(); ++i)
            CHECK(res.trace.energy[i] < res.trace.energy[i - 1]);
    }
}

TEST_CASE("landmark_flow rejects grid mismatches and empty sets") {
    const Grid g = Grid::uniform(2, 16);
    const SpectralPlan other(Grid::uniform(2, 24));
    LandmarkSet lm;
    lm.ndims = 2;
    lm.pairs = {LandmarkPair{"1", Vec(4, 4), Vec(5, 4)}};
    FlowParams params;
    CHECK_THROWS_AS(landmark_flow(RigidTransform::identity(2), lm, g, params, other), DataError);
    CHECK_THROWS_AS(
        landmark_flow(RigidTransform::identity(2), LandmarkSet{2, {}}, g, params, SpectralPlan(g)),
        DataError);
}

TEST_CASE("landmark_flow: landmarks from a known divergence-free warp") {
    const Grid g = Grid::uniform(3, 32);
    const SpectralPlan plan(g);
    const InverseMap warp = divfree_warp_3d(g, 2, 2.5, 7);

    LandmarkSet lm;
    lm.ndims = 3;
    int id = 0;
    for (double z : {10.0, 21.0})
        for (double y : {9.0, 22.0})
            for (double x : {8.0, 16.0, 24.0}) {
                if (id >= 10) break;
                const Vec c(x, y, z);
                lm.pairs.push_back(LandmarkPair{std::to_string(++id), sample_map(warp, c), c});
            }
    REQUIRE(lm.size() == 10);

    FlowParams params;
    const auto res = landmark_flow(RigidTransform::identity(3), lm, g, params, plan);
    CHECK(res.trace.converged);
    CHECK(std::sqrt(res.trace.energy.back() / 10.0) < params.eps_user);

    const ScalarField jac = jacobian_determinant(res.map);
    for (int k = 1; k < 31; ++k)
        for (int j = 1; j < 31; ++j)
            for (int i = 1; i < 31; ++i) {
                CHECK(jac[g.index(i, j, k)] > 0.97);
                CHECK(jac[g.index(i, j, k)] < 1.03);
            }
}

TEST_SUITE_END();
