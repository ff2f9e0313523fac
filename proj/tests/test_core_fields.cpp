#include <doctest.h>

#include <random>

#include "avocado/inverse_map.hpp"

using namespace avocado;

TEST_SUITE_BEGIN("core");

TEST_CASE("identity_map reproduces voxel coordinates") {
    const Grid g(2, {2, 2, 1}, Vec(1.0, 1.0), Vec(0.0, 0.0));
    const InverseMap m = identity_map(g);
    CHECK(m.mapped_at(g.index(0, 0))[0] == 0.0);
    CHECK(m.mapped_at(g.index(0, 0))[1] == 0.0);
    CHECK(m.mapped_at(g.index(1, 0))[0] == 1.0);
    CHECK(m.mapped_at(g.index(1, 0))[1] == 0.0);
    CHECK(m.mapped_at(g.index(0, 1))[0] == 0.0);
    CHECK(m.mapped_at(g.index(0, 1))[1] == 1.0);
    CHECK(m.mapped_at(g.index(1, 1))[0] == 1.0);
    CHECK(m.mapped_at(g.index(1, 1))[1] == 1.0);
}

TEST_CASE("identity_map with shifted origin and spacing") {
    const Grid g(2, {3, 3, 1}, Vec(2.0, 2.0), Vec(5.0, 5.0));
    const InverseMap m = identity_map(g);
    CHECK(m.mapped_at(g.index(1, 1))[0] == 7.0);
    CHECK(m.mapped_at(g.index(1, 1))[1] == 7.0);
}

TEST_CASE("identity map has unit jacobian everywhere") {
    for (int nd : {2, 3}) {
        const Grid g = Grid::uniform(nd, 5, 0.7, -2.0);
        const ScalarField jac = jacobian_determinant(identity_map(g));
        for (std::size_t i = 0; i < jac.size(); ++i) CHECK(jac[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("sample_scalar: constant, ramp, clamp") {
    const Grid g(2, {4, 3, 1}, Vec(1.0, 1.0), Vec(0.0, 0.0));
    ScalarField constant(g, 3.0);
    CHECK(sample_scalar(constant, Vec(0.31, 1.77)) == 3.0);
    CHECK(sample_scalar(constant, Vec(-50.0, 50.0)) == 3.0);

    ScalarField ramp(g, 0.0);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 4; ++i) ramp.at(i, j) = static_cast<double>(i);
    CHECK(sample_scalar(ramp, Vec(0.5, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
    // Far outside: clamp to the nearest boundary voxel.
    CHECK(sample_scalar(ramp, Vec(100.0, 1.0)) == 3.0);
    CHECK(sample_scalar(ramp, Vec(-100.0, -100.0)) == 0.0);
}

TEST_CASE("sample_scalar reproduces voxel values exactly at voxel centers") {
    const Grid g(3, {4, 5, 3}, Vec(0.3, 0.7, 1.1), Vec(0.1, -0.4, 2.0));
    ScalarField f(g, 0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 4; ++i)
                CHECK(sample_scalar(f, g.coord(i, j, k)) == f.at(i, j, k));
}

TEST_CASE("sample_vector basics") {
    const Grid g(2, {4, 4, 1}, Vec(1.0, 1.0), Vec(0.0, 0.0));
    VectorField cf(g);
    for (std::size_t i = 0; i < cf.voxel_count(); ++i) cf.set_vector(i, Vec(1.0, 2.0));
    const Vec a = sample_vector(cf, Vec(1.3, 2.9));
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 2.0);

    VectorField lin(g);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) lin.set_vector(g.index(i, j), Vec(static_cast<double>(i), 0.0));
    CHECK(sample_vector(lin, Vec(1.5, 2.0))[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(sample_vector(lin, Vec(99.0, 2.0))[0] == 3.0);  // clamp
}

TEST_CASE("advect with zero velocity is bit-for-bit identity") {
    const Grid g(3, {5, 4, 4}, Vec(0.3, 0.9, 0.5), Vec(0.1, 0.2, -1.0));
    InverseMap phi = identity_map(g);
    // Perturb so we are not just advecting the identity.
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < phi.voxel_count(); ++i)
            phi.component(d)[i] += 0.01 * static_cast<double>((i * 7 + d) % 5);
    const VectorField zero(g);
    const InverseMap out = advect_inverse_map(phi, zero, 0.25);
    CHECK(out == phi);
}

TEST_CASE("advect identity by constant velocity translates interior voxels") {
    const Grid g(2, {8, 8, 1}, Vec(1.0, 1.0), Vec(0.0, 0.0));
    VectorField v(g);
    for (std::size_t i = 0; i < v.voxel_count(); ++i) v.set_vector(i, Vec(1.0, -2.0));
    const double dt = 0.5;
    const InverseMap one = advect_inverse_map(identity_map(g), v, dt);
    for (int j = 2; j < 6; ++j)
        for (int i = 2; i < 6; ++i) {
            const Vec m = one.mapped_at(g.index(i, j));
            CHECK(m[0] == doctest::Approx(i - 0.5).epsilon(1e-14));
            CHECK(m[1] == doctest::Approx(j + 1.0).epsilon(1e-14));
        }
    const InverseMap two = advect_inverse_map(one, v, dt);
    for (int j = 3; j < 5; ++j)
        for (int i = 3; i < 5; ++i) {
            const Vec m = two.mapped_at(g.index(i, j));
            CHECK(m[0] == doctest::Approx(i - 1.0).epsilon(1e-14));
            CHECK(m[1] == doctest::Approx(j + 2.0).epsilon(1e-14));
        }
}

TEST_CASE("advect rejects grid mismatch and bad dt") {
    const Grid g = Grid::uniform(2, 4);
    const Grid h = Grid::uniform(2, 5);
    CHECK_THROWS_AS(advect_inverse_map(identity_map(g), VectorField(h), 0.1), DataError);
    CHECK_THROWS_AS(advect_inverse_map(identity_map(g), VectorField(g), 0.0), DataError);
}

TEST_CASE("jacobian of uniform 3D contraction is 0.125") {
    const Grid g = Grid::uniform(3, 6, 1.0, 0.0);
    InverseMap m(g);
    for (int k = 0; k < 6; ++k)
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 6; ++i)
                m.set_mapped(g.index(i, j, k), 0.5 * g.coord(i, j, k));
    const ScalarField jac = jacobian_determinant(m);
    for (std::size_t i = 0; i < jac.size(); ++i)
        CHECK(jac[i] == doctest::Approx(0.125).epsilon(1e-13));
}

TEST_CASE("jacobian rejects too-small grids") {
    const Grid g(2, {2, 4, 1}, Vec(1.0, 1.0));
    CHECK_THROWS_AS(jacobian_determinant(identity_map(g)), DataError);
}

TEST_CASE("divergence: constant and shear fields vanish") {
    const Grid g = Grid::uniform(2, 8, 1.0, 0.0);
    VectorField c(g);
    for (std::size_t i = 0; i < c.voxel_count(); ++i) c.set_vector(i, Vec(3.0, -1.0));
    const ScalarField dc = divergence(c);
    for (std::size_t i = 0; i < dc.size(); ++i) CHECK(dc[i] == 0.0);

    // v = (sin(2*pi*j/N), 0): the x component varies only along y.
    VectorField shear(g);
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 8; ++i)
            shear.set_vector(g.index(i, j), Vec(std::sin(2.0 * M_PI * j / 8.0), 0.0));
    const ScalarField ds = divergence(shear);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(ds[i] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("divergence of v=(x,0,0) on a periodic 5^3 grid: interior 1, seam -1.5") {
    const Grid g = Grid::uniform(3, 5, 1.0, 0.0);
    VectorField v(g);
    for (int k = 0; k < 5; ++k)
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 5; ++i)
                v.set_vector(g.index(i, j, k), Vec(static_cast<double>(i), 0.0, 0.0));
    const ScalarField dv = divergence(v);
    for (int k = 0; k < 5; ++k)
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 5; ++i) {
                // Hand-evaluated central stencil with wrap: (v(i+1)-v(i-1))/2.
                const double expected = (i == 0 || i == 4) ? -1.5 : 1.0;
                CHECK(dv[g.index(i, j, k)] == doctest::Approx(expected).epsilon(1e-15));
            }
}

TEST_CASE("compose_warp: identity exact, constant image, voxel shift on a ramp") {
    const Grid g(2, {8, 6, 1}, Vec(1.0, 1.0), Vec(0.0, 0.0));
    ScalarField img(g, 0.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = u(rng);

    const ScalarField same = compose_warp(img, identity_map(g));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(same[i] == img[i]);

    ScalarField constant(g, 4.2);
    const ScalarField cw = compose_warp(constant, identity_map(g));
    for (std::size_t i = 0; i < cw.size(); ++i) CHECK(cw[i] == 4.2);

    ScalarField ramp(g, 0.0);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 8; ++i) ramp.at(i, j) = static_cast<double>(i);
    InverseMap shift(g);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 8; ++i)
            shift.set_mapped(g.index(i, j), g.coord(i, j) + Vec(1.0, 0.0));
    const ScalarField moved = compose_warp(ramp, shift);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 7; ++i)  // interior along x
            CHECK(moved.at(i, j) == doctest::Approx(i + 1.0).epsilon(1e-15));
}

TEST_SUITE_END();
