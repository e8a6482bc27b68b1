#include <doctest.h>

#include <cmath>
#include <random>

#include "mvm/geom.hpp"

using namespace mvm;

TEST_CASE("legendre closed form") {
    Vec2 c = legendre(Vec2(0, 0));
    CHECK(c[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    Vec2 x = legendre(Vec2(std::log(2.0) / 2, 0));
    CHECK(std::abs(x[0] - 0.5) < 1e-15);
    CHECK(std::abs(x[1] - 0.25) < 1e-15);
}

TEST_CASE("legendre inverse") {
    CHECK(legendre_inverse(Vec2(1.0 / 3, 1.0 / 3)).norm() < 1e-15);
    Vec2 xi = legendre_inverse(Vec2(0.5, 0.25));
    CHECK(std::abs(xi[0] - std::log(2.0) / 2) < 1e-15);
    CHECK(std::abs(xi[1]) < 1e-15);
    CHECK_THROWS_AS(legendre_inverse(Vec2(1, 0)), DomainError);
    CHECK_THROWS_AS(legendre_inverse(Vec2(0.6, 0.6)), DomainError);
    CHECK_THROWS_AS(legendre_inverse(Vec2(0.0, 0.5)), DomainError);
}

TEST_CASE("legendre roundtrip") {
    Vec2 xi(0.7, -1.3);
    CHECK((legendre_inverse(legendre(xi)) - xi).cwiseAbs().maxCoeff() < 1e-9);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> box(-8, 8);
    for (int i = 0; i < 100; ++i) {
        Vec2 p(box(rng), box(rng));
        CHECK((legendre_inverse(legendre(p)) - p).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("legendre stays finite and inside for large arguments") {
    for (Vec2 xi : {Vec2(800, 0), Vec2(-800, -800), Vec2(800, 800), Vec2(0, -1e4)}) {
        Vec2 x = legendre(xi);
        CHECK(x.allFinite());
        CHECK(x[0] >= 0.0);
        CHECK(x[1] >= 0.0);
        CHECK(x[0] + x[1] <= 1.0);
    }
}

TEST_CASE("metric at the origin") {
    Mat2 g = metric_upper(Vec2(0, 0));
    CHECK(std::abs(g(0, 0) - 4.0 / 9) < 1e-15);
    CHECK(std::abs(g(0, 1) + 2.0 / 9) < 1e-15);
    CHECK(std::abs(g(1, 0) + 2.0 / 9) < 1e-15);
    CHECK(std::abs(g(1, 1) - 4.0 / 9) < 1e-15);
}

TEST_CASE("metric is symmetric positive definite") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> box(-6, 6);
    for (int i = 0; i < 100; ++i) {
        Mat2 g = metric_upper(Vec2(box(rng), box(rng)));
        CHECK(g(0, 1) == g(1, 0));
        Eigen::SelfAdjointEigenSolver<Mat2> es(g);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("metric equals the Hessian of psi") {
    Vec2 xi(0.4, -0.8);
    const double h = 1e-4;
    Mat2 fd;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Vec2 ei = Vec2::Zero(), ej = Vec2::Zero();
            ei[i] = h;
            ej[j] = h;
            fd(i, j) = (psi(xi + ei + ej) - psi(xi + ei - ej) - psi(xi - ei + ej) + psi(xi - ei - ej)) / (4 * h * h);
        }
    Mat2 g = metric_upper(xi);
    CHECK((fd - g).norm() / g.norm() < 1e-6);
}

TEST_CASE("Jacobian of legendre equals the metric") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> box(-5, 5);
    for (int n = 0; n < 100; ++n) {
        Vec2 xi(box(rng), box(rng));
        const double h = 1e-4;
        Mat2 fd;
        for (int k = 0; k < 2; ++k) {
            Vec2 e = Vec2::Zero();
            e[k] = h;
            fd.col(k) = (legendre(xi + e) - legendre(xi - e)) / (2 * h);
        }
        Mat2 g = metric_upper(xi);
        CHECK((fd - g).norm() / g.norm() < 1e-6);
        CHECK((metric_in_x(legendre(xi)) - g).norm() < 1e-12);
    }
}

TEST_CASE("fan and polytope") {
    Fan f = Fan::projective_plane();
    CHECK(f.rays.size() == 3);
    CHECK(f.maximal_cones.size() == 3);
    CHECK(f.is_complete());
    Fan broken = f;
    broken.maximal_cones.pop_back();
    CHECK_FALSE(broken.is_complete());

    MomentPolytope p = MomentPolytope::projective_plane();
    REQUIRE(p.vertices.size() == 3);
    CHECK(p.vertices[0] == Vec2(0, 0));
    CHECK(p.vertices[1] == Vec2(1, 0));
    CHECK(p.vertices[2] == Vec2(0, 1));
    for (const Vec2& v : p.vertices) {
        int tight = 0;
        for (const Facet& fa : p.facets) tight += std::abs(fa.slack(v)) < 1e-15;
        CHECK(tight == 2);
    }
    CHECK(p.contains(Vec2(0.2, 0.3)));
    CHECK(p.contains(Vec2(0.5, 0.5)));
    CHECK_FALSE(p.contains(Vec2(-1e-6, 0.3)));
    CHECK_FALSE(p.contains(Vec2(0.6, 0.5)));
}

TEST_CASE("minimal faces") {
    CHECK(minimal_face(Vec2(0.2, 0.3), kBoundaryTol).dim == 2);
    Face e = minimal_face(Vec2(0.0, 0.4), kBoundaryTol);
    CHECK(e.dim == 1);
    CHECK(e.index == 1);
    CHECK(std::abs(e.tangent.norm() - 1) < 1e-15);
    Face v = minimal_face(Vec2(1.0, 0.0), kBoundaryTol);
    CHECK(v.dim == 0);
    CHECK(v.index == 1);
}
