#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvm/floer.hpp"
#include "mvm/lagrangian.hpp"

using namespace mvm;

namespace {

const MultiSection& tangent() {
    static MultiSection t = MultiSection::build_tangent_multisection({});
    return t;
}

// Fiber pairs of both sheets at a point, sorted for multiset comparison.
std::vector<std::array<double, 2>> fibers(const MultiSection& m, const Vec2& x) {
    std::vector<std::array<double, 2>> out;
    for (int s = 0; s < m.degree(); ++s) {
        Vec2 y = m.sheet_eval(s, x).fiber;
        out.push_back({y[0], y[1]});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool near(const Vec2& a, const Vec2& b, double tol) { return (a - b).cwiseAbs().maxCoeff() < tol; }

}  // namespace

TEST_CASE("line bundle sections") {
    MultiSection l0 = MultiSection::line_bundle_section(0);
    for (Vec2 x : {Vec2(0.2, 0.3), Vec2(0.7, 0.1), Vec2(0.0, 0.5)}) {
        SheetValue v = l0.sheet_eval(0, x);
        CHECK(v.value == 0.0);
        CHECK(v.fiber == Vec2::Zero());
    }
    MultiSection l2 = MultiSection::line_bundle_section(2);
    CHECK(near(l2.sheet_eval(0, Vec2(0.2, 0.1)).fiber, Vec2(0.4, 0.2), 1e-15));
    MultiSection l1 = MultiSection::line_bundle_section(1);
    CHECK(std::abs(l1.sheet_eval(0, centroid()).value - std::log(3.0) / 2) < 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        Vec2 x(u(rng), u(rng));
        if (min_slack(x) <= 1e-6) continue;
        for (int k : {-1, 1, 3}) {
            SheetValue v = MultiSection::line_bundle_section(k).sheet_eval(0, x);
            CHECK(std::abs(v.value + 0.5 * k * std::log(1 - x[0] - x[1])) < 1e-12);
            CHECK(near(v.fiber, k * x, 1e-12));
        }
    }
}

TEST_CASE("local model closed forms") {
    LocalModelValue a = local_model_eval(1.0, 0.0, 0);
    CHECK(std::abs(a.value - 2.0 / 3) < 1e-15);
    CHECK(near(a.fiber, Vec2(1, 0), 1e-15));
    // eta^2 = conj(zeta) at zeta = 1
    std::complex<double> eta(a.fiber[0], a.fiber[1]);
    CHECK(std::abs(eta * eta - 1.0) < 1e-15);
    LocalModelValue z = local_model_eval(0.0, 1.3, 1);
    CHECK(z.value == 0.0);
    CHECK(z.fiber == Vec2::Zero());
    LocalModelValue p = local_model_eval(1.0, std::numbers::pi, 0);
    LocalModelValue q = local_model_eval(1.0, 3 * std::numbers::pi, 0);
    LocalModelValue p1 = local_model_eval(1.0, std::numbers::pi, 1);
    CHECK(near(p.fiber, -q.fiber, 1e-15));
    CHECK(near(p1.fiber, q.fiber, 1e-15));
    for (double th : {0.3, 1.7, 4.0}) {
        LocalModelValue b = local_model_eval(0.49, th, 0);
        std::complex<double> e(b.fiber[0], b.fiber[1]);
        CHECK(std::abs(e * e - std::conj(std::polar(0.49, th))) < 1e-14);
    }
}

TEST_CASE("tangent multi-section vertex fibers") {
    const MultiSection& t = tangent();
    CHECK(t.degree() == 2);
    CHECK(t.branch_points().size() == 1);
    CHECK(t.branch_cuts().size() == 1);
    CHECK(min_slack(t.branch_cuts()[0].polyline.back()) < 1e-9);
    const Vec2 vertex[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const Vec2 sheet1[3] = {Vec2(-1, 0), Vec2(1, 0), Vec2(0, 1)};
    const Vec2 sheet2[3] = {Vec2(0, -1), Vec2(1, -1), Vec2(-1, 1)};
    for (int v = 0; v < 3; ++v) {
        auto f = fibers(t, vertex[v]);
        std::vector<std::array<double, 2>> want = {{sheet1[v][0], sheet1[v][1]}, {sheet2[v][0], sheet2[v][1]}};
        std::sort(want.begin(), want.end());
        for (int s = 0; s < 2; ++s) {
            CHECK(std::abs(f[s][0] - want[s][0]) < 1e-9);
            CHECK(std::abs(f[s][1] - want[s][1]) < 1e-9);
        }
    }
}

TEST_CASE("tangent multi-section asymptotics at the origin vertex") {
    const MultiSection& t = tangent();
    for (Vec2 x : {Vec2(0.001, 0.002), Vec2(0.01, 0.02), Vec2(0.03, 0.01), Vec2(0.0, 0.03)}) {
        double tol = 0.05 * x.norm();
        CHECK(near(t.sheet_eval(0, x).fiber, Vec2(2 * x[0] - 1, x[1]), tol));
        CHECK(near(t.sheet_eval(1, x).fiber, Vec2(x[0], 2 * x[1] - 1), tol));
    }
}

TEST_CASE("no interior intersections with the degree one and two sections") {
    const MultiSection& t = tangent();
    for (int k : {1, 2}) {
        MultiSection l = MultiSection::line_bundle_section(k);
        CHECK_FALSE(has_interior_intersection(l, t, 200));
        CHECK_FALSE(has_interior_intersection(t, l, 200));
    }
}

TEST_CASE("construction rejects a nonpositive epsilon") {
    TangentParams p;
    p.epsilon = 0.0;
    CHECK_THROWS_AS(MultiSection::build_tangent_multisection(p), DomainError);
    p.epsilon = -0.01;
    CHECK_THROWS_AS(MultiSection::build_tangent_multisection(p), DomainError);
}

TEST_CASE("dualize") {
    for (int k : {0, 1, 2}) {
        MultiSection d = MultiSection::line_bundle_section(k).dualize();
        CHECK(d.line_degree() == -k);
    }
    const MultiSection& t = tangent();
    MultiSection o = t.dualize();
    MultiSection back = o.dualize();
    CHECK(o.branch_points()[0].position == t.branch_points()[0].position);
    CHECK(o.branch_cuts()[0].polyline == t.branch_cuts()[0].polyline);
    for (int i = 1; i < 20; ++i)
        for (int j = 1; i + j < 20; ++j) {
            Vec2 x(i / 20.0, j / 20.0);
            for (int s = 0; s < 2; ++s) {
                SheetValue a = t.sheet_eval(s, x), b = back.sheet_eval(s, x), c = o.sheet_eval(s, x);
                CHECK(a.value == b.value);
                CHECK(a.fiber == b.fiber);
                CHECK(c.value == -a.value);
                CHECK(c.fiber == -a.fiber);
            }
        }
    const Vec2 vertex[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const Vec2 sheet1[3] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, -1)};
    const Vec2 sheet2[3] = {Vec2(0, 1), Vec2(-1, 1), Vec2(1, -1)};
    for (int v = 0; v < 3; ++v) {
        auto f = fibers(o, vertex[v]);
        std::vector<std::array<double, 2>> want = {{sheet1[v][0], sheet1[v][1]}, {sheet2[v][0], sheet2[v][1]}};
        std::sort(want.begin(), want.end());
        for (int s = 0; s < 2; ++s) {
            CHECK(std::abs(f[s][0] - want[s][0]) < 1e-9);
            CHECK(std::abs(f[s][1] - want[s][1]) < 1e-9);
        }
    }
}

TEST_CASE("monodromy around the branch point is the transposition") {
    const MultiSection& t = tangent();
    for (double r : {0.03, 0.15, 0.3}) {
        const int steps = 2000;
        int label = 0;
        Vec2 start = t.patch_point(r, 0.1);
        Vec2 prev = t.sheet_eval(label, start).fiber;
        double min_gap = 1e300;
        for (int i = 1; i <= steps; ++i) {
            Vec2 x = t.patch_point(r, 0.1 + 2 * std::numbers::pi * i / steps);
            Vec2 a = t.sheet_eval(0, x).fiber, b = t.sheet_eval(1, x).fiber;
            min_gap = std::min(min_gap, (a - b).norm());
            label = (a - prev).norm() <= (b - prev).norm() ? 0 : 1;
            prev = label == 0 ? a : b;
        }
        CHECK(min_gap > 1e-3);
        CHECK(label == 1);
    }
    // the same loop for a single sheet returns to itself
    MultiSection l = MultiSection::line_bundle_section(1);
    CHECK(l.branch_points().empty());
}

TEST_CASE("crossing the cut swaps the labels") {
    const MultiSection& t = tangent();
    const auto& cut = t.branch_cuts()[0].polyline;
    Vec2 mid = cut[cut.size() / 2];
    Vec2 dir = cut[cut.size() / 2 + 1] - cut[cut.size() / 2 - 1];
    Vec2 n(-dir[1], dir[0]);
    n.normalize();
    Vec2 a = mid + 1e-6 * n, b = mid - 1e-6 * n;
    REQUIRE(t.crosses_cut(a, b));
    for (int s = 0; s < 2; ++s) {
        SheetValue raw = t.sheet_eval(s, b), cont = t.sheet_eval(s, b, &a);
        SheetValue other = t.sheet_eval(1 - s, b);
        CHECK(cont.value == other.value);
        CHECK(near(cont.fiber, t.sheet_eval(s, a).fiber, 1e-4));
        CHECK_FALSE(near(raw.fiber, t.sheet_eval(s, a).fiber, 1e-2));
    }
}

TEST_CASE("sheet count off the cut") {
    const MultiSection& t = tangent();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    int counted = 0;
    while (counted < 100) {
        Vec2 x(u(rng), u(rng));
        if (min_slack(x) < 1e-3 || std::abs(t.cut_offset(x)) < 1.0 || t.patch_radius(x) < 1e-3) continue;
        ++counted;
        auto f = fibers(t, x);
        CHECK(f.size() == 2);
        CHECK((Vec2(f[0][0], f[0][1]) - Vec2(f[1][0], f[1][1])).norm() > 1e-6);
        for (auto& y : f) CHECK((std::isfinite(y[0]) && std::isfinite(y[1])));
    }
}

TEST_CASE("branch point evaluation is flagged degenerate") {
    const MultiSection& t = tangent();
    SheetValue a = t.sheet_eval(0, t.branch_points()[0].position);
    SheetValue b = t.sheet_eval(1, t.branch_points()[0].position);
    CHECK(a.degenerate);
    CHECK(a.value == b.value);
}

TEST_CASE("edge fibers are mirror symmetric about the edge midpoint") {
    // the reflection of P fixing the vertex opposite facet j, acting on fibers linearly
    const Mat2 reflect[3] = {(Mat2() << 0, 1, 1, 0).finished(), (Mat2() << 1, 0, -1, -1).finished(),
                             (Mat2() << -1, -1, 0, 1).finished()};
    const Vec2 v[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const MultiSection& t = tangent();
    for (int j = 0; j < 3; ++j) {
        Vec2 a = v[(j + 1) % 3], b = v[(j + 2) % 3];
        for (int i = 1; i < 40; ++i) {
            double s = i / 40.0;
            Vec2 x = (1 - s) * a + s * b, xr = s * a + (1 - s) * b;
            auto f = fibers(t, x);
            std::vector<std::array<double, 2>> g;
            for (auto& y : fibers(t, xr)) {
                Vec2 r = reflect[j] * Vec2(y[0], y[1]);
                g.push_back({r[0], r[1]});
            }
            std::sort(g.begin(), g.end());
            for (int k = 0; k < 2; ++k) {
                CHECK(std::abs(f[k][0] - g[k][0]) < 1e-9);
                CHECK(std::abs(f[k][1] - g[k][1]) < 1e-9);
            }
        }
    }
}

TEST_CASE("fiber and potential are consistent") {
    CHECK(fiber_consistency_error(tangent(), 100) < 1e-6);
    CHECK(fiber_consistency_error(tangent().dualize(), 100) < 1e-6);
    for (int k : {0, 1, 2}) CHECK(fiber_consistency_error(MultiSection::line_bundle_section(k), 100) < 1e-6);
}

TEST_CASE("local model residual inside the patch") {
    CHECK(local_model_residual(tangent(), 60) < 1e-8);
    CHECK(local_model_residual(tangent().dualize(), 60) < 1e-8);
}

TEST_CASE("patch chart round trip") {
    const MultiSection& t = tangent();
    for (double r : {1e-4, 0.01, 0.05})
        for (double th : {0.0, 1.0, 2.5, 4.0, 6.0}) {
            Vec2 x = t.patch_point(r, th);
            CHECK(std::abs(t.patch_radius(x) - r) < 1e-12);
            double d = std::remainder(t.patch_angle(x) - th, 2 * std::numbers::pi);
            CHECK(std::abs(d) < 1e-9);
        }
}
