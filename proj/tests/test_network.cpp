#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mvm/network.hpp"

using namespace mvm;

namespace {

const MultiSection& tangent() {
    static MultiSection t = MultiSection::build_tangent_multisection({});
    return t;
}

const SpectralNetwork& tangent_network() {
    static SpectralNetwork n = build_network(tangent());
    return n;
}

}  // namespace

TEST_CASE("trace_flow on the radial field") {
    MultiSection l1 = MultiSection::line_bundle_section(1), l2 = MultiSection::line_bundle_section(2);
    PairField f(l1, l2, {0, 0});
    CHECK((f.eval({0, 0}, Vec2(0.2, 0.3)).fiber - Vec2(0.2, 0.3)).norm() < 1e-15);
    TraceOptions back;
    back.direction = -1.0;
    TraceResult b = trace_flow(f, {0, 0}, Vec2(0.1, 0.1), back);
    CHECK(b.stop == StopReason::Converged);
    CHECK(b.points.back().norm() < 1e-6);
    TraceResult fw = trace_flow(f, {0, 0}, Vec2(0.1, 0.1), TraceOptions{});
    CHECK(fw.stop == StopReason::Boundary);
    CHECK((fw.points.back() - Vec2(0.5, 0.5)).norm() < 1e-8);
    for (const Vec2& p : fw.points) CHECK(std::abs(p[0] - p[1]) < 1e-10);
}

TEST_CASE("trace_flow on a zero field stops at the start") {
    MultiSection l0 = MultiSection::line_bundle_section(0);
    PairField f(l0, l0, {0, 0});
    TraceResult r = trace_flow(f, {0, 0}, Vec2(0.3, 0.3), TraceOptions{});
    CHECK(r.stop == StopReason::Converged);
    CHECK((r.points.back() - Vec2(0.3, 0.3)).norm() == 0.0);
}

TEST_CASE("trace_flow reports a truncated budget") {
    MultiSection l1 = MultiSection::line_bundle_section(1), l2 = MultiSection::line_bundle_section(2);
    PairField f(l1, l2, {0, 0});
    TraceOptions o;
    o.max_steps = 3;
    TraceResult r = trace_flow(f, {0, 0}, Vec2(0.1, 0.1), o);
    CHECK(r.stop == StopReason::Budget);
}

TEST_CASE("line sections have an empty network") {
    SpectralNetwork n = build_network(MultiSection::line_bundle_section(1));
    CHECK(n.walls.empty());
    CHECK(is_well_behaved(n, MultiSection::line_bundle_section(1)).ok);
}

TEST_CASE("tangent network: three walls from the branch point") {
    const SpectralNetwork& n = tangent_network();
    REQUIRE(n.walls.size() == 3);
    for (const Wall& w : n.walls) {
        CHECK(w.origin_branch == 0);
        CHECK(w.origin_collision == -1);
        CHECK_FALSE(w.truncated);
        CHECK(min_slack(w.terminal) < 1e-3);
        CHECK((w.sheet_pair == std::array<int, 2>{0, 1} || w.sheet_pair == std::array<int, 2>{1, 0}));
    }
    CHECK_FALSE(n.cap_hit);
    WellBehavedReport r = is_well_behaved(n, tangent());
    CHECK(r.ok);
    CHECK(r.reasons.empty());
}

TEST_CASE("cotangent network flows in reverse") {
    MultiSection o = tangent().dualize();
    SpectralNetwork n = build_network(o);
    const SpectralNetwork& t = tangent_network();
    REQUIRE(n.walls.size() == 3);
    CHECK(is_well_behaved(n, o).ok);
    for (size_t i = 0; i < 3; ++i) {
        // same germ, the label pair reversed: the difference field is negated
        CHECK(n.walls[i].germ_angle == t.walls[i].germ_angle);
        CHECK(n.walls[i].sheet_pair[0] == t.walls[i].sheet_pair[1]);
        CHECK(n.walls[i].sheet_pair[1] == t.walls[i].sheet_pair[0]);
        CHECK((n.walls[i].terminal - t.walls[i].terminal).norm() < 1e-6);
    }
}

TEST_CASE("walls are tangent to their field") {
    PairField f(tangent(), tangent(), {0, 0});
    for (const Wall& w : tangent_network().walls) {
        double worst = 0.0;
        for (size_t i = 1; i + 1 < w.points.size(); ++i) {
            Vec2 seg = w.points[i + 1] - w.points[i];
            if (seg.norm() < 1e-12 || min_slack(w.points[i + 1]) < 1e-9) continue;
            Vec2 mid = 0.5 * (w.points[i] + w.points[i + 1]);
            Labels l{w.labels[i + 1][1], w.labels[i + 1][0]};
            Vec2 v = f.eval(l, mid, &w.points[i]).fiber;
            double c = seg.dot(v) / (seg.norm() * v.norm());
            worst = std::max(worst, std::acos(std::clamp(c, -1.0, 1.0)));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("network is deterministic") {
    SpectralNetwork a = build_network(tangent());
    const SpectralNetwork& b = tangent_network();
    REQUIRE(a.walls.size() == b.walls.size());
    for (size_t i = 0; i < a.walls.size(); ++i) CHECK(a.walls[i].points == b.walls[i].points);
    CHECK(a.generation_log == b.generation_log);
}

TEST_CASE("terminals are stable under a tighter integrator tolerance") {
    NetworkOptions o;
    o.trace.rtol /= 2;
    o.trace.atol /= 2;
    SpectralNetwork a = build_network(tangent(), o);
    const SpectralNetwork& b = tangent_network();
    REQUIRE(a.walls.size() == b.walls.size());
    for (size_t i = 0; i < a.walls.size(); ++i) CHECK((a.walls[i].terminal - b.walls[i].terminal).norm() < 1e-4);
}

TEST_CASE("a two-sheeted network spawns no collision walls") {
    for (const Wall& w : tangent_network().walls) CHECK(w.origin_collision == -1);
    for (const std::string& line : tangent_network().generation_log) CHECK(line.find("spawn") == std::string::npos);
}

TEST_CASE("well-behavedness diagnostics") {
    SpectralNetwork empty;
    CHECK(is_well_behaved(empty, tangent()).ok);
    NetworkOptions capped;
    capped.trace.max_steps = 5;
    SpectralNetwork n = build_network(tangent(), capped);
    WellBehavedReport r = is_well_behaved(n, tangent());
    CHECK_FALSE(r.ok);
    bool cites = false;
    for (const std::string& s : r.reasons) cites |= s.find("truncat") != std::string::npos;
    CHECK(cites);
}

TEST_CASE("wall germs follow the local model rays") {
    GermReport g = germ_report(tangent_network(), tangent());
    CHECK(g.ok);
    REQUIRE(g.wall_angles.size() == 3);
    CHECK(g.wall_deviation < 1e-3);
    REQUIRE(g.zero_angles.size() == 3);
    const double pi = std::numbers::pi;
    auto hit = [&](const std::vector<double>& angles, double want) {
        for (double a : angles)
            if (std::abs(std::remainder(a - want, 2 * pi)) < 1e-3) return true;
        return false;
    };
    for (int k = 0; k < 3; ++k) {
        CHECK(hit(g.zero_angles, pi / 3 + 2 * pi * k / 3));
        CHECK(hit(g.extremum_angles, 2 * pi * k / 3));
        CHECK(hit(g.wall_angles, 2 * pi * k / 3));
    }
}

TEST_CASE("segment intersection") {
    auto st = segment_intersection(Vec2(0, 0), Vec2(1, 1), Vec2(0, 1), Vec2(1, 0));
    REQUIRE(st);
    CHECK(std::abs(st->first - 0.5) < 1e-15);
    CHECK(std::abs(st->second - 0.5) < 1e-15);
    CHECK_FALSE(segment_intersection(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)));
}
