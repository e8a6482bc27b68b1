#include <doctest.h>

#include <algorithm>
#include <random>

#include "mvm/bside.hpp"

using namespace mvm::bside;

TEST_CASE("compose") {
    ExceptionalMaps m = exceptional_maps();
    CHECK(compose(m.G[1], m.F[0]).str() == "[-1]");
    CHECK(compose(m.G[2], m.F[2]).is_zero());
    CHECK(compose(PolyMatrix::identity(2), m.F[1]) == m.F[1]);
    CHECK_THROWS_AS(compose(m.F[0], m.F[1]), ShapeError);
    CHECK_THROWS_AS(PolyMatrix(2, 2, {Poly(1)}), ShapeError);
}

TEST_CASE("composition table") {
    auto table = composition_table(exceptional_maps());
    REQUIRE(table.size() == 9);
    std::map<std::pair<int, int>, std::string> want = {
        {{0, 0}, "[0]"},  {{1, 0}, "[-1]"}, {{2, 0}, "[-v]"}, {{0, 1}, "[1]"}, {{1, 1}, "[0]"},
        {{2, 1}, "[u]"},  {{0, 2}, "[v]"},  {{1, 2}, "[-u]"}, {{2, 2}, "[0]"}};
    for (const CompositionEntry& e : table) CHECK(e.value.str() == want.at({e.g, e.f}));
}

TEST_CASE("polynomial arithmetic") {
    Poly u = Poly::u(), v = Poly::v();
    CHECK((u * v - v * u).is_zero());
    CHECK(((u + 1) * (u - 1)).str() == "u^2 - 1");
    CHECK(Poly(Rational(1, 2)).str() == "1/2");
    CHECK((-(u * v)).str() == "-uv");
}

TEST_CASE("line bundle sections") {
    CHECK(line_bundle_sections(1).size() == 3);
    CHECK(line_bundle_sections(0).size() == 1);
    CHECK(line_bundle_sections(-1).empty());
    for (int k = 0; k <= 5; ++k) CHECK(static_cast<int>(line_bundle_sections(k).size()) == (k + 1) * (k + 2) / 2);
}

TEST_CASE("parliament of the tangent bundle") {
    ParliamentResult p = parliament_sections(Bundle::Tangent);
    CHECK(p.sections.size() == 9);
    REQUIRE(p.relations.size() == 1);
    CHECK(p.h0 == 8);
    CHECK(p.h1 == 0);
    std::array<int, 2> sum{0, 0};
    for (auto [i, c] : p.relations[0]) {
        CHECK(p.sections[i].m == std::array<int, 2>{0, 0});
        CHECK(c == p.relations[0].begin()->second);
        sum[0] += p.sections[i].weight[0];
        sum[1] += p.sections[i].weight[1];
    }
    CHECK(sum == std::array<int, 2>{0, 0});
}

TEST_CASE("parliament is stable under vertex permutations") {
    ParliamentResult base = parliament_sections(Bundle::Tangent);
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ParliamentMember> members = parliament(Bundle::Tangent);
        for (ParliamentMember& m : members) std::shuffle(m.polygon.begin(), m.polygon.end(), rng);
        std::shuffle(members.begin(), members.end(), rng);
        ParliamentResult p = parliament_sections(Bundle::Tangent, members);
        CHECK(p.h0 == base.h0);
        CHECK(p.relations.size() == base.relations.size());
        REQUIRE(p.sections.size() == base.sections.size());
        for (size_t i = 0; i < p.sections.size(); ++i) CHECK(p.sections[i].str() == base.sections[i].str());
    }
}

TEST_CASE("cotangent bundle") {
    ParliamentResult p = parliament_sections(Bundle::Cotangent);
    CHECK(p.sections.empty());
    CHECK(p.h0 == 0);
    CHECK(p.h1 == 1);
}

TEST_CASE("Euler sequence count") {
    EulerReport e = euler_check();
    CHECK(e.o1 == 3);
    CHECK(e.o0 == 1);
    CHECK(e.o2 == 6);
    CHECK(e.tangent == 8);
    CHECK(e.ok);
}

TEST_CASE("lattice points of polygons") {
    CHECK(lattice_points({{0, 0}, {2, 0}, {0, 2}}).size() == 6);
    CHECK(lattice_points({{0, 0}, {2, 0}}).size() == 3);
    CHECK(lattice_points({{1, 1}}).size() == 1);
    CHECK(lattice_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}).size() == 4);
}
