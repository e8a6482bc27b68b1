#include <doctest.h>

#include <cmath>

#include "fixture.hpp"
#include "mvm/ainfty.hpp"

using namespace mvm;

namespace {

const M1Term* term(const HomComplex& c, const std::string& source) {
    for (const M1Term& t : c.terms)
        if (t.source->name == source) return &t;
    return nullptr;
}

struct Triple {
    HomContext c12, c23, c13;
};

Triple triple() {
    Workspace& ws = standard_workspace();
    return {ws.context("L1", "T"), ws.context("T", "L2"), ws.context("L1", "L2")};
}

}  // namespace

TEST_CASE("wall crossing rule") {
    // a target-object (21)-wall moves target sheet 1 to 2 (0-based: 0 -> 1)
    Labels l = cross_wall({0, 0}, 1, {1, 0});
    CHECK(l == Labels{0, 1});
    CHECK(cross_wall(l, 1, {1, 0}) == Labels{0, 1});
    // the (12)-wall of the target moves 2 back to 1
    CHECK(cross_wall(l, 1, {0, 1}) == Labels{0, 0});
    // a source-object (a b)-wall moves source a to b
    CHECK(cross_wall({0, 0}, 0, {0, 1}) == Labels{1, 0});
    CHECK(cross_wall({1, 0}, 0, {0, 1}) == Labels{1, 0});
    for (const Labels& before : wall_predecessors({0, 1}, 1, {1, 0}, 1, 2))
        CHECK(cross_wall(before, 1, {1, 0}) == Labels{0, 1});
}

TEST_CASE("m1 on the self-hom of the tangent multi-section") {
    const HomComplex& c = standard_workspace().complex("T", "T");
    const M1Term* p1 = term(c, "P^(1)");
    const M1Term* p2 = term(c, "P^(2)");
    REQUIRE(p1);
    REQUIRE(p2);
    CHECK(p1->target->name == "b12");
    CHECK(p2->target->name == "b12");
    CHECK(p1->sign == -p2->sign);
    CHECK(p1->sign == 1);
    CHECK(p1->line.trivial);
    CHECK(p1->weight == 0.0);
    CHECK(p1->symbol == -1);
}

TEST_CASE("m1 into the formal generator of Hom(L0, T)") {
    const HomComplex& c = standard_workspace().complex("L0", "T");
    const WeightSymbols& w = standard_workspace().weights();
    for (const char* v : {"V^0(0,0)", "V^1(0,0)", "V^2(0,0)"}) {
        const M1Term* t = term(c, v);
        REQUIRE(t);
        CHECK(t->target->name == "V^b(0,0)");
        CHECK(t->weight > 0.0);
        REQUIRE(t->symbol >= 0);
        CHECK(w.values[t->symbol] == t->weight);
        CHECK(replay_events(t->line));
    }
    CHECK(c.terms.size() == 3);
    for (const M1Term& t : c.terms) CHECK(t.target->degree == t.source->degree + 1);
}

TEST_CASE("m1 vanishes for degree reasons") {
    CHECK(standard_workspace().complex("L1", "L2").terms.empty());
    CHECK(standard_workspace().complex("L1", "T").terms.empty());
}

TEST_CASE("m2 entries") {
    Workspace& ws = standard_workspace();
    const StructureConstantTable& t = ws.m2_table();
    const WeightSymbols& w = ws.weights();
    REQUIRE(t.entries.size() == 6);
    const StructureEntry* a = t.find("U(-1,0)", "V(1,0)");
    const StructureEntry* b = t.find("U(0,-1)", "V(0,1)");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->output->name == "W(0,0)");
    CHECK(b->output->name == "W(0,0)");
    CHECK(a->sign == -1);
    CHECK(b->sign == 1);
    CHECK(w.names[a->symbol] == "A");
    CHECK(a->symbol == b->symbol);
    CHECK(std::abs(a->weight - b->weight) < 1e-6 * a->weight);
    CHECK_FALSE(t.find("U(-1,0)", "V(0,1)"));
    for (const StructureEntry& e : t.entries) {
        CHECK(e.output->degree == e.first->degree + e.second->degree);
        CHECK(e.output->lift[0] == e.first->lift[0] + e.second->lift[0]);
        CHECK(e.output->lift[1] == e.first->lift[1] + e.second->lift[1]);
        CHECK_FALSE(e.tree.jagged());
        CHECK(e.weight > 0.0);
        for (const JaggedLine& l : e.tree.inputs) {
            CHECK(replay_events(l));
            CHECK(l.weight >= -1e-9);
        }
    }
}

TEST_CASE("weights: telescope against quadrature") {
    Workspace& ws = standard_workspace();
    for (const StructureEntry& e : ws.m2_table().entries) {
        CHECK(std::abs(e.tree.quadrature - e.tree.traced_weight) < 1e-6 * std::max(1e-3, e.tree.traced_weight));
        for (const JaggedLine& l : e.tree.inputs)
            if (!l.trivial) CHECK(std::abs(l.quadrature - l.traced_weight) < 1e-6);
    }
    for (const M1Term& t : ws.complex("L0", "T").terms)
        CHECK(std::abs(t.line.quadrature - t.line.traced_weight) < 1e-6);
}

TEST_CASE("flipping one orientation flips exactly the products with that input") {
    Workspace& ws = standard_workspace();
    Triple tr = triple();
    OrientationData flipped = ws.orientation();
    const Generator& u = generator_named(*tr.c12.hom, "U(-1,0)");
    flipped.sign[u.name] = -ws.orientation().of(u);
    int changed = 0, with_u = 0;
    for (const Generator& a : tr.c12.hom->generators)
        for (const Generator& b : tr.c23.hom->generators) {
            auto x = enumerate_m2(a, b, tr.c12, tr.c23, tr.c13, ws.orientation(), ws.config().trees);
            auto y = enumerate_m2(a, b, tr.c12, tr.c23, tr.c13, flipped, ws.config().trees);
            REQUIRE(x.size() == y.size());
            for (size_t i = 0; i < x.size(); ++i) {
                CHECK(x[i].output == y[i].output);
                changed += x[i].sign != y[i].sign;
                with_u += a.name == u.name;
            }
        }
    CHECK(changed == 2);
    CHECK(with_u == 2);
}

TEST_CASE("tree counts are stable under a tighter integrator tolerance") {
    Workspace& ws = standard_workspace();
    Triple tr = triple();
    TreeOptions tight = ws.config().trees;
    tight.trace.rtol /= 4;
    tight.trace.atol /= 4;
    for (const StructureEntry& e : ws.m2_table().entries) {
        auto y = enumerate_m2(*e.first, *e.second, tr.c12, tr.c23, tr.c13, ws.orientation(), tight);
        REQUIRE(y.size() == 1);
        CHECK(y[0].output == e.output);
        CHECK(y[0].sign == e.sign);
        CHECK(std::abs(y[0].weight - e.weight) < 1e-6 * e.weight);
    }
}

TEST_CASE("a constant line has weight zero") {
    Workspace& ws = standard_workspace();
    const MultiSection& t = ws.object("T");
    PairField f(t, t, {0, 0});
    JaggedLine l;
    l.polyline = {Vec2(0.3, 0.3), Vec2(0.3, 0.3)};
    l.labels = {Labels{0, 0}, Labels{0, 0}};
    CHECK(telescope_weight(l, f) == 0.0);
}
