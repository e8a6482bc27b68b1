#include <doctest.h>

#include "fixture.hpp"
#include "mvm/ainfty.hpp"

using namespace mvm;

namespace {

const FunctorRow* row(const FunctorCheck& f, const std::string& a, const std::string& b) {
    for (const FunctorRow& r : f.rows)
        if (r.first == a && r.second == b) return &r;
    return nullptr;
}

FunctorCheck functor() {
    Workspace& ws = standard_workspace();
    return functor_iota_verify(ws.m2_table(), ws.hom("L1", "T"), ws.hom("T", "L2"), ws.hom("L1", "L2"), ws.weights(),
                               standard_output_symbols());
}

}  // namespace

TEST_CASE("exact weight symbols cancel") {
    WeightSymbols w;
    int a = w.add("A", 0.25);
    CHECK_THROWS(w.add("A", 0.5));
    CHECK(w.find("A") == a);
    CHECK(w.find("Z") == -1);
    WPoly e = WPoly::exp_weight(a), inv = WPoly::exp_weight(a, -1);
    CHECK(e * inv == WPoly(1));
    CHECK((e - e).is_zero());
    CHECK(std::abs(e.eval(w) - std::exp(-0.25)) < 1e-15);
    CHECK(std::abs(e.eval(w, 2.0) - std::exp(-0.5)) < 1e-15);
    CHECK(e.str(w) == "e^{-A}");
    CHECK(inv.str(w) == "e^{A}");
    CHECK_THROWS(WPoly(bside::Poly::u()).eval(w));
}

TEST_CASE("cohomology of the exceptional pairs") {
    Workspace& ws = standard_workspace();
    for (auto [a, b] : {std::pair{"L1", "T"}, {"T", "L2"}, {"L1", "L2"}}) {
        Cohomology h = ws.cohomology_of(a, b);
        CHECK(h.dim(0) == 3);
        for (auto [d, n] : h.dims)
            if (d != 0) CHECK(n == 0);
    }
    Cohomology tt = ws.cohomology_of("T", "T");
    CHECK(tt.dim(0) == 1);
    CHECK(tt.dim(1) == 0);
    const std::vector<double>& rep = tt.representatives.at(0).at(0);
    const auto& gens = ws.complex("T", "T").generators.at(0);
    REQUIRE(gens.size() == 2);
    CHECK(gens[0]->name == "P^(1)");
    CHECK(rep[0] == doctest::Approx(rep[1]));
    Cohomology o = ws.cohomology_of("L0", "Omega");
    CHECK(o.dim(0) == 0);
    CHECK(o.dim(1) == 1);
    for (auto [a, b] : {std::pair{"T", "L1"}, {"L2", "T"}, {"L2", "L1"}}) {
        Cohomology r = ws.cohomology_of(a, b);
        for (auto [d, n] : r.dims) CHECK(n == 0);
    }
}

TEST_CASE("m1 squares to zero on every complex") {
    Workspace& ws = standard_workspace();
    for (auto [a, b] : {std::pair{"L1", "T"}, {"T", "L2"}, {"L1", "L2"}, {"T", "T"}, {"L0", "T"}, {"L0", "Omega"}}) {
        const HomComplex& c = ws.complex(a, b);
        CHECK(differential_squares_to_zero(c));
        for (const auto& [d, m] : c.differential) {
            CHECK(m.rows == static_cast<int>(c.generators.count(d + 1) ? c.generators.at(d + 1).size() : 0));
            CHECK(m.cols == static_cast<int>(c.generators.at(d).size()));
        }
    }
    // a complex whose differential does not square to zero is refused
    HomComplex bad;
    Generator g0, g1, g2;
    g0.name = "a";
    g1.name = "b";
    g1.degree = 1;
    g2.name = "c";
    g2.degree = 2;
    bad.generators = {{0, {&g0}}, {1, {&g1}}, {2, {&g2}}};
    bad.differential[0] = WMatrix(1, 1);
    bad.differential[0](0, 0) = WPoly(1);
    bad.differential[1] = WMatrix(1, 1);
    bad.differential[1](0, 0) = WPoly(1);
    CHECK_FALSE(differential_squares_to_zero(bad));
    CHECK_THROWS_AS(cohomology(bad, WeightSymbols{}), std::logic_error);
}

TEST_CASE("cohomology ranks do not depend on the weight values") {
    Workspace& ws = standard_workspace();
    WeightSymbols scaled = ws.weights();
    for (double& v : scaled.values) v *= 3.0;
    for (auto [a, b] : {std::pair{"L0", "T"}, {"T", "T"}})
        CHECK(cohomology(ws.complex(a, b), scaled).dims == ws.cohomology_of(a, b).dims);
}

TEST_CASE("global sections of the tangent bundle") {
    Workspace& ws = standard_workspace();
    const HomComplex& c = ws.complex("L0", "T");
    TangentBasis b = tangent_sections_basis(c, ws.weights());
    CHECK(b.h0 == 8);
    CHECK(b.h1 == 0);
    CHECK(b.m1_rank == 1);
    CHECK(b.degree0_generators == 9);
    CHECK(b.degree1_generators == 1);
    CHECK(b.in_kernel);
    CHECK(b.independent);
    CHECK(b.h0_without_formal == 9);
    CHECK(b.basis.size() == 8);
    Cohomology stripped = cohomology(without(c, "V^b(0,0)"), ws.weights());
    CHECK(stripped.dim(0) == 9);
}

TEST_CASE("section correspondence") {
    Workspace& ws = standard_workspace();
    const HomComplex& c = ws.complex("L0", "T");
    TangentBasis b = tangent_sections_basis(c, ws.weights());
    SectionCorrespondence s =
        section_correspondence(b, c, bside::parliament_sections(bside::Bundle::Tangent), ws.weights());
    CHECK(s.rows.size() == 8);
    CHECK(s.isomorphism);
    bool lattice = false, weighted = false;
    for (const CorrespondenceRow& r : s.rows) {
        std::string t = r.str();
        lattice |= t == "V(-1,0) <-> (-1,0)*chi^{-(-1,0)}";
        weighted |= t.find("e^{a1}V^1(0,0)") != std::string::npos;
    }
    CHECK(lattice);
    CHECK(weighted);
    bool found = false;
    for (const CorrespondenceRow& r : s.weighted_generators)
        found |= r.str() == "e^{a1}V^1(0,0) <-> (-1,0)*chi^{-(0,0)}";
    CHECK(found);
    TangentBasis short_basis = b;
    short_basis.basis.pop_back();
    CHECK_THROWS_AS(section_correspondence(short_basis, c, bside::parliament_sections(bside::Bundle::Tangent),
                                           ws.weights()),
                    std::logic_error);
}

TEST_CASE("m2 table and sign reassignment") {
    Workspace& ws = standard_workspace();
    const StructureConstantTable& t = ws.m2_table();
    CHECK(t.entries.size() == 6);
    CHECK(t.max_cluster_spread < 1e-6);
    SignReassignment s = solve_sign_reassignment(t, reference_m2_signs());
    CHECK(s.found);
    CHECK(s.identity);
    CHECK(s.missing.empty());
    std::vector<ExpectedSign> flipped = reference_m2_signs();
    for (ExpectedSign& e : flipped)
        if (e.first == "U(-1,0)") e.sign = -e.sign;
    SignReassignment f = solve_sign_reassignment(t, flipped);
    CHECK(f.found);
    CHECK_FALSE(f.identity);
    CHECK(f.flips.at("U(-1,0)") == -1);
    std::vector<ExpectedSign> inconsistent = reference_m2_signs();
    inconsistent[0].sign = -inconsistent[0].sign;
    CHECK_FALSE(solve_sign_reassignment(t, inconsistent).found);
}

TEST_CASE("functor check") {
    FunctorCheck f = functor();
    CHECK(f.ok);
    CHECK(f.degree_zero);
    CHECK(f.bijective);
    CHECK(f.rows.size() == 9);
    const WeightSymbols& w = standard_workspace().weights();
    const FunctorRow* a = row(f, "U(-1,0)", "V(1,0)");
    REQUIRE(a);
    CHECK(a->transported.str(w) == "[-1]");
    CHECK(a->transported == a->composed);
    const FunctorRow* b = row(f, "U(0,0)", "V(1,0)");
    REQUIRE(b);
    CHECK(b->transported.str(w) == "[-u]");
    const FunctorRow* z = row(f, "U(-1,0)", "V(0,1)");
    REQUIRE(z);
    CHECK(z->transported.is_zero());
    CHECK(z->composed.is_zero());
    for (const FunctorRow& r : f.rows) CHECK(r.ok);
}

TEST_CASE("unit and associativity through the functor") {
    Workspace& ws = standard_workspace();
    UnitAssociativity u = unit_associativity_check(functor(), ws.hom("L1", "T"), ws.hom("T", "T"), ws.hom("T", "L2"));
    CHECK(u.ok);
    CHECK(u.checked == 9);
    CHECK(u.failures.empty());
}

TEST_CASE("dropping a generator removes its differential entries") {
    const HomComplex& c = standard_workspace().complex("T", "T");
    HomComplex d = without(c, "b12");
    CHECK(d.find("b12") == nullptr);
    CHECK(d.total() == 2);
    Cohomology h = cohomology(d, standard_workspace().weights());
    CHECK(h.dim(0) == 2);
}
