#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mvm/bside.hpp"
#include "mvm/floer.hpp"
#include "mvm/trees.hpp"

namespace mvm {

using bside::Rational;

// Named nonnegative reals; a symbol's value is the area it stands for.
struct WeightSymbols {
    std::vector<std::string> names;
    std::vector<double> values;

    int add(const std::string& name, double value);
    int find(const std::string& name) const;  // -1 when absent
};

// Exponent vector of e^{-sum n_i w_i}: symbol index -> n_i, zero entries never stored.
using ExpVec = std::map<int, int>;

// Exact sum of terms e^{-<n, w>} p(u, v).
class WPoly {
public:
    WPoly() = default;
    WPoly(long long c) : WPoly(bside::Poly(c)) {}
    WPoly(const bside::Poly& p);
    // e^{-n w_symbol}
    static WPoly exp_weight(int symbol, int n = 1);

    WPoly& operator+=(const WPoly& o);
    WPoly& operator-=(const WPoly& o);
    WPoly operator-() const;
    friend WPoly operator+(WPoly a, const WPoly& b) { return a += b; }
    friend WPoly operator-(WPoly a, const WPoly& b) { return a -= b; }
    friend WPoly operator*(const WPoly& a, const WPoly& b);
    bool operator==(const WPoly& o) const { return terms_ == o.terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool weight_free() const;
    const std::map<ExpVec, bside::Poly>& terms() const { return terms_; }

    // Numeric value with every symbol scaled by `scale`; throws when u or v occur.
    double eval(const WeightSymbols& w, double scale = 1.0) const;
    std::string str(const WeightSymbols& w) const;

private:
    std::map<ExpVec, bside::Poly> terms_;
};

struct WMatrix {
    int rows = 0, cols = 0;
    std::vector<WPoly> e;

    WMatrix() = default;
    WMatrix(int r, int c) : rows(r), cols(c), e(static_cast<size_t>(r) * c) {}
    static WMatrix from(const bside::PolyMatrix& m);
    WPoly& operator()(int i, int j) { return e[static_cast<size_t>(i) * cols + j]; }
    const WPoly& operator()(int i, int j) const { return e[static_cast<size_t>(i) * cols + j]; }
    bool operator==(const WMatrix&) const = default;
    bool is_zero() const;
    std::string str(const WeightSymbols& w) const;
};
WMatrix operator*(const WMatrix& a, const WMatrix& b);
WMatrix operator*(const WPoly& s, WMatrix m);

// Assigns display names: letter plus lift for regular generators, with the facet index as a
// superscript when lifts repeat; letter^b for a formal generator of a line; P^(s) and b<st>
// for fundamental classes and branch generators of a self-hom.
void name_generators(HomSpace& hs, const std::string& letter);

struct M1Term {
    const Generator* source;
    const Generator* target;
    int sign;
    int symbol;  // -1 for weight zero
    double weight;
    JaggedLine line;
};

struct HomComplex {
    std::string from, to;
    std::map<int, std::vector<const Generator*>> generators;  // by degree, sorted by name
    // differential[d]: rows generators[d+1], columns generators[d]
    std::map<int, WMatrix> differential;
    std::vector<M1Term> terms;

    int index_of(const Generator* g) const;  // position inside its degree, -1 when absent
    const Generator* find(const std::string& name) const;
    int total() const;
};

// m1 of every generator via enumerate_m1; nonzero line weights become symbols prefix0, prefix1, ...
// in source order.
HomComplex assemble_complex(const std::string& from, const std::string& to, const HomContext& ctx,
                            const OrientationData& o, WeightSymbols& w, const std::string& prefix,
                            const TreeOptions& opt = {});
// Drops a generator and every differential entry touching it.
HomComplex without(const HomComplex& c, const std::string& name);

// Exact check that consecutive differentials compose to zero.
bool differential_squares_to_zero(const HomComplex& c);

struct RankUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cohomology {
    std::map<int, int> dims;
    // Coordinates (over generators[d]) of a basis of cycles complementary to the boundaries.
    std::map<int, std::vector<std::vector<double>>> representatives;
    std::map<int, int> ranks;  // rank of differential[d]
    int dim(int d) const;
};
// Rank-nullity at the computed weights and at weights scaled by 1.7. Throws logic_error when
// the differential does not square to zero and RankUnstable when the two ranks differ.
Cohomology cohomology(const HomComplex& c, const WeightSymbols& w);

// m2 table on an exceptional triple.
struct StructureEntry {
    const Generator* first;
    const Generator* second;
    const Generator* output;
    int sign;
    int symbol;
    double weight;
    GradientTree tree;
};

struct StructureConstantTable {
    std::vector<StructureEntry> entries;
    // Largest relative spread of the weights sharing one symbol.
    double max_cluster_spread = 0.0;

    const StructureEntry* find(const std::string& first, const std::string& second) const;
};

// Weights of trees ending at one output share a symbol when they agree within cluster_rtol.
// output_symbols names the first cluster of each output (default w[output]); further clusters
// append primes.
StructureConstantTable structure_constants(const HomSpace& h12, const HomSpace& h23, const HomContext& c12,
                                           const HomContext& c23, const HomContext& c13,
                                           const OrientationData& o, WeightSymbols& w,
                                           const std::map<std::string, std::string>& output_symbols,
                                           double cluster_rtol = 1e-6, const TreeOptions& opt = {});
// Output symbols of the exceptional triple: W(0,0) -> A, W(1,0) -> B, W(0,1) -> C.
std::map<std::string, std::string> standard_output_symbols();

struct ExpectedSign {
    std::string first, second, output;
    int sign;
};
// Reference sign table: the six products with orientations chosen so that the functor is
// multiplicative.
std::vector<ExpectedSign> reference_m2_signs();
// Orientation used by default: flips W(1,0) and W(0,1).
OrientationData default_orientation();

struct SignReassignment {
    bool found = false;
    bool identity = false;
    std::map<std::string, int> flips;  // generator name -> +-1
    std::vector<std::string> missing;  // expected products absent from the table, or extras
};
// Generator-wise sign vector e with e(first) e(second) e(output) sign = expected for every entry.
SignReassignment solve_sign_reassignment(const StructureConstantTable& t, const std::vector<ExpectedSign>& expected);

struct FunctorRow {
    std::string first, second;
    WMatrix transported;  // iota applied to m2(first, second)
    WMatrix composed;     // iota(second) o iota(first)
    bool ok = false;
};

struct FunctorCheck {
    std::map<std::string, WMatrix> assignment;
    std::vector<FunctorRow> rows;
    bool degree_zero = true;
    bool bijective = true;
    bool ok = false;
    std::vector<std::string> failures;
};

// Assignment U -> F, V -> G, W -> e^{symbol} * (1, u, v) by lift, with the symbol of the first
// cluster at each W; checked on all nine (U, V) pairs.
FunctorCheck functor_iota_verify(const StructureConstantTable& t, const HomSpace& h12, const HomSpace& h23,
                                 const HomSpace& h13, const WeightSymbols& w,
                                 const std::map<std::string, std::string>& output_symbols);

// Both bracketings with the unit P^(1)+P^(2) of the middle object inserted, pushed through iota.
struct UnitAssociativity {
    int checked = 0;
    bool ok = false;
    std::vector<std::string> failures;
};
UnitAssociativity unit_associativity_check(const FunctorCheck& f, const HomSpace& h12, const HomSpace& h22,
                                           const HomSpace& h23);

struct BasisElement {
    std::string label;
    std::map<std::string, WPoly> coefficients;  // generator name -> coefficient
};

struct TangentBasis {
    std::vector<BasisElement> basis;
    int h0 = 0, h1 = 0;
    int m1_rank = 0;
    int degree0_generators = 0, degree1_generators = 0;
    bool in_kernel = false;    // every basis element is an exact cycle
    bool independent = false;  // numerically, at the computed weights
    int h0_without_formal = 0;
};
TangentBasis tangent_sections_basis(const HomComplex& c, const WeightSymbols& w);

struct CorrespondenceRow {
    std::string a_side;
    std::vector<std::pair<int, bside::LatticeSection>> b_side;  // signed sum of sections
    std::string str() const;
};

struct SectionCorrespondence {
    std::vector<CorrespondenceRow> rows;
    // Lift-zero generators scaled by a coefficient, each matched with one (0,0)-character section.
    std::vector<CorrespondenceRow> weighted_generators;
    bool isomorphism = false;
};
// Cardinality mismatch throws logic_error.
SectionCorrespondence section_correspondence(const TangentBasis& basis, const HomComplex& c,
                                             const bside::ParliamentResult& p, const WeightSymbols& w);

}  // namespace mvm
