#pragma once

#include <array>
#include <boost/rational.hpp>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvm::bside {

using Rational = boost::rational<long long>;

// Polynomial in u, v with rational coefficients; zero terms are never stored.
class Poly {
public:
    Poly() = default;
    Poly(long long c) : Poly(Rational(c)) {}
    Poly(Rational c);
    static Poly monomial(Rational c, int a, int b);
    static Poly u() { return monomial(1, 1, 0); }
    static Poly v() { return monomial(1, 0, 1); }

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly operator-() const;
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<std::array<int, 2>, Rational>& terms() const { return terms_; }
    std::string str() const;

private:
    std::map<std::array<int, 2>, Rational> terms_;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class PolyMatrix {
public:
    PolyMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
    PolyMatrix(int rows, int cols, std::vector<Poly> entries);
    static PolyMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Poly& operator()(int i, int j) { return e_[i * cols_ + j]; }
    const Poly& operator()(int i, int j) const { return e_[i * cols_ + j]; }
    bool operator==(const PolyMatrix& o) const = default;
    bool is_zero() const;
    std::string str() const;

private:
    int rows_, cols_;
    std::vector<Poly> e_;
};

// G o F: apply F first. Throws ShapeError when the inner dimensions differ.
PolyMatrix compose(const PolyMatrix& G, const PolyMatrix& F);

// Local frames of the maps O(1) -> T (columns F1..F3) and T -> O(2) (rows G1..G3).
struct ExceptionalMaps {
    std::array<PolyMatrix, 3> F{PolyMatrix(2, 1), PolyMatrix(2, 1), PolyMatrix(2, 1)};
    std::array<PolyMatrix, 3> G{PolyMatrix(1, 2), PolyMatrix(1, 2), PolyMatrix(1, 2)};
    // O(1) -> O(2) basis 1, u, v.
    std::array<PolyMatrix, 3> H{PolyMatrix(1, 1), PolyMatrix(1, 1), PolyMatrix(1, 1)};
};
ExceptionalMaps exceptional_maps();

struct CompositionEntry {
    int g, f;  // 0-based indices of G and F
    PolyMatrix value{1, 1};
};
// The nine products G_j o F_i.
std::vector<CompositionEntry> composition_table(const ExceptionalMaps& m);

struct LatticeSection {
    std::array<int, 2> weight;  // vector part
    std::array<int, 2> m;       // lattice point; the section is weight (x) chi^{-m}
    std::string str() const;
};

std::vector<std::array<int, 2>> lattice_points(std::vector<std::array<int, 2>> polygon);
std::vector<LatticeSection> line_bundle_sections(int k);

struct ParliamentMember {
    std::array<int, 2> weight;
    std::vector<std::array<int, 2>> polygon;
};

enum class Bundle { Tangent, Cotangent };

struct ParliamentResult {
    std::vector<ParliamentMember> members;
    std::vector<LatticeSection> sections;
    // Linear relations among sections sharing a lattice point: coefficient per section index.
    std::vector<std::map<int, int>> relations;
    int h0 = 0;
    int h1 = 0;
};
std::vector<ParliamentMember> parliament(Bundle b);
ParliamentResult parliament_sections(Bundle b, std::vector<ParliamentMember> members);
ParliamentResult parliament_sections(Bundle b);

struct EulerReport {
    int o1 = 0, o0 = 0, tangent = 0, o2 = 0;
    bool ok = false;
};
EulerReport euler_check();

}  // namespace mvm::bside
