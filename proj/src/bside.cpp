#include "mvm/bside.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mvm::bside {

Poly::Poly(Rational c) {
    if (c.numerator() != 0) terms_[{0, 0}] = c;
}

Poly Poly::monomial(Rational c, int a, int b) {
    Poly p;
    if (c.numerator() != 0) p.terms_[{a, b}] = c;
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [k, c] : o.terms_) {
        Rational s = terms_[k] + c;
        if (s.numerator() == 0)
            terms_.erase(k);
        else
            terms_[k] = s;
    }
    return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly Poly::operator-() const {
    Poly p;
    for (const auto& [k, c] : terms_) p.terms_[k] = -c;
    return p;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly p;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) p += Poly::monomial(ca * cb, ka[0] + kb[0], ka[1] + kb[1]);
    return p;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        auto [k, c] = *it;
        bool neg = c.numerator() < 0;
        Rational a = neg ? -c : c;
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        bool unit = a == Rational(1) && (k[0] || k[1]);
        if (!unit) {
            if (a.denominator() == 1)
                os << a.numerator();
            else
                os << a.numerator() << "/" << a.denominator();
        }
        auto var = [&](const char* n, int e) {
            if (e == 0) return;
            os << n;
            if (e > 1) os << "^" << e;
        };
        var("u", k[0]);
        var("v", k[1]);
        first = false;
    }
    return os.str();
}

PolyMatrix::PolyMatrix(int rows, int cols, std::vector<Poly> entries) : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (static_cast<int>(e_.size()) != rows * cols) throw ShapeError("PolyMatrix: entry count does not match shape");
}

PolyMatrix PolyMatrix::identity(int n) {
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Poly(1);
    return m;
}

bool PolyMatrix::is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const Poly& p) { return p.is_zero(); });
}

std::string PolyMatrix::str() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).str();
    }
    os << "]";
    return os.str();
}

PolyMatrix compose(const PolyMatrix& G, const PolyMatrix& F) {
    if (G.cols() != F.rows())
        throw ShapeError("compose: " + std::to_string(G.rows()) + "x" + std::to_string(G.cols()) + " after " +
                         std::to_string(F.rows()) + "x" + std::to_string(F.cols()));
    PolyMatrix out(G.rows(), F.cols());
    for (int i = 0; i < G.rows(); ++i)
        for (int j = 0; j < F.cols(); ++j)
            for (int k = 0; k < G.cols(); ++k) out(i, j) += G(i, k) * F(k, j);
    return out;
}

ExceptionalMaps exceptional_maps() {
    ExceptionalMaps m;
    const Poly u = Poly::u(), v = Poly::v();
    m.F[0] = PolyMatrix(2, 1, {Poly(1), Poly(0)});
    m.F[1] = PolyMatrix(2, 1, {Poly(0), Poly(1)});
    m.F[2] = PolyMatrix(2, 1, {u, v});
    m.G[0] = PolyMatrix(1, 2, {Poly(0), Poly(1)});
    m.G[1] = PolyMatrix(1, 2, {Poly(-1), Poly(0)});
    m.G[2] = PolyMatrix(1, 2, {-v, u});
    m.H[0] = PolyMatrix(1, 1, {Poly(1)});
    m.H[1] = PolyMatrix(1, 1, {u});
    m.H[2] = PolyMatrix(1, 1, {v});
    return m;
}

std::vector<CompositionEntry> composition_table(const ExceptionalMaps& m) {
    std::vector<CompositionEntry> out;
    for (int f = 0; f < 3; ++f)
        for (int g = 0; g < 3; ++g) out.push_back({g, f, compose(m.G[g], m.F[f])});
    return out;
}

std::string LatticeSection::str() const {
    std::ostringstream os;
    os << "(" << weight[0] << "," << weight[1] << ")*chi^{-(" << m[0] << "," << m[1] << ")}";
    return os.str();
}

namespace {

long long cross(const std::array<int, 2>& o, const std::array<int, 2>& a, const std::array<int, 2>& b) {
    return static_cast<long long>(a[0] - o[0]) * (b[1] - o[1]) - static_cast<long long>(a[1] - o[1]) * (b[0] - o[0]);
}

// Counterclockwise convex hull; input order is irrelevant.
std::vector<std::array<int, 2>> hull(std::vector<std::array<int, 2>> p) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return p;
    std::vector<std::array<int, 2>> h(2 * p.size());
    size_t k = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    for (size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
        h[k++] = p[i - 1];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

std::vector<std::array<int, 2>> lattice_points(std::vector<std::array<int, 2>> polygon) {
    std::vector<std::array<int, 2>> h = hull(std::move(polygon));
    std::vector<std::array<int, 2>> out;
    if (h.empty()) return out;
    int x0 = h[0][0], x1 = h[0][0], y0 = h[0][1], y1 = h[0][1];
    for (auto& q : h) {
        x0 = std::min(x0, q[0]);
        x1 = std::max(x1, q[0]);
        y0 = std::min(y0, q[1]);
        y1 = std::max(y1, q[1]);
    }
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) {
            std::array<int, 2> p{x, y};
            bool in = true;
            if (h.size() >= 3) {
                for (size_t i = 0; i < h.size() && in; ++i)
                    if (cross(h[i], h[(i + 1) % h.size()], p) < 0) in = false;
            } else if (h.size() == 2) {
                in = cross(h[0], h[1], p) == 0 && std::min(h[0][0], h[1][0]) <= x && x <= std::max(h[0][0], h[1][0]) &&
                     std::min(h[0][1], h[1][1]) <= y && y <= std::max(h[0][1], h[1][1]);
            } else {
                in = p == h[0];
            }
            if (in) out.push_back(p);
        }
    return out;
}

std::vector<LatticeSection> line_bundle_sections(int k) {
    std::vector<LatticeSection> out;
    if (k < 0) return out;
    for (auto& p : lattice_points({{0, 0}, {k, 0}, {0, k}})) out.push_back({{0, 0}, p});
    return out;
}

std::vector<ParliamentMember> parliament(Bundle b) {
    if (b == Bundle::Cotangent) return {};
    return {ParliamentMember{{1, 1}, {{0, 0}, {1, 0}, {0, 1}}},
            ParliamentMember{{-1, 0}, {{0, 0}, {-1, 0}, {-1, 1}}},
            ParliamentMember{{0, -1}, {{0, 0}, {0, -1}, {1, -1}}}};
}

ParliamentResult parliament_sections(Bundle b, std::vector<ParliamentMember> members) {
    ParliamentResult r;
    r.members = std::move(members);
    for (const ParliamentMember& mem : r.members)
        for (auto& p : lattice_points(mem.polygon)) r.sections.push_back({mem.weight, p});
    std::sort(r.sections.begin(), r.sections.end(), [](const LatticeSection& a, const LatticeSection& b) {
        return a.m != b.m ? a.m < b.m : a.weight < b.weight;
    });
    std::map<std::array<int, 2>, std::vector<int>> at;
    for (size_t i = 0; i < r.sections.size(); ++i) at[r.sections[i].m].push_back(static_cast<int>(i));
    // Sections sharing a lattice point span the weight vectors there.
    int dim = 0;
    for (auto& [m, idx] : at) {
        if (idx.size() == 1) {
            ++dim;
            continue;
        }
        int rank = 0;
        for (size_t i = 0; i < idx.size() && rank < 2; ++i)
            for (size_t j = i + 1; j < idx.size(); ++j) {
                auto& a = r.sections[idx[i]].weight;
                auto& c = r.sections[idx[j]].weight;
                if (a[0] * c[1] - a[1] * c[0] != 0) rank = 2;
            }
        if (rank < 2) rank = 1;
        dim += rank;
        if (idx.size() == 3 && rank == 2) {
            // unique relation among three plane vectors: Cramer coefficients
            auto& a = r.sections[idx[0]].weight;
            auto& c = r.sections[idx[1]].weight;
            auto& d = r.sections[idx[2]].weight;
            long long ca = c[0] * d[1] - c[1] * d[0], cc = d[0] * a[1] - d[1] * a[0], cd = a[0] * c[1] - a[1] * c[0];
            long long g = std::gcd(std::gcd(std::abs(ca), std::abs(cc)), std::abs(cd));
            r.relations.push_back({{idx[0], int(ca / g)}, {idx[1], int(cc / g)}, {idx[2], int(cd / g)}});
        } else if (idx.size() > 3 || rank == 1) {
            throw std::logic_error("parliament_sections: unsupported coincidence pattern");
        }
    }
    r.h0 = dim;
    r.h1 = b == Bundle::Cotangent ? 1 : 0;  // H^1(Omega) is spanned by the Kahler class
    return r;
}

ParliamentResult parliament_sections(Bundle b) { return parliament_sections(b, parliament(b)); }

EulerReport euler_check() {
    EulerReport e;
    e.o1 = static_cast<int>(line_bundle_sections(1).size());
    e.o0 = static_cast<int>(line_bundle_sections(0).size());
    e.o2 = static_cast<int>(line_bundle_sections(2).size());
    e.tangent = parliament_sections(Bundle::Tangent).h0;
    e.ok = 3 * e.o1 - e.o0 == e.tangent;
    return e;
}

}  // namespace mvm::bside
