#include "mvm/ainfty.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mvm {

using bside::Poly;
using bside::PolyMatrix;

int WeightSymbols::add(const std::string& name, double value) {
    if (find(name) >= 0) throw std::logic_error("weight symbol " + name + " already defined");
    names.push_back(name);
    values.push_back(value);
    return static_cast<int>(names.size()) - 1;
}

int WeightSymbols::find(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

WPoly::WPoly(const Poly& p) {
    if (!p.is_zero()) terms_[{}] = p;
}

WPoly WPoly::exp_weight(int symbol, int n) {
    WPoly w;
    ExpVec e;
    if (n != 0) e[symbol] = n;
    w.terms_[e] = Poly(1);
    return w;
}

WPoly& WPoly::operator+=(const WPoly& o) {
    for (const auto& [k, p] : o.terms_) {
        Poly s = terms_[k] + p;
        if (s.is_zero())
            terms_.erase(k);
        else
            terms_[k] = s;
    }
    return *this;
}

WPoly& WPoly::operator-=(const WPoly& o) { return *this += -o; }

WPoly WPoly::operator-() const {
    WPoly w;
    for (const auto& [k, p] : terms_) w.terms_[k] = -p;
    return w;
}

WPoly operator*(const WPoly& a, const WPoly& b) {
    WPoly out;
    for (const auto& [ka, pa] : a.terms_)
        for (const auto& [kb, pb] : b.terms_) {
            ExpVec e = ka;
            for (const auto& [s, n] : kb) {
                int m = (e[s] += n);
                if (m == 0) e.erase(s);
            }
            WPoly t;
            Poly p = pa * pb;
            if (!p.is_zero()) t.terms_[e] = p;
            out += t;
        }
    return out;
}

bool WPoly::weight_free() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.empty(); });
}

double WPoly::eval(const WeightSymbols& w, double scale) const {
    double s = 0.0;
    for (const auto& [e, p] : terms_) {
        double c = 0.0;
        for (const auto& [mono, r] : p.terms()) {
            if (mono[0] || mono[1]) throw std::logic_error("WPoly::eval: polynomial entry " + p.str());
            c += boost::rational_cast<double>(r);
        }
        double x = 0.0;
        for (const auto& [sym, n] : e) x += n * w.values.at(sym);
        s += c * std::exp(-scale * x);
    }
    return s;
}

namespace {

std::string exponent_str(const ExpVec& e, const WeightSymbols& w) {
    // e^{-sum n w}: print the signed sum of -n w
    std::ostringstream os;
    bool first = true;
    for (const auto& [sym, n] : e) {
        int c = -n;
        if (c < 0)
            os << "-";
        else if (!first)
            os << "+";
        if (std::abs(c) != 1) os << std::abs(c);
        os << w.names.at(sym);
        first = false;
    }
    return os.str();
}

std::string lift_str(const std::array<int, 2>& l) {
    return "(" + std::to_string(l[0]) + "," + std::to_string(l[1]) + ")";
}

}  // namespace

std::string WPoly::str(const WeightSymbols& w) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, p] : terms_) {
        std::string term;
        if (e.empty()) {
            term = p.str();
        } else {
            std::string ex = "e^{" + exponent_str(e, w) + "}";
            if (p == Poly(1))
                term = ex;
            else if (p == Poly(-1))
                term = "-" + ex;
            else
                term = "(" + p.str() + ")" + ex;
        }
        if (out.empty())
            out = term;
        else if (term[0] == '-')
            out += " - " + term.substr(1);
        else
            out += " + " + term;
    }
    return out;
}

WMatrix WMatrix::from(const PolyMatrix& m) {
    WMatrix w(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) w(i, j) = WPoly(m(i, j));
    return w;
}

bool WMatrix::is_zero() const {
    return std::all_of(e.begin(), e.end(), [](const WPoly& p) { return p.is_zero(); });
}

std::string WMatrix::str(const WeightSymbols& w) const {
    std::string s = "[";
    for (int i = 0; i < rows; ++i) {
        if (i) s += "; ";
        for (int j = 0; j < cols; ++j) s += (j ? ", " : "") + (*this)(i, j).str(w);
    }
    return s + "]";
}

WMatrix operator*(const WMatrix& a, const WMatrix& b) {
    if (a.cols != b.rows) throw bside::ShapeError("WMatrix product: inner dimensions differ");
    WMatrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j)
            for (int k = 0; k < a.cols; ++k) out(i, j) += a(i, k) * b(k, j);
    return out;
}

WMatrix operator*(const WPoly& s, WMatrix m) {
    for (WPoly& p : m.e) p = s * p;
    return m;
}

void name_generators(HomSpace& hs, const std::string& letter) {
    auto name_list = [&](std::vector<Generator>& gens) {
        std::map<std::array<int, 2>, int> count;
        for (const Generator& g : gens)
            if (g.kind == GeneratorKind::Regular) ++count[g.lift];
        std::set<std::string> used;
        for (Generator& g : gens) {
            switch (g.kind) {
                case GeneratorKind::FundamentalClass:
                    g.name = "P^(" + std::to_string(g.sheets.source + 1) + ")";
                    break;
                case GeneratorKind::BranchFormal:
                    if (hs.self)
                        g.name = "b" + std::to_string(g.sheets.source + 1) + std::to_string(g.sheets.target + 1);
                    else
                        g.name = letter + "^b" + lift_str(g.lift);
                    break;
                case GeneratorKind::Regular:
                    g.name = letter + (count[g.lift] > 1 ? "^" + std::to_string(g.face.index) : "") + lift_str(g.lift);
                    break;
            }
            std::string base = g.name;
            for (int k = 2; used.count(g.name); ++k) g.name = base + "#" + std::to_string(k);
            used.insert(g.name);
        }
    };
    name_list(hs.generators);
    name_list(hs.rejected);
}

int HomComplex::index_of(const Generator* g) const {
    auto it = generators.find(g->degree);
    if (it == generators.end()) return -1;
    auto pos = std::find(it->second.begin(), it->second.end(), g);
    return pos == it->second.end() ? -1 : static_cast<int>(pos - it->second.begin());
}

const Generator* HomComplex::find(const std::string& name) const {
    for (const auto& [d, gens] : generators)
        for (const Generator* g : gens)
            if (g->name == name) return g;
    return nullptr;
}

int HomComplex::total() const {
    int n = 0;
    for (const auto& [d, gens] : generators) n += static_cast<int>(gens.size());
    return n;
}

namespace {

void size_differentials(HomComplex& c) {
    c.differential.clear();
    for (const auto& [d, gens] : c.generators) {
        auto up = c.generators.find(d + 1);
        int rows = up == c.generators.end() ? 0 : static_cast<int>(up->second.size());
        c.differential[d] = WMatrix(rows, static_cast<int>(gens.size()));
    }
}

void add_term(HomComplex& c, const M1Term& t) {
    int col = c.index_of(t.source), row = c.index_of(t.target);
    if (col < 0 || row < 0 || t.target->degree != t.source->degree + 1)
        throw std::logic_error("m1 term " + t.source->name + " -> " + t.target->name + " outside the complex");
    WPoly coef = t.symbol >= 0 ? WPoly::exp_weight(t.symbol) : WPoly(1);
    c.differential[t.source->degree](row, col) += t.sign > 0 ? coef : -coef;
}

Eigen::MatrixXd numeric(const WMatrix& m, const WeightSymbols& w, double scale) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j).eval(w, scale);
    return out;
}

int rank_of(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
}

}  // namespace

HomComplex assemble_complex(const std::string& from, const std::string& to, const HomContext& ctx,
                            const OrientationData& o, WeightSymbols& w, const std::string& prefix,
                            const TreeOptions& opt) {
    HomComplex c;
    c.from = from;
    c.to = to;
    for (const Generator& g : ctx.hom->generators) c.generators[g.degree].push_back(&g);
    for (auto& [d, gens] : c.generators)
        std::sort(gens.begin(), gens.end(), [](const Generator* a, const Generator* b) { return a->name < b->name; });
    size_differentials(c);
    int counter = 0;
    for (const auto& [d, gens] : c.generators)
        for (const Generator* p : gens)
            for (M1Entry& e : enumerate_m1(*p, ctx, o, opt)) {
                M1Term t{p, e.target, e.sign, -1, e.weight, std::move(e.line)};
                if (!t.line.trivial && std::abs(e.weight) > 1e-14)
                    t.symbol = w.add(prefix + std::to_string(counter++), e.weight);
                add_term(c, t);
                c.terms.push_back(std::move(t));
            }
    return c;
}

HomComplex without(const HomComplex& c, const std::string& name) {
    HomComplex out;
    out.from = c.from;
    out.to = c.to;
    for (const auto& [d, gens] : c.generators)
        for (const Generator* g : gens)
            if (g->name != name) out.generators[d].push_back(g);
    size_differentials(out);
    for (const M1Term& t : c.terms)
        if (t.source->name != name && t.target->name != name) {
            add_term(out, t);
            out.terms.push_back(t);
        }
    return out;
}

bool differential_squares_to_zero(const HomComplex& c) {
    for (const auto& [d, m] : c.differential) {
        auto next = c.differential.find(d + 1);
        if (next == c.differential.end() || m.rows == 0) continue;
        if (!(next->second * m).is_zero()) return false;
    }
    return true;
}

int Cohomology::dim(int d) const {
    auto it = dims.find(d);
    return it == dims.end() ? 0 : it->second;
}

Cohomology cohomology(const HomComplex& c, const WeightSymbols& w) {
    if (!differential_squares_to_zero(c)) throw std::logic_error("cohomology: m1 squared is not zero");
    Cohomology h;
    for (const auto& [d, m] : c.differential) {
        int r1 = rank_of(numeric(m, w, 1.0)), r2 = rank_of(numeric(m, w, 1.7));
        if (r1 != r2)
            throw RankUnstable("cohomology: rank of m1 in degree " + std::to_string(d) + " is " + std::to_string(r1) +
                               " and " + std::to_string(r2) + " at the two weight instantiations");
        h.ranks[d] = r1;
    }
    for (const auto& [d, gens] : c.generators) {
        int n = static_cast<int>(gens.size());
        int in = h.ranks.count(d - 1) ? h.ranks[d - 1] : 0;
        h.dims[d] = n - h.ranks[d] - in;

        Eigen::MatrixXd D = numeric(c.differential.at(d), w, 1.0);
        Eigen::MatrixXd kernel;
        if (D.rows() == 0) {
            kernel = Eigen::MatrixXd::Identity(n, n);
        } else {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
            lu.setThreshold(1e-10);
            kernel = lu.rank() == n ? Eigen::MatrixXd(n, 0) : Eigen::MatrixXd(lu.kernel());
        }
        Eigen::MatrixXd span(n, 0);
        auto prev = c.differential.find(d - 1);
        if (prev != c.differential.end() && prev->second.cols > 0) span = numeric(prev->second, w, 1.0);
        int base = rank_of(span);
        for (int k = 0; k < kernel.cols(); ++k) {
            Eigen::MatrixXd trial(n, span.cols() + 1);
            trial << span, kernel.col(k);
            if (rank_of(trial) == base) continue;
            span = trial;
            ++base;
            Eigen::VectorXd v = kernel.col(k);
            Eigen::Index i;
            v.cwiseAbs().maxCoeff(&i);
            v /= v[i];
            for (Eigen::Index j = 0; j < v.size(); ++j)
                if (std::abs(v[j]) < 1e-12) v[j] = 0.0;
            h.representatives[d].emplace_back(v.data(), v.data() + v.size());
        }
    }
    return h;
}

const StructureEntry* StructureConstantTable::find(const std::string& first, const std::string& second) const {
    for (const StructureEntry& e : entries)
        if (e.first->name == first && e.second->name == second) return &e;
    return nullptr;
}

std::map<std::string, std::string> standard_output_symbols() {
    return {{"W(0,0)", "A"}, {"W(1,0)", "B"}, {"W(0,1)", "C"}};
}

StructureConstantTable structure_constants(const HomSpace& h12, const HomSpace& h23, const HomContext& c12,
                                           const HomContext& c23, const HomContext& c13,
                                           const OrientationData& o, WeightSymbols& w,
                                           const std::map<std::string, std::string>& output_symbols,
                                           double cluster_rtol, const TreeOptions& opt) {
    StructureConstantTable t;
    for (const Generator& u : h12.generators)
        for (const Generator& v : h23.generators)
            for (M2Entry& e : enumerate_m2(u, v, c12, c23, c13, o, opt))
                t.entries.push_back({&u, &v, e.output, e.sign, -1, e.weight, std::move(e.tree)});

    struct Cluster {
        int symbol;
        double lo, hi;
    };
    std::map<std::string, std::vector<Cluster>> clusters;
    for (const Generator& out : c13.hom->generators)
        for (StructureEntry& e : t.entries) {
            if (e.output != &out) continue;
            auto& list = clusters[out.name];
            Cluster* hit = nullptr;
            for (Cluster& c : list)
                if (std::abs(e.weight - w.values[c.symbol]) <= cluster_rtol * std::max(e.weight, w.values[c.symbol]))
                    hit = &c;
            if (!hit) {
                auto named = output_symbols.find(out.name);
                std::string name = named == output_symbols.end() ? "w[" + out.name + "]" : named->second;
                name += std::string(list.size(), '\'');
                list.push_back({w.add(name, e.weight), e.weight, e.weight});
                hit = &list.back();
            }
            hit->lo = std::min(hit->lo, e.weight);
            hit->hi = std::max(hit->hi, e.weight);
            e.symbol = hit->symbol;
        }
    for (const auto& [name, list] : clusters)
        for (const Cluster& c : list)
            if (c.hi > 0) t.max_cluster_spread = std::max(t.max_cluster_spread, (c.hi - c.lo) / c.hi);
    return t;
}

std::vector<ExpectedSign> reference_m2_signs() {
    return {{"U(-1,0)", "V(1,0)", "W(0,0)", -1}, {"U(0,-1)", "V(0,1)", "W(0,0)", 1},
            {"U(0,0)", "V(1,0)", "W(1,0)", -1},  {"U(0,-1)", "V(1,1)", "W(1,0)", 1},
            {"U(0,0)", "V(0,1)", "W(0,1)", 1},   {"U(-1,0)", "V(1,1)", "W(0,1)", -1}};
}

OrientationData default_orientation() {
    OrientationData o;
    o.sign["W(1,0)"] = -1;
    o.sign["W(0,1)"] = -1;
    return o;
}

SignReassignment solve_sign_reassignment(const StructureConstantTable& t, const std::vector<ExpectedSign>& expected) {
    SignReassignment r;
    std::vector<std::string> names;
    auto index = [&](const std::string& n) {
        auto it = std::find(names.begin(), names.end(), n);
        if (it != names.end()) return static_cast<int>(it - names.begin());
        names.push_back(n);
        return static_cast<int>(names.size()) - 1;
    };
    struct Row {
        int a, b, c, computed, wanted;
    };
    std::vector<Row> rows;
    std::set<std::array<std::string, 3>> seen;
    for (const ExpectedSign& x : expected) {
        seen.insert({x.first, x.second, x.output});
        int found = 0, sign = 0;
        for (const StructureEntry& e : t.entries)
            if (e.first->name == x.first && e.second->name == x.second && e.output->name == x.output) {
                ++found;
                sign = e.sign;
            }
        if (found != 1) {
            r.missing.push_back(x.first + "*" + x.second + "->" + x.output);
            continue;
        }
        rows.push_back({index(x.first), index(x.second), index(x.output), sign, x.sign});
    }
    for (const StructureEntry& e : t.entries)
        if (!seen.count({e.first->name, e.second->name, e.output->name}))
            r.missing.push_back("extra " + e.first->name + "*" + e.second->name + "->" + e.output->name);
    if (!r.missing.empty()) return r;

    r.identity = std::all_of(rows.begin(), rows.end(), [](const Row& x) { return x.computed == x.wanted; });
    const int n = static_cast<int>(names.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        auto s = [&](int i) { return (mask >> i) & 1u ? -1 : 1; };
        bool ok = std::all_of(rows.begin(), rows.end(),
                              [&](const Row& x) { return s(x.a) * s(x.b) * s(x.c) * x.computed == x.wanted; });
        if (!ok) continue;
        r.found = true;
        for (int i = 0; i < n; ++i) r.flips[names[i]] = s(i);
        break;  // mask 0 comes first, so the identity wins when it works
    }
    return r;
}

namespace {

const Generator* by_lift(const HomSpace& h, const std::array<int, 2>& lift, int& matches) {
    const Generator* out = nullptr;
    matches = 0;
    for (const Generator& g : h.generators)
        if (g.kind == GeneratorKind::Regular && g.lift == lift) {
            out = &g;
            ++matches;
        }
    return out;
}

}  // namespace

FunctorCheck functor_iota_verify(const StructureConstantTable& t, const HomSpace& h12, const HomSpace& h23,
                                 const HomSpace& h13, const WeightSymbols& w,
                                 const std::map<std::string, std::string>& output_symbols) {
    FunctorCheck f;
    const bside::ExceptionalMaps maps = bside::exceptional_maps();
    const std::array<std::array<int, 2>, 3> u_lifts{{{-1, 0}, {0, -1}, {0, 0}}};
    const std::array<std::array<int, 2>, 3> v_lifts{{{0, 1}, {1, 0}, {1, 1}}};
    const std::array<std::array<int, 2>, 3> w_lifts{{{0, 0}, {1, 0}, {0, 1}}};
    std::array<const Generator*, 3> us{}, vs{}, ws{};

    auto assign = [&](const HomSpace& h, const std::array<int, 2>& lift, const WMatrix& m) -> const Generator* {
        int matches = 0;
        const Generator* g = by_lift(h, lift, matches);
        if (matches != 1) {
            f.bijective = false;
            f.failures.push_back(std::to_string(matches) + " generators with lift " + lift_str(lift));
            return nullptr;
        }
        if (g->degree != 0) f.degree_zero = false;
        f.assignment[g->name] = m;
        return g;
    };
    for (int i = 0; i < 3; ++i) {
        us[i] = assign(h12, u_lifts[i], WMatrix::from(maps.F[i]));
        vs[i] = assign(h23, v_lifts[i], WMatrix::from(maps.G[i]));
        int matches = 0;
        const Generator* g = by_lift(h13, w_lifts[i], matches);
        WPoly scale(1);
        if (g) {
            auto named = output_symbols.find(g->name);
            int sym = named == output_symbols.end() ? -1 : w.find(named->second);
            if (sym < 0)
                f.failures.push_back("no weight symbol for " + g->name);
            else
                scale = WPoly::exp_weight(sym, -1);
        }
        ws[i] = assign(h13, w_lifts[i], scale * WMatrix::from(maps.H[i]));
    }
    if (f.assignment.size() != 9) f.bijective = false;
    if (!f.bijective) return f;

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            FunctorRow row;
            row.first = us[i]->name;
            row.second = vs[j]->name;
            row.transported = WMatrix(1, 1);
            for (const StructureEntry& e : t.entries) {
                if (e.first != us[i] || e.second != vs[j]) continue;
                auto it = f.assignment.find(e.output->name);
                if (it == f.assignment.end()) {
                    f.failures.push_back("m2 output " + e.output->name + " has no image");
                    continue;
                }
                WPoly coef = e.symbol >= 0 ? WPoly::exp_weight(e.symbol) : WPoly(1);
                WMatrix add = (e.sign > 0 ? coef : -coef) * it->second;
                for (size_t k = 0; k < add.e.size(); ++k) row.transported.e[k] += add.e[k];
            }
            row.composed = f.assignment[vs[j]->name] * f.assignment[us[i]->name];
            row.ok = row.transported == row.composed;
            if (!row.ok)
                f.failures.push_back("iota(m2(" + row.first + ", " + row.second + ")) = " + row.transported.str(w) +
                                     " but iota(" + row.second + ") o iota(" + row.first + ") = " + row.composed.str(w));
            f.rows.push_back(std::move(row));
        }
    f.ok = f.failures.empty() && f.degree_zero && f.bijective;
    return f;
}

UnitAssociativity unit_associativity_check(const FunctorCheck& f, const HomSpace& h12, const HomSpace& h22,
                                           const HomSpace& h23) {
    UnitAssociativity r;
    std::vector<const Generator*> units;
    for (const Generator& g : h22.generators)
        if (g.kind == GeneratorKind::FundamentalClass) units.push_back(&g);
    const WMatrix id = WMatrix::from(PolyMatrix::identity(2));
    // m2 with P^(s) is the identity on generators ending (or starting) on sheet s, zero otherwise
    auto unit_count = [&](int sheet) {
        int n = 0;
        for (const Generator* p : units) n += p->sheets.source == sheet;
        return n;
    };
    for (const Generator& u : h12.generators)
        for (const Generator& v : h23.generators) {
            auto iu = f.assignment.find(u.name), iv = f.assignment.find(v.name);
            if (iu == f.assignment.end() || iv == f.assignment.end()) continue;
            ++r.checked;
            WMatrix left = iv->second * (WPoly(unit_count(u.sheets.target)) * (id * iu->second));
            WMatrix right = (WPoly(unit_count(v.sheets.source)) * (iv->second * id)) * iu->second;
            if (!(left == right) || !(left == iv->second * iu->second))
                r.failures.push_back("(" + u.name + " * 1) * " + v.name + " differs from " + u.name + " * (1 * " +
                                     v.name + ")");
        }
    r.ok = r.checked == 9 && r.failures.empty();
    return r;
}

TangentBasis tangent_sections_basis(const HomComplex& c, const WeightSymbols& w) {
    TangentBasis tb;
    auto at = [&](int d) -> const std::vector<const Generator*>& {
        static const std::vector<const Generator*> none;
        auto it = c.generators.find(d);
        return it == c.generators.end() ? none : it->second;
    };
    tb.degree0_generators = static_cast<int>(at(0).size());
    tb.degree1_generators = static_cast<int>(at(1).size());
    Cohomology h = cohomology(c, w);
    tb.h0 = h.dim(0);
    tb.h1 = h.dim(1);
    tb.m1_rank = h.ranks.count(0) ? h.ranks[0] : 0;

    std::vector<const Generator*> zero_lift;
    for (const Generator* g : at(0)) {
        if (g->lift == std::array<int, 2>{0, 0}) {
            zero_lift.push_back(g);
            continue;
        }
        tb.basis.push_back({g->name, {{g->name, WPoly(1)}}});
    }
    bool weighted_ok = true;
    auto undo_weight = [&](const Generator* g) {
        int sym = -1, n = 0;
        for (const M1Term& t : c.terms)
            if (t.source == g) {
                sym = t.symbol;
                ++n;
            }
        if (n != 1 || sym < 0) {
            weighted_ok = false;
            return WPoly(1);
        }
        return WPoly::exp_weight(sym, -1);
    };
    if (!zero_lift.empty()) {
        const Generator* ref = zero_lift.front();
        WPoly rw = undo_weight(ref);
        for (size_t k = 1; k < zero_lift.size(); ++k) {
            WPoly kw = undo_weight(zero_lift[k]);
            BasisElement e;
            e.coefficients[zero_lift[k]->name] = kw;
            e.coefficients[ref->name] = -rw;
            e.label = kw.str(w) + zero_lift[k]->name + " - " + rw.str(w) + ref->name;
            tb.basis.push_back(std::move(e));
        }
    }

    const WMatrix& d0 = c.differential.count(0) ? c.differential.at(0) : WMatrix();
    tb.in_kernel = weighted_ok;
    Eigen::MatrixXd coords(at(0).size(), tb.basis.size());
    for (size_t b = 0; b < tb.basis.size(); ++b) {
        std::vector<WPoly> image(d0.rows);
        for (size_t j = 0; j < at(0).size(); ++j) {
            auto it = tb.basis[b].coefficients.find(at(0)[j]->name);
            WPoly coef = it == tb.basis[b].coefficients.end() ? WPoly() : it->second;
            coords(j, b) = coef.eval(w);
            for (int i = 0; i < d0.rows; ++i) image[i] += d0(i, static_cast<int>(j)) * coef;
        }
        for (const WPoly& p : image)
            if (!p.is_zero()) tb.in_kernel = false;
    }
    tb.independent = rank_of(coords) == static_cast<int>(tb.basis.size());

    for (const Generator* g : at(1))
        if (g->kind == GeneratorKind::BranchFormal) tb.h0_without_formal = cohomology(without(c, g->name), w).dim(0);
    return tb;
}

std::string CorrespondenceRow::str() const {
    std::string s = a_side + " <-> ";
    for (size_t i = 0; i < b_side.size(); ++i) {
        int c = b_side[i].first;
        if (i == 0)
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (std::abs(c) != 1) s += std::to_string(std::abs(c));
        s += b_side[i].second.str();
    }
    if (b_side.empty()) s += "0";
    return s;
}

SectionCorrespondence section_correspondence(const TangentBasis& basis, const HomComplex& c,
                                             const bside::ParliamentResult& p, const WeightSymbols& w) {
    SectionCorrespondence sc;
    if (static_cast<int>(basis.basis.size()) != p.h0)
        throw std::logic_error("section_correspondence: " + std::to_string(basis.basis.size()) +
                               " A-side basis elements against " + std::to_string(p.h0) + " sections");
    const MomentPolytope poly = MomentPolytope::projective_plane();
    auto section_index = [&](const std::array<int, 2>& weight, const std::array<int, 2>& m) {
        for (size_t i = 0; i < p.sections.size(); ++i)
            if (p.sections[i].m == m && (weight == std::array<int, 2>{0, 0} || p.sections[i].weight == weight))
                return static_cast<int>(i);
        return -1;
    };

    // image of each degree-0 generator as a weighted combination of sections
    std::map<std::string, std::pair<WPoly, int>> image;
    for (const Generator* g : c.generators.count(0) ? c.generators.at(0) : std::vector<const Generator*>{}) {
        if (g->lift != std::array<int, 2>{0, 0}) {
            int hits = 0, idx = -1;
            for (size_t i = 0; i < p.sections.size(); ++i)
                if (p.sections[i].m == g->lift) {
                    ++hits;
                    idx = static_cast<int>(i);
                }
            if (hits != 1) throw std::logic_error("section_correspondence: lattice point " + lift_str(g->lift) +
                                                  " lies in " + std::to_string(hits) + " members");
            image[g->name] = {WPoly(1), idx};
            continue;
        }
        if (g->face.dim != 1) throw std::logic_error("section_correspondence: " + g->name + " is not on a facet");
        const auto& n = poly.facets.at(g->face.index).normal;
        std::array<int, 2> weight{-n[0], -n[1]};
        int idx = section_index(weight, {0, 0});
        if (idx < 0) throw std::logic_error("section_correspondence: no section for facet weight " + lift_str(weight));
        int sym = -1;
        for (const M1Term& t : c.terms)
            if (t.source == g) sym = t.symbol;
        WPoly attenuation = sym >= 0 ? WPoly::exp_weight(sym) : WPoly(1);
        int sign = weight == std::array<int, 2>{1, 1} ? -1 : 1;
        image[g->name] = {sign > 0 ? attenuation : -attenuation, idx};
        WPoly scale = sym >= 0 ? WPoly::exp_weight(sym, -1) : WPoly(1);
        sc.weighted_generators.push_back({(sign > 0 ? scale : -scale).str(w) + g->name, {{1, p.sections[idx]}}});
    }

    const int n = static_cast<int>(p.sections.size());
    Eigen::MatrixXd images(basis.basis.size() + p.relations.size(), n);
    images.setZero();
    for (size_t b = 0; b < basis.basis.size(); ++b) {
        std::vector<WPoly> coef(n);
        for (const auto& [name, k] : basis.basis[b].coefficients) {
            auto it = image.find(name);
            if (it == image.end()) throw std::logic_error("section_correspondence: no image for " + name);
            coef[it->second.second] += k * it->second.first;
        }
        CorrespondenceRow row;
        row.a_side = basis.basis[b].label;
        for (int i = 0; i < n; ++i) {
            if (coef[i].is_zero()) continue;
            images(b, i) = coef[i].eval(w);
            long long r = std::llround(images(b, i));
            if (!coef[i].weight_free() || std::abs(images(b, i) - r) > 1e-12)
                throw std::logic_error("section_correspondence: coefficient " + coef[i].str(w) + " is not an integer");
            row.b_side.push_back({static_cast<int>(r), p.sections[i]});
        }
        sc.rows.push_back(std::move(row));
    }
    for (size_t r = 0; r < p.relations.size(); ++r)
        for (const auto& [i, k] : p.relations[r]) images(basis.basis.size() + r, i) = k;
    sc.isomorphism = rank_of(images) == n;
    return sc;
}

}  // namespace mvm
