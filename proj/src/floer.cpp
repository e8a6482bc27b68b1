#include "mvm/floer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace mvm {

std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::Regular: return "regular";
        case GeneratorKind::BranchFormal: return "branch_formal";
        case GeneratorKind::FundamentalClass: return "fundamental_class";
    }
    return "unknown";
}

bool same_object(const MultiSection& a, const MultiSection& b) {
    if (a.kind() != b.kind() || a.orientation() != b.orientation()) return false;
    if (a.kind() == MultiSection::Kind::Line) return a.line_degree() == b.line_degree();
    const TangentParams &p = a.params(), &q = b.params();
    return p.epsilon == q.epsilon && p.local_model_radius == q.local_model_radius &&
           p.blend_outer == q.blend_outer && p.patch_rotation_deg == q.patch_rotation_deg &&
           p.patch_amplitude == q.patch_amplitude && p.cut_angle_deg == q.cut_angle_deg &&
           p.edge_inner == q.edge_inner && p.edge_outer == q.edge_outer &&
           p.plateau_halfwidth_deg == q.plateau_halfwidth_deg && p.twist_deg == q.twist_deg &&
           p.twist_inner == q.twist_inner && p.twist_outer == q.twist_outer;
}

namespace {

struct SheetPair {
    Labels labels;
};

std::vector<SheetPair> sheet_pairs(const MultiSection& from, const MultiSection& to, bool self) {
    std::vector<SheetPair> out;
    for (int s = 0; s < from.degree(); ++s)
        for (int t = 0; t < to.degree(); ++t)
            if (!self || s != t) out.push_back({Labels{s, t}});
    return out;
}

double min_singular(const Mat2& J) {
    Eigen::JacobiSVD<Mat2> svd(J);
    return svd.singularValues().minCoeff();
}

bool near_branch(const MultiSection& a, const MultiSection& b, const Vec2& x, double r) {
    for (const MultiSection* m : {&a, &b})
        for (const BranchPoint& bp : m->branch_points())
            if ((x - bp.position).norm() < r) return true;
    return false;
}

class Scanner {
public:
    Scanner(const MultiSection& from, const MultiSection& to, const ScanOptions& opt, bool self)
        : from_(from), to_(to), opt_(opt), self_(self), pairs_(sheet_pairs(from, to, self)) {}

    std::array<int, 4> lift_box() const {
        double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
        int n = opt_.lift_grid;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                Vec2 x(double(i) / n, double(j) / n);
                for (const SheetPair& sp : pairs_) {
                    Vec2 g = difference(sp.labels, x);
                    if (!g.allFinite()) continue;
                    for (int k = 0; k < 2; ++k) {
                        lo[k] = std::min(lo[k], g[k]);
                        hi[k] = std::max(hi[k], g[k]);
                    }
                }
            }
        return {int(std::floor(lo[0])) - 1, int(std::ceil(hi[0])) + 1, int(std::floor(lo[1])) - 1,
                int(std::ceil(hi[1])) + 1};
    }

    Vec2 difference(const Labels& l, const Vec2& x, const Vec2* ref = nullptr) const {
        PairField f(from_, to_, {0, 0});
        return f.eval(l, x, ref).fiber;
    }

    void interior(int n, std::vector<CriticalPoint>& out, std::vector<CriticalPoint>& degenerate) const {
        // node values per object sheet in the angular labelling
        auto idx = [n](int i, int j) { return i * (n + 1) + j; };
        std::vector<Vec2> nodes((n + 1) * (n + 1), Vec2::Zero());
        std::vector<std::array<Vec2, 2>> yf(nodes.size()), yt(nodes.size());
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                Vec2 x(double(i) / n, double(j) / n);
                nodes[idx(i, j)] = x;
                for (int s = 0; s < from_.degree(); ++s) yf[idx(i, j)][s] = fiber(from_, s, x);
                for (int t = 0; t < to_.degree(); ++t) yt[idx(i, j)][t] = fiber(to_, t, x);
            }
        auto cell = [&](std::array<int, 3> c) {
            Vec2 ctr = (nodes[c[0]] + nodes[c[1]] + nodes[c[2]]) / 3.0;
            for (const SheetPair& sp : pairs_) {
                double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
                bool finite = true;
                for (int v : c) {
                    int s = sp.labels.source, t = sp.labels.target;
                    if (from_.crosses_cut(ctr, nodes[v])) s = 1 - s;
                    if (to_.crosses_cut(ctr, nodes[v])) t = 1 - t;
                    Vec2 g = yt[v][t] - yf[v][s];
                    if (!g.allFinite()) finite = false;
                    for (int k = 0; k < 2; ++k) {
                        lo[k] = std::min(lo[k], g[k]);
                        hi[k] = std::max(hi[k], g[k]);
                    }
                }
                if (!finite) continue;
                for (int i1 = int(std::ceil(lo[0])); i1 <= int(std::floor(hi[0])); ++i1)
                    for (int i2 = int(std::ceil(lo[1])); i2 <= int(std::floor(hi[1])); ++i2)
                        polish(sp.labels, {i1, i2}, ctr, out, degenerate);
            }
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; i + j < n; ++j) {
                cell({idx(i, j), idx(i + 1, j), idx(i, j + 1)});
                if (i + j + 2 <= n) cell({idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
            }
    }

    void facets(std::vector<CriticalPoint>& out, std::vector<CriticalPoint>& degenerate,
                const std::array<int, 4>& box) const {
        static const std::array<Vec2, 3> normals = {Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)};
        static const std::array<Vec2, 3> tangents = {Vec2(-1, 1), Vec2(0, 1), Vec2(1, 0)};
        auto point = [](int k, double s) {
            return k == 0 ? Vec2(1.0 - s, s) : (k == 1 ? Vec2(0.0, s) : Vec2(s, 0.0));
        };
        int N = opt_.facet_samples;
        PairField field(from_, to_, {0, 0});
        for (int k = 0; k < 3; ++k)
            for (const SheetPair& sp : pairs_) {
                std::vector<Vec2> xs(N + 1);
                std::vector<Labels> ls(N + 1);
                std::vector<Vec2> gs(N + 1);
                Labels l = sp.labels;
                for (int i = 0; i <= N; ++i) {
                    xs[i] = point(k, double(i) / N);
                    if (i > 0) l = field.transport(l, xs[i - 1], xs[i]);
                    ls[i] = l;
                    const Vec2* ref = i > 0 ? &xs[i - 1] : nullptr;
                    Labels use = i > 0 ? ls[i - 1] : l;
                    // values continued from the previous sample
                    gs[i] = field.eval(use, xs[i], ref).fiber;
                }
                for (int i1 = box[0]; i1 <= box[1]; ++i1)
                    for (int i2 = box[2]; i2 <= box[3]; ++i2) {
                        Vec2 lift(i1, i2);
                        int zero_run = 0;
                        for (int i = 1; i < N; ++i) {
                            Vec2 ga = point_value(field, ls[i], xs[i]) - lift;
                            if (std::abs(ga.dot(normals[k])) > 1e-9) {
                                zero_run = 0;
                                continue;
                            }
                            double ta = ga.dot(tangents[k]);
                            if (std::abs(ta) < 1e-9) {
                                if (++zero_run >= 3)
                                    throw CleanIntersection("difference field vanishes along facet " +
                                                            std::to_string(k) +
                                                            ": clean intersection, increase the edge perturbation");
                            } else {
                                zero_run = 0;
                            }
                            Vec2 gb = gs[i + 1] - lift;  // continued from sample i
                            double tb = gb.dot(tangents[k]);
                            if (ta == 0.0 || (ta > 0) != (tb > 0)) {
                                double a = double(i) / N, b = double(i + 1) / N;
                                double fa = ta;
                                for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                                    double m = 0.5 * (a + b);
                                    Vec2 xm = point(k, m);
                                    double fm = (field.eval(ls[i], xm, &xs[i]).fiber - lift).dot(tangents[k]);
                                    if (fm == 0.0) {
                                        a = b = m;
                                        break;
                                    }
                                    if ((fm > 0) == (fa > 0)) {
                                        a = m;
                                        fa = fm;
                                    } else {
                                        b = m;
                                    }
                                }
                                double s = 0.5 * (a + b);
                                if (s < 1e-7 || s > 1.0 - 1e-7) continue;
                                Vec2 x = point(k, s);
                                Labels lab = field.transport(ls[i], xs[i], x);
                                accept(lab, {i1, i2}, x, out, degenerate);
                            }
                        }
                    }
            }
    }

    void vertices(std::vector<CriticalPoint>& out, std::vector<CriticalPoint>& degenerate) const {
        PairField field(from_, to_, {0, 0});
        for (const Vec2& v : {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)})
            for (const SheetPair& sp : pairs_) {
                Vec2 g = field.eval(sp.labels, v).fiber;
                if (!g.allFinite()) continue;
                std::array<int, 2> lift{int(std::lround(g[0])), int(std::lround(g[1]))};
                if ((g - Vec2(lift[0], lift[1])).norm() > 1e-9) continue;
                accept(sp.labels, lift, v, out, degenerate);
            }
    }

private:
    static Vec2 fiber(const MultiSection& m, int sheet, const Vec2& x) { return m.sheet_eval(sheet, x).fiber; }

    Vec2 point_value(const PairField& f, const Labels& l, const Vec2& x) const { return f.eval(l, x).fiber; }

    void polish(Labels l, std::array<int, 2> lift, Vec2 x, std::vector<CriticalPoint>& out,
                std::vector<CriticalPoint>& degenerate) const {
        PairField field(from_, to_, lift);
        for (int it = 0; it < opt_.newton_iterations; ++it) {
            PotentialValue v = field.eval(l, x);
            if (v.degenerate || !v.fiber.allFinite()) return;
            if (v.fiber.norm() < opt_.newton_tol) break;
            Eigen::FullPivLU<Mat2> lu(v.jacobian);
            if (!lu.isInvertible()) return;
            Vec2 dx = -lu.solve(v.fiber);
            if (dx.norm() > 0.02) dx *= 0.02 / dx.norm();
            Vec2 y = x + dx;
            for (int h = 0; h < 40 && min_slack(y) <= 0.0; ++h) {
                dx *= 0.5;
                y = x + dx;
            }
            if (min_slack(y) <= 0.0) return;
            l = field.transport(l, x, y);
            x = y;
            if (dx.norm() < 1e-16) break;
        }
        PotentialValue v = field.eval(l, x);
        if (!v.fiber.allFinite() || v.fiber.norm() > 1e-9) return;
        if (min_slack(x) < 1e-7) return;  // boundary roots come from the facet scan
        if (near_branch(from_, to_, x, opt_.branch_exclusion)) return;
        accept(l, lift, x, out, degenerate);
    }

    void accept(const Labels& l, std::array<int, 2> lift, const Vec2& x, std::vector<CriticalPoint>& out,
                std::vector<CriticalPoint>& degenerate) const {
        PairField field(from_, to_, lift);
        PotentialValue v = field.eval(l, x);
        if (v.fiber.norm() > 1e-9) return;
        CriticalPoint cp{x, l, lift, v.jacobian, minimal_face(x, kBoundaryTol), min_singular(v.jacobian)};
        auto& dest = cp.min_singular < opt_.singular_tol ? degenerate : out;
        for (const CriticalPoint& q : dest)
            if (q.sheets == l && q.lift == lift && (q.position - x).norm() < opt_.dedup_radius) return;
        dest.push_back(cp);
    }

    const MultiSection& from_;
    const MultiSection& to_;
    const ScanOptions& opt_;
    bool self_;
    std::vector<SheetPair> pairs_;
};

void canonical_order(std::vector<CriticalPoint>& v) {
    std::sort(v.begin(), v.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.face.dim != b.face.dim) return a.face.dim < b.face.dim;
        if (a.lift != b.lift) return a.lift < b.lift;
        if (a.sheets.source != b.sheets.source) return a.sheets.source < b.sheets.source;
        if (a.sheets.target != b.sheets.target) return a.sheets.target < b.sheets.target;
        if (a.position[0] != b.position[0]) return a.position[0] < b.position[0];
        return a.position[1] < b.position[1];
    });
}

}  // namespace

CriticalScan find_critical_points(const MultiSection& from, const MultiSection& to, const ScanOptions& opt) {
    bool self = same_object(from, to);
    Scanner sc(from, to, opt, self);
    CriticalScan out;
    out.lift_box = sc.lift_box();
    sc.vertices(out.points, out.near_degenerate);
    sc.facets(out.points, out.near_degenerate, out.lift_box);
    sc.interior(opt.grid, out.points, out.near_degenerate);
    canonical_order(out.points);
    return out;
}

bool has_interior_intersection(const MultiSection& from, const MultiSection& to, int n) {
    ScanOptions opt;
    Scanner sc(from, to, opt, same_object(from, to));
    std::vector<CriticalPoint> pts, degen;
    sc.interior(n, pts, degen);
    return !pts.empty() || !degen.empty();
}

ConditionM condition_m(const Vec2& x, const Mat2& J) {
    ConditionM r;
    Face face = minimal_face(x, kBoundaryTol);
    Eigen::EigenSolver<Mat2> es(J);
    auto ev = es.eigenvalues();
    if (std::abs(ev[0].imag()) > 0.0) {
        r.complex_eigenvalues = true;
        r.stable_dim = ev[0].real() < 0 ? 2 : 0;
    } else {
        r.stable_dim = (ev[0].real() < 0) + (ev[1].real() < 0);
    }
    if (face.dim == 2) return r;
    if (face.dim == 0) {
        r.ok = r.stable_dim == 0;
        return r;
    }
    if (r.stable_dim == 0) return r;
    if (r.stable_dim == 2 || r.complex_eigenvalues) {
        r.ok = false;
        return r;
    }
    int k = ev[0].real() < 0 ? 0 : 1;
    Vec2 v = es.eigenvectors().col(k).real().normalized();
    Vec2 n(-face.tangent[1], face.tangent[0]);
    r.ok = std::abs(v.dot(n)) < 1e-8;
    return r;
}

std::vector<const Generator*> HomSpace::of_degree(int d) const {
    std::vector<const Generator*> out;
    for (const Generator& g : generators)
        if (g.degree == d) out.push_back(&g);
    return out;
}

HomSpace hom_space(const MultiSection& from, const MultiSection& to, const ScanOptions& opt) {
    HomSpace hs;
    hs.self = same_object(from, to);
    if (hs.self) {
        for (int s = 0; s < from.degree(); ++s) {
            Generator g;
            g.kind = GeneratorKind::FundamentalClass;
            g.sheets = {s, s};
            g.position = centroid();
            g.degree = 0;
            hs.generators.push_back(g);
        }
        for (size_t b = 0; b < from.branch_points().size(); ++b) {
            Generator g;
            g.kind = GeneratorKind::BranchFormal;
            g.sheets = {from.branch_points()[b].sheets[0], from.branch_points()[b].sheets[1]};
            g.position = from.branch_points()[b].position;
            g.degree = 1;
            g.branch = static_cast<int>(b);
            hs.generators.push_back(g);
        }
    } else if (from.kind() == MultiSection::Kind::Line) {
        // a line through a ramification point of the target: formal degree-one generator
        for (size_t b = 0; b < to.branch_points().size(); ++b) {
            const BranchPoint& bp = to.branch_points()[b];
            PairField f(from, to, {0, 0});
            PotentialValue v = f.eval(Labels{0, bp.sheets[0]}, bp.position);
            if (v.fiber.norm() < 1e-9) {
                Generator g;
                g.kind = GeneratorKind::BranchFormal;
                g.sheets = {0, bp.sheets[0]};
                g.position = bp.position;
                g.degree = 1;
                g.branch = static_cast<int>(b);
                hs.generators.push_back(g);
            }
        }
    }
    if (!(hs.self && from.degree() == 1)) {
        hs.scan = find_critical_points(from, to, opt);
        for (const CriticalPoint& cp : hs.scan.points) {
            Generator g;
            g.position = cp.position;
            g.sheets = cp.sheets;
            g.lift = cp.lift;
            g.jacobian = cp.jacobian;
            g.face = cp.face;
            ConditionM m = condition_m(cp.position, cp.jacobian);
            g.stable_dim = m.stable_dim;
            g.degree = m.stable_dim;
            g.condition_m = m.ok;
            (m.ok ? hs.generators : hs.rejected).push_back(g);
        }
    }
    return hs;
}

}  // namespace mvm
