#include "mvm/trees.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mvm {

std::vector<WallRef> HomContext::walls() const {
    std::vector<WallRef> out;
    bool shared = from_network && from_network == to_network;
    if (from_network)
        for (size_t i = 0; i < from_network->walls.size(); ++i)
            out.push_back(WallRef{&from_network->walls[i], shared ? 2 : 0, static_cast<int>(i)});
    if (to_network && !shared)
        for (size_t i = 0; i < to_network->walls.size(); ++i)
            out.push_back(WallRef{&to_network->walls[i], 1, static_cast<int>(i)});
    return out;
}

bool JaggedLine::jagged() const {
    return std::any_of(events.begin(), events.end(), [](const LineEvent& e) { return e.switched(); });
}

Labels cross_wall(Labels l, int object, const std::array<int, 2>& ab) {
    if ((object == 1 || object == 2) && l.target == ab[1]) l.target = ab[0];
    if ((object == 0 || object == 2) && l.source == ab[0]) l.source = ab[1];
    return l;
}

std::vector<Labels> wall_predecessors(const Labels& after, int object, const std::array<int, 2>& ab,
                                      int source_degree, int target_degree) {
    std::vector<Labels> out;
    for (int s = 0; s < source_degree; ++s)
        for (int t = 0; t < target_degree; ++t) {
            Labels before{s, t};
            if (cross_wall(before, object, ab) == after) out.push_back(before);
        }
    // the unswitched continuation first
    std::stable_partition(out.begin(), out.end(), [&](const Labels& b) { return b == after; });
    return out;
}

namespace {

std::optional<Vec2> snap(Vec2 x) {
    if (min_slack(x) < -1e-12) return std::nullopt;
    x[0] = std::max(x[0], 0.0);
    x[1] = std::max(x[1], 0.0);
    double over = x[0] + x[1] - 1.0;
    if (over > 0.0) {
        x[0] -= 0.5 * over;
        x[1] -= 0.5 * over;
    }
    return x;
}

// One reverse-traced branch, stored in reverse flow order until it is finalized.
struct Branch {
    std::vector<Vec2> points;
    std::vector<Labels> labels;
    std::vector<LineEvent> events;  // point_index refers to the reversed arrays
    double quadrature = 0.0;
    StopReason stop = StopReason::Budget;
};

void reverse_rec(const PairField& field, Labels labels, const Vec2& start, int skip, const std::vector<WallRef>& walls,
                 const TreeOptions& opt, int ignore_branch, Branch partial, int depth, std::vector<Branch>& out) {
    TraceOptions to = opt.trace;
    to.direction = -1.0;
    to.walls = walls;
    to.skip_wall_at_start = skip;
    to.ignore_branch = ignore_branch;
    TraceResult tr = trace_flow(field, labels, start, to);
    size_t first = partial.points.empty() ? 0 : 1;  // the start duplicates the previous event point
    for (size_t i = first; i < tr.points.size(); ++i) {
        partial.points.push_back(tr.points[i]);
        partial.labels.push_back(tr.labels[i]);
    }
    partial.quadrature += -tr.quadrature;
    if (tr.stop != StopReason::WallEvent || !tr.hit) {
        partial.stop = tr.stop;
        out.push_back(std::move(partial));
        return;
    }
    if (depth >= opt.max_events) {
        partial.stop = StopReason::Budget;
        out.push_back(std::move(partial));
        return;
    }
    const WallRef& ref = walls[tr.hit->wall_list_index];
    for (const Labels& before : wall_predecessors(tr.final_labels, ref.object, tr.hit->wall_label,
                                                  field.from().degree(), field.to().degree())) {
        Branch next = partial;
        LineEvent ev;
        ev.point_index = static_cast<int>(next.points.size()) - 1;
        ev.object = ref.object;
        ev.wall_label = tr.hit->wall_label;
        ev.before = before;
        ev.after = tr.final_labels;
        ev.where = tr.hit->where;
        next.events.push_back(ev);
        // the event point starts the earlier segment with the earlier labels
        next.points.push_back(tr.hit->where);
        next.labels.push_back(before);
        reverse_rec(field, before, tr.hit->where, tr.hit->wall_list_index, walls, opt, ignore_branch, std::move(next),
                    depth + 1, out);
    }
}

JaggedLine finalize(Branch&& b, const PairField& field) {
    JaggedLine line;
    line.lift = field.lift();
    line.stop = b.stop;
    size_t n = b.points.size();
    line.polyline.assign(b.points.rbegin(), b.points.rend());
    line.labels.assign(b.labels.rbegin(), b.labels.rend());
    for (auto it = b.events.rbegin(); it != b.events.rend(); ++it) {
        LineEvent e = *it;
        // reversed: the after-segment begins at the original event point
        e.point_index = static_cast<int>(n - 1 - it->point_index);
        line.events.push_back(e);
    }
    line.quadrature = b.quadrature;
    line.traced_weight = telescope_weight(line, field);
    return line;
}

const Generator* match_source(const JaggedLine& line, const HomSpace& hom, int degree, const std::array<int, 2>& lift,
                              double radius) {
    if (line.stop != StopReason::Converged && line.stop != StopReason::StopPoint) return nullptr;
    const Vec2& x = line.polyline.front();
    for (const Generator& g : hom.generators)
        if (g.kind == GeneratorKind::Regular && g.degree == degree && g.lift == lift &&
            g.sheets == line.labels.front() && (g.position - x).norm() < radius)
            return &g;
    return nullptr;
}

// Real eigenpairs of J with the requested sign, eigenvectors normalized with a positive
// leading nonzero component.
std::vector<Vec2> eigen_directions(const Mat2& J, bool negative) {
    Eigen::EigenSolver<Mat2> es(J);
    std::vector<Vec2> out;
    for (int k = 0; k < 2; ++k) {
        auto lam = es.eigenvalues()[k];
        if (lam.imag() != 0.0) continue;
        if ((lam.real() < 0) != negative || lam.real() == 0.0) continue;
        Vec2 v = es.eigenvectors().col(k).real().normalized();
        if (v[0] < -1e-14 || (std::abs(v[0]) <= 1e-14 && v[1] < 0)) v = -v;
        out.push_back(v);
    }
    return out;
}

Vec2 arrival_tangent(const JaggedLine& l) {
    size_t n = l.polyline.size();
    for (size_t i = n - 1; i > 0; --i) {
        Vec2 d = l.polyline[n - 1] - l.polyline[i - 1];
        if (d.norm() > 0.0) return d.normalized();
    }
    return Vec2::Zero();
}

// Lines of the field ending at z: through the stable directions when z is a zero of the field.
std::vector<JaggedLine> lines_ending_at(const PairField& field, const Labels& labels, const Vec2& z,
                                        const std::vector<WallRef>& walls, const TreeOptions& opt) {
    PotentialValue v = field.eval(labels, z);
    if (v.fiber.norm() > 1e-9) return lines_into(field, labels, z, walls, opt);
    std::vector<JaggedLine> out;
    for (const Vec2& d : eigen_directions(v.jacobian, true))
        for (double side : {1.0, -1.0}) {
            auto y = snap(z + side * opt.eigen_offset * d);
            if (!y || (*y - z).norm() < 0.5 * opt.eigen_offset) continue;
            Labels l = field.transport(labels, z, *y);
            for (JaggedLine& line : lines_into(field, l, *y, walls, opt)) {
                line.polyline.push_back(z);
                line.labels.push_back(labels);
                out.push_back(std::move(line));
            }
        }
    return out;
}

void check_nonnegative(double w) {
    if (w < -1e-9) throw std::runtime_error("negative gradient-line weight: integration or labelling error");
}

}  // namespace

JaggedLine trace_jagged(const PairField& field, Labels labels, const Vec2& start, const std::vector<WallRef>& walls,
                        const TreeOptions& opt) {
    JaggedLine line;
    line.lift = field.lift();
    Vec2 x = start;
    int skip = -1;
    for (int depth = 0;; ++depth) {
        TraceOptions to = opt.trace;
        to.direction = 1.0;
        to.walls = walls;
        to.skip_wall_at_start = skip;
        TraceResult tr = trace_flow(field, labels, x, to);
        size_t first = line.polyline.empty() ? 0 : 1;
        for (size_t i = first; i < tr.points.size(); ++i) {
            line.polyline.push_back(tr.points[i]);
            line.labels.push_back(tr.labels[i]);
        }
        line.quadrature += tr.quadrature;
        line.stop = tr.stop;
        if (tr.stop != StopReason::WallEvent || depth >= opt.max_events) break;
        const WallRef& ref = walls[tr.hit->wall_list_index];
        LineEvent ev;
        ev.object = ref.object;
        ev.wall_label = tr.hit->wall_label;
        ev.before = tr.final_labels;
        ev.after = cross_wall(tr.final_labels, ref.object, tr.hit->wall_label);
        ev.where = tr.hit->where;
        ev.point_index = static_cast<int>(line.polyline.size());
        line.polyline.push_back(tr.hit->where);
        line.labels.push_back(ev.after);
        line.events.push_back(ev);
        labels = ev.after;
        x = tr.hit->where;
        skip = tr.hit->wall_list_index;
    }
    line.weight = telescope_weight(line, field);
    line.traced_weight = line.weight;
    return line;
}

std::vector<JaggedLine> lines_into(const PairField& field, Labels labels_at_end, const Vec2& end,
                                   const std::vector<WallRef>& walls, const TreeOptions& opt, int ignore_branch) {
    std::vector<Branch> branches;
    reverse_rec(field, labels_at_end, end, -1, walls, opt, ignore_branch, Branch{}, 0, branches);
    std::vector<JaggedLine> out;
    for (Branch& b : branches) out.push_back(finalize(std::move(b), field));
    return out;
}

double telescope_weight(const JaggedLine& line, const PairField& field) {
    if (line.polyline.size() < 2) return 0.0;
    std::vector<int> cuts;
    for (const LineEvent& e : line.events) cuts.push_back(e.point_index);
    cuts.push_back(static_cast<int>(line.polyline.size()));
    double total = 0.0;
    int begin = 0;
    for (int end : cuts) {
        if (end - 1 > begin) {
            double hb = field.eval(line.labels[begin], line.polyline[begin]).value;
            double he = field.eval(line.labels[end - 1], line.polyline[end - 1]).value;
            double term = he - hb;
            check_nonnegative(term);
            total += term;
        }
        begin = end;
    }
    return total;
}

bool replay_events(const JaggedLine& line) {
    for (const LineEvent& e : line.events) {
        if (!(cross_wall(e.before, e.object, e.wall_label) == e.after)) return false;
        if (e.point_index <= 0 || e.point_index >= static_cast<int>(line.labels.size())) return false;
        if (!(line.labels[e.point_index] == e.after)) return false;
        if (!(line.labels[e.point_index - 1] == e.before)) return false;
    }
    return true;
}

std::vector<JaggedLine> incoming_lines(const Generator& q, const HomContext& ctx, const OrientationData& o,
                                       const TreeOptions& opt) {
    const HomSpace& hom = *ctx.hom;
    PairField field(*ctx.from, *ctx.to, q.lift);
    std::vector<WallRef> walls = ctx.walls();
    std::vector<JaggedLine> out;

    if (q.kind == GeneratorKind::FundamentalClass) return out;

    if (q.kind == GeneratorKind::BranchFormal && hom.self) {
        // constant lines from each sheet's fundamental class into the ramification point
        for (const Generator& p : hom.generators) {
            if (p.kind != GeneratorKind::FundamentalClass) continue;
            JaggedLine line;
            line.from = &p;
            line.to = &q;
            line.trivial = true;
            line.polyline = {q.position, q.position};
            line.labels = {p.sheets, p.sheets};
            line.stop = StopReason::Converged;
            line.sign = o.of(p) * o.of(q) * (p.sheets.source == q.sheets.source ? 1 : -1);
            out.push_back(line);
        }
        return out;
    }

    if (q.kind == GeneratorKind::BranchFormal) {
        const MultiSection& owner = ctx.to->branch_points().empty() ? *ctx.from : *ctx.to;
        bool owner_is_target = &owner == ctx.to;
        const Vec2 c = q.position;
        for (int k = 0; k < 3; ++k) {
            double theta = 2.0 * std::numbers::pi * k / 3.0;
            Vec2 x0 = owner.patch_point(opt.germ_radius, theta);
            for (int s = 0; s < owner.degree(); ++s) {
                Labels l = owner_is_target ? Labels{q.sheets.source, s} : Labels{s, q.sheets.target};
                PotentialValue v = field.eval(l, x0);
                if (v.fiber.dot(c - x0) <= 0.0) continue;  // not an incoming ray on this sheet
                for (JaggedLine& line : lines_into(field, l, x0, walls, opt, q.branch)) {
                    line.polyline.push_back(c);
                    line.labels.push_back(line.labels.back());
                    line.from = match_source(line, hom, q.degree - 1, q.lift, opt.match_radius);
                    if (!line.from) continue;
                    line.to = &q;
                    line.weight = telescope_weight(line, field);
                    line.sign = o.of(*line.from) * o.of(q);
                    out.push_back(std::move(line));
                }
            }
        }
        return out;
    }

    if (q.stable_dim == 1) {
        for (const Vec2& d : eigen_directions(q.jacobian, true))
            for (double side : {1.0, -1.0}) {
                auto y = snap(q.position + side * opt.eigen_offset * d);
                if (!y || (*y - q.position).norm() < 0.5 * opt.eigen_offset) continue;
                Labels l = field.transport(q.sheets, q.position, *y);
                for (JaggedLine& line : lines_into(field, l, *y, walls, opt)) {
                    line.polyline.push_back(q.position);
                    line.labels.push_back(q.sheets);
                    line.from = match_source(line, hom, q.degree - 1, q.lift, opt.match_radius);
                    if (!line.from) continue;
                    line.to = &q;
                    line.weight = telescope_weight(line, field);
                    line.sign = o.of(*line.from) * o.of(q) * (side > 0 ? -1 : 1);
                    out.push_back(std::move(line));
                }
            }
        return out;
    }

    if (q.stable_dim == 2) {
        // leave each saddle of the complex along its unstable directions
        for (const Generator& p : hom.generators) {
            if (p.kind != GeneratorKind::Regular || p.degree != q.degree - 1 || p.lift != q.lift) continue;
            for (const Vec2& d : eigen_directions(p.jacobian, false))
                for (double side : {1.0, -1.0}) {
                    auto y = snap(p.position + side * opt.eigen_offset * d);
                    if (!y || (*y - p.position).norm() < 0.5 * opt.eigen_offset) continue;
                    JaggedLine line = trace_jagged(field, field.transport(p.sheets, p.position, *y), *y, walls, opt);
                    if (line.stop != StopReason::Converged) continue;
                    if ((line.polyline.back() - q.position).norm() > opt.match_radius ||
                        !(line.labels.back() == q.sheets))
                        continue;
                    line.polyline.insert(line.polyline.begin(), p.position);
                    line.labels.insert(line.labels.begin(), p.sheets);
                    for (LineEvent& e : line.events) ++e.point_index;
                    line.from = &p;
                    line.to = &q;
                    line.weight = telescope_weight(line, field);
                    line.sign = o.of(p) * o.of(q) * (side > 0 ? 1 : -1);
                    out.push_back(std::move(line));
                }
        }
    }
    return out;
}

std::vector<M1Entry> enumerate_m1(const Generator& p, const HomContext& ctx, const OrientationData& o,
                                  const TreeOptions& opt) {
    std::vector<M1Entry> out;
    for (const Generator& q : ctx.hom->generators) {
        if (q.degree != p.degree + 1 || q.lift != p.lift) continue;
        for (JaggedLine& line : incoming_lines(q, ctx, o, opt))
            if (line.from == &p) out.push_back(M1Entry{&q, line.sign, line.weight, std::move(line)});
    }
    return out;
}

std::vector<M2Entry> enumerate_m2(const Generator& v12, const Generator& v23, const HomContext& c12,
                                  const HomContext& c23, const HomContext& c13, const OrientationData& o,
                                  const TreeOptions& opt) {
    std::vector<M2Entry> out;
    std::array<int, 2> lift{v12.lift[0] + v23.lift[0], v12.lift[1] + v23.lift[1]};
    int degree = v12.degree + v23.degree;
    PairField f12(*c12.from, *c12.to, v12.lift), f23(*c23.from, *c23.to, v23.lift);
    std::vector<WallRef> w12 = c12.walls(), w23 = c23.walls();
    for (const Generator& v13 : c13.hom->generators) {
        if (v13.kind != GeneratorKind::Regular || v13.lift != lift || v13.degree != degree) continue;
        if (v13.stable_dim != 0)
            throw std::logic_error("enumerate_m2: outputs with stable directions are not supported");
        // the output is a source of its field, so the tree vertex sits on it
        const Vec2 z = v13.position;
        for (const WallRef& w : w12)
            for (const Vec2& p : w.wall->points)
                if ((p - z).norm() < 1e-9 && min_slack(z) > 1e-7)
                    throw std::runtime_error("enumerate_m2: tree vertex on a wall");
        for (int s = 0; s < c12.to->degree(); ++s) {
            Labels l12{v13.sheets.source, s}, l23{s, v13.sheets.target};
            std::vector<JaggedLine> a, b;
            for (JaggedLine& line : lines_ending_at(f12, l12, z, w12, opt)) {
                line.from = match_source(line, *c12.hom, v12.degree, v12.lift, opt.match_radius);
                if (line.from == &v12) a.push_back(std::move(line));
            }
            if (a.empty()) continue;
            for (JaggedLine& line : lines_ending_at(f23, l23, z, w23, opt)) {
                line.from = match_source(line, *c23.hom, v23.degree, v23.lift, opt.match_radius);
                if (line.from == &v23) b.push_back(std::move(line));
            }
            for (JaggedLine& la : a)
                for (JaggedLine& lb : b) {
                    GradientTree t;
                    t.v12 = &v12;
                    t.v23 = &v23;
                    t.v13 = &v13;
                    t.vertex = z;
                    t.middle_sheet = s;
                    t.inputs = {la, lb};
                    t.inputs[0].weight = telescope_weight(la, f12);
                    t.inputs[1].weight = telescope_weight(lb, f23);
                    t.weight = t.inputs[0].weight + t.inputs[1].weight;
                    t.quadrature = la.quadrature + lb.quadrature;
                    t.traced_weight = la.traced_weight + lb.traced_weight;
                    Vec2 t12 = arrival_tangent(la), t23 = arrival_tangent(lb);
                    double det = t12[0] * t23[1] - t12[1] * t23[0];
                    if (std::abs(det) < 1e-6) throw std::runtime_error("enumerate_m2: tangent input edges");
                    t.sign = (det > 0 ? 1 : -1) * o.of(v12) * o.of(v23) * o.of(v13);
                    out.push_back(M2Entry{&v13, t.sign, t.weight, std::move(t)});
                }
        }
    }
    return out;
}

}  // namespace mvm
