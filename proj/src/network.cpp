#include "mvm/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mvm {

PairField::PairField(const MultiSection& from, const MultiSection& to, std::array<int, 2> lift)
    : from_(&from), to_(&to), lift_(lift), lift_atoms_(mvm::lift_atoms(lift)) {}

PotentialValue PairField::eval(const Labels& l, const Vec2& x, const Vec2* ref) const {
    AtomJet a = to_->atoms(l.target, x, ref);
    a -= from_->atoms(l.source, x, ref);
    a -= lift_atoms_;
    return evaluate(a, x);
}

Labels PairField::transport(const Labels& l, const Vec2& a, const Vec2& b) const {
    Labels out = l;
    if (from_->crosses_cut(a, b)) out.source = 1 - out.source;
    if (to_->crosses_cut(a, b)) out.target = 1 - out.target;
    return out;
}

double metric_norm2(const Vec2& F, const Vec2& x) {
    Face face = minimal_face(x, 1e-13);
    Mat2 H = metric_in_x(x);
    if (face.dim == 2) return F.dot(H.ldlt().solve(F));
    if (face.dim == 1) {
        double ft = F.dot(face.tangent);
        double ht = face.tangent.dot(H * face.tangent);
        return ht > 0.0 ? ft * ft / ht : 0.0;
    }
    return 0.0;
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Boundary: return "boundary";
        case StopReason::Converged: return "converged";
        case StopReason::StopPoint: return "stop_point";
        case StopReason::WallEvent: return "wall";
        case StopReason::Budget: return "budget";
        case StopReason::Degenerate: return "branch_point";
        case StopReason::Invalid: return "invalid";
    }
    return "unknown";
}

std::optional<std::pair<double, double>> segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                                                              const Vec2& q1) {
    Vec2 r = p1 - p0, s = q1 - q0;
    double den = r[0] * s[1] - r[1] * s[0];
    if (std::abs(den) < 1e-300) return std::nullopt;
    Vec2 d = q0 - p0;
    double t = (d[0] * s[1] - d[1] * s[0]) / den;
    double u = (d[0] * r[1] - d[1] * r[0]) / den;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return std::make_pair(t, u);
}

namespace {

constexpr double kBoundaryContact = 1e-9;  // facet slack counted as reaching the boundary
constexpr double kStallStep = 1e-13;

// Snap points within rounding distance of P onto P; reject points clearly outside.
std::optional<Vec2> clamp_to_polytope(Vec2 x, double tol = 1e-12) {
    if (min_slack(x) < -tol) return std::nullopt;
    if (x[0] < 0.0) x[0] = 0.0;
    if (x[1] < 0.0) x[1] = 0.0;
    double over = x[0] + x[1] - 1.0;
    if (over > 0.0) {
        if (x[0] == 0.0)
            x[1] = 1.0;
        else if (x[1] == 0.0)
            x[0] = 1.0;
        else {
            x[0] -= 0.5 * over;
            x[1] = 1.0 - x[0];
        }
    }
    return x;
}

struct Stage {
    Vec2 dx;
    double dw;
};

class Stepper {
public:
    Stepper(const PairField& f, const TraceOptions& o) : field_(f), opt_(o) {}

    // Derivative at x under labels continued from ref; nullopt if x is outside P.
    std::optional<Stage> rhs(const Labels& l, const Vec2& x, const Vec2& ref, bool* degenerate) const {
        auto c = clamp_to_polytope(x);
        if (!c) return std::nullopt;
        PotentialValue v = field_.eval(l, *c, &ref);
        if (v.degenerate) *degenerate = true;
        if (!v.fiber.allFinite()) return std::nullopt;
        Stage s{opt_.direction * v.fiber, opt_.direction * metric_norm2(v.fiber, *c)};
        if (!std::isfinite(s.dw)) s.dw = 0.0;
        return s;
    }

    struct Result {
        bool ok = false;
        Vec2 x;
        double w = 0.0;
        double err = 0.0;
        bool degenerate = false;
    };

    Result step(const Labels& l, const Vec2& x, double h) const {
        static constexpr double a[7][6] = {
            {0, 0, 0, 0, 0, 0},
            {1.0 / 5, 0, 0, 0, 0, 0},
            {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
            {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
            {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
            {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
            {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
        static constexpr double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
        static constexpr double b4[7] = {5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                                         -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
        Result r;
        std::array<Stage, 7> k;
        for (int i = 0; i < 7; ++i) {
            Vec2 xi = x;
            for (int j = 0; j < i; ++j) xi += h * a[i][j] * k[j].dx;
            auto s = rhs(l, xi, x, &r.degenerate);
            if (!s) return r;
            k[i] = *s;
        }
        Vec2 x5 = x, e = Vec2::Zero();
        double w5 = 0.0, ew = 0.0;
        for (int i = 0; i < 7; ++i) {
            x5 += h * b5[i] * k[i].dx;
            w5 += h * b5[i] * k[i].dw;
            e += h * (b5[i] - b4[i]) * k[i].dx;
            ew += h * (b5[i] - b4[i]) * k[i].dw;
        }
        auto c = clamp_to_polytope(x5);
        if (!c) return r;
        r.ok = true;
        r.x = *c;
        r.w = w5;
        double s0 = opt_.atol + opt_.rtol * std::max(std::abs(x[0]), std::abs(x5[0]));
        double s1 = opt_.atol + opt_.rtol * std::max(std::abs(x[1]), std::abs(x5[1]));
        double sw = opt_.atol + opt_.rtol * std::max(1.0, std::abs(w5));
        r.err = std::sqrt((std::pow(e[0] / s0, 2) + std::pow(e[1] / s1, 2) + std::pow(ew / sw, 2)) / 3.0);
        return r;
    }

private:
    const PairField& field_;
    const TraceOptions& opt_;
};

double side_of(const Vec2& q0, const Vec2& q1, const Vec2& y) {
    Vec2 s = q1 - q0;
    return (s[0] * (y[1] - q0[1]) - s[1] * (y[0] - q0[0])) / s.norm();
}

}  // namespace

TraceResult trace_flow(const PairField& field, Labels labels, const Vec2& start, const TraceOptions& opt) {
    TraceResult out;
    Stepper stepper(field, opt);
    auto x0 = clamp_to_polytope(start);
    if (!x0) {
        out.stop = StopReason::Invalid;
        return out;
    }
    Vec2 x = *x0;
    out.points.push_back(x);
    out.labels.push_back(labels);
    double h = opt.initial_step;
    double t = 0.0;
    bool first_segment = true;

    auto speed_at = [&](const Vec2& y, bool* degen) {
        PotentialValue v = field.eval(labels, y);
        if (v.degenerate) *degen = true;
        return v.fiber.norm();
    };

    for (int n = 0; n < opt.max_steps; ++n) {
        bool degen = false;
        double speed = speed_at(x, &degen);
        if (degen) {
            out.stop = StopReason::Degenerate;
            break;
        }
        if (!std::isfinite(speed)) {
            out.stop = StopReason::Invalid;
            break;
        }
        if (speed < opt.stop_speed) {
            out.stop = StopReason::Converged;
            break;
        }
        if (t > opt.max_time) {
            out.stop = StopReason::Budget;
            break;
        }
        // keep polyline segments short
        h = std::min(h, opt.max_segment / speed);
        auto r = stepper.step(labels, x, h);
        if (!r.ok) {
            if (r.degenerate) {
                out.stop = StopReason::Degenerate;
                break;
            }
            h *= 0.5;
            if (h * speed < 1e-13) {
                out.stop = StopReason::Boundary;
                break;
            }
            continue;
        }
        if (r.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(r.err, -0.2));
            continue;
        }
        if ((r.x - x).norm() > 1.5 * opt.max_segment) {
            h *= 0.5;
            continue;
        }

        // wall crossings along the chord
        std::optional<WallHit> hit;
        double best = 2.0;
        for (size_t wi = 0; wi < opt.walls.size(); ++wi) {
            const Wall& w = *opt.walls[wi].wall;
            if (opt.ignore_branch >= 0 && w.origin_branch == opt.ignore_branch) continue;
            for (size_t s = 0; s + 1 < w.points.size(); ++s) {
                const Vec2 &q0 = w.points[s], &q1 = w.points[s + 1];
                if (std::max(q0[0], q1[0]) < std::min(x[0], r.x[0]) ||
                    std::min(q0[0], q1[0]) > std::max(x[0], r.x[0]) ||
                    std::max(q0[1], q1[1]) < std::min(x[1], r.x[1]) ||
                    std::min(q0[1], q1[1]) > std::max(x[1], r.x[1]))
                    continue;
                auto st = segment_intersection(x, r.x, q0, q1);
                if (!st) continue;
                Vec2 p = x + st->first * (r.x - x);
                if (min_slack(p) < 1e-7) continue;  // boundary contact is not a crossing
                if (first_segment && static_cast<int>(wi) == opt.skip_wall_at_start &&
                    (p - out.points.front()).norm() < 1e-6)
                    continue;
                if (st->first < best) {
                    best = st->first;
                    hit = WallHit{static_cast<int>(wi), static_cast<int>(s), p, w.labels[s + 1]};
                }
            }
        }
        if (hit) {
            const Wall& w = *opt.walls[hit->wall_list_index].wall;
            const Vec2 &q0 = w.points[hit->segment], &q1 = w.points[hit->segment + 1];
            double s_lo = side_of(q0, q1, x);
            double lo = 0.0, hi = h;
            Stepper::Result mid_r;
            mid_r.x = x;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                mid_r = stepper.step(labels, x, mid);
                if (!mid_r.ok) {
                    hi = mid;
                    continue;
                }
                double sd = side_of(q0, q1, mid_r.x);
                if (std::abs(sd) < 0.1 * opt.event_tol) break;
                ((sd > 0) == (s_lo > 0) ? lo : hi) = mid;
            }
            hit->where = mid_r.x;
            out.quadrature += mid_r.w;
            t += opt.direction * 0.5 * (lo + hi);
            Labels after = field.transport(labels, x, mid_r.x);
            if (!(after == labels)) out.cuts.push_back(CutCrossing{-1, static_cast<int>(out.points.size()), mid_r.x});
            labels = after;
            out.points.push_back(mid_r.x);
            out.labels.push_back(labels);
            out.hit = hit;
            out.stop = StopReason::WallEvent;
            out.final_labels = labels;
            out.time = t;
            return out;
        }

        // a flow leaving P creeps toward the boundary in ever shorter accepted steps
        bool stalled = (r.x - x).norm() < kStallStep;
        Labels after = field.transport(labels, x, r.x);
        if (after.source != labels.source)
            out.cuts.push_back(CutCrossing{0, static_cast<int>(out.points.size()), r.x});
        if (after.target != labels.target)
            out.cuts.push_back(CutCrossing{1, static_cast<int>(out.points.size()), r.x});
        labels = after;
        x = r.x;
        t += h;
        out.quadrature += r.w;
        out.points.push_back(x);
        out.labels.push_back(labels);
        first_segment = false;
        h *= std::min(5.0, 0.9 * std::pow(std::max(r.err, 1e-10), -0.2));

        if ((stalled && min_slack(x) < kBoundaryContact) ||
            (opt.boundary_stop > 0.0 && min_slack(x) < opt.boundary_stop)) {
            out.stop = StopReason::Boundary;
            break;
        }
        bool stop = false;
        for (const Vec2& p : opt.stop_points)
            if ((x - p).norm() < opt.stop_radius) stop = true;
        if (stop) {
            out.stop = StopReason::StopPoint;
            break;
        }
        if (n + 1 == opt.max_steps) out.stop = StopReason::Budget;
    }
    out.final_labels = labels;
    out.time = t;
    return out;
}

SpectralNetwork build_network(const MultiSection& m, const NetworkOptions& opt) {
    SpectralNetwork net;
    if (m.degree() < 2) {
        net.generation_log.push_back("single sheet: no sheet pairs, empty network");
        return net;
    }
    PairField field(m, m, {0, 0});
    for (size_t b = 0; b < m.branch_points().size(); ++b) {
        const BranchPoint& bp = m.branch_points()[b];
        for (int k = 0; k < 3; ++k) {
            double theta = 2.0 * std::numbers::pi * k / 3.0;
            Vec2 x0 = m.patch_point(opt.germ_radius, theta);
            double d = m.sheet_eval(bp.sheets[0], x0).value - m.sheet_eval(bp.sheets[1], x0).value;
            int alpha = d > 0 ? bp.sheets[0] : bp.sheets[1];
            int beta = d > 0 ? bp.sheets[1] : bp.sheets[0];
            Wall w;
            w.sheet_pair = {alpha, beta};
            w.origin_branch = static_cast<int>(b);
            w.germ_angle = theta;
            TraceOptions to = opt.trace;
            to.direction = 1.0;
            to.walls.clear();
            if (to.boundary_stop <= 0.0) to.boundary_stop = 1e-10;
            TraceResult tr = trace_flow(field, Labels{beta, alpha}, x0, to);
            w.points.push_back(bp.position);
            w.labels.push_back({alpha, beta});
            for (size_t i = 0; i < tr.points.size(); ++i) {
                w.points.push_back(tr.points[i]);
                w.labels.push_back({tr.labels[i].target, tr.labels[i].source});
            }
            w.terminal = w.points.back();
            w.truncated = tr.stop != StopReason::Boundary;
            std::ostringstream log;
            log << "seed branch " << b << " germ " << k << " label (" << alpha + 1 << beta + 1 << ") -> "
                << to_string(tr.stop);
            net.generation_log.push_back(log.str());
            net.walls.push_back(std::move(w));
        }
    }
    // Collision spawning: a crossing of an (a b)-wall with a (b c)-wall, a != c, seeds an
    // (a c)-wall. Iterate over the current snapshot until no new composable crossing appears.
    size_t processed = 0;
    for (int gen = 0; gen < opt.generation_cap; ++gen) {
        size_t count = net.walls.size();
        bool spawned = false;
        for (size_t i = 0; i < count; ++i)
            for (size_t j = std::max(i + 1, processed); j < count; ++j) {
                const Wall &a = net.walls[i], &c = net.walls[j];
                for (int order = 0; order < 2; ++order) {
                    const Wall& w1 = order ? c : a;
                    const Wall& w2 = order ? a : c;
                    if (w1.sheet_pair[1] != w2.sheet_pair[0] || w1.sheet_pair[0] == w2.sheet_pair[1]) continue;
                    for (size_t s = 0; s + 1 < w1.points.size(); ++s)
                        for (size_t u = 0; u + 1 < w2.points.size(); ++u) {
                            auto st = segment_intersection(w1.points[s], w1.points[s + 1], w2.points[u],
                                                           w2.points[u + 1]);
                            if (!st) continue;
                            Vec2 p = w1.points[s] + st->first * (w1.points[s + 1] - w1.points[s]);
                            Wall nw;
                            nw.sheet_pair = {w1.sheet_pair[0], w2.sheet_pair[1]};
                            nw.origin_collision = static_cast<int>(i * 1000 + j);
                            TraceOptions to = opt.trace;
                            if (to.boundary_stop <= 0.0) to.boundary_stop = 1e-10;
                            TraceResult tr = trace_flow(field, Labels{nw.sheet_pair[1], nw.sheet_pair[0]}, p, to);
                            for (size_t q = 0; q < tr.points.size(); ++q) {
                                nw.points.push_back(tr.points[q]);
                                nw.labels.push_back({tr.labels[q].target, tr.labels[q].source});
                            }
                            nw.terminal = nw.points.back();
                            nw.truncated = tr.stop != StopReason::Boundary;
                            net.walls.push_back(std::move(nw));
                            spawned = true;
                        }
                }
            }
        processed = count;
        if (!spawned) {
            net.generation_log.push_back("no composable wall crossings");
            return net;
        }
    }
    net.cap_hit = true;
    net.generation_log.push_back("generation cap reached");
    return net;
}

WellBehavedReport is_well_behaved(const SpectralNetwork& n, const MultiSection& m, double terminal_tol) {
    WellBehavedReport rep;
    if (n.cap_hit) {
        rep.ok = false;
        rep.reasons.push_back("generation cap reached: network not finite");
    }
    for (size_t i = 0; i < n.walls.size(); ++i) {
        const Wall& w = n.walls[i];
        if (w.truncated) {
            rep.ok = false;
            rep.reasons.push_back("wall " + std::to_string(i) + " truncated before reaching the boundary");
        }
        if (std::abs(min_slack(w.terminal)) > terminal_tol) {
            rep.ok = false;
            rep.reasons.push_back("wall " + std::to_string(i) + " terminal off the boundary");
        }
        int met = 0;
        for (const BranchPoint& b : m.branch_points()) {
            bool near = false;
            for (const Vec2& p : w.points)
                if ((p - b.position).norm() < 1e-9) near = true;
            met += near;
        }
        if (met > 1) {
            rep.ok = false;
            rep.reasons.push_back("wall " + std::to_string(i) + " meets more than one branch point");
        }
    }
    return rep;
}

namespace {

double angle_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

double nearest(double a, double offset) {
    double best = 1e300;
    for (int k = 0; k < 3; ++k) best = std::min(best, angle_distance(a, offset + 2.0 * std::numbers::pi * k / 3.0));
    return best;
}

// Golden-section search for an extremum of f on [a, b]; sign +1 finds a maximum.
template <class F>
double golden(F f, double a, double b, double sign) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sign * f(c), fd = sign * f(d);
    while (b - a > 1e-12) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sign * f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

GermReport germ_report(const SpectralNetwork& n, const MultiSection& m, double probe_radius, double circle_radius,
                       double tol) {
    GermReport g;
    const double pi = std::numbers::pi;
    for (const Wall& w : n.walls) {
        if (w.origin_branch < 0) continue;
        for (size_t i = 1; i + 1 < w.points.size(); ++i) {
            double r0 = m.patch_radius(w.points[i]), r1 = m.patch_radius(w.points[i + 1]);
            if (r0 <= probe_radius && r1 > probe_radius) {
                double t = (probe_radius - r0) / (r1 - r0);
                g.wall_angles.push_back(m.patch_angle(w.points[i] + t * (w.points[i + 1] - w.points[i])));
                break;
            }
        }
    }
    for (const BranchPoint& bp : m.branch_points()) {
        auto diff = [&](double theta) {
            Vec2 x = m.patch_point(circle_radius, theta);
            return std::abs(m.sheet_eval(bp.sheets[0], x).value - m.sheet_eval(bp.sheets[1], x).value);
        };
        const int samples = 3600;
        std::vector<double> v(samples);
        for (int i = 0; i < samples; ++i) v[i] = diff(2.0 * pi * i / samples);
        double top = *std::max_element(v.begin(), v.end());
        for (int i = 0; i < samples; ++i) {
            double prev = v[(i + samples - 1) % samples], next = v[(i + 1) % samples];
            double a = 2.0 * pi * (i - 1) / samples, b = 2.0 * pi * (i + 1) / samples;
            if (v[i] <= prev && v[i] < next && v[i] < 0.05 * top) {
                double t = std::fmod(golden(diff, a, b, -1.0) + 2.0 * pi, 2.0 * pi);
                g.zero_angles.push_back(t);
            }
            if (v[i] >= prev && v[i] > next && v[i] > 0.95 * top) {
                double t = std::fmod(golden(diff, a, b, 1.0) + 2.0 * pi, 2.0 * pi);
                g.extremum_angles.push_back(t);
            }
        }
    }
    for (double a : g.wall_angles) g.wall_deviation = std::max(g.wall_deviation, nearest(a, 0.0));
    for (double a : g.zero_angles) g.zero_deviation = std::max(g.zero_deviation, nearest(a, pi / 3.0));
    for (double a : g.extremum_angles) g.extremum_deviation = std::max(g.extremum_deviation, nearest(a, 0.0));
    const size_t expected = 3 * m.branch_points().size();
    g.ok = g.wall_angles.size() == expected && g.zero_angles.size() == expected &&
           g.extremum_angles.size() == expected && g.wall_deviation < tol && g.zero_deviation < tol &&
           g.extremum_deviation < tol;
    return g;
}

}  // namespace mvm
