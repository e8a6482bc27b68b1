#include "mvm/lagrangian.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <numbers>

#include "mvm/floer.hpp"

namespace mvm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
const double kSqrt3 = std::sqrt(3.0);

struct JVec {
    Jet a, b;
};

const Mat2& M() {
    static const Mat2 m = (Mat2() << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0).finished();
    return m;
}
const Mat2& Minv() {
    static const Mat2 m = M().inverse();
    return m;
}
const Mat2& Hc() {
    static const Mat2 h = (Mat2() << 4.0 / 9.0, -2.0 / 9.0, -2.0 / 9.0, 4.0 / 9.0).finished();
    return h;
}
const Vec2& Ec() {
    static const Vec2 e = M() * Vec2(1.0 / 3.0, 1.0 / 3.0);
    return e;
}
const double kFlatMean = 0.75 * std::log(3.0);  // -(1/4) sum log x_k at the centroid

JVec mul(const Mat2& m, const JVec& v) {
    return {m(0, 0) * v.a + m(0, 1) * v.b, m(1, 0) * v.a + m(1, 1) * v.b};
}

double wrap_deg(double a) {  // to (-180, 180]
    double w = std::fmod(a + 180.0, 360.0);
    if (w <= 0.0) w += 360.0;
    return w - 180.0;
}

// Twist angle (radians) as a function of the equilateral radius.
double twist_angle(const TangentParams& p, double r) {
    return p.twist_deg * kDeg * (1.0 - smoothstep((r - p.twist_inner) / (p.twist_outer - p.twist_inner)));
}

JVec twist(const TangentParams& p, const JVec& x) {
    Vec2 xv(x.a.v, x.b.v);
    double rE = (M() * xv - Ec()).norm();
    if (rE >= p.twist_outer) return x;
    JVec e = mul(M(), x);
    e.a -= Ec()[0];
    e.b -= Ec()[1];
    Jet angle;
    if (rE <= p.twist_inner) {
        angle = Jet(p.twist_deg * kDeg);
    } else {
        Jet r = sqrt(e.a * e.a + e.b * e.b);
        Jet s = smoothstep((r - p.twist_inner) / (p.twist_outer - p.twist_inner));
        angle = p.twist_deg * kDeg * (1.0 - s);
    }
    Jet c = cos(angle), s = sin(angle);
    JVec rot{c * e.a - s * e.b + Ec()[0], s * e.a + c * e.b + Ec()[1]};
    return mul(Minv(), rot);
}

// Lifted sheet angle (degrees): the cut direction bounds the first sheet from above.
Jet lifted_angle(const TangentParams& p, const JVec& x, int sheet) {
    JVec e = mul(M(), x);
    e.a -= Ec()[0];
    e.b -= Ec()[1];
    Jet phi = (1.0 / kDeg) * atan2(e.b, e.a);
    double cut = p.cut_angle_deg;
    double m = std::fmod(cut - phi.v, 360.0);
    if (m < 0) m += 360.0;
    double phi1 = cut - m;
    return phi + (phi1 - phi.v) + 360.0 * sheet;
}

// Piecewise-smooth map from the lifted angle to the hexagon of slope coefficients.
JVec hexagon(const TangentParams& p, const Jet& phi) {
    static const std::array<std::array<double, 2>, 6> verts = {
        {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};
    double t = std::fmod(phi.v + 150.0, 720.0);
    if (t < 0) t += 720.0;
    int m = static_cast<int>(std::floor(t / 120.0));
    Jet loc = phi + (t - phi.v) - 120.0 * m;
    const auto& a = verts[m % 6];
    const auto& b = verts[(m + 1) % 6];
    double hw = p.plateau_halfwidth_deg;
    Jet s = smoothstep((loc - hw) / (120.0 - 2.0 * hw));
    return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
}

// Edge Hamiltonian supported near facet j.
Jet edge_term(const TangentParams& p, const std::array<Jet, 3>& h, int j) {
    Jet chi = 1.0 - smoothstep((h[j] - p.edge_inner) / (p.edge_outer - p.edge_inner));
    if (chi.v == 0.0 && chi.constant()) return Jet(0.0);
    const Jet& xa = h[(j + 1) % 3];
    const Jet& xb = h[(j + 2) % 3];
    Jet s = xa + xb;
    return (-0.25 * p.epsilon) * xa * xb / (s * s) * chi;
}

std::array<Jet, 3> homogeneous_jets(const JVec& x) { return {1.0 - x.a - x.b, x.a, x.b}; }

double flat_lower(const TangentParams& p) { return 0.75 * p.local_model_radius * p.local_model_radius; }
double flat_upper(const TangentParams& p) { return 0.75 * p.blend_outer * p.blend_outer; }

Vec2 patch_coordinate_impl(const TangentParams& p, const Vec2& x) {
    Vec2 z = kSqrt3 * (M() * (Hc() * legendre_inverse(x)));
    double c = std::cos(p.patch_rotation_deg * kDeg), s = std::sin(p.patch_rotation_deg * kDeg);
    return Vec2(c * z[0] - s * z[1], s * z[0] + c * z[1]);
}

}  // namespace

Mat2 equilateral_matrix() { return M(); }
Vec2 centroid() { return Vec2(1.0 / 3.0, 1.0 / 3.0); }

AtomJet& AtomJet::operator+=(const AtomJet& o) {
    for (int a = 0; a < kAtomCount; ++a) coef[a] += o.coef[a];
    rest += o.rest;
    degenerate = degenerate || o.degenerate;
    return *this;
}
AtomJet& AtomJet::operator-=(const AtomJet& o) {
    for (int a = 0; a < kAtomCount; ++a) coef[a] -= o.coef[a];
    rest -= o.rest;
    degenerate = degenerate || o.degenerate;
    return *this;
}
AtomJet AtomJet::operator-() const {
    AtomJet r;
    for (int a = 0; a < kAtomCount; ++a) r.coef[a] = -coef[a];
    r.rest = -rest;
    r.degenerate = degenerate;
    return r;
}
AtomJet operator+(AtomJet a, const AtomJet& b) { return a += b; }
AtomJet operator-(AtomJet a, const AtomJet& b) { return a -= b; }

AtomJet lift_atoms(const std::array<int, 2>& lift) {
    // xi_i = (log x_i - log x_0) / 2
    AtomJet a;
    a.coef[kLogX0] = Jet(-0.5 * (lift[0] + lift[1]));
    a.coef[kLogX1] = Jet(0.5 * lift[0]);
    a.coef[kLogX2] = Jet(0.5 * lift[1]);
    return a;
}

PotentialValue evaluate(const AtomJet& a, const Vec2& x) {
    PotentialValue out;
    out.degenerate = a.degenerate;
    const double x1 = x[0], x2 = x[1];
    const double x0 = std::max(0.0, 1.0 - x1 - x2);
    const Mat2 H = metric_in_x(x);
    auto dH = [&](const Vec2& v) {  // directional derivative of H applied to v
        Mat2 m = -2.0 * x.dot(v) * Mat2::Identity() - 2.0 * x * v.transpose();
        m(0, 0) += 2.0 * v[0];
        m(1, 1) += 2.0 * v[1];
        return m;
    };
    out.value = a.rest.v;
    out.fiber = H * a.rest.g;
    out.jacobian = dH(a.rest.g) + H * a.rest.h;

    const Mat2 minus2 = -2.0 * Mat2::Identity();
    for (int k = 0; k < kAtomCount; ++k) {
        const Jet& c = a.coef[k];
        bool varies = !c.constant();
        if (c.v == 0.0 && !varies) continue;
        double atom = 0.0;
        Vec2 g, grad_atom;
        Mat2 dg;
        switch (k) {
            case kLogX0:
                atom = x0;
                g = -2.0 * x;
                dg = minus2;
                grad_atom = Vec2(-1, -1);
                break;
            case kLogX1:
                atom = x1;
                g = 2.0 * (Vec2(1, 0) - x);
                dg = minus2;
                grad_atom = Vec2(1, 0);
                break;
            case kLogX2:
                atom = x2;
                g = 2.0 * (Vec2(0, 1) - x);
                dg = minus2;
                grad_atom = Vec2(0, 1);
                break;
            case kLogX01: {
                atom = 1.0 - x2;
                g = Vec2(2.0 * x1 * x2 / atom, -2.0 * x2);
                dg << 2.0 * x2 / atom, 2.0 * x1 / (atom * atom), 0.0, -2.0;
                grad_atom = Vec2(0, -1);
                break;
            }
            case kLogX12: {
                atom = x1 + x2;
                double w = (1.0 - atom) / atom;
                g = 2.0 * w * x;
                dg = 2.0 * w * Mat2::Identity() - 2.0 / (atom * atom) * x * Vec2(1, 1).transpose();
                grad_atom = Vec2(1, 1);
                break;
            }
            case kLogX20: {
                atom = 1.0 - x1;
                g = Vec2(-2.0 * x1, 2.0 * x1 * x2 / atom);
                dg << -2.0, 0.0, 2.0 * x2 / (atom * atom), 2.0 * x1 / atom;
                grad_atom = Vec2(-1, 0);
                break;
            }
            default:
                break;
        }
        if (c.v != 0.0) {
            if (atom > 0.0)
                out.value += c.v * std::log(atom);
            else
                out.finite = false;
            out.fiber += c.v * g;
            out.jacobian += c.v * dg;
        }
        if (varies) {
            double la = std::log(atom);
            Vec2 w = H * c.g;
            out.fiber += la * w;
            out.jacobian += g * c.g.transpose() + w * (grad_atom / atom).transpose() +
                            la * (dH(c.g) + H * c.h);
        }
    }
    if (!out.finite) out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
}

LocalModelValue local_model_eval(double r, double theta, int branch) {
    if (r <= 0.0) return {0.0, Vec2::Zero()};
    double t = theta + 2.0 * kPi * branch;
    double sr = std::sqrt(r);
    return {2.0 / 3.0 * r * sr * std::cos(1.5 * t), Vec2(sr * std::cos(0.5 * t), -sr * std::sin(0.5 * t))};
}

MultiSection MultiSection::line_bundle_section(int k) {
    MultiSection m;
    m.kind_ = Kind::Line;
    m.k_ = k;
    return m;
}

MultiSection MultiSection::tangent_unchecked(const TangentParams& p) {
    MultiSection m;
    m.kind_ = Kind::Tangent;
    m.params_ = p;
    m.branch_points_ = {BranchPoint{centroid(), {0, 1}}};
    BranchCut cut;
    cut.branch = 0;
    cut.sheets = {0, 1};
    for (double r = 1e-6;; r += 2e-3) {
        double beta = p.cut_angle_deg * kDeg - twist_angle(p, r);
        Vec2 x = centroid() + Minv() * Vec2(r * std::cos(beta), r * std::sin(beta));
        if (min_slack(x) <= 0.0) {
            double lo = r - 2e-3, hi = r;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (lo + hi);
                double b = p.cut_angle_deg * kDeg - twist_angle(p, mid);
                Vec2 y = centroid() + Minv() * Vec2(mid * std::cos(b), mid * std::sin(b));
                (min_slack(y) > 0.0 ? lo : hi) = mid;
            }
            double b = p.cut_angle_deg * kDeg - twist_angle(p, lo);
            cut.polyline.push_back(centroid() + Minv() * Vec2(lo * std::cos(b), lo * std::sin(b)));
            break;
        }
        cut.polyline.push_back(x);
    }
    m.cuts_ = {cut};
    return m;
}

MultiSection MultiSection::build_tangent_multisection(const TangentParams& p) {
    if (!(p.epsilon > 0.0))
        throw DomainError("epsilon must be positive: with no edge perturbation the edge intersections are clean");
    if (!(p.local_model_radius > 0.0 && p.local_model_radius < p.blend_outer))
        throw DomainError("local_model_radius must be positive and below the blend radius");
    MultiSection m = tangent_unchecked(p);
    for (int k : {1, 2}) {
        MultiSection line = line_bundle_section(k);
        if (has_interior_intersection(line, m, 200) || has_interior_intersection(m, line, 200))
            throw DomainError("perturbation creates interior intersections with the degree " +
                              std::to_string(k) + " section");
    }
    return m;
}

MultiSection MultiSection::dualize() const {
    MultiSection m = *this;
    if (kind_ == Kind::Line)
        m.k_ = -k_;
    else
        m.sign_ = -sign_;
    return m;
}

double MultiSection::cut_offset(const Vec2& x) const {
    if (kind_ == Kind::Line) return 180.0;
    JVec t = twist(params_, {Jet(x[0]), Jet(x[1])});
    Vec2 e = M() * Vec2(t.a.v, t.b.v) - Ec();
    return wrap_deg(std::atan2(e[1], e[0]) / kDeg - params_.cut_angle_deg);
}

bool MultiSection::crosses_cut(const Vec2& a, const Vec2& b) const {
    if (kind_ == Kind::Line) return false;
    double oa = cut_offset(a), ob = cut_offset(b);
    return (oa <= 0.0) != (ob <= 0.0) && std::abs(oa) < 90.0 && std::abs(ob) < 90.0;
}

Vec2 MultiSection::patch_coordinate(const Vec2& x) const { return patch_coordinate_impl(params_, x); }

Vec2 MultiSection::patch_point(double r, double theta) const {
    // exact inverse of the patch chart
    double a = theta - params_.patch_rotation_deg * kDeg;
    Vec2 z(r * std::cos(a), r * std::sin(a));
    Vec2 xi = Hc().inverse() * (Minv() * z) / kSqrt3;
    return legendre(xi);
}

AtomJet MultiSection::tangent_atoms(int sheet, const Vec2& x) const {
    const TangentParams& p = params_;
    AtomJet out;
    JVec X{Jet::variable(x[0], 0), Jet::variable(x[1], 1)};
    bool interior = min_slack(x) > 1e-3;
    double rE = (M() * x - Ec()).norm();
    double patch_r = interior ? patch_coordinate_impl(p, x).norm() : 1e300;
    double u = interior ? -0.25 * (std::log(1.0 - x[0] - x[1]) + std::log(x[0]) + std::log(x[1])) - kFlatMean : 1e300;
    double u1 = flat_lower(p), u2 = flat_upper(p);
    bool nonlinear = interior && (rE < p.twist_outer || patch_r < p.blend_outer || u < u2);

    if (!nonlinear) {
        Jet phi = lifted_angle(p, X, sheet);
        JVec pq = hexagon(p, phi);
        const Jet &P = pq.a, &Q = pq.b;
        out.coef[kLogX0] = -0.25 * Q - 0.25;
        out.coef[kLogX1] = 0.25 * (Q - P) - 0.25;
        out.coef[kLogX2] = 0.25 * P - 0.25;
        out.coef[kLogX01] = 0.25 * P;
        out.coef[kLogX12] = -0.25 * Q;
        out.coef[kLogX20] = 0.25 * (Q - P);
        auto h = homogeneous_jets(X);
        Jet k0 = edge_term(p, h, 0), k1 = edge_term(p, h, 1), k2 = edge_term(p, h, 2);
        // beyond the flattened region the mean is -(1/4) sum log x_k - (u1 + u2) / 2
        out.rest = P * (k1 - k2) + Q * (k0 - k1) - 0.5 * (u1 + u2);
        return out;
    }

    if (patch_r < 1e-13) {
        out.rest = Jet(kFlatMean);
        out.degenerate = true;
        return out;
    }

    // Interior: the whole potential is carried by the remainder.
    JVec T = twist(p, X);
    auto ht = homogeneous_jets(T);
    Jet L0 = log(ht[0]), L1 = log(ht[1]), L2 = log(ht[2]);
    Jet L01 = log(ht[0] + ht[1]), L12 = log(ht[1] + ht[2]), L20 = log(ht[2] + ht[0]);
    Jet d0 = 0.25 * (L2 + L01 - L1 - L20);
    Jet d2 = 0.25 * (L1 + L20 - L0 - L12);
    Jet k0 = edge_term(p, ht, 0), k1 = edge_term(p, ht, 1), k2 = edge_term(p, ht, 2);
    Jet e0 = d0 + k1 - k2, e2 = d2 + k0 - k1;
    Jet phi = lifted_angle(p, T, sheet);

    // patch chart on the untwisted point
    auto h = homogeneous_jets(X);
    Jet xi1 = 0.5 * log(h[1] / h[0]), xi2 = 0.5 * log(h[2] / h[0]);
    JVec z = mul(kSqrt3 * (M() * Hc()), JVec{xi1, xi2});
    double cr = std::cos(p.patch_rotation_deg * kDeg), sr = std::sin(p.patch_rotation_deg * kDeg);
    JVec zeta{cr * z.a - sr * z.b, sr * z.a + cr * z.b};
    Jet r = sqrt(zeta.a * zeta.a + zeta.b * zeta.b);
    Jet chi = 1.0 - smoothstep((r - p.local_model_radius) / (p.blend_outer - p.local_model_radius));

    Jet D;
    if (chi.v < 1.0 || !chi.constant()) {
        JVec pq = hexagon(p, phi);
        D = (1.0 - chi) * (pq.a * e0 + pq.b * e2);
    }
    if (chi.v > 0.0) {
        Jet alpha = atan2(zeta.b, zeta.a);
        double ph = phi.v * kDeg;
        double d = std::fmod(alpha.v - ph + kPi, 2.0 * kPi);
        if (d < 0) d += 2.0 * kPi;
        Jet lifted = alpha + (ph + d - kPi - alpha.v);
        D += chi * (p.patch_amplitude * 2.0 / 3.0) * pow(r, 1.5) * cos(1.5 * lifted);
    }

    Jet Sg = -0.25 * (log(h[0]) + log(h[1]) + log(h[2]));
    Jet G = (u2 - u1) * smoothstep_integral((Sg - kFlatMean - u1) / (u2 - u1));
    out.rest = kFlatMean + G + D;
    return out;
}

AtomJet MultiSection::atoms(int sheet, const Vec2& x, const Vec2* ref) const {
    AtomJet out;
    if (kind_ == Kind::Line) {
        out.coef[kLogX0] = Jet(-0.5 * k_);
        return out;
    }
    if (ref && crosses_cut(*ref, x)) sheet = 1 - sheet;
    out = tangent_atoms(sheet, x);
    if (sign_ < 0) out = -out;
    return out;
}

double MultiSection::patch_angle(const Vec2& x) const {
    Vec2 z = patch_coordinate(x);
    double a = std::atan2(z[1], z[0]);
    return a < 0.0 ? a + 2.0 * kPi : a;
}

Vec2 MultiSection::patch_fiber(int sheet, const Vec2& x) const {
    // zeta = A xi, so grad_zeta f = A^{-T} grad_xi f
    double c = std::cos(params_.patch_rotation_deg * kDeg), s = std::sin(params_.patch_rotation_deg * kDeg);
    Mat2 R;
    R << c, -s, s, c;
    Mat2 A = kSqrt3 * R * M() * Hc();
    Vec2 y = sheet_eval(sheet, x).fiber;
    return A.transpose().inverse() * y / (params_.patch_amplitude * sign_);
}

double local_model_residual(const MultiSection& m, int n) {
    if (m.kind() != MultiSection::Kind::Tangent) return 0.0;
    double worst = 0.0;
    const double rmax = 0.95 * m.params().local_model_radius;
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < n; ++j) {
            double r = rmax * i / n, theta = 2.0 * kPi * (j + 0.5) / n;
            Vec2 x = m.patch_point(r, theta);
            Vec2 z = m.patch_coordinate(x);
            Vec2 e = m.patch_fiber(0, x);
            std::complex<double> eta(e[0], e[1]), zeta(z[0], z[1]);
            worst = std::max(worst, std::abs(eta * eta - std::conj(zeta)));
        }
    return worst;
}

double fiber_consistency_error(const MultiSection& m, int samples, std::uint64_t seed, double h) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < samples;) {
        Vec2 x(unit(rng), unit(rng));
        if (min_slack(x) < 0.02) continue;
        if (m.kind() == MultiSection::Kind::Tangent && m.patch_radius(x) < 0.02) continue;
        ++n;
        Vec2 xi = legendre_inverse(x);
        for (int s = 0; s < m.degree(); ++s) {
            Vec2 y = m.sheet_eval(s, x).fiber;
            Vec2 fd;
            for (int i = 0; i < 2; ++i) {
                Vec2 e = Vec2::Zero();
                e[i] = h;
                double fp = m.sheet_eval(s, legendre(xi + e), &x).value;
                double fm = m.sheet_eval(s, legendre(xi - e), &x).value;
                fd[i] = (fp - fm) / (2.0 * h);
            }
            worst = std::max(worst, (y - fd).norm() / std::max(1.0, y.norm()));
        }
    }
    return worst;
}

SheetValue MultiSection::sheet_eval(int sheet, const Vec2& x, const Vec2* ref) const {
    PotentialValue v = evaluate(atoms(sheet, x, ref), x);
    return {v.value, v.fiber, v.degenerate};
}

}  // namespace mvm
