#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace mvm {

// Second-order forward jet in two variables: value, gradient and Hessian.
struct Jet {
    double v = 0.0;
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();

    Jet() = default;
    Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
    Jet(double value, const Eigen::Vector2d& grad, const Eigen::Matrix2d& hess)
        : v(value), g(grad), h(hess) {}

    static Jet variable(double value, int index) {
        Jet j(value);
        j.g[index] = 1.0;
        return j;
    }

    bool constant() const { return g.isZero(0.0) && h.isZero(0.0); }
};

// Composition with a scalar function given f, f', f'' at u.v.
inline Jet chain(const Jet& u, double f0, double f1, double f2) {
    return Jet(f0, f1 * u.g, f2 * u.g * u.g.transpose() + f1 * u.h);
}

inline Jet operator+(const Jet& a, const Jet& b) { return Jet(a.v + b.v, a.g + b.g, a.h + b.h); }
inline Jet operator-(const Jet& a, const Jet& b) { return Jet(a.v - b.v, a.g - b.g, a.h - b.h); }
inline Jet operator-(const Jet& a) { return Jet(-a.v, -a.g, -a.h); }
inline Jet operator*(const Jet& a, const Jet& b) {
    Eigen::Matrix2d cross = a.g * b.g.transpose();
    return Jet(a.v * b.v, a.v * b.g + b.v * a.g, a.v * b.h + b.v * a.h + cross + cross.transpose());
}
inline Jet operator*(double s, const Jet& a) { return Jet(s * a.v, s * a.g, s * a.h); }
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator+(const Jet& a, double s) { return Jet(a.v + s, a.g, a.h); }
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return Jet(a.v - s, a.g, a.h); }
inline Jet operator-(double s, const Jet& a) { return Jet(s - a.v, -a.g, -a.h); }

inline Jet inv(const Jet& a) {
    double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * inv(b); }
inline Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
inline Jet operator/(double s, const Jet& a) { return s * inv(a); }

inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }

inline Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet exp(const Jet& a) {
    double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet sqrt(const Jet& a) {
    double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, double p) {
    double base = std::pow(a.v, p - 2.0);
    return chain(a, base * a.v * a.v, p * base * a.v, p * (p - 1.0) * base);
}
inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

// atan2(y, x) in radians.
inline Jet atan2(const Jet& y, const Jet& x) {
    double r2 = x.v * x.v + y.v * y.v;
    Eigen::Vector2d dy(x.v / r2, -y.v / r2);  // partials w.r.t. (y, x)
    double r4 = r2 * r2;
    double dyy = -2.0 * x.v * y.v / r4;
    double dxx = 2.0 * x.v * y.v / r4;
    double dxy = (y.v * y.v - x.v * x.v) / r4;
    Eigen::Matrix2d cross = y.g * x.g.transpose();
    Eigen::Matrix2d h = dy[0] * y.h + dy[1] * x.h + dyy * y.g * y.g.transpose() +
                        dxx * x.g * x.g.transpose() + dxy * (cross + cross.transpose());
    return Jet(std::atan2(y.v, x.v), dy[0] * y.g + dy[1] * x.g, h);
}

// Quintic smoothstep clamped to [0, 1]; C2 at both ends.
inline Jet smoothstep(const Jet& t) {
    if (t.v <= 0.0) return Jet(0.0);
    if (t.v >= 1.0) return Jet(1.0);
    double s = t.v;
    double f0 = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    double f1 = 30.0 * s * s * (1.0 - s) * (1.0 - s);
    double f2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    return chain(t, f0, f1, f2);
}

// Antiderivative of smoothstep normalised to vanish at 0; continued linearly past 1.
inline Jet smoothstep_integral(const Jet& t) {
    if (t.v <= 0.0) return Jet(0.0);
    if (t.v >= 1.0) return t - 0.5;
    double s = t.v;
    double f0 = s * s * s * s * (2.5 - 3.0 * s + s * s);
    double f1 = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    double f2 = 30.0 * s * s * (1.0 - s) * (1.0 - s);
    return chain(t, f0, f1, f2);
}

inline double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

}  // namespace mvm
