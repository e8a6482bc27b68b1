#include "mvm/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mvm {

Fan Fan::projective_plane() {
    Fan f;
    f.rays = {{{1, 0}}, {{0, 1}}, {{-1, -1}}};
    f.maximal_cones = {{0, 1}, {1, 2}, {2, 0}};
    return f;
}

bool Fan::is_complete() const {
    for (size_t i = 0; i < rays.size(); ++i)
        for (size_t j = i + 1; j < rays.size(); ++j)
            if (rays[i][0] * rays[j][1] - rays[i][1] * rays[j][0] == 0 &&
                rays[i][0] * rays[j][0] + rays[i][1] * rays[j][1] > 0)
                return false;
    // Each cone is strictly convex and counterclockwise; the swept angles add to a full turn.
    double total = 0.0;
    for (auto [a, b] : maximal_cones) {
        double cross = rays[a][0] * rays[b][1] - rays[a][1] * rays[b][0];
        if (cross <= 0) return false;
        double dot = rays[a][0] * rays[b][0] + rays[a][1] * rays[b][1];
        total += std::atan2(cross, dot);
    }
    return std::abs(total - 2.0 * std::numbers::pi) < 1e-12;
}

MomentPolytope MomentPolytope::projective_plane() {
    MomentPolytope p;
    p.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    // facet k is {x_k = 0}
    p.facets = {Facet{{{-1, -1}}, -1.0}, Facet{{{1, 0}}, 0.0}, Facet{{{0, 1}}, 0.0}};
    return p;
}

bool MomentPolytope::contains(const Vec2& x, double tol) const {
    return std::all_of(facets.begin(), facets.end(),
                       [&](const Facet& f) { return f.slack(x) >= -tol; });
}

Face minimal_face(const Vec2& x, double tol) {
    std::array<bool, 3> on{};
    int count = 0;
    for (int k = 0; k < 3; ++k) {
        on[k] = std::abs(homogeneous(x, k)) < tol;
        count += on[k];
    }
    Face face;
    if (count == 0) return face;
    if (count >= 2) {
        face.dim = 0;
        for (int k = 0; k < 3; ++k)
            if (!on[k]) face.index = k;  // vertex k is opposite the facet it avoids
        return face;
    }
    face.dim = 1;
    for (int k = 0; k < 3; ++k)
        if (on[k]) face.index = k;
    static const std::array<Vec2, 3> tangents = {Vec2(1, -1) / std::sqrt(2.0), Vec2(0, 1),
                                                 Vec2(1, 0)};
    face.tangent = tangents[face.index];
    return face;
}

Vec2 legendre(const Vec2& xi) {
    if (!xi.allFinite()) throw DomainError("legendre: non-finite input");
    double m = std::max({0.0, 2.0 * xi[0], 2.0 * xi[1]});
    double e0 = std::exp(-m), e1 = std::exp(2.0 * xi[0] - m), e2 = std::exp(2.0 * xi[1] - m);
    double d = e0 + e1 + e2;
    return Vec2(e1 / d, e2 / d);
}

Vec2 legendre_inverse(const Vec2& x) {
    double x0 = 1.0 - x[0] - x[1];
    if (!(x0 > 0.0 && x[0] > 0.0 && x[1] > 0.0))
        throw DomainError("legendre_inverse: point is not in the interior of P");
    return Vec2(0.5 * std::log(x[0] / x0), 0.5 * std::log(x[1] / x0));
}

double psi(const Vec2& xi) {
    double m = std::max({0.0, 2.0 * xi[0], 2.0 * xi[1]});
    return 0.5 * (m + std::log(std::exp(-m) + std::exp(2.0 * xi[0] - m) + std::exp(2.0 * xi[1] - m)));
}

Mat2 metric_in_x(const Vec2& x) {
    Mat2 g;
    g << x[0] * (1.0 - x[0]), -x[0] * x[1], -x[0] * x[1], x[1] * (1.0 - x[1]);
    return 2.0 * g;
}

Mat2 metric_upper(const Vec2& xi) { return metric_in_x(legendre(xi)); }

}  // namespace mvm
