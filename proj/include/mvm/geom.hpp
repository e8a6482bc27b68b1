#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Fan {
    std::vector<std::array<int, 2>> rays;
    std::vector<std::pair<int, int>> maximal_cones;

    static Fan projective_plane();
    // Pairwise non-parallel rays and cones that sweep the full angle exactly once.
    bool is_complete() const;
};

// Facet inequality <normal, x> >= offset.
struct Facet {
    std::array<int, 2> normal;
    double offset;
    double slack(const Vec2& x) const { return normal[0] * x[0] + normal[1] * x[1] - offset; }
};

struct MomentPolytope {
    std::vector<Vec2> vertices;
    std::vector<Facet> facets;

    static MomentPolytope projective_plane();
    bool contains(const Vec2& x, double tol = 0.0) const;
};

// Facet k of the triangle is {x_k = 0} with x_0 = 1 - x^1 - x^2.
inline double homogeneous(const Vec2& x, int k) {
    return k == 0 ? 1.0 - x[0] - x[1] : x[k - 1];
}
inline double min_slack(const Vec2& x) {
    return std::min({1.0 - x[0] - x[1], x[0], x[1]});
}

// Minimal face of P containing x: dimension 0 (vertex), 1 (facet) or 2 (interior).
struct Face {
    int dim = 2;
    int index = -1;  // vertex index or facet index, -1 for the interior
    Vec2 tangent = Vec2::Zero();  // unit direction along a facet
};
Face minimal_face(const Vec2& x, double tol);

inline constexpr double kBoundaryTol = 1e-9;

Vec2 legendre(const Vec2& xi);
Vec2 legendre_inverse(const Vec2& x);
double psi(const Vec2& xi);
Mat2 metric_upper(const Vec2& xi);
// Hessian of psi expressed in moment coordinates: 2(diag x - x x^T).
Mat2 metric_in_x(const Vec2& x);

}  // namespace mvm
