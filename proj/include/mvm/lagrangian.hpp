#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvm/geom.hpp"
#include "mvm/jet.hpp"

namespace mvm {

// Logarithmic atoms of the potentials, in the order
// log x0, log x1, log x2, log(x0+x1), log(x1+x2), log(x2+x0).
enum Atom { kLogX0, kLogX1, kLogX2, kLogX01, kLogX12, kLogX20, kAtomCount };

// A potential written as sum_a c_a(x) log(atom_a(x)) + rest(x). Atoms that vanish on a
// facet carry coefficients that are locally constant there, so differences of potentials
// can be evaluated on the boundary after coefficients are merged.
struct AtomJet {
    std::array<Jet, kAtomCount> coef{};
    Jet rest;
    bool degenerate = false;  // evaluated exactly at a branch point

    AtomJet& operator+=(const AtomJet& o);
    AtomJet& operator-=(const AtomJet& o);
    AtomJet operator-() const;
};
AtomJet operator+(AtomJet a, const AtomJet& b);
AtomJet operator-(AtomJet a, const AtomJet& b);

// xi-linear term i1 xi_1 + i2 xi_2 of a lift, as atoms.
AtomJet lift_atoms(const std::array<int, 2>& lift);

// Value, fiber pair y = H grad_x f and its x-Jacobian.
struct PotentialValue {
    double value = 0.0;
    bool finite = true;
    Vec2 fiber = Vec2::Zero();
    Mat2 jacobian = Mat2::Zero();
    bool degenerate = false;
};
PotentialValue evaluate(const AtomJet& a, const Vec2& x);

struct TangentParams {
    double epsilon = 0.05;             // edge Hamiltonian amplitude
    double local_model_radius = 0.1;   // exact local model for patch radius below this
    double blend_outer = 0.25;         // global sheets beyond this patch radius
    double patch_rotation_deg = -50.0;
    double patch_amplitude = 1.45;
    double cut_angle_deg = 110.0;      // direction of the cut in equilateral coordinates
    double edge_inner = 0.12;          // edge Hamiltonian support in the normal coordinate
    double edge_outer = 0.28;
    double plateau_halfwidth_deg = 30.0;
    double twist_deg = -20.0;
    double twist_inner = 0.06;
    double twist_outer = 0.22;
};

struct BranchPoint {
    Vec2 position;
    std::array<int, 2> sheets;
};

struct BranchCut {
    int branch = 0;
    std::array<int, 2> sheets;
    std::vector<Vec2> polyline;  // from the branch point to the boundary
};

struct LocalModelValue {
    double value;
    Vec2 fiber;
};
// Flat two-sheeted model: f = (2/3) r^{3/2} cos(3 theta / 2); branch 1 is theta + 2 pi.
LocalModelValue local_model_eval(double r, double theta, int branch);

struct SheetValue {
    double value;
    Vec2 fiber;
    bool degenerate;
};

// Lagrangian section or two-sheeted multi-section over the triangle.
class MultiSection {
public:
    enum class Kind { Line, Tangent };

    static MultiSection line_bundle_section(int k);
    // Throws DomainError when the parameters produce extra interior intersections with
    // the sections of degree one and two, or when epsilon is not positive.
    static MultiSection build_tangent_multisection(const TangentParams& p);
    static MultiSection tangent_unchecked(const TangentParams& p);
    MultiSection dualize() const;

    Kind kind() const { return kind_; }
    int degree() const { return kind_ == Kind::Line ? 1 : 2; }
    int line_degree() const { return k_; }
    double orientation() const { return sign_; }
    const TangentParams& params() const { return params_; }
    const std::vector<BranchPoint>& branch_points() const { return branch_points_; }
    const std::vector<BranchCut>& branch_cuts() const { return cuts_; }

    // Potential of a sheet as atoms. Sheets are labelled by the angular convention of the
    // cut; `ref`, when given, selects the label continued from ref without crossing the cut.
    AtomJet atoms(int sheet, const Vec2& x, const Vec2* ref = nullptr) const;
    SheetValue sheet_eval(int sheet, const Vec2& x, const Vec2* ref = nullptr) const;

    // Signed angle (degrees, in (-180, 180]) from the cut ray, after the twist.
    double cut_offset(const Vec2& x) const;
    // True when the straight segment a -> b crosses the cut.
    bool crosses_cut(const Vec2& a, const Vec2& b) const;

    // Patch coordinate of the two-sheeted local model (complex number as a pair).
    Vec2 patch_coordinate(const Vec2& x) const;
    // Inverse to first order: the point at patch radius r and patch angle theta.
    Vec2 patch_point(double r, double theta) const;
    double patch_radius(const Vec2& x) const { return patch_coordinate(x).norm(); }
    double patch_angle(const Vec2& x) const;
    // Gradient of a sheet potential in patch coordinates, divided by the patch amplitude.
    Vec2 patch_fiber(int sheet, const Vec2& x) const;

private:
    AtomJet tangent_atoms(int sheet, const Vec2& x) const;

    Kind kind_ = Kind::Line;
    int k_ = 0;
    double sign_ = 1.0;
    TangentParams params_{};
    std::vector<BranchPoint> branch_points_;
    std::vector<BranchCut> cuts_;
};

// Largest |eta^2 - conj(zeta)| over an n x n polar grid of the exact local model disc, where
// eta is the normalized patch fiber of sheet 0 (eta and zeta as complex numbers).
double local_model_residual(const MultiSection& m, int n);

// Largest |y - D_xi f| / max(1, |y|) over `samples` seeded interior points and every sheet, with
// D_xi f the central difference of the potential in xi (step h) along the continued sheet.
double fiber_consistency_error(const MultiSection& m, int samples, std::uint64_t seed = 7, double h = 1e-5);

// Maps between moment coordinates and equilateral coordinates E = M x.
Mat2 equilateral_matrix();
Vec2 centroid();

}  // namespace mvm
