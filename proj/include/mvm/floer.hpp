#pragma once

#include <array>
#include <string>
#include <vector>

#include "mvm/geom.hpp"
#include "mvm/lagrangian.hpp"
#include "mvm/network.hpp"

namespace mvm {

// Positive-dimensional intersection along a facet; a transverse perturbation is required.
struct CleanIntersection : DomainError {
    using DomainError::DomainError;
};

enum class GeneratorKind { Regular, BranchFormal, FundamentalClass };
std::string to_string(GeneratorKind k);

struct Generator {
    std::string name;
    GeneratorKind kind = GeneratorKind::Regular;
    Vec2 position = Vec2::Zero();
    Labels sheets;                    // source sheet on the first object, target sheet on the second
    std::array<int, 2> lift{0, 0};
    int degree = 0;
    int stable_dim = 0;
    bool condition_m = true;
    Face face;
    Mat2 jacobian = Mat2::Zero();
    int branch = -1;                  // branch point index for formal generators
};

struct ScanOptions {
    int grid = 400;            // interior triangulation resolution
    int facet_samples = 4000;  // samples per facet
    int lift_grid = 100;       // resolution of the lift box estimate
    double newton_tol = 1e-12;
    int newton_iterations = 50;
    double dedup_radius = 1e-7;
    double branch_exclusion = 1e-5;
    double singular_tol = 1e-8;  // smallest Jacobian singular value of an accepted root
};

// Zeros of y_to - y_from - lift together with their sheet labels and lift.
struct CriticalPoint {
    Vec2 position;
    Labels sheets;
    std::array<int, 2> lift;
    Mat2 jacobian;
    Face face;
    double min_singular = 0.0;
};

struct CriticalScan {
    std::vector<CriticalPoint> points;
    std::vector<CriticalPoint> near_degenerate;  // rejected: Jacobian nearly singular
    std::array<int, 4> lift_box{};               // i1 min, i1 max, i2 min, i2 max
};

// True for objects with the same kind, degree, orientation and parameters.
bool same_object(const MultiSection& a, const MultiSection& b);

CriticalScan find_critical_points(const MultiSection& from, const MultiSection& to, const ScanOptions& opt = {});

// Interior zeros of any sheet-pair difference field other than the branch points, on an n-grid.
bool has_interior_intersection(const MultiSection& from, const MultiSection& to, int n);

struct ConditionM {
    bool ok = true;
    int stable_dim = 0;
    bool complex_eigenvalues = false;
};
// Linearized admissibility: the stable eigenspace must lie in the tangent space of the minimal face.
ConditionM condition_m(const Vec2& x, const Mat2& jacobian);

struct HomSpace {
    std::vector<Generator> generators;
    std::vector<Generator> rejected;  // fail admissibility
    CriticalScan scan;
    bool self = false;

    std::vector<const Generator*> of_degree(int d) const;
};

HomSpace hom_space(const MultiSection& from, const MultiSection& to, const ScanOptions& opt = {});

}  // namespace mvm
