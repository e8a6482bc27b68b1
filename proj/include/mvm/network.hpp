#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mvm/geom.hpp"
#include "mvm/lagrangian.hpp"

namespace mvm {

// Sheet labels of a line: the source sheet lives on the first object, the target sheet
// on the second.
struct Labels {
    int source = 0;
    int target = 0;
    bool operator==(const Labels&) const = default;
};

// Fiber-difference field y_to - y_from - lift in moment coordinates, together with the
// lifted difference potential h = f_to - f_from - <lift, xi>.
class PairField {
public:
    PairField(const MultiSection& from, const MultiSection& to, std::array<int, 2> lift);

    PotentialValue eval(const Labels& l, const Vec2& x, const Vec2* ref = nullptr) const;
    // Labels carried across the cuts met along the segment a -> b.
    Labels transport(const Labels& l, const Vec2& a, const Vec2& b) const;

    const MultiSection& from() const { return *from_; }
    const MultiSection& to() const { return *to_; }
    const std::array<int, 2>& lift() const { return lift_; }

private:
    const MultiSection* from_;
    const MultiSection* to_;
    std::array<int, 2> lift_;
    AtomJet lift_atoms_;
};

// Squared metric norm of a fiber-difference vector: F^T H^{-1} F, restricted to the facet
// tangent on the boundary.
double metric_norm2(const Vec2& F, const Vec2& x);

struct Wall {
    // An (alpha beta)-wall flows along grad(f^alpha - f^beta); labels[i] is the pair in force
    // on the segment ending at points[i].
    std::array<int, 2> sheet_pair;
    std::vector<Vec2> points;
    std::vector<std::array<int, 2>> labels;
    int origin_branch = -1;  // branch point index, or -1 for a collision-spawned wall
    int origin_collision = -1;
    bool truncated = false;
    Vec2 terminal = Vec2::Zero();
    double germ_angle = 0.0;  // patch angle of the initial direction
};

struct SpectralNetwork {
    std::vector<Wall> walls;
    std::vector<std::string> generation_log;
    bool cap_hit = false;
};

// A wall seen by a line: which object it belongs to (0 source, 1 target) and its geometry.
struct WallRef {
    const Wall* wall;
    int object;
    int index;
};

struct TraceOptions {
    double direction = 1.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double event_tol = 1e-8;
    double initial_step = 1e-4;
    double max_segment = 2e-3;
    int max_steps = 400000;
    double max_time = 1e5;
    double stop_speed = 1e-11;
    // Stop once the facet slack drops below this value (disabled when negative).
    double boundary_stop = -1.0;
    std::vector<Vec2> stop_points;
    double stop_radius = 1e-9;
    std::vector<WallRef> walls;
    // Walls whose crossings with the first segment from the start are ignored.
    int skip_wall_at_start = -1;
    // Lines converging to this branch point do not interact with its walls.
    int ignore_branch = -1;
};

enum class StopReason { Boundary, Converged, StopPoint, WallEvent, Budget, Degenerate, Invalid };
std::string to_string(StopReason r);

struct CutCrossing {
    int object;
    int point_index;
    Vec2 where;
};

struct WallHit {
    int wall_list_index;  // index into TraceOptions::walls
    int segment;          // wall polyline segment
    Vec2 where;
    std::array<int, 2> wall_label;
};

struct TraceResult {
    std::vector<Vec2> points;
    std::vector<Labels> labels;  // labels in force at each point
    std::vector<CutCrossing> cuts;
    std::optional<WallHit> hit;
    StopReason stop = StopReason::Budget;
    double quadrature = 0.0;  // integral of dh along the trace, h(end) - h(start)
    double time = 0.0;
    Labels final_labels;
};

TraceResult trace_flow(const PairField& field, Labels labels, const Vec2& start, const TraceOptions& opt);

struct NetworkOptions {
    double germ_radius = 1e-6;  // patch radius of the first wall point
    TraceOptions trace;
    int generation_cap = 8;
};

SpectralNetwork build_network(const MultiSection& m, const NetworkOptions& opt = {});

struct WellBehavedReport {
    bool ok = true;
    std::vector<std::string> reasons;
};
WellBehavedReport is_well_behaved(const SpectralNetwork& n, const MultiSection& m, double terminal_tol = 1e-3);

// Angular structure of a network at its branch points, in patch angles. The sheet difference
// near a branch point is proportional to r^{3/2} cos(3 theta / 2) up to sign, so its zeros sit at
// pi/3, pi, 5pi/3 and the invariant rays, where the walls start, at 0, 2pi/3, 4pi/3.
struct GermReport {
    std::vector<double> wall_angles;      // each branch wall where it crosses the probe radius
    std::vector<double> zero_angles;      // zeros of the sheet difference on the sample circle
    std::vector<double> extremum_angles;  // maxima of its absolute value on the sample circle
    double wall_deviation = 0.0;          // worst distance to the nearest invariant ray
    double zero_deviation = 0.0;
    double extremum_deviation = 0.0;
    bool ok = false;
};
GermReport germ_report(const SpectralNetwork& n, const MultiSection& m, double probe_radius = 1e-4,
                       double circle_radius = 1e-3, double tol = 1e-3);

// Segment intersection parameters (s on p0->p1, t on q0->q1) when the segments cross.
std::optional<std::pair<double, double>> segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0,
                                                              const Vec2& q1);

}  // namespace mvm
