#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mvm/floer.hpp"
#include "mvm/network.hpp"

namespace mvm {

// Orientation of each generator's unstable manifold, keyed by generator name; default +1.
struct OrientationData {
    std::map<std::string, int> sign;
    int of(const Generator& g) const {
        auto it = sign.find(g.name);
        return it == sign.end() ? 1 : it->second;
    }
};

// Everything a line of Hom(from, to) can interact with.
struct HomContext {
    const MultiSection* from = nullptr;
    const MultiSection* to = nullptr;
    const HomSpace* hom = nullptr;
    const SpectralNetwork* from_network = nullptr;
    const SpectralNetwork* to_network = nullptr;

    // Walls tagged by object: 0 source, 1 target, 2 both (self-hom).
    std::vector<WallRef> walls() const;
};

struct LineEvent {
    int point_index = 0;  // polyline index of the crossing
    int object = 0;
    std::array<int, 2> wall_label{};
    Labels before, after;
    Vec2 where = Vec2::Zero();
    bool switched() const { return !(before == after); }
};

struct JaggedLine {
    const Generator* from = nullptr;
    const Generator* to = nullptr;
    std::array<int, 2> lift{0, 0};
    std::vector<Vec2> polyline;  // in flow order
    std::vector<Labels> labels;  // labels in force at each point
    std::vector<LineEvent> events;
    StopReason stop = StopReason::Budget;
    bool trivial = false;
    double weight = 0.0;      // telescope of the lifted difference potential
    double quadrature = 0.0;  // integral of the squared field norm along the trace
    double traced_weight = 0.0;  // telescope over the integrated part only, the quadrature's reference
    int sign = 1;

    bool jagged() const;
};

struct GradientTree {
    const Generator* v12 = nullptr;
    const Generator* v23 = nullptr;
    const Generator* v13 = nullptr;
    Vec2 vertex = Vec2::Zero();
    int middle_sheet = 0;  // sheet of the middle object at the vertex
    std::array<JaggedLine, 2> inputs;
    double weight = 0.0;
    double quadrature = 0.0;
    double traced_weight = 0.0;
    int sign = 1;

    bool jagged() const { return inputs[0].jagged() || inputs[1].jagged(); }
};

struct TreeOptions {
    TraceOptions trace;
    double eigen_offset = 1e-7;  // start offset along stable directions at a zero
    double match_radius = 1e-6;  // endpoint-to-generator distance
    double germ_radius = 1e-6;   // start radius along the rays into a branch point
    int max_events = 16;
};

// Forward relabelling at a wall crossing: a target-object (a b)-wall moves target b to a,
// a source-object (a b)-wall moves source a to b, other labels pass unchanged.
Labels cross_wall(Labels l, int object, const std::array<int, 2>& wall_label);
// Labels before a crossing that produce `after`; empty when no line can carry `after` across.
std::vector<Labels> wall_predecessors(const Labels& after, int object, const std::array<int, 2>& wall_label,
                                      int source_degree, int target_degree);

// Forward trace with deterministic relabelling at every wall event.
JaggedLine trace_jagged(const PairField& field, Labels labels, const Vec2& start, const std::vector<WallRef>& walls,
                        const TreeOptions& opt = {});

// All jagged lines of the field ending at `end` (traced in reverse), one per consistent
// choice of relabelling at the wall events met on the way back.
std::vector<JaggedLine> lines_into(const PairField& field, Labels labels_at_end, const Vec2& end,
                                   const std::vector<WallRef>& walls, const TreeOptions& opt = {},
                                   int ignore_branch = -1);

// Lifted difference potential along a line, summed per label segment.
double telescope_weight(const JaggedLine& line, const PairField& field);
// True when each event's labels follow from the previous ones by the crossing rule.
bool replay_events(const JaggedLine& line);

struct M1Entry {
    const Generator* target;
    int sign;
    double weight;
    JaggedLine line;
};

// Lines into every degree-(|p|+1) generator with the lift of p, grouped by source.
std::vector<M1Entry> enumerate_m1(const Generator& p, const HomContext& ctx, const OrientationData& o,
                                  const TreeOptions& opt = {});
// All lines of the hom complex into q.
std::vector<JaggedLine> incoming_lines(const Generator& q, const HomContext& ctx, const OrientationData& o,
                                       const TreeOptions& opt = {});

struct M2Entry {
    const Generator* output;
    int sign;
    double weight;
    GradientTree tree;
};

// Trivalent trees from (v12, v23) to outputs of Hom(A, C); the output must be a source of its field.
std::vector<M2Entry> enumerate_m2(const Generator& v12, const Generator& v23, const HomContext& c12,
                                  const HomContext& c23, const HomContext& c13, const OrientationData& o,
                                  const TreeOptions& opt = {});

}  // namespace mvm
