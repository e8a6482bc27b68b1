#include "mvm/report.hpp"

#include <cstdio>
#include <sstream>

namespace mvm::report {

json vec(const Vec2& x) { return json::array({x[0], x[1]}); }

namespace {

json lift(const std::array<int, 2>& l) { return json::array({l[0], l[1]}); }
json labels(const Labels& l) { return json::array({l.source, l.target}); }

json polyline(const std::vector<Vec2>& p) {
    json a = json::array();
    for (const Vec2& x : p) a.push_back(vec(x));
    return a;
}

json matrix(const WMatrix& m, const WeightSymbols& w) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols; ++j) r.push_back(m(i, j).str(w));
        rows.push_back(r);
    }
    return rows;
}

std::string name_or_null(const Generator* g) { return g ? g->name : std::string(); }

}  // namespace

json generator(const Generator& g) {
    return {{"name", g.name},
            {"kind", to_string(g.kind)},
            {"position", vec(g.position)},
            {"sheets", labels(g.sheets)},
            {"lift", lift(g.lift)},
            {"degree", g.degree},
            {"stable_dim", g.stable_dim},
            {"condition_m", g.condition_m},
            {"face", {{"dim", g.face.dim}, {"index", g.face.index}}},
            {"branch", g.branch}};
}

json hom(const HomSpace& h) {
    json gens = json::array(), rej = json::array();
    for (const Generator& g : h.generators) gens.push_back(generator(g));
    for (const Generator& g : h.rejected) rej.push_back(generator(g));
    return {{"generators", gens},
            {"rejected", rej},
            {"near_degenerate", h.scan.near_degenerate.size()},
            {"lift_box", h.scan.lift_box},
            {"self", h.self}};
}

json network(const SpectralNetwork& n, const MultiSection& m) {
    json walls = json::array();
    for (const Wall& w : n.walls) {
        json lab = json::array();
        for (const auto& l : w.labels) lab.push_back(lift(l));
        walls.push_back({{"label", lift(w.sheet_pair)},
                         {"origin_branch", w.origin_branch},
                         {"origin_collision", w.origin_collision},
                         {"truncated", w.truncated},
                         {"terminal", vec(w.terminal)},
                         {"germ_angle", w.germ_angle},
                         {"segment_labels", lab},
                         {"polyline", polyline(w.points)}});
    }
    json branches = json::array(), cuts = json::array();
    for (const BranchPoint& b : m.branch_points())
        branches.push_back({{"position", vec(b.position)}, {"sheets", lift(b.sheets)}});
    for (const BranchCut& c : m.branch_cuts())
        cuts.push_back({{"branch", c.branch}, {"sheets", lift(c.sheets)}, {"polyline", polyline(c.polyline)}});
    return {{"walls", walls},
            {"branch_points", branches},
            {"cuts", cuts},
            {"generation_log", n.generation_log},
            {"cap_hit", n.cap_hit}};
}

json line(const JaggedLine& l) {
    json events = json::array();
    for (const LineEvent& e : l.events)
        events.push_back({{"point_index", e.point_index},
                          {"object", e.object},
                          {"wall_label", lift(e.wall_label)},
                          {"before", labels(e.before)},
                          {"after", labels(e.after)},
                          {"where", vec(e.where)}});
    json lab = json::array();
    for (const Labels& x : l.labels) lab.push_back(labels(x));
    return {{"from", name_or_null(l.from)},
            {"to", name_or_null(l.to)},
            {"lift", lift(l.lift)},
            {"stop", to_string(l.stop)},
            {"trivial", l.trivial},
            {"jagged", l.jagged()},
            {"weight", l.weight},
            {"traced_weight", l.traced_weight},
            {"quadrature", l.quadrature},
            {"sign", l.sign},
            {"events", events},
            {"labels", lab},
            {"polyline", polyline(l.polyline)}};
}

json tree(const GradientTree& t) {
    return {{"inputs", json::array({name_or_null(t.v12), name_or_null(t.v23)})},
            {"output", name_or_null(t.v13)},
            {"vertex", vec(t.vertex)},
            {"middle_sheet", t.middle_sheet},
            {"weight", t.weight},
            {"traced_weight", t.traced_weight},
            {"quadrature", t.quadrature},
            {"sign", t.sign},
            {"jagged", t.jagged()},
            {"edges", json::array({line(t.inputs[0]), line(t.inputs[1])})}};
}

json weights(const WeightSymbols& w) {
    json a = json::array();
    for (size_t i = 0; i < w.names.size(); ++i) a.push_back({{"name", w.names[i]}, {"value", w.values[i]}});
    return a;
}

json complex(const HomComplex& c, const WeightSymbols& w) {
    json gens = json::object(), diff = json::object(), terms = json::array();
    for (const auto& [d, list] : c.generators) {
        json names = json::array();
        for (const Generator* g : list) names.push_back(g->name);
        gens[std::to_string(d)] = names;
    }
    for (const auto& [d, m] : c.differential) diff[std::to_string(d)] = matrix(m, w);
    for (const M1Term& t : c.terms)
        terms.push_back({{"source", t.source->name},
                         {"target", t.target->name},
                         {"sign", t.sign},
                         {"symbol", t.symbol < 0 ? std::string() : w.names[t.symbol]},
                         {"weight", t.weight}});
    return {{"from", c.from},
            {"to", c.to},
            {"generators", gens},
            {"differential", diff},
            {"terms", terms},
            {"squares_to_zero", differential_squares_to_zero(c)}};
}

json cohomology(const Cohomology& c) {
    json dims = json::object(), reps = json::object(), ranks = json::object();
    for (const auto& [d, n] : c.dims) dims[std::to_string(d)] = n;
    for (const auto& [d, r] : c.representatives) reps[std::to_string(d)] = r;
    for (const auto& [d, r] : c.ranks) ranks[std::to_string(d)] = r;
    return {{"dims", dims}, {"representatives", reps}, {"ranks", ranks}};
}

json m2(const StructureConstantTable& t, const WeightSymbols& w) {
    json entries = json::array();
    for (const StructureEntry& e : t.entries)
        entries.push_back({{"first", e.first->name},
                           {"second", e.second->name},
                           {"output", e.output->name},
                           {"sign", e.sign},
                           {"symbol", w.names[e.symbol]},
                           {"weight", e.weight}});
    return {{"entries", entries}, {"max_cluster_spread", t.max_cluster_spread}};
}

json functor(const FunctorCheck& f, const WeightSymbols& w) {
    json assignment = json::object(), rows = json::array();
    for (const auto& [g, m] : f.assignment) assignment[g] = matrix(m, w);
    for (const FunctorRow& r : f.rows)
        rows.push_back({{"first", r.first},
                        {"second", r.second},
                        {"transported", matrix(r.transported, w)},
                        {"composed", matrix(r.composed, w)},
                        {"ok", r.ok}});
    return {{"assignment", assignment},
            {"rows", rows},
            {"degree_zero", f.degree_zero},
            {"bijective", f.bijective},
            {"ok", f.ok},
            {"failures", f.failures}};
}

json tangent_basis(const TangentBasis& b, const WeightSymbols& w) {
    json basis = json::array();
    for (const BasisElement& e : b.basis) {
        json coef = json::object();
        for (const auto& [g, c] : e.coefficients) coef[g] = c.str(w);
        basis.push_back({{"label", e.label}, {"coefficients", coef}});
    }
    return {{"basis", basis},
            {"h0", b.h0},
            {"h1", b.h1},
            {"m1_rank", b.m1_rank},
            {"degree0_generators", b.degree0_generators},
            {"degree1_generators", b.degree1_generators},
            {"in_kernel", b.in_kernel},
            {"independent", b.independent},
            {"h0_without_formal", b.h0_without_formal}};
}

json correspondence(const SectionCorrespondence& s) {
    json rows = json::array(), weighted = json::array();
    for (const CorrespondenceRow& r : s.rows) rows.push_back(r.str());
    for (const CorrespondenceRow& r : s.weighted_generators) weighted.push_back(r.str());
    return {{"rows", rows}, {"weighted_generators", weighted}, {"isomorphism", s.isomorphism}};
}

json bside_tables() {
    using namespace bside;
    json comp = json::array();
    for (const CompositionEntry& e : composition_table(exceptional_maps()))
        comp.push_back({{"g", e.g + 1}, {"f", e.f + 1}, {"value", e.value.str()}});
    auto sections = [](const ParliamentResult& p) {
        json s = json::array();
        for (const LatticeSection& x : p.sections) s.push_back(x.str());
        return json{{"sections", s}, {"relations", p.relations.size()}, {"h0", p.h0}, {"h1", p.h1}};
    };
    EulerReport e = euler_check();
    return {{"composition", comp},
            {"tangent", sections(parliament_sections(Bundle::Tangent))},
            {"cotangent", sections(parliament_sections(Bundle::Cotangent))},
            {"euler", {{"o1", e.o1}, {"o0", e.o0}, {"o2", e.o2}, {"tangent", e.tangent}, {"ok", e.ok}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

Vec2 screen(const Vec2& x) { return {50.0 + 900.0 * x[0], 950.0 - 900.0 * x[1]}; }

std::string path_data(const std::vector<Vec2>& p, bool close = false) {
    std::ostringstream os;
    char buf[64];
    for (size_t i = 0; i < p.size(); ++i) {
        Vec2 s = screen(p[i]);
        std::snprintf(buf, sizeof buf, "%s%.3f %.3f", i ? " L" : "M", s[0], s[1]);
        os << buf;
    }
    if (close) os << " Z";
    return os.str();
}

const char* kWallColors[] = {"#c0392b", "#2471a3", "#239b56", "#7d3c98"};

void header(std::ostringstream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    os << "<path d=\"" << path_data({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, true)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
}

}  // namespace

std::string svg_network(const SpectralNetwork& n, const MultiSection& m) {
    std::ostringstream os;
    header(os);
    for (const BranchCut& c : m.branch_cuts()) {
        os << "<polyline points=\"";
        for (size_t i = 0; i < c.polyline.size(); ++i) {
            Vec2 s = screen(c.polyline[i]);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", s[0], s[1]);
            os << buf;
        }
        os << "\" fill=\"none\" stroke=\"gray\" stroke-width=\"1.5\" stroke-dasharray=\"8 6\"/>\n";
    }
    for (size_t i = 0; i < n.walls.size(); ++i) {
        const Wall& w = n.walls[i];
        os << "<path d=\"" << path_data(w.points) << "\" fill=\"none\" stroke=\"" << kWallColors[i % 4]
           << "\" stroke-width=\"2\"><title>(" << w.sheet_pair[0] + 1 << w.sheet_pair[1] + 1 << ")</title></path>\n";
    }
    for (const BranchPoint& b : m.branch_points()) {
        Vec2 s = screen(b.position);
        char buf[96];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"5\" fill=\"black\"/>\n", s[0], s[1]);
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_trees(const StructureConstantTable& t) {
    std::ostringstream os;
    header(os);
    for (size_t i = 0; i < t.entries.size(); ++i) {
        const GradientTree& tr = t.entries[i].tree;
        for (const JaggedLine& l : tr.inputs)
            os << "<path d=\"" << path_data(l.polyline) << "\" fill=\"none\" stroke=\"" << kWallColors[i % 4]
               << "\" stroke-width=\"1.5\"/>\n";
        Vec2 s = screen(tr.vertex);
        char buf[96];
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"4\" fill=\"black\"/>\n", s[0], s[1]);
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mvm::report
