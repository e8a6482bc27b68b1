#include "mvm/pipeline.hpp"

#include <random>
#include <set>

namespace mvm {

using nlohmann::json;

namespace {

const std::map<std::string, ObjectSpec::Kind> kKindNames = {
    {"line_bundle_section", ObjectSpec::Kind::LineBundleSection},
    {"tangent_multisection", ObjectSpec::Kind::TangentMultisection},
    {"cotangent_multisection", ObjectSpec::Kind::CotangentMultisection}};

std::string kind_name(ObjectSpec::Kind k) {
    for (const auto& [n, v] : kKindNames)
        if (v == k) return n;
    return "?";
}

// Tangent parameter fields addressable from the config.
std::vector<std::pair<const char*, double TangentParams::*>> tangent_fields() {
    return {{"epsilon", &TangentParams::epsilon},
            {"local_model_radius", &TangentParams::local_model_radius},
            {"blend_outer", &TangentParams::blend_outer},
            {"patch_rotation_deg", &TangentParams::patch_rotation_deg},
            {"patch_amplitude", &TangentParams::patch_amplitude},
            {"cut_angle_deg", &TangentParams::cut_angle_deg},
            {"edge_inner", &TangentParams::edge_inner},
            {"edge_outer", &TangentParams::edge_outer},
            {"plateau_halfwidth_deg", &TangentParams::plateau_halfwidth_deg},
            {"twist_deg", &TangentParams::twist_deg},
            {"twist_inner", &TangentParams::twist_inner},
            {"twist_outer", &TangentParams::twist_outer}};
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field ") + key + ": " + e.what());
    }
}

}  // namespace

RunConfig RunConfig::standard(double epsilon) {
    RunConfig c;
    for (int k : {0, 1, 2}) {
        ObjectSpec s;
        s.name = "L" + std::to_string(k);
        s.kind = ObjectSpec::Kind::LineBundleSection;
        s.k = k;
        c.objects.push_back(s);
    }
    ObjectSpec t;
    t.name = "T";
    t.kind = ObjectSpec::Kind::TangentMultisection;
    t.tangent.epsilon = epsilon;
    c.objects.push_back(t);
    t.name = "Omega";
    t.kind = ObjectSpec::Kind::CotangentMultisection;
    c.objects.push_back(t);
    c.scan.grid = 200;
    return c;
}

const ObjectSpec* RunConfig::find(const std::string& name) const {
    for (const ObjectSpec& s : objects)
        if (s.name == name) return &s;
    return nullptr;
}

void RunConfig::validate() const {
    std::set<std::string> names;
    for (const ObjectSpec& s : objects) {
        if (s.name.empty()) throw ConfigError("object with an empty name");
        if (!names.insert(s.name).second) throw ConfigError("duplicate object name " + s.name);
        if (s.kind == ObjectSpec::Kind::LineBundleSection) continue;
        if (!(s.tangent.epsilon > 0.0))
            throw ConfigError("object " + s.name +
                              ": epsilon must be positive; without the edge perturbation the edge intersections "
                              "are clean (positive-dimensional)");
        if (!(s.tangent.local_model_radius > 0.0 && s.tangent.local_model_radius < s.tangent.blend_outer))
            throw ConfigError("object " + s.name + ": local_model_radius must lie in (0, blend_outer)");
        if (!(s.tangent.edge_inner > 0.0 && s.tangent.edge_inner < s.tangent.edge_outer))
            throw ConfigError("object " + s.name + ": edge_inner must lie in (0, edge_outer)");
    }
    const TraceOptions& t = trees.trace;
    for (auto [name, v] : {std::pair{"rtol", t.rtol}, {"atol", t.atol}, {"event_tol", t.event_tol},
                           {"max_segment", t.max_segment}, {"initial_step", t.initial_step},
                           {"newton_tol", scan.newton_tol}, {"eigen_offset", trees.eigen_offset},
                           {"match_radius", trees.match_radius}, {"germ_radius", network.germ_radius}})
        if (!(v > 0.0)) throw ConfigError(std::string("tolerance ") + name + " must be positive");
    if (scan.grid < 4 || scan.facet_samples < 4 || scan.lift_grid < 4) throw ConfigError("grid resolutions must be at least 4");
    if (nudge_retries < 0) throw ConfigError("nudge_retries must be nonnegative");
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c = RunConfig::standard();
    if (j.contains("objects")) {
        c.objects.clear();
        if (!j["objects"].is_array()) throw ConfigError("objects must be an array");
        for (const json& o : j["objects"]) {
            ObjectSpec s;
            read(o, "name", s.name);
            std::string kind;
            read(o, "kind", kind);
            auto it = kKindNames.find(kind);
            if (it == kKindNames.end()) throw ConfigError("object " + s.name + ": unknown kind '" + kind + "'");
            s.kind = it->second;
            read(o, "k", s.k);
            for (auto [key, field] : tangent_fields()) read(o, key, s.tangent.*field);
            c.objects.push_back(s);
        }
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        read(t, "rtol", c.trees.trace.rtol);
        read(t, "atol", c.trees.trace.atol);
        read(t, "event_tol", c.trees.trace.event_tol);
        read(t, "initial_step", c.trees.trace.initial_step);
        read(t, "max_segment", c.trees.trace.max_segment);
        read(t, "newton_tol", c.scan.newton_tol);
        read(t, "eigen_offset", c.trees.eigen_offset);
        read(t, "match_radius", c.trees.match_radius);
        read(t, "germ_radius", c.network.germ_radius);
        c.network.trace.rtol = c.trees.trace.rtol;
        c.network.trace.atol = c.trees.trace.atol;
        c.network.trace.event_tol = c.trees.trace.event_tol;
        c.network.trace.max_segment = c.trees.trace.max_segment;
    }
    if (j.contains("grids")) {
        const json& g = j["grids"];
        read(g, "interior", c.scan.grid);
        read(g, "facet_samples", c.scan.facet_samples);
        read(g, "lift_grid", c.scan.lift_grid);
    }
    if (j.contains("output")) {
        read(j["output"], "report", c.report_path);
        read(j["output"], "svg_dir", c.svg_dir);
    }
    read(j, "nudge_seed", c.nudge_seed);
    read(j, "nudge_retries", c.nudge_retries);
    c.validate();
    return c;
}

json to_json(const RunConfig& c) {
    json objs = json::array();
    for (const ObjectSpec& s : c.objects) {
        json o{{"name", s.name}, {"kind", kind_name(s.kind)}};
        if (s.kind == ObjectSpec::Kind::LineBundleSection)
            o["k"] = s.k;
        else
            for (auto [key, field] : tangent_fields()) o[key] = s.tangent.*field;
        objs.push_back(o);
    }
    return {{"objects", objs},
            {"tolerances",
             {{"rtol", c.trees.trace.rtol},
              {"atol", c.trees.trace.atol},
              {"event_tol", c.trees.trace.event_tol},
              {"initial_step", c.trees.trace.initial_step},
              {"max_segment", c.trees.trace.max_segment},
              {"newton_tol", c.scan.newton_tol},
              {"eigen_offset", c.trees.eigen_offset},
              {"match_radius", c.trees.match_radius},
              {"germ_radius", c.network.germ_radius}}},
            {"grids", {{"interior", c.scan.grid}, {"facet_samples", c.scan.facet_samples}, {"lift_grid", c.scan.lift_grid}}},
            {"output", {{"report", c.report_path}, {"svg_dir", c.svg_dir}}},
            {"nudge_seed", c.nudge_seed},
            {"nudge_retries", c.nudge_retries}};
}

Workspace::Workspace(RunConfig config) : config_(std::move(config)), orientation_(default_orientation()) {
    config_.validate();
}

const MultiSection& Workspace::object(const std::string& name) {
    auto it = objects_.find(name);
    if (it != objects_.end()) return *it->second;
    const ObjectSpec* s = config_.find(name);
    if (!s) throw ConfigError("unknown object " + name);
    std::unique_ptr<MultiSection> m;
    if (s->kind == ObjectSpec::Kind::LineBundleSection) {
        m = std::make_unique<MultiSection>(MultiSection::line_bundle_section(s->k));
    } else {
        // parameters that create extra intersections are nudged with a seeded rotation
        std::mt19937_64 rng(config_.nudge_seed);
        std::uniform_real_distribution<double> jitter(-2.0, 2.0);
        TangentParams p = s->tangent;
        for (int attempt = 0;; ++attempt) {
            try {
                m = std::make_unique<MultiSection>(MultiSection::build_tangent_multisection(p));
                nudges_[name] = attempt;
                break;
            } catch (const DomainError& e) {
                if (attempt >= config_.nudge_retries || !(p.epsilon > 0.0))
                    throw ConfigError("object " + name + ": " + e.what());
                p.patch_rotation_deg = s->tangent.patch_rotation_deg + jitter(rng);
            }
        }
        if (s->kind == ObjectSpec::Kind::CotangentMultisection) *m = m->dualize();
    }
    return *objects_.emplace(name, std::move(m)).first->second;
}

const SpectralNetwork& Workspace::network(const std::string& name) {
    auto it = networks_.find(name);
    if (it != networks_.end()) return *it->second;
    const MultiSection& m = object(name);
    auto n = std::make_unique<SpectralNetwork>(build_network(m, config_.network));
    return *networks_.emplace(name, std::move(n)).first->second;
}

std::string Workspace::letter(const std::string& from, const std::string& to) const {
    const ObjectSpec* a = config_.find(from);
    const ObjectSpec* b = config_.find(to);
    if (!a || !b) throw ConfigError("unknown object " + (a ? to : from));
    using K = ObjectSpec::Kind;
    bool la = a->kind == K::LineBundleSection, lb = b->kind == K::LineBundleSection;
    if (la && lb) return "W";
    if (la && b->kind == K::TangentMultisection) return a->k == 0 ? "V" : "U";
    if (la && b->kind == K::CotangentMultisection) return "U";
    if (!la && lb) return "V";
    return "X";
}

std::string Workspace::role(ObjectSpec::Kind kind, int k) const {
    for (const ObjectSpec& s : config_.objects)
        if (s.kind == kind && (k < 0 || s.k == k)) return s.name;
    std::string what = kind_name(kind);
    if (k >= 0) what += " with k = " + std::to_string(k);
    throw ConfigError("config has no " + what);
}

const HomSpace& Workspace::hom(const std::string& from, const std::string& to) {
    Key key{from, to};
    auto it = homs_.find(key);
    if (it != homs_.end()) return *it->second;
    std::string l = letter(from, to);
    const MultiSection& a = object(from);
    const MultiSection& b = object(to);
    HomSpace h;
    try {
        h = hom_space(a, b, config_.scan);
    } catch (const CleanIntersection& e) {
        throw ConfigError("Hom(" + from + ", " + to + "): " + e.what());
    }
    name_generators(h, l);
    return *homs_.emplace(key, std::make_unique<HomSpace>(std::move(h))).first->second;
}

HomContext Workspace::context(const std::string& from, const std::string& to) {
    HomContext c;
    c.from = &object(from);
    c.to = &object(to);
    c.hom = &hom(from, to);
    c.from_network = &network(from);
    c.to_network = &network(to);
    return c;
}

const HomComplex& Workspace::complex(const std::string& from, const std::string& to) {
    Key key{from, to};
    auto it = complexes_.find(key);
    if (it != complexes_.end()) return *it->second;
    HomContext ctx = context(from, to);
    std::string prefix = "a";
    const ObjectSpec* a = config_.find(from);
    const ObjectSpec* b = config_.find(to);
    if (!(a->kind == ObjectSpec::Kind::LineBundleSection && a->k == 0 &&
          b->kind == ObjectSpec::Kind::TangentMultisection))
        prefix = "a[" + from + "," + to + "]";
    auto c = std::make_unique<HomComplex>(
        assemble_complex(from, to, ctx, orientation_, weights_, prefix, config_.trees));
    return *complexes_.emplace(key, std::move(c)).first->second;
}

Cohomology Workspace::cohomology_of(const std::string& from, const std::string& to) {
    return cohomology(complex(from, to), weights_);
}

const StructureConstantTable& Workspace::m2_table() {
    if (m2_) return *m2_;
    using K = ObjectSpec::Kind;
    std::string l1 = role(K::LineBundleSection, 1), t = role(K::TangentMultisection), l2 = role(K::LineBundleSection, 2);
    HomContext c12 = context(l1, t), c23 = context(t, l2), c13 = context(l1, l2);
    m2_ = std::make_unique<StructureConstantTable>(structure_constants(
        *c12.hom, *c23.hom, c12, c23, c13, orientation_, weights_, standard_output_symbols(), 1e-6, config_.trees));
    return *m2_;
}

}  // namespace mvm
