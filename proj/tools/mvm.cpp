#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mvm/acceptance.hpp"
#include "mvm/report.hpp"

using namespace mvm;
using nlohmann::json;

namespace {

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig::standard();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void write_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string lift_str(const std::array<int, 2>& l) { return "(" + std::to_string(l[0]) + "," + std::to_string(l[1]) + ")"; }

int cmd_network(Workspace& ws, const std::string& name, std::string out) {
    const SpectralNetwork& n = ws.network(name);
    const MultiSection& m = ws.object(name);
    if (out.empty()) out = (std::filesystem::path(ws.config().svg_dir) / (name + "_network.json")).string();
    write_file(out, report::dump(report::network(n, m)));
    std::string svg = std::filesystem::path(out).replace_extension(".svg").string();
    write_file(svg, report::svg_network(n, m));
    std::printf("%s: %zu walls -> %s, %s\n", name.c_str(), n.walls.size(), out.c_str(), svg.c_str());
    for (const Wall& w : n.walls)
        std::printf("  (%d%d) from branch %d, %zu points, terminal (%.6f, %.6f)%s\n", w.sheet_pair[0] + 1,
                    w.sheet_pair[1] + 1, w.origin_branch, w.points.size(), w.terminal[0], w.terminal[1],
                    w.truncated ? " truncated" : "");
    return 0;
}

int cmd_hom(Workspace& ws, const std::string& from, const std::string& to, const std::string& out) {
    const HomSpace& h = ws.hom(from, to);
    std::printf("Hom(%s,%s): %zu generator%s\n", from.c_str(), to.c_str(), h.generators.size(),
                h.generators.size() == 1 ? "" : "s");
    std::printf("  %-12s %-18s %6s %8s  %s\n", "name", "kind", "degree", "lift", "position");
    for (const Generator& g : h.generators)
        std::printf("  %-12s %-18s %6d %8s  (%.6f, %.6f)\n", g.name.c_str(), to_string(g.kind).c_str(), g.degree,
                    lift_str(g.lift).c_str(), g.position[0], g.position[1]);
    if (!h.rejected.empty()) std::printf("  rejected (condition M): %zu\n", h.rejected.size());
    for (const Generator& g : h.rejected)
        std::printf("    %-10s lift %s at (%.6f, %.6f), stable dim %d\n", g.name.c_str(), lift_str(g.lift).c_str(),
                    g.position[0], g.position[1], g.stable_dim);
    if (!out.empty()) write_file(out, report::dump(report::hom(h)));
    return 0;
}

int cmd_m2(Workspace& ws, bool table, const std::string& svg) {
    const StructureConstantTable& t = ws.m2_table();
    const WeightSymbols& w = ws.weights();
    std::printf("m2 on the exceptional triple: %zu products\n", t.entries.size());
    for (const StructureEntry& e : t.entries)
        std::printf("  m2(%s, %s) = %s e^{-%s} %s\n", e.first->name.c_str(), e.second->name.c_str(),
                    e.sign > 0 ? "+" : "-", w.names[e.symbol].c_str(), e.output->name.c_str());
    if (table) {
        std::printf("weights:\n");
        for (const char* s : {"A", "B", "C"})
            if (w.find(s) >= 0) std::printf("  %s = %.17g\n", s, w.values[w.find(s)]);
        std::printf("max relative spread within a symbol: %.3e\n", t.max_cluster_spread);
        for (const StructureEntry& e : t.entries)
            std::printf("  %-8s %-8s -> %-7s sign %+d weight %.12f traced %.12f quadrature %.12f%s\n",
                        e.first->name.c_str(), e.second->name.c_str(), e.output->name.c_str(), e.sign, e.weight,
                        e.tree.traced_weight, e.tree.quadrature, e.tree.jagged() ? " jagged" : "");
        SignReassignment s = solve_sign_reassignment(t, reference_m2_signs());
        std::printf("sign reassignment: %s%s\n", s.found ? "found" : "none", s.identity ? " (identity)" : "");
    }
    if (!svg.empty()) write_file(svg, report::svg_trees(t));
    return 0;
}

int cmd_cohomology(Workspace& ws, const std::string& from, const std::string& to) {
    const HomComplex& c = ws.complex(from, to);
    Cohomology h = ws.cohomology_of(from, to);
    std::printf("H(%s,%s):", from.c_str(), to.c_str());
    if (h.dims.empty()) std::printf(" 0");
    for (const auto& [d, n] : h.dims) std::printf(" H%d=%d", d, n);
    std::printf("\n");
    for (const auto& [d, reps] : h.representatives)
        for (const std::vector<double>& rep : reps) {
            std::printf("  H%d:", d);
            for (size_t i = 0; i < rep.size(); ++i)
                if (rep[i] != 0.0) std::printf(" %+.6g %s", rep[i], c.generators.at(d)[i]->name.c_str());
            std::printf("\n");
        }
    for (const M1Term& t : c.terms)
        std::printf("  m1: %s -> %s sign %+d %s\n", t.source->name.c_str(), t.target->name.c_str(), t.sign,
                    t.symbol < 0 ? "weight 0" : ("e^{-" + ws.weights().names[t.symbol] + "}").c_str());
    return 0;
}

int cmd_bside(bool table) {
    using namespace bside;
    ParliamentResult tp = parliament_sections(Bundle::Tangent);
    ParliamentResult cp = parliament_sections(Bundle::Cotangent);
    EulerReport e = euler_check();
    std::printf("tangent: h0 = %d, h1 = %d; cotangent: h0 = %d, h1 = %d\n", tp.h0, tp.h1, cp.h0, cp.h1);
    std::printf("Euler sequence: 3 * %d - %d = %d (%s)\n", e.o1, e.o0, e.tangent, e.ok ? "ok" : "mismatch");
    if (!table) return 0;
    std::printf("compositions G_j o F_i:\n");
    for (const CompositionEntry& c : composition_table(exceptional_maps()))
        std::printf("  G%d o F%d = %s\n", c.g + 1, c.f + 1, c.value.str().c_str());
    std::printf("tangent sections:\n");
    for (const LatticeSection& s : tp.sections) std::printf("  %s\n", s.str().c_str());
    for (const auto& rel : tp.relations) {
        std::printf("  relation:");
        for (auto [i, k] : rel) std::printf(" %+d %s", k, tp.sections[i].str().c_str());
        std::printf(" = 0\n");
    }
    return 0;
}

int cmd_verify(const RunConfig& base, std::optional<double> eps, std::string report_path) {
    AcceptanceOptions opt;
    if (eps) opt.epsilon = *eps;
    // surfaces config errors such as a nonpositive epsilon before any computation
    with_epsilon(base, opt.epsilon).validate();
    AcceptanceResult r = run_acceptance(base, opt);
    for (const Verdict& v : r.verdicts)
        std::printf("criterion %2d %s %s: %s\n", v.id, v.pass ? "PASS" : "FAIL", v.title.c_str(), v.detail.c_str());
    if (report_path.empty()) report_path = base.report_path;
    write_file(report_path, report::dump(r.report));
    std::printf("report: %s\n", report_path.c_str());
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Morse-homotopy mirror computations over the moment triangle"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration");

    std::string object, from, to, out, svg, report_path;
    bool table = false;
    double epsilon = 0.0;

    auto* net = app.add_subcommand("network", "trace the spectral network of an object");
    net->add_option("object", object)->required();
    net->add_option("--out", out, "JSON output path; the SVG goes next to it");
    auto* hom = app.add_subcommand("hom", "generators of a hom space");
    hom->add_option("from", from)->required();
    hom->add_option("to", to)->required();
    hom->add_option("--out", out, "JSON fragment output path");
    auto* m2 = app.add_subcommand("m2", "products on the exceptional triple");
    m2->add_flag("--table", table, "weights, traces and sign reassignment");
    m2->add_option("--svg", svg, "tree overlay output path");
    auto* coh = app.add_subcommand("cohomology", "cohomology of a hom complex");
    coh->add_option("from", from)->required();
    coh->add_option("to", to)->required();
    auto* bs = app.add_subcommand("bside", "bundle-side sections and compositions");
    bs->add_flag("--table", table, "composition table and lattice sections");
    auto* ver = app.add_subcommand("verify", "run every acceptance criterion");
    auto* eps_opt = ver->add_option("--epsilon", epsilon, "edge perturbation of the main run");
    ver->add_option("--report", report_path, "report output path");

    CLI11_PARSE(app, argc, argv);
    try {
        RunConfig cfg = load_config(config_path);
        if (*bs) return cmd_bside(table);
        if (*ver) return cmd_verify(cfg, *eps_opt ? std::optional<double>(epsilon) : std::nullopt, report_path);
        Workspace ws(cfg);
        if (*net) return cmd_network(ws, object, out);
        if (*hom) return cmd_hom(ws, from, to, out);
        if (*m2) return cmd_m2(ws, table, svg);
        if (*coh) return cmd_cohomology(ws, from, to);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
