#include "mvm/acceptance.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "mvm/report.hpp"

namespace mvm {

using nlohmann::json;
using K = ObjectSpec::Kind;

bool AcceptanceResult::all_pass() const {
    for (const Verdict& v : verdicts)
        if (!v.pass) return false;
    return !verdicts.empty();
}

namespace {

struct Roles {
    std::string l0, l1, l2, t, omega;
    explicit Roles(const Workspace& ws)
        : l0(ws.role(K::LineBundleSection, 0)),
          l1(ws.role(K::LineBundleSection, 1)),
          l2(ws.role(K::LineBundleSection, 2)),
          t(ws.role(K::TangentMultisection)),
          omega(ws.role(K::CotangentMultisection)) {}
};

// Collects failure reasons; a criterion passes when none were recorded.
struct Check {
    std::vector<std::string> failures;
    std::ostringstream notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

Verdict run(int id, const std::string& title, const std::function<void(Check&)>& body) {
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    Verdict v{id, title, c.failures.empty(), c.notes.str()};
    for (const std::string& f : c.failures) v.detail += (v.detail.empty() ? "" : "; ") + f;
    return v;
}

std::string pair_name(const std::string& a, const std::string& b) { return "Hom(" + a + "," + b + ")"; }

std::set<std::array<int, 2>> lifts(const HomSpace& h) {
    std::set<std::array<int, 2>> s;
    for (const Generator& g : h.generators) s.insert(g.lift);
    return s;
}

bool only_degree(const Cohomology& c, int degree, int dim) {
    for (const auto& [d, n] : c.dims)
        if (n != (d == degree ? dim : 0)) return false;
    return c.dim(degree) == dim;
}

std::string dims_str(const Cohomology& c) {
    std::string s;
    for (const auto& [d, n] : c.dims) s += (s.empty() ? "H" : " H") + std::to_string(d) + "=" + std::to_string(n);
    return s.empty() ? "none" : s;
}

}  // namespace

RunConfig with_epsilon(RunConfig base, double epsilon) {
    for (ObjectSpec& s : base.objects)
        if (s.kind != K::LineBundleSection) s.tangent.epsilon = epsilon;
    return base;
}

CoreChecks core_checks(Workspace& ws) {
    CoreChecks out;
    Roles r(ws);
    json& sig = out.signature;

    out.verdicts.push_back(run(1, "hom dimensions", [&](Check& c) {
        for (auto [a, b] : {std::pair{r.l1, r.t}, {r.t, r.l2}, {r.l1, r.l2}}) {
            Cohomology h = ws.cohomology_of(a, b);
            c.expect(only_degree(h, 0, 3), pair_name(a, b) + " has " + dims_str(h));
            c.notes << pair_name(a, b) << " " << dims_str(h) << "; ";
            sig["cohomology"][pair_name(a, b)] = report::cohomology(h)["dims"];
        }
        Cohomology tt = ws.cohomology_of(r.t, r.t);
        c.expect(only_degree(tt, 0, 1), pair_name(r.t, r.t) + " has " + dims_str(tt));
        sig["cohomology"][pair_name(r.t, r.t)] = report::cohomology(tt)["dims"];
        const HomComplex& ct = ws.complex(r.t, r.t);
        if (tt.dim(0) == 1) {
            const std::vector<double>& rep = tt.representatives.at(0).at(0);
            const auto& gens = ct.generators.at(0);
            std::vector<double> unit;
            bool clean = true;
            for (size_t i = 0; i < gens.size(); ++i) {
                if (gens[i]->kind == GeneratorKind::FundamentalClass)
                    unit.push_back(rep[i]);
                else if (std::abs(rep[i]) > 1e-12)
                    clean = false;
            }
            bool ok = clean && unit.size() == 2 && std::abs(unit[0] - unit[1]) < 1e-12 && std::abs(unit[0]) > 0.5;
            c.expect(ok, "H0 of the self-hom is not spanned by the sum of the fundamental classes");
            c.notes << pair_name(r.t, r.t) << " H0 = P^(1)+P^(2); ";
        }
        for (auto [a, b] : {std::pair{r.t, r.l1}, {r.l2, r.t}, {r.l2, r.l1}}) {
            const HomSpace& h = ws.hom(a, b);
            c.expect(h.generators.empty(), pair_name(a, b) + " is not empty");
            c.expect(ws.cohomology_of(a, b).dims.empty() || only_degree(ws.cohomology_of(a, b), 0, 0),
                     pair_name(a, b) + " has cohomology");
        }
        c.notes << "reverse homs empty";
    }));

    out.verdicts.push_back(run(2, "generator inventory", [&](Check& c) {
        using L = std::set<std::array<int, 2>>;
        struct Case {
            std::string a, b;
            L expected;
            bool vertex_rejects;
        };
        for (const Case& k : {Case{r.l1, r.t, L{{0, 0}, {-1, 0}, {0, -1}}, true},
                              Case{r.t, r.l2, L{{1, 1}, {1, 0}, {0, 1}}, true},
                              Case{r.l1, r.l2, L{{0, 0}, {1, 0}, {0, 1}}, false}}) {
            const HomSpace& h = ws.hom(k.a, k.b);
            c.expect(h.generators.size() == 3 && lifts(h) == k.expected, pair_name(k.a, k.b) + " lifts differ");
            json names = json::array();
            for (const Generator& g : h.generators) {
                names.push_back({g.name, g.degree});
                c.expect(g.degree == 0, g.name + " has degree " + std::to_string(g.degree));
            }
            sig["generators"][pair_name(k.a, k.b)] = names;
            if (!k.vertex_rejects) continue;
            int vertex = 0;
            for (const Generator& g : h.rejected) {
                c.expect(g.face.dim == 0 && !g.condition_m, g.name + " is rejected away from a vertex");
                vertex += g.face.dim == 0 && !g.condition_m;
            }
            c.expect(vertex == 6, pair_name(k.a, k.b) + ": " + std::to_string(vertex) + " vertex candidates fail (M)");
            c.notes << pair_name(k.a, k.b) << " 3 generators, " << vertex << " vertex candidates rejected; ";
        }
    }));

    out.verdicts.push_back(run(3, "m2 table", [&](Check& c) {
        const StructureConstantTable& t = ws.m2_table();
        const WeightSymbols& w = ws.weights();
        c.expect(t.entries.size() == 6, std::to_string(t.entries.size()) + " products");
        std::map<std::string, int> per_symbol;
        std::set<std::pair<std::string, std::string>> inputs;
        json table = json::array();
        const std::map<std::string, std::string> symbols = standard_output_symbols();
        for (const StructureEntry& e : t.entries) {
            ++per_symbol[w.names[e.symbol]];
            inputs.insert({e.first->name, e.second->name});
            table.push_back({e.first->name, e.second->name, e.output->name, e.sign, w.names[e.symbol]});
            auto it = symbols.find(e.output->name);
            c.expect(it != symbols.end() && it->second == w.names[e.symbol],
                     e.output->name + " carries " + w.names[e.symbol]);
        }
        sig["m2"] = table;
        c.expect(inputs.size() == t.entries.size(), "repeated input pair");
        c.expect(per_symbol == std::map<std::string, int>{{"A", 2}, {"B", 2}, {"C", 2}}, "weights do not pair as AABBCC");
        c.expect(t.max_cluster_spread < 1e-6, "cluster spread " + std::to_string(t.max_cluster_spread));
        SignReassignment s = solve_sign_reassignment(t, reference_m2_signs());
        c.expect(s.found, "no sign reassignment");
        c.expect(s.identity, "reassignment is not the identity");
        for (const std::string& m : s.missing) c.expect(false, "unmatched product " + m);
        auto value = [&](const char* name) {
            int i = w.find(name);
            std::ostringstream os;
            if (i < 0)
                os << "absent";
            else
                os << w.values[i];
            return os.str();
        };
        c.notes << "6 products, spread " << t.max_cluster_spread << ", A=" << value("A") << " B=" << value("B")
                << " C=" << value("C") << ", identity reassignment";
    }));

    out.verdicts.push_back(run(4, "functor check", [&](Check& c) {
        FunctorCheck f = functor_iota_verify(ws.m2_table(), ws.hom(r.l1, r.t), ws.hom(r.t, r.l2),
                                             ws.hom(r.l1, r.l2), ws.weights(), standard_output_symbols());
        c.expect(f.rows.size() == 9, std::to_string(f.rows.size()) + " rows");
        int vanishing = 0;
        for (const FunctorRow& row : f.rows) {
            c.expect(row.ok, row.first + "," + row.second + ": " + row.transported.str(ws.weights()) + " vs " +
                                 row.composed.str(ws.weights()));
            vanishing += row.transported.is_zero() && row.composed.is_zero();
        }
        c.expect(f.degree_zero && f.bijective, "assignment not degree zero and bijective");
        for (const std::string& s : f.failures) c.expect(false, s);
        c.expect(vanishing == 3, std::to_string(vanishing) + " vanishing rows");
        sig["functor_vanishing"] = vanishing;
        c.notes << f.rows.size() << " rows match, " << vanishing << " vanish on both sides";
    }));

    out.verdicts.push_back(run(5, "tangent sections", [&](Check& c) {
        const HomComplex& cx = ws.complex(r.l0, r.t);
        auto count = [&](int d) { return cx.generators.count(d) ? static_cast<int>(cx.generators.at(d).size()) : 0; };
        c.expect(count(0) == 9, std::to_string(count(0)) + " degree-0 generators");
        c.expect(count(1) == 1 && cx.generators.at(1)[0]->kind == GeneratorKind::BranchFormal,
                 "degree 1 is not the single formal generator");
        Cohomology h = ws.cohomology_of(r.l0, r.t);
        c.expect(only_degree(h, 0, 8), pair_name(r.l0, r.t) + " has " + dims_str(h));
        c.expect(h.ranks.count(0) && h.ranks.at(0) == 1, "m1 rank is not 1");
        TangentBasis b = tangent_sections_basis(cx, ws.weights());
        c.expect(b.h0 == 8 && b.h1 == 0 && b.in_kernel && b.independent, "basis check failed");
        SectionCorrespondence s =
            section_correspondence(b, cx, bside::parliament_sections(bside::Bundle::Tangent), ws.weights());
        c.expect(s.rows.size() == 8, std::to_string(s.rows.size()) + " correspondence rows");
        c.expect(s.isomorphism, "correspondence is not an isomorphism");
        sig["tangent"] = {count(0), count(1), h.dim(0), h.dim(1), s.rows.size()};
        c.notes << "9+1 generators, rank 1, H0=8 H1=0, " << s.rows.size() << " rows";
    }));

    out.verdicts.push_back(run(6, "cotangent", [&](Check& c) {
        const HomSpace& h = ws.hom(r.l0, r.omega);
        c.expect(h.generators.size() == 1 && h.generators[0].kind == GeneratorKind::BranchFormal &&
                     h.generators[0].degree == 1,
                 pair_name(r.l0, r.omega) + " is not the single degree-1 formal generator");
        Cohomology co = ws.cohomology_of(r.l0, r.omega);
        c.expect(only_degree(co, 1, 1), pair_name(r.l0, r.omega) + " has " + dims_str(co));
        bside::ParliamentResult p = bside::parliament_sections(bside::Bundle::Cotangent);
        c.expect(p.h0 == 0 && p.h1 == 1, "B-side cotangent cohomology differs");
        sig["cotangent"] = {h.generators.size(), co.dim(0), co.dim(1), p.h0, p.h1};
        if (!h.generators.empty()) c.notes << h.generators[0].name << ", H1=1; B-side H0=0 H1=1";
    }));

    out.verdicts.push_back(run(7, "spectral network", [&](Check& c) {
        const SpectralNetwork& n = ws.network(r.t);
        c.expect(n.walls.size() == 3, std::to_string(n.walls.size()) + " walls");
        WellBehavedReport wb = is_well_behaved(n, ws.object(r.t), 1e-3);
        c.expect(wb.ok, "not well-behaved");
        for (const std::string& s : wb.reasons) c.expect(false, s);
        std::map<std::string, int> ordinary, jagged;
        for (const StructureEntry& e : ws.m2_table().entries) ++(e.tree.jagged() ? jagged : ordinary)[e.output->name];
        for (const Generator& g : ws.hom(r.l1, r.l2).generators)
            c.expect(ordinary[g.name] == 2, std::to_string(ordinary[g.name]) + " ordinary trees end at " + g.name);
        const Generator* w00 = nullptr;
        for (const Generator& g : ws.hom(r.l1, r.l2).generators)
            if (g.lift == std::array<int, 2>{0, 0}) w00 = &g;
        c.expect(w00 && jagged[w00->name] == 0, "jagged trees end at the lift-zero output");
        sig["network"] = {n.walls.size(), wb.ok};
        c.notes << n.walls.size() << " walls, well-behaved, 2 ordinary trees per output, 0 jagged at "
                << (w00 ? w00->name : "?");
    }));
    return out;
}

namespace {

Verdict local_model_verdict(Workspace& ws, json& data) {
    return run(8, "local model", [&](Check& c) {
        Roles r(ws);
        const MultiSection& t = ws.object(r.t);
        double res = local_model_residual(t, 60);
        c.expect(res < 1e-8, "residual " + std::to_string(res));
        GermReport g = germ_report(ws.network(r.t), t);
        c.expect(g.ok, "germ angles off by " + std::to_string(g.wall_deviation));
        c.expect(g.wall_angles.size() == 3, std::to_string(g.wall_angles.size()) + " wall germs");
        data = {{"residual", res},
                {"wall_angles", g.wall_angles},
                {"zero_angles", g.zero_angles},
                {"extremum_angles", g.extremum_angles},
                {"wall_deviation", g.wall_deviation},
                {"zero_deviation", g.zero_deviation},
                {"extremum_deviation", g.extremum_deviation}};
        c.notes << "residual " << res << ", wall germ deviation " << g.wall_deviation << " rad";
    });
}

Verdict property_verdict(Workspace& ws, const AcceptanceOptions& opt, json& data) {
    return run(9, "property suite", [&](Check& c) {
        Roles r(ws);
        std::mt19937_64 rng(opt.property_seed);
        std::uniform_real_distribution<double> box(-6.0, 6.0), unit(0.0, 1.0);
        double roundtrip = 0.0, jac = 0.0;
        for (int i = 0; i < opt.property_samples; ++i) {
            Vec2 xi(box(rng), box(rng));
            roundtrip = std::max(roundtrip, (legendre_inverse(legendre(xi)) - xi).norm());
            Vec2 x(unit(rng), unit(rng));
            if (min_slack(x) > 1e-3)
                roundtrip = std::max(roundtrip, (legendre(legendre_inverse(x)) - x).norm());
            // central differences: truncation ~h^2, roundoff ~1e-16 / h relative to a metric of size e^-|xi|
            const double h = 1e-4;
            Mat2 fd;
            for (int k = 0; k < 2; ++k) {
                Vec2 e = Vec2::Zero();
                e[k] = h;
                fd.col(k) = (legendre(xi + e) - legendre(xi - e)) / (2 * h);
            }
            Mat2 g = metric_upper(xi);
            jac = std::max(jac, (fd - g).norm() / g.norm());
        }
        c.expect(roundtrip < 1e-9, "Legendre roundtrip " + std::to_string(roundtrip));
        c.expect(jac < 1e-6, "Legendre Jacobian vs metric " + std::to_string(jac));

        double fiber = 0.0;
        for (const std::string& name : {r.l0, r.l1, r.l2, r.t, r.omega})
            fiber = std::max(fiber, fiber_consistency_error(ws.object(name), opt.property_samples, opt.property_seed));
        c.expect(fiber < 1e-6, "fiber consistency " + std::to_string(fiber));

        bool squares = true;
        for (auto [a, b] : {std::pair{r.l1, r.t}, {r.t, r.l2}, {r.l1, r.l2}, {r.t, r.t}, {r.l0, r.t}, {r.l0, r.omega},
                            {r.t, r.l1}, {r.l2, r.t}, {r.l2, r.l1}})
            if (!differential_squares_to_zero(ws.complex(a, b))) {
                squares = false;
                c.expect(false, "m1^2 != 0 on " + pair_name(a, b));
            }

        int additive = 0;
        double telescope = 0.0;
        auto line_gap = [&](const JaggedLine& l) {
            if (!l.trivial) telescope = std::max(telescope, std::abs(l.quadrature - l.traced_weight));
        };
        for (const StructureEntry& e : ws.m2_table().entries) {
            bool deg = e.output->degree == e.first->degree + e.second->degree;
            bool lift = e.output->lift[0] == e.first->lift[0] + e.second->lift[0] &&
                        e.output->lift[1] == e.first->lift[1] + e.second->lift[1];
            c.expect(deg && lift, "additivity fails on " + e.first->name + "," + e.second->name);
            additive += deg && lift;
            telescope = std::max(telescope, std::abs(e.tree.quadrature - e.tree.traced_weight));
            for (const JaggedLine& l : e.tree.inputs) line_gap(l);
        }
        for (auto [a, b] : {std::pair{r.l0, r.t}, {r.t, r.t}, {r.l0, r.omega}})
            for (const M1Term& t : ws.complex(a, b).terms) line_gap(t.line);
        c.expect(telescope < 1e-6, "telescope vs quadrature " + std::to_string(telescope));

        data = {{"legendre_roundtrip", roundtrip},
                {"legendre_jacobian", jac},
                {"fiber_consistency", fiber},
                {"m1_squares_to_zero", squares},
                {"additive_entries", additive},
                {"telescope_vs_quadrature", telescope}};
        c.notes << "roundtrip " << roundtrip << ", jacobian " << jac << ", fiber " << fiber << ", m1^2=0 "
                << (squares ? "yes" : "no") << ", additive " << additive << "/6, telescope " << telescope;
    });
}

}  // namespace

json build_report(Workspace& ws, const std::vector<Verdict>& verdicts) {
    Roles r(ws);
    json rep;
    rep["config"] = to_json(ws.config());

    std::vector<std::pair<std::string, std::string>> pairs = {
        {r.l1, r.t}, {r.t, r.l2},    {r.l1, r.l2}, {r.t, r.t}, {r.l0, r.t},
        {r.l0, r.omega}, {r.t, r.l1}, {r.l2, r.t}, {r.l2, r.l1}};
    json gens = json::object(), complexes = json::object();
    for (auto& [a, b] : pairs) {
        gens[pair_name(a, b)] = report::hom(ws.hom(a, b));
        json cx = report::complex(ws.complex(a, b), ws.weights());
        cx["cohomology"] = report::cohomology(ws.cohomology_of(a, b));
        complexes[pair_name(a, b)] = cx;
    }
    rep["generators"] = gens;

    json nets = json::object();
    for (const ObjectSpec& s : ws.config().objects) nets[s.name] = report::network(ws.network(s.name), ws.object(s.name));
    rep["networks"] = nets;

    const StructureConstantTable& t = ws.m2_table();
    json trees = json::array();
    for (const StructureEntry& e : t.entries) trees.push_back(report::tree(e.tree));
    json m1_lines = json::array();
    for (auto [a, b] : {std::pair{r.l0, r.t}, {r.t, r.t}, {r.l0, r.omega}})
        for (const M1Term& term : ws.complex(a, b).terms) m1_lines.push_back(report::line(term.line));
    rep["trees"] = {{"m2", trees}, {"m1", m1_lines}};

    rep["complexes"] = {{"homs", complexes}, {"m2", report::m2(t, ws.weights())}};
    const HomComplex& cx = ws.complex(r.l0, r.t);
    TangentBasis basis = tangent_sections_basis(cx, ws.weights());
    rep["complexes"]["tangent_basis"] = report::tangent_basis(basis, ws.weights());
    rep["complexes"]["correspondence"] = report::correspondence(
        section_correspondence(basis, cx, bside::parliament_sections(bside::Bundle::Tangent), ws.weights()));
    rep["complexes"]["bside"] = report::bside_tables();
    rep["complexes"]["weights"] = report::weights(ws.weights());

    FunctorCheck f = functor_iota_verify(t, ws.hom(r.l1, r.t), ws.hom(r.t, r.l2), ws.hom(r.l1, r.l2), ws.weights(),
                                         standard_output_symbols());
    UnitAssociativity ua = unit_associativity_check(f, ws.hom(r.l1, r.t), ws.hom(r.t, r.t), ws.hom(r.t, r.l2));
    json crit = json::array();
    for (const Verdict& v : verdicts)
        crit.push_back({{"id", v.id}, {"title", v.title}, {"pass", v.pass}, {"detail", v.detail}});
    rep["verdicts"] = {{"criteria", crit},
                       {"functor", report::functor(f, ws.weights())},
                       {"unit_associativity", {{"checked", ua.checked}, {"ok", ua.ok}, {"failures", ua.failures}}},
                       {"nudges", ws.nudges()}};
    return rep;
}

AcceptanceResult run_acceptance(const RunConfig& base, const AcceptanceOptions& opt) {
    AcceptanceResult out;
    Workspace ws(with_epsilon(base, opt.epsilon));
    CoreChecks main = core_checks(ws);
    out.verdicts = main.verdicts;
    json local, props;
    out.verdicts.push_back(local_model_verdict(ws, local));
    out.verdicts.push_back(property_verdict(ws, opt, props));

    json robustness = json::array();
    out.verdicts.push_back(run(10, "robustness", [&](Check& c) {
        for (double eps : opt.robustness) {
            CoreChecks k;
            json values;
            if (eps == opt.epsilon) {
                k = main;
            } else {
                Workspace other(with_epsilon(base, eps));
                try {
                    k = core_checks(other);
                } catch (const std::exception& e) {
                    c.expect(false, "epsilon " + std::to_string(eps) + ": " + e.what());
                    continue;
                }
                const WeightSymbols& w = other.weights();
                for (const char* s : {"A", "B", "C"})
                    if (w.find(s) >= 0) values[s] = w.values[w.find(s)];
            }
            if (eps == opt.epsilon)
                for (const char* s : {"A", "B", "C"})
                    if (ws.weights().find(s) >= 0) values[s] = ws.weights().values[ws.weights().find(s)];
            json failed = json::array();
            for (const Verdict& v : k.verdicts)
                if (!v.pass) {
                    failed.push_back(v.id);
                    c.expect(false, "epsilon " + std::to_string(eps) + " criterion " + std::to_string(v.id) + ": " +
                                        v.detail);
                }
            bool same = k.signature == main.signature;
            c.expect(same, "epsilon " + std::to_string(eps) + " changes counts or signs");
            robustness.push_back({{"epsilon", eps}, {"failed", failed}, {"invariant", same}, {"weights", values}});
            c.notes << "eps " << eps << (failed.empty() && same ? " ok" : " FAIL");
            if (values.contains("A"))
                c.notes << " (A=" << values["A"].get<double>() << " B=" << values["B"].get<double>()
                        << " C=" << values["C"].get<double>() << ")";
            c.notes << "; ";
        }
    }));

    out.report = build_report(ws, out.verdicts);
    out.report["verdicts"]["local_model"] = local;
    out.report["verdicts"]["properties"] = props;
    out.report["verdicts"]["robustness"] = robustness;
    return out;
}

}  // namespace mvm
