#include <doctest.h>

#include <regex>

#include "fixture.hpp"
#include "mvm/acceptance.hpp"
#include "mvm/report.hpp"

using namespace mvm;
using nlohmann::json;

namespace {

int count(const std::string& text, const std::string& pattern) {
    std::regex re(pattern);
    return static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST_CASE("config roundtrip") {
    RunConfig c = RunConfig::standard(0.05);
    json j = to_json(c);
    RunConfig back = parse_config(j);
    CHECK(to_json(back) == j);
    CHECK(back.objects.size() == 5);
    CHECK(parse_config(json::object()).objects.size() == 5);
}

TEST_CASE("config errors") {
    json base = to_json(RunConfig::standard());
    {
        json j = base;
        j["objects"][1]["name"] = "L0";
        CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("duplicate"), ConfigError);
    }
    {
        json j = base;
        for (json& o : j["objects"])
            if (o.contains("epsilon")) o["epsilon"] = 0.0;
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    {
        json j = base;
        j["tolerances"]["rtol"] = -1e-9;
        CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("rtol"), ConfigError);
    }
    {
        json j = base;
        j["objects"][0]["kind"] = "vector_bundle";
        CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("unknown kind"), ConfigError);
    }
    {
        json j = base;
        j["grids"]["interior"] = "fine";
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS(with_epsilon(RunConfig::standard(), -0.1).validate(), ConfigError);
}

TEST_CASE("workspace lookups") {
    Workspace& ws = standard_workspace();
    CHECK_THROWS_AS(ws.object("Q"), ConfigError);
    CHECK_THROWS_AS(ws.hom("L1", "Q"), ConfigError);
    CHECK(ws.role(ObjectSpec::Kind::TangentMultisection) == "T");
    CHECK(ws.role(ObjectSpec::Kind::LineBundleSection, 2) == "L2");
    CHECK_THROWS_AS(ws.role(ObjectSpec::Kind::LineBundleSection, 7), ConfigError);
}

TEST_CASE("report fragments roundtrip byte for byte") {
    Workspace& ws = standard_workspace();
    json j = {{"hom", report::hom(ws.hom("L1", "T"))},
              {"network", report::network(ws.network("T"), ws.object("T"))},
              {"m2", report::m2(ws.m2_table(), ws.weights())},
              {"complex", report::complex(ws.complex("L0", "T"), ws.weights())},
              {"bside", report::bside_tables()}};
    std::string text = report::dump(j);
    CHECK(text.back() == '\n');
    CHECK(report::dump(json::parse(text)) == text);
    CHECK(j["hom"]["generators"].size() == 3);
    CHECK(j["network"]["walls"].size() == 3);
    CHECK(j["m2"]["entries"].size() == 6);
}

TEST_CASE("network output is deterministic") {
    Workspace a(RunConfig::standard(0.05));
    std::string first = report::dump(report::network(a.network("T"), a.object("T")));
    CHECK(first == report::dump(report::network(standard_workspace().network("T"), standard_workspace().object("T"))));
}

TEST_CASE("svg overlays") {
    Workspace& ws = standard_workspace();
    std::string net = report::svg_network(ws.network("T"), ws.object("T"));
    CHECK(net.rfind("<svg", 0) == 0);
    CHECK(count(net, "<path ") == 1 + static_cast<int>(ws.network("T").walls.size()));
    CHECK(count(net, "<polyline ") >= 1);
    std::string empty = report::svg_network(ws.network("L1"), ws.object("L1"));
    CHECK(count(empty, "<path ") == 1);
    std::string trees = report::svg_trees(ws.m2_table());
    int edges = 2 * static_cast<int>(ws.m2_table().entries.size());
    CHECK(count(trees, "<path ") == 1 + edges);
    CHECK(count(trees, "<circle ") == static_cast<int>(ws.m2_table().entries.size()));
}
