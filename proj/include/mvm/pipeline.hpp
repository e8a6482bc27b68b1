#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mvm/ainfty.hpp"

namespace mvm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ObjectSpec {
    enum class Kind { LineBundleSection, TangentMultisection, CotangentMultisection };
    std::string name;
    Kind kind = Kind::LineBundleSection;
    int k = 0;
    TangentParams tangent;
};

struct RunConfig {
    std::vector<ObjectSpec> objects;
    ScanOptions scan;
    TreeOptions trees;
    NetworkOptions network;
    std::uint64_t nudge_seed = 1;
    int nudge_retries = 4;
    std::string report_path = "report.json";
    std::string svg_dir = ".";

    // L0, L1, L2, T and Omega with the given epsilon.
    static RunConfig standard(double epsilon = 0.05);
    void validate() const;  // throws ConfigError
    const ObjectSpec* find(const std::string& name) const;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Lazily built objects, networks, hom spaces and complexes for one configuration. Returned
// references stay valid for the workspace's lifetime.
class Workspace {
public:
    explicit Workspace(RunConfig config);

    const RunConfig& config() const { return config_; }
    const MultiSection& object(const std::string& name);
    const SpectralNetwork& network(const std::string& name);
    const HomSpace& hom(const std::string& from, const std::string& to);
    HomContext context(const std::string& from, const std::string& to);
    const HomComplex& complex(const std::string& from, const std::string& to);
    Cohomology cohomology_of(const std::string& from, const std::string& to);
    // m2 table on the exceptional triple (L1, T, L2).
    const StructureConstantTable& m2_table();

    WeightSymbols& weights() { return weights_; }
    const OrientationData& orientation() const { return orientation_; }
    // Parameter nudges applied to make an object generic, per object.
    const std::map<std::string, int>& nudges() const { return nudges_; }

    std::string letter(const std::string& from, const std::string& to) const;
    // First object of the kind (and line degree k, when k >= 0); throws ConfigError when absent.
    std::string role(ObjectSpec::Kind kind, int k = -1) const;

private:
    using Key = std::pair<std::string, std::string>;

    RunConfig config_;
    OrientationData orientation_;
    WeightSymbols weights_;
    std::map<std::string, std::unique_ptr<MultiSection>> objects_;
    std::map<std::string, std::unique_ptr<SpectralNetwork>> networks_;
    std::map<Key, std::unique_ptr<HomSpace>> homs_;
    std::map<Key, std::unique_ptr<HomComplex>> complexes_;
    std::unique_ptr<StructureConstantTable> m2_;
    std::map<std::string, int> nudges_;
};

}  // namespace mvm
