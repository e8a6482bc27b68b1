#pragma once

#include "mvm/pipeline.hpp"

// Standard objects at epsilon 0.05, built once per test binary.
inline mvm::Workspace& standard_workspace() {
    static mvm::Workspace ws(mvm::RunConfig::standard(0.05));
    return ws;
}

inline const mvm::Generator& generator_named(const mvm::HomSpace& h, const std::string& name) {
    for (const mvm::Generator& g : h.generators)
        if (g.name == name) return g;
    throw std::out_of_range("no generator " + name);
}
