// One line per acceptance criterion; exit status 1 when any fails.
#include <cstdio>
#include <fstream>

#include "mvm/acceptance.hpp"
#include "mvm/report.hpp"

int main(int argc, char** argv) {
    mvm::AcceptanceResult r = mvm::run_acceptance(mvm::RunConfig::standard());
    for (const mvm::Verdict& v : r.verdicts)
        std::printf("criterion %2d %s %s: %s\n", v.id, v.pass ? "PASS" : "FAIL", v.title.c_str(), v.detail.c_str());
    if (argc > 1) std::ofstream(argv[1], std::ios::binary) << mvm::report::dump(r.report);
    std::printf("%s\n", r.all_pass() ? "all criteria pass" : "some criteria fail");
    return r.all_pass() ? 0 : 1;
}
