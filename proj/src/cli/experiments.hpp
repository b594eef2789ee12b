#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace jko::cli {

enum class Verdict { Pass, Fail, Vacuous };

struct CheckOutcome {
    std::string name;
    Verdict verdict = Verdict::Pass;
    std::string detail;
};

struct RunOutcome {
    int exit_code = 0;  // 0 pass (or vacuous), 2 check failure
    std::vector<CheckOutcome> checks;
    std::vector<std::string> warnings;
    Json summary;  // contents of summary.json
    std::string directory;
};

/// Runs one validated config and writes its artifacts under cfg.output:
/// config.json, summary.json, summary.txt and kind-specific CSV/JSON tables.
/// If the run throws, a FAILED marker holding the message is written first.
RunOutcome run_experiment(const RunConfig& cfg);

const char* verdict_name(Verdict v);

}  // namespace jko::cli
