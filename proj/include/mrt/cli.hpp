#pragma once

#include <string>
#include <vector>

#include "mrt/io.hpp"

namespace mrt::cli {

struct RunConfig {
    std::string command;  // beta | jones | tst | curve | decompose | validate
    std::string input;
    std::string format;   // csv | json, empty infers from the extension
    std::string output;   // empty writes to stdout
    double p = 2.0;
    double c = 0.5;       // star_c variant in beta, jones and validate
    std::vector<double> c_ladder{0.125, 0.25, 0.5, 1.0};
    std::vector<double> n_ladder{1.0, 4.0, 16.0};
    std::vector<double> eps_ladder{0.5, 0.25, 0.125};  // fractions of mu(Top)
    int k_max = -1;       // -1 picks the per-atom data resolution (jones) or 8 (decompose)
    int k_lo = 0;
    int k_hi = 6;
    int depth = 6;        // net levels for curve and validate
    double cstar = 2.0;
    double epsilon = 1.0 / 32.0;
    int threads = 0;      // 0 uses MRT_THREADS, then the core count
};

struct RunResult {
    int exit_code = 0;
    std::string report;  // json
};

// The effective configuration as echoed in reports. Thread count is left out so that
// reports do not depend on it.
Json config_json(const RunConfig& cfg);

RunResult run(const RunConfig& cfg);
// Runs on an already loaded measure.
RunResult run(const RunConfig& cfg, const DiscreteMeasure& mu);

}  // namespace mrt::cli
