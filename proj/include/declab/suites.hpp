#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "declab/arith.hpp"
#include "declab/config.hpp"
#include "declab/report.hpp"

namespace declab {

const std::vector<std::string>& valid_suites();

struct Job {
    std::string key;
    std::function<std::vector<Item>()> run;
};

struct SuiteSpec {
    std::string suite;
    uint64_t seed = 1;
    Config config;
    ArithCaps caps;
    std::vector<Job> jobs;  // validated work list

    std::string digest() const;
};

// Validates every referenced parameter and builds the work list; config errors throw
// before any evaluation starts. seed_override replaces the config's seed when >= 0.
SuiteSpec make_suite(const std::string& suite, const Config& cfg, int64_t seed_override = -1);

// Runs the jobs on the worker pool. An item whose evaluation throws is recorded as a
// failure with its message; the run continues.
RunRecord run_suite(const SuiteSpec& spec);

// Corpus seed for instance k of a run.
uint64_t instance_seed(uint64_t base, int64_t k);

}  // namespace declab
