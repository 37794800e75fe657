#pragma once

#include <ostream>
#include <string>

#include "config.hpp"
#include "pshlab/io.hpp"

namespace pshlab {

struct RunOutcome {
    Json report;
    std::string summary;
};

/// Validate, run one experiment, and write report.json (plus scan.csv /
/// density.csv when the experiment produces them) under out_dir. Throws
/// InvalidArgument for config errors, PreconditionError for refused
/// preconditions, ResourceLimitError above the memory ceiling.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                          std::uint64_t seed, int threads);

void print_catalog(std::ostream& os, bool json);

extern const char* kVersion;

}  // namespace pshlab
