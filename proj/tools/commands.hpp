#pragma once

#include <string>

#include "chblab/config.hpp"

namespace chb::cli {

enum ExitCode { Ok = 0, ConfigFailure = 2, SolverFailure = 3, PropertyViolation = 4 };

/// Runs one experiment family, writing every artifact into out_dir.
int dispatch(const RunConfig& cfg, const std::string& out_dir);

int worker_threads();

}  // namespace chb::cli
