#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccres/config.hpp"

namespace ccres::cli {

enum ExitCode : int { ok = 0, config_error = 1, numerical_failure = 2 };

struct CommandIo {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::filesystem::path> csv;
  bool verbose = false;
};

/// Seven significant digits, e.g. "2.185562e+00i".
std::string format_k(cplx k);

/// CSV number: 9 significant digits, scientific, '.' as decimal point.
std::string csv_number(double x);

int cmd_roots(const RunConfig& config, CommandIo& io);
int cmd_continue(const RunConfig& config, CommandIo& io);
int cmd_check(const RunConfig& config, CommandIo& io);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The property suites behind `check`; each applicable suite adds one outcome.
std::vector<CheckOutcome> run_checks(const RunConfig& config, bool verbose, std::ostream& log);

}  // namespace ccres::cli
