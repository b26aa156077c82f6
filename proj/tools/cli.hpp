#pragma once

// Command implementations behind the `nullstream` executable. Kept in a
// library so the tests can drive whole commands in-process.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nullstream/config.hpp"
#include "nullstream/errors.hpp"
#include "nullstream/io.hpp"

namespace nullstream::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  ///< verify: criteria not met.
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitBudget = 4;
inline constexpr int kExitAlgorithm = 5;

int exit_code_for(ErrorKind kind);

struct GenOptions {
  std::size_t d = 64;
  std::size_t m = 0;  ///< lsp-hard: points per half (default d); margin: points (default 1000).
  Constants k;
  double gamma = 0.3;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 10000;
};

/// problem: anv-gaussian, anv-conditioned, lsp, lsp-hard, lr, margin.
InstanceFile generate(const std::string& problem, const GenOptions& opt);

/// Witness margin, residuals and generation counters of an instance.
Json diagnostics(const InstanceFile& f);

struct RunOptions {
  std::string alg;
  std::size_t budget_bits = 0;
  std::uint64_t seed = 0;
  bool shuffled = false;
  std::string via = "none";  ///< none, lsp or lr.
  Constants k;
  std::size_t dprime = 0;     ///< proj-separator; 0 means min(d, 600).
  std::size_t subsample = 0;  ///< proj-separator; 0 means 600.
  unsigned quant_bits = 16;
  double quant_range = 4.0;
  std::size_t max_passes = 1'000'000;
};

/// Runs one algorithm on an instance under the bit budget and returns the
/// metrics object printed by `run`. Library errors propagate.
Json run_instance(const InstanceFile& f, const RunOptions& opt);

/// Grid sweep described by a JSON spec; see README for the schema. Appends
/// rows to the spec's output CSV, skipping keys already present. Returns the
/// number of rows written.
std::size_t run_experiment(const Json& spec, std::ostream& log);

/// Column order of experiment CSV files.
const std::vector<std::string>& experiment_columns();

/// Full command-line entry point.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nullstream::cli
