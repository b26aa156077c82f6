#pragma once

// Combinators that turn a separator or regression one-pass algorithm into an
// ANV one-pass algorithm with the same memory. The wrappers keep no state of
// their own: every bit of the BitState belongs to the inner algorithm.

#include <cstddef>
#include <cstdint>
#include <memory>

#include "nullstream/config.hpp"
#include "nullstream/streaming.hpp"

namespace nullstream {

struct ReductionConfig {
  double c4 = 0.3;          ///< Separator shift, sqrt(c1).
  double c_f = 0.2;         ///< Value of the inserted equation e_1^T w = c_f.
  double norm_floor = 0.1;  ///< Smallest ‖w_LR‖ accepted before normalizing.

  static ReductionConfig from(const Constants& k);
};

/// On ANV sample theta_i feeds (theta_i + c4 e_1/sqrt(d), +1) then
/// (theta_i - c4 e_1/sqrt(d), -1) to `lsp` (inner steps 2i and 2i+1) and
/// returns the inner output normalized.
std::unique_ptr<OnePassAlgorithm> anv_via_lsp(const OnePassAlgorithm& lsp,
                                              const ReductionConfig& cfg);

/// Feeds each theta_i as the equation theta_i^T w = 0 and inserts
/// e_1^T w = c_f after a uniformly random number i in {0, ..., d-1} of them
/// (i read from shared randomness). Returns w_LR / ‖w_LR‖, or throws
/// DegenerateOutput when ‖w_LR‖ < norm_floor.
std::unique_ptr<OnePassAlgorithm> anv_via_lr(const OnePassAlgorithm& lr,
                                             const ReductionConfig& cfg, std::uint64_t seed);

/// The insertion point anv_via_lr uses for a run with shared seed
/// `shared_seed`, wrapper seed `seed` and dimension d.
std::size_t lr_insertion_position(std::uint64_t shared_seed, std::uint64_t seed, std::size_t d);

}  // namespace nullstream
