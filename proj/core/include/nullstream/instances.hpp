#pragma once

// Generators and evaluators for the three problem families: approximate null
// vectors (ANV), linear separation (LSP) and linear regression (LR).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nullstream/linalg.hpp"
#include "nullstream/streaming.hpp"

namespace nullstream {

enum class AnvVariant { kGaussianRaw, kSphereConditioned };

struct AnvInstance {
  AnvVariant variant = AnvVariant::kGaussianRaw;
  std::size_t d = 0;
  Matrix vectors;  ///< (d-1) x d, one stream vector per row.
  Vector witness;  ///< Unit kernel vector of the rows.
  double c_f = 0.0;
  std::uint64_t seed = 0;
  std::size_t attempts = 1;  ///< Rejection-sampling draws used.
};

struct LspDataset {
  Matrix points;            ///< n x d.
  std::vector<int> labels;  ///< +1 / -1.
  Vector witness;
  double margin = 0.0;  ///< Claimed margin of the witness.

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

struct LspHardInstance {
  LspDataset data;
  Subspace v;  ///< In Gr(d/2, d); first m points are drawn from D_V.
  Subspace u;  ///< In Gr(d/2 - 1, d); last m points are drawn from D_U.
  std::size_t attempts = 1;
};

struct LrInstance {
  Matrix a;  ///< n x d, rows of norm <= 1.
  Vector b;
  Vector witness;
  std::size_t inserted_row = 0;  ///< Row holding the e_1 equation (0-based).
};

// --- ANV -------------------------------------------------------------------

AnvInstance gen_anv_gaussian(std::size_t d, std::uint64_t seed);

/// Draws d-1 uniform unit vectors until |e_1^T ker| >= c_f and orients the
/// kernel so e_1^T w* >= c_f. Refuses up front (AcceptanceTooRare, with the
/// exact acceptance probability in the message) when the expected number of
/// acceptances within max_attempts is below 0.01.
AnvInstance gen_anv_conditioned(std::size_t d, double c_f, std::uint64_t seed,
                                std::size_t max_attempts = 10000);

/// Exact acceptance probability of one conditioned draw,
/// Pr(|e_1^T ker| >= c_f), from the one-coordinate sphere marginal.
double conditioned_acceptance_probability(std::size_t d, double c_f);

/// Fraction of `attempts` unconditioned draws that meet the condition.
double conditioned_acceptance_rate(std::size_t d, double c_f, std::size_t attempts,
                                   std::uint64_t seed);

/// (1/d) sum (w^T g_i)^2 for Gaussian instances, sum (w^T theta_i)^2 for
/// conditioned ones. Throws NotUnit unless |‖w‖ - 1| <= 1e-6.
double anv_loss(const AnvInstance& inst, const Vector& w);

// --- LSP -------------------------------------------------------------------

/// Interleaved points (theta_i + c4 e_1/sqrt(d), +1), (theta_i - c4 e_1/sqrt(d), -1).
LspDataset gen_lsp_from_anv(const AnvInstance& inst, double c4);

/// One draw from D_S: x' uniform on S ∩ S^{d-1}, shifted by ±(c/4) e_1/sqrt(d)
/// with the matching label.
Sample sample_dv(const Subspace& s, double c, Rng& rng);

/// Hard separator instance: V, U conditioned on e_1^T ker(V ⊕ U) >= c_f, then m
/// draws from D_V followed by m draws from D_U.
LspHardInstance gen_lsp_hard(std::size_t d, std::size_t m, double c_f, double c,
                             std::uint64_t seed, std::size_t max_attempts = 10000);

/// Synthetic unit-norm family separable by a random unit w* with margin at
/// least gamma: x = y a w* + sqrt(1 - a^2) u, a = min(1, gamma + |g|/sqrt(d)).
LspDataset gen_margin_dataset(std::size_t d, std::size_t m, double gamma, std::uint64_t seed);

double margin_of(const Vector& w, const LspDataset& ds);
/// Fraction of points with y w^T x <= 0.
double classification_error(const Vector& w, const LspDataset& ds);

// --- LR --------------------------------------------------------------------

/// Inserts the equation e_1^T w = c_f after a uniformly random number of the
/// theta rows; witness = c_f w* / (e_1^T w*).
LrInstance gen_lr_from_anv(const AnvInstance& inst, std::uint64_t seed);

double lr_loss(const LrInstance& inst, const Vector& w);

// --- stream views and invariants -------------------------------------------

std::vector<Sample> to_samples(const AnvInstance& inst);
std::vector<Sample> to_samples(const LspDataset& ds);
std::vector<Sample> to_samples(const LrInstance& inst);

/// Throw InvalidArgument naming the first violated invariant.
void validate(const AnvInstance& inst);
void validate(const LspDataset& ds);
void validate(const LrInstance& inst);

}  // namespace nullstream
