#pragma once

// Numerical certificates for the geometric facts behind the lower bounds.
//
// Statements of the form "for all unit v" are checked through exact
// eigenvalue reductions (smallest eigenvalue of a projector sum, extreme
// generalized eigenvalues of a pencil), never by sampling v. Every trial uses
// the seed derive_seed(seed, trial_index), so reports are reproducible and
// trials may run in parallel.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nullstream/linalg.hpp"

namespace nullstream {

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool passed = false;
  std::map<std::string, double> values;
};

struct LemmaReport {
  std::string lemma_id;
  std::size_t d = 0;
  std::size_t trials = 0;
  double pass_fraction = 0.0;
  std::map<std::string, double> statistics;
  std::uint64_t seed = 0;
  /// Whether the operation's acceptance rule holds (documented per operation).
  bool passed = false;
  std::vector<TrialRecord> per_trial;
};

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and a
/// continuous CDF. Sorts `samples` in place.
double ks_statistic(std::vector<double>& samples, const std::function<double(double)>& cdf);

// --- projector-sum certificate ----------------------------------------------

struct NoJointSolParams {
  std::size_t d = 64;
  double delta = 0.5;   ///< Require chordal(V1, V2)^2 >= delta * d / 2.
  double c_emp = 0.05;  ///< Trial passes iff lambda_min >= 3 c_emp^2.
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double eta = 0.125;  ///< Dimension fraction of the W-perp probe.
  std::size_t max_draws_per_trial = 1000;
};

/// Per trial: V1, V2 in Gr(d/2, d) redrawn until far apart, U in Gr(d/2-1, d);
/// lambda_min(P_V1 + P_V2 + P_U) >= 3 c_emp^2 certifies that every unit v has
/// max(‖P_V1 v‖, ‖P_V2 v‖, ‖P_U v‖) >= c_emp. Passed iff every trial passes.
/// Also reports the two-subspace control lambda_min(P_V1 + P_U), the forced
/// V2 = V1 control, and the W-perp probe (reported, not asserted).
LemmaReport certify_no_joint_sol(const NoJointSolParams& params);

/// The distance-0 control: lambda_min(2 P_V + P_U) with its witness, plus the
/// kernel of V ⊕ U it must match.
struct NoJointSolControl {
  EigCertificate certificate;
  Vector kernel;
};
NoJointSolControl no_joint_sol_control(std::size_t d, std::uint64_t seed);

// --- Gaussian sandwich ---------------------------------------------------------

/// (lower, upper) = ((1 + (1+t) sqrt(k_max))^-2, (1 - (1+t) sqrt(k_max))^-2).
std::pair<double, double> sandwich_bounds(double k_max, double t);

/// Extreme values of (‖P_V v‖^2 + ‖P_U v‖^2) / ‖G v‖^2 over the row space of G,
/// where V spans the first `split` rows and U the rest. Solved as a
/// generalized symmetric eigenproblem after reducing to a row-space basis.
std::pair<double, double> sandwich_extremes(const Matrix& g, std::size_t split);

/// Per trial: G is (d-1) x d with N(0, 1/d) entries, split after d/2 rows;
/// passes iff [rho_min, rho_max] lies inside sandwich_bounds(1/2, t).
/// Passed iff pass_fraction >= 0.95.
LemmaReport certify_sandwich(std::size_t d, double t, std::size_t trials, std::uint64_t seed);

// --- random matrices -----------------------------------------------------------

/// Per trial: N x d standard Gaussian A; the trial passes iff
/// sqrt(N) - sqrt(d) - t <= sigma_min and sigma_max <= sqrt(N) + sqrt(d) + t.
/// Passed iff the violation rate is at most 2 exp(-t^2/2) plus three binomial
/// standard deviations. Also reports quantiles of sigma_{tau d} / ((1-tau) sqrt(d))
/// for tau in {0.5, 0.75, 0.9}.
LemmaReport singular_value_experiment(std::size_t n_rows, std::size_t d, double t,
                                      std::size_t trials, std::uint64_t seed);

// --- sphere ------------------------------------------------------------------

/// KS distances of sqrt(d) e_1^T theta against the exact coordinate law and
/// N(0, 1), and the empirical vs exact Pr(e_1^T theta >= c_f). Passed iff
/// KS(exact) <= 0.01, KS(normal) <= 0.03 and the tail frequency is within
/// four binomial standard deviations of the exact tail.
LemmaReport sphere_marginal_tests(std::size_t d, std::size_t samples, double c_f,
                                  std::uint64_t seed);

/// f(y) = ‖P_U y‖ for one random U in Gr(d/2, d) and uniform y. Passed iff
/// std(f) <= 3 / sqrt(d).
LemmaReport sphere_concentration_test(std::size_t d, std::size_t samples, std::uint64_t seed);

/// |d(U, V) - d(U-perp, V-perp)| over random pairs in Gr(d/2, d). Passed iff
/// the maximum deviation is at most 1e-8.
LemmaReport certify_comorth(std::size_t d, std::size_t trials, std::uint64_t seed);

// --- packing -----------------------------------------------------------------

struct PackingResult {
  std::vector<Subspace> packing;
  LemmaReport report;
};

/// Greedily keeps sampled subspaces of Gr(k, d) whose chordal distance to all
/// kept ones is >= radius. Restricted to d <= 24.
PackingResult greedy_packing(std::size_t k, std::size_t d, double radius,
                             std::size_t candidate_budget, std::uint64_t seed);

}  // namespace nullstream
