#include "nullstream/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "nullstream/errors.hpp"
#include "nullstream/parallel.hpp"
#include "nullstream/sphere_marginal.hpp"
#include "nullstream/streaming.hpp"

namespace nullstream {

namespace {

void finish(LemmaReport& report) {
  report.trials = report.per_trial.size();
  const auto passes = std::count_if(report.per_trial.begin(), report.per_trial.end(),
                                    [](const TrialRecord& t) { return t.passed; });
  report.pass_fraction =
      report.trials == 0 ? 0.0 : static_cast<double>(passes) / static_cast<double>(report.trials);
}

double column_min(const std::vector<TrialRecord>& trials, const std::string& key) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : trials) m = std::min(m, t.values.at(key));
  return m;
}

double column_max(const std::vector<TrialRecord>& trials, const std::string& key) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) m = std::max(m, t.values.at(key));
  return m;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::vector<TrialRecord> run_trials(std::size_t trials, std::uint64_t seed,
                                    const std::function<void(TrialRecord&, Rng&)>& body) {
  std::vector<TrialRecord> out(trials);
  parallel_for(trials, [&](std::size_t i) {
    TrialRecord& rec = out[i];
    rec.index = i;
    rec.seed = derive_seed(seed, i);
    Rng rng(rec.seed);
    body(rec, rng);
  });
  return out;
}

}  // namespace

double ks_statistic(std::vector<double>& samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

LemmaReport certify_no_joint_sol(const NoJointSolParams& p) {
  if (p.d < 8 || p.d % 2 != 0) throw InvalidArgument("no-joint-sol needs an even d >= 8");
  if (p.trials == 0) throw InvalidArgument("no-joint-sol needs at least one trial");
  const std::size_t half = p.d / 2;
  const double need = p.delta * static_cast<double>(p.d) / 2.0;
  const double threshold = 3.0 * p.c_emp * p.c_emp;
  const auto probe_dim = std::max<std::size_t>(
      1, std::min(half, static_cast<std::size_t>(std::ceil(p.eta * static_cast<double>(p.d)))));

  LemmaReport report;
  report.lemma_id = "no-joint-sol";
  report.d = p.d;
  report.seed = p.seed;
  report.per_trial = run_trials(p.trials, p.seed, [&](TrialRecord& rec, Rng& rng) {
    const Subspace v1 = sample_grassmannian(half, p.d, rng);
    Subspace v2;
    double dist2 = 0.0;
    std::size_t draws = 0;
    do {
      if (draws == p.max_draws_per_trial) {
        throw AcceptanceTooRare("no pair at chordal distance^2 >= " + std::to_string(need) +
                                " after " + std::to_string(draws) + " draws");
      }
      v2 = sample_grassmannian(half, p.d, rng);
      const double c = chordal_distance(v1, v2);
      dist2 = c * c;
      ++draws;
    } while (dist2 < need);
    const Subspace u = sample_grassmannian(half - 1, p.d, rng);

    const std::vector<Subspace> triple{v1, v2, u};
    const double lambda = min_eig_projector_sum(triple).lambda_min;
    const std::vector<Subspace> pair{v1, u};
    const double pair_lambda = min_eig_projector_sum(pair).lambda_min;
    const std::vector<Subspace> forced{v1, v1, u};
    const double control_lambda = min_eig_projector_sum(forced).lambda_min;

    // Low-dimensional W inside V1-perp, and the smallest ‖P_V2 w‖ over unit w in W.
    const Subspace v1_perp = complement(v1);
    const Subspace w_in = sample_grassmannian(probe_dim, v1_perp.dim(), rng);
    const Matrix w_basis = w_in.basis() * v1_perp.basis();
    const double probe = singular_values(v2.basis() * w_basis.transpose()).min();

    rec.values = {{"lambda_min", lambda},
                  {"chordal_sq", dist2},
                  {"draws", static_cast<double>(draws)},
                  {"pair_lambda_min", pair_lambda},
                  {"control_lambda_min", control_lambda},
                  {"wperp_probe_min", probe}};
    rec.passed = lambda >= threshold;
  });
  finish(report);
  report.passed = report.trials > 0 && report.pass_fraction == 1.0;
  if (report.trials > 0) {
    auto& s = report.statistics;
    s["min_lambda_min"] = column_min(report.per_trial, "lambda_min");
    s["threshold"] = threshold;
    s["c_emp"] = p.c_emp;
    s["delta"] = p.delta;
    s["max_pair_lambda_min"] = column_max(report.per_trial, "pair_lambda_min");
    s["max_control_lambda_min"] = column_max(report.per_trial, "control_lambda_min");
    s["min_wperp_probe"] = column_min(report.per_trial, "wperp_probe_min");
    s["wperp_probe_dim"] = static_cast<double>(probe_dim);
  }
  return report;
}

NoJointSolControl no_joint_sol_control(std::size_t d, std::uint64_t seed) {
  if (d < 4 || d % 2 != 0) throw InvalidArgument("control needs an even d >= 4");
  Rng rng(seed);
  const Subspace v = sample_grassmannian(d / 2, d, rng);
  const Subspace u = sample_grassmannian(d / 2 - 1, d, rng);
  NoJointSolControl out;
  const std::vector<Subspace> forced{v, v, u};
  out.certificate = min_eig_projector_sum(forced);
  const Subspace ker = complement(direct_sum(v, u));
  out.kernel = ker.basis().row(0).transpose();
  apply_sign_convention(out.kernel);
  return out;
}

std::pair<double, double> sandwich_bounds(double k_max, double t) {
  const double a = (1.0 + t) * std::sqrt(k_max);
  if (!(a < 1.0)) throw InvalidArgument("sandwich bound needs (1+t) sqrt(k_max) < 1");
  return {1.0 / ((1.0 + a) * (1.0 + a)), 1.0 / ((1.0 - a) * (1.0 - a))};
}

std::pair<double, double> sandwich_extremes(const Matrix& g, std::size_t split) {
  if (split == 0 || split >= static_cast<std::size_t>(g.rows())) {
    throw InvalidArgument("split must leave both row blocks nonempty");
  }
  const Subspace v = orthonormalize(Matrix(g.topRows(split)));
  const Subspace u = orthonormalize(Matrix(g.bottomRows(g.rows() - split)));
  const Subspace row = orthonormalize(g);
  const Matrix& r = row.basis();
  const Matrix a = r * (v.projector() + u.projector()) * r.transpose();
  const Matrix gr = g * r.transpose();
  const Matrix b = gr.transpose() * gr;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(a, b, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DegenerateInput("pencil is not definite");
  const Vector& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

LemmaReport certify_sandwich(std::size_t d, double t, std::size_t trials, std::uint64_t seed) {
  if (d < 4 || d % 2 != 0) throw InvalidArgument("sandwich needs an even d >= 4");
  const auto [lower, upper] = sandwich_bounds(0.5, t);
  LemmaReport report;
  report.lemma_id = "sandwich";
  report.d = d;
  report.seed = seed;
  report.per_trial = run_trials(trials, seed, [&](TrialRecord& rec, Rng& rng) {
    const Matrix g = sample_gaussian(d - 1, d, rng, 1.0 / std::sqrt(static_cast<double>(d)));
    const auto [lo, hi] = sandwich_extremes(g, d / 2);
    rec.values = {{"rho_min", lo}, {"rho_max", hi}};
    rec.passed = lo >= lower && hi <= upper;
  });
  finish(report);
  report.passed = report.pass_fraction >= 0.95;
  auto& s = report.statistics;
  s["lower_bound"] = lower;
  s["upper_bound"] = upper;
  s["t"] = t;
  if (report.trials > 0) {
    s["min_rho_min"] = column_min(report.per_trial, "rho_min");
    s["max_rho_max"] = column_max(report.per_trial, "rho_max");
  }
  return report;
}

LemmaReport singular_value_experiment(std::size_t n_rows, std::size_t d, double t,
                                      std::size_t trials, std::uint64_t seed) {
  if (d == 0 || n_rows < d) throw InvalidArgument("singular value experiment needs N >= d >= 1");
  const double sn = std::sqrt(static_cast<double>(n_rows));
  const double sd = std::sqrt(static_cast<double>(d));
  const double low = sn - sd - t;
  const double high = sn + sd + t;
  const std::vector<double> taus{0.5, 0.75, 0.9};

  LemmaReport report;
  report.lemma_id = "singular-values";
  report.d = d;
  report.seed = seed;
  report.per_trial = run_trials(trials, seed, [&](TrialRecord& rec, Rng& rng) {
    const Spectrum s = singular_values(sample_gaussian(n_rows, d, rng));
    rec.values = {{"sigma_min", s.min()}, {"sigma_max", s.max()}};
    rec.values["lower_holds"] = s.min() >= low ? 1.0 : 0.0;
    for (double tau : taus) {
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(tau * static_cast<double>(d))));
      const double ratio = s.values[k - 1] / ((1.0 - tau) * sd);
      rec.values["mid_ratio_" + std::to_string(static_cast<int>(tau * 100))] = ratio;
    }
    rec.passed = s.min() >= low && s.max() <= high;
  });
  finish(report);
  const double p_bound = 2.0 * std::exp(-t * t / 2.0);
  const double n = static_cast<double>(std::max<std::size_t>(report.trials, 1));
  const double p_clamped = std::min(p_bound, 1.0);
  const double slack = 3.0 * std::sqrt(p_clamped * (1.0 - p_clamped) / n);
  const double violation = 1.0 - report.pass_fraction;
  report.passed = report.trials > 0 && violation <= p_bound + slack;

  auto& s = report.statistics;
  s["violation_rate"] = violation;
  s["violation_bound"] = p_bound;
  s["binomial_slack"] = slack;
  s["sigma_min_bound"] = low;
  s["sigma_max_bound"] = high;
  if (report.trials > 0) {
    s["min_sigma_min"] = column_min(report.per_trial, "sigma_min");
    s["max_sigma_max"] = column_max(report.per_trial, "sigma_max");
    double lower_holds = 0.0;
    for (const auto& r : report.per_trial) lower_holds += r.values.at("lower_holds");
    s["lower_hold_fraction"] = lower_holds / n;
    for (double tau : taus) {
      const std::string key = "mid_ratio_" + std::to_string(static_cast<int>(tau * 100));
      std::vector<double> xs;
      xs.reserve(report.per_trial.size());
      for (const auto& r : report.per_trial) xs.push_back(r.values.at(key));
      s[key + "_q01"] = quantile(xs, 0.01);
      s[key + "_q50"] = quantile(xs, 0.5);
      s[key + "_q99"] = quantile(xs, 0.99);
    }
  }
  return report;
}

LemmaReport sphere_marginal_tests(std::size_t d, std::size_t samples, double c_f,
                                  std::uint64_t seed) {
  if (d < 4) throw InvalidArgument("sphere marginal tests need d >= 4");
  if (samples == 0) throw InvalidArgument("need at least one sample");
  const double sd = std::sqrt(static_cast<double>(d));

  // Samples are drawn in fixed-size blocks so the result does not depend on
  // the thread count.
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> scaled(samples);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      scaled[i] = sd * sample_uniform_sphere(d, rng)(0);
    }
  });

  const double tail_hits = static_cast<double>(
      std::count_if(scaled.begin(), scaled.end(), [&](double x) { return x / sd >= c_f; }));
  const double n = static_cast<double>(samples);
  const double empirical_tail = tail_hits / n;
  const double exact_tail = sphere_coordinate_tail(d, c_f);
  const double tail_sigma = std::sqrt(exact_tail * (1.0 - exact_tail) / n);

  std::vector<double> copy = scaled;
  const double ks_normal = ks_statistic(copy, normal_cdf);
  const double ks_exact =
      ks_statistic(scaled, [&](double x) { return sphere_coordinate_cdf(d, x / sd); });

  LemmaReport report;
  report.lemma_id = "sphere-marginal";
  report.d = d;
  report.seed = seed;
  TrialRecord rec;
  rec.seed = seed;
  rec.values = {{"ks_exact", ks_exact},
                {"ks_normal", ks_normal},
                {"empirical_tail", empirical_tail},
                {"exact_tail", exact_tail}};
  const bool ks_ok = ks_exact <= 0.01 && ks_normal <= 0.03;
  const bool tail_ok = std::abs(empirical_tail - exact_tail) <= 4.0 * tail_sigma + 1.0 / n;
  rec.passed = ks_ok && tail_ok;
  report.per_trial.push_back(rec);
  finish(report);
  report.passed = rec.passed;

  auto& s = report.statistics;
  s = rec.values;
  s["samples"] = n;
  s["c_f"] = c_f;
  s["tail_sigma"] = tail_sigma;
  // Exponent alpha with exact tail = exp(-alpha d).
  s["alpha"] = exact_tail > 0.0 ? -std::log(exact_tail) / static_cast<double>(d)
                                 : std::numeric_limits<double>::infinity();
  return report;
}

LemmaReport sphere_concentration_test(std::size_t d, std::size_t samples, std::uint64_t seed) {
  if (d < 2 || d % 2 != 0) throw InvalidArgument("sphere concentration test needs an even d");
  if (samples < 2) throw InvalidArgument("need at least two samples");
  Rng rng(seed);
  const Subspace u = sample_grassmannian(d / 2, d, rng);
  std::vector<double> f(samples);
  for (auto& x : f) x = project(u, sample_uniform_sphere(d, rng)).norm();
  const double n = static_cast<double>(samples);
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
  double var = 0.0;
  for (double x : f) var += (x - mean) * (x - mean);
  const double std_dev = std::sqrt(var / (n - 1.0));
  const double bound = 3.0 / std::sqrt(static_cast<double>(d));

  LemmaReport report;
  report.lemma_id = "sphere-concentration";
  report.d = d;
  report.seed = seed;
  TrialRecord rec;
  rec.seed = seed;
  rec.values = {{"mean", mean}, {"std", std_dev}, {"std_bound", bound}};
  rec.passed = std_dev <= bound;
  report.per_trial.push_back(rec);
  finish(report);
  report.passed = rec.passed;
  report.statistics = rec.values;
  report.statistics["samples"] = n;
  report.statistics["std_sqrt_d"] = std_dev * std::sqrt(static_cast<double>(d));
  return report;
}

LemmaReport certify_comorth(std::size_t d, std::size_t trials, std::uint64_t seed) {
  if (d < 2 || d % 2 != 0) throw InvalidArgument("comorth check needs an even d >= 2");
  LemmaReport report;
  report.lemma_id = "comorth";
  report.d = d;
  report.seed = seed;
  report.per_trial = run_trials(trials, seed, [&](TrialRecord& rec, Rng& rng) {
    const Subspace u = sample_grassmannian(d / 2, d, rng);
    const Subspace v = sample_grassmannian(d / 2, d, rng);
    const double a = chordal_distance(u, v);
    const double b = chordal_distance(complement(u), complement(v));
    rec.values = {{"distance", a}, {"complement_distance", b}, {"deviation", std::abs(a - b)}};
    rec.passed = std::abs(a - b) <= 1e-8;
  });
  finish(report);
  report.passed = report.trials > 0 && report.pass_fraction == 1.0;
  if (report.trials > 0) {
    report.statistics["max_deviation"] = column_max(report.per_trial, "deviation");
  }
  return report;
}

PackingResult greedy_packing(std::size_t k, std::size_t d, double radius,
                             std::size_t candidate_budget, std::uint64_t seed) {
  if (d > 24) throw InvalidArgument("greedy packing is limited to d <= 24");
  if (k > d) throw InvalidArgument("packing needs k <= d");
  PackingResult out;
  Rng rng(seed);
  double min_kept = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidate_budget; ++i) {
    Subspace cand = sample_grassmannian(k, d, rng);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& s : out.packing) {
      nearest = std::min(nearest, chordal_distance(cand, s));
      if (nearest < radius) break;
    }
    TrialRecord rec;
    rec.index = i;
    rec.seed = seed;
    rec.passed = nearest >= radius;
    rec.values = {{"nearest", nearest}};
    out.report.per_trial.push_back(std::move(rec));
    if (nearest >= radius) {
      if (!out.packing.empty()) min_kept = std::min(min_kept, nearest);
      out.packing.push_back(std::move(cand));
    }
  }
  auto& r = out.report;
  r.lemma_id = "packing";
  r.d = d;
  r.seed = seed;
  finish(r);
  r.passed = true;
  r.statistics = {{"k", static_cast<double>(k)},
                  {"radius", radius},
                  {"candidates", static_cast<double>(candidate_budget)},
                  {"retained", static_cast<double>(out.packing.size())}};
  if (out.packing.size() > 1) r.statistics["min_pairwise_distance"] = min_kept;
  return out;
}

}  // namespace nullstream
