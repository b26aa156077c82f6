// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <boost/math/special_functions/beta.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nullstream/algorithms.hpp"
#include "nullstream/errors.hpp"
#include "nullstream/instances.hpp"
#include "nullstream/reductions.hpp"
#include "nullstream/sphere_marginal.hpp"
#include "nullstream/streaming.hpp"
#include "nullstream/verification.hpp"
#include "../support.hpp"

using namespace nullstream;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
  template <class T>
  void note(const char* name, T value) {
    notes << ' ' << name << '=' << value;
  }
};

bool same_bytes(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

Vector e1(std::size_t d) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
  v[0] = 1.0;
  return v;
}

// Pr(|e_1^T theta| >= c) for uniform theta on S^{d-1}: theta_1^2 ~ Beta(1/2, (d-1)/2).
double two_sided_tail(std::size_t d, double c) {
  return boost::math::ibeta((static_cast<double>(d) - 1.0) / 2.0, 0.5, 1.0 - c * c);
}

// --- criteria ----------------------------------------------------------------

void baselines(Check& c) {
  const std::size_t d = 200;
  double mean = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const AnvInstance inst = gen_anv_gaussian(d, derive_seed(1, t));
    const Vector w = run_one_pass(*random_unit_predictor(d, derive_seed(2, t)), to_samples(inst), 1, t);
    mean += anv_loss(inst, w) / 100.0;
  }
  c.note("mean_random_loss", mean);
  c.require(std::abs(mean - (d - 1.0) / d) <= 0.05, "random-unit mean loss");

  const Constants k;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const LrInstance lr = gen_lr_from_anv(gen_anv_conditioned(64, k.c_f, t), t);
    const double loss = lr_loss(lr, run_one_pass(*zero_predictor(), to_samples(lr), 32, t));
    worst = std::max(worst, std::abs(loss - k.c_f * k.c_f));
  }
  c.note("zero_lr_deviation", worst);
  c.require(worst == 0.0, "zero predictor LR loss equals c_f^2");
}

void offline(Check& c) {
  double worst = 0.0;
  for (std::size_t d : {32, 64}) {
    const std::size_t budget = 64 * d * (d - 1) + 1024;
    const AnvInstance anv = gen_anv_gaussian(d, d);
    const auto samples = to_samples(anv);
    worst = std::max(worst, anv_loss(anv, run_one_pass(*offline_kernel_solver(), samples, budget, 0)));
    const LrInstance lr = gen_lr_from_anv(gen_anv_conditioned(d, 0.2, d), d);
    const auto lr_samples = to_samples(lr);
    worst = std::max(worst, lr_loss(lr, run_one_pass(*offline_lstsq_solver(), lr_samples, budget, 0)));

    const std::pair<std::unique_ptr<OnePassAlgorithm>, const std::vector<Sample>*> runs[] = {
        {offline_kernel_solver(), &samples}, {offline_lstsq_solver(), &lr_samples}};
    for (const auto& [alg, input] : runs) {
      bool raised = false;
      try {
        run_one_pass(*alg, *input, d * 64, 0);
      } catch (const BudgetViolation&) {
        raised = true;
      }
      c.require(raised, alg->name() + " BudgetViolation at d*64 bits, d=" + std::to_string(d));
    }
  }
  c.note("max_loss", worst);
  c.require(worst < 1e-12, "offline loss < 1e-12");
}

void lsp_chain(Check& c) {
  const Constants k;  // c1 = 0.09
  const std::size_t d = 64;
  const ReductionConfig cfg = ReductionConfig::from(k);
  const double margin_floor = 0.9 * k.c_f * std::sqrt(k.c1) / std::sqrt(static_cast<double>(d));
  double worst_loss = 0.0, worst_margin = 1.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const AnvInstance inst = gen_anv_conditioned(d, k.c_f, s);
    const LspDataset lsp = gen_lsp_from_anv(inst, cfg.c4);
    worst_margin = std::min(worst_margin, margin_of(inst.witness, lsp));
    const auto wrapped = anv_via_lsp(*offline_separator(), cfg);
    const Vector w = run_one_pass(*wrapped, to_samples(inst), offline_separator_bits(d, 2 * (d - 1)), s);
    worst_loss = std::max(worst_loss, anv_loss(inst, w));
  }
  c.note("max_anv_loss", worst_loss);
  c.note("min_witness_margin", worst_margin);
  c.note("margin_floor", margin_floor);
  c.require(worst_loss <= k.c1, "anv_loss <= c1");
  c.require(worst_margin >= margin_floor, "witness margin");
}

void lr_chain(Check& c) {
  const Constants k;
  const std::size_t d = 64;
  const ReductionConfig cfg = ReductionConfig::from(k);
  const double bound = std::min(k.c1 * k.c_f * k.c_f / 4.0, k.c_f * k.c_f / 4.0);
  double worst_residual = 0.0, worst_norm = 0.0, worst_solver = 0.0, worst_perturbed = 0.0;
  Rng rng(44);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const AnvInstance inst = gen_anv_conditioned(d, k.c_f, s);
    const LrInstance lr = gen_lr_from_anv(inst, s);
    worst_residual = std::max(worst_residual, (lr.a * lr.witness - lr.b).norm());
    worst_norm = std::max(worst_norm, lr.witness.norm());

    const auto wrapped = anv_via_lr(*offline_lstsq_solver(), cfg, s);
    const Vector w = run_one_pass(*wrapped, to_samples(inst), offline_lstsq_bits(d), s);
    worst_solver = std::max(worst_solver, anv_loss(inst, w));

    for (int rep = 0; rep < 10; ++rep) {
      const Vector u = sample_uniform_sphere(d, rng);
      const double scale = std::sqrt(bound) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Vector perturbed = lr.witness + u * (scale / (lr.a * u).norm());
      if (lr_loss(lr, perturbed) > bound) continue;
      const Vector out =
          run_one_pass(*anv_via_lr(nullstream::testing::Constant(perturbed), cfg, s), to_samples(inst), 1, s);
      worst_perturbed = std::max(worst_perturbed, anv_loss(inst, out));
    }
  }
  c.note("max_residual", worst_residual);
  c.note("max_witness_norm", worst_norm);
  c.note("max_solver_loss", worst_solver);
  c.note("max_perturbed_loss", worst_perturbed);
  c.require(worst_residual <= 1e-10, "witness residual");
  c.require(worst_norm <= 1.0, "witness norm");
  c.require(worst_solver < 1e-10, "lstsq via lr loss");
  c.require(worst_perturbed <= k.c1, "perturbed outputs");
}

void protocol_simulation(Check& c) {
  std::size_t runs = 0;
  for (const auto& name : registered_algorithms()) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      const std::uint64_t seed = derive_seed(500, t);
      Rng rng(seed);
      const std::size_t d = 8 + seed % 9;
      std::vector<Sample> samples;
      std::size_t budget = 0;
      AlgorithmParams p;
      p.d = d;
      p.seed = seed;
      p.projection = {d, 6, 12, 4.0, 100000, seed};
      if (name == "offline-lstsq") {
        samples = to_samples(gen_lr_from_anv(gen_anv_conditioned(d, 0.2, seed), seed));
        budget = offline_lstsq_bits(d);
      } else if (name == "offline-separator" || name == "proj-separator") {
        const LspDataset ds = gen_margin_dataset(d, 20, 0.3, seed);
        samples = to_samples(ds);
        budget = name == "proj-separator" ? projection_separator_bits(p.projection)
                                          : offline_separator_bits(d, ds.size());
      } else {
        samples = to_samples(gen_anv_gaussian(d, seed));
        budget = offline_kernel_bits(d, d - 1);
      }
      const auto alg = make_algorithm(name, p);
      const Vector direct = run_one_pass(*alg, samples, budget, seed);
      const std::size_t split = rng() % (samples.size() + 1);
      const std::span<const Sample> all(samples);
      const auto proto = one_pass_to_protocol(*alg, split);
      const auto tr = run_protocol(*proto, all.first(split), all.subspan(split), budget, seed);
      c.require(same_bytes(direct, tr.output), name + " output bytes, trial " + std::to_string(t));
      c.require(tr.message_bits() == budget, name + " message length, trial " + std::to_string(t));
      ++runs;
    }
  }
  c.note("runs", runs);
}

void upper_bound(Check& c) {
  const std::size_t d = 1024, m = 1000;
  int good = 0;
  std::size_t max_gap = 0;
  double worst_error = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const LspDataset ds = gen_margin_dataset(d, m, 0.3, derive_seed(600, s));
    const ProjectionSeparatorConfig cfg{600, 600, 16, 4.0, 10000, s};
    const std::size_t declared = projection_separator_bits(cfg);
    double error = 1.0;
    try {
      const auto r = run_one_pass_traced(*projection_separator(cfg), to_samples(ds), declared, s);
      error = classification_error(r.output, ds);
      max_gap = std::max(max_gap, declared - r.peak_state_bits);
    } catch (const NotSeparableInProjection&) {
    }
    worst_error = std::max(worst_error, error);
    if (error <= 0.1) ++good;
  }
  c.note("seeds_ok", good);
  c.note("max_error", worst_error);
  c.note("max_declared_minus_peak_bits", max_gap);
  c.require(good >= 18, "error <= 0.1 in >= 18/20 seeds");
  c.require(max_gap < 8, "state bits within one byte of the declared size");
}

void certificates(Check& c) {
  NoJointSolParams p;  // d=64, 50 trials, delta=0.5, c_emp=0.05
  p.seed = 7;
  const LemmaReport njs = certify_no_joint_sol(p);
  const NoJointSolControl control = no_joint_sol_control(64, 7);
  c.note("no_joint_sol_pass_fraction", njs.pass_fraction);
  c.note("distance0_lambda_min", control.certificate.lambda_min);
  c.require(njs.pass_fraction == 1.0, "no-joint-sol pass fraction");
  c.require(control.certificate.lambda_min <= 1e-10, "distance-0 control");

  const LemmaReport sw = certify_sandwich(128, 0.2, 100, 7);
  const double lo = sw.statistics.at("lower_bound"), hi = sw.statistics.at("upper_bound");
  c.note("sandwich_pass_fraction", sw.pass_fraction);
  c.note("sandwich_bounds", "[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
  c.require(sw.pass_fraction >= 0.95, "sandwich pass fraction");
  c.require(std::abs(lo - 0.2926) < 5e-4 && std::abs(hi - 43.56) < 5e-2, "sandwich bound values");

  const LemmaReport co = certify_comorth(32, 100, 7);
  c.note("comorth_max_deviation", co.statistics.at("max_deviation"));
  c.require(co.statistics.at("max_deviation") <= 1e-8, "comorth deviation");
}

void distributions(Check& c) {
  const LemmaReport sm = sphere_marginal_tests(64, 100000, 0.2, 8);
  c.note("ks_normal", sm.statistics.at("ks_normal"));
  c.note("ks_exact", sm.statistics.at("ks_exact"));
  c.require(sm.statistics.at("ks_normal") <= 0.03, "KS vs normal");
  c.require(sm.statistics.at("ks_exact") <= 0.01, "KS vs exact marginal");
  // The exact marginal the KS test uses agrees with the incomplete-beta law.
  double cdf_gap = 0.0;
  for (double x = -0.9; x <= 0.9; x += 0.05) {
    const double ib = 0.5 * boost::math::ibeta(31.5, 0.5, 1.0 - x * x);
    cdf_gap = std::max(cdf_gap, std::abs(sphere_coordinate_cdf(64, x) - (x < 0 ? ib : 1.0 - ib)));
  }
  c.note("marginal_oracle_gap", cdf_gap);
  c.require(cdf_gap < 1e-10, "marginal matches incomplete beta");

  const LemmaReport sv = singular_value_experiment(256, 256, 3.0, 1000, 8);
  const double rate = sv.statistics.at("violation_rate");
  const double limit = sv.statistics.at("violation_bound") + sv.statistics.at("binomial_slack");
  c.note("violation_rate", rate);
  c.note("violation_limit", limit);
  c.require(std::abs(sv.statistics.at("violation_bound") - 2.0 * std::exp(-4.5)) < 1e-15,
            "violation bound value");
  c.require(rate <= limit, "singular value violation rate");
}

void conditioned_generator(Check& c) {
  const std::size_t d = 64;
  const double c_f = 0.2;
  const double oracle = two_sided_tail(d, c_f);
  const double rate = conditioned_acceptance_rate(d, c_f, 2000, 9);
  c.note("acceptance_rate", rate);
  c.note("oracle", oracle);
  c.require(rate >= oracle / 2.0 && rate <= oracle * 2.0, "rate within factor 2");

  double min_e1 = 1.0, max_dot = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const AnvInstance inst = gen_anv_conditioned(d, c_f, derive_seed(900, s));
    min_e1 = std::min(min_e1, inst.witness.dot(e1(d)));
    max_dot = std::max(max_dot, (inst.vectors * inst.witness).cwiseAbs().maxCoeff());
  }
  c.note("min_e1_witness", min_e1);
  c.note("max_abs_theta_dot_witness", max_dot);
  c.require(min_e1 >= c_f, "e1^T w* >= c_f");
  c.require(max_dot <= 1e-9, "theta_i orthogonal to w*");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "trivial-baseline calibration", 30, baselines},
      {2, "offline solvability", 10, offline},
      {3, "LSP reduction soundness", 60, lsp_chain},
      {4, "LR reduction soundness", 60, lr_chain},
      {5, "one-pass to protocol simulation", 30, protocol_simulation},
      {6, "projection separator", 300, upper_bound},
      {7, "geometric certificates", 300, certificates},
      {8, "distributional facts", 120, distributions},
      {9, "conditioned generator", 60, conditioned_generator},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < cr.limit_s, "runtime limit " + std::to_string(static_cast<int>(cr.limit_s)) + " s");
    if (!c.ok) ++failed;
    std::printf("criterion %d: %s  %s (%.2f s)%s\n", cr.id, c.ok ? "PASS" : "FAIL", cr.name, secs,
                c.notes.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
