#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "nullstream/algorithms.hpp"
#include "nullstream/instances.hpp"
#include "nullstream/parallel.hpp"
#include "nullstream/reductions.hpp"
#include "nullstream/sphere_marginal.hpp"
#include "nullstream/streaming.hpp"
#include "nullstream/verification.hpp"

namespace nullstream::cli {

namespace {

const std::vector<std::string> kProblems{"anv-gaussian", "anv-conditioned", "lsp",
                                         "lsp-hard",     "lr",              "margin"};
const std::vector<std::string> kLemmas{"no-joint-sol",    "sandwich",
                                       "comorth",         "singular-values",
                                       "sphere-marginal", "sphere-concentration",
                                       "packing"};

void set_c4(Constants& k, double c4) {
  if (!(c4 > 0.0)) throw InvalidArgument("c4 must be positive");
  k.c1 = c4 * c4;
}

void check_constants(const Constants& k) {
  if (!(k.c1 > 0.0)) throw InvalidArgument("c1 must be positive");
  if (!(k.c2 >= 0.0 && k.c2 < 1.0)) throw InvalidArgument("c2 must lie in [0, 1)");
  if (!(k.c > 0.0)) throw InvalidArgument("c must be positive");
  if (!(k.c_f > 0.0 && k.c_f < 1.0)) throw InvalidArgument("c_f must lie in (0, 1)");
}

Json constants_json(const Constants& k) {
  return {{"c1", k.c1}, {"c2", k.c2}, {"c4", k.c4()}, {"c", k.c}, {"c_f", k.c_f}};
}

InstanceFile wrap_anv(const std::string& type, AnvInstance a, const Json& params) {
  InstanceFile f;
  f.type = type;
  f.kind = InstanceKind::kAnv;
  f.d = a.d;
  f.seed = a.seed;
  f.params = params;
  f.anv = std::move(a);
  return f;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAcceptanceTooRare:
      return kExitInfeasible;
    case ErrorKind::kBudgetViolation:
      return kExitBudget;
    case ErrorKind::kNotSeparableInProjection:
    case ErrorKind::kDegenerateOutput:
      return kExitAlgorithm;
    default:
      return kExitValidation;
  }
}

InstanceFile generate(const std::string& problem, const GenOptions& opt) {
  check_constants(opt.k);
  const Constants& k = opt.k;
  if (opt.d < 2) throw InvalidArgument("d must be at least 2");
  Json params{{"constants", constants_json(k)}};

  if (problem == "anv-gaussian") {
    return wrap_anv(problem, gen_anv_gaussian(opt.d, opt.seed), params);
  }
  if (problem == "anv-conditioned") {
    params["max_attempts"] = opt.max_attempts;
    return wrap_anv(problem, gen_anv_conditioned(opt.d, k.c_f, opt.seed, opt.max_attempts),
                    params);
  }
  if (problem == "lsp") {
    const AnvInstance a = gen_anv_conditioned(opt.d, k.c_f, opt.seed, opt.max_attempts);
    InstanceFile f;
    f.type = problem;
    f.kind = InstanceKind::kLsp;
    f.d = opt.d;
    f.seed = opt.seed;
    f.params = params;
    f.params["anv_attempts"] = a.attempts;
    f.lsp = gen_lsp_from_anv(a, k.c4());
    return f;
  }
  if (problem == "lsp-hard") {
    const std::size_t m = opt.m == 0 ? opt.d : opt.m;
    InstanceFile f;
    f.type = problem;
    f.kind = InstanceKind::kLspHard;
    f.d = opt.d;
    f.seed = opt.seed;
    f.params = params;
    f.params["m"] = m;
    f.lsp_hard = gen_lsp_hard(opt.d, m, k.c_f, k.c, opt.seed, opt.max_attempts);
    return f;
  }
  if (problem == "lr") {
    const AnvInstance a = gen_anv_conditioned(opt.d, k.c_f, opt.seed, opt.max_attempts);
    InstanceFile f;
    f.type = problem;
    f.kind = InstanceKind::kLr;
    f.d = opt.d;
    f.seed = opt.seed;
    f.params = params;
    f.params["anv_attempts"] = a.attempts;
    f.lr = gen_lr_from_anv(a, opt.seed);
    return f;
  }
  if (problem == "margin") {
    const std::size_t m = opt.m == 0 ? 1000 : opt.m;
    InstanceFile f;
    f.type = problem;
    f.kind = InstanceKind::kLsp;
    f.d = opt.d;
    f.seed = opt.seed;
    f.params = {{"m", m}, {"gamma", opt.gamma}};
    f.lsp = gen_margin_dataset(opt.d, m, opt.gamma, opt.seed);
    return f;
  }
  throw InvalidArgument("unknown problem '" + problem + "'");
}

Json diagnostics(const InstanceFile& f) {
  Json j{{"type", f.type}, {"d", f.d}, {"seed", f.seed}};
  switch (f.kind) {
    case InstanceKind::kAnv: {
      const AnvInstance& a = *f.anv;
      j["samples"] = a.vectors.rows();
      j["witness_e1"] = a.witness[0];
      j["witness_residual"] = max_abs(a.vectors * a.witness);
      j["attempts"] = a.attempts;
      if (a.variant == AnvVariant::kSphereConditioned) {
        j["c_f"] = a.c_f;
        j["acceptance_probability"] = conditioned_acceptance_probability(a.d, a.c_f);
      }
      break;
    }
    case InstanceKind::kLsp:
    case InstanceKind::kLspHard: {
      const LspDataset& ds = f.dataset();
      j["samples"] = ds.size();
      j["margin"] = ds.margin;
      j["witness_margin"] = margin_of(ds.witness, ds);
      j["witness_error"] = classification_error(ds.witness, ds);
      j["witness_e1"] = ds.witness[0];
      if (f.lsp_hard) j["attempts"] = f.lsp_hard->attempts;
      break;
    }
    case InstanceKind::kLr: {
      const LrInstance& r = *f.lr;
      j["samples"] = r.a.rows();
      j["witness_residual"] = (r.a * r.witness - r.b).norm();
      j["witness_norm"] = r.witness.norm();
      j["inserted_row"] = r.inserted_row;
      break;
    }
  }
  return j;
}

Json run_instance(const InstanceFile& f, const RunOptions& opt) {
  check_constants(opt.k);
  if (opt.budget_bits < 1) throw InvalidArgument("budget must be at least one bit");
  if (opt.via != "none" && opt.via != "lsp" && opt.via != "lr") {
    throw InvalidArgument("--via must be none, lsp or lr");
  }
  if (opt.via != "none" && f.kind != InstanceKind::kAnv) {
    throw InvalidArgument("--via " + opt.via + " needs an ANV instance, got " + f.type);
  }

  std::vector<Sample> samples;
  switch (f.kind) {
    case InstanceKind::kAnv:
      samples = to_samples(*f.anv);
      break;
    case InstanceKind::kLsp:
    case InstanceKind::kLspHard:
      samples = to_samples(f.dataset());
      break;
    case InstanceKind::kLr:
      samples = to_samples(*f.lr);
      break;
  }
  if (opt.shuffled) samples = shuffle(std::span<const Sample>(samples), opt.seed);

  AlgorithmParams params;
  params.d = f.d;
  params.seed = opt.seed;
  params.max_perceptron_passes = opt.max_passes;
  params.projection.dprime = opt.dprime == 0 ? std::min<std::size_t>(f.d, 600) : opt.dprime;
  params.projection.subsample_size = opt.subsample == 0 ? 600 : opt.subsample;
  params.projection.quant_bits = opt.quant_bits;
  params.projection.quant_range = opt.quant_range;
  params.projection.max_perceptron_passes = opt.max_passes;

  std::unique_ptr<OnePassAlgorithm> alg = make_algorithm(opt.alg, params);
  if (opt.via != "none") {
    ReductionConfig rc = ReductionConfig::from(opt.k);
    alg = opt.via == "lsp" ? anv_via_lsp(*alg, rc) : anv_via_lr(*alg, rc, opt.seed);
  }

  const RunResult r = run_one_pass_traced(*alg, samples, opt.budget_bits, opt.seed);
  const Vector& w = r.output;
  if (static_cast<std::size_t>(w.size()) != f.d) {
    throw DimensionMismatch(alg->name() + " produced an output of length " +
                            std::to_string(w.size()));
  }

  Json j{{"instance", f.type},
         {"d", f.d},
         {"alg", opt.alg},
         {"via", opt.via},
         {"order", opt.shuffled ? "shuffled" : "fixed"},
         {"budget_bits", opt.budget_bits},
         {"seed", opt.seed},
         {"samples", samples.size()},
         {"peak_state_bits", r.peak_state_bits},
         {"output_norm", w.norm()}};
  if (opt.alg == "proj-separator") {
    j["dprime"] = params.projection.dprime;
    j["subsample"] = params.projection.subsample_size;
    j["quant_bits"] = params.projection.quant_bits;
    j["declared_state_bits"] = projection_separator_bits(params.projection);
  }
  switch (f.kind) {
    case InstanceKind::kAnv:
      j["loss"] = std::abs(w.norm() - 1.0) <= 1e-6 ? Json(anv_loss(*f.anv, w)) : Json(nullptr);
      if (f.anv->variant == AnvVariant::kSphereConditioned) {
        j["within_c1"] = !j["loss"].is_null() && j["loss"].get<double>() <= opt.k.c1;
      }
      break;
    case InstanceKind::kLsp:
    case InstanceKind::kLspHard: {
      const LspDataset& ds = f.dataset();
      const double err = classification_error(w, ds);
      j["error"] = err;
      j["within_c2"] = err <= opt.k.c2;
      j["margin"] = w.norm() > 0.0 ? Json(margin_of(w / w.norm(), ds)) : Json(nullptr);
      break;
    }
    case InstanceKind::kLr:
      j["loss"] = lr_loss(*f.lr, w);
      break;
  }
  return j;
}

// --- experiment ------------------------------------------------------------

namespace {

const std::set<std::string> kSpecKeys{"output", "problem", "trials", "seed", "grid", "params"};
const std::set<std::string> kStringParams{"alg", "via", "order"};
const std::set<std::string> kNumberParams{"d",        "m",          "budget",    "cf",
                                          "c",        "c1",         "gamma",     "dprime",
                                          "subsample", "quant_bits", "max_passes",
                                          "max_attempts"};

struct Job {
  std::map<std::string, Json> cell;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string key;
};

std::string job_key(const std::string& problem, const std::map<std::string, Json>& cell,
                    std::size_t trial) {
  std::string key = problem;
  for (const auto& [name, v] : cell) {
    key += ';' + name + '=' + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return key + ";trial=" + std::to_string(trial);
}

void check_param(const std::string& name, const Json& v) {
  if (kStringParams.count(name) != 0) {
    if (!v.is_string()) throw InvalidArgument("'" + name + "' must be a string");
  } else if (kNumberParams.count(name) != 0) {
    if (!v.is_number()) throw InvalidArgument("'" + name + "' must be a number");
    if (v.get<double>() < 0.0) throw InvalidArgument("'" + name + "' must be nonnegative");
  } else {
    throw InvalidArgument("unknown experiment parameter '" + name + "'");
  }
}

std::size_t as_size(const std::map<std::string, Json>& cell, const std::string& name,
                    std::size_t fallback) {
  const auto it = cell.find(name);
  if (it == cell.end()) return fallback;
  const double v = it->second.get<double>();
  if (v != std::floor(v)) throw InvalidArgument("'" + name + "' must be an integer");
  return static_cast<std::size_t>(v);
}

double as_double(const std::map<std::string, Json>& cell, const std::string& name,
                 double fallback) {
  const auto it = cell.find(name);
  return it == cell.end() ? fallback : it->second.get<double>();
}

std::string as_string(const std::map<std::string, Json>& cell, const std::string& name,
                      const std::string& fallback) {
  const auto it = cell.find(name);
  return it == cell.end() ? fallback : it->second.get<std::string>();
}

std::string opt_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return "";
  const Json& v = j.at(key);
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::vector<std::string> run_job(const std::string& problem, const Job& job) {
  const auto& cell = job.cell;
  GenOptions g;
  g.d = as_size(cell, "d", 64);
  g.m = as_size(cell, "m", 0);
  g.k.c_f = as_double(cell, "cf", g.k.c_f);
  g.k.c = as_double(cell, "c", g.k.c);
  g.k.c1 = as_double(cell, "c1", g.k.c1);
  g.gamma = as_double(cell, "gamma", g.gamma);
  g.seed = job.seed;
  g.max_attempts = as_size(cell, "max_attempts", g.max_attempts);

  RunOptions r;
  r.alg = as_string(cell, "alg", "");
  r.budget_bits = as_size(cell, "budget", 0);
  r.seed = job.seed;
  r.via = as_string(cell, "via", "none");
  const std::string order = as_string(cell, "order", "fixed");
  if (order != "fixed" && order != "shuffled") throw InvalidArgument("order must be fixed or shuffled");
  r.shuffled = order == "shuffled";
  r.k = g.k;
  r.dprime = as_size(cell, "dprime", 0);
  r.subsample = as_size(cell, "subsample", 0);
  r.quant_bits = static_cast<unsigned>(as_size(cell, "quant_bits", 16));
  r.max_passes = as_size(cell, "max_passes", r.max_passes);

  std::string status = "ok";
  Json m;
  try {
    m = run_instance(generate(problem, g), r);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kBudgetViolation:
        status = "budget-violation";
        break;
      case ErrorKind::kAcceptanceTooRare:
        status = "infeasible";
        break;
      case ErrorKind::kNotSeparableInProjection:
      case ErrorKind::kDegenerateOutput:
        status = "algorithm-failure";
        break;
      default:
        throw;
    }
  }
  const std::string dprime =
      r.alg == "proj-separator" ? opt_field(m, "dprime") : std::to_string(r.dprime);
  return {csv_escape(job.key),
          problem,
          std::to_string(job.trial),
          std::to_string(job.seed),
          std::to_string(g.d),
          std::to_string(g.m),
          r.alg,
          r.via,
          order,
          std::to_string(r.budget_bits),
          dprime,
          std::to_string(r.subsample),
          std::to_string(r.quant_bits),
          status,
          opt_field(m, "loss"),
          opt_field(m, "error"),
          opt_field(m, "margin"),
          opt_field(m, "output_norm"),
          opt_field(m, "peak_state_bits"),
          opt_field(m, "samples")};
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

const std::vector<std::string>& experiment_columns() {
  static const std::vector<std::string> cols{
      "key",      "problem",    "trial", "seed",   "d",     "m",     "alg",
      "via",      "order",      "budget_bits",     "dprime", "subsample",
      "quant_bits", "status",   "loss",  "error",  "margin", "output_norm",
      "peak_state_bits",        "samples"};
  return cols;
}

std::size_t run_experiment(const Json& spec, std::ostream& log) {
  if (!spec.is_object()) throw InvalidArgument("experiment spec must be a JSON object");
  for (const auto& [k, v] : spec.items()) {
    if (kSpecKeys.count(k) == 0) throw InvalidArgument("unknown experiment key '" + k + "'");
  }
  if (!spec.contains("output") || !spec["output"].is_string()) {
    throw InvalidArgument("experiment needs an 'output' path");
  }
  if (!spec.contains("problem") || !spec["problem"].is_string()) {
    throw InvalidArgument("experiment needs a 'problem'");
  }
  const auto output = spec["output"].get<std::string>();
  const auto problem = spec["problem"].get<std::string>();
  if (std::find(kProblems.begin(), kProblems.end(), problem) == kProblems.end()) {
    throw InvalidArgument("unknown problem '" + problem + "'");
  }
  const Json trials_j = spec.value("trials", Json(1));
  const Json seed_j = spec.value("seed", Json(0));
  const auto nonneg_int = [](const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  };
  if (!nonneg_int(trials_j) || !nonneg_int(seed_j)) {
    throw InvalidArgument("'trials' and 'seed' must be nonnegative integers");
  }
  const auto trials = trials_j.get<std::size_t>();
  const auto seed = seed_j.get<std::uint64_t>();

  std::map<std::string, Json> fixed;
  if (spec.contains("params")) {
    if (!spec["params"].is_object()) throw InvalidArgument("'params' must be an object");
    for (const auto& [k, v] : spec["params"].items()) {
      check_param(k, v);
      fixed[k] = v;
    }
  }
  std::vector<std::pair<std::string, std::vector<Json>>> axes;
  if (spec.contains("grid")) {
    if (!spec["grid"].is_object()) throw InvalidArgument("'grid' must be an object");
    for (const auto& [k, v] : spec["grid"].items()) {
      if (!v.is_array() || v.empty()) {
        throw InvalidArgument("grid axis '" + k + "' must be a nonempty array");
      }
      if (fixed.count(k) != 0) throw InvalidArgument("'" + k + "' is both fixed and swept");
      for (const auto& x : v) check_param(k, x);
      axes.emplace_back(k, std::vector<Json>(v.begin(), v.end()));
    }
  }

  std::vector<std::map<std::string, Json>> cells{fixed};
  for (const auto& [name, values] : axes) {
    std::vector<std::map<std::string, Json>> next;
    for (const auto& c : cells) {
      for (const auto& v : values) {
        auto e = c;
        e[name] = v;
        next.push_back(std::move(e));
      }
    }
    cells = std::move(next);
  }
  for (const auto& c : cells) {
    if (c.count("alg") == 0 || c.count("budget") == 0) {
      throw InvalidArgument("every cell needs 'alg' and 'budget'");
    }
  }

  std::set<std::string> done;
  const std::string header = join(experiment_columns());
  const bool exists = std::filesystem::exists(output) && std::filesystem::file_size(output) > 0;
  if (exists) {
    std::ifstream in(output);
    std::string line;
    std::getline(in, line);
    if (line != header) throw InvalidArgument("'" + output + "' has a different header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      done.insert(line.substr(0, line.find(',')));
    }
  }

  std::vector<Job> jobs;
  for (const auto& c : cells) {
    for (std::size_t t = 0; t < trials; ++t) {
      Job job{c, t, derive_seed(seed, t), job_key(problem, c, t)};
      if (done.count(csv_escape(job.key)) == 0) jobs.push_back(std::move(job));
    }
  }
  log << "experiment: " << cells.size() << " cells x " << trials << " trials, "
      << jobs.size() << " pending\n";

  std::vector<std::vector<std::string>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { rows[i] = run_job(problem, jobs[i]); });

  std::ofstream out(output, std::ios::binary | std::ios::app);
  if (!out) throw InvalidArgument("cannot open '" + output + "' for writing");
  if (!exists) out << header << '\n';
  for (const auto& r : rows) out << join(r) << '\n';
  return rows.size();
}

// --- entry point -----------------------------------------------------------

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming null-vector testbed"};
  app.name("nullstream");
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance file");
  std::string problem;
  GenOptions g;
  std::string gen_out;
  double gen_c4 = 0.0;
  gen->add_option("problem", problem, "Instance family")
      ->required()
      ->check(CLI::IsMember(kProblems));
  gen->add_option("--d", g.d, "Dimension")->capture_default_str();
  gen->add_option("--m", g.m, "Points per half (lsp-hard) or points (margin)");
  gen->add_option("--cf", g.k.c_f, "Conditioning level c_f")->capture_default_str();
  gen->add_option("--c", g.k.c, "Separator-instance scale c")->capture_default_str();
  auto* gen_c1 = gen->add_option("--c1", g.k.c1, "ANV loss threshold c1")->capture_default_str();
  gen->add_option("--c4", gen_c4, "LSP shift c4 (sets c1 = c4^2)")->excludes(gen_c1);
  gen->add_option("--gamma", g.gamma, "Margin of the margin family")->capture_default_str();
  gen->add_option("--seed", g.seed, "Seed")->capture_default_str();
  gen->add_option("--max-attempts", g.max_attempts, "Rejection-sampling cap")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default: stdout)");

  // run
  auto* run = app.add_subcommand("run", "Run a one-pass algorithm on an instance");
  std::string instance_path, order = "fixed", csv_path;
  RunOptions r;
  double run_c4 = 0.0;
  run->add_option("--instance", instance_path, "Instance JSON")->required();
  run->add_option("--alg", r.alg, "Algorithm")
      ->required()
      ->check(CLI::IsMember(registered_algorithms()));
  run->add_option("--budget", r.budget_bits, "Memory budget in bits")->required();
  run->add_option("--seed", r.seed, "Shared-randomness seed")->capture_default_str();
  run->add_option("--order", order, "Arrival order")
      ->check(CLI::IsMember({"fixed", "shuffled"}))
      ->capture_default_str();
  run->add_option("--via", r.via, "Reduction wrapper")
      ->check(CLI::IsMember({"none", "lsp", "lr"}))
      ->capture_default_str();
  auto* run_c1 = run->add_option("--c1", r.k.c1, "ANV loss threshold c1")->capture_default_str();
  run->add_option("--c4", run_c4, "LSP shift c4 (sets c1 = c4^2)")->excludes(run_c1);
  run->add_option("--c2", r.k.c2, "Tolerated error fraction")->capture_default_str();
  run->add_option("--cf", r.k.c_f, "Inserted equation value c_f")->capture_default_str();
  run->add_option("--dprime", r.dprime, "proj-separator: projected dimension");
  run->add_option("--subsample", r.subsample, "proj-separator: reservoir size");
  run->add_option("--quant-bits", r.quant_bits, "proj-separator: bits per coordinate (64 = raw)")
      ->capture_default_str();
  run->add_option("--max-passes", r.max_passes, "Perceptron pass cap")->capture_default_str();
  run->add_option("--csv", csv_path, "Also write the metrics as a one-row CSV");

  // verify
  auto* verify = app.add_subcommand("verify", "Certify a geometric lemma numerically");
  std::string lemma, out_csv, out_json;
  std::size_t v_d = 0, v_trials = 0, v_samples = 0, v_rows = 0, v_k = 0, v_budget = 0;
  std::uint64_t v_seed = 0;
  double v_t = 0.0, v_delta = 0.5, v_cemp = 0.05, v_eta = 0.125, v_cf = 0.2, v_radius = -1.0;
  verify->add_option("lemma", lemma, "Lemma id")->required()->check(CLI::IsMember(kLemmas));
  verify->add_option("--d", v_d, "Dimension (lemma default if omitted)");
  verify->add_option("--trials", v_trials, "Trials (lemma default if omitted)");
  verify->add_option("--seed", v_seed, "Seed")->capture_default_str();
  verify->add_option("--t", v_t, "Deviation parameter t");
  verify->add_option("--delta", v_delta, "no-joint-sol: distance threshold")->capture_default_str();
  verify->add_option("--c-emp", v_cemp, "no-joint-sol: certified norm")->capture_default_str();
  verify->add_option("--eta", v_eta, "no-joint-sol: probe dimension fraction")
      ->capture_default_str();
  verify->add_option("--cf", v_cf, "sphere-marginal: tail level")->capture_default_str();
  verify->add_option("--samples", v_samples, "Sphere tests: sample count");
  verify->add_option("--n-rows", v_rows, "singular-values: rows N (default d)");
  verify->add_option("--k", v_k, "packing: subspace dimension");
  verify->add_option("--radius", v_radius, "packing: separation radius");
  verify->add_option("--budget", v_budget, "packing: candidate budget");
  verify->add_option("--out-csv", out_csv, "Per-trial CSV");
  verify->add_option("--out-json", out_json, "Full report JSON");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a parameter sweep");
  std::string spec_path;
  experiment->add_option("spec", spec_path, "Sweep spec JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) {
      if (gen_c4 > 0.0) set_c4(g.k, gen_c4);
      const InstanceFile f = generate(problem, g);
      const Json diag = diagnostics(f);
      if (gen_out.empty()) {
        out << to_json(f).dump() << '\n';
        err << diag.dump() << '\n';
      } else {
        save_instance(gen_out, f);
        Json d = diag;
        d["out"] = gen_out;
        out << d.dump(2) << '\n';
      }
      return kExitOk;
    }
    if (*run) {
      if (run_c4 > 0.0) set_c4(r.k, run_c4);
      r.shuffled = order == "shuffled";
      const Json m = run_instance(load_instance(instance_path), r);
      out << m.dump(2) << '\n';
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw InvalidArgument("cannot open '" + csv_path + "'");
        std::vector<std::string> keys, vals;
        for (const auto& [k, v] : m.items()) {
          keys.push_back(k);
          vals.push_back(v.is_null()               ? ""
                         : v.is_number_float()     ? format_double(v.get<double>())
                         : v.is_string()           ? v.get<std::string>()
                         : v.is_boolean()          ? (v.get<bool>() ? "1" : "0")
                                                   : v.dump());
        }
        csv << join(keys) << '\n' << join(vals) << '\n';
      }
      return kExitOk;
    }
    if (*verify) {
      const auto pick = [](std::size_t given, std::size_t fallback) {
        return given == 0 ? fallback : given;
      };
      LemmaReport rep;
      if (lemma == "no-joint-sol") {
        NoJointSolParams p;
        p.d = pick(v_d, 64);
        p.trials = pick(v_trials, 50);
        p.seed = v_seed;
        p.delta = v_delta;
        p.c_emp = v_cemp;
        p.eta = v_eta;
        rep = certify_no_joint_sol(p);
        const auto control = no_joint_sol_control(p.d, derive_seed(v_seed, 0xC0));
        rep.statistics["distance0_control_lambda_min"] = control.certificate.lambda_min;
      } else if (lemma == "sandwich") {
        rep = certify_sandwich(pick(v_d, 128), v_t > 0.0 ? v_t : 0.2, pick(v_trials, 100), v_seed);
      } else if (lemma == "comorth") {
        rep = certify_comorth(pick(v_d, 32), pick(v_trials, 100), v_seed);
      } else if (lemma == "singular-values") {
        const std::size_t d = pick(v_d, 256);
        rep = singular_value_experiment(pick(v_rows, d), d, v_t > 0.0 ? v_t : 3.0,
                                        pick(v_trials, 1000), v_seed);
      } else if (lemma == "sphere-marginal") {
        rep = sphere_marginal_tests(pick(v_d, 64), pick(v_samples, pick(v_trials, 100000)), v_cf,
                                    v_seed);
      } else if (lemma == "sphere-concentration") {
        rep = sphere_concentration_test(pick(v_d, 64), pick(v_samples, pick(v_trials, 10000)),
                                        v_seed);
      } else {
        const std::size_t d = pick(v_d, 8);
        const double radius =
            v_radius >= 0.0 ? v_radius : 0.5 * std::sqrt(static_cast<double>(d)) * 0.3;
        rep = greedy_packing(pick(v_k, 4), d, radius, pick(v_budget, pick(v_trials, 2000)), v_seed)
                  .report;
      }
      Json summary = to_json(rep);
      summary.erase("per_trial");
      out << summary.dump(2) << '\n';
      if (!out_csv.empty()) {
        std::ofstream csv(out_csv, std::ios::binary);
        if (!csv) throw InvalidArgument("cannot open '" + out_csv + "'");
        write_report_csv(csv, rep);
      }
      if (!out_json.empty()) {
        std::ofstream js(out_json, std::ios::binary);
        if (!js) throw InvalidArgument("cannot open '" + out_json + "'");
        js << to_json(rep).dump(2) << '\n';
      }
      return rep.passed ? kExitOk : kExitFailed;
    }
    if (*experiment) {
      std::ifstream in(spec_path);
      if (!in) throw InvalidArgument("cannot open '" + spec_path + "'");
      Json spec;
      try {
        in >> spec;
      } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed spec: ") + e.what());
      }
      const std::size_t written = run_experiment(spec, err);
      out << "{\"rows_written\": " << written << "}\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace nullstream::cli
