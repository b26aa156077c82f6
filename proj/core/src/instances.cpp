#include "nullstream/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "nullstream/errors.hpp"
#include "nullstream/sphere_marginal.hpp"

namespace nullstream {

namespace {

Matrix sample_sphere_rows(std::size_t rows, std::size_t d, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = sample_uniform_sphere(d, rng).transpose();
  return m;
}

[[noreturn]] void throw_too_rare(std::size_t d, double c_f, std::size_t attempts, double p) {
  std::ostringstream msg;
  msg << "conditioning |e1^T ker| >= " << c_f << " at d=" << d
      << " has exact acceptance probability " << p << " per draw; expected acceptances in "
      << attempts << " attempts = " << p * static_cast<double>(attempts);
  throw AcceptanceTooRare(msg.str());
}

void require_feasible(std::size_t d, double c_f, std::size_t max_attempts) {
  const double p = conditioned_acceptance_probability(d, c_f);
  if (p * static_cast<double>(max_attempts) < 1e-2) throw_too_rare(d, c_f, max_attempts, p);
}

void require_unit(const Vector& w) {
  const double n = w.norm();
  if (!(std::abs(n - 1.0) <= 1e-6)) {
    throw NotUnit("expected a unit vector, got norm " + std::to_string(n));
  }
}

Vector e1(std::size_t d) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
  e[0] = 1.0;
  return e;
}

}  // namespace

AnvInstance gen_anv_gaussian(std::size_t d, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("ANV instances need d >= 2");
  Rng rng(seed);
  AnvInstance inst;
  inst.variant = AnvVariant::kGaussianRaw;
  inst.d = d;
  inst.seed = seed;
  for (int attempt = 1;; ++attempt) {
    inst.vectors = sample_gaussian(d - 1, d, rng);
    try {
      inst.witness = kernel_vector(inst.vectors);
      inst.attempts = static_cast<std::size_t>(attempt);
      return inst;
    } catch (const RankDeficient&) {
      if (attempt >= 2) throw;
    }
  }
}

double conditioned_acceptance_probability(std::size_t d, double c_f) {
  // ker of i.i.d. uniform vectors is itself uniform on the sphere.
  return sphere_abs_coordinate_tail(d, c_f);
}

AnvInstance gen_anv_conditioned(std::size_t d, double c_f, std::uint64_t seed,
                                std::size_t max_attempts) {
  if (d < 2) throw InvalidArgument("ANV instances need d >= 2");
  if (!(c_f > 0.0 && c_f < 1.0)) throw InvalidArgument("c_f must lie in (0, 1)");
  if (max_attempts == 0) throw InvalidArgument("max_attempts must be positive");
  require_feasible(d, c_f, max_attempts);

  Rng rng(seed);
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Matrix thetas = sample_sphere_rows(d - 1, d, rng);
    Vector w;
    try {
      w = kernel_vector(thetas);
    } catch (const RankDeficient&) {
      continue;
    }
    if (std::abs(w[0]) < c_f) continue;
    if (w[0] < 0) w = -w;

    AnvInstance inst;
    inst.variant = AnvVariant::kSphereConditioned;
    inst.d = d;
    inst.vectors = std::move(thetas);
    inst.witness = std::move(w);
    inst.c_f = c_f;
    inst.seed = seed;
    inst.attempts = attempt;
    return inst;
  }
  throw_too_rare(d, c_f, max_attempts, conditioned_acceptance_probability(d, c_f));
}

double conditioned_acceptance_rate(std::size_t d, double c_f, std::size_t attempts,
                                   std::uint64_t seed) {
  if (attempts == 0) return 0.0;
  Rng rng(seed);
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < attempts; ++i) {
    const Vector w = kernel_vector(sample_sphere_rows(d - 1, d, rng));
    if (std::abs(w[0]) >= c_f) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(attempts);
}

double anv_loss(const AnvInstance& inst, const Vector& w) {
  if (static_cast<std::size_t>(w.size()) != inst.d) {
    throw DimensionMismatch("predictor has length " + std::to_string(w.size()) + ", d=" +
                            std::to_string(inst.d));
  }
  require_unit(w);
  const double sum = (inst.vectors * w).squaredNorm();
  return inst.variant == AnvVariant::kGaussianRaw ? sum / static_cast<double>(inst.d) : sum;
}

LspDataset gen_lsp_from_anv(const AnvInstance& inst, double c4) {
  if (!(c4 > 0.0)) throw InvalidArgument("c4 must be positive");
  const std::size_t d = inst.d;
  const Eigen::Index n = inst.vectors.rows();
  const Vector shift = e1(d) * (c4 / std::sqrt(static_cast<double>(d)));

  LspDataset ds;
  ds.points.resize(2 * n, static_cast<Eigen::Index>(d));
  ds.labels.resize(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.points.row(2 * i) = inst.vectors.row(i) + shift.transpose();
    ds.points.row(2 * i + 1) = inst.vectors.row(i) - shift.transpose();
    ds.labels[static_cast<std::size_t>(2 * i)] = +1;
    ds.labels[static_cast<std::size_t>(2 * i + 1)] = -1;
  }
  ds.witness = inst.witness;
  const double max_norm = ds.points.rowwise().norm().maxCoeff();
  ds.margin = inst.c_f * c4 / std::sqrt(static_cast<double>(d)) / max_norm;
  return ds;
}

Sample sample_dv(const Subspace& s, double c, Rng& rng) {
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  const std::size_t d = s.ambient_dim();
  Sample out;
  out.x = sample_uniform_subsphere(s, rng);
  std::bernoulli_distribution coin(0.5);
  out.y = coin(rng) ? 1.0 : -1.0;
  out.x[0] += out.y * (c / 4.0) / std::sqrt(static_cast<double>(d));
  return out;
}

LspHardInstance gen_lsp_hard(std::size_t d, std::size_t m, double c_f, double c,
                             std::uint64_t seed, std::size_t max_attempts) {
  if (d < 4 || d % 2 != 0) {
    throw InvalidArgument("hard separator instances need an even d >= 4, got " +
                          std::to_string(d));
  }
  if (m < d) throw InvalidArgument("need m >= d points per party");
  if (!(c_f > 0.0 && c_f < 1.0)) throw InvalidArgument("c_f must lie in (0, 1)");
  if (!(c > 0.0)) throw InvalidArgument("c must be positive");
  if (max_attempts == 0) throw InvalidArgument("max_attempts must be positive");
  require_feasible(d, c_f, max_attempts);

  Rng rng(seed);
  LspHardInstance out;
  Vector w;
  bool accepted = false;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Subspace v = sample_grassmannian(d / 2, d, rng);
    Subspace u = sample_grassmannian(d / 2 - 1, d, rng);
    Subspace sum;
    try {
      sum = direct_sum(v, u);
    } catch (const OverlapDetected&) {
      continue;
    }
    w = complement(sum).basis().row(0).transpose();
    if (std::abs(w[0]) < c_f) continue;
    if (w[0] < 0) w = -w;
    out.v = std::move(v);
    out.u = std::move(u);
    out.attempts = attempt;
    accepted = true;
    break;
  }
  if (!accepted) throw_too_rare(d, c_f, max_attempts, conditioned_acceptance_probability(d, c_f));

  LspDataset& ds = out.data;
  ds.points.resize(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(d));
  ds.labels.resize(2 * m);
  for (std::size_t i = 0; i < 2 * m; ++i) {
    const Sample s = sample_dv(i < m ? out.v : out.u, c, rng);
    ds.points.row(static_cast<Eigen::Index>(i)) = s.x.transpose();
    ds.labels[i] = s.y > 0 ? 1 : -1;
  }
  ds.witness = w;
  ds.margin = margin_of(w, ds);
  return out;
}

LspDataset gen_margin_dataset(std::size_t d, std::size_t m, double gamma, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("margin datasets need d >= 2");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);

  LspDataset ds;
  ds.witness = sample_uniform_sphere(d, rng);
  ds.points.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  ds.labels.resize(m);
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < m; ++i) {
    const int y = coin(rng) ? 1 : -1;
    const double a = std::min(1.0, gamma + std::abs(normal(rng)) / sqrt_d);
    Vector u = sample_uniform_sphere(d, rng);
    u -= ds.witness.dot(u) * ds.witness;
    u.normalize();
    const Vector x = y * a * ds.witness + std::sqrt(1.0 - a * a) * u;
    ds.points.row(static_cast<Eigen::Index>(i)) = x.normalized().transpose();
    ds.labels[i] = y;
  }
  ds.margin = margin_of(ds.witness, ds);
  return ds;
}

double margin_of(const Vector& w, const LspDataset& ds) {
  if (static_cast<std::size_t>(w.size()) != ds.dim()) {
    throw DimensionMismatch("separator length " + std::to_string(w.size()) + " vs d=" +
                            std::to_string(ds.dim()));
  }
  if (ds.size() == 0) return std::numeric_limits<double>::infinity();
  const Vector dots = ds.points * w;
  const Vector norms = ds.points.rowwise().norm();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    margin = std::min(margin, dots[r] * ds.labels[i] / norms[r]);
  }
  return margin;
}

double classification_error(const Vector& w, const LspDataset& ds) {
  if (static_cast<std::size_t>(w.size()) != ds.dim()) {
    throw DimensionMismatch("separator length " + std::to_string(w.size()) + " vs d=" +
                            std::to_string(ds.dim()));
  }
  if (ds.size() == 0) return 0.0;
  const Vector dots = ds.points * w;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (dots[static_cast<Eigen::Index>(i)] * ds.labels[i] <= 0.0) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

LrInstance gen_lr_from_anv(const AnvInstance& inst, std::uint64_t seed) {
  if (inst.variant != AnvVariant::kSphereConditioned) {
    throw InvalidArgument("LR instances are built from conditioned ANV instances");
  }
  if (inst.witness[0] < inst.c_f - 1e-12) {
    throw InvalidArgument("instance violates e1^T w* >= c_f");
  }
  const std::size_t d = inst.d;
  const auto n = static_cast<Eigen::Index>(d);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> position(0, d - 1);
  const std::size_t pos = position(rng);

  LrInstance lr;
  lr.inserted_row = pos;
  lr.a.resize(n, n);
  lr.b = Vector::Zero(n);
  Eigen::Index src = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<std::size_t>(r) == pos) {
      lr.a.row(r) = e1(d).transpose();
      lr.b[r] = inst.c_f;
    } else {
      lr.a.row(r) = inst.vectors.row(src++);
    }
  }
  lr.witness = inst.c_f * inst.witness / inst.witness[0];
  return lr;
}

double lr_loss(const LrInstance& inst, const Vector& w) {
  if (w.size() != inst.a.cols()) {
    throw DimensionMismatch("predictor length " + std::to_string(w.size()) + " vs d=" +
                            std::to_string(inst.a.cols()));
  }
  return (inst.a * w - inst.b).squaredNorm();
}

std::vector<Sample> to_samples(const AnvInstance& inst) {
  std::vector<Sample> out(static_cast<std::size_t>(inst.vectors.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].x = inst.vectors.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

std::vector<Sample> to_samples(const LspDataset& ds) {
  std::vector<Sample> out(ds.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].x = ds.points.row(static_cast<Eigen::Index>(i)).transpose();
    out[i].y = ds.labels[i];
  }
  return out;
}

std::vector<Sample> to_samples(const LrInstance& inst) {
  std::vector<Sample> out(static_cast<std::size_t>(inst.a.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i].x = inst.a.row(r).transpose();
    out[i].y = inst.b[r];
  }
  return out;
}

void validate(const AnvInstance& inst) {
  if (inst.d < 2) throw InvalidArgument("d must be at least 2");
  const auto d = static_cast<Eigen::Index>(inst.d);
  if (inst.vectors.rows() != d - 1 || inst.vectors.cols() != d || inst.witness.size() != d) {
    throw InvalidArgument("ANV instance shapes do not match d");
  }
  if (std::abs(inst.witness.norm() - 1.0) > 1e-10) throw InvalidArgument("witness is not unit");
  const double residual = (inst.vectors * inst.witness).cwiseAbs().maxCoeff();
  if (residual > 1e-9) {
    throw InvalidArgument("witness residual " + std::to_string(residual) + " exceeds 1e-9");
  }
  if (inst.variant == AnvVariant::kSphereConditioned) {
    const double norm_err = (inst.vectors.rowwise().norm().array() - 1.0).abs().maxCoeff();
    if (norm_err > 1e-10) throw InvalidArgument("conditioned vectors are not unit");
    if (inst.witness[0] < inst.c_f) throw InvalidArgument("e1^T witness < c_f");
  }
}

void validate(const LspDataset& ds) {
  if (static_cast<std::size_t>(ds.points.rows()) != ds.labels.size()) {
    throw InvalidArgument("points and labels differ in count");
  }
  for (int y : ds.labels) {
    if (y != 1 && y != -1) throw InvalidArgument("labels must be +1 or -1");
  }
  if (!(ds.margin > 0.0)) throw InvalidArgument("claimed margin must be positive");
  const double actual = margin_of(ds.witness, ds);
  if (actual < ds.margin - 1e-12) {
    throw InvalidArgument("witness margin " + std::to_string(actual) + " below claimed " +
                          std::to_string(ds.margin));
  }
}

void validate(const LrInstance& inst) {
  if (inst.a.rows() != inst.b.size() || inst.a.cols() != inst.witness.size()) {
    throw InvalidArgument("LR instance shapes do not match");
  }
  constexpr double kSlack = 1e-12;
  if (inst.a.rows() > 0 && inst.a.rowwise().norm().maxCoeff() > 1.0 + kSlack) {
    throw InvalidArgument("a row of A has norm above 1");
  }
  if (inst.b.norm() > 1.0 + kSlack) throw InvalidArgument("‖b‖ exceeds 1");
  if (inst.witness.norm() > 1.0 + kSlack) throw InvalidArgument("‖w*‖ exceeds 1");
  const double residual = (inst.a * inst.witness - inst.b).norm();
  if (residual > 1e-10) {
    throw InvalidArgument("‖A w* - b‖ = " + std::to_string(residual) + " exceeds 1e-10");
  }
}

}  // namespace nullstream
