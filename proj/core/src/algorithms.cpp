#include "nullstream/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <string>
#include <tuple>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

constexpr std::size_t kHeaderBits = 64;  // u32 count + u32 dimension
constexpr std::size_t kDoubleBits = 64;

struct Header {
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
};

Header read_header(const BitState& s) {
  BitReader r(s);
  Header h;
  h.count = r.read_u32();
  h.dim = r.read_u32();
  return h;
}

void write_header(BitState& s, const Header& h) {
  BitWriter w(s);
  w.write_u32(h.count);
  w.write_u32(h.dim);
}

/// Sets the dimension on the first sample and rejects later mismatches.
Header admit(const BitState& prev, const Sample& sample) {
  Header h = read_header(prev);
  const auto len = static_cast<std::uint32_t>(sample.x.size());
  if (h.count == 0 && h.dim == 0) h.dim = len;
  if (h.dim != len) {
    throw DimensionMismatch("sample of length " + std::to_string(len) + " in a stream of dimension " +
                            std::to_string(h.dim));
  }
  return h;
}

// --- baselines ---------------------------------------------------------------

class ZeroPredictor final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "zero"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<ZeroPredictor>(*this);
  }
  BitState update(std::size_t, const Sample& sample, const BitState& prev,
                  const SharedRandomness&) override {
    BitState next = prev;
    BitReader r(prev);
    const std::uint32_t dim = r.read_u32();
    const auto len = static_cast<std::uint32_t>(sample.x.size());
    if (dim != 0 && dim != len) throw DimensionMismatch("sample dimension changed mid-stream");
    if (dim == 0) BitWriter(next).write_u32(len);
    return next;
  }
  Output finalize(const BitState& state, const SharedRandomness&) override {
    BitReader r(state);
    return Vector::Zero(r.read_u32());
  }
};

class RandomUnitPredictor final : public OnePassAlgorithm {
 public:
  RandomUnitPredictor(std::size_t d, std::uint64_t seed) : d_(d), seed_(seed) {}
  std::string name() const override { return "random-unit"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<RandomUnitPredictor>(*this);
  }
  BitState update(std::size_t, const Sample&, const BitState& prev,
                  const SharedRandomness&) override {
    return prev;
  }
  Output finalize(const BitState&, const SharedRandomness&) override {
    Rng rng(seed_);
    return sample_uniform_sphere(d_, rng);
  }

 private:
  std::size_t d_;
  std::uint64_t seed_;
};

// --- full-storage solvers ------------------------------------------------------

Matrix read_vectors(const BitState& s, const Header& h) {
  BitReader r(s, kHeaderBits);
  Matrix m(h.count, h.dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.read_double();
  }
  return m;
}

class OfflineKernelSolver final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "offline-kernel"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<OfflineKernelSolver>(*this);
  }
  BitState update(std::size_t, const Sample& sample, const BitState& prev,
                  const SharedRandomness&) override {
    Header h = admit(prev, sample);
    BitState next = prev;
    BitWriter w(next, kHeaderBits + std::size_t{h.count} * h.dim * kDoubleBits);
    for (Eigen::Index j = 0; j < sample.x.size(); ++j) w.write_double(sample.x[j]);
    ++h.count;
    write_header(next, h);
    return next;
  }
  Output finalize(const BitState& state, const SharedRandomness&) override {
    const Header h = read_header(state);
    if (h.count == 0) throw DegenerateOutput("no vectors were stored");
    const Matrix m = read_vectors(state, h);
    if (m.rows() == m.cols() - 1) return kernel_vector(m);
    // Not a d-1 stream: fall back to the least right singular vector.
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    Vector w = svd.matrixV().col(m.cols() - 1);
    apply_sign_convention(w);
    return w;
  }
};

std::size_t packed_upper(std::size_t d) { return d * (d + 1) / 2; }

class OfflineLstsqSolver final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "offline-lstsq"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<OfflineLstsqSolver>(*this);
  }

  BitState update(std::size_t, const Sample& sample, const BitState& prev,
                  const SharedRandomness&) override {
    Header h = admit(prev, sample);
    const std::size_t d = h.dim;
    Matrix r;
    Vector c;
    read_factor(prev, d, r, c);

    Vector row = sample.x;
    double target = sample.y;
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (row[jj] == 0.0) continue;
      const double rho = std::hypot(r(jj, jj), row[jj]);
      const double cs = r(jj, jj) / rho;
      const double sn = row[jj] / rho;
      for (Eigen::Index k = jj; k < r.cols(); ++k) {
        const double top = r(jj, k);
        r(jj, k) = cs * top + sn * row[k];
        row[k] = -sn * top + cs * row[k];
      }
      const double top = c[jj];
      c[jj] = cs * top + sn * target;
      target = -sn * top + cs * target;
    }

    BitState next = prev;
    BitWriter w(next, kHeaderBits);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = i; k < d; ++k) {
        w.write_double(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      }
    }
    for (std::size_t i = 0; i < d; ++i) w.write_double(c[static_cast<Eigen::Index>(i)]);
    ++h.count;
    write_header(next, h);
    return next;
  }

  Output finalize(const BitState& state, const SharedRandomness&) override {
    const Header h = read_header(state);
    if (h.count == 0) throw DegenerateOutput("no equations were stored");
    Matrix r;
    Vector c;
    read_factor(state, h.dim, r, c);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(r);
    cod.setThreshold(kRankTolerance);
    Vector w = cod.solve(c);
    const double n = w.norm();
    if (n > 1.0) w /= n;
    return w;
  }

 private:
  static void read_factor(const BitState& s, std::size_t d, Matrix& r, Vector& c) {
    const auto n = static_cast<Eigen::Index>(d);
    r = Matrix::Zero(n, n);
    c = Vector::Zero(n);
    if (read_header(s).count == 0) return;
    BitReader rd(s, kHeaderBits);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = i; k < n; ++k) r(i, k) = rd.read_double();
    }
    for (Eigen::Index i = 0; i < n; ++i) c[i] = rd.read_double();
  }
};

class OfflineSeparator final : public OnePassAlgorithm {
 public:
  explicit OfflineSeparator(std::size_t max_passes) : max_passes_(max_passes) {}
  std::string name() const override { return "offline-separator"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<OfflineSeparator>(*this);
  }
  BitState update(std::size_t, const Sample& sample, const BitState& prev,
                  const SharedRandomness&) override {
    Header h = admit(prev, sample);
    const std::size_t slot_bits = std::size_t{h.dim} * kDoubleBits + 1;
    BitState next = prev;
    BitWriter w(next, kHeaderBits + std::size_t{h.count} * slot_bits);
    for (Eigen::Index j = 0; j < sample.x.size(); ++j) w.write_double(sample.x[j]);
    w.write_bool(sample.y > 0);
    ++h.count;
    write_header(next, h);
    return next;
  }
  Output finalize(const BitState& state, const SharedRandomness&) override {
    const Header h = read_header(state);
    if (h.count == 0) throw DegenerateOutput("no points were stored");
    Matrix points(h.count, h.dim);
    std::vector<int> labels(h.count);
    BitReader r(state, kHeaderBits);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = r.read_double();
      labels[static_cast<std::size_t>(i)] = r.read_bool() ? 1 : -1;
    }
    return perceptron(points, labels, max_passes_).w;
  }

 private:
  std::size_t max_passes_;
};

// --- random projection ----------------------------------------------------------

constexpr std::uint64_t kProjectionStream = 0x50524F4Aull;  // "PROJ"
constexpr std::uint64_t kReservoirStream = 0x52455356ull;   // "RESV"

// P is a pure function of the shared randomness, so it may be rebuilt at any
// step. Rebuilding costs a QR of a d' x d Gaussian; a small memo avoids doing
// it once per sample.
class ProjectionCache {
 public:
  Subspace get(std::uint64_t key_seed, std::size_t dprime, std::size_t d, Rng rng) {
    const Key key{key_seed, dprime, d};
    {
      std::lock_guard lock(mu_);
      for (const auto& [k, v] : entries_) {
        if (k == key) return v;
      }
    }
    Subspace s = sample_grassmannian(dprime, d, rng);
    std::lock_guard lock(mu_);
    entries_.emplace_back(key, s);
    if (entries_.size() > kCapacity) entries_.pop_front();
    return s;
  }

 private:
  using Key = std::tuple<std::uint64_t, std::size_t, std::size_t>;
  static constexpr std::size_t kCapacity = 4;
  std::mutex mu_;
  std::deque<std::pair<Key, Subspace>> entries_;
};

ProjectionCache& projection_cache() {
  static ProjectionCache cache;
  return cache;
}

void validate_config(const ProjectionSeparatorConfig& cfg) {
  if (cfg.dprime == 0) throw InvalidArgument("dprime must be positive");
  if (cfg.subsample_size == 0) throw InvalidArgument("subsample_size must be positive");
  if (cfg.quant_bits < 2 || cfg.quant_bits > 64) throw InvalidArgument("quant_bits must be in [2, 64]");
  if (!(cfg.quant_range > 0.0)) throw InvalidArgument("quant_range must be positive");
  if (cfg.max_perceptron_passes == 0) throw InvalidArgument("max_perceptron_passes must be positive");
}

std::size_t slot_bits(const ProjectionSeparatorConfig& cfg) {
  return std::size_t{cfg.quant_bits} * cfg.dprime + 1;
}

std::uint64_t quantize(double v, const ProjectionSeparatorConfig& cfg) {
  const double clipped = std::clamp(v, -cfg.quant_range, cfg.quant_range);
  const double levels = std::ldexp(1.0, static_cast<int>(cfg.quant_bits)) - 1.0;
  const double t = (clipped + cfg.quant_range) / (2.0 * cfg.quant_range);
  return static_cast<std::uint64_t>(std::llround(t * levels));
}

double dequantize(std::uint64_t q, const ProjectionSeparatorConfig& cfg) {
  const double levels = std::ldexp(1.0, static_cast<int>(cfg.quant_bits)) - 1.0;
  return static_cast<double>(q) / levels * 2.0 * cfg.quant_range - cfg.quant_range;
}

class ProjectionSeparator final : public OnePassAlgorithm {
 public:
  explicit ProjectionSeparator(ProjectionSeparatorConfig cfg) : cfg_(cfg) { validate_config(cfg_); }
  std::string name() const override { return "proj-separator"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<ProjectionSeparator>(*this);
  }

  BitState update(std::size_t, const Sample& sample, const BitState& prev,
                  const SharedRandomness& randomness) override {
    Header h = admit(prev, sample);
    if (cfg_.dprime > h.dim) {
      throw InvalidArgument("dprime " + std::to_string(cfg_.dprime) + " exceeds d=" +
                            std::to_string(h.dim));
    }
    const std::size_t seen = h.count;
    std::size_t slot = cfg_.subsample_size;
    if (seen < cfg_.subsample_size) {
      slot = seen;
    } else {
      const SharedRandomness reservoir = randomness.derive(cfg_.seed ^ kReservoirStream);
      const auto j = static_cast<std::size_t>(reservoir.uniform(seen) * static_cast<double>(seen + 1));
      if (j < cfg_.subsample_size) slot = j;
    }

    BitState next = prev;
    if (slot < cfg_.subsample_size) {
      const Subspace p = projection_basis(cfg_, h.dim, randomness);
      const double scale = std::sqrt(static_cast<double>(h.dim) / static_cast<double>(cfg_.dprime));
      const Vector px = scale * (p.basis() * sample.x);
      BitWriter w(next, kHeaderBits + slot * slot_bits(cfg_));
      for (Eigen::Index j = 0; j < px.size(); ++j) {
        if (cfg_.quant_bits == 64) {
          w.write_double(px[j]);
        } else {
          w.write_bits(quantize(px[j], cfg_), cfg_.quant_bits);
        }
      }
      w.write_bool(sample.y > 0);
    }
    h.count = static_cast<std::uint32_t>(seen + 1);
    write_header(next, h);
    return next;
  }

  Output finalize(const BitState& state, const SharedRandomness& randomness) override {
    const ProjectionSketch sketch = decode_projection_sketch(state, cfg_, randomness);
    if (sketch.stored.rows() == 0) throw DegenerateOutput("no points were stored");
    const PerceptronResult pr = perceptron(sketch.stored, sketch.labels, cfg_.max_perceptron_passes);
    Vector w = sketch.proj.basis().transpose() * pr.w;
    return w.normalized();
  }

 private:
  ProjectionSeparatorConfig cfg_;
};

}  // namespace

PerceptronResult perceptron(const Matrix& points, std::span<const int> labels,
                            std::size_t max_passes) {
  if (points.rows() == 0) throw InvalidArgument("perceptron needs at least one point");
  if (static_cast<std::size_t>(points.rows()) != labels.size()) {
    throw DimensionMismatch("points and labels differ in count");
  }
  PerceptronResult out;
  Vector w = Vector::Zero(points.cols());
  for (std::size_t pass = 1; pass <= max_passes; ++pass) {
    std::size_t mistakes = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const double y = labels[static_cast<std::size_t>(i)];
      if (y * points.row(i).dot(w) <= 0.0) {
        w += y * points.row(i).transpose();
        ++mistakes;
      }
    }
    out.updates += mistakes;
    if (mistakes == 0) {
      out.passes = pass;
      out.w = w.normalized();
      return out;
    }
  }
  throw NotSeparableInProjection("perceptron still makes mistakes after " +
                                 std::to_string(max_passes) + " passes");
}

std::unique_ptr<OnePassAlgorithm> zero_predictor() { return std::make_unique<ZeroPredictor>(); }

std::unique_ptr<OnePassAlgorithm> random_unit_predictor(std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InvalidArgument("random_unit_predictor needs d >= 1");
  return std::make_unique<RandomUnitPredictor>(d, seed);
}

std::unique_ptr<OnePassAlgorithm> offline_kernel_solver() {
  return std::make_unique<OfflineKernelSolver>();
}

std::unique_ptr<OnePassAlgorithm> offline_lstsq_solver() {
  return std::make_unique<OfflineLstsqSolver>();
}

std::unique_ptr<OnePassAlgorithm> offline_separator(std::size_t max_passes) {
  return std::make_unique<OfflineSeparator>(max_passes);
}

std::size_t offline_kernel_bits(std::size_t d, std::size_t samples) {
  return kHeaderBits + samples * d * kDoubleBits;
}

std::size_t offline_lstsq_bits(std::size_t d) {
  return kHeaderBits + (packed_upper(d) + d) * kDoubleBits;
}

std::size_t offline_separator_bits(std::size_t d, std::size_t samples) {
  return kHeaderBits + samples * (d * kDoubleBits + 1);
}

std::unique_ptr<OnePassAlgorithm> projection_separator(const ProjectionSeparatorConfig& cfg) {
  return std::make_unique<ProjectionSeparator>(cfg);
}

std::size_t projection_separator_bits(const ProjectionSeparatorConfig& cfg) {
  return kHeaderBits + cfg.subsample_size * slot_bits(cfg);
}

Subspace projection_basis(const ProjectionSeparatorConfig& cfg, std::size_t d,
                          const SharedRandomness& randomness) {
  const SharedRandomness stream = randomness.derive(cfg.seed ^ kProjectionStream);
  return projection_cache().get(stream.seed(), cfg.dprime, d, stream.engine(0));
}

ProjectionSketch decode_projection_sketch(const BitState& state,
                                          const ProjectionSeparatorConfig& cfg,
                                          const SharedRandomness& randomness) {
  validate_config(cfg);
  const Header h = read_header(state);
  ProjectionSketch sketch;
  sketch.seen = h.count;
  if (h.count == 0) return sketch;
  sketch.proj = projection_basis(cfg, h.dim, randomness);
  sketch.scale = std::sqrt(static_cast<double>(h.dim) / static_cast<double>(cfg.dprime));

  const std::size_t n = std::min<std::size_t>(h.count, cfg.subsample_size);
  sketch.stored.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dprime));
  sketch.labels.resize(n);
  BitReader r(state, kHeaderBits);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < sketch.stored.cols(); ++j) {
      sketch.stored(row, j) =
          cfg.quant_bits == 64 ? r.read_double() : dequantize(r.read_bits(cfg.quant_bits), cfg);
    }
    sketch.labels[i] = r.read_bool() ? 1 : -1;
  }
  return sketch;
}

const std::vector<std::string>& registered_algorithms() {
  static const std::vector<std::string> names = {
      "zero", "random-unit", "offline-kernel", "offline-lstsq", "offline-separator",
      "proj-separator"};
  return names;
}

std::unique_ptr<OnePassAlgorithm> make_algorithm(const std::string& name,
                                                 const AlgorithmParams& params) {
  if (name == "zero") return zero_predictor();
  if (name == "random-unit") return random_unit_predictor(params.d, params.seed);
  if (name == "offline-kernel") return offline_kernel_solver();
  if (name == "offline-lstsq") return offline_lstsq_solver();
  if (name == "offline-separator") return offline_separator(params.max_perceptron_passes);
  if (name == "proj-separator") {
    ProjectionSeparatorConfig cfg = params.projection;
    cfg.seed = params.seed;
    return projection_separator(cfg);
  }
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

}  // namespace nullstream
