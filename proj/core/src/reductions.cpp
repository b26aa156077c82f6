#include "nullstream/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

constexpr std::uint64_t kInsertionStream = 0x4C52494E53ull;  // "LRINS"

void validate(const ReductionConfig& cfg) {
  if (!(cfg.c4 > 0.0 && cfg.c_f > 0.0 && cfg.norm_floor > 0.0)) {
    throw InvalidArgument("reduction constants must be positive");
  }
}

std::size_t insertion_position(const SharedRandomness& randomness, std::uint64_t seed,
                               std::size_t d) {
  const double u = randomness.derive(seed ^ kInsertionStream).uniform(0);
  return std::min(static_cast<std::size_t>(u * static_cast<double>(d)), d - 1);
}

Sample unit_equation(std::size_t d, double value) {
  Sample s;
  s.x = Vector::Zero(static_cast<Eigen::Index>(d));
  s.x[0] = 1.0;
  s.y = value;
  return s;
}

class AnvViaLsp final : public OnePassAlgorithm {
 public:
  AnvViaLsp(std::unique_ptr<OnePassAlgorithm> inner, ReductionConfig cfg)
      : inner_(std::move(inner)), cfg_(cfg) {}
  AnvViaLsp(const AnvViaLsp& other) : inner_(other.inner_->clone()), cfg_(other.cfg_) {}

  std::string name() const override { return "anv-via-lsp(" + inner_->name() + ")"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<AnvViaLsp>(*this);
  }

  BitState update(std::size_t step, const Sample& sample, const BitState& prev,
                  const SharedRandomness& randomness) override {
    const double shift = cfg_.c4 / std::sqrt(static_cast<double>(sample.x.size()));
    Sample plus{sample.x, +1.0};
    Sample minus{sample.x, -1.0};
    plus.x[0] += shift;
    minus.x[0] -= shift;
    BitState mid = inner_->update(2 * step, plus, prev, randomness);
    return inner_->update(2 * step + 1, minus, mid, randomness);
  }

  Output finalize(const BitState& state, const SharedRandomness& randomness) override {
    Vector w = inner_->finalize(state, randomness);
    const double n = w.norm();
    if (!(n > 0.0)) throw DegenerateOutput("separator output is the zero vector");
    return w / n;
  }

 private:
  std::unique_ptr<OnePassAlgorithm> inner_;
  ReductionConfig cfg_;
};

class AnvViaLr final : public OnePassAlgorithm {
 public:
  AnvViaLr(std::unique_ptr<OnePassAlgorithm> inner, ReductionConfig cfg, std::uint64_t seed)
      : inner_(std::move(inner)), cfg_(cfg), seed_(seed) {}
  AnvViaLr(const AnvViaLr& other)
      : inner_(other.inner_->clone()), cfg_(other.cfg_), seed_(other.seed_) {}

  std::string name() const override { return "anv-via-lr(" + inner_->name() + ")"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<AnvViaLr>(*this);
  }

  BitState update(std::size_t step, const Sample& sample, const BitState& prev,
                  const SharedRandomness& randomness) override {
    const auto d = static_cast<std::size_t>(sample.x.size());
    const std::size_t pos = insertion_position(randomness, seed_, d);
    BitState state = prev;
    if (step == 0 && pos == 0) state = inner_->update(0, unit_equation(d, cfg_.c_f), state, randomness);
    const std::size_t inner_step = step < pos ? step : step + 1;
    state = inner_->update(inner_step, Sample{sample.x, 0.0}, state, randomness);
    if (pos >= 1 && step + 1 == pos) {
      state = inner_->update(pos, unit_equation(d, cfg_.c_f), state, randomness);
    }
    return state;
  }

  Output finalize(const BitState& state, const SharedRandomness& randomness) override {
    Vector w = inner_->finalize(state, randomness);
    const double n = w.norm();
    if (!(n >= cfg_.norm_floor)) {
      throw DegenerateOutput("regression output norm " + std::to_string(n) +
                             " is below the floor " + std::to_string(cfg_.norm_floor));
    }
    return w / n;
  }

 private:
  std::unique_ptr<OnePassAlgorithm> inner_;
  ReductionConfig cfg_;
  std::uint64_t seed_;
};

}  // namespace

ReductionConfig ReductionConfig::from(const Constants& k) {
  return ReductionConfig{k.c4(), k.c_f, k.c_f / 2.0};
}

std::unique_ptr<OnePassAlgorithm> anv_via_lsp(const OnePassAlgorithm& lsp,
                                              const ReductionConfig& cfg) {
  validate(cfg);
  return std::make_unique<AnvViaLsp>(lsp.clone(), cfg);
}

std::unique_ptr<OnePassAlgorithm> anv_via_lr(const OnePassAlgorithm& lr,
                                             const ReductionConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  return std::make_unique<AnvViaLr>(lr.clone(), cfg, seed);
}

std::size_t lr_insertion_position(std::uint64_t shared_seed, std::uint64_t seed, std::size_t d) {
  if (d == 0) throw InvalidArgument("d must be positive");
  return insertion_position(SharedRandomness(shared_seed), seed, d);
}

}  // namespace nullstream
