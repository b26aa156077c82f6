#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nullstream/algorithms.hpp"
#include "nullstream/errors.hpp"
#include "nullstream/instances.hpp"
#include "nullstream/reductions.hpp"
#include "support.hpp"

using namespace nullstream;
using nullstream::testing::Constant;

namespace {

// Writes bit `step` of the state: 1 when the label is nonzero. Repeated steps
// or steps outside the state are errors.
class StepTape final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "step-tape"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<StepTape>(*this);
  }
  BitState update(std::size_t step, const Sample& sample, const BitState& prev,
                  const SharedRandomness&) override {
    BitState next = prev;
    BitWriter(next, step).write_bool(sample.y != 0.0);
    return next;
  }
  Output finalize(const BitState&, const SharedRandomness&) override { return Vector::Ones(1); }
};

std::vector<bool> tape_bits(const BitState& s, std::size_t n) {
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s.bit(i);
  return out;
}

}  // namespace

TEST(AnvViaLsp, FeedsPairsInOrder) {
  const AnvInstance inst = gen_anv_conditioned(8, 0.2, 1);
  const auto wrapped = anv_via_lsp(StepTape{}, ReductionConfig{});
  const auto r = run_one_pass_traced(*wrapped, to_samples(inst), 14, 0);
  const auto bits = tape_bits(r.final_state, 14);
  for (std::size_t i = 0; i < 14; ++i) EXPECT_EQ(bits[i], true) << i;  // labels are ±1
  EXPECT_EQ(r.peak_state_bits, 14u);
}

TEST(AnvViaLsp, OfflineSeparatorMeetsLossThreshold) {
  const Constants k;
  const ReductionConfig cfg = ReductionConfig::from(k);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t d = 50;
    const AnvInstance inst = gen_anv_conditioned(d, k.c_f, seed);
    const auto wrapped = anv_via_lsp(*offline_separator(), cfg);
    const std::size_t budget = offline_separator_bits(d, 2 * (d - 1));
    const auto r = run_one_pass_traced(*wrapped, to_samples(inst), budget, seed);
    EXPECT_NEAR(r.output.norm(), 1.0, 1e-12);
    EXPECT_LE(anv_loss(inst, r.output), k.c1);

    // The wrapper adds nothing: the inner run on the explicit LSP stream uses
    // the same memory and gives the same answer.
    const LspDataset lsp = gen_lsp_from_anv(inst, cfg.c4);
    const auto inner = run_one_pass_traced(*offline_separator(), to_samples(lsp), budget, seed);
    EXPECT_EQ(inner.peak_state_bits, r.peak_state_bits);
    EXPECT_LE((inner.output.normalized() - r.output).norm(), 1e-12);
  }
}

TEST(AnvViaLsp, ConstantE1HasLossNearOne) {
  const std::size_t d = 400;
  const AnvInstance inst = gen_anv_conditioned(d, 0.05, 2);
  Vector e1 = Vector::Zero(d);
  e1[0] = 1.0;
  const auto wrapped = anv_via_lsp(Constant(e1), ReductionConfig{});
  const Vector w = run_one_pass(*wrapped, to_samples(inst), 1, 0);
  EXPECT_NEAR(anv_loss(inst, w), static_cast<double>(d - 1) / d, 0.2);
}

TEST(AnvViaLsp, ZeroOutputIsDegenerate) {
  const AnvInstance inst = gen_anv_gaussian(6, 1);
  const auto wrapped = anv_via_lsp(*zero_predictor(), ReductionConfig{});
  EXPECT_THROW(run_one_pass(*wrapped, to_samples(inst), 32, 0), DegenerateOutput);
}

TEST(AnvViaLr, InsertsOneEquationAtTheSharedPosition) {
  const std::size_t d = 12;
  const AnvInstance inst = gen_anv_gaussian(d, 3);
  for (std::uint64_t shared = 0; shared < 40; ++shared) {
    const auto wrapped = anv_via_lr(StepTape{}, ReductionConfig{}, 77);
    const auto r = run_one_pass_traced(*wrapped, to_samples(inst), d, shared);
    const auto bits = tape_bits(r.final_state, d);
    const std::size_t pos = lr_insertion_position(shared, 77, d);
    ASSERT_LT(pos, d);
    for (std::size_t i = 0; i < d; ++i) EXPECT_EQ(bits[i], i == pos) << shared << " " << i;
    EXPECT_EQ(r.peak_state_bits, d);
  }
}

TEST(AnvViaLr, InsertionPositionIsUniform) {
  const std::size_t d = 8;
  const int n = 16000;
  std::vector<int> counts(d, 0);
  for (int s = 0; s < n; ++s) ++counts[lr_insertion_position(static_cast<std::uint64_t>(s), 5, d)];
  const double p = 1.0 / d;
  for (int c : counts) EXPECT_NEAR(c, n * p, 4 * std::sqrt(n * p * (1 - p)));
  EXPECT_THROW(lr_insertion_position(0, 0, 0), InvalidArgument);
}

TEST(AnvViaLr, LstsqRecoversKernel) {
  const Constants k;
  const ReductionConfig cfg = ReductionConfig::from(k);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t d = 40;
    const AnvInstance inst = gen_anv_conditioned(d, k.c_f, seed);
    const auto wrapped = anv_via_lr(*offline_lstsq_solver(), cfg, seed);
    const auto r = run_one_pass_traced(*wrapped, to_samples(inst), offline_lstsq_bits(d), seed);
    EXPECT_LT(anv_loss(inst, r.output), 1e-10);
    EXPECT_EQ(r.peak_state_bits, offline_lstsq_bits(d));
  }
}

TEST(AnvViaLr, SmallOutputIsDegenerate) {
  const AnvInstance inst = gen_anv_gaussian(6, 1);
  EXPECT_THROW(run_one_pass(*anv_via_lr(*zero_predictor(), ReductionConfig{}, 0),
                            to_samples(inst), 32, 0),
               DegenerateOutput);
  Vector tiny = Vector::Zero(6);
  tiny[0] = 0.099;
  EXPECT_THROW(run_one_pass(*anv_via_lr(Constant(tiny), ReductionConfig{}, 0), to_samples(inst), 1, 0),
               DegenerateOutput);
}

TEST(AnvViaLr, SmallRegressionLossGivesSmallAnvLoss) {
  // Any LR answer with loss <= min(c1, 1) c_f^2 / 4 has norm >= c_f / 2 and
  // normalizes to an ANV answer with loss <= c1.
  const Constants k;
  const ReductionConfig cfg = ReductionConfig::from(k);
  const double bound = std::min(k.c1, 1.0) * k.c_f * k.c_f / 4.0;
  Rng rng(12);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t d = 30;
    const AnvInstance inst = gen_anv_conditioned(d, k.c_f, seed);
    const LrInstance lr = gen_lr_from_anv(inst, seed);
    const Vector u = sample_uniform_sphere(d, rng);
    const Vector w = lr.witness + u * (std::sqrt(0.999 * bound) / (lr.a * u).norm());
    ASSERT_LE(lr_loss(lr, w), bound);
    const Vector out = run_one_pass(*anv_via_lr(Constant(w), cfg, seed), to_samples(inst), 1, seed);
    EXPECT_GE(w.norm(), k.c_f / 2.0);
    EXPECT_LE(anv_loss(inst, out), k.c1);
  }
}

TEST(ReductionConfig, FromConstants) {
  Constants k;
  k.c1 = 0.16;
  k.c_f = 0.3;
  const ReductionConfig cfg = ReductionConfig::from(k);
  EXPECT_DOUBLE_EQ(cfg.c4, 0.4);
  EXPECT_DOUBLE_EQ(cfg.c_f, 0.3);
  EXPECT_DOUBLE_EQ(cfg.norm_floor, 0.15);
  EXPECT_THROW(anv_via_lsp(*zero_predictor(), ReductionConfig{0.0, 0.2, 0.1}), InvalidArgument);
}
