#pragma once

// Small algorithms used only as test fixtures.

#include <memory>
#include <string>

#include "nullstream/streaming.hpp"

namespace nullstream::testing {

/// Counts samples in a 64-bit counter; outputs the count as a 1-vector.
class Counter final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "counter"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<Counter>(*this);
  }
  BitState update(std::size_t, const Sample&, const BitState& prev,
                  const SharedRandomness&) override {
    BitReader r(prev);
    const std::uint64_t n = r.read_u64();
    BitState next(prev.capacity_bits());
    BitWriter(next).write_u64(n + 1);
    return next;
  }
  Output finalize(const BitState& state, const SharedRandomness&) override {
    BitReader r(state);
    return Vector::Constant(1, static_cast<double>(r.read_u64()));
  }
};

/// Keeps its count in a member instead of the state. Under the runner every
/// step sees a fresh clone, so the count never grows past one.
class Stasher final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "stasher"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<Stasher>(*this);
  }
  BitState update(std::size_t, const Sample&, const BitState& prev,
                  const SharedRandomness&) override {
    ++count_;
    return BitState(prev.capacity_bits());
  }
  Output finalize(const BitState&, const SharedRandomness&) override {
    return Vector::Constant(1, static_cast<double>(count_));
  }

 private:
  std::size_t count_ = 0;
};

/// Returns a state one bit larger than it was given.
class Grower final : public OnePassAlgorithm {
 public:
  std::string name() const override { return "grower"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<Grower>(*this);
  }
  BitState update(std::size_t, const Sample&, const BitState& prev,
                  const SharedRandomness&) override {
    return BitState(prev.capacity_bits() + 1);
  }
  Output finalize(const BitState&, const SharedRandomness&) override { return Vector::Zero(1); }
};

/// Ignores the data and outputs a fixed vector.
class Constant final : public OnePassAlgorithm {
 public:
  explicit Constant(Vector v) : v_(std::move(v)) {}
  std::string name() const override { return "constant"; }
  std::unique_ptr<OnePassAlgorithm> clone() const override {
    return std::make_unique<Constant>(*this);
  }
  BitState update(std::size_t, const Sample&, const BitState& prev,
                  const SharedRandomness&) override {
    return prev;
  }
  Output finalize(const BitState&, const SharedRandomness&) override { return v_; }

 private:
  Vector v_;
};

}  // namespace nullstream::testing
