#pragma once

// Computation models: one-pass algorithms whose between-sample memory is an
// explicit bit string of fixed capacity, one-way two-party protocols, and the
// simulation of the former by the latter.
//
// Memory accounting covers only the BitState carried between samples. Scratch
// space used inside a single update() call is not counted, and neither is the
// shared randomness.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nullstream/linalg.hpp"

namespace nullstream {

/// One stream element. ANV streams use only x; separator streams carry a
/// label y in {-1, +1}; regression streams carry the target value in y.
struct Sample {
  Vector x;
  double y = 0.0;
};

using Output = Vector;

/// The memory configuration s_i in {0,1}^b. The payload is ceil(b/8) bytes,
/// bits are addressed most-significant-first within each byte, and bits past
/// the capacity are always zero.
class BitState {
 public:
  explicit BitState(std::size_t capacity_bits = 0);

  /// Rebuilds a state from raw bytes; rejects a wrong length or nonzero
  /// padding bits.
  static BitState from_bytes(std::size_t capacity_bits, std::vector<std::uint8_t> payload);

  std::size_t capacity_bits() const noexcept { return capacity_bits_; }
  std::span<const std::uint8_t> payload() const noexcept { return payload_; }
  std::string to_hex() const;

  bool bit(std::size_t index) const;

  /// One past the highest bit position written through a BitWriter since this
  /// state was created. Bookkeeping only; not part of the configuration.
  std::size_t high_water_bits() const noexcept { return high_water_; }

  friend bool operator==(const BitState& a, const BitState& b) {
    return a.capacity_bits_ == b.capacity_bits_ && a.payload_ == b.payload_;
  }

 private:
  friend class BitWriter;

  std::size_t capacity_bits_ = 0;
  std::vector<std::uint8_t> payload_;
  std::size_t high_water_ = 0;
};

/// Sequential writer over a BitState. Writing past capacity throws
/// BudgetViolation.
class BitWriter {
 public:
  explicit BitWriter(BitState& state, std::size_t start_bit = 0);

  void write_bits(std::uint64_t value, unsigned count);
  void write_bool(bool value) { write_bits(value ? 1u : 0u, 1); }
  void write_u32(std::uint32_t value) { write_bits(value, 32); }
  void write_u64(std::uint64_t value) { write_bits(value, 64); }
  void write_double(double value);

  void seek(std::size_t bit) { pos_ = bit; }
  std::size_t position() const noexcept { return pos_; }

 private:
  BitState& state_;
  std::size_t pos_;
};

/// Sequential reader over a BitState. Reading past capacity throws
/// BudgetViolation, since such a layout cannot fit the budget.
class BitReader {
 public:
  explicit BitReader(const BitState& state, std::size_t start_bit = 0);

  std::uint64_t read_bits(unsigned count);
  bool read_bool() { return read_bits(1) != 0; }
  std::uint32_t read_u32() { return static_cast<std::uint32_t>(read_bits(32)); }
  std::uint64_t read_u64() { return read_bits(64); }
  double read_double();

  void seek(std::size_t bit) { pos_ = bit; }
  std::size_t position() const noexcept { return pos_; }

 private:
  const BitState& state_;
  std::size_t pos_;
};

/// Shared random numbers addressable by index: the same (seed, index) always
/// yields the same value, so two protocol parties can read identical values
/// without coordination.
class SharedRandomness {
 public:
  explicit SharedRandomness(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t word(std::uint64_t index) const;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const;
  /// Independent stream keyed by `salt`.
  SharedRandomness derive(std::uint64_t salt) const;
  /// Engine for bulk draws (e.g. a projection matrix); deterministic in
  /// (seed, stream).
  Rng engine(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
};

/// splitmix64 finalizer, used for seed derivation throughout.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

/// A one-pass algorithm: s_0 = 0, s_i = update(i, z_i, s_{i-1}), output =
/// finalize(s_m). The runner invokes every call on a fresh clone() of the
/// prototype, so anything kept outside the BitState is discarded between
/// samples.
class OnePassAlgorithm {
 public:
  virtual ~OnePassAlgorithm() = default;

  virtual std::string name() const = 0;
  virtual std::unique_ptr<OnePassAlgorithm> clone() const = 0;

  /// `prev` has the run's capacity; the result must have the same capacity.
  virtual BitState update(std::size_t step, const Sample& sample, const BitState& prev,
                          const SharedRandomness& randomness) = 0;
  virtual Output finalize(const BitState& state, const SharedRandomness& randomness) = 0;
};

struct RunResult {
  Output output;
  BitState final_state;
  /// Highest bit position any update wrote, over the whole run.
  std::size_t peak_state_bits = 0;
};

/// Feeds samples [first_step, first_step + samples.size()) starting from
/// `state`. Each step receives a byte-for-byte copy of the previous payload.
BitState advance(const OnePassAlgorithm& alg, std::span<const Sample> samples, BitState state,
                 std::size_t first_step, const SharedRandomness& randomness,
                 std::size_t* peak_bits = nullptr);

RunResult run_one_pass_traced(const OnePassAlgorithm& alg, std::span<const Sample> samples,
                              std::size_t budget_bits, std::uint64_t seed);
Output run_one_pass(const OnePassAlgorithm& alg, std::span<const Sample> samples,
                    std::size_t budget_bits, std::uint64_t seed);

/// Uniform random permutation (Fisher-Yates over the shared stream).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

template <class T>
std::vector<T> shuffle(std::span<const T> items, std::uint64_t seed) {
  std::vector<T> out;
  out.reserve(items.size());
  for (std::size_t i : shuffled_indices(items.size(), seed)) out.push_back(items[i]);
  return out;
}

/// One-way protocol: party 1 maps its input to a message of at most
/// budget_bits bits; party 2 outputs from its own input plus the message.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual BitState send(std::span<const Sample> input1, std::size_t budget_bits,
                        const SharedRandomness& randomness) const = 0;
  virtual Output receive(std::span<const Sample> input2, const BitState& message,
                         const SharedRandomness& randomness) const = 0;
};

struct ProtocolTranscript {
  BitState message;
  Output output;
  std::size_t budget_bits = 0;

  std::size_t message_bits() const noexcept { return message.capacity_bits(); }
};

ProtocolTranscript run_protocol(const Protocol& protocol, std::span<const Sample> input1,
                                std::span<const Sample> input2, std::size_t budget_bits,
                                std::uint64_t seed);

/// Party 1 runs `alg` on its split_index samples and sends the resulting
/// memory configuration; party 2 resumes from it. Outputs match
/// run_one_pass exactly.
std::unique_ptr<Protocol> one_pass_to_protocol(const OnePassAlgorithm& alg,
                                               std::size_t split_index);

}  // namespace nullstream
