#include "nullstream/streaming.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

std::size_t bytes_for(std::size_t bits) { return (bits + 7) / 8; }

BitState launder(const BitState& s) {
  const auto bytes = s.payload();
  return BitState::from_bytes(s.capacity_bits(), {bytes.begin(), bytes.end()});
}

class SimulatedProtocol final : public Protocol {
 public:
  SimulatedProtocol(std::unique_ptr<OnePassAlgorithm> alg, std::size_t split)
      : alg_(std::move(alg)), split_(split) {}

  BitState send(std::span<const Sample> input1, std::size_t budget_bits,
                const SharedRandomness& randomness) const override {
    if (input1.size() != split_) {
      throw InvalidArgument("party 1 expects " + std::to_string(split_) + " samples, got " +
                            std::to_string(input1.size()));
    }
    if (budget_bits < 1) throw InvalidArgument("budget must be at least one bit");
    return advance(*alg_, input1, BitState(budget_bits), 0, randomness);
  }

  Output receive(std::span<const Sample> input2, const BitState& message,
                 const SharedRandomness& randomness) const override {
    BitState state = advance(*alg_, input2, launder(message), split_, randomness);
    auto worker = alg_->clone();
    return worker->finalize(launder(state), randomness);
  }

 private:
  std::unique_ptr<OnePassAlgorithm> alg_;
  std::size_t split_;
};

}  // namespace

BitState::BitState(std::size_t capacity_bits)
    : capacity_bits_(capacity_bits), payload_(bytes_for(capacity_bits), 0) {}

BitState BitState::from_bytes(std::size_t capacity_bits, std::vector<std::uint8_t> payload) {
  if (payload.size() != bytes_for(capacity_bits)) {
    throw InvalidArgument("payload of " + std::to_string(payload.size()) +
                          " bytes does not match capacity " + std::to_string(capacity_bits));
  }
  const std::size_t tail = capacity_bits % 8;
  if (tail != 0) {
    const auto mask = static_cast<std::uint8_t>(0xFFu >> tail);
    if ((payload.back() & mask) != 0) throw InvalidArgument("bits beyond capacity are set");
  }
  BitState s;
  s.capacity_bits_ = capacity_bits;
  s.payload_ = std::move(payload);
  return s;
}

std::string BitState::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(payload_.size() * 2);
  for (std::uint8_t byte : payload_) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xF]);
  }
  return out;
}

bool BitState::bit(std::size_t index) const {
  if (index >= capacity_bits_) throw InvalidArgument("bit index beyond capacity");
  return (payload_[index / 8] >> (7 - index % 8)) & 1u;
}

BitWriter::BitWriter(BitState& state, std::size_t start_bit) : state_(state), pos_(start_bit) {}

void BitWriter::write_bits(std::uint64_t value, unsigned count) {
  if (count > 64) throw InvalidArgument("cannot write more than 64 bits at once");
  if (pos_ + count > state_.capacity_bits_) {
    throw BudgetViolation("write of " + std::to_string(count) + " bits at position " +
                          std::to_string(pos_) + " exceeds capacity " +
                          std::to_string(state_.capacity_bits_));
  }
  for (unsigned i = 0; i < count; ++i) {
    const bool bit = (value >> (count - 1 - i)) & 1u;
    const std::size_t p = pos_ + i;
    const auto mask = static_cast<std::uint8_t>(0x80u >> (p % 8));
    if (bit) {
      state_.payload_[p / 8] |= mask;
    } else {
      state_.payload_[p / 8] &= static_cast<std::uint8_t>(~mask);
    }
  }
  pos_ += count;
  state_.high_water_ = std::max(state_.high_water_, pos_);
}

void BitWriter::write_double(double value) { write_u64(std::bit_cast<std::uint64_t>(value)); }

BitReader::BitReader(const BitState& state, std::size_t start_bit)
    : state_(state), pos_(start_bit) {}

std::uint64_t BitReader::read_bits(unsigned count) {
  if (count > 64) throw InvalidArgument("cannot read more than 64 bits at once");
  if (pos_ + count > state_.capacity_bits()) {
    throw BudgetViolation("read of " + std::to_string(count) + " bits at position " +
                          std::to_string(pos_) + " exceeds capacity " +
                          std::to_string(state_.capacity_bits()));
  }
  const auto bytes = state_.payload();
  std::uint64_t value = 0;
  for (unsigned i = 0; i < count; ++i) {
    const std::size_t p = pos_ + i;
    value = (value << 1) | ((bytes[p / 8] >> (7 - p % 8)) & 1u);
  }
  pos_ += count;
  return value;
}

double BitReader::read_double() { return std::bit_cast<double>(read_u64()); }

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(mix64(seed) ^ (salt * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
}

std::uint64_t SharedRandomness::word(std::uint64_t index) const {
  return mix64(mix64(seed_ ^ 0x5851F42D4C957F2Dull) + index * 0x9E3779B97F4A7C15ull);
}

double SharedRandomness::uniform(std::uint64_t index) const {
  return static_cast<double>(word(index) >> 11) * 0x1.0p-53;
}

SharedRandomness SharedRandomness::derive(std::uint64_t salt) const {
  return SharedRandomness(derive_seed(seed_, salt));
}

Rng SharedRandomness::engine(std::uint64_t stream) const {
  return Rng(derive_seed(seed_, stream ^ 0xA0761D6478BD642Full));
}

BitState advance(const OnePassAlgorithm& alg, std::span<const Sample> samples, BitState state,
                 std::size_t first_step, const SharedRandomness& randomness,
                 std::size_t* peak_bits) {
  const std::size_t capacity = state.capacity_bits();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto worker = alg.clone();
    BitState next = worker->update(first_step + i, samples[i], launder(state), randomness);
    if (next.capacity_bits() != capacity) {
      throw BudgetViolation(alg.name() + " returned a state of " +
                            std::to_string(next.capacity_bits()) + " bits, budget is " +
                            std::to_string(capacity));
    }
    if (peak_bits != nullptr) *peak_bits = std::max(*peak_bits, next.high_water_bits());
    state = launder(next);
  }
  return state;
}

RunResult run_one_pass_traced(const OnePassAlgorithm& alg, std::span<const Sample> samples,
                              std::size_t budget_bits, std::uint64_t seed) {
  if (budget_bits < 1) throw InvalidArgument("budget must be at least one bit");
  const SharedRandomness randomness(seed);
  RunResult result;
  result.final_state =
      advance(alg, samples, BitState(budget_bits), 0, randomness, &result.peak_state_bits);
  auto worker = alg.clone();
  result.output = worker->finalize(launder(result.final_state), randomness);
  return result;
}

Output run_one_pass(const OnePassAlgorithm& alg, std::span<const Sample> samples,
                    std::size_t budget_bits, std::uint64_t seed) {
  return run_one_pass_traced(alg, samples, budget_bits, seed).output;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const SharedRandomness stream(derive_seed(seed, 0x5348554646ull));
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(stream.uniform(i) * static_cast<double>(i));
    j = std::min(j, i - 1);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

ProtocolTranscript run_protocol(const Protocol& protocol, std::span<const Sample> input1,
                                std::span<const Sample> input2, std::size_t budget_bits,
                                std::uint64_t seed) {
  const SharedRandomness randomness(seed);
  ProtocolTranscript t;
  t.budget_bits = budget_bits;
  t.message = protocol.send(input1, budget_bits, randomness);
  if (t.message.capacity_bits() > budget_bits) {
    throw BudgetViolation("message of " + std::to_string(t.message.capacity_bits()) +
                          " bits exceeds budget " + std::to_string(budget_bits));
  }
  t.output = protocol.receive(input2, launder(t.message), randomness);
  return t;
}

std::unique_ptr<Protocol> one_pass_to_protocol(const OnePassAlgorithm& alg,
                                               std::size_t split_index) {
  return std::make_unique<SimulatedProtocol>(alg.clone(), split_index);
}

}  // namespace nullstream
