#pragma once

// Concrete one-pass algorithms: trivial baselines, full-storage offline
// solvers, and the random-projection separator with a bounded reservoir.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nullstream/linalg.hpp"
#include "nullstream/streaming.hpp"

namespace nullstream {

struct PerceptronResult {
  Vector w;                 ///< Unit separator.
  std::size_t updates = 0;  ///< Number of mistakes corrected.
  std::size_t passes = 0;   ///< Passes over the data, including the final clean one.
};

/// Classic perceptron from w = 0, cycling through the points in order until a
/// pass makes no mistake (y w^T x <= 0 counts as a mistake). Throws
/// NotSeparableInProjection after max_passes.
PerceptronResult perceptron(const Matrix& points, std::span<const int> labels,
                            std::size_t max_passes);

// --- baselines and offline solvers ------------------------------------------

/// Outputs the zero vector. State: 32-bit dimension.
std::unique_ptr<OnePassAlgorithm> zero_predictor();

/// Outputs a uniform unit vector of R^d drawn from `seed`. State: none.
std::unique_ptr<OnePassAlgorithm> random_unit_predictor(std::size_t d, std::uint64_t seed);

/// Stores every vector as raw doubles; outputs their kernel vector.
std::unique_ptr<OnePassAlgorithm> offline_kernel_solver();

/// Keeps the triangular factor R and Q^T b of the equations seen so far,
/// updated by Givens rotations, which determines every least-squares solution
/// exactly. Outputs the minimum-norm solution, scaled back to the unit ball
/// if it leaves it.
std::unique_ptr<OnePassAlgorithm> offline_lstsq_solver();

/// Stores every labeled point; outputs a perceptron separator.
std::unique_ptr<OnePassAlgorithm> offline_separator(std::size_t max_passes = 1'000'000);

/// State sizes, in bits, of the storage layouts above.
std::size_t offline_kernel_bits(std::size_t d, std::size_t samples);
std::size_t offline_lstsq_bits(std::size_t d);
std::size_t offline_separator_bits(std::size_t d, std::size_t samples);

// --- random-projection separator --------------------------------------------

struct ProjectionSeparatorConfig {
  std::size_t dprime = 0;
  std::size_t subsample_size = 0;
  /// Bits per stored coordinate; 64 stores raw doubles (quantization off).
  unsigned quant_bits = 16;
  double quant_range = 4.0;
  std::size_t max_perceptron_passes = 10000;
  std::uint64_t seed = 0;
};

/// Reservoir-samples subsample_size labeled points and stores each as its
/// quantized projection sqrt(d/d') P x. P (d' orthonormal rows) is rebuilt
/// from shared randomness whenever needed, so it costs no state. finalize()
/// runs the perceptron on the stored points and returns the normalized
/// preimage P^T w_p.
std::unique_ptr<OnePassAlgorithm> projection_separator(const ProjectionSeparatorConfig& cfg);

/// Declared state size: 64 header bits plus subsample_size slots of
/// quant_bits * d' + 1 bits.
std::size_t projection_separator_bits(const ProjectionSeparatorConfig& cfg);

/// The decoded contents of a projection separator state.
struct ProjectionSketch {
  Subspace proj;            ///< d' x d projection basis.
  Matrix stored;            ///< n x d', the (dequantized, scaled) stored projections.
  std::vector<int> labels;  ///< Labels of the stored points.
  std::size_t seen = 0;     ///< Stream length so far.
  double scale = 1.0;       ///< sqrt(d / d').
};

ProjectionSketch decode_projection_sketch(const BitState& state,
                                          const ProjectionSeparatorConfig& cfg,
                                          const SharedRandomness& randomness);

/// The projection basis used by projection_separator for a given run.
Subspace projection_basis(const ProjectionSeparatorConfig& cfg, std::size_t d,
                          const SharedRandomness& randomness);

// --- registry --------------------------------------------------------------

struct AlgorithmParams {
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::size_t max_perceptron_passes = 1'000'000;
  ProjectionSeparatorConfig projection;
};

/// Names accepted by make_algorithm: zero, random-unit, offline-kernel,
/// offline-lstsq, offline-separator, proj-separator.
const std::vector<std::string>& registered_algorithms();

/// Throws InvalidArgument for an unknown name.
std::unique_ptr<OnePassAlgorithm> make_algorithm(const std::string& name,
                                                 const AlgorithmParams& params);

}  // namespace nullstream
