#pragma once

// Dense linear-algebra substrate: subspaces carried as orthonormal row bases,
// projections, principal angles, chordal distance, kernel vectors, singular
// values and projector-sum eigenvalue certificates.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nullstream {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Relative tolerance used for every numerical-rank decision.
inline constexpr double kRankTolerance = 1e-10;

/// A k-dimensional linear subspace of R^d, stored as a k x d matrix whose rows
/// are orthonormal. k = 0 is allowed (the zero subspace).
class Subspace {
 public:
  Subspace() = default;

  /// Validates orthonormality (max-entry error of B B^T - I at most 1e-10).
  static Subspace from_orthonormal_rows(Matrix basis);
  static Subspace from_orthonormal_rows(Matrix basis, std::size_t ambient_dim);
  static Subspace full(std::size_t d);
  static Subspace zero(std::size_t d);

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  const Matrix& basis() const noexcept { return basis_; }

  /// Orthogonal projection matrix B^T B (d x d).
  Matrix projector() const;

 private:
  Subspace(Matrix basis, std::size_t ambient_dim);

  Matrix basis_;
  std::size_t ambient_dim_ = 0;
};

/// Nonincreasing list of singular values.
struct Spectrum {
  std::vector<double> values;

  double max() const { return values.empty() ? 0.0 : values.front(); }
  double min() const { return values.empty() ? 0.0 : values.back(); }
  std::size_t size() const noexcept { return values.size(); }
};

/// Smallest eigenvalue of a symmetric PSD matrix together with a unit witness.
struct EigCertificate {
  double lambda_min = 0.0;
  Vector witness;
};

/// Rows of `vectors` are the input vectors. Rank is decided by column-pivoted
/// Householder QR at relative tolerance kRankTolerance.
Subspace orthonormalize(const Matrix& vectors);
Subspace orthonormalize(std::span<const Vector> vectors);

Vector project(const Subspace& s, const Vector& v);
Subspace complement(const Subspace& s);

/// Throws OverlapDetected when the spans intersect numerically.
Subspace direct_sum(const Subspace& u, const Subspace& v);

/// Unit vector orthogonal to the d-1 rows of `vectors`, oriented so that its
/// first coordinate above 1e-12 in magnitude is positive.
Vector kernel_vector(const Matrix& vectors);
Vector kernel_vector(std::span<const Vector> vectors);

/// Flips `w` in place so its first coordinate above 1e-12 is positive.
void apply_sign_convention(Vector& w);

/// Principal angles between equal-dimension subspaces, largest first
/// (theta_1 >= ... >= theta_k), each in [0, pi/2].
std::vector<double> principal_angles(const Subspace& u, const Subspace& v);

/// sqrt(sum sin^2 theta_i). Evaluated as the Frobenius norm of the part of
/// U's basis orthogonal to V, which equals the sine form but keeps full
/// relative accuracy for nearly coincident subspaces.
double chordal_distance(const Subspace& u, const Subspace& v);

Spectrum singular_values(const Matrix& m);

/// lambda_min of sum_i P_i over the given subspaces, with a unit witness.
EigCertificate min_eig_projector_sum(std::span<const Subspace> subspaces);
EigCertificate min_eig_symmetric(const Matrix& m);

Vector sample_uniform_sphere(std::size_t d, Rng& rng);
Vector sample_uniform_subsphere(const Subspace& s, Rng& rng);
Subspace sample_grassmannian(std::size_t k, std::size_t d, Rng& rng);
Matrix sample_gaussian(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 1.0);

}  // namespace nullstream
