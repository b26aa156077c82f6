#include "nullstream/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nullstream/errors.hpp"

namespace nullstream {

namespace {

Matrix stack_rows(std::span<const Vector> vectors) {
  if (vectors.empty()) return Matrix(0, 0);
  const Eigen::Index d = vectors.front().size();
  Matrix out(static_cast<Eigen::Index>(vectors.size()), d);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != d) {
      throw DimensionMismatch("vector " + std::to_string(i) + " has length " +
                              std::to_string(vectors[i].size()) + ", expected " +
                              std::to_string(d));
    }
    out.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  return out;
}

void require_same_ambient(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw DimensionMismatch("ambient dimensions differ: " + std::to_string(u.ambient_dim()) +
                            " vs " + std::to_string(v.ambient_dim()));
  }
}

void require_equal_dims(const Subspace& u, const Subspace& v) {
  require_same_ambient(u, v);
  if (u.dim() != v.dim()) {
    throw DimensionMismatch("subspace dimensions differ: " + std::to_string(u.dim()) + " vs " +
                            std::to_string(v.dim()));
  }
}

}  // namespace

Subspace::Subspace(Matrix basis, std::size_t ambient_dim)
    : basis_(std::move(basis)), ambient_dim_(ambient_dim) {}

Subspace Subspace::from_orthonormal_rows(Matrix basis) {
  const auto d = static_cast<std::size_t>(basis.cols());
  return from_orthonormal_rows(std::move(basis), d);
}

Subspace Subspace::from_orthonormal_rows(Matrix basis, std::size_t ambient_dim) {
  if (static_cast<std::size_t>(basis.cols()) != ambient_dim) {
    throw DimensionMismatch("basis has " + std::to_string(basis.cols()) +
                            " columns, ambient dimension is " + std::to_string(ambient_dim));
  }
  if (basis.rows() > basis.cols()) {
    throw InvalidArgument("more basis rows than the ambient dimension");
  }
  if (basis.rows() > 0) {
    const Matrix gram = basis * basis.transpose();
    const double err =
        (gram - Matrix::Identity(basis.rows(), basis.rows())).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
      throw InvalidArgument("basis rows are not orthonormal (error " + std::to_string(err) + ")");
    }
  }
  return Subspace(std::move(basis), ambient_dim);
}

Subspace Subspace::full(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Subspace(Matrix::Identity(n, n), d);
}

Subspace Subspace::zero(std::size_t d) {
  return Subspace(Matrix(0, static_cast<Eigen::Index>(d)), d);
}

Matrix Subspace::projector() const { return basis_.transpose() * basis_; }

Subspace orthonormalize(const Matrix& vectors) {
  const Eigen::Index d = vectors.cols();
  if (vectors.rows() == 0 || d == 0) throw DegenerateInput("no vectors to orthonormalize");

  Eigen::ColPivHouseholderQR<Matrix> qr(vectors.transpose());
  qr.setThreshold(kRankTolerance);
  if (qr.maxPivot() == 0.0) throw DegenerateInput("all input vectors are zero");
  const Eigen::Index rank = qr.rank();
  if (rank == 0) throw DegenerateInput("all input vectors are numerically zero");

  Matrix q = qr.householderQ() * Matrix::Identity(d, rank);
  return Subspace::from_orthonormal_rows(q.transpose(), static_cast<std::size_t>(d));
}

Subspace orthonormalize(std::span<const Vector> vectors) {
  return orthonormalize(stack_rows(vectors));
}

Vector project(const Subspace& s, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != s.ambient_dim()) {
    throw DimensionMismatch("vector length " + std::to_string(v.size()) +
                            " vs ambient dimension " + std::to_string(s.ambient_dim()));
  }
  if (s.dim() == 0) return Vector::Zero(v.size());
  return s.basis().transpose() * (s.basis() * v);
}

Subspace complement(const Subspace& s) {
  const std::size_t d = s.ambient_dim();
  const std::size_t k = s.dim();
  if (k == 0) return Subspace::full(d);
  if (k == d) return Subspace::zero(d);

  const auto n = static_cast<Eigen::Index>(d);
  Eigen::HouseholderQR<Matrix> qr(s.basis().transpose());
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix rest = q.rightCols(n - static_cast<Eigen::Index>(k)).transpose();
  return Subspace::from_orthonormal_rows(std::move(rest), d);
}

Subspace direct_sum(const Subspace& u, const Subspace& v) {
  require_same_ambient(u, v);
  if (u.dim() == 0) return v;
  if (v.dim() == 0) return u;

  Matrix stacked(static_cast<Eigen::Index>(u.dim() + v.dim()),
                 static_cast<Eigen::Index>(u.ambient_dim()));
  stacked << u.basis(), v.basis();
  Subspace sum = orthonormalize(stacked);
  if (sum.dim() < u.dim() + v.dim()) {
    throw OverlapDetected("direct sum has rank " + std::to_string(sum.dim()) + " < " +
                          std::to_string(u.dim() + v.dim()));
  }
  return sum;
}

void apply_sign_convention(Vector& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) > 1e-12) {
      if (w[i] < 0) w = -w;
      return;
    }
  }
}

Vector kernel_vector(const Matrix& vectors) {
  const Eigen::Index d = vectors.cols();
  if (d < 1 || vectors.rows() != d - 1) {
    throw DimensionMismatch("kernel_vector needs d-1 vectors in R^d, got " +
                            std::to_string(vectors.rows()) + " vectors of length " +
                            std::to_string(d));
  }
  Vector w;
  if (d == 1) {
    w = Vector::Ones(1);
    return w;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(vectors.transpose());
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < d - 1) {
    throw RankDeficient("input has rank " + std::to_string(qr.rank()) + " < " +
                        std::to_string(d - 1));
  }
  // The last Householder column is orthogonal to the column space of A^T.
  Vector e_last = Vector::Zero(d);
  e_last[d - 1] = 1.0;
  w = qr.householderQ() * e_last;
  w.normalize();
  apply_sign_convention(w);
  return w;
}

Vector kernel_vector(std::span<const Vector> vectors) { return kernel_vector(stack_rows(vectors)); }

std::vector<double> principal_angles(const Subspace& u, const Subspace& v) {
  require_equal_dims(u, v);
  if (u.dim() == 0) return {};
  const Matrix cosines = u.basis() * v.basis().transpose();
  Eigen::JacobiSVD<Matrix> svd(cosines);
  const Vector& s = svd.singularValues();  // nonincreasing

  std::vector<double> angles(static_cast<std::size_t>(s.size()));
  // Largest cosine is the smallest angle; emit largest angle first.
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double c = std::clamp(s[i], 0.0, 1.0);
    angles[static_cast<std::size_t>(s.size() - 1 - i)] = std::acos(c);
  }
  return angles;
}

double chordal_distance(const Subspace& u, const Subspace& v) {
  require_equal_dims(u, v);
  if (u.dim() == 0) return 0.0;
  const Matrix residual = u.basis() - (u.basis() * v.basis().transpose()) * v.basis();
  return residual.norm();
}

Spectrum singular_values(const Matrix& m) {
  Spectrum out;
  const auto d = static_cast<std::size_t>(m.cols());
  out.values.assign(d, 0.0);
  if (m.rows() == 0 || m.cols() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out.values[static_cast<std::size_t>(i)] = std::max(0.0, s[i]);
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

EigCertificate min_eig_symmetric(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("min_eig_symmetric needs a nonempty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  EigCertificate cert;
  cert.lambda_min = std::max(0.0, eig.eigenvalues()[0]);
  cert.witness = eig.eigenvectors().col(0).normalized();
  apply_sign_convention(cert.witness);
  return cert;
}

EigCertificate min_eig_projector_sum(std::span<const Subspace> subspaces) {
  if (subspaces.empty()) throw EmptyList("no subspaces given");
  const std::size_t d = subspaces.front().ambient_dim();
  const auto n = static_cast<Eigen::Index>(d);
  Matrix sum = Matrix::Zero(n, n);
  for (const Subspace& s : subspaces) {
    if (s.ambient_dim() != d) throw DimensionMismatch("subspaces live in different ambient spaces");
    if (s.dim() > 0) sum.noalias() += s.basis().transpose() * s.basis();
  }
  return min_eig_symmetric(sum);
}

Matrix sample_gaussian(std::size_t rows, std::size_t cols, Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = normal(rng);
  }
  return g;
}

Vector sample_uniform_sphere(std::size_t d, Rng& rng) {
  if (d == 0) throw ZeroDimensional("cannot sample from the sphere in R^0");
  std::normal_distribution<double> normal;
  Vector x(static_cast<Eigen::Index>(d));
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
    norm = x.norm();
  } while (norm == 0.0);
  return x / norm;
}

Vector sample_uniform_subsphere(const Subspace& s, Rng& rng) {
  if (s.dim() == 0) throw ZeroDimensional("cannot sample from the unit sphere of {0}");
  const Vector coeffs = sample_uniform_sphere(s.dim(), rng);
  Vector x = s.basis().transpose() * coeffs;
  return x / x.norm();
}

Subspace sample_grassmannian(std::size_t k, std::size_t d, Rng& rng) {
  if (k < 1 || k > d) {
    throw InvalidArgument("Gr(k,d) needs 1 <= k <= d, got k=" + std::to_string(k) +
                          ", d=" + std::to_string(d));
  }
  for (int attempt = 0; attempt < 8; ++attempt) {
    Subspace s = orthonormalize(sample_gaussian(k, d, rng));
    if (s.dim() == k) return s;
  }
  throw RankDeficient("Gaussian sample for Gr(" + std::to_string(k) + "," + std::to_string(d) +
                      ") was rank deficient repeatedly");
}

}  // namespace nullstream
