// Copyright 2026 The Refocus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small dense complex matrices, the two distances used throughout the
// library, and reproducible random sampling.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "refocus/errors.hpp"
#include "refocus/tolerances.hpp"

namespace refocus {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector3 = Eigen::Vector3d;

inline constexpr int kMaxDim = 8;

inline bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

/// max |M†M − 𝟙| over entries.
inline double unitarity_error(const Matrix& m) {
  const Matrix g = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return g.cwiseAbs().maxCoeff();
}

/// A d×d unitary, 1 ≤ d ≤ kMaxDim. Elements of U(d): global phases are kept.
class Unitary {
 public:
  Unitary() : m_(Matrix::Identity(1, 1)) {}

  /// Validates shape, finiteness and unitarity to `tol · d`.
  static Unitary checked(Matrix m, double tol = kTolerances.unitarity) {
    if (m.rows() != m.cols())
      throw DomainError("matrix is not square");
    if (m.rows() < 1 || m.rows() > kMaxDim)
      throw DomainError("dimension " + std::to_string(m.rows()) +
                        " outside [1, " + std::to_string(kMaxDim) + "]");
    if (!all_finite(m)) throw DomainError("matrix has non-finite entries");
    const double err = unitarity_error(m);
    if (err > tol * static_cast<double>(m.rows()))
      throw DomainError("matrix is not unitary (|M†M - 1|max = " +
                        std::to_string(err) + ")");
    return Unitary(std::move(m));
  }

  /// Wraps a matrix already known to be unitary, e.g. a product of unitaries.
  static Unitary trusted(Matrix m) { return Unitary(std::move(m)); }

  static Unitary identity(int d) {
    return Unitary(Matrix::Identity(d, d));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  Unitary adjoint() const { return Unitary(m_.adjoint()); }
  Complex determinant() const { return m_.determinant(); }

 private:
  explicit Unitary(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

inline void require_same_dim(const Unitary& a, const Unitary& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

inline Unitary multiply(const Unitary& a, const Unitary& b) {
  require_same_dim(a, b);
  return Unitary::trusted(a.matrix() * b.matrix());
}

inline Unitary operator*(const Unitary& a, const Unitary& b) {
  return multiply(a, b);
}

/// V U V†.
inline Unitary conjugate(const Unitary& v, const Unitary& u) {
  require_same_dim(v, u);
  return Unitary::trusted(v.matrix() * u.matrix() * v.matrix().adjoint());
}

inline Unitary scaled(const Unitary& u, Complex phase) {
  return Unitary::trusted(u.matrix() * phase);
}

/// Largest singular value, from the eigenvalues of M†M.
inline double op_norm(const Matrix& m) {
  const Matrix g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double op_norm_dist(const Unitary& a, const Unitary& b) {
  require_same_dim(a, b);
  return op_norm(a.matrix() - b.matrix());
}

inline double op_norm_dist_to_identity(const Unitary& u) {
  return op_norm(u.matrix() - Matrix::Identity(u.dim(), u.dim()));
}

/// Qubit Hilbert-Schmidt distance ½√tr((A−B)†(A−B)).
inline double hs_norm_dist(const Unitary& a, const Unitary& b) {
  require_same_dim(a, b);
  if (a.dim() != 2)
    throw DomainError("hs_norm_dist is defined for dim 2 only");
  return 0.5 * (a.matrix() - b.matrix()).norm();
}

inline double hs_norm_dist_to_identity(const Unitary& u) {
  return hs_norm_dist(u, Unitary::identity(u.dim()));
}

// ---------------------------------------------------------------------------
// Randomness

/// A reproducible random stream identified by (seed, stream id). Streams are
/// values: copying one forks an identical sequence, and `substream(k)` derives
/// an independent stream for trial k.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return position_; }

  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, mix(stream_ ^ mix(index + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t next_u64() {
    ++position_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

/// Complex Ginibre matrix with E|z|² = 1.
inline Matrix ginibre(int d, RngStream& rng) {
  Matrix g(d, d);
  const double s = std::sqrt(0.5);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = Complex(s * rng.normal(), s * rng.normal());
  return g;
}

/// Divides out a d-th root of the determinant so the result lies in SU(d).
inline Unitary to_special(const Unitary& u) {
  const Complex det = u.determinant();
  const double phase = std::arg(det) / static_cast<double>(u.dim());
  return Unitary::trusted(u.matrix() * std::polar(1.0, -phase));
}

/// Nearest unitary with determinant `det` to a matrix that has that property
/// up to roundoff. Products of many factors drift off the group, and maps that
/// raise U to a power amplify the drift geometrically, so iterated maps
/// re-project.
inline Unitary reproject_unitary(const Matrix& m, Complex det = Complex(1.0, 0.0)) {
  const auto d = static_cast<double>(m.rows());
  const Complex root = std::polar(1.0, std::arg(det) / d);
  if (m.rows() == 2 && m.cols() == 2) {
    // SU(2) is the unit quaternions: average out the non-quaternion part.
    const Matrix s = m / root;
    const Complex p = 0.5 * (s(0, 0) + std::conj(s(1, 1)));
    const Complex q = 0.5 * (s(0, 1) - std::conj(s(1, 0)));
    const double n = std::sqrt(std::norm(p) + std::norm(q));
    Matrix out(2, 2);
    out << p / n, q / n, -std::conj(q) / n, std::conj(p) / n;
    return Unitary::trusted(out * root);
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
  const double drift = std::arg(polar.determinant() / det) / d;
  polar *= std::polar(1.0, -drift);
  return Unitary::trusted(std::move(polar));
}

/// Determinant of U^n for U close to unitary; snaps to 1 when U is special
/// within tolerance so that iterating does not compound phase roundoff.
inline Complex power_determinant(const Unitary& u, int n) {
  const Complex det = u.determinant();
  if (std::abs(det - Complex(1.0, 0.0)) <= kTolerances.determinant) return {1.0, 0.0};
  return std::polar(1.0, n * std::arg(det));
}

/// Haar-random element of SU(d): QR of a Ginibre matrix, R-diagonal phase
/// correction, then determinant normalization.
inline Unitary haar_unitary(int d, RngStream& rng) {
  if (d < 1 || d > kMaxDim)
    throw DomainError("haar_unitary: dimension out of range");
  for (;;) {
    const Matrix g = ginibre(d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix& packed = qr.matrixQR();
    bool degenerate = false;
    Eigen::VectorXcd phases(d);
    for (int i = 0; i < d; ++i) {
      const double r = std::abs(packed(i, i));
      if (r < 1e-300) degenerate = true;
      phases(i) = r > 0 ? packed(i, i) / r : Complex(1.0);
    }
    if (degenerate) continue;
    Matrix q = qr.householderQ();
    q = q * phases.asDiagonal();
    return to_special(Unitary::trusted(std::move(q)));
  }
}

/// Uniformly distributed point of S², normalized Gaussian draw.
inline Vector3 random_unit_vector3(RngStream& rng) {
  for (;;) {
    Vector3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-150) return v / n;
  }
}

/// diag(e^{iθ_j}) with uniform angles, shifted so the determinant is 1.
inline Unitary random_diagonal_special(int d, RngStream& rng) {
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) theta(i) = 2.0 * std::numbers::pi * rng.uniform();
  theta.array() -= theta.mean();
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = std::polar(1.0, theta(i));
  return Unitary::trusted(std::move(m));
}

/// exp(iH) for Hermitian H.
inline Unitary exp_i_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  Eigen::VectorXcd e(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) e(i) = std::polar(1.0, lambda(i));
  const Matrix& q = es.eigenvectors();
  return Unitary::trusted(q * e.asDiagonal() * q.adjoint());
}

/// Traceless Hermitian matrix drawn from the Gaussian unitary ensemble.
inline Matrix random_traceless_hermitian(int d, RngStream& rng) {
  const Matrix g = ginibre(d, rng);
  Matrix h = 0.5 * (g + g.adjoint());
  h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  return h;
}

/// Principal logarithm of a unitary, returned as the Hermitian Θ with
/// U = exp(iΘ) and eigenvalues of Θ in (−π, π].
inline Matrix principal_log_hermitian(const Unitary& u) {
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  const int d = u.dim();
  Eigen::VectorXcd theta(d);
  for (int i = 0; i < d; ++i) theta(i) = std::arg(t(i, i));
  return q * theta.asDiagonal() * q.adjoint();
}

}  // namespace refocus
