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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"

using namespace refocus;
using Catch::Matchers::WithinAbs;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Uniform point on S³ from four Gaussians, as an SU(2) matrix. Independent of
// the QR-based sampler under test.
Unitary s3_sample(RngStream& rng) {
  double q[4];
  double n = 0.0;
  for (double& x : q) {
    x = rng.normal();
    n += x * x;
  }
  n = std::sqrt(n);
  for (double& x : q) x /= n;
  return Unitary::trusted(mat2({q[0], q[3]}, {q[2], q[1]}, {-q[2], q[1]}, {q[0], -q[3]}));
}

}  // namespace

TEST_CASE("checked construction rejects bad matrices") {
  CHECK_THROWS_AS(Unitary::checked(Matrix::Identity(2, 3)), DomainError);
  CHECK_THROWS_AS(Unitary::checked(Matrix::Identity(9, 9)), DomainError);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = 1.001;
  CHECK_THROWS_AS(Unitary::checked(m), DomainError);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Unitary::checked(m), DomainError);
  CHECK_NOTHROW(Unitary::checked(Matrix::Identity(4, 4)));
}

TEST_CASE("dimension mismatch is reported") {
  CHECK_THROWS_AS(Unitary::identity(2) * Unitary::identity(3), DimensionMismatch);
  CHECK_THROWS_AS(op_norm_dist(Unitary::identity(2), Unitary::identity(3)), DimensionMismatch);
}

TEST_CASE("norm closed forms on rotations") {
  // exp(iθ/2 Z) has eigenvalues e^{±iθ/2}: ‖U−𝟙‖ = 2 sin(θ/4), HS = √(1 − cos(θ/2)).
  for (double theta : {0.0, 0.1, 1.0, 2.5, std::numbers::pi, 5.0}) {
    const Unitary u = Unitary::trusted(
        mat2(std::polar(1.0, theta / 2), 0.0, 0.0, std::polar(1.0, -theta / 2)));
    CHECK_THAT(op_norm_dist_to_identity(u), WithinAbs(2.0 * std::abs(std::sin(theta / 4)), 1e-14));
    CHECK_THAT(hs_norm_dist_to_identity(u), WithinAbs(std::sqrt(1.0 - std::cos(theta / 2)), 1e-14));
  }
  CHECK_THROWS_AS(hs_norm_dist_to_identity(Unitary::identity(3)), DomainError);
}

TEST_CASE("op norm agrees with the largest singular value") {
  RngStream rng(11);
  for (int d = 2; d <= 5; ++d) {
    const Matrix g = ginibre(d, rng);
    Eigen::JacobiSVD<Matrix> svd(g);
    CHECK_THAT(op_norm(g), WithinAbs(svd.singularValues()(0), 1e-12));
  }
}

TEST_CASE("Haar samples are special unitary") {
  RngStream rng(1);
  for (int d = 2; d <= kMaxDim; ++d)
    for (int i = 0; i < 20; ++i) {
      const Unitary u = haar_unitary(d, rng);
      CHECK(unitarity_error(u.matrix()) < 1e-13);
      CHECK(std::abs(u.determinant() - 1.0) < 1e-12);
    }
}

TEST_CASE("Haar trace moments") {
  // E|tr V|² = 1 on SU(d) for d ≥ 2.
  constexpr int n = 40000;
  for (int d : {2, 3}) {
    RngStream rng(100 + static_cast<std::uint64_t>(d));
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = std::norm(haar_unitary(d, rng).matrix().trace());
      s += t;
      s2 += t * t;
    }
    const double mean = s / n;
    const double sd = std::sqrt((s2 / n - mean * mean) / n);
    INFO("d = " << d << " mean " << mean << " sd " << sd);
    CHECK(std::abs(mean - 1.0) < 5 * sd);
  }
}

TEST_CASE("Haar SU(2) matches the S3 Gaussian sampler") {
  // E|a| = 4/(3π) for the first quaternion coordinate of a uniform point on S³.
  constexpr int n = 40000;
  RngStream a(5), b(6);
  double qr = 0.0, gauss = 0.0;
  for (int i = 0; i < n; ++i) {
    qr += std::abs(haar_unitary(2, a).matrix().trace().real() / 2.0);
    gauss += std::abs(s3_sample(b).matrix().trace().real() / 2.0);
  }
  const double expected = 4.0 / (3.0 * std::numbers::pi);
  // Var|a| = E a² − (E|a|)² with E a² = 1/4.
  const double sd = std::sqrt(0.25 - expected * expected) / std::sqrt(n);
  CHECK(std::abs(qr / n - expected) < 5 * sd);
  CHECK(std::abs(gauss / n - expected) < 5 * sd);
}

TEST_CASE("streams are reproducible and substreams differ") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.position() == 100);
  RngStream x(42), y(42);
  CHECK(x.next_u64() != c.next_u64());
  RngStream s0 = x.substream(0), s1 = x.substream(1), s0b = y.substream(0);
  const auto v0 = s0.next_u64();
  CHECK(v0 == s0b.next_u64());
  CHECK(v0 != s1.next_u64());
}

TEST_CASE("uniform and normal draws have the right moments") {
  RngStream rng(9);
  constexpr int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK_THAT(su / n, WithinAbs(0.5, 5 * std::sqrt(1.0 / 12 / n)));
  CHECK_THAT(sn / n, WithinAbs(0.0, 5 / std::sqrt(n)));
  CHECK_THAT(sn2 / n, WithinAbs(1.0, 5 * std::sqrt(2.0 / n)));
}

TEST_CASE("reprojection keeps the determinant and removes drift") {
  RngStream rng(3);
  for (int d : {2, 3, 5}) {
    const Unitary u = haar_unitary(d, rng);
    Matrix noisy = u.matrix();
    noisy(0, 0) += Complex(1e-9, -2e-9);
    const Unitary p = reproject_unitary(noisy);
    CHECK(unitarity_error(p.matrix()) < 1e-14);
    CHECK(std::abs(p.determinant() - 1.0) < 1e-14);
    CHECK(op_norm_dist(p, u) < 1e-8);
    const Complex phase = std::polar(1.0, 0.3);
    const Unitary q = reproject_unitary(noisy * phase, std::pow(phase, d));
    CHECK(std::abs(q.determinant() - std::pow(phase, d)) < 1e-13);
  }
}

TEST_CASE("exp and log of Hermitian generators invert each other") {
  RngStream rng(8);
  for (int d : {2, 3, 4}) {
    const Matrix h = 0.3 * random_traceless_hermitian(d, rng);
    const Unitary u = exp_i_hermitian(h);
    CHECK((principal_log_hermitian(u) - h).norm() < 1e-10);
  }
}

TEST_CASE("random special diagonals") {
  RngStream rng(4);
  for (int d = 2; d <= 6; ++d) {
    const Unitary u = random_diagonal_special(d, rng);
    CHECK(std::abs(u.determinant() - 1.0) < 1e-12);
    CHECK((u.matrix() - Matrix(u.matrix().diagonal().asDiagonal())).norm() == 0.0);
  }
}

TEST_CASE("matrix JSON round-trips bit for bit") {
  RngStream rng(2);
  const Unitary u = haar_unitary(3, rng);
  const std::string text = dump_json(matrix_to_json(u));
  const Matrix back = matrix_from_json(parse_json(text));
  CHECK(back == u.matrix());
  const Json j = parse_json(text);
  CHECK(j.begin().key() == "dim");
}

TEST_CASE("matrix JSON schema errors") {
  CHECK_THROWS_AS(matrix_from_json(parse_json(R"({"dim":2,"re":[[1,0]],"im":[[0,0]]})")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(parse_json(R"({"dim":2,"re":[[1,0],[0,1]]})")), ParseError);
  CHECK_THROWS_AS(unitary_from_json(parse_json(R"({"dim":2,"re":[[1,1],[0,1]],"im":[[0,0],[0,0]]})")),
                  ParseError);
  try {
    parse_json("{\"dim\": 2,, }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 11);
  }
}
