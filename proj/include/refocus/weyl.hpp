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

// Generalized Pauli (Weyl) operators: the shift X|x⟩ = |x+1 mod d⟩, the clock
// Z|x⟩ = ω^x|x⟩ with ω = e^{2πi/d}, and the basis σ_a = Z^{a1} X^{a2}.

#include <array>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "refocus/matcore.hpp"

namespace refocus {

/// Index a = (a1, a2) ∈ [d]² of σ_a. Ordered by d·a1 + a2.
struct WeylIndex {
  int a1 = 0;
  int a2 = 0;
  int dim = 2;

  int linear() const { return dim * a1 + a2; }
  bool is_identity() const { return a1 == 0 && a2 == 0; }

  static WeylIndex from_linear(int dim, int k) { return {k / dim, k % dim, dim}; }

  friend bool operator==(const WeylIndex& a, const WeylIndex& b) {
    return a.dim == b.dim && a.a1 == b.a1 && a.a2 == b.a2;
  }
  friend bool operator<(const WeylIndex& a, const WeylIndex& b) {
    return a.linear() < b.linear();
  }
};

inline void require_weyl_dim(int d) {
  if (d < 2 || d > kMaxDim)
    throw DomainError("Weyl operators need 2 <= d <= " + std::to_string(kMaxDim));
}

inline Complex weyl_omega(int d) {
  return std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(d));
}

/// ω^k with the exponent reduced mod d first, so ω^d is exactly 1.
inline Complex omega_power(int d, long k) {
  const long r = ((k % d) + d) % d;
  if (r == 0) return Complex(1.0, 0.0);
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) /
                             static_cast<double>(d));
}

inline Unitary weyl_x(int d) {
  require_weyl_dim(d);
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < d; ++x) m((x + 1) % d, x) = 1.0;
  return Unitary::trusted(std::move(m));
}

inline Unitary weyl_z(int d) {
  require_weyl_dim(d);
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < d; ++x) m(x, x) = omega_power(d, x);
  return Unitary::trusted(std::move(m));
}

/// Symplectic form [a, b] = a1 b2 − a2 b1, so σ_a σ_b = ω^{[a,b]} σ_b σ_a.
inline int symplectic(const WeylIndex& a, const WeylIndex& b) {
  return a.a1 * b.a2 - a.a2 * b.a1;
}

/// σ_a = Z^{a1} X^{a2}, built entry by entry: σ_a |x⟩ = ω^{a1 (x+a2)} |x+a2⟩.
inline Unitary sigma(const WeylIndex& a) {
  const int d = a.dim;
  require_weyl_dim(d);
  if (a.a1 < 0 || a.a1 >= d || a.a2 < 0 || a.a2 >= d)
    throw DomainError("Weyl index out of range");
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < d; ++x) {
    const int y = (x + a.a2) % d;
    m(y, x) = omega_power(d, static_cast<long>(a.a1) * y);
  }
  return Unitary::trusted(std::move(m));
}

/// All indices of [d]² in canonical order.
inline std::vector<WeylIndex> weyl_indices(int d) {
  require_weyl_dim(d);
  std::vector<WeylIndex> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (int k = 0; k < d * d; ++k) out.push_back(WeylIndex::from_linear(d, k));
  return out;
}

/// σ_a for every a in canonical order; built once per dimension and shared.
inline const std::vector<Unitary>& weyl_basis(int d) {
  require_weyl_dim(d);
  static std::array<std::once_flag, kMaxDim + 1> flags;
  static std::array<std::unique_ptr<std::vector<Unitary>>, kMaxDim + 1> tables;
  std::call_once(flags[static_cast<std::size_t>(d)], [d] {
    auto table = std::make_unique<std::vector<Unitary>>();
    for (const auto& a : weyl_indices(d)) table->push_back(sigma(a));
    tables[static_cast<std::size_t>(d)] = std::move(table);
  });
  return *tables[static_cast<std::size_t>(d)];
}

}  // namespace refocus
