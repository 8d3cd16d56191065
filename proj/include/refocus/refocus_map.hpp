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

// The refocusing maps f(U) = ∏_j S_j U S_j†. The qubit map uses the Pauli
// conjugators (X, Y, Z, 𝟙); the qudit map uses σ_a over [d]² in canonical
// index order, smallest index leftmost.

#include <string>
#include <string_view>
#include <vector>

#include "refocus/matcore.hpp"
#include "refocus/weyl.hpp"

namespace refocus {

enum class RefocusMap { qubit, qudit };

inline std::string_view to_string(RefocusMap m) {
  return m == RefocusMap::qubit ? "qubit" : "qudit";
}

inline Unitary pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Unitary::trusted(m);
}

inline Unitary pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return Unitary::trusted(m);
}

inline Unitary pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Unitary::trusted(m);
}

/// Conjugators S_1 … S_M of the map, leftmost factor first.
inline const std::vector<Unitary>& conjugators(RefocusMap map, int d) {
  if (map == RefocusMap::qubit) {
    if (d != 2) throw DomainError("qubit map requires dim 2");
    static const std::vector<Unitary> paulis{pauli_x(), pauli_y(), pauli_z(),
                                             Unitary::identity(2)};
    return paulis;
  }
  return weyl_basis(d);
}

/// ∏_j S_j U S_j†, multiplied left to right.
inline Unitary apply_map(RefocusMap map, const Unitary& u) {
  const auto& conj = conjugators(map, u.dim());
  Matrix acc = Matrix::Identity(u.dim(), u.dim());
  for (const auto& s : conj) acc = acc * s.matrix() * u.matrix() * s.matrix().adjoint();
  return Unitary::trusted(std::move(acc));
}

}  // namespace refocus
