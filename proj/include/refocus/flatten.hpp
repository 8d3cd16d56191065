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

// Expansion of a protocol trace into a single pulse sequence.
//
// The composite operator is tracked as a word C₀ U C₁ U ⋯ U Cₙ. A conjugation
// by R multiplies C₀ on the left by R and Cₙ on the right by R†. One
// application of f = ∏_j S_j (·) S_j† concatenates M copies of the word; the
// constants meeting at each seam merge into Cₙ S_j† S_{j+1} C₀.

#include <cstddef>
#include <vector>

#include "refocus/matcore.hpp"
#include "refocus/pulse_sequence.hpp"
#include "refocus/refocus_map.hpp"
#include "refocus/trace.hpp"

namespace refocus {

/// Default cap on n·d² stored complex numbers (256 MiB).
inline constexpr std::size_t kDefaultSequenceBudget = std::size_t{1} << 24;

/// Whether flattening a trace of this shape stays within `budget`.
inline bool sequence_fits(int dim, std::size_t conjugator_count, std::size_t rounds,
                          std::size_t budget = kDefaultSequenceBudget) {
  double n = static_cast<double>(dim) * dim;
  for (std::size_t r = 0; r < rounds; ++r) n *= static_cast<double>(conjugator_count);
  return n <= static_cast<double>(budget);
}

namespace detail {

/// Scales every pulse after the first so its largest entry (first in
/// row-major order among near-ties) is real and positive, and moves the
/// removed phases onto the first pulse. Scalars commute with U, so the
/// product is unchanged.
inline void fold_phases(PulseSequence& seq) {
  const int d = seq.dim();
  const auto block = static_cast<std::size_t>(d * d);
  auto& data = seq.data();
  const std::size_t n = seq.uses_of_U();
  if (n == 0) return;
  Complex carried(1.0, 0.0);
  const auto canonicalize = [&](Complex* p) {
    double max_norm = 0.0;
    for (std::size_t k = 0; k < block; ++k) max_norm = std::max(max_norm, std::norm(p[k]));
    const double cut = max_norm * (1.0 - 2e-9);
    std::size_t k = 0;
    // column-major storage: scan row-major for the first near-maximal entry
    for (int i = 0; i < d; ++i) {
      bool hit = false;
      for (int j = 0; j < d; ++j)
        if (std::norm(p[static_cast<std::size_t>(j * d + i)]) >= cut) {
          k = static_cast<std::size_t>(j * d + i);
          hit = true;
          break;
        }
      if (hit) break;
    }
    const Complex v = p[k];
    if (v.imag() == 0.0 && v.real() > 0.0) return;
    const Complex pivot = v / std::abs(v);
    const Complex inv = std::conj(pivot);
    for (std::size_t q = 0; q < block; ++q) p[q] *= inv;
    carried *= pivot;
    carried /= std::abs(carried);
  };
  for (std::size_t i = 1; i < n; ++i) canonicalize(data.data() + i * block);
  if (seq.has_trailing()) {
    Matrix t = seq.trailing();
    canonicalize(t.data());
    seq.set_trailing(std::move(t));
  }
  for (std::size_t k = 0; k < block; ++k) data[k] *= carried;
}

}  // namespace detail

/// Replays the trace symbolically and returns the pulses in the form
/// R₁ U R₂ U ⋯ Rₙ U R_{n+1}, with R_{n+1} kept as the flagged trailing pulse.
/// The pulses depend only on the trace's conjugations and the map, never on U;
/// `u` is accepted for the dimension contract.
inline PulseSequence flatten(const ProtocolTrace& trace, const Unitary& u,
                             std::size_t budget = kDefaultSequenceBudget) {
  if (trace.dim != u.dim()) throw DimensionMismatch(trace.dim, u.dim());
  const int d = trace.dim;
  const auto block = static_cast<std::size_t>(d * d);
  const auto& conj = conjugators(trace.map, d);
  const std::size_t m = conj.size();
  if (!sequence_fits(d, m, trace.rounds.size(), budget))
    throw DomainError("flattened sequence exceeds the storage budget (" +
                      std::to_string(trace.uses_of_U()) + " uses of U)");

  // Seam factors S_j† S_{j+1}.
  std::vector<Matrix> seams;
  for (std::size_t j = 0; j + 1 < m; ++j)
    seams.push_back(conj[j].matrix().adjoint() * conj[j + 1].matrix());

  // constants C₀ … Cₙ, flat.
  std::vector<Complex> cur(2 * block);
  {
    const Matrix id = Matrix::Identity(d, d);
    std::copy(id.data(), id.data() + block, cur.begin());
    std::copy(id.data(), id.data() + block, cur.begin() + static_cast<std::ptrdiff_t>(block));
  }
  std::vector<Complex> next;
  using Map = Eigen::Map<Matrix>;

  for (const auto& round : trace.rounds) {
    const std::size_t n = cur.size() / block - 1;
    if (round.pulse) {
      Map c0(cur.data(), d, d);
      Map cn(cur.data() + n * block, d, d);
      const Matrix& r = round.pulse->matrix();
      const Matrix new_c0 = r * c0;
      const Matrix new_cn = cn * r.adjoint();
      c0 = new_c0;
      cn = new_cn;
    }
    const Map c0(cur.data(), d, d);
    const Map cn(cur.data() + n * block, d, d);
    const std::size_t n_next = m * n;
    next.resize((n_next + 1) * block);
    auto put = [&](std::size_t idx, const Matrix& mat) {
      std::copy(mat.data(), mat.data() + block, next.begin() + static_cast<std::ptrdiff_t>(idx * block));
    };
    put(0, conj[0].matrix() * c0);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t base = j * n;
      // interior constants C₁ … C_{n−1} are copied verbatim
      if (n > 1)
        std::copy(cur.begin() + static_cast<std::ptrdiff_t>(block),
                  cur.begin() + static_cast<std::ptrdiff_t>(n * block),
                  next.begin() + static_cast<std::ptrdiff_t>((base + 1) * block));
      if (j + 1 < m)
        put(base + n, cn * seams[j] * c0);
      else
        put(base + n, cn * conj[j].matrix().adjoint());
    }
    cur.swap(next);
  }

  const std::size_t n = cur.size() / block - 1;
  PulseSequence seq(d, trace.norm);
  seq.set_trailing(Matrix(Map(cur.data() + n * block, d, d)));
  cur.resize(n * block);
  seq.data() = std::move(cur);
  detail::fold_phases(seq);
  return seq;
}

namespace detail {

inline void attach_sequence(ProtocolTrace& trace, const Unitary& u, bool emit,
                            std::size_t budget) {
  if (!emit) return;
  const auto m = conjugators(trace.map, trace.dim).size();
  if (!sequence_fits(trace.dim, m, trace.rounds.size(), budget)) {
    trace.sequence_note = "sequence omitted: " + std::to_string(trace.uses_of_U()) +
                          " uses of U exceed the storage budget";
    return;
  }
  trace.sequence = normalize(flatten(trace, u, budget));
}

}  // namespace detail

}  // namespace refocus
