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

// One-qubit refocusing: quaternion coordinates U = a𝟙 + i(bX + cY + dZ), the
// map f(U) = XUX·YUY·ZUZ·U, random reflections g(U) = (r·σ)U(r·σ)†, and the
// protocol F = (f∘g)^k.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>

#include "refocus/errors.hpp"
#include "refocus/flatten.hpp"
#include "refocus/matcore.hpp"
#include "refocus/refocus_map.hpp"
#include "refocus/trace.hpp"

namespace refocus {

struct Su2Params {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  Vector3 u() const { return {b, c, d}; }
  double norm_sq() const { return a * a + b * b + c * c + d * d; }
};

inline void require_qubit(const Unitary& u) {
  if (u.dim() != 2) throw DomainError("expected a qubit (dim 2) operator");
}

/// Throws if det U is not 1 within the determinant tolerance; the message
/// reports the global phase that would have to be removed.
inline void require_special(const Unitary& u) {
  const Complex det = u.determinant();
  if (std::abs(det - Complex(1.0, 0.0)) > kTolerances.determinant)
    throw DomainError("operator is not in SU(" + std::to_string(u.dim()) +
                      "): det = e^{i*" + std::to_string(std::arg(det)) +
                      "}, global phase e^{i*" +
                      std::to_string(std::arg(det) / u.dim()) + "}");
}

inline Su2Params su2_decompose(const Unitary& u) {
  require_qubit(u);
  require_special(u);
  const Matrix& m = u.matrix();
  Su2Params p;
  p.a = 0.5 * (m(0, 0) + m(1, 1)).real();
  p.b = 0.5 * (m(0, 1) + m(1, 0)).imag();
  p.c = 0.5 * (m(0, 1) - m(1, 0)).real();
  p.d = 0.5 * (m(0, 0) - m(1, 1)).imag();
  return p;
}

inline Unitary su2_compose(const Su2Params& p) {
  if (std::abs(p.norm_sq() - 1.0) > 1e-10)
    throw DomainError("Su2Params must satisfy a^2+b^2+c^2+d^2 = 1");
  Matrix m(2, 2);
  m << Complex(p.a, p.d), Complex(p.c, p.b), Complex(-p.c, p.b), Complex(p.a, -p.d);
  return Unitary::trusted(m);
}

inline Unitary f_qubit(const Unitary& u) {
  require_qubit(u);
  return reproject_unitary(apply_map(RefocusMap::qubit, u).matrix(),
                           power_determinant(u, 4));
}

/// Distance of f(U) from 𝟙 in closed form: √8 |b d|.
inline double epsilon_after_f(const Su2Params& p) {
  return std::sqrt(8.0) * std::abs(p.b * p.d);
}

inline constexpr double kQubitShrinkRadius = 0.25;

inline double qubit_jump_threshold() { return 1.0 / std::sqrt(128.0); }

inline bool in_shrinking_region(const Unitary& u) {
  require_qubit(u);
  return hs_norm_dist_to_identity(u) <= kQubitShrinkRadius + kTolerances.region_slack;
}

inline bool in_jumping_region(const Unitary& u) {
  const Su2Params p = su2_decompose(u);
  return std::abs(p.b * p.d) <= qubit_jump_threshold() + kTolerances.region_slack;
}

/// r·σ for a unit vector r; Hermitian and unitary with det −1.
inline Unitary pauli_vector(const Vector3& r) {
  Matrix m(2, 2);
  m << Complex(r.z(), 0.0), Complex(r.x(), -r.y()), Complex(r.x(), r.y()), Complex(-r.z(), 0.0);
  return Unitary::trusted(m);
}

/// Random reflection: returns (R U R†, R) with R = r·σ, r uniform on S².
inline std::pair<Unitary, Unitary> g_qubit(const Unitary& u, RngStream& rng) {
  require_qubit(u);
  const Unitary r = pauli_vector(random_unit_vector3(rng));
  return {conjugate(r, u), r};
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 99% normal-approximation half-width
  std::size_t samples = 0;
  std::size_t hits = 0;
};

inline constexpr double kZ99 = 2.5758293035489004;

inline MonteCarloEstimate binomial_estimate(std::size_t hits, std::size_t samples) {
  MonteCarloEstimate e;
  e.samples = samples;
  e.hits = hits;
  e.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  e.ci_halfwidth = kZ99 * std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
  return e;
}

/// Monte Carlo estimate of P[|cosθ sinθ cosφ| ≤ threshold] for a uniformly
/// random direction (θ polar, φ azimuthal): the chance that a random
/// reflection lands a maximal-|u| operator in the jumping region.
inline MonteCarloEstimate jump_probability_mc(std::size_t samples, RngStream& rng,
                                              double threshold = qubit_jump_threshold()) {
  if (samples < 1000) throw DomainError("jump_probability_mc needs at least 1000 samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vector3 r = random_unit_vector3(rng);
    hits += std::abs(r.z() * r.x()) <= threshold;
  }
  return binomial_estimate(hits, samples);
}

inline void require_qubit_targets(double epsilon, double eta) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw DomainError("qubit epsilon must lie in (0, 1/4)");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
}

/// Rounds of f∘g needed so that F = (f∘g)^k reaches ε with probability ≥ 1−η:
/// smallest k ≥ log₂(1/η)/log₂(4/3) + log₂log₂(1/(√8 ε)) + 1.
inline int qubit_k(double epsilon, double eta) {
  require_qubit_targets(epsilon, eta);
  const double k = std::log2(1.0 / eta) / std::log2(4.0 / 3.0) +
                   std::log2(std::log2(1.0 / (std::sqrt(8.0) * epsilon))) + 1.0;
  return static_cast<int>(std::ceil(k));
}

/// Upper bound on the pulse count n = 4^k: (16/η⁵)·log₂²(1/(√8 ε)).
inline double qubit_pulse_bound(double epsilon, double eta) {
  require_qubit_targets(epsilon, eta);
  const double l = std::log2(1.0 / (std::sqrt(8.0) * epsilon));
  return 16.0 / std::pow(eta, 5.0) * l * l;
}

/// Deterministic f steps needed from the shrinking region:
/// smallest m ≥ log₂log₂(1/(√8 ε)) + 1.
inline int qubit_shrink_steps(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw DomainError("qubit epsilon must lie in (0, 1/4)");
  return static_cast<int>(std::ceil(std::log2(std::log2(1.0 / (std::sqrt(8.0) * epsilon))) + 1.0));
}

/// √8^{2^m − 1} ε₀^{2^m}: the HS distance bound after m applications of f.
inline double qubit_contraction_bound(double eps0, int m) {
  if (eps0 <= 0.0) return 0.0;
  const double p = std::ldexp(1.0, m);
  return std::exp((p - 1.0) * 0.5 * std::log(8.0) + p * std::log(eps0));
}

struct QubitProtocolConfig {
  double epsilon = 1e-4;
  double eta = 0.25;
  ProtocolMode mode = ProtocolMode::oblivious;
  RngStream rng{0};
  std::size_t max_random_rounds = 200;
  bool emit_sequence = true;
  std::size_t sequence_budget = kDefaultSequenceBudget;
};

/// Runs F = (f∘g)^k on U ∈ SU(2).
///
/// Oblivious mode applies exactly k = qubit_k(ε, η) rounds. Monitored mode
/// ends the random phase once the operator enters the jumping region (the
/// round whose f input is in J is the jump round) and then applies f until
/// the distance is ≤ ε, at most qubit_shrink_steps(ε) times.
inline ProtocolTrace refocus_qubit(const Unitary& u, QubitProtocolConfig cfg) {
  require_qubit(u);
  require_special(u);
  require_qubit_targets(cfg.epsilon, cfg.eta);

  ProtocolTrace trace;
  trace.dim = 2;
  trace.map = RefocusMap::qubit;
  trace.norm = NormKind::hs;
  trace.mode = cfg.mode;

  Unitary cur = u;
  double eps = hs_norm_dist_to_identity(cur);
  trace.initial_eps = eps;

  const auto random_round = [&] {
    RoundRecord rec;
    rec.eps_before = eps;
    auto [conj, r] = g_qubit(cur, cfg.rng);
    rec.pulse = std::move(r);
    rec.jumped = in_jumping_region(conj);
    cur = f_qubit(conj);
    eps = hs_norm_dist_to_identity(cur);
    rec.eps_after = eps;
    trace.rounds.push_back(std::move(rec));
  };
  const auto plain_round = [&](bool jumped) {
    RoundRecord rec;
    rec.eps_before = eps;
    rec.jumped = jumped;
    cur = f_qubit(cur);
    eps = hs_norm_dist_to_identity(cur);
    rec.eps_after = eps;
    trace.rounds.push_back(std::move(rec));
  };

  trace.status = "converged";
  if (cfg.mode == ProtocolMode::oblivious) {
    const int k = qubit_k(cfg.epsilon, cfg.eta);
    for (int i = 0; i < k; ++i) random_round();
  } else {
    std::size_t random_rounds = 0;
    while (eps > cfg.epsilon && !in_shrinking_region(cur)) {
      if (in_jumping_region(cur)) {
        plain_round(true);
        break;
      }
      if (random_rounds == cfg.max_random_rounds) {
        trace.status = "round_cap";
        break;
      }
      random_round();
      ++random_rounds;
      if (trace.rounds.back().jumped) break;
    }
    const int m = qubit_shrink_steps(cfg.epsilon);
    for (int i = 0; i < m && eps > cfg.epsilon && trace.status != "round_cap"; ++i)
      plain_round(false);
  }

  trace.final_operator = cur;
  trace.final_eps = eps;
  trace.success = eps <= cfg.epsilon;
  if (!trace.success && trace.status == "converged") trace.status = "not_converged";
  detail::attach_sequence(trace, u, cfg.emit_sequence, cfg.sequence_budget);
  return trace;
}

}  // namespace refocus
