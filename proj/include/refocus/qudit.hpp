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

// Refocusing in dimension d: f(U) = ∏_{a∈[d]²} σ_a U σ_a†, Haar conjugations
// g(U) = VUV†, and the constants that size the shrinking and jumping regions.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "refocus/errors.hpp"
#include "refocus/flatten.hpp"
#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"
#include "refocus/refocus_map.hpp"
#include "refocus/trace.hpp"
#include "refocus/weyl.hpp"

namespace refocus {

struct QuditConstants {
  int dim = 2;
  double alpha = 0.0;        // 2^{d²+1}
  double alpha_tight = 0.0;  // 2^{d²} + d²(4e − 9) − 1
  double delta = 0.0;        // 1 / (2 α d²)
  double nu = 0.0;           // 2 arcsin(δ/2)
  double p_bound = 0.0;      // (δ/10)^{d²−1}

  static QuditConstants for_dim(int d) {
    require_weyl_dim(d);
    const double d2 = static_cast<double>(d) * d;
    QuditConstants c;
    c.dim = d;
    c.alpha = std::ldexp(1.0, d * d + 1);
    c.alpha_tight = std::ldexp(1.0, d * d) + d2 * (4.0 * std::numbers::e - 9.0) - 1.0;
    c.delta = 1.0 / (2.0 * c.alpha * d2);
    c.nu = 2.0 * std::asin(c.delta / 2.0);
    c.p_bound = std::pow(c.delta / 10.0, d2 - 1.0);
    return c;
  }

  /// Radius 1/(2α) of the shrinking region.
  double shrink_radius() const { return 1.0 / (2.0 * alpha); }

  Json to_json() const {
    Json j;
    j["dim"] = dim;
    j["alpha"] = alpha;
    j["alpha_tight"] = alpha_tight;
    j["delta"] = delta;
    j["nu"] = nu;
    j["p_bound"] = p_bound;
    j["shrink_radius"] = shrink_radius();
    return j;
  }
};

inline Unitary f_qudit(const Unitary& u) {
  require_weyl_dim(u.dim());
  return reproject_unitary(apply_map(RefocusMap::qudit, u).matrix(),
                           power_determinant(u, u.dim() * u.dim()));
}

inline bool in_shrinking_region_d(const Unitary& u) {
  const auto c = QuditConstants::for_dim(u.dim());
  return op_norm_dist_to_identity(u) <= c.shrink_radius() + kTolerances.region_slack;
}

/// Ground truth: f(U) lands in the shrinking region.
inline bool in_jumping_region_d(const Unitary& u) {
  return in_shrinking_region_d(f_qudit(u));
}

struct NearDiagonal {
  bool certified = false;
  double distance = 0.0;  // ‖U − D‖, infinite when no D could be formed
  Unitary diagonal;
};

/// Sufficient condition for the jumping region: ‖U − D‖ ≤ δ for the
/// determinant-one diagonal D closest in phase to U's diagonal. Since
/// f(D) = 𝟙, the hybrid bound then puts f(U) within d²δ = 1/(2α) of 𝟙.
inline NearDiagonal near_diagonal(const Unitary& u) {
  const int d = u.dim();
  const auto c = QuditConstants::for_dim(d);
  NearDiagonal out;
  out.distance = std::numeric_limits<double>::infinity();
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) {
    const Complex z = u(i, i);
    if (std::abs(z) < 1e-300) return out;
    theta(i) = std::arg(z);
  }
  // Spread the phase excess so that Σθ ≡ arg det U (mod 2π).
  const double excess = std::remainder(theta.sum() - std::arg(u.determinant()),
                                       2.0 * std::numbers::pi);
  theta.array() -= excess / d;
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = std::polar(1.0, theta(i));
  out.diagonal = Unitary::trusted(std::move(m));
  out.distance = op_norm_dist(u, out.diagonal);
  out.certified = out.distance <= c.delta;
  return out;
}

/// (‖f(U) − f(V)‖, d²‖U − V‖).
inline std::pair<double, double> hybrid_bound_check(const Unitary& u, const Unitary& v) {
  require_same_dim(u, v);
  const double d2 = static_cast<double>(u.dim()) * u.dim();
  return {op_norm_dist(f_qudit(u), f_qudit(v)), d2 * op_norm_dist(u, v)};
}

/// Haar conjugation: returns (V U V†, V).
inline std::pair<Unitary, Unitary> g_qudit(const Unitary& u, RngStream& rng) {
  const Unitary v = haar_unitary(u.dim(), rng);
  return {conjugate(v, u), v};
}

struct QuditCost {
  int dim = 2;
  double random_rounds = 0.0;  // log₂η / log₂(1 − p)
  double shrink_rounds = 0.0;  // log₂log₂(1/(αε))
  double k = 0.0;              // ceil of the sum; may exceed any integer type
  double log2_uses = 0.0;      // log₂ d^{2k}
  std::optional<std::uint64_t> uses;  // d^{2k} when it fits the budget
  bool unbounded = false;

  Json to_json() const {
    Json j;
    j["dim"] = dim;
    j["random_rounds"] = random_rounds;
    j["shrink_rounds"] = shrink_rounds;
    j["k"] = k;
    j["log2_uses"] = log2_uses;
    if (uses)
      j["uses"] = *uses;
    else
      j["uses"] = nullptr;
    j["unbounded"] = unbounded;
    return j;
  }
};

/// Round count k ≥ log₂η/log₂(1−p) + log₂log₂(1/(αε)) and its cost d^{2k}.
/// `uses_budget` caps the representable cost; beyond it the cost is flagged
/// unbounded instead of reported as a number.
inline QuditCost qudit_k(int d, double epsilon, double eta,
                         std::uint64_t uses_budget = std::uint64_t{1} << 40) {
  const auto c = QuditConstants::for_dim(d);
  if (!(epsilon > 0.0 && epsilon < c.shrink_radius()))
    throw DomainError("qudit epsilon must lie in (0, 1/(2 alpha))");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  QuditCost cost;
  cost.dim = d;
  cost.random_rounds = std::log(eta) / std::log1p(-c.p_bound);
  cost.shrink_rounds = std::log2(std::log2(1.0 / (c.alpha * epsilon)));
  cost.k = std::ceil(cost.random_rounds + cost.shrink_rounds);
  cost.log2_uses = 2.0 * cost.k * std::log2(static_cast<double>(d));
  if (cost.log2_uses < 63.0) {
    std::uint64_t n = 1;
    for (double i = 0; i < cost.k; i += 1.0) n *= static_cast<std::uint64_t>(d * d);
    if (n <= uses_budget) cost.uses = n;
  }
  cost.unbounded = !cost.uses.has_value();
  return cost;
}

/// Source of conjugating unitaries: given the current operator and the
/// stream, returns V. The default draws V from the Haar measure.
using ConjugationSource = std::function<Unitary(const Unitary&, RngStream&)>;

struct QuditProtocolConfig {
  double epsilon = 1e-6;
  double eta = 0.25;
  ProtocolMode mode = ProtocolMode::monitored;
  RngStream rng{0};
  std::size_t max_rounds = 64;
  std::uint64_t uses_budget = std::uint64_t{1} << 40;
  bool emit_sequence = true;
  std::size_t sequence_budget = kDefaultSequenceBudget;
  ConjugationSource conjugation;  // empty → Haar
};

/// Runs F = (f∘g)^k on U ∈ SU(d).
///
/// Monitored mode: each round applies g then f, except that once the operator
/// lies in the jumping region (ground-truth predicate) the conjugation is
/// skipped; rounds stop when the distance is ≤ ε or `max_rounds` is reached.
/// Oblivious mode runs k = qudit_k rounds and refuses when d^{2k} exceeds
/// `uses_budget`.
inline ProtocolTrace refocus_qudit(const Unitary& u, QuditProtocolConfig cfg) {
  const int d = u.dim();
  require_weyl_dim(d);
  const auto c = QuditConstants::for_dim(d);
  if (!(cfg.epsilon > 0.0)) throw DomainError("epsilon must be positive");

  ProtocolTrace trace;
  trace.dim = d;
  trace.map = RefocusMap::qudit;
  trace.norm = NormKind::op;
  trace.mode = cfg.mode;

  Unitary cur = u;
  double eps = op_norm_dist_to_identity(cur);
  trace.initial_eps = eps;

  const auto round = [&](bool conjugate_first) {
    RoundRecord rec;
    rec.eps_before = eps;
    if (conjugate_first) {
      const Unitary v = cfg.conjugation ? cfg.conjugation(cur, cfg.rng) : haar_unitary(d, cfg.rng);
      cur = conjugate(v, cur);
      rec.pulse = v;
    }
    const Unitary next = f_qudit(cur);
    rec.jumped = op_norm_dist_to_identity(next) <= c.shrink_radius() + kTolerances.region_slack &&
                 eps > c.shrink_radius() + kTolerances.region_slack;
    cur = next;
    eps = op_norm_dist_to_identity(cur);
    rec.eps_after = eps;
    trace.rounds.push_back(std::move(rec));
  };

  trace.status = "converged";
  if (cfg.mode == ProtocolMode::oblivious) {
    const QuditCost cost = qudit_k(d, cfg.epsilon, cfg.eta, cfg.uses_budget);
    if (cost.unbounded) {
      trace.status = "refused";
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "oblivious protocol refused: k = %.6g rounds means n = d^{2k} = 2^%.6g uses of U",
                    cost.k, cost.log2_uses);
      trace.sequence_note = buf;
      trace.final_operator = cur;
      trace.final_eps = eps;
      trace.success = false;
      return trace;
    }
    for (double i = 0; i < cost.k; i += 1.0) round(true);
  } else {
    while (eps > cfg.epsilon) {
      if (trace.rounds.size() == cfg.max_rounds) {
        trace.status = "round_cap";
        break;
      }
      const bool settled = eps <= c.shrink_radius() + kTolerances.region_slack ||
                           in_jumping_region_d(cur);
      round(!settled);
    }
  }

  trace.final_operator = cur;
  trace.final_eps = eps;
  trace.success = eps <= cfg.epsilon;
  if (!trace.success && trace.status == "converged") trace.status = "not_converged";
  detail::attach_sequence(trace, u, cfg.emit_sequence, cfg.sequence_budget);
  return trace;
}

}  // namespace refocus
