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

// Solovay-Kitaev compilation on SU(2) and its inverse-free variant.
//
// The recursion is the classical one: approximate U at depth n−1, write the
// residual Δ = U U_{n−1}† as a balanced group commutator V W V† W†, and
// approximate V and W at depth n−1. The inverse-free variant replaces each
// formal inverse symbol by an approximate inverse built from forward uses.

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "refocus/errors.hpp"
#include "refocus/gateset.hpp"
#include "refocus/inverse_approx.hpp"
#include "refocus/json_io.hpp"
#include "refocus/net.hpp"
#include "refocus/qubit.hpp"

namespace refocus {

/// exp(i θ/2 n·σ) for a unit axis n.
inline Unitary su2_rotation(const Vector3& axis, double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return su2_compose({c, s * axis.x(), s * axis.y(), s * axis.z()});
}

/// Angle θ ∈ [0, 2π] and unit axis n with U = exp(i θ/2 n·σ).
inline std::pair<double, Vector3> su2_axis_angle(const Unitary& u) {
  const Su2Params p = su2_decompose(u);
  Vector3 v(p.b, p.c, p.d);
  const double s = v.norm();
  const double theta = 2.0 * std::atan2(s, p.a);
  if (s < 1e-300) return {theta, Vector3(0.0, 0.0, 1.0)};
  return {theta, v / s};
}

/// V, W ∈ SU(2) with V W V† W† = Δ, both rotations by the same angle φ,
/// sin(φ/2) = √(sin(θ/4)), so that ‖V − 𝟙‖, ‖W − 𝟙‖ = O(√‖Δ − 𝟙‖).
inline std::pair<Unitary, Unitary> gc_decompose(const Unitary& delta) {
  const auto [theta, axis] = su2_axis_angle(delta);
  const double phi = 2.0 * std::asin(std::sqrt(std::sin(theta / 4.0)));
  const Unitary v0 = su2_rotation(Vector3(1.0, 0.0, 0.0), phi);
  const Unitary w0 = su2_rotation(Vector3(0.0, 1.0, 0.0), phi);
  const Unitary comm = v0 * w0 * v0.adjoint() * w0.adjoint();
  const auto [theta_c, axis_c] = su2_axis_angle(comm);

  // Rotate the commutator's axis onto Δ's axis; try both orientations of the
  // connecting rotation and keep the better one.
  Vector3 k = axis_c.cross(axis);
  const double cosang = std::clamp(axis_c.dot(axis), -1.0, 1.0);
  if (k.norm() < 1e-12) {
    k = axis_c.cross(Vector3(1.0, 0.0, 0.0));
    if (k.norm() < 1e-6) k = axis_c.cross(Vector3(0.0, 1.0, 0.0));
  }
  k.normalize();
  const double ang = std::acos(cosang);
  std::pair<Unitary, Unitary> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (const double sign : {1.0, -1.0}) {
    const Unitary s = su2_rotation(k, sign * ang);
    const Unitary v = conjugate(s, v0), w = conjugate(s, w0);
    const double err = op_norm_dist(v * w * v.adjoint() * w.adjoint(), delta);
    if (err < best_err) {
      best_err = err;
      best = {v, w};
    }
  }
  return best;
}

struct SkResult {
  GateWord word;
  int depth = 0;
  double error = 0.0;                // ‖product − U‖
  std::vector<double> level_errors;  // error at depth 0, 1, …

  Json to_json(const GateSet& gs) const {
    Json j;
    j["word"] = word_to_json(gs, word);
    j["depth"] = depth;
    j["error"] = error;
    j["level_errors"] = level_errors;
    return j;
  }
};

class SkError : public Error {
 public:
  SkError(const std::string& what, std::vector<double> level_errors)
      : Error(what), levels_(std::move(level_errors)) {}
  const std::vector<double>& level_errors() const { return levels_; }

 private:
  std::vector<double> levels_;
};

inline constexpr int kDefaultSkMaxDepth = 8;

namespace detail {

inline GateWord sk_recurse(const Unitary& u, int n, const EpsilonNet& net) {
  if (n == 0) return net.entry(net.nearest(u).index);
  const GateWord prev = sk_recurse(u, n - 1, net);
  const Unitary delta = reproject_unitary((u * prev.product().adjoint()).matrix());
  const auto [v, w] = gc_decompose(delta);
  const GateWord vw = sk_recurse(v, n - 1, net);
  const GateWord ww = sk_recurse(w, n - 1, net);
  return multiply(multiply(multiply(multiply(vw, ww), inverse(vw)), inverse(ww)), prev);
}

}  // namespace detail

/// Compiles U ∈ SU(2) to within `eps` (operator norm), deepening the
/// recursion until the error target is met. Formal inverse symbols appear in
/// the output; `allow_inverses = false` is served by inverse_free_compile.
inline SkResult sk_compile(const Unitary& u, double eps, const GateSet& gs, const EpsilonNet& net,
                           bool allow_inverses = true, int max_depth = kDefaultSkMaxDepth) {
  if (u.dim() != 2 || gs.dim() != 2 || net.dim() != 2)
    throw DomainError("Solovay-Kitaev compilation is implemented for d = 2 only");
  if (!allow_inverses)
    throw DomainError("sk_compile emits formal inverses; use inverse_free_compile instead");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  require_special(u);
  SkResult out;
  for (int n = 0; n <= max_depth; ++n) {
    GateWord w = detail::sk_recurse(u, n, net);
    // Re-multiply from the symbols so the reported error is not the cached one.
    w = GateWord(gs, std::vector<Symbol>(w.symbols()));
    const double err = op_norm_dist(w.product(), u);
    out.level_errors.push_back(err);
    if (err <= eps) {
      out.word = std::move(w);
      out.depth = n;
      out.error = err;
      return out;
    }
  }
  std::string msg = "Solovay-Kitaev did not reach eps = " + std::to_string(eps) +
                    " by depth " + std::to_string(max_depth) + "; errors per depth:";
  for (const double e : out.level_errors) msg += " " + std::to_string(e);
  throw SkError(msg, out.level_errors);
}

struct InverseFreeResult {
  GateWord word;
  SkResult sk;                  // the compilation with inverses, at eps/2
  std::size_t inverse_count = 0;  // L_inv
  double beta = 0.0;            // per-substitution budget eps/(2 L_inv C)
  double constant = 1.0;        // C
  double error = 0.0;           // ‖product − U‖
  std::map<Symbol, InverseApproxResult> substitutions;

  Json to_json(const GateSet& gs) const {
    Json j;
    j["word"] = word_to_json(gs, word);
    j["error"] = error;
    j["sk_length"] = sk.word.length();
    j["sk_depth"] = sk.depth;
    j["sk_error"] = sk.error;
    j["inverse_count"] = inverse_count;
    j["beta"] = beta;
    j["C"] = constant;
    Json subs = Json::array();
    for (const auto& [s, r] : substitutions) {
      Json e;
      e["gate"] = gs.symbol_name(s);
      e["length"] = r.word.length();
      e["rounds"] = r.rounds;
      e["eps0"] = r.eps0;
      e["error"] = r.error;
      subs.push_back(std::move(e));
    }
    j["substitutions"] = std::move(subs);
    return j;
  }
};

/// Compiles U to within eps using only forward gates: Solovay-Kitaev with
/// inverses at eps/2, then every formal inverse V† replaced by an approximate
/// inverse at eps/(2 L_inv C), where L_inv counts the inverse symbols.
inline InverseFreeResult inverse_free_compile(const Unitary& u, double eps, const GateSet& gs,
                                              const EpsilonNet& net,
                                              const InverseApproxConfig& cfg = {},
                                              int max_depth = kDefaultSkMaxDepth) {
  if (!gs.has_weyl()) throw DomainError("inverse-free compilation needs every Weyl operator in the gate set");
  InverseFreeResult out;
  out.sk = sk_compile(u, eps / 2.0, gs, net, true, max_depth);
  out.inverse_count = out.sk.word.inverse_count();
  out.constant = 1.0;
  if (out.inverse_count == 0) {
    out.word = out.sk.word;
    out.error = out.sk.error;
    return out;
  }
  out.beta = eps / (2.0 * static_cast<double>(out.inverse_count) * out.constant);
  std::vector<Symbol> symbols;
  for (const Symbol s : out.sk.word.symbols()) {
    if (!is_inverse_symbol(s)) {
      symbols.push_back(s);
      continue;
    }
    const Symbol b = base_symbol(s);
    auto it = out.substitutions.find(b);
    if (it == out.substitutions.end())
      it = out.substitutions.emplace(b, inverse_approx(gs, b, out.beta, net, cfg)).first;
    const auto& sub = it->second.word.symbols();
    symbols.insert(symbols.end(), sub.begin(), sub.end());
  }
  out.word = GateWord(gs, std::move(symbols));
  out.error = op_norm_dist(out.word.product(), u);
  return out;
}

}  // namespace refocus
