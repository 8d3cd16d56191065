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

// Approximate inverses from forward uses only. With W a net word close to
// U†, V = WU lies near 𝟙, and m rounds of the refocusing map flatten f^m(V)
// into R₁ V R₂ V ⋯ Rₙ V with Weyl pulses Rⱼ. Dropping the final U leaves a
// word A = R₁ W U R₂ W ⋯ Rₙ W with ‖A − U†‖ = ‖f^m(V) − 𝟙‖.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "refocus/errors.hpp"
#include "refocus/flatten.hpp"
#include "refocus/gateset.hpp"
#include "refocus/json_io.hpp"
#include "refocus/net.hpp"
#include "refocus/qubit.hpp"
#include "refocus/qudit.hpp"

namespace refocus {

enum class InverseMode {
  qubit,    // d = 2, Hilbert-Schmidt contraction ε ↦ √8 ε²
  generic,  // any d, operator-norm contraction ε ↦ α ε²
};

inline std::string_view to_string(InverseMode m) {
  return m == InverseMode::qubit ? "qubit" : "generic";
}

struct InverseApproxConfig {
  InverseMode mode = InverseMode::qubit;
  double mu = 0.5;      // generic mode: the net must be a (μ/α)-net
  int max_rounds = 12;  // refuse words longer than M^max_rounds copies of U
};

struct InverseApproxResult {
  GateWord word;          // over `gates`
  GateSet gates;          // the input gate set, plus the operand when it was appended
  Symbol operand = 0;     // symbol standing for U
  std::size_t net_index = 0;
  std::size_t net_word_length = 0;
  double eps0 = 0.0;      // distance of WU from 𝟙 in the mode's norm
  int rounds = 0;         // m
  double bound = 0.0;     // operator-norm bound on ‖product − U†‖
  double error = 0.0;     // measured ‖product − U†‖
  double constant = 1.0;  // C in ‖g_ε(U) − U†‖ ≤ C ε

  Json to_json() const {
    Json j;
    j["word"] = word_to_json(gates, word);
    j["operand"] = operand;
    j["net_word_length"] = net_word_length;
    j["eps0"] = eps0;
    j["rounds"] = rounds;
    j["bound"] = bound;
    j["error"] = error;
    j["C"] = constant;
    return j;
  }
};

namespace detail {

/// Word over Weyl gates whose product is `phase`·𝟙, found breadth-first.
inline std::vector<Symbol> central_word(const GateSet& gs, Complex phase) {
  const int d = gs.dim();
  if (std::abs(phase - Complex(1.0, 0.0)) < 1e-9) return {};
  std::vector<Symbol> weyl;
  for (const auto& a : weyl_indices(d))
    if (const auto g = gs.weyl_gate(a)) weyl.push_back(g->symbol);
  const Matrix target = phase * Matrix::Identity(d, d);
  std::vector<std::pair<std::vector<Symbol>, Matrix>> layer{{{}, Matrix::Identity(d, d)}};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::pair<std::vector<Symbol>, Matrix>> next;
    for (const auto& [word, prod] : layer)
      for (const Symbol s : weyl) {
        Matrix p = gs.gate(s).matrix() * prod;
        std::vector<Symbol> w = word;
        w.push_back(s);
        if ((p - target).cwiseAbs().maxCoeff() < 1e-9) return w;
        next.emplace_back(std::move(w), std::move(p));
      }
    layer = std::move(next);
  }
  throw DomainError("no short Weyl word realizes the required global phase");
}

/// Smallest m with bound(m) ≤ eps, or -1 past `max_rounds`.
template <class Bound>
int minimal_rounds(Bound&& bound, double eps, int max_rounds) {
  for (int m = 0; m <= max_rounds; ++m)
    if (bound(m) <= eps) return m;
  return -1;
}

}  // namespace detail

/// Word over `gs` approximating gate(operand)† to within `eps` (operator
/// norm), using gate(operand) but never its inverse.
inline InverseApproxResult inverse_approx(const GateSet& gs, Symbol operand, double eps,
                                          const EpsilonNet& net,
                                          const InverseApproxConfig& cfg = {}) {
  if (!gs.has_weyl()) throw DomainError("inverse approximation needs every Weyl operator in the gate set");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const Unitary& u = gs.gate(operand);
  const int d = gs.dim();
  if (net.dim() != d) throw DimensionMismatch(d, net.dim());
  if (cfg.mode == InverseMode::qubit && d != 2)
    throw DomainError("qubit inverse mode needs d = 2");

  InverseApproxResult out;
  out.gates = gs;
  out.operand = operand;

  const auto hit = net.nearest(u.adjoint());
  const GateWord& w = net.entry(hit.index);
  out.net_index = hit.index;
  out.net_word_length = w.length();
  const Unitary v = w.product() * u;

  const QuditConstants c = QuditConstants::for_dim(d);
  std::function<double(int)> bound;
  if (cfg.mode == InverseMode::qubit) {
    out.eps0 = hs_norm_dist_to_identity(v);
    if (out.eps0 > kQubitShrinkRadius)
      throw DomainError("net too coarse: nearest word leaves WU at Hilbert-Schmidt distance " +
                        std::to_string(out.eps0) + " > 1/4 (need net radius <= " +
                        std::to_string(kQubitShrinkRadius * std::numbers::sqrt2) + ")");
    // operator norm is √2 times Hilbert-Schmidt on SU(2)
    bound = [e0 = out.eps0](int m) { return std::numbers::sqrt2 * qubit_contraction_bound(e0, m); };
  } else {
    if (!(cfg.mu > 0.0 && cfg.mu < 1.0)) throw DomainError("mu must lie in (0, 1)");
    out.eps0 = op_norm_dist_to_identity(v);
    const double a = c.alpha_tight;
    if (a * out.eps0 > cfg.mu)
      throw DomainError("net too coarse: nearest word leaves WU at distance " +
                        std::to_string(out.eps0) + " (need net radius <= mu/alpha = " +
                        std::to_string(cfg.mu / a) + ")");
    bound = [a, e0 = out.eps0](int m) {
      if (e0 == 0.0) return 0.0;
      return std::exp(std::ldexp(1.0, m) * std::log(a * e0)) / a;
    };
  }
  const int m = detail::minimal_rounds(bound, eps, cfg.max_rounds);
  if (m < 0)
    throw DomainError("inverse approximation needs more than " + std::to_string(cfg.max_rounds) +
                      " rounds for eps = " + std::to_string(eps));
  out.rounds = m;
  out.bound = bound(m);

  ProtocolTrace trace;
  trace.dim = d;
  trace.map = cfg.mode == InverseMode::qubit ? RefocusMap::qubit : RefocusMap::qudit;
  trace.norm = cfg.mode == InverseMode::qubit ? NormKind::hs : NormKind::op;
  trace.rounds.resize(static_cast<std::size_t>(m));
  const PulseSequence seq = normalize(flatten(trace, v, std::size_t{1} << 40));

  // Matrix order R₁ W U R₂ W U ⋯ Rₙ W; symbols are stored in acting order.
  std::vector<Symbol> symbols;
  symbols.reserve(seq.uses_of_U() * (w.length() + 2));
  Complex phase(1.0, 0.0);
  for (std::size_t j = seq.uses_of_U(); j-- > 0;) {
    if (j + 1 < seq.uses_of_U()) symbols.push_back(operand);
    symbols.insert(symbols.end(), w.symbols().begin(), w.symbols().end());
    const auto [c_j, gate] = gs.split_weyl(Matrix(seq.pulse_view(j)));
    if (gate) symbols.push_back(*gate);
    phase *= c_j;
  }
  const auto central = detail::central_word(gs, phase / std::abs(phase));
  symbols.insert(symbols.end(), central.begin(), central.end());

  out.word = GateWord(gs, std::move(symbols));
  out.error = op_norm_dist(out.word.product(), u.adjoint());
  return out;
}

/// Same, for a matrix outside the gate set: U joins the set as gate "U".
inline InverseApproxResult inverse_approx(const Unitary& u, double eps, const EpsilonNet& net,
                                          const GateSet& gs, const InverseApproxConfig& cfg = {}) {
  auto [extended, operand] = gs.with_operand("U", u);
  return inverse_approx(extended, operand, eps, net, cfg);
}

}  // namespace refocus
