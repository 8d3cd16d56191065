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

// Finite gate sets and words over them. A word stores gate symbols in the
// order they act, so the word s₀ s₁ ⋯ s_L denotes G[s_L] ⋯ G[s₁] G[s₀].
// A formal inverse of gate s is the symbol ~s (always negative).

#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refocus/errors.hpp"
#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"
#include "refocus/weyl.hpp"

namespace refocus {

using Symbol = std::int32_t;

constexpr bool is_inverse_symbol(Symbol s) { return s < 0; }
constexpr Symbol inverse_symbol(Symbol s) { return ~s; }
constexpr Symbol base_symbol(Symbol s) { return s < 0 ? ~s : s; }

/// A gate in `matrix` equal to `phase` times a Weyl operator.
struct WeylGate {
  Symbol symbol = 0;
  Complex phase{1.0, 0.0};
};

class GateSet {
 public:
  GateSet() = default;

  GateSet(std::vector<std::string> names, std::vector<Unitary> matrices)
      : names_(std::move(names)), matrices_(std::move(matrices)) {
    if (names_.size() != matrices_.size())
      throw DomainError("gate set needs one name per matrix");
    if (matrices_.empty()) throw DomainError("gate set is empty");
    dim_ = matrices_.front().dim();
    for (const auto& m : matrices_) require_same_dim(matrices_.front(), m);
    index_weyl();
  }

  int dim() const { return dim_; }
  std::size_t size() const { return matrices_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Unitary>& matrices() const { return matrices_; }

  /// True iff every σ_a, a ≠ 0, is in the set up to a global phase (σ₀ = 𝟙
  /// is the empty word).
  bool has_weyl() const { return has_weyl_; }

  const Unitary& gate(Symbol s) const {
    check(s);
    return matrices_[static_cast<std::size_t>(s)];
  }

  /// Matrix of a symbol, adjoint for formal inverses.
  Unitary symbol_matrix(Symbol s) const {
    const Unitary& g = gate(base_symbol(s));
    return is_inverse_symbol(s) ? g.adjoint() : g;
  }

  std::string symbol_name(Symbol s) const {
    check(base_symbol(s));
    return names_[static_cast<std::size_t>(base_symbol(s))] + (is_inverse_symbol(s) ? "†" : "");
  }

  std::optional<Symbol> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<Symbol>(i);
    return std::nullopt;
  }

  /// Gate proportional to σ_a, if present. Nullopt for a = 0.
  std::optional<WeylGate> weyl_gate(const WeylIndex& a) const {
    if (a.dim != dim_ || a.is_identity()) return std::nullopt;
    return weyl_[static_cast<std::size_t>(a.linear())];
  }

  /// Writes a Pauli-group element P = c·σ_a as (c', gate) with P = c'·G,
  /// or as a bare phase when a = 0. Throws when P is not of that form.
  std::pair<Complex, std::optional<Symbol>> split_weyl(const Matrix& p) const {
    const double d = dim_;
    for (const auto& a : weyl_indices(dim_)) {
      const Matrix s = sigma(a).matrix();
      const Complex overlap = (s.adjoint() * p).trace() / d;
      if (std::abs(std::abs(overlap) - 1.0) > 1e-9) continue;
      if ((p - overlap * s).norm() > 1e-9) continue;
      if (a.is_identity()) return {overlap, std::nullopt};
      const auto g = weyl_[static_cast<std::size_t>(a.linear())];
      if (!g) break;
      return {overlap / g->phase, g->symbol};
    }
    throw DomainError("pulse is not a Weyl operator available in the gate set");
  }

  /// Copy of the set with one extra gate appended; returns its symbol too.
  std::pair<GateSet, Symbol> with_operand(std::string name, const Unitary& u) const {
    GateSet out = *this;
    require_same_dim(matrices_.front(), u);
    out.names_.push_back(std::move(name));
    out.matrices_.push_back(u);
    out.index_weyl();
    return {std::move(out), static_cast<Symbol>(matrices_.size())};
  }

  /// FNV-1a over names and the %.17g text of every matrix entry.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    const auto feed = [&](std::string_view s) {
      for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
      }
      h ^= 0xff;
      h *= 1099511628211ull;
    };
    char buf[40];
    feed(std::to_string(dim_));
    for (std::size_t i = 0; i < names_.size(); ++i) {
      feed(names_[i]);
      const Matrix& m = matrices_[i].matrix();
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", m.data()[k].real());
        feed(buf);
        std::snprintf(buf, sizeof buf, "%.17g", m.data()[k].imag());
        feed(buf);
      }
    }
    return h;
  }

 private:
  void check(Symbol s) const {
    if (s < 0 || static_cast<std::size_t>(s) >= matrices_.size())
      throw DomainError("symbol " + std::to_string(s) + " is not in the gate set");
  }

  void index_weyl() {
    weyl_.assign(static_cast<std::size_t>(dim_ * dim_), std::nullopt);
    has_weyl_ = false;
    if (dim_ < 2 || dim_ > kMaxDim) return;
    const double d = dim_;
    for (const auto& a : weyl_indices(dim_)) {
      if (a.is_identity()) continue;
      const Matrix s = sigma(a).matrix();
      for (std::size_t i = 0; i < matrices_.size(); ++i) {
        const Matrix& g = matrices_[i].matrix();
        const Complex overlap = (s.adjoint() * g).trace() / d;
        if (std::abs(std::abs(overlap) - 1.0) > kTolerances.absolute * 10) continue;
        if ((g - overlap * s).cwiseAbs().maxCoeff() > kTolerances.absolute) continue;
        weyl_[static_cast<std::size_t>(a.linear())] = WeylGate{static_cast<Symbol>(i), overlap};
        break;
      }
    }
    has_weyl_ = true;
    for (std::size_t k = 1; k < weyl_.size(); ++k) has_weyl_ = has_weyl_ && weyl_[k].has_value();
  }

  int dim_ = 0;
  std::vector<std::string> names_;
  std::vector<Unitary> matrices_;
  std::vector<std::optional<WeylGate>> weyl_;
  bool has_weyl_ = false;
};

/// {H, T, X, Y, Z} rescaled into SU(2).
inline GateSet standard_gate_set() {
  using namespace std::complex_literals;
  const double r = 1.0 / std::numbers::sqrt2;
  const double t = std::numbers::pi / 8.0;
  Matrix h(2, 2), tg(2, 2), x(2, 2), y(2, 2), z(2, 2);
  h << -1i * r, -1i * r, -1i * r, 1i * r;
  tg << std::polar(1.0, -t), 0.0, 0.0, std::polar(1.0, t);
  x << 0.0, -1i, -1i, 0.0;
  y << 0.0, -1.0, 1.0, 0.0;
  z << -1i, 0.0, 0.0, 1i;
  return GateSet({"H", "T", "X", "Y", "Z"},
                 {Unitary::trusted(h), Unitary::trusted(tg), Unitary::trusted(x),
                  Unitary::trusted(y), Unitary::trusted(z)});
}

/// The non-identity Weyl operators σ_a of dimension d rescaled into SU(d),
/// named "W<a1><a2>".
inline GateSet weyl_gate_set(int d) {
  std::vector<std::string> names;
  std::vector<Unitary> mats;
  for (const auto& a : weyl_indices(d)) {
    if (a.is_identity()) continue;
    names.push_back("W" + std::to_string(a.a1) + std::to_string(a.a2));
    mats.push_back(to_special(sigma(a)));
  }
  return GateSet(std::move(names), std::move(mats));
}

inline GateSet gate_set_by_name(std::string_view name) {
  if (name == "std") return standard_gate_set();
  if (name == "weyl2") return weyl_gate_set(2);
  throw DomainError("unknown gate set \"" + std::string(name) + "\" (expected std or weyl2)");
}

namespace detail {

inline Matrix word_product_raw(const GateSet& gs, const std::vector<Symbol>& symbols) {
  const int d = gs.dim();
  if (d == 2) {
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Identity();
    std::vector<Eigen::Matrix2cd> fwd(gs.size()), inv(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      fwd[i] = gs.matrices()[i].matrix();
      inv[i] = fwd[i].adjoint();
    }
    for (const Symbol s : symbols) {
      const auto b = static_cast<std::size_t>(base_symbol(s));
      if (b >= gs.size()) throw DomainError("symbol out of range for the gate set");
      acc = (is_inverse_symbol(s) ? inv[b] : fwd[b]) * acc;
    }
    return Matrix(acc);
  }
  Matrix acc = Matrix::Identity(d, d);
  for (const Symbol s : symbols) acc = gs.symbol_matrix(s).matrix() * acc;
  return acc;
}

}  // namespace detail

/// A word over a gate set with its product cached.
class GateWord {
 public:
  GateWord() = default;

  /// Multiplies the symbols out.
  GateWord(const GateSet& gs, std::vector<Symbol> symbols)
      : symbols_(std::move(symbols)),
        product_(Unitary::trusted(detail::word_product_raw(gs, symbols_))) {}

  /// Trusts a product computed elsewhere (e.g. combined from sub-words).
  static GateWord with_product(std::vector<Symbol> symbols, Unitary product) {
    GateWord w;
    w.symbols_ = std::move(symbols);
    w.product_ = std::move(product);
    return w;
  }

  static GateWord identity(int d) { return with_product({}, Unitary::identity(d)); }

  const std::vector<Symbol>& symbols() const { return symbols_; }
  const Unitary& product() const { return product_; }
  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }

  std::size_t inverse_count() const {
    std::size_t n = 0;
    for (const Symbol s : symbols_) n += is_inverse_symbol(s);
    return n;
  }

 private:
  std::vector<Symbol> symbols_;
  Unitary product_;
};

/// Formal inverse: reversed, every symbol inverted.
inline GateWord inverse(const GateWord& w) {
  std::vector<Symbol> s(w.symbols().rbegin(), w.symbols().rend());
  for (auto& x : s) x = inverse_symbol(x);
  return GateWord::with_product(std::move(s), w.product().adjoint());
}

/// The word whose product is A·B (B acts first).
inline GateWord multiply(const GateWord& a, const GateWord& b) {
  std::vector<Symbol> s;
  s.reserve(a.length() + b.length());
  s.insert(s.end(), b.symbols().begin(), b.symbols().end());
  s.insert(s.end(), a.symbols().begin(), a.symbols().end());
  return GateWord::with_product(std::move(s), a.product() * b.product());
}

/// Distance between the cached product and a fresh multiplication.
inline double product_drift(const GateSet& gs, const GateWord& w) {
  return op_norm(detail::word_product_raw(gs, w.symbols()) - w.product().matrix());
}

inline std::string word_to_string(const GateSet& gs, const GateWord& w) {
  std::string out;
  for (auto it = w.symbols().rbegin(); it != w.symbols().rend(); ++it) {
    if (!out.empty()) out += ' ';
    out += gs.symbol_name(*it);
  }
  return out.empty() ? "I" : out;
}

inline Json word_to_json(const GateSet& gs, const GateWord& w) {
  Json j;
  j["length"] = w.length();
  j["inverse_symbols"] = w.inverse_count();
  j["symbols"] = w.symbols();
  j["text"] = word_to_string(gs, w);
  j["product"] = matrix_to_json(w.product());
  return j;
}

}  // namespace refocus
