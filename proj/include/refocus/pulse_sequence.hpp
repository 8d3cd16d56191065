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

// Pulse sequences R₁ U R₂ U ⋯ Rₙ U, stored flat so that sequences with
// millions of pulses stay compact.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refocus/errors.hpp"
#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"

namespace refocus {

enum class NormKind { hs, op };

inline std::string_view to_string(NormKind n) { return n == NormKind::hs ? "hs" : "operator"; }

inline NormKind norm_kind_from_string(std::string_view s) {
  if (s == "hs") return NormKind::hs;
  if (s == "operator") return NormKind::op;
  throw ParseError("unknown norm \"" + std::string(s) + "\"", 0);
}

inline double distance_to_identity(const Unitary& u, NormKind norm) {
  return norm == NormKind::hs ? hs_norm_dist_to_identity(u) : op_norm_dist_to_identity(u);
}

inline constexpr int kSequenceFormatVersion = 1;

class PulseSequence {
 public:
  using ConstMap = Eigen::Map<const Matrix>;

  PulseSequence(int dim, NormKind norm) : dim_(dim), norm_(norm) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("sequence dimension out of range");
    if (norm == NormKind::hs && dim != 2)
      throw DomainError("hs norm is defined for dim 2 only");
  }

  int dim() const { return dim_; }
  NormKind norm() const { return norm_; }
  std::size_t uses_of_U() const { return data_.size() / block(); }
  bool empty() const { return data_.empty(); }

  ConstMap pulse_view(std::size_t i) const {
    return ConstMap(data_.data() + i * block(), dim_, dim_);
  }
  Unitary pulse(std::size_t i) const { return Unitary::trusted(Matrix(pulse_view(i))); }

  void push_back(const Matrix& m) {
    if (m.rows() != dim_ || m.cols() != dim_) throw DimensionMismatch(static_cast<int>(m.rows()), dim_);
    data_.insert(data_.end(), m.data(), m.data() + block());
  }
  void push_back(const Unitary& u) { push_back(u.matrix()); }

  /// A trailing R_{n+1} after the last U; present only before normalize().
  bool has_trailing() const { return trailing_.has_value(); }
  const Matrix& trailing() const { return *trailing_; }
  void set_trailing(Matrix m) { trailing_ = std::move(m); }
  void clear_trailing() { trailing_.reset(); }

  /// Raw column-major storage, one d×d block per pulse.
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  friend bool operator==(const PulseSequence& a, const PulseSequence& b) {
    return a.dim_ == b.dim_ && a.norm_ == b.norm_ && a.data_ == b.data_ &&
           a.trailing_.has_value() == b.trailing_.has_value() &&
           (!a.trailing_ || *a.trailing_ == *b.trailing_);
  }

 private:
  std::size_t block() const { return static_cast<std::size_t>(dim_ * dim_); }

  int dim_;
  NormKind norm_;
  std::vector<Complex> data_;
  std::optional<Matrix> trailing_;
};

/// Absorbs the trailing pulse into R₁ by conjugating the whole product with
/// it: T R₁ U ⋯ Rₙ U T† T = (T R₁) U ⋯ Rₙ U.
inline PulseSequence normalize(PulseSequence seq) {
  if (!seq.has_trailing()) return seq;
  const Matrix t = seq.trailing();
  seq.clear_trailing();
  if (seq.empty()) return seq;
  Eigen::Map<Matrix> first(seq.data().data(), seq.dim(), seq.dim());
  const Matrix merged = t * first;
  first = merged;
  return seq;
}

namespace detail {

/// Ordered product of n factors, factor(i) for i = 0 … n−1, left to right.
/// Runs of 64 are multiplied sequentially and the runs are merged pairwise,
/// so rounding error grows with log n rather than n.
template <class M, class Factor>
M pairwise_product(std::size_t n, const M& identity, Factor&& factor) {
  constexpr std::size_t kRun = 64;
  std::vector<std::pair<std::size_t, M>> stack;  // (level, product)
  for (std::size_t start = 0; start < n; start += kRun) {
    M run = identity;
    const std::size_t stop = std::min(n, start + kRun);
    for (std::size_t i = start; i < stop; ++i) run = (run * factor(i)).eval();
    std::size_t level = 0;
    while (!stack.empty() && stack.back().first == level) {
      run = (stack.back().second * run).eval();
      stack.pop_back();
      ++level;
    }
    stack.emplace_back(level, std::move(run));
  }
  M acc = identity;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) acc = (it->second * acc).eval();
  return acc;
}

template <int D>
Matrix interleaved_product_fixed(const PulseSequence& seq, const Matrix& u_dyn) {
  using M = Eigen::Matrix<Complex, D, D>;
  const M u = u_dyn;
  const Complex* p = seq.data().data();
  M acc = pairwise_product<M>(seq.uses_of_U(), M::Identity(), [&](std::size_t i) -> M {
    return Eigen::Map<const M>(p + i * D * D) * u;
  });
  if (seq.has_trailing()) acc = (acc * M(seq.trailing())).eval();
  return acc;
}

}  // namespace detail

/// The product R₁ U R₂ U ⋯ Rₙ U (times the trailing pulse, if any).
inline Matrix interleaved_product(const PulseSequence& seq, const Unitary& u) {
  if (seq.dim() != u.dim()) throw DimensionMismatch(seq.dim(), u.dim());
  switch (seq.dim()) {
    case 2:
      return detail::interleaved_product_fixed<2>(seq, u.matrix());
    case 3:
      return detail::interleaved_product_fixed<3>(seq, u.matrix());
    case 4:
      return detail::interleaved_product_fixed<4>(seq, u.matrix());
    default:
      break;
  }
  const int d = seq.dim();
  Matrix acc = detail::pairwise_product<Matrix>(seq.uses_of_U(), Matrix::Identity(d, d),
                                                [&](std::size_t i) -> Matrix {
                                                  return seq.pulse_view(i) * u.matrix();
                                                });
  if (seq.has_trailing()) acc = (acc * seq.trailing()).eval();
  return acc;
}

/// ‖R₁ U R₂ U ⋯ Rₙ U − 𝟙‖ in the sequence's norm.
inline double verify(const PulseSequence& seq, const Unitary& u) {
  return distance_to_identity(Unitary::trusted(interleaved_product(seq, u)), seq.norm());
}

// ---------------------------------------------------------------------------
// Serialization

inline Json sequence_to_json(const PulseSequence& seq) {
  if (seq.has_trailing())
    throw DomainError("normalize the sequence before serializing it");
  Json j;
  j["format_version"] = kSequenceFormatVersion;
  j["dim"] = seq.dim();
  j["norm"] = std::string(to_string(seq.norm()));
  j["uses_of_U"] = seq.uses_of_U();
  Json pulses = Json::array();
  for (std::size_t i = 0; i < seq.uses_of_U(); ++i)
    pulses.push_back(matrix_to_json(Matrix(seq.pulse_view(i))));
  j["pulses"] = std::move(pulses);
  return j;
}

inline std::string serialize(const PulseSequence& seq) {
  return dump_json(sequence_to_json(seq));
}

inline PulseSequence sequence_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("sequence must be a JSON object", 0);
  for (const char* key : {"format_version", "dim", "norm", "uses_of_U", "pulses"})
    if (!j.contains(key)) throw ParseError(std::string("sequence is missing \"") + key + "\"", 0);
  if (!j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != kSequenceFormatVersion)
    throw ParseError("unsupported sequence format_version " + j["format_version"].dump() +
                         " (expected " + std::to_string(kSequenceFormatVersion) + ")",
                     0);
  if (!j["dim"].is_number_integer() || !j["norm"].is_string() ||
      !j["uses_of_U"].is_number_integer() || !j["pulses"].is_array())
    throw ParseError("sequence fields have wrong types", 0);
  const int dim = j["dim"].get<int>();
  if (dim < 1 || dim > kMaxDim) throw ParseError("sequence dim out of range", 0);
  PulseSequence seq(dim, norm_kind_from_string(j["norm"].get<std::string>()));
  const auto& pulses = j["pulses"];
  if (j["uses_of_U"].get<std::size_t>() != pulses.size())
    throw ParseError("uses_of_U does not match the number of pulses", 0);
  for (const auto& p : pulses) {
    const Unitary u = unitary_from_json(p);
    if (u.dim() != dim) throw ParseError("pulse dimension differs from sequence dim", 0);
    seq.push_back(u);
  }
  return seq;
}

inline PulseSequence deserialize(const std::string& text) {
  return sequence_from_json(parse_json(text));
}

}  // namespace refocus
