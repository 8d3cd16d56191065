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

// ε-nets over a gate set: breadth-first word enumeration with rounding-based
// deduplication, a sampled covering-radius curve v(L), exact nearest lookup,
// and a versioned cache file.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "refocus/errors.hpp"
#include "refocus/gateset.hpp"
#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"
#include "refocus/parallel.hpp"

namespace refocus {

inline constexpr int kNetFormatVersion = 1;

struct NetBuildParams {
  double target_radius = 0.25;  // operator norm
  int max_len = 24;
  double dedup_cell = 1e-7;
  int samples = 10000;          // Haar samples behind each v(L) estimate
  std::uint64_t seed = 0;       // seeds the sample set
  double stop_fraction = 0.9;   // stop once v(L) ≤ stop_fraction · target
  double safety = 1.1;          // declared radius = safety · v(L)

  Json to_json() const {
    Json j;
    j["target_radius"] = target_radius;
    j["max_len"] = max_len;
    j["dedup_cell"] = dedup_cell;
    j["samples"] = samples;
    j["seed"] = seed;
    j["stop_fraction"] = stop_fraction;
    j["safety"] = safety;
    return j;
  }

  static NetBuildParams from_json(const Json& j) {
    NetBuildParams p;
    try {
      p.target_radius = j.at("target_radius").get<double>();
      p.max_len = j.at("max_len").get<int>();
      p.dedup_cell = j.at("dedup_cell").get<double>();
      p.samples = j.at("samples").get<int>();
      p.seed = j.at("seed").get<std::uint64_t>();
      p.stop_fraction = j.at("stop_fraction").get<double>();
      p.safety = j.at("safety").get<double>();
    } catch (const Json::exception& e) {
      throw ParseError(std::string("bad build_params: ") + e.what(), 0);
    }
    return p;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : dump_json(to_json())) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return h;
  }
};

class NetBuildError : public Error {
 public:
  NetBuildError(const std::string& what, std::vector<double> curve)
      : Error(what), curve_(std::move(curve)) {}
  const std::vector<double>& curve() const { return curve_; }

 private:
  std::vector<double> curve_;
};

namespace detail {

using Quat = std::array<double, 4>;

/// SU(2) element [[p, q], [−q̄, p̄]] as (Re p, Im p, Re q, Im q).
inline Quat to_quat(const Matrix& m) {
  return {m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag()};
}

inline double quat_dot(const Quat& a, const Quat& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// ‖A − B‖ for A, B ∈ SU(2): the difference is a scaled unitary.
inline double quat_distance(double dot) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * dot)); }

inline bool is_special(const Matrix& m) {
  return std::abs(m.determinant() - Complex(1.0, 0.0)) <= kTolerances.determinant;
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto v : k) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<std::int64_t> cell_key(const Matrix& m, double cell) {
  std::vector<std::int64_t> k(static_cast<std::size_t>(2 * m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    k[static_cast<std::size_t>(2 * i)] = std::llround(m.data()[i].real() / cell);
    k[static_cast<std::size_t>(2 * i + 1)] = std::llround(m.data()[i].imag() / cell);
  }
  return k;
}

/// Shorter first, then lexicographic on symbols.
inline bool word_precedes(const GateWord& a, const GateWord& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.symbols() < b.symbols();
}

}  // namespace detail

struct NearestResult {
  std::size_t index = 0;
  double distance = 0.0;
};

class EpsilonNet {
 public:
  EpsilonNet() = default;

  int dim() const { return dim_; }
  std::uint64_t gateset_hash() const { return gateset_hash_; }
  const NetBuildParams& params() const { return params_; }
  double declared_radius() const { return declared_radius_; }
  double radius_estimate() const { return estimate_; }
  int achieved_len() const { return achieved_len_; }
  /// v(L) for L = 0 … achieved_len.
  const std::vector<double>& v_curve() const { return curve_; }
  const std::vector<GateWord>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const GateWord& entry(std::size_t i) const { return entries_.at(i); }

  /// Entry minimizing ‖P − U‖ (operator norm), exact argmin with ties broken
  /// by shortest word, then lexicographic symbols.
  NearestResult nearest(const Unitary& u) const {
    if (entries_.empty()) throw DomainError("nearest: the net is empty");
    if (u.dim() != dim_) throw DimensionMismatch(dim_, u.dim());
    NearestResult best;
    if (quat_ready_ && detail::is_special(u.matrix())) {
      const auto q = detail::to_quat(u.matrix());
      double best_dot = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < quats_.size(); ++i) {
        const double dot = detail::quat_dot(quats_[i], q);
        if (dot > best_dot + 1e-15 ||
            (dot >= best_dot - 1e-15 && detail::word_precedes(entries_[i], entries_[best.index]))) {
          best_dot = std::max(best_dot, dot);
          best.index = i;
        }
      }
      best.distance = op_norm_dist(entries_[best.index].product(), u);
      return best;
    }
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const double dist = op_norm_dist(entries_[i].product(), u);
      if (dist < best.distance - 1e-15 ||
          (dist <= best.distance + 1e-15 && detail::word_precedes(entries_[i], entries_[best.index]))) {
        best.distance = std::min(best.distance, dist);
        best.index = i;
      }
    }
    best.distance = op_norm_dist(entries_[best.index].product(), u);
    return best;
  }

  Json to_json() const {
    Json j;
    j["format_version"] = kNetFormatVersion;
    j["gateset_hash"] = hex(gateset_hash_);
    j["build_params"] = params_.to_json();
    j["declared_radius"] = declared_radius_;
    j["radius_estimate"] = estimate_;
    j["achieved_len"] = achieved_len_;
    j["v_curve"] = curve_;
    Json entries = Json::array();
    for (const auto& w : entries_) {
      Json e;
      e["word"] = w.symbols();
      e["matrix"] = matrix_to_json(w.product());
      entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
  }

  /// Summary without the entries.
  Json summary_json() const {
    Json j = to_json();
    j.erase("entries");
    j["entries"] = entries_.size();
    return j;
  }

  static EpsilonNet from_json(const Json& j, const GateSet& gs) {
    EpsilonNet net;
    try {
      if (j.at("format_version").get<int>() != kNetFormatVersion)
        throw ParseError("unsupported net format_version", 0);
      if (j.at("gateset_hash").get<std::string>() != hex(gs.hash()))
        throw ParseError("net was built for a different gate set", 0);
      net.dim_ = gs.dim();
      net.gateset_hash_ = gs.hash();
      net.params_ = NetBuildParams::from_json(j.at("build_params"));
      net.declared_radius_ = j.at("declared_radius").get<double>();
      net.estimate_ = j.at("radius_estimate").get<double>();
      net.achieved_len_ = j.at("achieved_len").get<int>();
      net.curve_ = j.at("v_curve").get<std::vector<double>>();
      for (const auto& e : j.at("entries")) {
        const GateWord w(gs, e.at("word").get<std::vector<Symbol>>());
        Matrix stored = matrix_from_json(e.at("matrix"));
        if (op_norm(stored - w.product().matrix()) >
            kTolerances.reconstruction * static_cast<double>(std::max<std::size_t>(1, w.length())))
          throw ParseError("net entry matrix does not match its word", 0);
        // Keep the stored product: %.17g round-trips, so a loaded net answers
        // queries bit for bit like the one that was saved.
        net.entries_.push_back(
            GateWord::with_product(std::vector<Symbol>(w.symbols()), Unitary::trusted(std::move(stored))));
      }
    } catch (const Json::exception& e) {
      throw ParseError(std::string("malformed net file: ") + e.what(), 0);
    } catch (const DomainError& e) {
      throw ParseError(std::string("malformed net file: ") + e.what(), 0);
    }
    net.index();
    return net;
  }

 private:
  friend EpsilonNet build_net(const GateSet& gs, const NetBuildParams& params);

  static std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  void index() {
    quat_ready_ = dim_ == 2;
    quats_.clear();
    for (const auto& w : entries_) {
      if (!quat_ready_) break;
      if (!detail::is_special(w.product().matrix())) {
        quat_ready_ = false;
        break;
      }
      quats_.push_back(detail::to_quat(w.product().matrix()));
    }
    if (!quat_ready_) quats_.clear();
  }

  int dim_ = 0;
  std::uint64_t gateset_hash_ = 0;
  NetBuildParams params_;
  double declared_radius_ = 0.0;
  double estimate_ = 0.0;
  int achieved_len_ = 0;
  std::vector<double> curve_;
  std::vector<GateWord> entries_;
  std::vector<detail::Quat> quats_;
  bool quat_ready_ = false;
};

/// Enumerates words by length, keeping the first (shortest) word per dedup
/// cell. After each length, v(L) is the largest nearest-entry distance over a
/// fixed Haar sample set; enumeration stops once v(L) ≤ 0.9·target.
inline EpsilonNet build_net(const GateSet& gs, const NetBuildParams& params) {
  if (!(params.target_radius > 0.0)) throw DomainError("net target radius must be positive");
  if (params.max_len < 0) throw DomainError("max_len must be non-negative");
  if (params.samples < 1) throw DomainError("net audit needs at least one sample");
  if (!(params.dedup_cell > 0.0)) throw DomainError("dedup_cell must be positive");
  const int d = gs.dim();

  EpsilonNet net;
  net.dim_ = d;
  net.gateset_hash_ = gs.hash();
  net.params_ = params;

  RngStream rng(params.seed, 0x6e6574);
  std::vector<Unitary> samples;
  samples.reserve(static_cast<std::size_t>(params.samples));
  for (int i = 0; i < params.samples; ++i) samples.push_back(haar_unitary(d, rng));
  std::vector<double> best(samples.size(), std::numeric_limits<double>::infinity());

  const bool quat = d == 2 && [&] {
    for (const auto& g : gs.matrices())
      if (!detail::is_special(g.matrix())) return false;
    return true;
  }();
  std::vector<detail::Quat> sample_quats;
  std::vector<double> best_dot(samples.size(), -std::numeric_limits<double>::infinity());
  if (quat)
    for (const auto& s : samples) sample_quats.push_back(detail::to_quat(s.matrix()));

  std::unordered_map<std::vector<std::int64_t>, std::size_t, detail::KeyHash> seen;
  const auto audit = [&](std::size_t first) {
    const std::size_t last = net.entries_.size();
    if (quat) {
      std::vector<detail::Quat> fresh;
      for (std::size_t i = first; i < last; ++i)
        fresh.push_back(detail::to_quat(net.entries_[i].product().matrix()));
      parallel_for(samples.size(), [&](std::size_t s) {
        double b = best_dot[s];
        for (const auto& q : fresh) b = std::max(b, detail::quat_dot(q, sample_quats[s]));
        best_dot[s] = b;
        best[s] = detail::quat_distance(b);
      });
    } else {
      parallel_for(samples.size(), [&](std::size_t s) {
        for (std::size_t i = first; i < last; ++i)
          best[s] = std::min(best[s], op_norm_dist(net.entries_[i].product(), samples[s]));
      });
    }
    double v = 0.0;
    for (const double b : best) v = std::max(v, b);
    return v;
  };

  net.entries_.push_back(GateWord::identity(d));
  seen.emplace(detail::cell_key(net.entries_.back().product().matrix(), params.dedup_cell), 0);
  std::vector<std::size_t> frontier{0};
  net.curve_.push_back(audit(0));
  int len = 0;
  const double stop = params.stop_fraction * params.target_radius;
  std::vector<Eigen::Matrix2cd> gates2;
  if (d == 2)
    for (const auto& g : gs.matrices()) gates2.push_back(g.matrix());

  while (net.curve_.back() > stop && len < params.max_len && !frontier.empty()) {
    ++len;
    const std::size_t first = net.entries_.size();
    std::vector<std::size_t> next;
    for (const std::size_t idx : frontier) {
      for (std::size_t g = 0; g < gs.size(); ++g) {
        Matrix p = d == 2 ? Matrix(gates2[g] * Eigen::Matrix2cd(net.entries_[idx].product().matrix()))
                          : Matrix(gs.matrices()[g].matrix() * net.entries_[idx].product().matrix());
        if (quat) p = reproject_unitary(p).matrix();
        auto key = detail::cell_key(p, params.dedup_cell);
        if (seen.count(key)) continue;
        std::vector<Symbol> symbols = net.entries_[idx].symbols();
        symbols.push_back(static_cast<Symbol>(g));
        seen.emplace(std::move(key), net.entries_.size());
        next.push_back(net.entries_.size());
        net.entries_.push_back(GateWord::with_product(std::move(symbols), Unitary::trusted(std::move(p))));
      }
    }
    frontier = std::move(next);
    net.curve_.push_back(audit(first));
  }

  net.achieved_len_ = len;
  net.estimate_ = net.curve_.back();
  net.declared_radius_ = params.safety * net.estimate_;
  if (net.estimate_ > stop) {
    std::string msg = "net target radius " + std::to_string(params.target_radius) +
                      " unreachable within max_len " + std::to_string(params.max_len) +
                      "; v(L) =";
    for (const double v : net.curve_) msg += " " + std::to_string(v);
    throw NetBuildError(msg, net.curve_);
  }
  net.index();
  return net;
}

/// <dir>/net-<gate set hash>-<params hash>.json
inline std::filesystem::path net_cache_path(const std::filesystem::path& dir, const GateSet& gs,
                                            const NetBuildParams& params) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "net-%016llx-%016llx.json",
                static_cast<unsigned long long>(gs.hash()),
                static_cast<unsigned long long>(params.hash()));
  return dir / buf;
}

inline void save_net(const EpsilonNet& net, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  write_file(tmp, dump_json(net.to_json()));
  std::filesystem::rename(tmp, path);
}

inline EpsilonNet load_net(const std::filesystem::path& path, const GateSet& gs) {
  return EpsilonNet::from_json(parse_json(read_file(path.string())), gs);
}

/// Loads the cached net for (gs, params) from `dir`, building and storing it
/// on a miss. An empty `dir` disables caching.
inline EpsilonNet load_or_build_net(const GateSet& gs, const NetBuildParams& params,
                                    const std::filesystem::path& dir = {}) {
  if (dir.empty()) return build_net(gs, params);
  const auto path = net_cache_path(dir, gs, params);
  if (std::filesystem::exists(path)) {
    try {
      return load_net(path, gs);
    } catch (const ParseError&) {
      // stale or corrupt: rebuild below
    }
  }
  EpsilonNet net = build_net(gs, params);
  save_net(net, path);
  return net;
}

}  // namespace refocus
