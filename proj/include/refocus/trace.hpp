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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refocus/json_io.hpp"
#include "refocus/matcore.hpp"
#include "refocus/pulse_sequence.hpp"
#include "refocus/refocus_map.hpp"

namespace refocus {

enum class ProtocolMode { oblivious, monitored };

inline std::string_view to_string(ProtocolMode m) {
  return m == ProtocolMode::oblivious ? "oblivious" : "monitored";
}

inline ProtocolMode protocol_mode_from_string(std::string_view s) {
  if (s == "oblivious") return ProtocolMode::oblivious;
  if (s == "monitored") return ProtocolMode::monitored;
  throw DomainError("unknown mode \"" + std::string(s) + "\"");
}

/// One application of f, optionally preceded by a random conjugation.
struct RoundRecord {
  double eps_before = 0.0;  // distance entering the round
  double eps_after = 0.0;   // distance after f
  std::optional<Unitary> pulse;  // conjugating unitary drawn for g, if any
  bool jumped = false;      // the input to f lay in the jumping region
};

struct ProtocolTrace {
  int dim = 2;
  RefocusMap map = RefocusMap::qubit;
  NormKind norm = NormKind::hs;
  ProtocolMode mode = ProtocolMode::monitored;
  std::vector<RoundRecord> rounds;
  double initial_eps = 0.0;
  double final_eps = 0.0;
  Unitary final_operator;
  bool success = false;
  // converged | not_converged | round_cap | refused
  std::string status = "converged";
  std::optional<PulseSequence> sequence;
  // Why no sequence was attached, when one was requested but is too long.
  std::string sequence_note;

  std::size_t random_rounds() const {
    std::size_t n = 0;
    for (const auto& r : rounds) n += r.pulse.has_value();
    return n;
  }

  /// (number of conjugators)^rounds, as a double so huge counts stay finite.
  double uses_of_U() const {
    return std::pow(static_cast<double>(conjugators(map, dim).size()),
                    static_cast<double>(rounds.size()));
  }
};

inline Json trace_to_json(const ProtocolTrace& t, bool include_sequence = true,
                          bool include_pulses = true) {
  Json j;
  j["dim"] = t.dim;
  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json jr;
    jr["eps_before"] = r.eps_before;
    jr["eps_after"] = r.eps_after;
    if (r.pulse && include_pulses)
      jr["pulse"] = matrix_to_json(*r.pulse);
    else
      jr["pulse"] = nullptr;
    jr["jumped"] = r.jumped;
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  j["final_eps"] = t.final_eps;
  if (include_sequence && t.sequence)
    j["sequence"] = sequence_to_json(*t.sequence);
  else
    j["sequence"] = nullptr;
  j["map"] = std::string(to_string(t.map));
  j["norm"] = std::string(to_string(t.norm));
  j["mode"] = std::string(to_string(t.mode));
  j["initial_eps"] = t.initial_eps;
  j["success"] = t.success;
  j["status"] = t.status;
  j["uses_of_U"] = t.uses_of_U();
  if (!t.sequence_note.empty()) j["sequence_note"] = t.sequence_note;
  return j;
}

}  // namespace refocus
