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

// Matrix exchange format and a JSON writer that prints every double with 17
// significant digits, so files round-trip bit-exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "refocus/errors.hpp"
#include "refocus/matcore.hpp"

namespace refocus {

using Json = nlohmann::ordered_json;

namespace detail {

inline void write_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw DomainError("cannot serialize non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void write_json(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      write_double(out, j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        if (!flat) newline(depth + 1);
        write_json(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Serializes `j`; `indent < 0` gives the compact form.
inline std::string dump_json(const Json& j, int indent = -1) {
  std::string out;
  detail::write_json(out, j, indent, 0);
  return out;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

/// {"dim": d, "re": [[...]], "im": [[...]]}, row-major.
inline Json matrix_to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // + 0.0 turns -0 into 0; the reader would drop the sign anyway.
      rr.push_back(m(i, j).real() + 0.0);
      ri.push_back(m(i, j).imag() + 0.0);
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  Json out;
  out["dim"] = m.rows();
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

inline Json matrix_to_json(const Unitary& u) { return matrix_to_json(u.matrix()); }

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im"))
    throw ParseError("matrix object needs dim, re and im", 0);
  if (!j["dim"].is_number_integer())
    throw ParseError("matrix dim must be an integer", 0);
  const int d = j["dim"].get<int>();
  if (d < 1 || d > kMaxDim) throw ParseError("matrix dim out of range", 0);
  const Json& re = j["re"];
  const Json& im = j["im"];
  const auto d_size = static_cast<std::size_t>(d);
  if (!re.is_array() || !im.is_array() || re.size() != d_size || im.size() != d_size)
    throw ParseError("matrix re/im must have dim rows", 0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    if (!re[i].is_array() || !im[i].is_array() || re[i].size() != d_size ||
        im[i].size() != d_size)
      throw ParseError("matrix row " + std::to_string(i) + " has wrong length", 0);
    for (int k = 0; k < d; ++k) {
      if (!re[i][k].is_number() || !im[i][k].is_number())
        throw ParseError("matrix entries must be numbers", 0);
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
    }
  }
  return m;
}

inline Unitary unitary_from_json(const Json& j) {
  try {
    return Unitary::checked(matrix_from_json(j));
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace refocus
