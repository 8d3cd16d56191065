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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is a named constant below.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "refocus/refocus.hpp"

#ifndef REFOCUS_CLI_PATH
#error "REFOCUS_CLI_PATH must point at the refocus binary"
#endif

using namespace refocus;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr double kFloatFloor = 1e-14;
constexpr double kFixedPointTol = 1e-10;
constexpr double kJumpReference = 0.271;
constexpr double kJumpTol = 0.005;
constexpr double kWeylTol = 1e-12;
constexpr double kDiagonalTol = 1e-10;
constexpr double kRoundoff = 1e-12;  // slack on inequalities between computed norms
constexpr double kContractionTime = 5.0;
constexpr double kJumpTime = 10.0;
constexpr double kWeylTime = 5.0;
constexpr double kSuccessFloor = 0.75;
constexpr double kJumpRateFloor = 0.25;
constexpr double kLengthGrowthCap = 3.0;
constexpr double kCompileEps = 1e-3;
constexpr double kNetRadius = 0.1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const GateSet& std_gates() {
  static const GateSet gs = standard_gate_set();
  return gs;
}

const EpsilonNet& std_net() {
  static const EpsilonNet net = [] {
    NetBuildParams p;
    p.target_radius = kNetRadius;
    p.max_len = 40;
    return build_net(std_gates(), p);
  }();
  return net;
}

// Haar SU(2) conditioned on HS distance ≤ r: a = Re tr/2 has density
// ∝ √(1 − a²) on [√(1 − r²), 1] and the axis is uniform.
Unitary conditioned_haar_su2(double r, RngStream& rng) {
  const double lo = std::sqrt(1.0 - r * r);
  const double cap = std::sqrt(1.0 - lo * lo);
  double a;
  do {
    a = lo + (1.0 - lo) * rng.uniform();
  } while (cap * rng.uniform() > std::sqrt(1.0 - a * a));
  const Vector3 n = random_unit_vector3(rng) * std::sqrt(1.0 - a * a);
  return su2_compose({a, n.x(), n.y(), n.z()});
}

Unitary near_identity(int d, double radius, RngStream& rng) {
  Matrix h = random_traceless_hermitian(d, rng);
  h *= 2.0 * std::asin(radius / 2.0) / op_norm(h);
  return exp_i_hermitian(h);
}

Matrix clock_matrix(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < d; ++x) m(x, x) = std::polar(1.0, 2.0 * std::numbers::pi * x / d);
  return m;
}

Matrix shift_matrix(int d) {
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < d; ++x) m((x + 1) % d, x) = 1.0;
  return m;
}

// --- criteria ---------------------------------------------------------------

Outcome qubit_contraction() {
  Stopwatch clock;
  RngStream rng(101);
  int held = 0;
  double worst = 0.0;
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Unitary u = conditioned_haar_su2(kQubitShrinkRadius, rng);
    const double e0 = hs_norm_dist_to_identity(u);
    const double e1 = hs_norm_dist_to_identity(f_qubit(u));
    const double bound = std::sqrt(8.0) * e0 * e0;
    held += e1 <= bound + kRoundoff;
    worst = std::max(worst, e1 / bound);
  }
  const double t = clock.seconds();
  return {held == n && t < kContractionTime,
          fmt("%d/%d within sqrt8*eps0^2, worst ratio %.6f, %.2f s", held, n, worst, t)};
}

Outcome doubly_exponential() {
  RngStream rng(102);
  bool ok = true;
  double at5 = 0.0, at6 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector3 n = random_unit_vector3(rng) * std::sqrt(1.0 - 15.0 / 16.0 * 15.0 / 16.0);
    Unitary u = su2_compose({15.0 / 16.0, n.x(), n.y(), n.z()});
    const double e0 = hs_norm_dist_to_identity(u);
    for (int m = 1; m <= 6; ++m) {
      u = f_qubit(u);
      const double e = hs_norm_dist_to_identity(u);
      ok = ok && e <= std::max(qubit_contraction_bound(e0, m), kFloatFloor);
      if (m == 5) at5 = std::max(at5, e);
      if (m == 6) at6 = std::max(at6, e);
    }
  }
  const double b5 = std::ldexp(1.0, -16) / std::sqrt(8.0);
  const double b6 = std::max(std::ldexp(1.0, -32) / std::sqrt(8.0), kFloatFloor);
  return {ok && at5 <= b5 && at6 <= b6,
          fmt("100 starts at eps0 = 1/4: worst after 5 rounds %.3e (bound %.3e), after 6 %.3e (bound %.3e)",
              at5, b5, at6, b6)};
}

Outcome fixed_point_and_cycle() {
  using namespace std::complex_literals;
  const Complex c = 0.5 - 0.5i;
  Matrix star(2, 2), p(2, 2), q(2, 2);
  star << 1.0, 1i, -1.0, 1i;
  p << 1i, 1i, -1.0, 1.0;
  q << 1.0, -1.0, 1i, 1i;
  const Unitary us = Unitary::checked(c * star);
  const Unitary up = Unitary::checked(c * p);
  const Unitary uq = Unitary::checked(c * q);
  const double fixed = op_norm_dist(f_qubit(us), us);
  const double pq = op_norm_dist(f_qubit(up), uq);
  const double qp = op_norm_dist(f_qubit(uq), up);
  return {fixed <= kFixedPointTol && pq <= kFixedPointTol && qp <= kFixedPointTol,
          fmt("|f(U*)-U*| = %.1e, |f(P)-Q| = %.1e, |f(Q)-P| = %.1e", fixed, pq, qp)};
}

Outcome jump_probability() {
  Stopwatch clock;
  RngStream rng(104);
  const auto e = jump_probability_mc(1000000, rng);
  const double t = clock.seconds();
  return {std::abs(e.estimate - kJumpReference) <= kJumpTol && t < kJumpTime,
          fmt("estimate %.5f +/- %.5f (99%%) from 1e6 samples, %.2f s", e.estimate, e.ci_halfwidth, t)};
}

Outcome qubit_end_to_end() {
  Stopwatch clock;
  constexpr int n = 1000;
  const double eps = 1e-4;
  const int k = qubit_k(eps, 0.25);
  const std::size_t uses = std::size_t{1} << (2 * k);
  RngStream targets(105);
  int successes = 0, verified = 0, counted = 0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Unitary u = to_special(haar_unitary(2, targets));
    QubitProtocolConfig cfg;
    cfg.epsilon = eps;
    cfg.eta = 0.25;
    cfg.mode = ProtocolMode::oblivious;
    cfg.rng = RngStream(105).substream(static_cast<std::uint64_t>(i));
    const auto t = refocus_qubit(u, cfg);
    if (!t.success) continue;
    ++successes;
    if (!t.sequence) continue;
    const double v = verify(*t.sequence, u);
    worst = std::max(worst, v);
    verified += v <= eps;
    counted += t.sequence->uses_of_U() == uses;
  }
  const double rate = static_cast<double>(successes) / n;
  return {rate >= kSuccessFloor && verified == successes && counted == successes,
          fmt("k = %d, success %.3f, %d/%d verify <= 1e-4 (worst %.3e), %d/%d use 4^k = %zu, %.1f s",
              k, rate, verified, successes, worst, counted, successes, uses, clock.seconds())};
}

Outcome pulse_count() {
  const int k = qubit_k(1e-6, 0.1);
  const double n = std::ldexp(1.0, 2 * k);
  const double l = std::log2(1.0 / (std::sqrt(8.0) * 1e-6));
  const double bound = 16.0 / std::pow(0.1, 5) * l * l;
  return {k == 14 && n <= bound, fmt("k = %d, n = %.6g <= %.6g", k, n, bound)};
}

Outcome weyl_algebra() {
  Stopwatch clock;
  double worst = 0.0;
  for (int d = 2; d <= 5; ++d) {
    std::vector<Matrix> s;
    std::vector<WeylIndex> idx;
    Matrix zp = Matrix::Identity(d, d);
    for (int a1 = 0; a1 < d; ++a1, zp = zp * clock_matrix(d)) {
      Matrix xp = Matrix::Identity(d, d);
      for (int a2 = 0; a2 < d; ++a2, xp = xp * shift_matrix(d)) {
        s.push_back(zp * xp);
        idx.push_back({a1, a2, d});
        worst = std::max(worst, (sigma(idx.back()).matrix() - s.back()).cwiseAbs().maxCoeff());
      }
    }
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const Complex tr = (s[i].adjoint() * s[j]).trace();
        worst = std::max(worst, std::abs(tr - Complex(i == j ? d : 0, 0)));
        const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * symplectic(idx[i], idx[j]) / d);
        worst = std::max(worst, (s[i] * s[j] - w * s[j] * s[i]).cwiseAbs().maxCoeff());
      }
    }
    for (std::size_t j = 1; j < m; ++j) {
      Complex chars = 0.0;
      Matrix twirl = Matrix::Zero(d, d);
      for (std::size_t i = 0; i < m; ++i) {
        chars += std::polar(1.0, 2.0 * std::numbers::pi * symplectic(idx[i], idx[j]) / d);
        twirl += s[i] * s[j] * s[i].adjoint();
      }
      worst = std::max(worst, std::abs(chars));
      worst = std::max(worst, twirl.cwiseAbs().maxCoeff());
    }
  }
  const double t = clock.seconds();
  return {worst <= kWeylTol && t < kWeylTime,
          fmt("properties 1-4 exhaustive for d = 2..5, worst residual %.2e, %.2f s", worst, t)};
}

Outcome diagonal_jumping() {
  RngStream rng(108);
  double worst = 0.0;
  for (int d = 2; d <= 5; ++d)
    for (int i = 0; i < 1000; ++i)
      worst = std::max(worst, op_norm_dist_to_identity(f_qudit(random_diagonal_special(d, rng))));
  return {worst <= kDiagonalTol, fmt("4000 SU(d) diagonals, worst |f(D)-1| = %.2e", worst)};
}

Outcome qudit_contraction() {
  RngStream rng(109);
  int fails = 0;
  double worst_ratio = 0.0, worst_hybrid = 0.0;
  for (int d = 2; d <= 3; ++d) {
    const double a = QuditConstants::for_dim(d).alpha_tight;
    for (int i = 0; i < 1000; ++i) {
      const Unitary u = near_identity(d, 0.5 * (1.0 - rng.uniform()), rng);
      const double e = op_norm_dist_to_identity(u);
      const double after = op_norm_dist_to_identity(f_qudit(u));
      fails += after > a * e * e + kRoundoff;
      worst_ratio = std::max(worst_ratio, after / (a * e * e));
    }
    for (int i = 0; i < 10000; ++i) {
      const Unitary u = haar_unitary(d, rng);
      const Unitary v = i % 2 ? haar_unitary(d, rng)
                              : multiply(u, near_identity(d, std::pow(10.0, -6.0 * rng.uniform()), rng));
      const auto [lhs, rhs] = hybrid_bound_check(u, v);
      fails += lhs > rhs + kRoundoff;
      worst_hybrid = std::max(worst_hybrid, lhs / rhs);
    }
  }
  return {fails == 0,
          fmt("%d violations; worst |f(U)-1|/(alpha eps^2) = %.4f, worst hybrid ratio %.4f", fails,
              worst_ratio, worst_hybrid)};
}

Outcome qudit_protocol() {
  // The oblivious cost at d = 2 is certified out of reach.
  const auto cost = qudit_k(2, 1e-6, 0.25);
  const double p = QuditConstants::for_dim(2).p_bound;
  bool ok = cost.unbounded && p < 1e-10;

  // d = 2 monitored runs: jump rate over random rounds.
  RngStream rng(110);
  std::size_t random_rounds = 0, jumps = 0;
  int successes = 0;
  constexpr int runs = 4000;
  for (int i = 0; i < runs; ++i) {
    QubitProtocolConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.mode = ProtocolMode::monitored;
    cfg.emit_sequence = false;
    cfg.rng = rng.substream(static_cast<std::uint64_t>(i));
    const auto t = refocus_qubit(to_special(haar_unitary(2, rng)), cfg);
    successes += t.success;
    for (const auto& r : t.rounds) {
      if (!r.pulse) continue;
      ++random_rounds;
      jumps += r.jumped;
    }
  }
  const double rate = static_cast<double>(jumps) / static_cast<double>(random_rounds);
  ok = ok && successes == runs && rate >= kJumpRateFloor;

  // d = 3 monitored runs with a conjugation within δ/2 of a diagonalizer.
  const auto c = QuditConstants::for_dim(3);
  int converged = 0, on_schedule = 0;
  constexpr int qudit_runs = 20;
  for (int i = 0; i < qudit_runs; ++i) {
    QuditProtocolConfig cfg;
    cfg.epsilon = 1e-12;
    cfg.emit_sequence = false;
    cfg.rng = rng.substream(1000 + static_cast<std::uint64_t>(i));
    cfg.conjugation = [&](const Unitary& cur, RngStream& r) {
      Eigen::ComplexSchur<Matrix> schur(cur.matrix());
      const Unitary v0 = reproject_unitary(schur.matrixU().adjoint());
      return multiply(near_identity(3, c.delta / 2.0, r), v0);
    };
    const auto t = refocus_qudit(haar_unitary(3, rng), cfg);
    converged += t.success;
    // Rounds after the jump obey ε_m < 2^{-2^m}/α, m counted from the landing.
    bool sched = !t.rounds.empty() && t.rounds[0].jumped;
    for (std::size_t m = 0; m < t.rounds.size(); ++m)
      sched = sched && t.rounds[m].eps_after <= std::max(std::ldexp(1.0, -(1 << m)) / c.alpha, kFloatFloor);
    on_schedule += sched;
  }
  ok = ok && converged == qudit_runs && on_schedule == qudit_runs;
  return {ok, fmt("d=2 oblivious k = %.3g (2^%.3g uses, p = %.2e) refused; d=2 monitored %d/%d, "
                  "jump rate %.4f over %zu random rounds; d=3 contrived %d/%d converged, %d/%d on schedule",
                  cost.k, cost.log2_uses, p, successes, runs, rate, random_rounds, converged,
                  qudit_runs, on_schedule, qudit_runs)};
}

Outcome inverse_approximation() {
  RngStream rng(111);
  const double epss[] = {1e-2, 1e-4, 1e-6};
  double mean_len[3] = {0, 0, 0};
  int fails = 0;
  constexpr int n = 100;
  for (int i = 0; i < n; ++i) {
    const Unitary u = to_special(haar_unitary(2, rng));
    for (int e = 0; e < 3; ++e) {
      const auto r = inverse_approx(u, epss[e], std_net(), std_gates());
      const double err = op_norm_dist(GateWord(r.gates, r.word.symbols()).product(), u.adjoint());
      fails += err > r.constant * epss[e] || r.constant != 1.0 || r.word.inverse_count() != 0;
      mean_len[e] += static_cast<double>(r.word.length()) / n;
    }
  }
  const double g1 = mean_len[1] / mean_len[0];
  const double g2 = mean_len[2] / mean_len[1];
  return {fails == 0 && g1 <= kLengthGrowthCap && g2 <= kLengthGrowthCap,
          fmt("%d accuracy failures; mean length %.1f, %.1f, %.1f; growth per 100x %.2f, %.2f (cap %.1f)",
              fails, mean_len[0], mean_len[1], mean_len[2], g1, g2, kLengthGrowthCap)};
}

Outcome inverse_free() {
  Stopwatch clock;
  RngStream rng(112);
  const double epss[] = {1e-1, 1e-2, 1e-3, 1e-4};
  constexpr int n = 50;
  int inverses = 0, inaccurate = 0;
  double c = 0.0;
  double mean_len[4] = {0, 0, 0, 0};
  std::vector<Unitary> targets;
  for (int i = 0; i < n; ++i) targets.push_back(to_special(haar_unitary(2, rng)));
  for (int e = 0; e < 4; ++e) {
    const double l4 = std::pow(std::log(1.0 / epss[e]), 4);
    for (const auto& u : targets) {
      const auto r = inverse_free_compile(u, epss[e], std_gates(), std_net());
      inverses += static_cast<int>(r.word.inverse_count());
      const double err = op_norm_dist(GateWord(std_gates(), r.word.symbols()).product(), u);
      inaccurate += err > epss[e];
      c = std::max(c, static_cast<double>(r.word.length()) / l4);
      mean_len[e] += static_cast<double>(r.word.length()) / n;
    }
  }
  // Least-squares exponent of mean length against ln(1/eps), reported only.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int e = 0; e < 4; ++e) {
    const double x = std::log(std::log(1.0 / epss[e]));
    const double y = std::log(mean_len[e]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  return {inverses == 0 && inaccurate == 0,
          fmt("%d inverse symbols, %d over eps; mean length %.0f, %.0f, %.0f, %.0f for eps 1e-1..1e-4; "
              "c = %.3g bounds every length by c ln^4(1/eps); fitted exponent %.2f; %.1f s",
              inverses, inaccurate, mean_len[0], mean_len[1], mean_len[2], mean_len[3], c, slope,
              clock.seconds())};
}

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + REFOCUS_CLI_PATH + "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "refocus_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RngStream rng(113);
  const std::string target = (dir / "u.json").string();
  write_file(target, dump_json(matrix_to_json(to_special(haar_unitary(2, rng)))));
  const std::string q = "'" + dir.string() + "/";
  const std::vector<std::string> commands = {
      "refocus --haar 20 --seed 7 --epsilon 1e-6",
      "refocus --haar 20 --seed 7 --mode oblivious --csv",
      "refocus --dim 3 --haar 2 --seed 7 --max-rounds 3",
      "refocus --input " + q + "u.json' --seed 7 --out " + q + "seqs'",
      "verify --sequence " + q + "seqs/sequence-0.json' --input " + q + "u.json'",
      "jumpprob --samples 100000 --seed 7",
      "constants --dim 3 --epsilon 1e-6",
      "sk net build --radius 0.2 --no-cache",
      "sk compile --target " + q + "u.json' --eps 1e-3 --no-inverses --cache-dir " + q + "cache'",
      "sk invert --target " + q + "u.json' --eps 1e-6 --cache-dir " + q + "cache'",
  };
  int same = 0;
  std::string diverged;
  for (const auto& c : commands) {
    const CliRun a = run_cli(c);
    const CliRun b = run_cli(c);
    if (a.status == b.status && a.out == b.out && !a.out.empty()) ++same;
    else diverged += " [" + c + "]";
  }
  fs::remove_all(dir);
  return {same == static_cast<int>(commands.size()),
          fmt("%d/%zu commands byte-identical across two runs%s", same, commands.size(), diverged.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"qubit contraction", qubit_contraction},
      {"doubly exponential convergence", doubly_exponential},
      {"fixed point and two-cycle", fixed_point_and_cycle},
      {"jump probability", jump_probability},
      {"qubit end to end", qubit_end_to_end},
      {"pulse count formula", pulse_count},
      {"Weyl algebra", weyl_algebra},
      {"diagonal jumping", diagonal_jumping},
      {"d-dimensional contraction", qudit_contraction},
      {"qudit protocol substitute", qudit_protocol},
      {"inverse approximation", inverse_approximation},
      {"inverse-free compilation", inverse_free},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
