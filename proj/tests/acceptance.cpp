// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Desk-scale parameters (2000 circuits, depth 50, 4 workers).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "negprob/circuits.hpp"
#include "negprob/constraints.hpp"
#include "negprob/l1solver.hpp"
#include "negprob/quantum.hpp"
#include "negprob/scenario.hpp"
#include "support/generators.hpp"

using namespace negprob;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, const std::string& what, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << what;
  if (!detail.empty()) std::cout << " [" << detail << "]";
  std::cout << std::endl;
  if (!ok) ++failures;
}

void criterion(int n, const std::string& what, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(n, what, ok, detail);
}

double solve_contextuality(const EmpiricalModel& m) {
  auto sol = minimize_l1(build(m));
  if (!sol.feasible) throw solver_error("unexpectedly infeasible");
  return sol.contextuality;
}

}  // namespace

int main() {
  const double kTol = 1e-6;

  criterion(1, "bell contextuality 0.25 within 1e-6, under 1 s", [&](std::string& d) {
    auto t0 = std::chrono::steady_clock::now();
    double c = solve_contextuality(builtin_bell());
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    std::ostringstream os;
    os.precision(12);
    os << "contextuality " << c << ", " << ms << " ms";
    d = os.str();
    return std::abs(c - 0.25) < kTol && ms < 1000.0;
  });

  criterion(2, "pr_box contextuality 1.0 within 1e-6", [&](std::string& d) {
    double c = solve_contextuality(builtin_pr_box());
    d = "contextuality " + std::to_string(c);
    return std::abs(c - 1.0) < kTol;
  });

  criterion(3, "mermin contextuality 0.25 within 1e-6", [&](std::string& d) {
    double c = solve_contextuality(builtin_mermin());
    d = "contextuality " + std::to_string(c);
    return std::abs(c - 0.25) < kTol;
  });

  criterion(4, "simplex norm = vertex-enumeration norm within 1e-8", [&](std::string& d) {
    // Builtins with <= 16 atoms (mermin's 64-atom space exceeds the
    // enumeration guard) plus 200 random no-signal scenarios.
    std::vector<EmpiricalModel> cases = {builtin_bell(), builtin_pr_box(),
                                         three_dichotomic({})};
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) cases.push_back(testgen::random_no_signal_chsh(rng));
    for (int i = 0; i < 100; ++i) cases.push_back(testgen::random_three_dichotomic(rng));
    double worst = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      auto sys = build(cases[i]);
      auto sol = minimize_l1(sys);
      if (!sol.feasible) {
        d = "case " + std::to_string(i) + " infeasible";
        return false;
      }
      double oracle = min_vertex_norm(enumerate_vertices(sys));
      worst = std::max(worst, std::abs(sol.norm - oracle));
      if (std::abs(sol.norm - oracle) > 1e-8) {
        d = "case " + std::to_string(i) + ": lp " + std::to_string(sol.norm) +
            " vs oracle " + std::to_string(oracle);
        return false;
      }
    }
    std::ostringstream os;
    os << cases.size() << " scenarios, worst gap " << worst;
    d = os.str();
    return true;
  });

  criterion(5, "three_dichotomic rank 7/8; <XYZ> gives rank 8, unique solution",
            [&](std::string& d) {
    auto base = rank_report(build(three_dichotomic({})));
    auto m = three_dichotomic({});
    m.hidden_constraints.push_back({{"X", "Y", "Z"}, 1.0});
    auto sys = build(m);
    auto full = rank_report(sys);
    auto sol = minimize_l1(sys);
    // Rank 8 with 8 unknowns pins the measure: the minimizer must equal the
    // closed form w = (1 + <XYZ> sx sy sz)/8, i.e. 1/4 on the 4 even atoms.
    bool unique_matches = sol.feasible;
    for (std::size_t atom = 0; atom < 8 && unique_matches; ++atom) {
      int bits = static_cast<int>((atom & 1) + ((atom >> 1) & 1) + ((atom >> 2) & 1));
      double want = (bits % 2 == 0) ? 0.25 : 0.0;
      unique_matches = std::abs(sol.measure.weight(atom) - want) < 1e-9;
    }
    d = "rank " + std::to_string(base.rank) + " -> " + std::to_string(full.rank);
    return base.rank == 7 && base.unknowns == 8 && full.rank == 8 &&
           !full.underdetermined && unique_matches;
  });

  criterion(6, "100 signaling perturbations rejected, 100 no-signal feasible",
            [&](std::string& d) {
    std::mt19937_64 rng(77);
    int rejected = 0;
    for (int i = 0; i < 100; ++i) {
      auto m = testgen::signaling_bell_perturbation(rng);
      try {
        if (!minimize_l1(build(m)).feasible) ++rejected;
      } catch (const signaling_error&) {
        ++rejected;
      }
    }
    int feasible = 0;
    for (int i = 0; i < 100; ++i)
      if (minimize_l1(build(testgen::no_signal_bell_perturbation(rng))).feasible)
        ++feasible;
    d = std::to_string(rejected) + "/100 rejected, " + std::to_string(feasible) +
        "/100 feasible";
    return rejected == 100 && feasible == 100;
  });

  criterion(7, "cat sweep: endpoints, monotone, contextuality = max(0, chsh/2-1)",
            [&](std::string& d) {
    auto t0 = std::chrono::steady_clock::now();
    auto rows = cat_sweep(101);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = rows.size() == 101 && sec < 30.0;
    ok = ok && std::abs(rows.front().contextuality) < kTol;
    ok = ok && std::abs(rows.back().contextuality - (std::sqrt(2.0) - 1.0)) < kTol;
    for (std::size_t i = 0; i + 1 < rows.size() && ok; ++i) {
      ok = rows[i + 1].entanglement >= rows[i].entanglement - 1e-9 &&
           rows[i + 1].chsh >= rows[i].chsh - 1e-9 &&
           rows[i + 1].contextuality >= rows[i].contextuality - kTol;
    }
    for (const auto& r : rows)
      ok = ok && std::abs(r.contextuality - std::max(0.0, r.chsh / 2.0 - 1.0)) < kTol;
    std::ostringstream os;
    os << "101 points in " << sec << " s, endpoint " << rows.back().contextuality;
    d = os.str();
    return ok;
  });

  criterion(8, "circuits desk scale: entropy ordering, clifford max and clusters",
            [&](std::string& d) {
    auto t0 = std::chrono::steady_clock::now();
    auto cl = experiment(GateSetKind::clifford, 2000, 50, 7, 4);
    auto clt = experiment(GateSetKind::clifford_t, 2000, 50, 7, 4);
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_range = true;
    for (const auto& st : {cl, clt})
      for (const auto& s : st.samples)
        in_range = in_range && s.contextuality >= 0.0 &&
                   s.contextuality <= kMaxQuantumContextuality + kTol;
    std::vector<std::pair<const char*, bool>> checks = {
        {"runtime", sec < 300.0},
        {"entropy ordering", cl.shannon_entropy_bits < clt.shannon_entropy_bits},
        {"entropy ratio > 5", clt.shannon_entropy_bits > 5.0 * cl.shannon_entropy_bits},
        {"clifford max = sqrt2-1",
         std::abs(cl.max_contextuality - kMaxQuantumContextuality) < kTol},
        {"clifford clusters <= 25", cl.distinct_clusters <= 25},
        {"clifford_t clusters > 100", clt.distinct_clusters > 100},
        {"values in [0, sqrt2-1]", in_range}};
    bool ok = true;
    std::ostringstream os;
    os << "H(clifford)=" << cl.shannon_entropy_bits
       << " H(clifford_t)=" << clt.shannon_entropy_bits << ", clusters "
       << cl.distinct_clusters << "/" << clt.distinct_clusters << ", " << sec << " s";
    for (const auto& [name, passed] : checks) {
      ok = ok && passed;
      if (!passed) os << "; failed: " << name;
    }
    d = os.str();
    return ok;
  });

  criterion(9, "measure invariants: additivity, marginalization, restrictions",
            [&](std::string& d) {
    std::mt19937_64 rng(501);
    int checks = 0;
    // Additivity and marginalization functoriality on random signed measures
    // over the three-variable space.
    auto space = outcome_space(three_dichotomic({}));
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> w(space->atom_count());
      for (auto& x : w) x = 2.0 * testgen::unit_real(rng) - 1.0;
      SignedMeasure mu(space, w);
      // Additivity over a random partition of a random event.
      std::vector<std::size_t> event, part_a, part_b;
      for (std::size_t atom = 0; atom < space->atom_count(); ++atom)
        if (rng() % 2) {
          event.push_back(atom);
          (rng() % 2 ? part_a : part_b).push_back(atom);
        }
      double lhs = evaluate(mu, event);
      double rhs = evaluate(mu, part_a) + evaluate(mu, part_b);
      if (std::abs(lhs - rhs) > 1e-12) {
        d = "additivity violated";
        return false;
      }
      ++checks;
      // Functoriality: marginalizing to {X,Y} then {X} equals direct {X}.
      auto m1 = marginalize(marginalize(mu, {"X", "Y"}), {"X"});
      auto m2 = marginalize(mu, {"X"});
      for (std::size_t atom = 0; atom < m1.space().atom_count(); ++atom)
        if (std::abs(m1.weight(atom) - m2.weight(atom)) > 1e-12) {
          d = "marginalization functoriality violated";
          return false;
        }
      ++checks;
    }
    // Kolmogorovian restriction of every LP solution on every context.
    std::vector<EmpiricalModel> models = {builtin_bell(), builtin_pr_box(),
                                          builtin_mermin(),
                                          three_dichotomic({0, 0, 0, -1, -1, -1})};
    for (int i = 0; i < 25; ++i) models.push_back(testgen::random_no_signal_chsh(rng));
    for (int i = 0; i < 25; ++i) models.push_back(testgen::random_three_dichotomic(rng));
    for (const auto& m : models) {
      auto sys = build(m);
      auto sol = minimize_l1(sys);
      if (!sol.feasible) {
        d = "model unexpectedly infeasible";
        return false;
      }
      for (const auto& ctx : m.contexts) {
        ContextAlgebra alg(sys.space, ctx.members);
        if (!restrict_is_kolmogorovian(sol.measure, alg, 1e-7).ok) {
          d = "restriction to '" + ctx.id + "' not Kolmogorovian";
          return false;
        }
        ++checks;
      }
    }
    d = std::to_string(checks) + " checks";
    return true;
  });

  criterion(10, "two `circuits --seed 7` runs: byte-identical summary.json",
            [&](std::string& d) {
    fs::path base = fs::temp_directory_path() / "negprob_accept_det";
    fs::remove_all(base);
    auto run_once = [&](const std::string& sub) {
      fs::path dir = base / sub;
      std::string cmd = std::string(NEGPROB_CLI_PATH) +
                        " circuits --gates clifford_t --n 200 --depth 50 --seed 7"
                        " --workers 4 --out " +
                        dir.string() + " > /dev/null 2>&1";
      int raw = std::system(cmd.c_str());
      if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0)
        throw solver_error("cli run failed");
      std::ifstream in(dir / "summary.json", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    std::string a = run_once("a"), b = run_once("b");
    fs::remove_all(base);
    d = a == b ? "identical (" + std::to_string(a.size()) + " bytes)" : "differs";
    return !a.empty() && a == b;
  });

  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failures) +
                                    " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
