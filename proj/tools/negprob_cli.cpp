// negprob: L1 contextuality of finite no-signal empirical models, with a
// two-qubit quantum backend. See README.md for the command reference.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "negprob/circuits.hpp"
#include "negprob/constraints.hpp"
#include "negprob/l1solver.hpp"
#include "negprob/quantum.hpp"
#include "negprob/scenario.hpp"

namespace {

constexpr int kExitLoadError = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

int log_level() {
  const char* env = std::getenv("NEGPROB_LOG");
  if (!env) return 0;
  std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[negprob] " << msg << "\n";
}

struct ScenarioSource {
  std::string builtin;
  std::string file;
  std::string moments;  // only for --builtin three_dichotomic
  std::vector<std::string> hidden;
};

negprob::HiddenConstraint parse_hidden(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw negprob::input_error("--hidden expects members=value, got '" + spec + "'");
  negprob::HiddenConstraint h;
  std::string lhs = spec.substr(0, eq);
  h.expectation = std::stod(spec.substr(eq + 1));
  if (lhs.find(',') != std::string::npos) {
    std::stringstream ss(lhs);
    std::string tok;
    while (std::getline(ss, tok, ',')) h.members.push_back(tok);
  } else {
    for (char c : lhs) h.members.push_back(std::string(1, static_cast<char>(std::toupper(c))));
  }
  return h;
}

negprob::EmpiricalModel load_model(const ScenarioSource& src) {
  if (src.builtin.empty() == src.file.empty())
    throw negprob::input_error("exactly one of --builtin or --file is required");
  negprob::EmpiricalModel model;
  if (!src.file.empty()) {
    std::ifstream in(src.file);
    if (!in) throw negprob::input_error("cannot open scenario file '" + src.file + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw negprob::input_error("scenario file '" + src.file + "': " + e.what());
    }
    model = negprob::load(doc);
  } else if (src.builtin == "three_dichotomic") {
    negprob::ThreeDichotomicMoments m;
    if (!src.moments.empty()) {
      std::vector<double> v;
      std::stringstream ss(src.moments);
      std::string tok;
      while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
      if (v.size() != 6)
        throw negprob::input_error("--moments expects 6 values <X>,<Y>,<Z>,<XY>,<XZ>,<YZ>");
      m = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    model = negprob::three_dichotomic(m);
  } else {
    if (!src.moments.empty())
      throw negprob::input_error("--moments only applies to --builtin three_dichotomic");
    model = negprob::builtin(src.builtin);
  }
  for (const auto& spec : src.hidden) model.hidden_constraints.push_back(parse_hidden(spec));
  negprob::validate(model);
  return model;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw negprob::input_error("cannot open output file '" + path + "'");
  return file;
}

nlohmann::ordered_json no_signal_json(const negprob::NoSignalReport& rep) {
  nlohmann::ordered_json j;
  j["consistent"] = rep.consistent;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : rep.violations)
    j["violations"].push_back({{"context_a", v.context_a},
                               {"context_b", v.context_b},
                               {"event", v.event},
                               {"gap", v.gap}});
  return j;
}

int cmd_solve(const ScenarioSource& src, double tol, const std::string& out,
              const std::string& format) {
  auto model = load_model(src);
  auto nosignal = negprob::check_no_signal(model, tol);
  auto sys = negprob::build(model, tol);
  log_info("system: " + std::to_string(sys.rows()) + " rows, " +
           std::to_string(sys.unknowns()) + " atoms");
  auto sol = negprob::minimize_l1(sys, tol);

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["feasible"] = sol.feasible;
    j["norm"] = sol.norm;
    j["contextuality"] = sol.contextuality;
    j["unique_hint"] = sol.unique_hint;
    j["iterations"] = sol.iterations;
    j["no_signal"] = no_signal_json(nosignal);
    j["measure"] = nlohmann::ordered_json::object();
    if (sol.feasible)
      for (std::size_t atom = 0; atom < sys.space->atom_count(); ++atom)
        j["measure"][sys.space->atom_label(atom)] = sol.measure.weight(atom);
    os << j.dump(2) << "\n";
  } else if (format == "csv") {
    os.precision(15);
    os << "atom,weight\n";
    if (sol.feasible)
      for (std::size_t atom = 0; atom < sys.space->atom_count(); ++atom)
        os << "\"" << sys.space->atom_label(atom) << "\"," << sol.measure.weight(atom)
           << "\n";
  } else {
    os.precision(15);
    os << "feasible:      " << (sol.feasible ? "yes" : "no (model signals)") << "\n";
    if (sol.feasible) {
      os << "minimal norm:  " << sol.norm << "\n"
         << "contextuality: " << sol.contextuality << "\n"
         << "unique hint:   " << (sol.unique_hint ? "yes" : "no") << "\n";
    }
    os << "iterations:    " << sol.iterations << "\n"
       << "no-signal:     " << (nosignal.consistent ? "consistent" : "violated") << "\n";
    for (const auto& v : nosignal.violations)
      os << "  " << v.context_a << " vs " << v.context_b << " on {" << v.event
         << "}: gap " << v.gap << "\n";
    if (sol.feasible) {
      os << "minimal signed measure:\n";
      for (std::size_t atom = 0; atom < sys.space->atom_count(); ++atom)
        os << "  " << sys.space->atom_label(atom) << ": " << sol.measure.weight(atom)
           << "\n";
    }
  }
  return sol.feasible ? 0 : kExitInfeasible;
}

int cmd_cat_sweep(std::size_t n, const std::string& out) {
  auto rows = negprob::cat_sweep(n);
  std::ofstream file;
  std::ostream& os = open_output(file, out);
  negprob::write_cat_sweep_csv(rows, os);
  return 0;
}

int cmd_circuits(const std::string& gates, std::size_t n, std::size_t depth,
                 std::uint64_t seed, std::size_t workers, const std::string& out_dir) {
  auto kind = negprob::gate_set_from_string(gates);
  if (n >= 100000 || depth >= 200)
    std::cerr << "warning: large run (" << n << " circuits, depth " << depth
              << "); this can take a long time\n";
  log_info("running " + std::to_string(n) + " circuits, depth " + std::to_string(depth) +
           ", " + std::to_string(workers) + " workers");
  auto stats = negprob::experiment(kind, n, depth, seed, workers);

  std::filesystem::create_directories(out_dir);
  auto path = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  {
    std::ofstream f(path("samples.csv"));
    negprob::write_samples_csv(stats, f);
  }
  {
    std::ofstream f(path("histogram.csv"));
    negprob::write_histogram_csv(stats, f);
  }
  {
    std::ofstream f(path("summary.json"));
    f << negprob::summary_json(stats).dump(2) << "\n";
  }
  std::cout << negprob::summary_json(stats).dump(2) << "\n";
  return 0;
}

int cmd_dump_constraints(const ScenarioSource& src, double tol, const std::string& out) {
  auto model = load_model(src);
  auto sys = negprob::build(model, tol);
  std::ofstream file;
  std::ostream& os = open_output(file, out);
  negprob::dump_csv(sys, os);
  return 0;
}

int cmd_check_nosignal(const ScenarioSource& src, double tol, const std::string& format) {
  auto model = load_model(src);
  auto rep = negprob::check_no_signal(model, tol);
  if (format == "json") {
    std::cout << no_signal_json(rep).dump(2) << "\n";
  } else {
    std::cout << (rep.consistent ? "consistent" : "violated") << "\n";
    for (const auto& v : rep.violations)
      std::cout << "  " << v.context_a << " vs " << v.context_b << " on {" << v.event
                << "}: gap " << v.gap << "\n";
  }
  return rep.consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1-norm contextuality of finite empirical models"};
  app.require_subcommand(1);

  ScenarioSource src;
  double tol = 1e-9;
  std::string out;
  std::string format = "text";
  std::size_t sweep_points = 101;
  std::string gates = "clifford";
  std::size_t n_circuits = 2000;
  std::size_t depth = 50;
  std::uint64_t seed = 7;
  std::size_t workers = 4;
  std::string out_dir = ".";

  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--builtin", src.builtin,
                    "builtin scenario: bell, pr_box, mermin, three_dichotomic");
    cmd->add_option("--file", src.file, "scenario JSON file");
    cmd->add_option("--moments", src.moments,
                    "<X>,<Y>,<Z>,<XY>,<XZ>,<YZ> for three_dichotomic");
    cmd->add_option("--hidden", src.hidden,
                    "hidden constraint, e.g. xyz=1 or X,Y,Z=1 (repeatable)");
  };

  auto* solve = app.add_subcommand("solve", "minimal-norm signed measure and contextuality");
  add_source(solve);
  solve->add_option("--tol", tol, "numerical tolerance");
  solve->add_option("--out", out, "output file (default stdout)");
  solve->add_option("--format", format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  auto* sweep = app.add_subcommand("cat-sweep", "cat-like state family sweep (CSV)");
  sweep->add_option("--n", sweep_points, "grid points over p in [0, 1/2]");
  sweep->add_option("--out", out, "output CSV file (default stdout)");

  auto* circ = app.add_subcommand("circuits", "contextuality of random circuit outputs");
  circ->add_option("--gates", gates, "clifford, clifford_t, extended or haar")
      ->check(CLI::IsMember({"clifford", "clifford_t", "extended", "haar"}));
  circ->add_option("--n", n_circuits, "number of circuits");
  circ->add_option("--depth", depth, "circuit depth");
  circ->add_option("--seed", seed, "RNG seed");
  circ->add_option("--workers", workers, "worker threads");
  circ->add_option("--out", out_dir, "output directory");

  auto* dump = app.add_subcommand("dump-constraints", "dump the linear system as CSV");
  add_source(dump);
  dump->add_option("--tol", tol, "numerical tolerance");
  dump->add_option("--out", out, "output CSV file (default stdout)");

  auto* nosig = app.add_subcommand("check-nosignal", "check marginal consistency");
  add_source(nosig);
  nosig->add_option("--tol", tol, "numerical tolerance");
  nosig->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(src, tol, out, format);
    if (sweep->parsed()) return cmd_cat_sweep(sweep_points, out);
    if (circ->parsed()) return cmd_circuits(gates, n_circuits, depth, seed, workers, out_dir);
    if (dump->parsed()) return cmd_dump_constraints(src, tol, out);
    if (nosig->parsed()) return cmd_check_nosignal(src, tol, format);
  } catch (const negprob::signaling_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const negprob::solver_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const negprob::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  }
  return 0;
}
