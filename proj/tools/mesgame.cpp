// Command-line front end for the MES compensation pricing game.
//
//   mesgame solve        --scenario FILE|DIR [--seed N] [--out CSV] [--oracle]
//   mesgame compare      --scenario FILE [--seed N] [--out CSV]
//   mesgame sweep        --spec FILE --out CSV [--threads N]
//   mesgame oracle-check --scenario FILE [--seed N] [--grid-step H]
//
// Exit codes: 0 feasible, 2 infeasible, 3 input error, 1 oracle mismatch.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mesgame/baselines.hpp"
#include "mesgame/leader.hpp"
#include "mesgame/scenario_io.hpp"
#include "mesgame/sweep.hpp"
#include "mesgame/verify.hpp"

namespace fs = std::filesystem;
using namespace mesgame;

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInputError = 3;

struct Options {
  std::string scenario;
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  double grid_step = 1e-4;
  bool oracle = false;
  unsigned threads = 1;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("out", "cannot write '" + path.string() + "'");
  out << text;
}

/// `fig.csv` -> `fig.<tag>.csv`
fs::path sibling(const fs::path& path, const std::string& tag) {
  auto result = path;
  result.replace_extension("." + tag + path.extension().string());
  return result;
}

std::string mes_csv(const Scenario& scenario, const EquilibriumResult& r) {
  std::string csv = "id,rcs,lcs,energy,utility,participates\n";
  for (std::size_t k = 0; k < scenario.fleet_size(); ++k) {
    const auto& a = scenario.fleet()[k];
    csv += a.id + ',' + a.rcs_id + ',' + a.lcs_id + ',' +
           format_sig9(r.energy[k]) + ',' + format_sig9(r.mes_utility[k]) + ',' +
           (r.participation[k] ? "1" : "0") + '\n';
  }
  return csv;
}

struct OracleComparison {
  std::optional<verify::GridOptimum> grid;
  double max_response_gap = 0.0;  // in grid steps
};

OracleComparison compare_with_oracle(const Scenario& scenario, double price,
                                     double grid_step) {
  verify::GridSpec grid;
  grid.price_step = grid_step;
  OracleComparison cmp;
  cmp.grid = verify::brute_equilibrium(scenario, grid);
  if (std::isfinite(price)) {
    const auto profiles = best_response_profiles(scenario);
    for (std::size_t k = 0; k < scenario.fleet_size(); ++k) {
      const auto& agent = scenario.fleet()[k];
      const double step = grid.energy_step_fraction * agent.service_capacity();
      if (step <= 0.0) continue;
      const double brute = verify::brute_best_response(
          agent, price, scenario.mean_service_target(),
          service_powers(scenario, k), grid);
      cmp.max_response_gap = std::max(
          cmp.max_response_gap,
          std::abs(brute - best_response(profiles[k], price)) / step);
    }
  }
  return cmp;
}

std::string oracle_report(const EquilibriumResult& r, const OracleComparison& c) {
  std::ostringstream os;
  os << "oracle:\n";
  if (!c.grid) {
    os << "  grid_status: infeasible\n";
  } else {
    os << "  grid_price: " << format_sig9(c.grid->price) << '\n'
       << "  grid_utility: " << format_sig9(c.grid->utility) << '\n';
    if (r.feasible())
      os << "  price_deviation: " << format_sig9(std::abs(r.price - c.grid->price))
         << '\n'
         << "  utility_gain_over_grid: "
         << format_sig9(r.pso_utility - c.grid->utility) << '\n';
  }
  os << "  max_best_response_deviation_steps: "
     << format_sig9(c.max_response_gap) << '\n';
  return os.str();
}

std::string render(const Scenario& scenario, const EquilibriumResult& r) {
  std::ostringstream os;
  const auto& st = scenario.stations();
  os << "status: " << (r.feasible() ? "feasible" : "infeasible") << '\n';
  if (!r.feasible()) {
    for (const auto& d : r.diagnosis) os << "violated: " << d << '\n';
    return os.str();
  }
  os << "price: " << format_sig9(r.price) << '\n'
     << "pso_utility: " << format_sig9(r.pso_utility) << '\n'
     << "interval: "
     << (r.interval ? std::to_string(*r.interval) : std::string("-")) << '\n';
  for (std::size_t j = 0; j < st.lcs.size(); ++j)
    os << "lcs " << st.lcs[j].id() << " load " << format_sig9(r.lcs_load[j])
       << " window [" << format_sig9(st.lcs[j].demand_min()) << ", "
       << format_sig9(st.lcs[j].demand_max()) << "]\n";
  for (std::size_t i = 0; i < st.rcs.size(); ++i)
    os << "rcs " << st.rcs[i].id << " draw " << format_sig9(r.rcs_draw[i])
       << " limit " << format_sig9(st.rcs[i].surplus_energy) << '\n';
  os << "mes:\n";
  for (std::size_t k = 0; k < scenario.fleet_size(); ++k) {
    const auto& a = scenario.fleet()[k];
    os << "  " << a.id << ' ' << a.rcs_id << "->" << a.lcs_id
       << " energy " << format_sig9(r.energy[k]) << " utility "
       << format_sig9(r.mes_utility[k])
       << (r.participation[k] ? " participates" : " declines") << '\n';
  }
  return os.str();
}

Scenario load(const Options& opt, const fs::path& path) {
  return materialize(read_scenario_document(path), opt.seed);
}

int cmd_solve(const Options& opt) {
  std::vector<fs::path> files;
  if (fs::is_directory(opt.scenario)) {
    for (const auto& entry : fs::directory_iterator(opt.scenario))
      if (entry.is_regular_file() && entry.path().extension() == ".scn")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw ScenarioError("scenario", "no .scn files in '" + opt.scenario + "'");
  } else {
    files.push_back(opt.scenario);
  }

  bool all_feasible = true;
  std::string csv;
  std::string oracle_text;
  for (const auto& file : files) {
    const auto scenario = load(opt, file);
    const auto result = solve_equilibrium(scenario);
    all_feasible = all_feasible && result.feasible();
    if (files.size() > 1) std::cout << "slot: " << file.filename().string() << '\n';
    std::cout << render(scenario, result);
    if (opt.oracle) {
      const auto text = oracle_report(
          result, compare_with_oracle(scenario, result.price, opt.grid_step));
      std::cout << text;
      oracle_text += text;
    }
    if (result.feasible()) csv += mes_csv(scenario, result);
  }
  if (!opt.out.empty()) {
    write_file(opt.out, csv);
    if (opt.oracle) write_file(sibling(opt.out, "oracle"), oracle_text);
  }
  return all_feasible ? kExitFeasible : kExitInfeasible;
}

int cmd_compare(const Options& opt) {
  const auto scenario = load(opt, opt.scenario);
  const std::uint64_t seed = opt.seed.value_or(1);
  std::string csv = "scheme,feasible,price,pso_utility";
  for (const auto& l : scenario.stations().lcs) csv += ",load_" + l.id();
  csv += ",attempts\n";
  bool any_feasible = false;
  for (const auto scheme :
       {Scheme::proposed, Scheme::price_minimized, Scheme::random}) {
    const auto r = solve_scheme(scenario, scheme, seed);
    any_feasible = any_feasible || r.feasible();
    csv += std::string(scheme_name(scheme)) + ',' + (r.feasible() ? "1" : "0");
    csv += ',' + (r.feasible() ? format_sig9(r.price) : std::string());
    csv += ',' + (r.feasible() ? format_sig9(r.pso_utility) : std::string());
    for (std::size_t j = 0; j < scenario.stations().lcs.size(); ++j)
      csv += ',' + (r.feasible() ? format_sig9(r.lcs_load[j]) : std::string());
    csv += ',' + (scheme == Scheme::random ? std::to_string(r.attempts)
                                           : std::string());
    csv += '\n';
  }
  std::cout << csv;
  if (!opt.out.empty()) write_file(opt.out, csv);
  return any_feasible ? kExitFeasible : kExitInfeasible;
}

int cmd_sweep(const Options& opt) {
  if (opt.out.empty()) throw ScenarioError("out", "--out is required for sweep");
  const auto spec = read_sweep_spec(opt.spec);
  const auto series = run_sweep(spec, opt.threads);
  const auto cells = aggregate(series);
  write_file(opt.out, sweep_csv(series));
  write_file(sibling(opt.out, "mean"), aggregate_csv(series, cells));
  std::cout << aggregate_csv(series, cells);
  return kExitFeasible;
}

int cmd_oracle_check(const Options& opt) {
  const auto scenario = load(opt, opt.scenario);
  const auto result = solve_equilibrium(scenario);
  const auto cmp = compare_with_oracle(scenario, result.price, opt.grid_step);
  std::cout << "status: " << (result.feasible() ? "feasible" : "infeasible")
            << '\n';
  if (result.feasible())
    std::cout << "price: " << format_sig9(result.price) << '\n'
              << "pso_utility: " << format_sig9(result.pso_utility) << '\n';
  std::cout << oracle_report(result, cmp);
  if (!opt.out.empty()) write_file(opt.out, oracle_report(result, cmp));

  if (!result.feasible()) return cmp.grid ? kExitMismatch : kExitInfeasible;
  if (cmp.max_response_gap > 2.0) return kExitMismatch;
  if (cmp.grid) {
    const double tol = 1e-6 * std::abs(result.pso_utility) + 1e-6;
    if (result.pso_utility < cmp.grid->utility - tol) return kExitMismatch;
  }
  return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg pricing of on-road mobile energy storage"};
  app.require_subcommand(1);
  Options opt;

  const auto add_seed = [&opt](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&opt](std::uint64_t s) { opt.seed = s; },
        "Fleet draw seed for [fleet_spec] scenarios; random-scheme seed");
  };

  auto* solve = app.add_subcommand("solve", "Solve the Stackelberg equilibrium");
  solve->add_option("--scenario", opt.scenario,
                    "Scenario file, or a directory of per-slot .scn files")
      ->required();
  add_seed(solve);
  solve->add_option("--out", opt.out, "Per-MES CSV output");
  solve->add_flag("--oracle", opt.oracle, "Also run the brute-force oracle");
  solve->add_option("--grid-step", opt.grid_step, "Oracle price grid step")
      ->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Compare the three pricing schemes");
  compare->add_option("--scenario", opt.scenario, "Scenario file")->required();
  add_seed(compare);
  compare->add_option("--out", opt.out, "CSV output");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--spec", opt.spec, "Sweep spec file")->required();
  sweep->add_option("--out", opt.out, "CSV output (means go to *.mean.csv)")
      ->required();
  sweep->add_option("--threads", opt.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle-check",
                                    "Check the solver against brute force");
  oracle->add_option("--scenario", opt.scenario, "Scenario file")->required();
  add_seed(oracle);
  oracle->add_option("--grid-step", opt.grid_step, "Price grid step")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--out", opt.out, "Report output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (*solve) return cmd_solve(opt);
    if (*compare) return cmd_compare(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*oracle) return cmd_oracle_check(opt);
  } catch (const ScenarioError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
