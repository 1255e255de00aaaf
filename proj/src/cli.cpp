#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "coex/errors.hpp"
#include "coex/experiments.hpp"

namespace coex {

namespace {

constexpr int kExitIo = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariant = 4;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

void emit(const std::string& text, const std::string& out_path) {
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"WiFi / LBT coexistence analysis and simulation"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string sweep_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool emit_plot = false;

  auto* analyze = app.add_subcommand("analyze", "analytic model and policy parameters");
  auto* simulate = app.add_subcommand("simulate", "simulate one scenario");
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  auto* compare = app.add_subcommand("compare", "fairness verdict against the WiFi twin");

  for (auto* sub : {analyze, simulate, compare}) {
    sub->add_option("--scenario", scenario_path, "scenario file")->required();
    sub->add_option("--out", out_path, "CSV output path");
  }
  for (auto* sub : {simulate, compare}) sub->add_option("--seed", seed, "seed override");
  sweep->add_option("--sweep", sweep_path, "sweep file")->required();
  sweep->add_option("--seed", seed, "base seed override");
  sweep->add_option("--out", out_path, "CSV output path");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  sweep->add_flag("--emit-plot", emit_plot, "also write <out>.gp (requires --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (analyze->parsed()) {
      emit(analyze_csv(read_scenario_file(scenario_path)), out_path);
    } else if (simulate->parsed()) {
      Scenario sc = read_scenario_file(scenario_path);
      if (seed) sc.seed = *seed;
      emit(node_rows_csv(simulate_rows(sc)), out_path);
    } else if (sweep->parsed()) {
      if (emit_plot && out_path.empty()) throw ConfigError("--emit-plot requires --out");
      const SweepSpec spec = read_sweep_file(sweep_path);
      const std::string csv = node_rows_csv(run_sweep(spec, seed, jobs));
      emit(csv, out_path);
      if (emit_plot) write_file(out_path + ".gp", gnuplot_script(spec, out_path));
    } else if (compare->parsed()) {
      Scenario sc = read_scenario_file(scenario_path);
      if (seed) sc.seed = *seed;
      const CompareReport r = compare_scenario(sc);
      std::cout << format_compare(r);
      if (!out_path.empty()) {
        write_file(out_path,
                   "scenario_id,seed,mode,wifi_goodput_mbps,wifi_goodput_twin_mbps,"
                   "wifi_goodput_alone_mbps,wifi_gain,lbt_goodput_mbps,twin_goodput_mbps,"
                   "lbt_gain,lbt_collisions,verdict\n" +
                       r.scenario_id + ',' + std::to_string(r.seed) + ',' +
                       std::string(to_string(r.mode)) + ',' + format_number(r.wifi_goodput) +
                       ',' + format_number(r.wifi_goodput_twin) + ',' +
                       format_number(r.wifi_goodput_alone) + ',' + format_number(r.wifi_gain()) +
                       ',' + format_number(r.lbt_goodput) + ',' + format_number(r.twin_goodput) +
                       ',' + format_number(r.lbt_gain()) + ',' + std::to_string(r.lbt_collisions) +
                       ',' + (r.fair() ? "PASS" : "FAIL") + '\n');
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DomainError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const InvariantViolation& e) {
    std::cerr << "simulation invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

}  // namespace coex
