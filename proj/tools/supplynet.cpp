// Command line front end: one subcommand per experiment type plus `run`
// for spec files. Tabular data goes to --out ("-" is stdout); the JSON
// envelope goes to stdout, or to stderr when stdout carries the data.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "supplynet.hpp"

namespace {

using supplynet::ExperimentSpec;

void add_network_options(CLI::App* cmd, ExperimentSpec& s) {
  auto& src = s.network;
  cmd->add_option("--input,-i", src.file, "network file (edge CSV, I-O table CSV or network JSON)");
  cmd->add_option("--format", src.format, "input format override")
      ->check(CLI::IsMember({"edge-csv", "io-table-csv", "network-json"}));
  cmd->add_option("--io-threshold", src.io_threshold, "I-O table cells above this become edges");
  cmd->add_option("--model", src.model, "generator")
      ->check(CLI::IsMember({"rdag", "parallel", "tree", "gw", "trellis", "chain", "star"}));
  cmd->add_option("--k", src.k, "product count (rdag, parallel, chain, star)");
  cmd->add_option("--p", src.p, "edge probability (rdag, trellis)");
  cmd->add_option("--m", src.m, "inputs per product (parallel, tree)");
  cmd->add_option("--d", src.d, "uses per raw material (parallel)");
  cmd->add_option("--depth", src.depth, "tiers (tree, trellis) or max generations (gw)");
  cmd->add_option("--w", src.w, "tier width (trellis)");
  cmd->add_option("--dist", src.dist, "offspring law: poisson:MU, binomial:K:P or point:V");
  cmd->add_option_function<std::uint64_t>(
      "--graph-seed", [&src](const std::uint64_t& v) { src.graph_seed = v; },
      "generator seed (defaults to --seed)");
}

void add_common_options(CLI::App* cmd, ExperimentSpec& s) {
  cmd->add_option("--seed", s.seed, "RNG seed");
  cmd->add_option("--n", s.n, "suppliers per product")->check(CLI::PositiveNumber);
  cmd->add_option("--out,-o", s.out, "data output path, - for stdout");
  cmd->add_option("--workers", s.workers, "worker threads")->check(CLI::PositiveNumber);
}

void add_y_option(CLI::App* cmd, ExperimentSpec& s) {
  cmd->add_option_function<double>("--y", [&s](const double& v) { s.y = v; },
                                   "edge survival probability");
}

void add_grid_option(CLI::App* cmd, ExperimentSpec& s) {
  cmd->add_option_function<std::string>(
      "--eps-grid",
      [&s](const std::string& v) { s.eps_grid = supplynet::parse_grid(v); },
      "epsilon grid: a,b,c or start:stop:step");
}

int run(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const bool data_on_stdout = spec.out.empty() || spec.out == "-";
  std::ostream& env_stream = data_on_stdout ? std::cerr : std::cout;
  auto res = supplynet::run_experiment(spec, std::cout);
  std::cout.flush();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  env_stream << supplynet::make_envelope(spec, res, wall).dump(1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascading-failure resilience of production networks"};
  app.set_version_flag("--version", std::string(supplynet::kVersion));
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string spec_file;

  auto* gen = app.add_subcommand("generate", "emit a generated network as network JSON");
  add_network_options(gen, spec);
  add_common_options(gen, spec);

  auto* sim = app.add_subcommand("simulate", "batch percolation trials, histogram of F");
  add_network_options(sim, spec);
  add_common_options(sim, spec);
  add_y_option(sim, spec);
  sim->add_option("--x", spec.x, "supplier failure probability");
  sim->add_option("--trials", spec.trials, "trials")->check(CLI::PositiveNumber);

  auto* res = app.add_subcommand("resilience", "Monte Carlo resilience curve and AUC");
  add_network_options(res, spec);
  add_common_options(res, spec);
  add_y_option(res, spec);
  add_grid_option(res, spec);
  res->add_option("--trials", spec.trials, "trials")->check(CLI::PositiveNumber);
  res->add_option("--x-step", spec.x_step, "x grid step");
  res->add_option("--json-out", spec.json_out, "JSON curve with metadata");

  auto* bnd = app.add_subcommand("bounds", "analytic resilience bounds table");
  add_network_options(bnd, spec);
  add_common_options(bnd, spec);
  add_grid_option(bnd, spec);
  bnd->add_option("--arch", spec.arch, "architecture")
      ->required()
      ->check(CLI::IsMember({"rdag", "parallel", "tree", "trellis", "gw", "dag"}));
  bnd->add_option("--scope", spec.scope, "parallel products scope")
      ->check(CLI::IsMember({"complex-only", "all-products"}));
  bnd->add_option("--max-tau", spec.max_tau, "GW generation cap");
  bnd->add_option("--samples", spec.samples, "GW trees simulated for the tau law");

  auto* beta = app.add_subcommand("beta", "failure-probability bounds and vulnerability ranking");
  add_network_options(beta, spec);
  add_common_options(beta, spec);
  add_y_option(beta, spec);
  beta->add_option("--x", spec.x, "supplier failure probability");
  beta->add_option("--method", spec.method, "solver")
      ->check(CLI::IsMember({"auto", "dag", "fixed-point", "katz"}));
  beta->add_flag("--override-precondition", spec.override_precondition,
                 "run the fixed point even when y > 1/Delta");

  auto* itv = app.add_subcommand("intervene", "protection curve over budgets T = 0..K");
  add_network_options(itv, spec);
  add_common_options(itv, spec);
  add_y_option(itv, spec);
  itv->add_option("--x", spec.x, "supplier failure probability");
  itv->add_option("--epsilon", spec.epsilon, "resilience level for the bound");
  itv->add_flag("--allocate", spec.allocate, "also allocate extra suppliers");
  itv->add_option("--budget", spec.budget, "extra supplier budget N");
  itv->add_option("--cap", spec.cap, "per-product extra supplier cap");

  auto* runc = app.add_subcommand("run", "run a JSON spec file");
  runc->add_option("--spec", spec_file, "spec file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(supplynet::ExitCode::kUsage);
  }

  try {
    if (runc->parsed()) {
      std::ifstream f(spec_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw supplynet::UsageError(std::string("cannot parse spec file: ") + e.what());
      }
      return run(supplynet::spec_from_json(j));
    }
    spec.command = app.get_subcommands().front()->get_name();
    return run(spec);
  } catch (const supplynet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(supplynet::ExitCode::kValidation);
  }
}
