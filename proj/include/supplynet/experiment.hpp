#pragma once

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "supplynet/bounds.hpp"
#include "supplynet/contagion.hpp"
#include "supplynet/errors.hpp"
#include "supplynet/estimator.hpp"
#include "supplynet/generators.hpp"
#include "supplynet/interventions.hpp"
#include "supplynet/io.hpp"
#include "supplynet/percolation.hpp"

namespace supplynet {

inline constexpr const char* kVersion = "0.1.0";

/// Where the network of an experiment comes from: a file, or a generator
/// with its parameters.
struct NetworkSource {
  std::string file;
  std::string format;  ///< "", "edge-csv", "io-table-csv" or "network-json"
  double io_threshold = 0.0;

  std::string model;  ///< rdag, parallel, tree, gw, trellis, chain, star
  std::size_t k = 0;
  double p = 0.0;
  unsigned m = 0;
  unsigned d = 0;
  unsigned depth = 0;
  unsigned w = 0;
  std::string dist;  ///< "poisson:MU", "binomial:K:P" or "point:V"
  std::optional<std::uint64_t> graph_seed;
};

/// Everything that determines an experiment's output bytes.
struct ExperimentSpec {
  std::string command;
  NetworkSource network;
  double x = 0.1;
  std::optional<double> y;
  unsigned n = 1;
  std::uint64_t seed = 0;
  std::vector<double> eps_grid = default_epsilon_grid();
  double epsilon = 0.2;
  std::size_t trials = 1000;
  double x_step = 0.01;
  unsigned workers = 1;
  std::string out = "-";
  std::string json_out;

  std::string arch;            ///< bounds: rdag, parallel, tree, gw, trellis, dag, katz
  std::string scope = "complex-only";
  unsigned max_tau = 1000;
  std::size_t samples = 100'000;
  std::string method = "auto";  ///< beta: auto, dag, fixed-point, katz
  bool override_precondition = false;

  bool allocate = false;
  unsigned budget = 0;
  unsigned cap = 1;
};

// ---------------------------------------------------------------------------
// Parsing helpers shared by the CLI and spec files

/// "a,b,c" or "start:stop:step" (inclusive, within half a step).
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
      const auto v = parse_double(detail::trim(tok));
      if (!v) throw UsageError("bad grid \"" + text + "\"");
      parts.push_back(*v);
    }
    if (parts.size() != 3 || !(parts[2] > 0.0)) throw UsageError("grid range must be start:stop:step");
    const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 0.5));
    // round to 12 digits so 0.1:0.9:0.1 yields 0.3, not 0.30000000000000004
    for (std::size_t i = 0; i <= count; ++i) {
      const double v = parts[0] + static_cast<double>(i) * parts[2];
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto v = parse_double(detail::trim(tok));
    if (!v) throw UsageError("bad grid value \"" + tok + "\"");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

inline BranchingDistribution parse_distribution(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  auto num = [&](std::size_t i) {
    if (i >= parts.size()) throw UsageError("bad distribution \"" + text + "\"");
    const auto v = parse_double(parts[i]);
    if (!v) throw UsageError("bad distribution \"" + text + "\"");
    return *v;
  };
  if (parts.empty()) throw UsageError("empty distribution");
  if (parts[0] == "poisson" && parts.size() == 2) return BranchingDistribution::poisson(num(1));
  if (parts[0] == "binomial" && parts.size() == 3) {
    return BranchingDistribution::binomial(static_cast<unsigned>(num(1)), num(2));
  }
  if (parts[0] == "point" && parts.size() == 2) {
    return BranchingDistribution::point_mass(static_cast<unsigned>(num(1)));
  }
  throw UsageError("distribution must be poisson:MU, binomial:K:P or point:V");
}

inline NetworkFile build_network(const NetworkSource& src, unsigned n, std::uint64_t seed) {
  if (!src.file.empty()) {
    std::optional<NetworkFormat> fmt;
    if (src.format == "edge-csv") fmt = NetworkFormat::kEdgeCsv;
    else if (src.format == "io-table-csv") fmt = NetworkFormat::kIoTable;
    else if (src.format == "network-json") fmt = NetworkFormat::kNetworkJson;
    else if (!src.format.empty()) throw UsageError("unknown format \"" + src.format + "\"");
    return load_network(src.file, fmt, src.io_threshold, n);
  }
  const std::uint64_t gs = src.graph_seed.value_or(seed);
  NetworkFile f;
  f.format = NetworkFormat::kNetworkJson;
  f.provenance = "generator:" + src.model;
  if (src.model == "rdag") {
    f.network = generate_rdag(src.k, src.p, gs, n);
  } else if (src.model == "parallel") {
    f.network = generate_parallel(src.k, src.m, src.d, gs, n);
  } else if (src.model == "tree") {
    f.network = generate_backward_tree(src.m, src.depth, n);
  } else if (src.model == "gw") {
    f.network = generate_gw_tree(parse_distribution(src.dist), src.depth, gs, n).network;
  } else if (src.model == "trellis") {
    f.network = generate_trellis(src.w, src.depth, src.p, gs, n);
  } else if (src.model == "chain") {
    f.network = generate_chain(src.k, n);
  } else if (src.model == "star") {
    f.network = generate_star(src.k, n);
  } else if (src.model.empty()) {
    throw UsageError("a network file or --model is required");
  } else {
    throw UsageError("unknown model \"" + src.model + "\"");
  }
  return f;
}

// ---------------------------------------------------------------------------
// JSON echo of an ExperimentSpec

inline nlohmann::ordered_json to_json(const NetworkSource& s) {
  nlohmann::ordered_json j;
  if (!s.file.empty()) {
    j["file"] = s.file;
    if (!s.format.empty()) j["format"] = s.format;
    j["io_threshold"] = s.io_threshold;
    return j;
  }
  j["model"] = s.model;
  j["k"] = s.k;
  j["p"] = s.p;
  j["m"] = s.m;
  j["d"] = s.d;
  j["depth"] = s.depth;
  j["w"] = s.w;
  if (!s.dist.empty()) j["dist"] = s.dist;
  if (s.graph_seed) j["graph_seed"] = *s.graph_seed;
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["command"] = s.command;
  j["network"] = to_json(s.network);
  j["x"] = s.x;
  if (s.y) j["y"] = *s.y;
  j["n"] = s.n;
  j["seed"] = s.seed;
  j["eps_grid"] = s.eps_grid;
  j["epsilon"] = s.epsilon;
  j["trials"] = s.trials;
  j["x_step"] = s.x_step;
  j["workers"] = s.workers;
  j["out"] = s.out;
  if (!s.json_out.empty()) j["json_out"] = s.json_out;
  if (s.command == "bounds") {
    j["arch"] = s.arch;
    j["scope"] = s.scope;
    j["max_tau"] = s.max_tau;
    j["samples"] = s.samples;
  }
  if (s.command == "beta") {
    j["method"] = s.method;
    j["override_precondition"] = s.override_precondition;
  }
  if (s.command == "intervene") {
    j["allocate"] = s.allocate;
    j["budget"] = s.budget;
    j["cap"] = s.cap;
  }
  return j;
}

/// Reads a spec file. Keys mirror the CLI flags with underscores.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  try {
    s.command = j.at("command").get<std::string>();
    if (j.contains("network")) {
      const auto& nj = j["network"];
      NetworkSource& src = s.network;
      src.file = nj.value("file", std::string{});
      src.format = nj.value("format", std::string{});
      src.io_threshold = nj.value("io_threshold", 0.0);
      src.model = nj.value("model", std::string{});
      src.k = nj.value("k", std::size_t{0});
      src.p = nj.value("p", 0.0);
      src.m = nj.value("m", 0u);
      src.d = nj.value("d", 0u);
      src.depth = nj.value("depth", 0u);
      src.w = nj.value("w", 0u);
      src.dist = nj.value("dist", std::string{});
      if (nj.contains("graph_seed")) src.graph_seed = nj["graph_seed"].get<std::uint64_t>();
    }
    s.x = j.value("x", s.x);
    if (j.contains("y")) s.y = j["y"].get<double>();
    s.n = j.value("n", s.n);
    s.seed = j.value("seed", s.seed);
    if (j.contains("eps_grid")) {
      if (j["eps_grid"].is_string()) {
        s.eps_grid = parse_grid(j["eps_grid"].get<std::string>());
      } else {
        s.eps_grid = j["eps_grid"].get<std::vector<double>>();
      }
    }
    s.epsilon = j.value("epsilon", s.epsilon);
    s.trials = j.value("trials", s.trials);
    s.x_step = j.value("x_step", s.x_step);
    s.workers = j.value("workers", s.workers);
    s.out = j.value("out", s.out);
    s.json_out = j.value("json_out", s.json_out);
    s.arch = j.value("arch", s.arch);
    s.scope = j.value("scope", s.scope);
    s.max_tau = j.value("max_tau", s.max_tau);
    s.samples = j.value("samples", s.samples);
    s.method = j.value("method", s.method);
    s.override_precondition = j.value("override_precondition", s.override_precondition);
    s.allocate = j.value("allocate", s.allocate);
    s.budget = j.value("budget", s.budget);
    s.cap = j.value("cap", s.cap);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad spec file: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Commands

struct ExperimentResult {
  nlohmann::ordered_json summary;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

namespace detail {

/// Writes `body` to path, or to `fallback` when path is "-".
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, ExperimentResult& res, Fn&& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  body(f);
  res.outputs.push_back(path);
}

inline void cmd_generate(const ExperimentSpec& s, const NetworkFile& nf, std::ostream& data,
                         ExperimentResult& res) {
  emit(s.out, data, res, [&](std::ostream& o) { write_network_json(o, nf.network, nf.labels); });
}

inline void cmd_simulate(const ExperimentSpec& s, const NetworkFile& nf, std::ostream& data,
                         ExperimentResult& res) {
  const PercolationConfig cfg{s.x, s.y.value_or(1.0), s.n, s.seed};
  const auto batch = run_batch(nf.network, cfg, s.trials, s.workers);
  emit(s.out, data, res, [&](std::ostream& o) {
    CsvWriter csv(o, {"f", "count", "pmf"});
    const auto pmf = batch.pmf();
    for (std::size_t f = 0; f < batch.histogram.size(); ++f) csv.row(f, batch.histogram[f], pmf[f]);
  });
  res.summary["mean_failed"] = batch.mean_failed();
  res.summary["trials"] = batch.trials();
}

inline void cmd_resilience(const ExperimentSpec& s, const NetworkFile& nf, std::ostream& data,
                           ExperimentResult& res) {
  const auto curve = resilience_curve(nf.network, s.eps_grid, s.n, s.trials, s.x_step, s.seed,
                                      s.y.value_or(1.0), s.workers);
  emit(s.out, data, res, [&](std::ostream& o) {
    CsvWriter csv(o, {"epsilon", "r_hat", "stderr"});
    for (std::size_t i = 0; i < curve.epsilon.size(); ++i) {
      csv.row(curve.epsilon[i], curve.r_hat[i], curve.stderr_[i]);
    }
  });
  if (!s.json_out.empty()) {
    nlohmann::ordered_json j;
    j["epsilon"] = curve.epsilon;
    j["r_hat"] = curve.r_hat;
    j["stderr"] = curve.stderr_;
    j["auc"] = curve.auc;
    j["trials"] = curve.trials;
    j["x_step"] = curve.x_step;
    j["seed"] = curve.seed;
    j["n"] = curve.n;
    std::ofstream f(s.json_out, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + s.json_out);
    f << j.dump(1) << '\n';
    res.outputs.push_back(s.json_out);
  }
  res.summary["auc"] = curve.auc;
}

inline void cmd_bounds(const ExperimentSpec& s, std::ostream& data, ExperimentResult& res) {
  const auto& src = s.network;
  struct Row {
    double eps;
    BoundResult b;
  };
  std::vector<Row> rows;
  for (double eps : s.eps_grid) {
    BoundResult b;
    if (s.arch == "rdag") {
      b.regime = "rdag";
      b.lower = rdag_lb_x(src.k, src.p, eps, s.n);
    } else if (s.arch == "parallel") {
      ParallelScope scope;
      if (s.scope == "complex-only") scope = ParallelScope::kComplexOnly;
      else if (s.scope == "all-products") scope = ParallelScope::kAllProducts;
      else throw UsageError("scope must be complex-only or all-products");
      b = parallel_bounds(src.k, src.m, src.d, eps, s.n, scope);
    } else if (s.arch == "tree") {
      b = tree_bounds(src.m, src.depth, eps, s.n).bounds;
    } else if (s.arch == "trellis") {
      b = trellis_bounds(src.w, src.depth, src.p, eps, s.n);
    } else if (s.arch == "dag") {
      b.regime = "any-dag";
      b.lower = dag_resilience_lb(src.k, eps, s.n);
    } else if (s.arch == "gw") {
      const auto dist = parse_distribution(src.dist);
      const auto law = extinction_law_simulated(dist, s.samples, s.max_tau, s.seed);
      const auto g = gw_expected_bounds(dist.mean(), law, eps, s.n);
      b.regime = dist.describe();
      b.lower = g.lower;
      b.upper = g.upper;
    } else {
      throw UsageError("unknown architecture \"" + s.arch +
                       "\" (rdag, parallel, tree, trellis, gw, dag)");
    }
    rows.push_back({eps, b});
  }
  emit(s.out, data, res, [&](std::ostream& o) {
    CsvWriter csv(o, {"architecture", "regime", "epsilon", "lower", "upper", "lower_clamped",
                      "upper_clamped", "crossed"});
    for (const auto& r : rows) {
      csv.row(s.arch, r.b.regime, r.eps, r.b.lower, r.b.upper, r.b.lower_clamped, r.b.upper_clamped,
              r.b.crossed());
    }
  });
  res.summary["rows"] = rows.size();
}

inline void cmd_beta(const ExperimentSpec& s, const NetworkFile& nf, std::ostream& data,
                     ExperimentResult& res) {
  const auto& net = nf.network;
  const double y = s.y.value_or(1.0);
  BetaVector bv;
  if (s.method == "auto") bv = compute_beta(net, s.x, y, s.n);
  else if (s.method == "dag") bv = dag_beta(net, s.x, y, s.n);
  else if (s.method == "fixed-point") bv = fixed_point_beta(net, s.x, y, s.n, 1e-12, 1'000'000, s.override_precondition);
  else if (s.method == "katz") bv = katz_beta(net, s.x, y, s.n);
  else throw UsageError("method must be auto, dag, fixed-point or katz");
  if (bv.precondition_overridden) {
    res.warnings.push_back("y > 1/Delta: fixed point computed on request, not guaranteed to solve the LP");
  }
  if (!bv.equals_lp) res.warnings.push_back("x >= (1 - y Delta)^(1/n): Katz vector may exceed the LP optimum");
  const auto ranking = rank_by_beta(bv.beta);
  std::vector<std::size_t> rank(net.node_count());
  for (std::size_t r = 0; r < ranking.size(); ++r) rank[ranking[r].node] = r + 1;
  emit(s.out, data, res, [&](std::ostream& o) {
    if (nf.labels.empty()) {
      CsvWriter csv(o, {"product", "beta", "rank"});
      for (NodeId v = 0; v < net.node_count(); ++v) csv.row(v + 1, bv.beta[v], rank[v]);
    } else {
      CsvWriter csv(o, {"product", "label", "beta", "rank"});
      for (NodeId v = 0; v < net.node_count(); ++v) csv.row(v + 1, nf.labels[v], bv.beta[v], rank[v]);
    }
  });
  res.summary["method"] = to_string(bv.method);
  res.summary["total"] = bv.total();
  res.summary["iterations"] = bv.iterations;
}

inline void cmd_intervene(const ExperimentSpec& s, const NetworkFile& nf, std::ostream& data,
                          ExperimentResult& res) {
  const auto& net = nf.network;
  const double y = s.y.value_or(default_intervention_y(net));
  const auto curve = intervention_curve(net, y, s.epsilon, s.n);
  const double xn = std::pow(s.x, static_cast<double>(s.n));
  emit(s.out, data, res, [&](std::ostream& o) {
    CsvWriter csv(o, {"T", "T_over_K", "objective", "resilience_lb"});
    for (const auto& p : curve) csv.row(p.budget, p.fraction, xn * p.weight, p.resilience_lb);
  });
  const std::size_t dmax = std::max(net.max_out_degree(), net.max_in_degree());
  if (!(y * static_cast<double>(dmax) < 1.0)) {
    res.warnings.push_back("y >= 1/max(Delta, Delta_R): top-T protection is not guaranteed optimal");
  }
  res.summary["y"] = y;
  if (s.allocate) {
    const std::vector<unsigned> caps(net.node_count(), s.cap);
    const auto a = supplier_allocation(net, y, caps, s.budget, s.x);
    std::vector<unsigned> extra = a.extra;
    res.summary["allocation"] = {{"budget", a.budget}, {"extra", extra}, {"objective", a.objective}};
  }
}

}  // namespace detail

/// Runs one command. Tabular data goes to `--out` (or `data` when it is
/// "-"); the returned summary feeds the JSON envelope.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream& data) {
  ExperimentResult res;
  if (spec.n == 0) throw ParameterError("supplier count n must be positive");
  if (spec.command == "bounds") {
    detail::cmd_bounds(spec, data, res);
    return res;
  }
  static const char* const kCommands[] = {"generate", "simulate", "resilience", "beta", "intervene"};
  bool known = false;
  for (const char* c : kCommands) known = known || spec.command == c;
  if (!known) throw UsageError("unknown command \"" + spec.command + "\"");

  const auto nf = build_network(spec.network, spec.n, spec.seed);
  res.summary["k"] = nf.network.node_count();
  res.summary["edges"] = nf.network.edge_count();
  res.summary["acyclic"] = nf.network.acyclic();
  if (nf.duplicate_edges > 0) {
    res.warnings.push_back(std::to_string(nf.duplicate_edges) + " duplicate edge(s) ignored");
  }
  if (spec.command == "generate") detail::cmd_generate(spec, nf, data, res);
  else if (spec.command == "simulate") detail::cmd_simulate(spec, nf, data, res);
  else if (spec.command == "resilience") detail::cmd_resilience(spec, nf, data, res);
  else if (spec.command == "beta") detail::cmd_beta(spec, nf, data, res);
  else detail::cmd_intervene(spec, nf, data, res);
  return res;
}

/// Result envelope: version, spec echo, outputs, summary, warnings, wall time.
inline nlohmann::ordered_json make_envelope(const ExperimentSpec& spec, const ExperimentResult& res,
                                            double wall_seconds, int exit_code = 0,
                                            const std::string& error = {}) {
  nlohmann::ordered_json j;
  j["tool"] = "supplynet";
  j["version"] = kVersion;
  j["status"] = exit_code == 0 ? "ok" : "error";
  j["exit_code"] = exit_code;
  if (!error.empty()) j["error"] = error;
  j["spec"] = to_json(spec);
  j["outputs"] = res.outputs;
  j["summary"] = res.summary.is_null() ? nlohmann::ordered_json::object() : res.summary;
  j["warnings"] = res.warnings;
  j["wall_time_s"] = wall_seconds;
  return j;
}

}  // namespace supplynet
