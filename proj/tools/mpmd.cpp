// Experiment runner for the matching-with-delays laboratory.
//
// Subcommands:
//   gen      write an instance file (uniform / simultaneous / adversarial-line)
//   run      execute the online algorithm: trace CSV + summary JSON
//   analyze  run the full checker pipeline and emit the report JSON
//   sweep    batch (size, seed) grid into a CSV of alg/opt ratios
//
// Exit codes: 0 ok, 2 input error, 3 capacity (no exact optimum available),
// 4 checker violation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpmd/checkers.hpp"
#include "mpmd/engine.hpp"
#include "mpmd/instance.hpp"
#include "mpmd/offline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitViolation = 4;

int dp_cap_from_env() {
  if (const char* env = std::getenv("MPMD_DP_CAP")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 2) return cap;
    } catch (...) {
    }
    throw mpmd::InputError("MPMD_DP_CAP must be an integer >= 2");
  }
  return mpmd::kDefaultDpCap;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw mpmd::InputError("cannot open \"" + path + "\" for writing");
  out << text;
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path)
    write_text(*path, text);
  else
    std::cout << text;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

mpmd::MetricKind parse_space(const std::string& s) {
  if (s == "line") return mpmd::MetricKind::Line;
  if (s == "euclidean") return mpmd::MetricKind::Euclidean;
  if (s == "matrix") return mpmd::MetricKind::Matrix;
  throw mpmd::InputError("unknown space kind \"" + s + "\" (line|euclidean|matrix)");
}

struct GenConfig {
  std::string family;
  std::string space = "line";
  int pairs = 1;
  int level = 1;
  int dim = 2;
  std::uint64_t seed = 0;
  double extent = 100.0;
  double horizon = 100.0;
  double t0 = 0.0;
  double jitter = 0.0;
  std::string out;
};

mpmd::Instance build_instance(const GenConfig& g) {
  if (g.family == "uniform")
    return mpmd::generate_uniform(g.pairs, parse_space(g.space), g.extent, g.horizon, g.seed,
                                  g.dim, g.jitter);
  if (g.family == "simultaneous") {
    std::mt19937_64 rng(g.seed);
    std::vector<double> coords(2 * static_cast<std::size_t>(g.pairs));
    for (double& c : coords) c = g.extent * mpmd::detail::u01(rng);
    return mpmd::generate_simultaneous(std::move(coords), g.t0, g.jitter, g.seed);
  }
  if (g.family == "adversarial-line") return mpmd::generate_greedy_adversarial_line(g.level, g.seed);
  throw mpmd::InputError("unknown family \"" + g.family +
                         "\" (uniform|simultaneous|adversarial-line)");
}

struct SweepRow {
  int m = 0;
  std::uint64_t seed = 0;
  double alg = 0.0;
  double opt = 0.0;
};

// One sweep cell: generate, run the online algorithm, solve for the optimum.
SweepRow sweep_cell(const GenConfig& g, const mpmd::AlgorithmParams& params, int dp_cap) {
  const mpmd::Instance inst = build_instance(g);
  SweepRow row;
  row.m = inst.pairs();
  row.seed = g.seed;
  row.alg = mpmd::run_online(inst, params).matching.total_cost();
  if (g.family == "adversarial-line")
    row.opt = mpmd::line_opt_matching(inst).total_cost();
  else
    row.opt = mpmd::opt_matching(inst, dp_cap).total_cost();
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-cost perfect matching with delays: simulation laboratory"};
  app.require_subcommand(1);

  GenConfig gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate an instance file");
  cmd_gen->add_option("--family", gen.family, "uniform|simultaneous|adversarial-line")
      ->required();
  cmd_gen->add_option("--pairs", gen.pairs, "number of request pairs m");
  cmd_gen->add_option("--level", gen.level, "adversarial-line level k (2^(k+1) requests)");
  cmd_gen->add_option("--space", gen.space, "line|euclidean|matrix (uniform family)");
  cmd_gen->add_option("--dim", gen.dim, "euclidean dimension");
  cmd_gen->add_option("--seed", gen.seed, "generator seed");
  cmd_gen->add_option("--extent", gen.extent, "coordinate range");
  cmd_gen->add_option("--horizon", gen.horizon, "arrival time range (uniform family)");
  cmd_gen->add_option("--t0", gen.t0, "common arrival time (simultaneous family)");
  cmd_gen->add_option("--jitter", gen.jitter, "seeded positional jitter to break distance ties");
  cmd_gen->add_option("--out", gen.out, "output instance path")->required();

  std::string run_instance;
  double alpha = 0.5, beta = 2.0;
  std::string tie = "low";
  std::optional<std::string> run_trace_out, run_out, run_matching_out;
  bool run_with_bound = false;
  CLI::App* cmd_run = app.add_subcommand("run", "run the online algorithm");
  cmd_run->add_option("--instance", run_instance, "instance JSON path")->required();
  cmd_run->add_option("--alpha", alpha, "budget growth rate (> 0)");
  cmd_run->add_option("--beta", beta, "budget balance factor (> 1)");
  cmd_run->add_option("--tie-break", tie, "low|high: candidate order at equal readiness");
  cmd_run->add_option("--trace-out", run_trace_out, "trace CSV path");
  cmd_run->add_option("--matching-out", run_matching_out, "matching JSON path");
  cmd_run->add_flag("--with-bound", run_with_bound,
                    "add an offline bound to the summary (exact within the DP cap, "
                    "greedy upper bound above it)");
  cmd_run->add_option("--out", run_out, "summary JSON path (default stdout)");

  std::string ana_instance;
  double ana_alpha = 0.5, ana_beta = 2.0, ana_tol = mpmd::kCheckerTol;
  int ana_samples = 64;
  std::string ana_tie = "low";
  std::optional<std::string> ana_out, ana_opt_out;
  CLI::App* cmd_analyze = app.add_subcommand("analyze", "run the full checker pipeline");
  cmd_analyze->add_option("--instance", ana_instance, "instance JSON path")->required();
  cmd_analyze->add_option("--alpha", ana_alpha, "budget growth rate (> 0)");
  cmd_analyze->add_option("--beta", ana_beta, "budget balance factor (> 1)");
  cmd_analyze->add_option("--tie-break", ana_tie, "low|high");
  cmd_analyze->add_option("--tol", ana_tol, "checker tolerance (relative)");
  cmd_analyze->add_option("--samples", ana_samples, "sampled times for the trichotomy check");
  cmd_analyze->add_option("--opt-out", ana_opt_out, "write the optimum matching JSON here");
  cmd_analyze->add_option("--out", ana_out, "report JSON path (default stdout)");

  GenConfig sweep;
  std::vector<int> sweep_sizes;
  std::vector<std::uint64_t> sweep_seeds = {0};
  double sweep_alpha = 0.5, sweep_beta = 2.0;
  std::optional<std::string> sweep_out;
  int sweep_jobs = 1;
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "batch runs over sizes and seeds");
  cmd_sweep->add_option("--family", sweep.family, "uniform|simultaneous|adversarial-line")
      ->required();
  cmd_sweep->add_option("--sizes", sweep_sizes, "pairs (or levels for adversarial-line)")
      ->delimiter(',');
  cmd_sweep->add_option("--seeds", sweep_seeds, "seeds")->delimiter(',');
  cmd_sweep->add_option("--space", sweep.space, "line|euclidean|matrix (uniform family)");
  cmd_sweep->add_option("--dim", sweep.dim, "euclidean dimension");
  cmd_sweep->add_option("--extent", sweep.extent, "coordinate range");
  cmd_sweep->add_option("--horizon", sweep.horizon, "arrival time range");
  cmd_sweep->add_option("--t0", sweep.t0, "common arrival time (simultaneous family)");
  cmd_sweep->add_option("--jitter", sweep.jitter, "positional jitter");
  cmd_sweep->add_option("--alpha", sweep_alpha, "budget growth rate");
  cmd_sweep->add_option("--beta", sweep_beta, "budget balance factor");
  cmd_sweep->add_option("--jobs", sweep_jobs, "parallel workers (rows stay ordered)");
  cmd_sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const int dp_cap = dp_cap_from_env();

    if (cmd_gen->parsed()) {
      const mpmd::Instance inst = build_instance(gen);
      mpmd::save_instance(inst, gen.out);
      return kExitOk;
    }

    if (cmd_run->parsed()) {
      mpmd::AlgorithmParams params{alpha, beta};
      if (tie == "high")
        params.tie_break = mpmd::TieBreak::HighIdFirst;
      else if (tie != "low")
        throw mpmd::InputError("--tie-break must be low or high");
      params.validate();
      const mpmd::Instance inst = mpmd::load_instance(run_instance);
      const mpmd::RunResult run = mpmd::run_online(inst, params);
      if (run_trace_out) {
        std::ofstream trace(*run_trace_out);
        if (!trace) throw mpmd::InputError("cannot open \"" + *run_trace_out + "\" for writing");
        mpmd::write_trace_csv(run, trace);
      }
      if (run_matching_out)
        write_text(*run_matching_out, mpmd::matching_to_json(run.matching).dump(2) + "\n");
      nlohmann::ordered_json summary;
      summary["alg_total"] = run.matching.total_cost();
      summary["m"] = inst.pairs();
      summary["params"] = {{"alpha", params.alpha},
                           {"beta", params.beta},
                           {"tie_break", mpmd::to_string(params.tie_break)}};
      if (run_with_bound) {
        // Exact optimum at desk scale; beyond the cap only a greedy upper
        // bound is available and it is labeled as such.
        nlohmann::ordered_json bound;
        try {
          bound["value"] = mpmd::opt_matching(inst, dp_cap).total_cost();
          bound["kind"] = "exact-dp";
          bound["optimal"] = true;
        } catch (const mpmd::CapacityError&) {
          bound["value"] = mpmd::greedy_matching(inst).total_cost();
          bound["kind"] = "greedy-upper-bound";
          bound["optimal"] = false;
        }
        summary["offline_bound"] = bound;
      }
      emit(run_out, summary.dump(2) + "\n");
      return kExitOk;
    }

    if (cmd_analyze->parsed()) {
      mpmd::AlgorithmParams params{ana_alpha, ana_beta};
      if (ana_tie == "high")
        params.tie_break = mpmd::TieBreak::HighIdFirst;
      else if (ana_tie != "low")
        throw mpmd::InputError("--tie-break must be low or high");
      params.validate();
      const mpmd::Instance inst = mpmd::load_instance(ana_instance);
      mpmd::CompetitiveReport report;
      try {
        report = mpmd::competitive_report(inst, params, ana_tol, dp_cap, ana_samples);
      } catch (const mpmd::CapacityError& e) {
        std::cerr << "OPT unavailable: " << e.what() << "\n";
        return kExitCapacity;
      }
      if (ana_opt_out)
        write_text(*ana_opt_out, mpmd::matching_to_json(report.opt).dump(2) + "\n");
      emit(ana_out, mpmd::report_to_json(report).dump(2) + "\n");
      if (!report.all_ok()) {
        std::cerr << "checker violation: see report\n";
        return kExitViolation;
      }
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      const mpmd::AlgorithmParams params{sweep_alpha, sweep_beta};
      params.validate();
      std::vector<GenConfig> cells;
      for (int size : sweep_sizes)
        for (std::uint64_t seed : sweep_seeds) {
          GenConfig g = sweep;
          g.pairs = size;
          g.level = size;
          g.seed = seed;
          cells.push_back(g);
        }
      std::vector<SweepRow> rows(cells.size());
      if (sweep_jobs > 1) {
        std::vector<std::future<SweepRow>> futures;
        futures.reserve(cells.size());
        for (const GenConfig& g : cells)
          futures.push_back(std::async(std::launch::async,
                                       [&, g] { return sweep_cell(g, params, dp_cap); }));
        for (std::size_t k = 0; k < futures.size(); ++k) rows[k] = futures[k].get();
      } else {
        for (std::size_t k = 0; k < cells.size(); ++k)
          rows[k] = sweep_cell(cells[k], params, dp_cap);
      }
      std::string csv = "m,seed,alg,opt,ratio\n";
      for (const SweepRow& r : rows) {
        const double ratio = r.opt > 0.0 ? r.alg / r.opt : 1.0;
        csv += std::to_string(r.m) + "," + std::to_string(r.seed) + "," + fmt_g(r.alg) + "," +
               fmt_g(r.opt) + "," + fmt_g(ratio) + "\n";
      }
      emit(sweep_out, csv);
      return kExitOk;
    }
  } catch (const mpmd::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const mpmd::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
