// spinconc: entanglement-concentration protocol runner and analysis CLI.
//
// Subcommands: round, iterate, yield, monte-carlo, ghz, curve.
// Output formats: table (human), csv, json (stable, byte-deterministic for
// identical arguments including --seed).

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinconc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  double alpha = 0.0;
  int max_rounds = 10;
  std::int64_t trials = 100000;
  std::uint64_t seed = 42;
  int parties = 3;
  int points = 99;
  std::string format = "table";
  std::string output;
};

std::string fmt6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

int exit_code_for(spinconc_status status) {
  switch (status) {
    case SPINCONC_OK:
      return kExitOk;
    case SPINCONC_ERR_DOMAIN:
    case SPINCONC_ERR_NORMALIZATION:
    case SPINCONC_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    case SPINCONC_ERR_IO:
      return kExitIo;
    default:
      return 1;
  }
}

// Returns nonzero exit code on failure, 0 otherwise.
int fail(spinconc_status status) {
  std::fprintf(stderr, "spinconc: %s: %s\n", spinconc_status_name(status),
               spinconc_last_error());
  return exit_code_for(status);
}

int emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::fputs(text.c_str(), stdout);
    return kExitOk;
  }
  std::ofstream out(opt.output, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "spinconc: cannot open output file '%s'\n", opt.output.c_str());
    return kExitIo;
  }
  out << text;
  out.flush();
  if (!out) {
    std::fprintf(stderr, "spinconc: failed writing output file '%s'\n", opt.output.c_str());
    return kExitIo;
  }
  return kExitOk;
}

int check_alpha(const Options& opt) {
  if (opt.alpha > 0.0 && opt.alpha < 1.0) return kExitOk;
  std::fprintf(stderr, "spinconc: --alpha must be strictly inside (0, 1)\n");
  return kExitUsage;
}

// ---------------------------------------------------------------------------
// round / ghz

std::string round_table(const spinconc_round_result& r, int parties) {
  std::string s;
  if (parties > 0) s += "parties             " + std::to_string(parties) + "\n";
  s += std::string("outcome             ") + (r.success ? "success" : "failure") + "\n";
  s += "p_success           " + fmt6(r.success_probability) + "\n";
  s += "branch_probability  " + fmt6(r.branch_probability) + "\n";
  if (r.success) {
    if (parties > 0) s += "fidelity            " + fmt6(r.fidelity) + "\n";
  } else {
    s += "next_alpha          " + fmt6(r.next_alpha) + "\n";
    s += "next_beta           " + fmt6(r.next_beta) + "\n";
  }
  s += std::string("correction          ") + (r.phase_flip_applied ? "phase_flip" : "none") + "\n";
  return s;
}

std::string round_csv(const spinconc_round_result& r, int parties) {
  std::string s;
  if (parties > 0) {
    s = "parties,outcome,p_success,branch_probability,fidelity,next_alpha,next_beta,correction\n";
    s += std::to_string(parties) + ",";
  } else {
    s = "outcome,p_success,branch_probability,next_alpha,next_beta,correction\n";
  }
  s += std::string(r.success ? "success" : "failure") + "," + fmt6(r.success_probability) +
       "," + fmt6(r.branch_probability) + ",";
  if (parties > 0) s += (r.success ? fmt6(r.fidelity) : "") + ",";
  if (r.success) {
    s += ",,";
  } else {
    s += fmt6(r.next_alpha) + "," + fmt6(r.next_beta) + ",";
  }
  s += std::string(r.phase_flip_applied ? "phase_flip" : "none") + "\n";
  return s;
}

std::string round_json(const spinconc_round_result& r, int parties) {
  std::string s = "{";
  if (parties > 0) s += "\"parties\":" + std::to_string(parties) + ",";
  s += std::string("\"outcome\":\"") + (r.success ? "success" : "failure") + "\",";
  s += "\"p_success\":" + fmt6(r.success_probability) + ",";
  s += "\"branch_probability\":" + fmt6(r.branch_probability) + ",";
  if (r.success) {
    if (parties > 0) s += "\"fidelity\":" + fmt6(r.fidelity) + ",";
  } else {
    s += "\"next_alpha\":" + fmt6(r.next_alpha) + ",";
    s += "\"next_beta\":" + fmt6(r.next_beta) + ",";
  }
  s += std::string("\"correction\":\"") + (r.phase_flip_applied ? "phase_flip" : "none") +
       "\"}\n";
  return s;
}

int cmd_round_like(const Options& opt, bool ghz) {
  if (int code = check_alpha(opt)) return code;

  spinconc_rng* rng = nullptr;
  if (spinconc_status st = spinconc_rng_new(opt.seed, &rng)) return fail(st);

  spinconc_round_result result{};
  const spinconc_status st =
      ghz ? spinconc_run_ghz_round(opt.alpha, opt.parties, 0, rng, &result)
          : spinconc_run_round(opt.alpha, rng, &result);
  spinconc_rng_free(rng);
  if (st != SPINCONC_OK) return fail(st);

  const int parties = ghz ? opt.parties : 0;
  std::string text;
  if (opt.format == "csv") {
    text = round_csv(result, parties);
  } else if (opt.format == "json") {
    text = round_json(result, parties);
  } else {
    text = round_table(result, parties);
  }
  return emit(opt, text);
}

// ---------------------------------------------------------------------------
// iterate / yield

struct YieldRows {
  std::vector<double> s;
  std::vector<double> p;
  std::vector<double> cumulative;
  double total = 0.0;
  double baseline = 0.0;
};

int fetch_yield(double s0, int max_rounds, YieldRows& rows, spinconc_status& status) {
  spinconc_yield_report* report = nullptr;
  status = spinconc_yield_compute(s0, max_rounds, &report);
  if (status != SPINCONC_OK) return 1;
  const int n = spinconc_yield_rounds(report);
  for (int k = 1; k <= n; ++k) {
    double s_k = 0.0, p_k = 0.0, cumulative = 0.0;
    spinconc_yield_row(report, k, &s_k, &p_k, &cumulative);
    rows.s.push_back(s_k);
    rows.p.push_back(p_k);
    rows.cumulative.push_back(cumulative);
  }
  rows.total = spinconc_yield_total(report);
  rows.baseline = spinconc_yield_baseline(report);
  spinconc_yield_free(report);
  return 0;
}

int cmd_iterate(const Options& opt) {
  if (int code = check_alpha(opt)) return code;
  const double s0 = opt.alpha * opt.alpha;

  YieldRows rows;
  spinconc_status st = SPINCONC_OK;
  if (fetch_yield(s0, opt.max_rounds, rows, st)) return fail(st);

  std::string text;
  if (opt.format == "csv") {
    text = "k,s_k,p_k\n";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      text += std::to_string(i + 1) + "," + fmt6(rows.s[i]) + "," + fmt6(rows.p[i]) + "\n";
    }
  } else if (opt.format == "json") {
    text = "{\"s0\":" + fmt6(s0) + ",\"max_rounds\":" + std::to_string(opt.max_rounds) +
           ",\"rows\":[";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      if (i != 0) text += ",";
      text += "{\"k\":" + std::to_string(i + 1) + ",\"s_k\":" + fmt6(rows.s[i]) +
              ",\"p_k\":" + fmt6(rows.p[i]) + "}";
    }
    text += "]}\n";
  } else {
    char line[128];
    text = "  k      s_k      p_k\n";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      std::snprintf(line, sizeof(line), "%3zu %8.6f %8.6f\n", i + 1, rows.s[i], rows.p[i]);
      text += line;
    }
  }
  return emit(opt, text);
}

int cmd_yield(const Options& opt) {
  if (int code = check_alpha(opt)) return code;
  const double s0 = opt.alpha * opt.alpha;

  YieldRows rows;
  spinconc_status st = SPINCONC_OK;
  if (fetch_yield(s0, opt.max_rounds, rows, st)) return fail(st);

  std::string text;
  if (opt.format == "csv") {
    text = "s0,max_rounds,k,s_k,p_k,cumulative_yield,total_yield,baseline_yield\n";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      text += fmt6(s0) + "," + std::to_string(opt.max_rounds) + "," + std::to_string(i + 1) +
              "," + fmt6(rows.s[i]) + "," + fmt6(rows.p[i]) + "," + fmt6(rows.cumulative[i]) +
              "," + fmt6(rows.total) + "," + fmt6(rows.baseline) + "\n";
    }
  } else if (opt.format == "json") {
    text = "{\"s0\":" + fmt6(s0) + ",\"max_rounds\":" + std::to_string(opt.max_rounds) +
           ",\"per_round\":[";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      if (i != 0) text += ",";
      text += "{\"k\":" + std::to_string(i + 1) + ",\"s_k\":" + fmt6(rows.s[i]) +
              ",\"p_k\":" + fmt6(rows.p[i]) + ",\"cumulative_yield\":" +
              fmt6(rows.cumulative[i]) + "}";
    }
    text += "],\"total_yield\":" + fmt6(rows.total) +
            ",\"baseline_yield\":" + fmt6(rows.baseline) + "}\n";
  } else {
    char line[160];
    text = "  k      s_k      p_k cumulative_yield\n";
    for (std::size_t i = 0; i < rows.s.size(); ++i) {
      std::snprintf(line, sizeof(line), "%3zu %8.6f %8.6f %16.6f\n", i + 1, rows.s[i],
                    rows.p[i], rows.cumulative[i]);
      text += line;
    }
    text += "total_yield     " + fmt6(rows.total) + "\n";
    text += "baseline_yield  " + fmt6(rows.baseline) + "\n";
  }
  return emit(opt, text);
}

// ---------------------------------------------------------------------------
// curve

int cmd_curve(const Options& opt) {
  if (opt.points < 1) {
    std::fprintf(stderr, "spinconc: --points must be positive\n");
    return kExitUsage;
  }

  std::vector<double> s0s, p1s, baselines, totals;
  for (int i = 1; i <= opt.points; ++i) {
    const double s0 = static_cast<double>(i) / (opt.points + 1);
    double p1 = 0.0;
    if (spinconc_status st = spinconc_success_probability(s0, &p1)) return fail(st);
    YieldRows rows;
    spinconc_status st = SPINCONC_OK;
    if (fetch_yield(s0, opt.max_rounds, rows, st)) return fail(st);
    s0s.push_back(s0);
    p1s.push_back(p1);
    baselines.push_back(rows.baseline);
    totals.push_back(rows.total);
  }

  std::string text;
  if (opt.format == "csv") {
    text = "s0,p1,baseline_yield,total_yield\n";
    for (std::size_t i = 0; i < s0s.size(); ++i) {
      text += fmt6(s0s[i]) + "," + fmt6(p1s[i]) + "," + fmt6(baselines[i]) + "," +
              fmt6(totals[i]) + "\n";
    }
  } else if (opt.format == "json") {
    text = "{\"max_rounds\":" + std::to_string(opt.max_rounds) + ",\"points\":[";
    for (std::size_t i = 0; i < s0s.size(); ++i) {
      if (i != 0) text += ",";
      text += "{\"s0\":" + fmt6(s0s[i]) + ",\"p1\":" + fmt6(p1s[i]) +
              ",\"baseline_yield\":" + fmt6(baselines[i]) +
              ",\"total_yield\":" + fmt6(totals[i]) + "}";
    }
    text += "]}\n";
  } else {
    char line[160];
    text = "      s0       p1 baseline_yield total_yield\n";
    for (std::size_t i = 0; i < s0s.size(); ++i) {
      std::snprintf(line, sizeof(line), "%8.6f %8.6f %14.6f %11.6f\n", s0s[i], p1s[i],
                    baselines[i], totals[i]);
      text += line;
    }
  }
  return emit(opt, text);
}

// ---------------------------------------------------------------------------
// monte-carlo

int cmd_monte_carlo(const Options& opt) {
  if (int code = check_alpha(opt)) return code;
  const double s0 = opt.alpha * opt.alpha;

  spinconc_mc_report* report = nullptr;
  if (spinconc_status st =
          spinconc_monte_carlo(s0, opt.trials, opt.max_rounds, opt.seed, &report)) {
    return fail(st);
  }
  const int rounds = spinconc_mc_rounds(report);
  std::vector<std::int64_t> counts;
  for (int k = 1; k <= rounds; ++k) counts.push_back(spinconc_mc_successes_at(report, k));
  const std::int64_t unresolved = spinconc_mc_unresolved(report);
  const double estimated = spinconc_mc_estimated_yield(report);
  const double stderr_yield = spinconc_mc_standard_error(report);
  spinconc_mc_free(report);

  const std::string seed_str = std::to_string(opt.seed);
  const std::string trials_str = std::to_string(opt.trials);

  std::string text;
  if (opt.format == "csv") {
    text = "trials,seed,max_rounds,unresolved,estimated_yield,standard_error,k,successes\n";
    for (int k = 1; k <= rounds; ++k) {
      text += trials_str + "," + seed_str + "," + std::to_string(rounds) + "," +
              std::to_string(unresolved) + "," + fmt6(estimated) + "," + fmt6(stderr_yield) +
              "," + std::to_string(k) + "," +
              std::to_string(counts[static_cast<std::size_t>(k - 1)]) + "\n";
    }
  } else if (opt.format == "json") {
    text = "{\"trials\":" + trials_str + ",\"seed\":" + seed_str +
           ",\"max_rounds\":" + std::to_string(rounds) + ",\"success_counts_per_round\":[";
    for (int k = 1; k <= rounds; ++k) {
      if (k != 1) text += ",";
      text += std::to_string(counts[static_cast<std::size_t>(k - 1)]);
    }
    text += "],\"unresolved\":" + std::to_string(unresolved) +
            ",\"estimated_yield\":" + fmt6(estimated) +
            ",\"standard_error\":" + fmt6(stderr_yield) + "}\n";
  } else {
    text = "trials           " + trials_str + "\n";
    text += "seed             " + seed_str + "\n";
    text += "max_rounds       " + std::to_string(rounds) + "\n";
    text += "unresolved       " + std::to_string(unresolved) + "\n";
    text += "estimated_yield  " + fmt6(estimated) + "\n";
    text += "standard_error   " + fmt6(stderr_yield) + "\n";
    char line[64];
    text += "  k successes\n";
    for (int k = 1; k <= rounds; ++k) {
      std::snprintf(line, sizeof(line), "%3d %9" PRId64 "\n", k,
                    counts[static_cast<std::size_t>(k - 1)]);
      text += line;
    }
  }
  return emit(opt, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement concentration for electron spin qubits: exact protocol "
               "rounds, yield analytics and Monte Carlo sampling"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::string> formats{"table", "csv", "json"};

  auto add_common = [&](CLI::App* cmd, bool with_alpha) {
    if (with_alpha) {
      cmd->add_option("--alpha", opt.alpha, "source coefficient alpha, strictly in (0, 1)")
          ->required();
    }
    cmd->add_option("--format", opt.format, "output format: table, csv or json")
        ->check(CLI::IsMember(formats));
    cmd->add_option("--output", opt.output, "write the report to this file instead of stdout");
  };

  CLI::App* round = app.add_subcommand("round", "run one seeded concentration round");
  add_common(round, true);
  round->add_option("--seed", opt.seed, "random seed");

  CLI::App* iterate = app.add_subcommand("iterate", "coefficient recursion table (k, s_k, p_k)");
  add_common(iterate, true);
  iterate->add_option("--max-rounds", opt.max_rounds, "number of rounds")->check(CLI::PositiveNumber);

  CLI::App* yield = app.add_subcommand("yield", "iterated yield vs the single-round baseline");
  add_common(yield, true);
  yield->add_option("--max-rounds", opt.max_rounds, "number of rounds")->check(CLI::PositiveNumber);

  CLI::App* mc = app.add_subcommand("monte-carlo", "seeded Monte Carlo over full protocol trajectories");
  add_common(mc, true);
  mc->add_option("--trials", opt.trials, "number of trajectories")->check(CLI::PositiveNumber);
  mc->add_option("--max-rounds", opt.max_rounds, "rounds per trajectory")->check(CLI::PositiveNumber);
  mc->add_option("--seed", opt.seed, "random seed");

  CLI::App* ghz = app.add_subcommand("ghz", "run one seeded n-party GHZ concentration round");
  add_common(ghz, true);
  ghz->add_option("--parties", opt.parties, "number of parties (>= 2)")->check(CLI::Range(2, 64));
  ghz->add_option("--seed", opt.seed, "random seed");

  CLI::App* curve = app.add_subcommand("curve", "sweep s0 = alpha^2 over (0, 1)");
  add_common(curve, false);
  curve->add_option("--points", opt.points, "number of sweep points")->check(CLI::PositiveNumber);
  curve->add_option("--max-rounds", opt.max_rounds, "rounds for total_yield")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  if (round->parsed()) return cmd_round_like(opt, false);
  if (iterate->parsed()) return cmd_iterate(opt);
  if (yield->parsed()) return cmd_yield(opt);
  if (mc->parsed()) return cmd_monte_carlo(opt);
  if (ghz->parsed()) return cmd_round_like(opt, true);
  if (curve->parsed()) return cmd_curve(opt);
  return kExitUsage;
}
