// Command-line front end. All computation lives behind the C API of the
// shared library; this file only maps flags onto job specifications and
// prints the rendered report.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crw.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitValidation = 2;

struct CommonArgs {
  std::string chain_json;
  std::string chain_path;
  int A = 1;
  int B = 1;
  std::string format = "text";
};

void add_chain_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--chain-json", args.chain_json, "chain specification as inline JSON");
  cmd->add_option("--chain", args.chain_path,
                  "chain specification from a file (@path or path)");
}

void add_barrier_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-A", args.A, "upper barrier (dollars)")->required();
  cmd->add_option("-B", args.B, "lower barrier magnitude (dollars)")->required();
}

void add_format_flag(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--format", args.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
}

// Returns the chain JSON text, reading from a file when --chain was used.
std::string resolve_chain(const CommonArgs& args) {
  if (args.chain_json.empty() == args.chain_path.empty()) {
    std::fprintf(stderr, "error: provide exactly one of --chain-json or --chain\n");
    std::exit(kExitValidation);
  }
  if (!args.chain_json.empty()) return args.chain_json;
  std::string path = args.chain_path;
  if (!path.empty() && path[0] == '@') path.erase(0, 1);
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot read chain file '%s'\n", path.c_str());
    std::exit(kExitValidation);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_chain_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    // Hand a non-object placeholder to the core so the error report stays
    // uniform and machine-readable.
    return json{{"malformed", text}};
  }
  return doc;
}

int run_and_print(const json& spec, const std::string& format) {
  char* report = nullptr;
  crw_run_job(spec.dump().c_str(), &report);
  if (!report) {
    std::fprintf(stderr, "error: %s\n", crw_last_error());
    return kExitValidation;
  }
  char* rendered = nullptr;
  if (crw_render_report(report, format.c_str(), &rendered) != CRW_OK || !rendered) {
    std::fprintf(stderr, "error: %s\n", crw_last_error());
    crw_string_free(report);
    return kExitValidation;
  }
  std::fputs(rendered, stdout);
  const int code = crw_report_exit_code(report);
  crw_string_free(rendered);
  crw_string_free(report);
  return code;
}

std::vector<std::string> split_patterns(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream stream(csv);
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ruin probabilities for correlated random walks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", crw_version());

  CommonArgs closed, solve, orc, sim, verify;
  CommonArgs pattern_common;

  auto* cmd_closed = app.add_subcommand("closed-form", "evaluate the closed-form answers");
  add_chain_flags(cmd_closed, closed);
  add_barrier_flags(cmd_closed, closed);
  add_format_flag(cmd_closed, closed);

  auto* cmd_solve = app.add_subcommand("solve", "martingale solver plus oracle E(tau)");
  add_chain_flags(cmd_solve, solve);
  add_barrier_flags(cmd_solve, solve);
  add_format_flag(cmd_solve, solve);

  long horizon = -1;
  auto* cmd_oracle = app.add_subcommand("oracle", "exact first-step analysis");
  add_chain_flags(cmd_oracle, orc);
  add_barrier_flags(cmd_oracle, orc);
  add_format_flag(cmd_oracle, orc);
  cmd_oracle->add_option("--horizon", horizon, "also bracket alpha by path enumeration");

  std::uint64_t paths = 100000, seed = 1, step_cap = 1000000;
  std::uint32_t partitions = 1;
  auto* cmd_sim = app.add_subcommand("simulate", "seeded Monte Carlo");
  add_chain_flags(cmd_sim, sim);
  add_barrier_flags(cmd_sim, sim);
  add_format_flag(cmd_sim, sim);
  cmd_sim->add_option("--paths", paths, "number of simulated paths");
  cmd_sim->add_option("--seed", seed, "RNG seed");
  cmd_sim->add_option("--step-cap", step_cap, "per-path step budget");
  cmd_sim->add_option("--partitions", partitions, "parallel stream count");

  bool facts = false, ruin = false;
  std::string waiting, either_csv, race_csv, build_csv, markov_csv, count_pat;
  long flips = -1;
  double bias = 0.5;
  int pat_A = -1, pat_B = -1;
  auto* cmd_pat = app.add_subcommand("pattern", "coin-flip pattern facts and games");
  cmd_pat->add_flag("--facts", facts, "waiting times and race odds for HH vs TH");
  cmd_pat->add_option("--waiting", waiting, "expected flips until this pattern");
  cmd_pat->add_option("--either", either_csv,
                      "expected flips until any of these (comma-separated)");
  cmd_pat->add_option("--race", race_csv, "P(first before second): WIN,LOSE");
  cmd_pat->add_option("--count", count_pat, "expected occurrence count (with --flips)");
  cmd_pat->add_option("--flips", flips, "flip budget for --count");
  cmd_pat->add_flag("--ruin", ruin, "two-pattern ruin probability (needs -A, -B)");
  cmd_pat->add_option("--build-chain", build_csv, "compile WIN,LOSE into a payoff chain");
  cmd_pat->add_option("--markov-check", markov_csv, "first-order Markov test for WIN,LOSE");
  cmd_pat->add_option("--bias", bias, "P(heads), default 1/2");
  cmd_pat->add_option("-A", pat_A, "upper barrier for --ruin");
  cmd_pat->add_option("-B", pat_B, "lower barrier for --ruin");
  add_format_flag(cmd_pat, pattern_common);

  double tolerance = -1.0;
  long verify_horizon = -1;
  std::uint64_t verify_paths = 0, verify_seed = 1;
  auto* cmd_verify = app.add_subcommand("verify", "cross-method agreement table");
  add_chain_flags(cmd_verify, verify);
  add_barrier_flags(cmd_verify, verify);
  add_format_flag(cmd_verify, verify);
  cmd_verify->add_option("--tolerance", tolerance, "closed-form vs oracle tolerance");
  cmd_verify->add_option("--horizon", verify_horizon, "enumeration horizon");
  cmd_verify->add_option("--paths", verify_paths, "add a Monte Carlo row with this many paths");
  cmd_verify->add_option("--seed", verify_seed, "seed for the Monte Carlo row");

  CLI11_PARSE(app, argc, argv);

  json spec;
  std::string format = "text";

  if (cmd_closed->parsed()) {
    spec["command"] = "closed-form";
    spec["chain"] = parse_chain_text(resolve_chain(closed));
    spec["barriers"] = {{"A", closed.A}, {"B", closed.B}};
    format = closed.format;
  } else if (cmd_solve->parsed()) {
    spec["command"] = "solve";
    spec["chain"] = parse_chain_text(resolve_chain(solve));
    spec["barriers"] = {{"A", solve.A}, {"B", solve.B}};
    format = solve.format;
  } else if (cmd_oracle->parsed()) {
    spec["command"] = "oracle";
    spec["chain"] = parse_chain_text(resolve_chain(orc));
    spec["barriers"] = {{"A", orc.A}, {"B", orc.B}};
    if (horizon >= 0) spec["options"] = {{"horizon", horizon}};
    format = orc.format;
  } else if (cmd_sim->parsed()) {
    spec["command"] = "simulate";
    spec["chain"] = parse_chain_text(resolve_chain(sim));
    spec["barriers"] = {{"A", sim.A}, {"B", sim.B}};
    spec["options"] = {{"paths", paths},
                       {"seed", seed},
                       {"step_cap", step_cap},
                       {"partitions", partitions}};
    format = sim.format;
  } else if (cmd_pat->parsed()) {
    spec["command"] = "pattern";
    json opts = json::object();
    if (bias != 0.5) opts["bias"] = bias;
    if (facts) opts["facts"] = true;
    if (!waiting.empty()) opts["waiting"] = waiting;
    if (!either_csv.empty()) opts["either"] = split_patterns(either_csv);
    if (!race_csv.empty()) opts["race"] = split_patterns(race_csv);
    if (!count_pat.empty()) {
      opts["count"] = count_pat;
      opts["flips"] = flips;
    }
    if (ruin) {
      opts["ruin"] = true;
      spec["barriers"] = {{"A", pat_A}, {"B", pat_B}};
    }
    if (!build_csv.empty()) opts["build_chain"] = split_patterns(build_csv);
    if (!markov_csv.empty()) opts["markov_check"] = split_patterns(markov_csv);
    if (!opts.empty()) spec["options"] = opts;
    format = pattern_common.format;
  } else if (cmd_verify->parsed()) {
    spec["command"] = "verify";
    spec["chain"] = parse_chain_text(resolve_chain(verify));
    spec["barriers"] = {{"A", verify.A}, {"B", verify.B}};
    json opts = json::object();
    if (tolerance > 0.0) opts["tolerance"] = tolerance;
    if (verify_horizon >= 0) opts["horizon"] = verify_horizon;
    if (verify_paths > 0) {
      opts["paths"] = verify_paths;
      opts["seed"] = verify_seed;
    }
    if (!opts.empty()) spec["options"] = opts;
    format = verify.format;
  }

  return run_and_print(spec, format);
}
