#include "crw/job.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "crw/analytic.hpp"
#include "crw/chains.hpp"
#include "crw/json_io.hpp"
#include "crw/martingale.hpp"
#include "crw/oracle.hpp"
#include "crw/patterns.hpp"

namespace crw::jobs {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed,
                    const char* context) {
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (key == name) {
        known = true;
        break;
      }
    if (!known)
      fail(ErrorCode::Parse,
           std::string(context) + ": unknown field \"" + key + "\"");
  }
}

Barriers parse_barriers(const json& spec) {
  if (!spec.contains("barriers"))
    fail(ErrorCode::Parse, "job: missing field \"barriers\"");
  const auto& b = spec["barriers"];
  if (!b.is_object()) fail(ErrorCode::Parse, "job: \"barriers\" must be an object");
  reject_unknown(b, {"A", "B"}, "barriers");
  if (!b.contains("A") || !b["A"].is_number_integer())
    fail(ErrorCode::Parse, "barriers: missing integer field \"A\"");
  if (!b.contains("B") || !b["B"].is_number_integer())
    fail(ErrorCode::Parse, "barriers: missing integer field \"B\"");
  Barriers out{b["A"].get<int>(), b["B"].get<int>()};
  ensure_valid(out);
  return out;
}

Chain parse_chain(const json& spec) {
  if (!spec.contains("chain")) fail(ErrorCode::Parse, "job: missing field \"chain\"");
  return chain_from_json(spec["chain"]);
}

json options_of(const json& spec) {
  if (!spec.contains("options")) return json::object();
  if (!spec["options"].is_object())
    fail(ErrorCode::Parse, "job: \"options\" must be an object");
  return spec["options"];
}

std::uint64_t get_uint(const json& opts, const char* key, std::uint64_t fallback) {
  if (!opts.contains(key)) return fallback;
  const auto& v = opts[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(ErrorCode::Parse, std::string("options: \"") + key +
                               "\" must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts[key].is_number())
    fail(ErrorCode::Parse, std::string("options: \"") + key + "\" must be a number");
  return opts[key].get<double>();
}

GeneralChain as_general(const Chain& chain) {
  if (const auto* two = std::get_if<TwoStateChain>(&chain)) return embed(*two);
  if (const auto* delay = std::get_if<SymmetricDelayChain>(&chain)) return embed(*delay);
  return std::get<GeneralChain>(chain);
}

json diagnostics_json(const std::map<std::string, double>& diag) {
  json out = json::object();
  for (const auto& [key, value] : diag) out[key] = value;
  return out;
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

json run_closed_form(const Chain& chain, Barriers b, const json& opts) {
  reject_unknown(opts, {}, "closed-form options");
  const auto sol = analytic::solve(chain, b);
  json results;
  results["alpha"] = sol.alpha;
  results["beta"] = sol.beta;
  if (sol.expected_tau) results["expected_tau"] = *sol.expected_tau;
  results["method"] = sol.method;
  results["assumes_stationary_start"] = true;
  if (!sol.diagnostics.empty()) results["diagnostics"] = diagnostics_json(sol.diagnostics);
  return results;
}

json run_solve(const Chain& chain, Barriers b, const json& opts) {
  reject_unknown(opts, {}, "solve options");
  const auto sol = martingale::ruin_general(as_general(chain), b);
  json results;
  results["alpha"] = sol.alpha;
  results["beta"] = sol.beta;
  results["method"] = sol.method;
  try {
    results["expected_tau_oracle"] = oracle::first_step_etau(chain, b);
  } catch (const Error& e) {
    results["expected_tau_oracle"] = nullptr;
    results["expected_tau_error"] = e.what();
  }
  results["diagnostics"] = diagnostics_json(sol.diagnostics);
  return results;
}

json run_oracle(const Chain& chain, Barriers b, const json& opts) {
  reject_unknown(opts, {"horizon"}, "oracle options");
  oracle::SolveStats alpha_stats, etau_stats;
  json results;
  results["alpha"] = oracle::first_step_alpha(chain, b, &alpha_stats);
  results["expected_tau"] = oracle::first_step_etau(chain, b, &etau_stats);
  results["unknowns"] = alpha_stats.unknowns;
  results["alpha_residual"] = alpha_stats.residual;
  results["etau_residual"] = etau_stats.residual;
  if (opts.contains("horizon")) {
    const auto horizon = static_cast<long>(get_uint(opts, "horizon", 1));
    const auto bracket = oracle::enumerate_paths(chain, b, horizon);
    results["bracket"] = {{"horizon", horizon},
                          {"alpha_lower", bracket.alpha_lower},
                          {"alpha_upper", bracket.alpha_upper},
                          {"mass_unresolved", bracket.mass_unresolved}};
  }
  return results;
}

json run_simulate(const Chain& chain, Barriers b, const json& opts) {
  reject_unknown(opts, {"seed", "paths", "step_cap", "partitions"}, "simulate options");
  const std::uint64_t paths = get_uint(opts, "paths", 100'000);
  const std::uint64_t seed = get_uint(opts, "seed", 1);
  const std::uint64_t step_cap = get_uint(opts, "step_cap", 1'000'000);
  const auto partitions = static_cast<std::uint32_t>(get_uint(opts, "partitions", 1));
  const auto mc = oracle::simulate(chain, b, paths, seed, step_cap, partitions);
  json results;
  results["alpha_hat"] = mc.alpha_hat;
  results["tau_hat"] = mc.tau_hat;
  results["stderr_alpha"] = mc.stderr_alpha;
  results["stderr_tau"] = mc.stderr_tau;
  results["n_paths"] = mc.n_paths;
  results["seed"] = mc.seed;
  results["step_cap"] = step_cap;
  results["truncated_paths"] = mc.truncated_paths;
  results["partitions"] = mc.partitions;
  return results;
}

patterns::Pattern pattern_arg(const json& node, const char* context) {
  if (!node.is_string())
    fail(ErrorCode::Parse, std::string(context) + " must be a pattern string");
  return patterns::Pattern::parse(node.get<std::string>());
}

std::pair<patterns::Pattern, patterns::Pattern> pattern_pair(const json& node,
                                                             const char* context) {
  if (!node.is_array() || node.size() != 2)
    fail(ErrorCode::Parse,
         std::string(context) + " must be an array of two pattern strings");
  return {pattern_arg(node[0], context), pattern_arg(node[1], context)};
}

json run_pattern(const json& spec, const json& opts) {
  reject_unknown(opts,
                 {"bias", "facts", "waiting", "either", "race", "count", "flips",
                  "ruin", "build_chain", "markov_check"},
                 "pattern options");
  const double bias = get_double(opts, "bias", 0.5);
  const bool any_specific = opts.contains("waiting") || opts.contains("either") ||
                            opts.contains("race") || opts.contains("count") ||
                            opts.contains("ruin") || opts.contains("build_chain") ||
                            opts.contains("markov_check");
  const bool facts = opts.value("facts", !any_specific);

  json results;
  if (facts) {
    const auto hh = patterns::Pattern::parse("HH");
    const auto th = patterns::Pattern::parse("TH");
    const patterns::Pattern both[] = {hh, th};
    results["facts"] = {{"waiting_time_HH", patterns::waiting_time(hh, bias)},
                        {"waiting_time_TH", patterns::waiting_time(th, bias)},
                        {"waiting_time_either", patterns::waiting_time_either(both, bias)},
                        {"prob_HH_before_TH", patterns::prob_first(hh, th, bias)}};
  }
  if (opts.contains("waiting")) {
    const auto pat = pattern_arg(opts["waiting"], "options: \"waiting\"");
    results["waiting"] = {{"pattern", pat.symbols},
                          {"flips", patterns::waiting_time(pat, bias)}};
  }
  if (opts.contains("either")) {
    const auto& node = opts["either"];
    if (!node.is_array() || node.size() < 2)
      fail(ErrorCode::Parse, "options: \"either\" must be an array of >= 2 patterns");
    std::vector<patterns::Pattern> pats;
    json names = json::array();
    for (const auto& item : node) {
      pats.push_back(pattern_arg(item, "options: \"either\""));
      names.push_back(pats.back().symbols);
    }
    results["either"] = {{"patterns", names},
                         {"flips", patterns::waiting_time_either(pats, bias)}};
  }
  if (opts.contains("race")) {
    const auto [win, lose] = pattern_pair(opts["race"], "options: \"race\"");
    const auto r = patterns::race(win, lose, bias);
    results["race"] = {{"win", win.symbols},
                       {"lose", lose.symbols},
                       {"p_win_first", r.p_win_first},
                       {"tie_possible", r.tie_possible}};
  }
  if (opts.contains("count")) {
    const auto pat = pattern_arg(opts["count"], "options: \"count\"");
    if (!opts.contains("flips"))
      fail(ErrorCode::Parse, "options: \"count\" requires \"flips\"");
    const auto flips = static_cast<long>(get_uint(opts, "flips", 0));
    results["count"] = {{"pattern", pat.symbols},
                        {"flips", flips},
                        {"expected_occurrences",
                         patterns::expected_count(pat, flips, bias)}};
  }
  if (opts.value("ruin", false)) {
    const Barriers b = parse_barriers(spec);
    const double alpha = analytic::ruin_two_pattern(b);
    results["ruin"] = {{"A", b.A}, {"B", b.B}, {"alpha", alpha}, {"beta", 1.0 - alpha}};
  }
  if (opts.contains("build_chain")) {
    const auto [win, lose] = pattern_pair(opts["build_chain"], "options: \"build_chain\"");
    const auto chain = patterns::build_payoff_chain({win, lose, bias});
    results["payoff_chain"] = chain_to_json(Chain{chain});
  }
  if (opts.contains("markov_check")) {
    const auto [win, lose] = pattern_pair(opts["markov_check"], "options: \"markov_check\"");
    const auto check = patterns::markov_check({win, lose, bias});
    json entry;
    entry["is_markov"] = check.is_markov;
    if (!check.is_markov) {
      entry["witness"] = {{"prev2", check.prev2},
                          {"prev", check.prev},
                          {"next", check.next},
                          {"p_one_lag", check.p_one_lag},
                          {"p_two_lag", check.p_two_lag}};
    }
    results["markov_check"] = entry;
  }
  return results;
}

json make_check(const std::string& name, double value, double reference, double tol) {
  const double delta = std::abs(value - reference);
  return json{{"name", name},       {"value", value}, {"reference", reference},
              {"abs_delta", delta}, {"tolerance", tol}, {"pass", delta <= tol}};
}

json run_verify(const Chain& chain, Barriers b, const json& opts) {
  reject_unknown(opts, {"tolerance", "horizon", "paths", "seed"}, "verify options");
  const double tol = get_double(opts, "tolerance", 1e-9);
  const auto horizon = static_cast<long>(get_uint(opts, "horizon", 2000));

  json checks = json::array();

  // Closed forms against the first-step oracle, both from the stationary start.
  if (const auto* two = std::get_if<TwoStateChain>(&chain)) {
    const TwoStateChain stat = make_two_state(two->p, two->q);
    const Chain stat_chain{stat};
    const double oracle_alpha = oracle::first_step_alpha(stat_chain, b);
    const double oracle_etau = oracle::first_step_etau(stat_chain, b);
    if (std::abs(two->p - two->q) < 1e-10) {
      checks.push_back(make_check("alpha symmetric closed form vs first-step",
                                  analytic::ruin_symmetric(two->p, b), oracle_alpha, tol));
      checks.push_back(make_check("etau symmetric closed form vs first-step",
                                  analytic::etau_symmetric(two->p, b), oracle_etau, tol));
    } else {
      const double alpha = analytic::ruin_asymmetric(stat, b);
      checks.push_back(
          make_check("alpha asymmetric closed form vs first-step", alpha, oracle_alpha, tol));
      checks.push_back(make_check("etau asymmetric closed form vs first-step",
                                  analytic::etau_asymmetric(stat, b, alpha), oracle_etau, tol));
    }
  } else if (const auto* delay = std::get_if<SymmetricDelayChain>(&chain)) {
    const double oracle_alpha = oracle::first_step_alpha(chain, b);
    const double oracle_etau = oracle::first_step_etau(chain, b);
    checks.push_back(make_check("alpha delay closed form vs first-step",
                                analytic::ruin_symmetric_delays(delay->p, delay->r, b),
                                oracle_alpha, tol));
    checks.push_back(make_check("etau delay closed form vs first-step",
                                analytic::etau_symmetric_delays(*delay, b), oracle_etau, tol));
  }

  // Martingale solver against the oracle, both using the chain's own start.
  const double fs_alpha = oracle::first_step_alpha(chain, b);
  const auto sol = martingale::ruin_general(as_general(chain), b);
  checks.push_back(
      make_check("alpha martingale solver (" + sol.method + ") vs first-step",
                 sol.alpha, fs_alpha, 1e-8));

  // Enumeration bracket around the oracle value.
  const auto bracket = oracle::enumerate_paths(chain, b, horizon);
  const double outside = std::max({0.0, bracket.alpha_lower - fs_alpha,
                                   fs_alpha - bracket.alpha_upper});
  checks.push_back(json{{"name", "enumeration bracket contains first-step alpha"},
                        {"value", fs_alpha},
                        {"reference", bracket.alpha_lower},
                        {"abs_delta", outside},
                        {"tolerance", 1e-12},
                        {"pass", outside <= 1e-12}});
  checks.push_back(make_check("enumeration unresolved mass", bracket.mass_unresolved,
                              0.0, 1e-6));

  // Optional Monte Carlo cross-check.
  if (opts.contains("paths")) {
    const std::uint64_t paths = get_uint(opts, "paths", 100'000);
    const std::uint64_t seed = get_uint(opts, "seed", 1);
    const auto mc = oracle::simulate(chain, b, paths, seed);
    checks.push_back(make_check("monte carlo alpha within 4 standard errors",
                                mc.alpha_hat, fs_alpha, 4.0 * mc.stderr_alpha));
  }

  bool all_pass = true;
  for (const auto& check : checks) all_pass = all_pass && check["pass"].get<bool>();
  json results;
  results["checks"] = checks;
  results["all_pass"] = all_pass;
  return results;
}

json error_report(const std::string& command, const Error& e) {
  json report;
  report["command"] = command;
  report["status"] = "error";
  report["error"] = {{"code", static_cast<int>(e.code())},
                     {"name", error_code_name(e.code())},
                     {"message", e.what()}};
  return report;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::None:
      return 0;
    case ErrorCode::Domain:
    case ErrorCode::Parse:
    case ErrorCode::Reducible:
    case ErrorCode::NotMarkov:
      return 2;  // the request was invalid
    default:
      return 3;  // a solver could not produce the answer
  }
}

JobOutcome run(const nlohmann::ordered_json& spec) {
  std::string command = "?";
  try {
    if (!spec.is_object()) fail(ErrorCode::Parse, "job: expected a JSON object");
    reject_unknown(spec, {"command", "chain", "barriers", "options"}, "job");
    if (!spec.contains("command") || !spec["command"].is_string())
      fail(ErrorCode::Parse, "job: missing string field \"command\"");
    command = spec["command"].get<std::string>();
    const json opts = options_of(spec);

    json report;
    report["command"] = command;
    report["status"] = "ok";

    if (command == "pattern") {
      if (spec.contains("chain"))
        fail(ErrorCode::Parse, "job: the pattern command takes no chain");
      if (spec.contains("barriers")) {
        const Barriers b = parse_barriers(spec);
        report["barriers"] = {{"A", b.A}, {"B", b.B}};
      }
      report["results"] = run_pattern(spec, opts);
      return {report, 0};
    }

    const Chain chain = parse_chain(spec);
    const Barriers b = parse_barriers(spec);
    report["chain"] = chain_to_json(chain);
    report["barriers"] = {{"A", b.A}, {"B", b.B}};

    if (command == "closed-form") {
      report["results"] = run_closed_form(chain, b, opts);
    } else if (command == "solve") {
      report["results"] = run_solve(chain, b, opts);
    } else if (command == "oracle") {
      report["results"] = run_oracle(chain, b, opts);
    } else if (command == "simulate") {
      report["results"] = run_simulate(chain, b, opts);
    } else if (command == "verify") {
      report["results"] = run_verify(chain, b, opts);
      const int code = report["results"]["all_pass"].get<bool>() ? 0 : 1;
      return {report, code};
    } else {
      fail(ErrorCode::Parse, "job: unknown command \"" + command + "\"");
    }
    return {report, 0};
  } catch (const Error& e) {
    return {error_report(command, e), exit_code_for(e.code())};
  } catch (const std::exception& e) {
    const Error wrapped(ErrorCode::Internal, e.what());
    return {error_report(command, wrapped), exit_code_for(ErrorCode::Internal)};
  }
}

JobOutcome run_text(std::string_view spec_text) {
  json spec = json::parse(spec_text, nullptr, false);
  if (spec.is_discarded()) {
    const Error e(ErrorCode::Parse, "job: malformed JSON specification");
    JobOutcome out;
    out.report = error_report("?", e);
    out.exit_code = exit_code_for(ErrorCode::Parse);
    return out;
  }
  return run(spec);
}

namespace {

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) return fmt12(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "null";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render_rows(const json& node, const std::string& prefix, std::string& out) {
  constexpr int kKeyWidth = 40;
  for (const auto& [key, value] : node.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      render_rows(value, path, out);
    } else if (value.is_array() && !value.empty() && value[0].is_object()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        render_rows(value[i], path + "[" + std::to_string(i) + "]", out);
    } else if (value.is_array()) {
      std::string items;
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) items += ", ";
        items += scalar_text(value[i]);
      }
      out += path;
      out += std::string(path.size() < kKeyWidth ? kKeyWidth - path.size() : 1, ' ');
      out += "[" + items + "]\n";
    } else {
      out += path;
      out += std::string(path.size() < kKeyWidth ? kKeyWidth - path.size() : 1, ' ');
      out += scalar_text(value) + "\n";
    }
  }
}

std::string render_verify_table(const json& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-64s %-18s %-18s %-12s %-9s %s\n", "check", "value",
                "reference", "|delta|", "tol", "status");
  out += line;
  for (const auto& check : report["results"]["checks"]) {
    std::snprintf(line, sizeof line, "%-64s %-18s %-18s %-12.3e %-9.1e %s\n",
                  check["name"].get<std::string>().c_str(),
                  fmt12(check["value"].get<double>()).c_str(),
                  fmt12(check["reference"].get<double>()).c_str(),
                  check["abs_delta"].get<double>(), check["tolerance"].get<double>(),
                  check["pass"].get<bool>() ? "pass" : "FAIL");
    out += line;
  }
  out += report["results"]["all_pass"].get<bool>() ? "all checks passed\n"
                                                   : "SOME CHECKS FAILED\n";
  return out;
}

}  // namespace

std::string render(const nlohmann::ordered_json& report, std::string_view format) {
  if (format == "json") return report.dump() + "\n";
  if (format != "text") fail(ErrorCode::Domain, "format must be \"text\" or \"json\"");

  if (report.contains("results") && report["results"].contains("checks"))
    return render_verify_table(report);
  std::string out;
  render_rows(report, "", out);
  return out;
}

}  // namespace crw::jobs
