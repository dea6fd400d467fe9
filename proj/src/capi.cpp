#include "crw.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "crw/analytic.hpp"
#include "crw/chains.hpp"
#include "crw/errors.hpp"
#include "crw/job.hpp"
#include "crw/json_io.hpp"
#include "crw/martingale.hpp"
#include "crw/oracle.hpp"
#include "crw/patterns.hpp"

struct crw_chain {
  crw::Chain value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
crw_status wrap(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return CRW_OK;
  } catch (const crw::Error& e) {
    g_last_error = e.what();
    return static_cast<crw_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CRW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CRW_ERR_INTERNAL;
  }
}

crw::Barriers barriers_of(int A, int B) { return crw::Barriers{A, B}; }

crw::GeneralChain general_of(const crw::Chain& chain) {
  if (const auto* two = std::get_if<crw::TwoStateChain>(&chain)) return crw::embed(*two);
  if (const auto* delay = std::get_if<crw::SymmetricDelayChain>(&chain))
    return crw::embed(*delay);
  return std::get<crw::GeneralChain>(chain);
}

}  // namespace

extern "C" {

const char* crw_status_name(crw_status status) {
  return crw::error_code_name(static_cast<crw::ErrorCode>(static_cast<int>(status)));
}

const char* crw_last_error(void) { return g_last_error.c_str(); }

const char* crw_version(void) { return "1.0.0"; }

void crw_string_free(char* text) { std::free(text); }

crw_chain* crw_chain_from_json(const char* json_text) {
  crw_chain* out = nullptr;
  wrap([&] {
    if (!json_text) crw::fail(crw::ErrorCode::Parse, "null chain JSON");
    out = new crw_chain{crw::chain_from_json_text(json_text)};
  });
  return out;
}

crw_chain* crw_chain_two_state(double p, double q) {
  crw_chain* out = nullptr;
  wrap([&] {
    crw::TwoStateChain c{p, q, {}};
    crw::ensure_valid(crw::Chain{c});
    out = new crw_chain{crw::make_two_state(p, q)};
  });
  return out;
}

crw_chain* crw_chain_symmetric_delay(double p, double q, double r) {
  crw_chain* out = nullptr;
  wrap([&] {
    crw::Chain c{crw::make_symmetric_delay(p, q, r)};
    crw::ensure_valid(c);
    out = new crw_chain{c};
  });
  return out;
}

crw_chain* crw_chain_general(const double matrix[9], const double initial[3]) {
  crw_chain* out = nullptr;
  wrap([&] {
    if (!matrix || !initial) crw::fail(crw::ErrorCode::Domain, "null matrix or initial");
    std::array<std::array<double, 3>, 3> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = matrix[i * 3 + j];
    crw::Chain c{crw::make_general(m, {initial[0], initial[1], initial[2]})};
    crw::ensure_valid(c);
    out = new crw_chain{c};
  });
  return out;
}

void crw_chain_free(crw_chain* chain) { delete chain; }

char* crw_chain_to_json(const crw_chain* chain) {
  char* out = nullptr;
  wrap([&] {
    if (!chain) crw::fail(crw::ErrorCode::Domain, "null chain");
    out = dup_string(crw::chain_to_json_text(chain->value));
  });
  return out;
}

int crw_chain_num_states(const crw_chain* chain) {
  return chain ? crw::num_states(chain->value) : 0;
}

crw_status crw_chain_validate(const crw_chain* chain, char** violations_json) {
  if (violations_json) *violations_json = nullptr;
  return wrap([&] {
    if (!chain) crw::fail(crw::ErrorCode::Domain, "null chain");
    const auto violations = crw::validate(chain->value);
    if (violations.empty()) return;
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& v : violations) doc.push_back(v);
    if (violations_json) *violations_json = dup_string(doc.dump());
    crw::fail(crw::ErrorCode::Domain, doc.dump());
  });
}

crw_status crw_chain_stationary(const crw_chain* chain, double out[3]) {
  return wrap([&] {
    if (!chain || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    const auto pi = crw::stationary(chain->value);
    for (std::size_t i = 0; i < pi.size(); ++i) out[i] = pi[i];
  });
}

crw_status crw_ruin_symmetric(double p, int A, int B, double* alpha) {
  return wrap([&] { *alpha = crw::analytic::ruin_symmetric(p, barriers_of(A, B)); });
}

crw_status crw_etau_symmetric(double p, int A, int B, double* etau) {
  return wrap([&] { *etau = crw::analytic::etau_symmetric(p, barriers_of(A, B)); });
}

crw_status crw_ruin_asymmetric(double p, double q, int A, int B, double* alpha) {
  return wrap([&] {
    *alpha = crw::analytic::ruin_asymmetric(crw::make_two_state(p, q), barriers_of(A, B));
  });
}

crw_status crw_etau_asymmetric(double p, double q, int A, int B, double* etau) {
  return wrap([&] {
    const auto chain = crw::make_two_state(p, q);
    const auto b = barriers_of(A, B);
    *etau = crw::analytic::etau_asymmetric(chain, b, crw::analytic::ruin_asymmetric(chain, b));
  });
}

crw_status crw_ruin_symmetric_delays(double p, double r, int A, int B, double* alpha) {
  return wrap([&] {
    *alpha = crw::analytic::ruin_symmetric_delays(p, r, barriers_of(A, B));
  });
}

crw_status crw_etau_symmetric_delays(double p, double q, double r, int A, int B,
                                     double* etau) {
  return wrap([&] {
    *etau = crw::analytic::etau_symmetric_delays(crw::make_symmetric_delay(p, q, r),
                                                 barriers_of(A, B));
  });
}

crw_status crw_ruin_two_pattern(int A, int B, double* alpha) {
  return wrap([&] { *alpha = crw::analytic::ruin_two_pattern(barriers_of(A, B)); });
}

crw_status crw_solve_ruin(const crw_chain* chain, int A, int B, char** solution_json) {
  if (solution_json) *solution_json = nullptr;
  return wrap([&] {
    if (!chain || !solution_json) crw::fail(crw::ErrorCode::Domain, "null argument");
    const auto sol = crw::martingale::ruin_general(general_of(chain->value),
                                                   barriers_of(A, B));
    nlohmann::ordered_json doc;
    doc["alpha"] = sol.alpha;
    doc["beta"] = sol.beta;
    doc["method"] = sol.method;
    nlohmann::ordered_json diag = nlohmann::ordered_json::object();
    for (const auto& [key, value] : sol.diagnostics) diag[key] = value;
    doc["diagnostics"] = diag;
    *solution_json = dup_string(doc.dump());
  });
}

crw_status crw_first_step_alpha(const crw_chain* chain, int A, int B, double* alpha) {
  return wrap([&] {
    if (!chain || !alpha) crw::fail(crw::ErrorCode::Domain, "null argument");
    *alpha = crw::oracle::first_step_alpha(chain->value, barriers_of(A, B));
  });
}

crw_status crw_first_step_etau(const crw_chain* chain, int A, int B, double* etau) {
  return wrap([&] {
    if (!chain || !etau) crw::fail(crw::ErrorCode::Domain, "null argument");
    *etau = crw::oracle::first_step_etau(chain->value, barriers_of(A, B));
  });
}

crw_status crw_enumerate_paths(const crw_chain* chain, int A, int B, long horizon,
                               double* alpha_lower, double* alpha_upper,
                               double* mass_unresolved) {
  return wrap([&] {
    if (!chain) crw::fail(crw::ErrorCode::Domain, "null chain");
    const auto bracket = crw::oracle::enumerate_paths(chain->value, barriers_of(A, B),
                                                      horizon);
    if (alpha_lower) *alpha_lower = bracket.alpha_lower;
    if (alpha_upper) *alpha_upper = bracket.alpha_upper;
    if (mass_unresolved) *mass_unresolved = bracket.mass_unresolved;
  });
}

crw_status crw_simulate(const crw_chain* chain, int A, int B, uint64_t n_paths,
                        uint64_t seed, uint64_t step_cap, uint32_t partitions,
                        crw_mc_result* out) {
  return wrap([&] {
    if (!chain || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    const auto mc = crw::oracle::simulate(chain->value, barriers_of(A, B), n_paths, seed,
                                          step_cap, partitions);
    out->alpha_hat = mc.alpha_hat;
    out->tau_hat = mc.tau_hat;
    out->stderr_alpha = mc.stderr_alpha;
    out->stderr_tau = mc.stderr_tau;
    out->n_paths = mc.n_paths;
    out->seed = mc.seed;
    out->truncated_paths = mc.truncated_paths;
    out->partitions = mc.partitions;
  });
}

crw_status crw_pattern_expected_count(const char* pattern, long flips, double coin_bias,
                                      double* out) {
  return wrap([&] {
    if (!pattern || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    *out = crw::patterns::expected_count(crw::patterns::Pattern::parse(pattern), flips,
                                         coin_bias);
  });
}

crw_status crw_pattern_waiting_time(const char* pattern, double coin_bias, double* out) {
  return wrap([&] {
    if (!pattern || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    *out = crw::patterns::waiting_time(crw::patterns::Pattern::parse(pattern), coin_bias);
  });
}

crw_status crw_pattern_waiting_time_either(const char* const* patterns, int count,
                                           double coin_bias, double* out) {
  return wrap([&] {
    if (!patterns || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    std::vector<crw::patterns::Pattern> pats;
    pats.reserve(count > 0 ? count : 0);
    for (int i = 0; i < count; ++i) {
      if (!patterns[i]) crw::fail(crw::ErrorCode::Domain, "null pattern");
      pats.push_back(crw::patterns::Pattern::parse(patterns[i]));
    }
    *out = crw::patterns::waiting_time_either(pats, coin_bias);
  });
}

crw_status crw_pattern_prob_first(const char* win, const char* lose, double coin_bias,
                                  double* out) {
  return wrap([&] {
    if (!win || !lose || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    *out = crw::patterns::prob_first(crw::patterns::Pattern::parse(win),
                                     crw::patterns::Pattern::parse(lose), coin_bias);
  });
}

crw_status crw_pattern_payoff_chain(const char* win, const char* lose, double coin_bias,
                                    crw_chain** out) {
  if (out) *out = nullptr;
  return wrap([&] {
    if (!win || !lose || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    const crw::patterns::PatternGame game{crw::patterns::Pattern::parse(win),
                                          crw::patterns::Pattern::parse(lose), coin_bias};
    *out = new crw_chain{crw::Chain{crw::patterns::build_payoff_chain(game)}};
  });
}

crw_status crw_pattern_markov_check(const char* win, const char* lose, double coin_bias,
                                    int* is_markov, char** detail_json) {
  if (detail_json) *detail_json = nullptr;
  return wrap([&] {
    if (!win || !lose || !is_markov) crw::fail(crw::ErrorCode::Domain, "null argument");
    const crw::patterns::PatternGame game{crw::patterns::Pattern::parse(win),
                                          crw::patterns::Pattern::parse(lose), coin_bias};
    const auto check = crw::patterns::markov_check(game);
    *is_markov = check.is_markov ? 1 : 0;
    if (detail_json) {
      nlohmann::ordered_json doc;
      doc["is_markov"] = check.is_markov;
      if (!check.is_markov) {
        doc["witness"] = {{"prev2", check.prev2}, {"prev", check.prev},
                          {"next", check.next},   {"p_one_lag", check.p_one_lag},
                          {"p_two_lag", check.p_two_lag}};
      }
      *detail_json = dup_string(doc.dump());
    }
  });
}

crw_status crw_run_job(const char* jobspec_json, char** report_json) {
  if (report_json) *report_json = nullptr;
  return wrap([&] {
    if (!jobspec_json || !report_json) crw::fail(crw::ErrorCode::Domain, "null argument");
    const auto outcome = crw::jobs::run_text(jobspec_json);
    *report_json = dup_string(outcome.report.dump());
    if (outcome.report.contains("error")) {
      const auto& err = outcome.report["error"];
      crw::fail(static_cast<crw::ErrorCode>(err["code"].get<int>()),
                err["message"].get<std::string>());
    }
  });
}

crw_status crw_render_report(const char* report_json, const char* format, char** out) {
  if (out) *out = nullptr;
  return wrap([&] {
    if (!report_json || !format || !out) crw::fail(crw::ErrorCode::Domain, "null argument");
    auto doc = nlohmann::ordered_json::parse(report_json, nullptr, false);
    if (doc.is_discarded()) crw::fail(crw::ErrorCode::Parse, "malformed report JSON");
    *out = dup_string(crw::jobs::render(doc, format));
  });
}

int crw_report_exit_code(const char* report_json) {
  if (!report_json) return 2;
  auto doc = nlohmann::ordered_json::parse(report_json, nullptr, false);
  if (doc.is_discarded()) return 2;
  if (doc.contains("error") && doc["error"].contains("code")) {
    return crw::jobs::exit_code_for(
        static_cast<crw::ErrorCode>(doc["error"]["code"].get<int>()));
  }
  if (doc.contains("results") && doc["results"].is_object() &&
      doc["results"].contains("all_pass"))
    return doc["results"]["all_pass"].get<bool>() ? 0 : 1;
  return 0;
}

}  // extern "C"
