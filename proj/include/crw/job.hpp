#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "crw/errors.hpp"

namespace crw::jobs {

// A job specification is a JSON object with a fixed schema:
//   {"command": "closed-form" | "solve" | "oracle" | "simulate" | "pattern" | "verify",
//    "chain": {...}, "barriers": {"A":..,"B":..}, "options": {...}}
// Unknown fields are rejected; the options map is command-specific.

struct JobOutcome {
  nlohmann::ordered_json report;
  int exit_code = 0;  // 0 ok, 1 failed verification checks, 2 validation, 3 solver
};

// Runs a job end to end. Never throws: failures become machine-readable
// error reports carrying the exit code of the error class.
JobOutcome run(const nlohmann::ordered_json& spec);
JobOutcome run_text(std::string_view spec_text);

// Renders a report as stable-key-order JSON ("json") or as a fixed-width
// table ("text"); numbers are printed with 12 significant digits. Identical
// reports render byte-identically.
std::string render(const nlohmann::ordered_json& report, std::string_view format);

int exit_code_for(ErrorCode code);

}  // namespace crw::jobs
