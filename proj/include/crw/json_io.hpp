#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "crw/chains.hpp"

namespace crw {

// Chain wire format (states ordered (1, 0, -1); two-state uses (1, -1)):
//   {"type":"two_state","p":0.6,"q":0.4,"initial":[0.6,0.4]}
//   {"type":"symmetric_delay","p":0.25,"q":0.3,"r":0.5}
//   {"type":"general","matrix":[[..],[..],[..]],"initial":[pi1,pi0,pim1]}
// "initial" may be omitted where a stationary start is well defined; unknown
// fields are rejected.
nlohmann::ordered_json chain_to_json(const Chain& chain);
Chain chain_from_json(const nlohmann::ordered_json& doc);
Chain chain_from_json_text(std::string_view text);
std::string chain_to_json_text(const Chain& chain);

}  // namespace crw
