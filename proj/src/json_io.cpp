#include "crw/json_io.hpp"

#include <cmath>
#include <sstream>

#include "crw/errors.hpp"

namespace crw {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& doc, std::initializer_list<const char*> allowed,
                         const char* context) {
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (key == name) {
        known = true;
        break;
      }
    if (!known) {
      std::ostringstream msg;
      msg << context << ": unknown field \"" << key << "\"";
      fail(ErrorCode::Parse, msg.str());
    }
  }
}

double get_number(const json& doc, const char* key, const char* context) {
  if (!doc.contains(key)) {
    std::ostringstream msg;
    msg << context << ": missing field \"" << key << "\"";
    fail(ErrorCode::Parse, msg.str());
  }
  if (!doc[key].is_number()) {
    std::ostringstream msg;
    msg << context << ": field \"" << key << "\" must be a number";
    fail(ErrorCode::Parse, msg.str());
  }
  return doc[key].get<double>();
}

std::vector<double> get_vector(const json& doc, const char* key, std::size_t len,
                               const char* context) {
  const auto& node = doc[key];
  if (!node.is_array() || node.size() != len) {
    std::ostringstream msg;
    msg << context << ": field \"" << key << "\" must be an array of " << len
        << " numbers";
    fail(ErrorCode::Parse, msg.str());
  }
  std::vector<double> out;
  out.reserve(len);
  for (const auto& v : node) {
    if (!v.is_number()) {
      std::ostringstream msg;
      msg << context << ": field \"" << key << "\" must contain numbers only";
      fail(ErrorCode::Parse, msg.str());
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Chain parse_two_state(const json& doc) {
  reject_unknown_keys(doc, {"type", "p", "q", "initial"}, "two_state chain");
  const double p = get_number(doc, "p", "two_state chain");
  const double q = get_number(doc, "q", "two_state chain");
  TwoStateChain c{p, q, {}};
  if (doc.contains("initial")) {
    const auto init = get_vector(doc, "initial", 2, "two_state chain");
    c.initial = {init[0], init[1]};
  } else {
    c.initial = stationary_two_state(c);
  }
  return c;
}

Chain parse_delay(const json& doc) {
  reject_unknown_keys(doc, {"type", "p", "q", "r"}, "symmetric_delay chain");
  return SymmetricDelayChain{get_number(doc, "p", "symmetric_delay chain"),
                             get_number(doc, "q", "symmetric_delay chain"),
                             get_number(doc, "r", "symmetric_delay chain")};
}

Chain parse_general(const json& doc) {
  reject_unknown_keys(doc, {"type", "matrix", "initial"}, "general chain");
  if (!doc.contains("matrix")) fail(ErrorCode::Parse, "general chain: missing field \"matrix\"");
  const auto& m = doc["matrix"];
  if (!m.is_array() || m.size() != 3)
    fail(ErrorCode::Parse, "general chain: field \"matrix\" must be a 3x3 array");
  std::array<std::array<double, 3>, 3> rows{};
  for (int i = 0; i < 3; ++i) {
    if (!m[i].is_array() || m[i].size() != 3)
      fail(ErrorCode::Parse, "general chain: field \"matrix\" must be a 3x3 array");
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (!m[i][j].is_number())
        fail(ErrorCode::Parse, "general chain: field \"matrix\" must contain numbers only");
      rows[i][j] = m[i][j].get<double>();
      sum += rows[i][j];
    }
    if (std::abs(sum - 1.0) > kProbTol) {
      std::ostringstream msg;
      msg << "general chain: matrix row " << i << " sums to " << sum << ", not 1";
      fail(ErrorCode::Domain, msg.str());
    }
  }
  if (doc.contains("initial")) {
    const auto init = get_vector(doc, "initial", 3, "general chain");
    return make_general(rows, InitialDist3{init[0], init[1], init[2]});
  }
  return make_general_stationary(rows);
}

}  // namespace

nlohmann::ordered_json chain_to_json(const Chain& chain) {
  json doc;
  if (const auto* two = std::get_if<TwoStateChain>(&chain)) {
    doc["type"] = "two_state";
    doc["p"] = two->p;
    doc["q"] = two->q;
    doc["initial"] = {two->initial.up, two->initial.down};
  } else if (const auto* delay = std::get_if<SymmetricDelayChain>(&chain)) {
    doc["type"] = "symmetric_delay";
    doc["p"] = delay->p;
    doc["q"] = delay->q;
    doc["r"] = delay->r;
  } else {
    const auto& g = std::get<GeneralChain>(chain);
    const auto m = g.matrix();
    doc["type"] = "general";
    doc["matrix"] = {{m[0][0], m[0][1], m[0][2]},
                     {m[1][0], m[1][1], m[1][2]},
                     {m[2][0], m[2][1], m[2][2]}};
    doc["initial"] = {g.initial.up, g.initial.mid, g.initial.down};
  }
  return doc;
}

Chain chain_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) fail(ErrorCode::Parse, "chain: expected a JSON object");
  if (!doc.contains("type") || !doc["type"].is_string())
    fail(ErrorCode::Parse, "chain: missing string field \"type\"");
  const std::string type = doc["type"].get<std::string>();

  Chain chain = [&] {
    if (type == "two_state") return parse_two_state(doc);
    if (type == "symmetric_delay") return parse_delay(doc);
    if (type == "general") return parse_general(doc);
    fail(ErrorCode::Parse, "chain: field \"type\" must be one of two_state, "
                           "symmetric_delay, general; got \"" + type + "\"");
  }();
  ensure_valid(chain);
  return chain;
}

Chain chain_from_json_text(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::Parse, "chain: malformed JSON");
  return chain_from_json(doc);
}

std::string chain_to_json_text(const Chain& chain) { return chain_to_json(chain).dump(); }

}  // namespace crw
