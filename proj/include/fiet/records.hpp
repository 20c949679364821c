#pragma once

// JSON records for fIETs and induction paths.

#include <string>
#include <string_view>

#include <json.hpp>

#include "fiet/fiet.hpp"
#include "fiet/induction.hpp"

namespace fiet {

// {"perm": text, "lengths": [scalar text], "backend": tag}
nlohmann::ordered_json fiet_to_json(const FlipIET& f);
// Throws ParseError on malformed records.
FlipIET fiet_from_json(const nlohmann::json& j);
FlipIET fiet_from_json_text(std::string_view text);

// One {"case", "winner", "loser", "from", "to"} object per line; symbols are
// printed 1-based.
std::string path_to_jsonl(const RauzyPath& path);
// Throws ParseError, or ChainMismatch for arrows that do not chain.
RauzyPath path_from_jsonl(std::string_view text);

}  // namespace fiet
