#pragma once

#include "fdyn/cantor.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace fdyn {

// Model file schema:
//   {"hull": [a, b],
//    "branches": [{"label": "L", "domain": [a, b],
//                  "map": {"type": "affine", "slope": s, "offset": o}
//                       | {"type": "analytic", "name": "poly", "params": [...], "deriv_range": [lo, hi]}}],
//    "markov": [["L", "R"], ...]}          (optional, full shift when absent)
// Numbers may be JSON numbers or strings "p/q"; both are read exactly.
CantorSystem cantor_from_json(const nlohmann::json& j);

// Throws ValidationError with line and column for malformed JSON.
nlohmann::json parse_json_text(std::string_view text, const std::string& source = "<input>");
CantorSystem parse_cantor_json(std::string_view text);
CantorSystem load_cantor_file(const std::string& path);
// Whole file as text; ValidationError when it cannot be opened.
std::string read_text_file(const std::string& path);

nlohmann::ordered_json cantor_to_json(const CantorSystem& k);

Rational json_rational(const nlohmann::json& v, const std::string& what);

} // namespace fdyn
