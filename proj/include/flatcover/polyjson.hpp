#pragma once

#include <json.hpp>

#include "flatcover/polynomial.hpp"

namespace flatcover {

/// {"nvars": n, "degree": d, "terms": [{"alpha": [...], "c": c}, ...]}, nonzero terms in lex order.
nlohmann::json to_json(const Polynomial& p);
/// Throws InvalidArgument on malformed input.
Polynomial polynomial_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal form of a double, for deterministic artifacts.
std::string format_double(double v);

}  // namespace flatcover
