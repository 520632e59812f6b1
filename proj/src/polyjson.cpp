#include "flatcover/polyjson.hpp"

#include <charconv>
#include <cmath>

namespace flatcover {

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c != 0.0) terms.push_back({{"alpha", a}, {"c", c}});
  });
  return {{"nvars", p.nvars()}, {"degree", p.degree()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw InvalidArgument("polynomial must be a JSON object");
    const int n = j.at("nvars").get<int>();
    const int d = j.at("degree").get<int>();
    if (n < 1) throw InvalidArgument("nvars must be positive");
    if (d < 0) throw InvalidArgument("degree must be non-negative");
    Polynomial p(n, d);
    for (const auto& t : j.at("terms")) {
      MultiIndex a = t.at("alpha").get<MultiIndex>();
      const double c = t.at("c").get<double>();
      if (static_cast<int>(a.size()) != n) throw InvalidArgument("term multi-index has wrong length");
      int tot = 0;
      for (int v : a) {
        if (v < 0) throw InvalidArgument("negative exponent in term");
        tot += v;
      }
      if (tot > d) throw InvalidArgument("term exceeds declared degree");
      if (!std::isfinite(c)) throw InvalidArgument("non-finite coefficient");
      p.add_coeff(a, c);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed polynomial JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace flatcover
