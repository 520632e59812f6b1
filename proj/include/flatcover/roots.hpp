#pragma once

#include <utility>
#include <vector>

#include "flatcover/polynomial.hpp"

namespace flatcover {

/// Real roots of a univariate polynomial in [a, b] by Bernstein sign-variation
/// subdivision and bisection. Clusters narrower than `resolution` are reported once.
std::vector<double> real_roots(const Polynomial& p, double a, double b, double resolution = 1e-13);

/// Closures of the connected components of {x in [a, b] : |p(x)| < delta}, sorted.
std::vector<std::pair<double, double>> sublevel_intervals(const Polynomial& p, double delta, double a, double b);

}  // namespace flatcover
