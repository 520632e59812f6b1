#include "flatcover/roots.hpp"

#include <algorithm>
#include <cmath>

namespace flatcover {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

// Bernstein coefficients of the polynomial with power coefficients c on [a, b].
std::vector<double> bernstein_on(const std::vector<double>& c, double a, double b) {
  const int d = static_cast<int>(c.size()) - 1;
  // shift/scale: q(t) = p(a + (b - a) t)
  std::vector<double> q(c.size(), 0.0);
  const double h = b - a;
  for (int k = 0; k <= d; ++k) {
    if (c[k] == 0.0) continue;
    double ap = 1.0;
    std::vector<double> apow(static_cast<std::size_t>(k + 1));
    for (int j = 0; j <= k; ++j) {
      apow[j] = ap;
      ap *= a;
    }
    double hp = 1.0;
    for (int j = 0; j <= k; ++j) {
      q[j] += c[k] * binom(k, j) * hp * apow[k - j];
      hp *= h;
    }
  }
  std::vector<double> bz(c.size());
  for (int k = 0; k <= d; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += binom(k, j) / binom(d, j) * q[j];
    bz[k] = acc;
  }
  return bz;
}

int sign_variations(const std::vector<double>& b) {
  int v = 0, last = 0;
  for (double x : b) {
    const int s = x > 0 ? 1 : (x < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

double refine(const std::vector<double>& c, double lo, double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = horner(c, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void isolate(const std::vector<double>& c, double a, double b, double res, int depth, std::vector<double>& out) {
  const std::vector<double> bz = bernstein_on(c, a, b);
  const int v = sign_variations(bz);
  if (v == 0) return;
  const double fa = horner(c, a), fb = horner(c, b);
  if (v == 1 && fa != 0.0 && fb != 0.0 && ((fa > 0) != (fb > 0))) {
    out.push_back(refine(c, a, b, fa));
    return;
  }
  if (b - a <= res || depth > 200) {
    out.push_back(0.5 * (a + b));
    return;
  }
  const double m = 0.5 * (a + b);
  if (horner(c, m) == 0.0) out.push_back(m);
  isolate(c, a, m, res, depth + 1, out);
  isolate(c, m, b, res, depth + 1, out);
}

}  // namespace

std::vector<double> real_roots(const Polynomial& p, double a, double b, double resolution) {
  if (p.nvars() != 1) throw InvalidArgument("real_roots expects a univariate polynomial");
  if (!(a <= b)) throw InvalidArgument("empty root interval");
  std::vector<double> c = univariate_coeffs(p.trimmed());
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  std::vector<double> out;
  if (c.size() == 1) return out;  // nonzero constant or the zero polynomial: no isolated roots
  if (horner(c, a) == 0.0) out.push_back(a);
  if (horner(c, b) == 0.0 && b != a) out.push_back(b);
  isolate(c, a, b, resolution * std::max(1.0, b - a), 0, out);
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double r : out)
    if (uniq.empty() || r - uniq.back() > resolution * 4) uniq.push_back(r);
  return uniq;
}

std::vector<std::pair<double, double>> sublevel_intervals(const Polynomial& p, double delta, double a, double b) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  std::vector<double> c = univariate_coeffs(p);
  std::vector<double> cuts = {a, b};
  for (double s : {-delta, delta}) {
    Polynomial q = p - Polynomial::constant(1, s);
    for (double r : real_roots(q, a, b)) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double m = 0.5 * (cuts[k] + cuts[k + 1]);
    if (std::abs(horner(c, m)) < delta) {
      if (!out.empty() && out.back().second == cuts[k] && std::abs(horner(c, cuts[k])) < delta)
        out.back().second = cuts[k + 1];
      else
        out.emplace_back(cuts[k], cuts[k + 1]);
    }
  }
  // isolated points where |p| < delta cannot occur for an open condition, except at a == b
  if (a == b && std::abs(horner(c, a)) < delta) out.emplace_back(a, a);
  return out;
}

}  // namespace flatcover
