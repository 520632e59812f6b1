#include "flatcover/polynomial.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <queue>
#include <sstream>

namespace flatcover {

namespace {

std::vector<std::size_t> make_strides(int nvars, int degree) {
  std::vector<std::size_t> s(static_cast<std::size_t>(nvars), 1);
  for (int i = nvars - 2; i >= 0; --i) s[i] = s[i + 1] * static_cast<std::size_t>(degree + 1);
  return s;
}

std::size_t tensor_size(int nvars, int degree) {
  std::size_t n = 1;
  for (int i = 0; i < nvars; ++i) n *= static_cast<std::size_t>(degree + 1);
  return n;
}

void check_axis(const Polynomial& p, int axis) {
  if (axis < 0 || axis >= p.nvars()) {
    std::ostringstream os;
    os << "invalid axis " << axis << " for polynomial in " << p.nvars() << " variables";
    throw InvalidArgument(os.str());
  }
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Polynomial::Polynomial(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  if (nvars < 1) throw InvalidArgument("polynomial needs at least one variable");
  if (degree < 0) throw InvalidArgument("negative degree bound");
  coeffs_.assign(tensor_size(nvars, degree), 0.0);
  stride_ = make_strides(nvars, degree);
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars, 0);
  p.coeffs_[0] = c;
  return p;
}

Polynomial Polynomial::variable(int nvars, int axis) {
  Polynomial p(nvars, 1);
  check_axis(p, axis);
  MultiIndex a(static_cast<std::size_t>(nvars), 0);
  a[axis] = 1;
  p.set_coeff(a, 1.0);
  return p;
}

Polynomial Polynomial::affine(double c0, std::span<const double> gradient) {
  const int n = static_cast<int>(gradient.size());
  Polynomial p(n, 1);
  MultiIndex a(static_cast<std::size_t>(n), 0);
  p.set_coeff(a, c0);
  for (int j = 0; j < n; ++j) {
    a.assign(static_cast<std::size_t>(n), 0);
    a[j] = 1;
    p.set_coeff(a, gradient[j]);
  }
  return p;
}

std::size_t Polynomial::flat_index(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_) throw InvalidArgument("multi-index length mismatch");
  std::size_t k = 0;
  for (int i = 0; i < nvars_; ++i) {
    if (alpha[i] < 0 || alpha[i] > degree_) throw InvalidArgument("multi-index exceeds degree bound");
    k += static_cast<std::size_t>(alpha[i]) * stride_[i];
  }
  return k;
}

void Polynomial::decode(std::size_t k, MultiIndex& alpha) const {
  alpha.resize(static_cast<std::size_t>(nvars_));
  for (int i = 0; i < nvars_; ++i) {
    alpha[i] = static_cast<int>(k / stride_[i]);
    k %= stride_[i];
  }
}

double Polynomial::coeff(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != nvars_) throw InvalidArgument("multi-index length mismatch");
  int tot = 0;
  for (int v : alpha) {
    if (v < 0) throw InvalidArgument("negative exponent");
    tot += v;
  }
  if (tot > degree_) return 0.0;
  return coeffs_[flat_index(alpha)];
}

void Polynomial::set_coeff(const MultiIndex& alpha, double c) {
  int tot = 0;
  for (int v : alpha) tot += v;
  if (tot > degree_) throw InvalidArgument("term exceeds degree bound");
  if (!std::isfinite(c)) throw InvalidArgument("non-finite coefficient");
  coeffs_[flat_index(alpha)] = c;
}

void Polynomial::add_coeff(const MultiIndex& alpha, double c) {
  set_coeff(alpha, coeff(alpha) + c);
}

int Polynomial::effective_degree() const {
  int best = -1;
  for_each_term([&](const MultiIndex& a, double c) {
    if (c != 0.0) {
      int tot = 0;
      for (int v : a) tot += v;
      best = std::max(best, tot);
    }
  });
  return best;
}

bool Polynomial::is_zero(double tol) const {
  for (double c : coeffs_)
    if (std::abs(c) > tol) return false;
  return true;
}

Polynomial Polynomial::with_degree(int degree) const {
  Polynomial q(nvars_, degree);
  for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    int tot = 0;
    for (int v : a) tot += v;
    if (tot > degree) throw InvalidArgument("with_degree would drop nonzero terms");
    q.coeffs_[q.flat_index(a)] = c;
  });
  return q;
}

Polynomial Polynomial::trimmed() const {
  return with_degree(std::max(0, effective_degree()));
}

double Polynomial::horner(int var, std::size_t offset, std::span<const double> x) const {
  const double xv = x[var];
  double acc = 0.0;
  if (var == nvars_ - 1) {
    for (int k = degree_; k >= 0; --k) acc = acc * xv + coeffs_[offset + static_cast<std::size_t>(k)];
    return acc;
  }
  for (int k = degree_; k >= 0; --k)
    acc = acc * xv + horner(var + 1, offset + static_cast<std::size_t>(k) * stride_[var], x);
  return acc;
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != nvars_) {
    std::ostringstream os;
    os << "point has " << x.size() << " coordinates, polynomial has " << nvars_ << " variables";
    throw InvalidArgument(os.str());
  }
  return horner(0, 0, x);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw InvalidArgument("variable count mismatch in sum");
  if (o.degree_ > degree_) *this = with_degree(o.degree_);
  o.for_each_term([&](const MultiIndex& a, double c) {
    if (c != 0.0) coeffs_[flat_index(a)] += c;
  });
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw InvalidArgument("variable count mismatch in difference");
  if (o.degree_ > degree_) *this = with_degree(o.degree_);
  o.for_each_term([&](const MultiIndex& a, double c) {
    if (c != 0.0) coeffs_[flat_index(a)] -= c;
  });
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw InvalidArgument("variable count mismatch in product");
  Polynomial r(a.nvars_, a.degree_ + b.degree_);
  std::vector<std::pair<MultiIndex, double>> bt;
  b.for_each_term([&](const MultiIndex& beta, double c) {
    if (c != 0.0) bt.emplace_back(beta, c);
  });
  MultiIndex g(static_cast<std::size_t>(a.nvars_));
  a.for_each_term([&](const MultiIndex& alpha, double ca) {
    if (ca == 0.0) return;
    for (const auto& [beta, cb] : bt) {
      for (int i = 0; i < a.nvars_; ++i) g[i] = alpha[i] + beta[i];
      r.coeffs_[r.flat_index(g)] += ca * cb;
    }
  });
  return r;
}

double Polynomial::l1_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += std::abs(c);
  return s;
}

double Polynomial::max_abs_coeff() const {
  double s = 0.0;
  for (double c : coeffs_) s = std::max(s, std::abs(c));
  return s;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) return false;
  const int d = std::max(a.degree_, b.degree_);
  bool eq = true;
  Polynomial aa = a.degree_ == d ? a : a.with_degree(d);
  Polynomial bb = b.degree_ == d ? b : b.with_degree(d);
  for (std::size_t k = 0; k < aa.coeffs_.size() && eq; ++k) eq = aa.coeffs_[k] == bb.coeffs_[k];
  return eq;
}

// ---------------------------------------------------------------------------

AffineMap AffineMap::identity(int n) {
  return {Mat::Identity(n, n), Vec::Zero(n)};
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  return {matrix * inner.matrix, matrix * inner.offset + offset};
}

AffineMap AffineMap::inverse() const {
  Eigen::FullPivLU<Mat> lu(matrix);
  if (!lu.isInvertible()) throw DegenerateInput("affine map is not invertible");
  Mat inv = lu.inverse();
  return {inv, -inv * offset};
}

double AffineMap::bound() const {
  double b = 0.0;
  if (matrix.size() > 0) b = matrix.cwiseAbs().maxCoeff();
  if (offset.size() > 0) b = std::max(b, offset.cwiseAbs().maxCoeff());
  return b;
}

bool AffineMap::is_diagonal(double tol) const {
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j)
      if (i != j && std::abs(matrix(i, j)) > tol) return false;
  return true;
}

Box Box::cube(int n, double half) {
  return {Vec::Constant(n, -half), Vec::Constant(n, half)};
}

// ---------------------------------------------------------------------------

double eval(const Polynomial& p, std::span<const double> x) { return p(x); }

Polynomial partial(const Polynomial& p, int axis) {
  check_axis(p, axis);
  Polynomial r(p.nvars(), std::max(0, p.degree() - 1));
  MultiIndex b;
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0 || a[axis] == 0) return;
    b = a;
    b[axis] -= 1;
    r.add_coeff(b, c * a[axis]);
  });
  return r;
}

Polynomial gradient_component(const Polynomial& p, int axis) { return partial(p, axis); }

namespace {

Polynomial det_rec(std::vector<std::vector<Polynomial>> m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  Polynomial acc = Polynomial::constant(m[0][0].nvars(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    Polynomial t = m[0][j] * det_rec(std::move(minor));
    if (j % 2 == 0)
      acc += t;
    else
      acc -= t;
  }
  return acc;
}

}  // namespace

Polynomial hessian_det(const Polynomial& p) {
  const int n = p.nvars();
  std::vector<Polynomial> first;
  for (int i = 0; i < n; ++i) first.push_back(partial(p, i));
  std::vector<std::vector<Polynomial>> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[i].push_back(j < i ? h[j][i] : partial(first[i], j));
  return det_rec(std::move(h));
}

namespace {

// Coefficients of t -> q(a*t + b) along one axis of the tensor, in place.
void axis_affine_substitute(std::vector<double>& c, int nvars, int degree, int axis, double a, double b) {
  const std::vector<std::size_t> st = make_strides(nvars, degree);
  const std::size_t total = c.size();
  const std::size_t s = st[axis];
  std::vector<double> line(static_cast<std::size_t>(degree + 1)), out(line.size());
  for (std::size_t base = 0; base < total; ++base) {
    if ((base / s) % static_cast<std::size_t>(degree + 1) != 0) continue;
    for (int k = 0; k <= degree; ++k) line[k] = c[base + k * s];
    std::fill(out.begin(), out.end(), 0.0);
    // (a t + b)^k = sum_j C(k,j) a^j b^{k-j} t^j
    for (int k = 0; k <= degree; ++k) {
      if (line[k] == 0.0) continue;
      double bp = 1.0;
      std::vector<double> pw(static_cast<std::size_t>(k + 1));
      for (int j = k; j >= 0; --j) {
        pw[j] = bp;
        bp *= b;
      }
      double ap = 1.0;
      for (int j = 0; j <= k; ++j) {
        out[j] += line[k] * binom(k, j) * ap * pw[j];
        ap *= a;
      }
    }
    for (int k = 0; k <= degree; ++k) c[base + k * s] = out[k];
  }
}

}  // namespace

Polynomial compose_affine(const Polynomial& p, const AffineMap& m) {
  const int n = p.nvars();
  if (m.dim() != n || m.matrix.rows() != n || m.matrix.cols() != n)
    throw InvalidArgument("affine map dimension does not match polynomial");
  const int d = p.degree();
  if (m.is_diagonal()) {
    std::vector<double> c = p.raw();
    for (int i = 0; i < n; ++i) axis_affine_substitute(c, n, d, i, m.matrix(i, i), m.offset[i]);
    Polynomial r(n, d);
    MultiIndex a;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] == 0.0) continue;
      r.decode(k, a);
      int tot = 0;
      for (int v : a) tot += v;
      if (tot <= d) r.set_coeff(a, c[k]);
    }
    return r;
  }
  // powers[i][k] = (row_i . x + w_i)^k
  std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) g[j] = m.matrix(i, j);
    Polynomial y = Polynomial::affine(m.offset[i], g);
    powers[i].push_back(Polynomial::constant(n, 1.0));
    for (int k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * y);
  }
  Polynomial r(n, d);
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    Polynomial t = powers[0][a[0]];
    for (int i = 1; i < n; ++i)
      if (a[i] > 0) t = t * powers[i][a[i]];
    t *= c;
    r += t.with_degree(std::max(0, t.effective_degree()));
  });
  return r.with_degree(d);
}

// ---------------------------------------------------------------------------
// Bernstein enclosures

namespace {

struct BNode {
  std::vector<double> b;  // tensor-product Bernstein coefficients, (d+1)^n
  std::vector<double> lo, hi;  // sub-box of [0,1]^n
  int depth = 0;
  double key = 0.0;
};

struct BernsteinCtx {
  int n = 0;
  int d = 0;
  std::vector<std::size_t> st;
  double margin = 0.0;
};

// Power coefficients of p on [0,1]^n after pulling the box back, then Bernstein form.
std::vector<double> to_bernstein(const Polynomial& p, const Box& box, BernsteinCtx& ctx) {
  const int n = p.nvars();
  const int d = p.degree();
  if (box.dim() != n) throw InvalidArgument("box dimension does not match polynomial");
  for (int i = 0; i < n; ++i)
    if (!(box.lo[i] <= box.hi[i]) || !std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i]))
      throw InvalidArgument("box must be nonempty and bounded");
  std::vector<double> c = p.raw();
  double reach = 1.0, l1_in = 0.0;
  for (int i = 0; i < n; ++i) reach = std::max({reach, std::abs(box.lo[i]), std::abs(box.hi[i])});
  for (double v : c) l1_in += std::abs(v);
  for (int i = 0; i < n; ++i) axis_affine_substitute(c, n, d, i, box.hi[i] - box.lo[i], box.lo[i]);
  double l1 = 0.0;
  for (double v : c) l1 += std::abs(v);
  ctx.n = n;
  ctx.d = d;
  ctx.st = make_strides(n, d);
  const std::size_t s0 = static_cast<std::size_t>(d + 1);
  std::vector<double> line(s0), out(s0);
  for (int ax = 0; ax < n; ++ax) {
    const std::size_t s = ctx.st[ax];
    for (std::size_t base = 0; base < c.size(); ++base) {
      if ((base / s) % s0 != 0) continue;
      for (int k = 0; k <= d; ++k) line[k] = c[base + k * s];
      for (int k = 0; k <= d; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += binom(k, j) / binom(d, j) * line[j];
        out[k] = acc;
      }
      for (int k = 0; k <= d; ++k) c[base + k * s] = out[k];
    }
  }
  // rounding slack from substitution and basis change
  ctx.margin = 8.0 * DBL_EPSILON * (l1 + l1_in * std::pow(reach, d)) * static_cast<double>((d + 1) * n + 1);
  return c;
}

// Split along `axis` at the midpoint (de Casteljau), returning left and right halves.
void split(const std::vector<double>& b, const BernsteinCtx& ctx, int axis, std::vector<double>& left,
           std::vector<double>& right) {
  const int d = ctx.d;
  const std::size_t s = ctx.st[axis];
  const std::size_t s0 = static_cast<std::size_t>(d + 1);
  left = b;
  right = b;
  std::vector<double> w(s0);
  for (std::size_t base = 0; base < b.size(); ++base) {
    if ((base / s) % s0 != 0) continue;
    for (int k = 0; k <= d; ++k) w[k] = b[base + k * s];
    // left[k] = w after k steps at index 0; right[d-k] = w after k steps at last index
    left[base] = w[0];
    right[base + d * s] = w[d];
    for (int r = 1; r <= d; ++r) {
      for (int k = 0; k <= d - r; ++k) w[k] = 0.5 * (w[k] + w[k + 1]);
      left[base + r * s] = w[0];
      right[base + (d - r) * s] = w[d - r];
    }
  }
}

// Values at the 2^n box corners are exact Bernstein vertex coefficients.
template <class F>
void for_each_vertex(const std::vector<double>& b, const BernsteinCtx& ctx, F&& f) {
  const int n = ctx.n;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) k += static_cast<std::size_t>(ctx.d) * ctx.st[i];
    f(b[k]);
  }
}

struct SupResult {
  double upper = 0.0;  // certified upper bound of sup g
  double lower = 0.0;  // attained value (lower bound of sup g)
  bool capped = false;
};

// Upper bound of sup over the box of value(b-coefficient) where value is s*b (s=+1 max, s=-1 -min)
// or |b| (abs mode, s=0).
SupResult bernstein_sup(const std::vector<double>& b0, const BernsteinCtx& ctx, int sign, const RangeOptions& opt) {
  auto val = [sign](double v) { return sign == 0 ? std::abs(v) : sign * v; };
  auto node_key = [&](const std::vector<double>& b) {
    double m = -INFINITY;
    for (double v : b) m = std::max(m, val(v));
    return m;
  };
  auto cmp = [](const BNode& a, const BNode& b) { return a.key < b.key; };
  std::priority_queue<BNode, std::vector<BNode>, decltype(cmp)> pq(cmp);
  double best = -INFINITY;
  BNode root;
  root.b = b0;
  root.lo.assign(static_cast<std::size_t>(ctx.n), 0.0);
  root.hi.assign(static_cast<std::size_t>(ctx.n), 1.0);
  root.key = node_key(root.b);
  for_each_vertex(root.b, ctx, [&](double v) { best = std::max(best, val(v)); });
  pq.push(std::move(root));
  SupResult res;
  double capped_max = -INFINITY;
  const int cap_total = opt.max_depth * std::max(1, ctx.n);
  const int pop_budget = 4096;
  int pops = 0;
  while (!pq.empty()) {
    const double top = pq.top().key;
    const double tol = std::max(opt.tol_abs, opt.tol_rel * std::max(std::abs(best), std::abs(top)));
    if (top - best <= tol) break;
    if (++pops > pop_budget) {
      res.capped = true;
      break;
    }
    BNode node = pq.top();
    pq.pop();
    if (node.depth >= cap_total) {
      capped_max = std::max(capped_max, node.key);
      res.capped = true;
      continue;
    }
    int axis = 0;
    double wmax = -1.0;
    for (int i = 0; i < ctx.n; ++i) {
      const double w = node.hi[i] - node.lo[i];
      if (w > wmax) {
        wmax = w;
        axis = i;
      }
    }
    BNode l, r;
    split(node.b, ctx, axis, l.b, r.b);
    const double mid = 0.5 * (node.lo[axis] + node.hi[axis]);
    l.lo = node.lo;
    l.hi = node.hi;
    l.hi[axis] = mid;
    r.lo = node.lo;
    r.hi = node.hi;
    r.lo[axis] = mid;
    l.depth = r.depth = node.depth + 1;
    l.key = node_key(l.b);
    r.key = node_key(r.b);
    for_each_vertex(l.b, ctx, [&](double v) { best = std::max(best, val(v)); });
    for_each_vertex(r.b, ctx, [&](double v) { best = std::max(best, val(v)); });
    pq.push(std::move(l));
    pq.push(std::move(r));
  }
  double up = capped_max;
  if (!pq.empty()) up = std::max(up, pq.top().key);
  res.upper = std::max(up, best) + ctx.margin;
  res.lower = best - ctx.margin;
  return res;
}

}  // namespace

RangeBound range_bound(const Polynomial& p, const Box& box, const RangeOptions& opt) {
  BernsteinCtx ctx;
  std::vector<double> b = to_bernstein(p, box, ctx);
  SupResult hi = bernstein_sup(b, ctx, +1, opt);
  SupResult lo = bernstein_sup(b, ctx, -1, opt);
  RangeBound r;
  r.hi = hi.upper;
  r.lo = -lo.upper;
  r.certified = true;
  r.depth_capped = hi.capped || lo.capped;
  return r;
}

RangeBound abs_range_bound(const Polynomial& p, const Box& box, const RangeOptions& opt) {
  BernsteinCtx ctx;
  std::vector<double> b = to_bernstein(p, box, ctx);
  SupResult s = bernstein_sup(b, ctx, 0, opt);
  RangeBound r;
  r.hi = s.upper;
  r.lo = -s.upper;
  r.certified = true;
  r.depth_capped = s.capped;
  return r;
}

AffineSplit strip_affine(const Polynomial& p) {
  AffineSplit s{Polynomial(p.nvars(), std::min(1, p.degree())), Polynomial(p.nvars(), p.degree())};
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    int tot = 0;
    for (int v : a) tot += v;
    if (tot <= 1)
      s.affine.set_coeff(a, c);
    else
      s.rest.set_coeff(a, c);
  });
  return s;
}

Normalized normalize(const Polynomial& p) {
  if (p.is_zero()) throw DegenerateInput("cannot normalize the zero polynomial");
  RangeBound r = abs_range_bound(p, Box::cube(p.nvars()));
  Normalized out;
  out.scale = r.hi;
  out.unit = p * (1.0 / r.hi);
  return out;
}

Polynomial restrict_axis(const Polynomial& p, int axis, double value) {
  check_axis(p, axis);
  if (p.nvars() == 1) throw InvalidArgument("cannot restrict a univariate polynomial to a point polynomial");
  Polynomial r(p.nvars() - 1, p.degree());
  MultiIndex b;
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    b.clear();
    for (int i = 0; i < p.nvars(); ++i)
      if (i != axis) b.push_back(a[i]);
    r.add_coeff(b, c * std::pow(value, a[axis]));
  });
  return r;
}

Polynomial embed_variables(const Polynomial& p, int nvars, std::span<const int> new_vars) {
  if (static_cast<int>(new_vars.size()) != p.nvars()) throw InvalidArgument("embedding needs one target per variable");
  Polynomial r(nvars, p.degree());
  MultiIndex b(static_cast<std::size_t>(nvars));
  p.for_each_term([&](const MultiIndex& a, double c) {
    if (c == 0.0) return;
    std::fill(b.begin(), b.end(), 0);
    for (int i = 0; i < p.nvars(); ++i) {
      if (new_vars[i] < 0 || new_vars[i] >= nvars) throw InvalidArgument("embedding target out of range");
      b[new_vars[i]] += a[i];
    }
    r.add_coeff(b, c);
  });
  return r;
}

Polynomial univariate(std::span<const double> coeffs) {
  Polynomial p(1, std::max<int>(0, static_cast<int>(coeffs.size()) - 1));
  for (std::size_t k = 0; k < coeffs.size(); ++k) p.set_coeff({static_cast<int>(k)}, coeffs[k]);
  return p;
}

std::vector<double> univariate_coeffs(const Polynomial& p) {
  if (p.nvars() != 1) throw InvalidArgument("expected a univariate polynomial");
  return p.raw();
}

}  // namespace flatcover
