#include "flatcover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatcover {

Parallelogram Parallelogram::from_box(const Box& b) {
  const int n = b.dim();
  return {b.center(), Mat::Identity(n, n), 0.5 * (b.hi - b.lo)};
}

Parallelogram Parallelogram::cube(int n, double half) {
  return {Vec::Zero(n), Mat::Identity(n, n), Vec::Constant(n, half)};
}

Parallelogram Parallelogram::interval(double a, double b) {
  Vec c(1), l(1);
  c[0] = 0.5 * (a + b);
  l[0] = 0.5 * (b - a);
  return {c, Mat::Identity(1, 1), l};
}

namespace {

// |u_i . (x - b)| without a temporary; these sit in the inner loops of coverage and overlap.
double projection(const Parallelogram& r, const Vec& x, int i) {
  double s = 0.0;
  for (int j = 0; j < r.dim(); ++j) s += r.normals(j, i) * (x[j] - r.center[j]);
  return std::abs(s);
}

}  // namespace

bool Parallelogram::contains(const Vec& x, double tol) const {
  for (int i = 0; i < dim(); ++i)
    if (projection(*this, x, i) > halflens[i] + tol) return false;
  return true;
}

bool Parallelogram::contains_interior(const Vec& x, double rel_margin) const {
  for (int i = 0; i < dim(); ++i)
    if (projection(*this, x, i) >= halflens[i] * (1.0 - rel_margin)) return false;
  return true;
}

Mat Parallelogram::edges() const {
  // U^T E = diag(l)  =>  E = U^{-T} diag(l)
  Mat e = normals.transpose().inverse();
  for (int i = 0; i < dim(); ++i) e.col(i) *= halflens[i];
  return e;
}

std::vector<Vec> Parallelogram::vertices() const {
  const int n = dim();
  const Mat e = edges();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(1) << n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec v = center;
    for (int i = 0; i < n; ++i) v += ((mask >> i) & 1 ? 1.0 : -1.0) * e.col(i);
    out.push_back(v);
  }
  return out;
}

Box Parallelogram::bounding_box() const {
  const Mat e = edges();
  Vec ext = e.cwiseAbs().rowwise().sum();
  return {center - ext, center + ext};
}

bool Parallelogram::is_axis_aligned(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (i != j && std::abs(normals(j, i)) > tol) return false;
  return true;
}

void Parallelogram::validate(double tol_det) const {
  const int n = dim();
  if (normals.rows() != n || normals.cols() != n || halflens.size() != n)
    throw InvalidArgument("parallelogram fields have inconsistent dimensions");
  for (int i = 0; i < n; ++i) {
    if (std::abs(normals.col(i).norm() - 1.0) > 1e-9) throw InvalidArgument("parallelogram normal is not unit length");
    if (!(halflens[i] > 0.0) || !std::isfinite(halflens[i])) throw InvalidArgument("parallelogram half-length must be positive");
  }
  if (std::abs(normals.determinant()) < tol_det) throw InvalidArgument("parallelogram basis is near-singular");
}

AffineMap chart(const Parallelogram& r) {
  if (std::abs(r.normals.determinant()) < 1e-12) throw InvalidArgument("near-singular parallelogram basis");
  return {r.edges(), r.center};
}

Parallelogram image_of_cube(const AffineMap& m) {
  // Columns of M are edge vectors; normals are the normalized rows of M^{-1}.
  const int n = m.dim();
  Mat inv = m.matrix.inverse();
  Parallelogram r;
  r.center = m.offset;
  r.normals.resize(n, n);
  r.halflens.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec row = inv.row(i).transpose();
    const double nr = row.norm();
    r.normals.col(i) = row / nr;
    r.halflens[i] = 1.0 / nr;
  }
  return r;
}

Parallelogram map_parallelogram(const AffineMap& m, const Parallelogram& r) {
  return image_of_cube(m.compose(chart(r)));
}

Parallelogram dilate(const Parallelogram& r, double c) {
  Parallelogram out = r;
  out.halflens *= c;
  return out;
}

Parallelogram thicken(const Parallelogram& r, double delta) {
  Parallelogram out = r;
  out.halflens.array() += delta;
  return out;
}

Parallelogram pad_to_width(const Parallelogram& r, double delta) {
  Parallelogram out = r;
  for (int i = 0; i < out.dim(); ++i) out.halflens[i] = std::max(out.halflens[i], delta);
  return out;
}

double volume(const Parallelogram& r) {
  return std::pow(2.0, r.dim()) * std::abs(r.edges().determinant());
}

namespace {

std::vector<Parallelogram> grid_of(const Parallelogram& r, const std::vector<int>& counts, const Vec& piece_half) {
  const int n = r.dim();
  Mat unit_edges = r.edges();
  for (int i = 0; i < n; ++i) unit_edges.col(i) /= r.halflens[i];
  std::vector<Parallelogram> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  out.reserve(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % static_cast<std::size_t>(counts[i]));
      rem /= static_cast<std::size_t>(counts[i]);
    }
    Vec c = r.center;
    for (int i = 0; i < n; ++i) {
      const double off = (2.0 * idx[i] + 1.0 - counts[i]) * piece_half[i];
      c += off * unit_edges.col(i);
    }
    out.push_back({c, r.normals, piece_half});
  }
  return out;
}

}  // namespace

std::vector<Parallelogram> tile_cubes(const Parallelogram& r, double s) {
  if (!(s > 0.0)) throw InvalidArgument("tile side must be positive");
  const int n = r.dim();
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) counts[i] = std::max(1, static_cast<int>(std::ceil(2.0 * r.halflens[i] / s - 1e-12)));
  return grid_of(r, counts, Vec::Constant(n, 0.5 * s));
}

std::vector<Parallelogram> partition_grid(const Parallelogram& r, const std::vector<int>& counts) {
  const int n = r.dim();
  if (static_cast<int>(counts.size()) != n) throw InvalidArgument("partition needs one count per axis");
  Vec half(n);
  for (int i = 0; i < n; ++i) {
    if (counts[i] < 1) throw InvalidArgument("partition counts must be positive");
    half[i] = r.halflens[i] / counts[i];
  }
  return grid_of(r, counts, half);
}

std::pair<Parallelogram, Parallelogram> bisect(const Parallelogram& r, int axis) {
  Parallelogram a = r, b = r;
  const Vec step = r.edges().col(axis) * 0.5;
  a.halflens[axis] *= 0.5;
  b.halflens[axis] *= 0.5;
  a.center -= step;
  b.center += step;
  return {a, b};
}

bool contains(const Parallelogram& outer, const Parallelogram& inner, double tol) {
  for (const Vec& v : inner.vertices())
    if (!outer.contains(v, tol)) return false;
  return true;
}

bool equivalent(const Parallelogram& s, const Parallelogram& r, double c) {
  if (c < 1.0) throw InvalidArgument("equivalence constant must be at least 1");
  const double tol = 1e-12;
  return contains(s, dilate(r, 1.0 / c), tol) && contains(dilate(r, c), s, tol);
}

Polytope halfspaces(const Parallelogram& r) {
  Polytope p;
  for (int i = 0; i < r.dim(); ++i) {
    const Vec u = r.normals.col(i);
    const double c = u.dot(r.center);
    p.push_back({u, c + r.halflens[i]});
    p.push_back({-u, -c + r.halflens[i]});
  }
  return p;
}

Polytope halfspaces(const Box& b) {
  Polytope p;
  const int n = b.dim();
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    p.push_back({e, b.hi[i]});
    p.push_back({-e, -b.lo[i]});
  }
  return p;
}

std::vector<Vec> polytope_vertices(const Polytope& p, int n, double tol) {
  if (n < 1 || n > 3) throw Unsupported("vertex enumeration is implemented for dimension <= 3");
  std::vector<Vec> out;
  const int m = static_cast<int>(p.size());
  std::vector<int> pick(static_cast<std::size_t>(n));
  auto feasible = [&](const Vec& x) {
    for (const auto& h : p)
      if (h.a.dot(x) > h.b + tol * (1.0 + std::abs(h.b))) return false;
    return true;
  };
  auto push_unique = [&](const Vec& x) {
    for (const Vec& y : out)
      if ((x - y).lpNorm<Eigen::Infinity>() <= 1e-11) return;
    out.push_back(x);
  };
  // iterate n-subsets
  std::vector<int> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[i] = i;
  if (m < n) return out;
  while (true) {
    Mat a(n, n);
    Vec b(n);
    for (int i = 0; i < n; ++i) {
      a.row(i) = p[c[i]].a.transpose();
      b[i] = p[c[i]].b;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.isInvertible()) {
      Vec x = lu.solve(b);
      if (x.allFinite() && feasible(x)) push_unique(x);
    }
    int k = n - 1;
    while (k >= 0 && c[k] == m - n + k) --k;
    if (k < 0) break;
    ++c[k];
    for (int i = k + 1; i < n; ++i) c[i] = c[i - 1] + 1;
  }
  return out;
}

namespace {

// Dense two-phase simplex: maximize c.z subject to A z <= b, z >= 0.
class Simplex {
 public:
  Simplex(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), basis_(m_), nonbasis_(n_ + 1),
        d_(static_cast<std::size_t>(m_ + 2), std::vector<double>(static_cast<std::size_t>(n_ + 2), 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) d_[i][j] = a[i][j];
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  /// Returns +inf if unbounded, -inf if infeasible.
  double solve(std::vector<double>& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(1) || d_[m_ + 1][n_ + 1] < -kEps) return -std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i)
        if (basis_[i] == -1) {
          int s = -1;
          for (int j = 0; j <= n_; ++j)
            if (s == -1 || d_[i][j] < d_[i][s] || (d_[i][j] == d_[i][s] && nonbasis_[j] < nonbasis_[s])) s = j;
          pivot(i, s);
        }
    }
    if (!run(2)) return std::numeric_limits<double>::infinity();
    x.assign(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = d_[i][n_ + 1];
    return d_[m_][n_ + 1];
  }

 private:
  static constexpr double kEps = 1e-11;
  int m_, n_;
  std::vector<int> basis_, nonbasis_;
  std::vector<std::vector<double>> d_;

  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r)
        for (int j = 0; j < n_ + 2; ++j)
          if (j != s) d_[i][j] -= d_[r][j] * d_[i][s] * inv;
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i][s] *= -inv;
    d_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    for (int guard = 0; guard < 10000; ++guard) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || d_[x][j] < d_[x][s] || (d_[x][j] == d_[x][s] && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (d_[x][s] > -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s];
        const double rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }
};

}  // namespace

ChebyshevResult chebyshev_center(const Polytope& p, int n, double box_half) {
  // variables y = x + H (>= 0) and radius r >= 0
  const double h = box_half;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& hs : p) {
    std::vector<double> row(static_cast<std::size_t>(n + 1));
    double shift = 0.0;
    for (int j = 0; j < n; ++j) {
      row[j] = hs.a[j];
      shift += hs.a[j] * h;
    }
    row[n] = hs.a.norm();
    a.push_back(row);
    b.push_back(hs.b + shift);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> row(static_cast<std::size_t>(n + 1), 0.0);
    row[j] = 1.0;
    a.push_back(row);
    b.push_back(2.0 * h);
  }
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[n] = 1.0;
  std::vector<double> z;
  Simplex lp(a, b, c);
  const double val = lp.solve(z);
  ChebyshevResult res;
  if (!std::isfinite(val)) return res;
  res.feasible = true;
  res.radius = val;
  res.center = Vec(n);
  for (int j = 0; j < n; ++j) res.center[j] = z[j] - h;
  return res;
}

bool interiors_intersect(const Parallelogram& a, const Parallelogram& b, double tol) {
  const int n = a.dim();
  std::vector<Vec> axes;
  for (int i = 0; i < n; ++i) {
    axes.push_back(a.normals.col(i));
    axes.push_back(b.normals.col(i));
  }
  if (n == 3) {
    const Mat ea = a.edges(), eb = b.edges();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d c = Eigen::Vector3d(ea.col(i)).cross(Eigen::Vector3d(eb.col(j)));
        if (c.norm() > 1e-12) axes.push_back(Vec(c.normalized()));
      }
  } else if (n > 3) {
    throw Unsupported("separating-axis test is implemented for dimension <= 3");
  }
  const Mat ea = a.edges(), eb = b.edges();
  for (const Vec& ax : axes) {
    const double ca = ax.dot(a.center), cb = ax.dot(b.center);
    const double ra = (ea.transpose() * ax).cwiseAbs().sum();
    const double rb = (eb.transpose() * ax).cwiseAbs().sum();
    if (std::abs(ca - cb) >= ra + rb - tol) return false;
  }
  return true;
}

}  // namespace flatcover
