#include "core/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "core/delaunay.hpp"
#include "core/error.hpp"

namespace presto {

namespace {

struct TupleHash {
  size_t operator()(const std::array<int, 4>& a) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : a) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

using SimplexMap = std::unordered_map<std::array<int, 4>, int, TupleHash>;

std::array<int, 4> make_key(const int* vs, int count) {
  std::array<int, 4> k{-1, -1, -1, -1};
  for (int i = 0; i < count; ++i) k[static_cast<size_t>(i)] = vs[i];
  std::sort(k.begin(), k.begin() + count);
  return k;
}

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.filt != b.filt) return a.filt < b.filt;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.v < b.v;
}

template <typename Real>
constexpr double real_epsilon() {
  return 2.220446049250313e-16;
}
template <>
constexpr double real_epsilon<__float128>() {
  return 1.925929944387236e-34;
}

// Solve the mm x mm Gram system for the circumcenter offsets. Returns false
// when the determinant cancels at this precision.
template <typename Real>
bool circum_solve(const double e[3][3], int mm, int r, double y_out[3]) {
  Real g[3][3], rhs[3];
  for (int i = 0; i < mm; ++i) {
    Real sq = 0;
    for (int j = 0; j < mm; ++j) {
      Real s = 0;
      for (int c = 0; c < r; ++c) s += Real(e[i][c]) * Real(e[j][c]);
      g[i][j] = s;
    }
    for (int c = 0; c < r; ++c) sq += Real(e[i][c]) * Real(e[i][c]);
    rhs[i] = sq / 2;
  }
  // the Gram determinant of a thin simplex cancels badly when expanded from
  // g; the squared-minor forms stay accurate down to far smaller angles and
  // cannot go negative
  Real y[3] = {0, 0, 0};
  Real det = 0, mag;
  if (mm == 1) {
    det = g[0][0];
    mag = det;
    y[0] = rhs[0];
  } else if (mm == 2) {
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        Real minor = Real(e[0][i]) * Real(e[1][j]) - Real(e[0][j]) * Real(e[1][i]);
        det += minor * minor;
      }
    mag = g[0][0] * g[1][1];
    y[0] = rhs[0] * g[1][1] - g[0][1] * rhs[1];
    y[1] = g[0][0] * rhs[1] - rhs[0] * g[1][0];
  } else {
    Real triple = Real(e[0][0]) * (Real(e[1][1]) * Real(e[2][2]) - Real(e[1][2]) * Real(e[2][1])) -
                  Real(e[0][1]) * (Real(e[1][0]) * Real(e[2][2]) - Real(e[1][2]) * Real(e[2][0])) +
                  Real(e[0][2]) * (Real(e[1][0]) * Real(e[2][1]) - Real(e[1][1]) * Real(e[2][0]));
    det = triple * triple;
    mag = g[0][0] * g[1][1] * g[2][2];
    y[0] = rhs[0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
           g[0][1] * (rhs[1] * g[2][2] - g[1][2] * rhs[2]) +
           g[0][2] * (rhs[1] * g[2][1] - g[1][1] * rhs[2]);
    y[1] = g[0][0] * (rhs[1] * g[2][2] - g[1][2] * rhs[2]) -
           rhs[0] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
           g[0][2] * (g[1][0] * rhs[2] - rhs[1] * g[2][0]);
    y[2] = g[0][0] * (g[1][1] * rhs[2] - rhs[1] * g[2][1]) -
           g[0][1] * (g[1][0] * rhs[2] - rhs[1] * g[2][0]) +
           rhs[0] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  }
  double eps = real_epsilon<Real>();
  if (!(det > mag * Real(eps * eps * 1e8))) return false;
  for (int i = 0; i < mm; ++i) y_out[i] = static_cast<double>(y[i] / det);
  return true;
}

// circumcenter of the m vertices (in dim r coords) and its squared radius
void circumsphere(const Matrix& pts, const std::array<int, 4>& vs, int m, double* center,
                  double& r2) {
  int r = static_cast<int>(pts.cols());
  if (m == 1) {
    for (int c = 0; c < r; ++c) center[c] = pts(vs[0], c);
    r2 = 0.0;
    return;
  }
  double e[3][3];
  for (int i = 1; i < m; ++i)
    for (int c = 0; c < r; ++c) e[i - 1][c] = pts(vs[i], c) - pts(vs[0], c);
  int mm = m - 1;
  double y[3] = {0, 0, 0};
  if (!circum_solve<double>(e, mm, r, y)) {
    if (!circum_solve<__float128>(e, mm, r, y))
      throw DegenerateError("alpha complex: degenerate simplex circumsphere");
  }
  r2 = 0.0;
  for (int c = 0; c < r; ++c) {
    double off = 0.0;
    for (int i = 0; i < mm; ++i) off += y[i] * e[i][c];
    center[c] = pts(vs[0], c) + off;
    r2 += off * off;
  }
}

double sq_dist_to(const Matrix& pts, int p, const double* center) {
  double s = 0.0;
  for (int c = 0; c < pts.cols(); ++c) {
    double d = pts(p, c) - center[c];
    s += d * d;
  }
  return s;
}

Matrix perturb_duplicates(const Matrix& in) {
  long n = in.rows(), d = in.cols();
  double lo, hi, diag_sq = 0.0;
  for (long c = 0; c < d; ++c) {
    lo = in.col(c).minCoeff();
    hi = in.col(c).maxCoeff();
    diag_sq += (hi - lo) * (hi - lo);
  }
  double scale = std::sqrt(diag_sq);
  if (scale == 0.0) throw DegenerateError("alpha complex: all points coincide");

  struct RowHash {
    size_t operator()(const std::string& s) const { return std::hash<std::string>()(s); }
  };
  std::unordered_map<std::string, int, RowHash> seen;
  Matrix out = in;
  for (long i = 0; i < n; ++i) {
    std::string key(static_cast<size_t>(d) * sizeof(double), '\0');
    for (long c = 0; c < d; ++c) {
      double v = out(i, c);
      std::memcpy(key.data() + static_cast<size_t>(c) * sizeof(double), &v, sizeof(double));
    }
    int j = seen[key]++;
    if (j > 0) {
      for (long c = 0; c < d; ++c) out(i, c) += j * 1e-12 * scale;
    }
  }
  return out;
}

// rotate onto the principal axes and keep only directions with real extent
Matrix reduce_rank(const Matrix& pts, int* out_rank) {
  long n = pts.rows();
  Matrix centered = pts.rowwise() - pts.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  double smax = svd.singularValues()[0];
  int rank = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > smax * 1e-10) ++rank;
  if (rank >= pts.cols() || n == 1) {
    *out_rank = static_cast<int>(pts.cols());
    return pts;
  }
  Matrix v = svd.matrixV().leftCols(rank);
  for (int c = 0; c < rank; ++c) {
    long arg = 0;
    double best = std::abs(v(0, c));
    for (long r = 1; r < v.rows(); ++r)
      if (std::abs(v(r, c)) > best) {
        best = std::abs(v(r, c));
        arg = r;
      }
    if (v(arg, c) < 0) v.col(c) = -v.col(c);
  }
  *out_rank = rank;
  return centered * v;
}

constexpr double kUnset = -1.0;

}  // namespace

FilteredComplex alpha_complex(const Matrix& points) {
  long n = points.rows();
  long k = points.cols();
  if (n < 1) throw DomainError("alpha complex needs at least 1 point");
  if (k < 1 || k > 3)
    throw UnsupportedDimensionError(
        "alpha complexes are built for 1 to 3 dimensions, got k=" + std::to_string(k) +
        "; use the Rips fallback for higher dimensions");

  FilteredComplex fc;
  fc.n_vertices = n;
  if (n == 1) {
    Simplex s;
    s.v[0] = 0;
    fc.simplices.push_back(s);
    return fc;
  }

  Matrix pts = perturb_duplicates(points);
  int rank = 0;
  pts = reduce_rank(pts, &rank);
  if (rank < k && rank >= 1) pts = perturb_duplicates(pts);

  // simplices per dimension, with filtration values assigned top down
  std::vector<std::vector<std::array<int, 4>>> simps(4);
  std::vector<std::vector<double>> filt(4);
  std::vector<SimplexMap> index(4);

  auto add = [&](const std::array<int, 4>& key, int dim) {
    auto it = index[dim].find(key);
    if (it != index[dim].end()) return it->second;
    int id = static_cast<int>(simps[dim].size());
    index[dim].emplace(key, id);
    simps[dim].push_back(key);
    filt[dim].push_back(kUnset);
    return id;
  };

  for (int i = 0; i < n; ++i) {
    int vs[1] = {i};
    add(make_key(vs, 1), 0);
  }

  int top = rank;
  if (rank == 1) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return pts(a, 0) != pts(b, 0) ? pts(a, 0) < pts(b, 0) : a < b;
    });
    for (int i = 0; i + 1 < n; ++i) {
      int vs[2] = {order[static_cast<size_t>(i)], order[static_cast<size_t>(i) + 1]};
      add(make_key(vs, 2), 1);
    }
  } else if (rank == 2) {
    std::vector<std::array<double, 2>> p2(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) p2[static_cast<size_t>(i)] = {pts(i, 0), pts(i, 1)};
    for (const auto& t : delaunay2(p2)) {
      add(make_key(t.data(), 3), 2);
      for (int drop = 0; drop < 3; ++drop) {
        int vs[2];
        int w = 0;
        for (int s = 0; s < 3; ++s)
          if (s != drop) vs[w++] = t[static_cast<size_t>(s)];
        add(make_key(vs, 2), 1);
      }
    }
  } else {
    std::vector<std::array<double, 3>> p3(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) p3[static_cast<size_t>(i)] = {pts(i, 0), pts(i, 1), pts(i, 2)};
    for (const auto& t : delaunay3(p3)) {
      add(make_key(t.data(), 4), 3);
      for (int drop = 0; drop < 4; ++drop) {
        int vs[3];
        int w = 0;
        for (int s = 0; s < 4; ++s)
          if (s != drop) vs[w++] = t[static_cast<size_t>(s)];
        add(make_key(vs, 3), 2);
        for (int drop2 = 0; drop2 < 3; ++drop2) {
          int es[2];
          int u = 0;
          for (int s = 0; s < 3; ++s)
            if (s != drop2) es[u++] = vs[s];
          add(make_key(es, 2), 1);
        }
      }
    }
  }

  // Top-down value assignment. At each dimension the values are final before
  // they are pushed to facets: a facet whose smallest circumscribing ball is
  // empty (Gabriel) keeps its own squared circumradius; otherwise it inherits
  // the smallest coface value. Emptiness of the ball only needs checking
  // against the opposite vertices of the cofaces.
  for (int dim = top; dim >= 1; --dim) {
    for (size_t si = 0; si < simps[dim].size(); ++si) {
      if (filt[dim][si] == kUnset) {
        double center[3];
        double r2;
        circumsphere(pts, simps[dim][si], dim + 1, center, r2);
        filt[dim][si] = r2;
      }
    }
    if (dim == 1) continue;  // facets are vertices, pinned at 0
    size_t nfaces = simps[dim - 1].size();
    std::vector<double> min_coface(nfaces, std::numeric_limits<double>::infinity());
    std::vector<char> gabriel(nfaces, 1);
    for (size_t si = 0; si < simps[dim].size(); ++si) {
      const auto& key = simps[dim][si];
      for (int drop = 0; drop <= dim; ++drop) {
        int vs[3];
        int w = 0;
        for (int s = 0; s <= dim; ++s)
          if (s != drop) vs[w++] = key[static_cast<size_t>(s)];
        auto fkey = make_key(vs, dim);
        size_t fid = static_cast<size_t>(index[dim - 1].at(fkey));
        min_coface[fid] = std::min(min_coface[fid], filt[dim][si]);
        double center[3];
        double r2;
        circumsphere(pts, fkey, dim, center, r2);
        int opposite = key[static_cast<size_t>(drop)];
        if (sq_dist_to(pts, opposite, center) < r2) gabriel[fid] = 0;
      }
    }
    for (size_t fid = 0; fid < nfaces; ++fid)
      if (!gabriel[fid]) filt[dim - 1][fid] = min_coface[fid];
  }

  for (int dim = 0; dim <= top && dim < 4; ++dim) {
    for (size_t si = 0; si < simps[dim].size(); ++si) {
      Simplex s;
      s.v = simps[dim][si];
      s.dim = dim;
      s.filt = dim == 0 ? 0.0 : filt[dim][si];
      fc.simplices.push_back(s);
      fc.max_dim = std::max(fc.max_dim, dim);
      fc.max_filtration = std::max(fc.max_filtration, s.filt);
    }
  }
  std::sort(fc.simplices.begin(), fc.simplices.end(), simplex_less);
  return fc;
}

FilteredComplex rips_complex(const Matrix& dist, int max_h, double threshold) {
  long m = dist.rows();
  if (dist.cols() != m) throw DomainError("rips: distance matrix must be square");
  if (m < 1) throw DomainError("rips: empty distance matrix");
  if (max_h < 0) throw DomainError("rips: max_h must be >= 0");
  for (long i = 0; i < m; ++i) {
    for (long j = i + 1; j < m; ++j) {
      if (std::abs(dist(i, j) - dist(j, i)) > 1e-9)
        throw DomainError("rips: distance matrix asymmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      if (dist(i, j) < 0)
        throw DomainError("rips: negative distance at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
    }
  }

  double thr = threshold;
  if (thr < 0) {
    thr = 0.0;
    for (long i = 0; i < m; ++i)
      for (long j = i + 1; j < m; ++j) thr = std::max(thr, dist(i, j));
  }
  auto d_at = [&](int a, int b) { return a < b ? dist(a, b) : dist(b, a); };

  FilteredComplex fc;
  fc.n_vertices = m;
  int max_dim = std::min(max_h + 1, 3);

  std::vector<std::vector<int>> nbrs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (d_at(i, j) <= thr) nbrs[static_cast<size_t>(i)].push_back(j);

  for (int i = 0; i < m; ++i) {
    Simplex s;
    s.v[0] = i;
    fc.simplices.push_back(s);
  }

  // grow cliques by appending vertices above the current maximum index
  struct Frame {
    std::array<int, 4> v;
    int count;
    double filt;
  };
  std::vector<Frame> stack;
  for (int i = 0; i < m; ++i)
    for (int j : nbrs[static_cast<size_t>(i)])
      stack.push_back({{i, j, -1, -1}, 2, d_at(i, j)});

  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    Simplex s;
    s.v = f.v;
    s.dim = f.count - 1;
    s.filt = f.filt;
    fc.simplices.push_back(s);
    fc.max_dim = std::max(fc.max_dim, s.dim);
    fc.max_filtration = std::max(fc.max_filtration, s.filt);
    if (f.count - 1 >= max_dim) continue;
    int last = f.v[static_cast<size_t>(f.count - 1)];
    for (int cand : nbrs[static_cast<size_t>(last)]) {
      double nf = f.filt;
      bool ok = true;
      for (int s2 = 0; s2 < f.count; ++s2) {
        double dd = d_at(f.v[static_cast<size_t>(s2)], cand);
        if (dd > thr) {
          ok = false;
          break;
        }
        nf = std::max(nf, dd);
      }
      if (!ok) continue;
      Frame nf2 = f;
      nf2.v[static_cast<size_t>(f.count)] = cand;
      nf2.count = f.count + 1;
      nf2.filt = nf;
      stack.push_back(nf2);
    }
  }

  std::sort(fc.simplices.begin(), fc.simplices.end(), simplex_less);
  return fc;
}

}  // namespace presto
