#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "core/delaunay.hpp"
#include "core/error.hpp"
#include "core/predicates.hpp"

namespace presto {

namespace {

// Triangles are stored counter-clockwise. The triangulation keeps one extra
// symbolic vertex INF; a triangle (a, b, INF) covers the open half plane to
// the left of a->b, which is the outside of hull edge b->a.
constexpr int kNoTri = -1;

struct Tri {
  int v[3];
  int nbr[3];  // nbr[i] is across the edge opposite v[i]
  bool alive = true;
};

struct Builder {
  const std::vector<std::array<double, 2>>& pts;
  int inf;
  std::vector<Tri> tris;
  int hint = 0;

  explicit Builder(const std::vector<std::array<double, 2>>& p)
      : pts(p), inf(static_cast<int>(p.size())) {}

  const double* at(int i) const { return pts[static_cast<size_t>(i)].data(); }
  bool is_inf(int i) const { return i == inf; }

  bool in_conflict(const Tri& t, const double* p) const {
    if (is_inf(t.v[2]))
      return orient2d(at(t.v[0]), at(t.v[1]), p) > 0;
    return incircle2d(at(t.v[0]), at(t.v[1]), at(t.v[2]), p) > 0;
  }

  int locate_conflict(const double* p) {
    int cur = hint;
    if (cur >= static_cast<int>(tris.size()) || !tris[cur].alive) cur = first_alive();
    int steps_left = static_cast<int>(tris.size()) * 4 + 64;
    while (steps_left-- > 0) {
      Tri& t = tris[cur];
      if (is_inf(t.v[2])) {
        if (in_conflict(t, p)) return cur;
        // walked outside but this hull edge cannot see p: scan the hull
        break;
      }
      int exit_edge = -1;
      for (int i = 0; i < 3; ++i) {
        int a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
        if (orient2d(at(a), at(b), p) < 0) {
          exit_edge = i;
          break;
        }
      }
      if (exit_edge < 0) return cur;  // containing triangle
      cur = t.nbr[exit_edge];
    }
    for (int i = 0; i < static_cast<int>(tris.size()); ++i)
      if (tris[i].alive && in_conflict(tris[i], p)) return i;
    throw DegenerateError("delaunay2: no conflict region found for inserted point");
  }

  int first_alive() const {
    for (int i = 0; i < static_cast<int>(tris.size()); ++i)
      if (tris[i].alive) return i;
    return 0;
  }

  void insert(int pi) {
    const double* p = at(pi);
    int seed = locate_conflict(p);

    // grow the conflict cavity
    std::vector<int> cavity;
    std::vector<char> mark(tris.size(), 0);
    cavity.push_back(seed);
    mark[seed] = 1;
    std::vector<std::pair<int, int>> boundary;  // (triangle, edge index)
    for (size_t q = 0; q < cavity.size(); ++q) {
      int ti = cavity[q];
      for (int i = 0; i < 3; ++i) {
        int ni = tris[ti].nbr[i];
        if (mark[ni]) continue;
        if (in_conflict(tris[ni], p)) {
          mark[ni] = 1;
          cavity.push_back(ni);
        } else {
          boundary.emplace_back(ti, i);
        }
      }
    }

    for (int ti : cavity) tris[ti].alive = false;

    // one new triangle per boundary edge, glued to the outside survivor
    std::unordered_map<int64_t, std::pair<int, int>> open_edge;  // vertex pair -> (tri, edge)
    auto edge_key = [this](int a, int b) {
      int lo = std::min(a, b), hi = std::max(a, b);
      return static_cast<int64_t>(lo) * (inf + 1) + hi;
    };
    int first_new = -1;
    for (auto [ti, i] : boundary) {
      const Tri& old = tris[ti];
      int a = old.v[(i + 1) % 3], b = old.v[(i + 2) % 3];
      int outside = old.nbr[i];

      int vs[3] = {a, b, pi};
      // keep INF in the last slot; rotation preserves orientation
      while (is_inf(vs[0]) || is_inf(vs[1])) {
        int t0 = vs[0];
        vs[0] = vs[1];
        vs[1] = vs[2];
        vs[2] = t0;
      }
      Tri nt;
      nt.v[0] = vs[0];
      nt.v[1] = vs[1];
      nt.v[2] = vs[2];
      nt.nbr[0] = nt.nbr[1] = nt.nbr[2] = kNoTri;
      int nti = static_cast<int>(tris.size());
      tris.push_back(nt);
      if (first_new < 0) first_new = nti;

      // across (a, b) lies the untouched outside triangle
      link(nti, edge_index(tris[nti], a, b), outside, ti);

      for (int other : {a, b}) {
        int64_t key = edge_key(other, pi);
        auto it = open_edge.find(key);
        if (it == open_edge.end()) {
          open_edge[key] = {nti, edge_index(tris[nti], other, pi)};
        } else {
          int oti = it->second.first, oei = it->second.second;
          tris[nti].nbr[edge_index(tris[nti], other, pi)] = oti;
          tris[oti].nbr[oei] = nti;
          open_edge.erase(it);
        }
      }
    }
    hint = first_new;
  }

  // edge index of (a, b) in t: the slot of the vertex that is neither a nor b
  static int edge_index(const Tri& t, int a, int b) {
    for (int i = 0; i < 3; ++i)
      if (t.v[i] != a && t.v[i] != b) return i;
    return 0;
  }

  // connect new triangle nti across edge with outside triangle, replacing its
  // dead neighbor old_ti
  void link(int nti, int nei, int outside, int old_ti) {
    tris[nti].nbr[nei] = outside;
    for (int i = 0; i < 3; ++i) {
      if (tris[outside].nbr[i] == old_ti) {
        tris[outside].nbr[i] = nti;
        return;
      }
    }
    throw DegenerateError("delaunay2: adjacency repair failed");
  }
};

// interleave for a coarse Morton order so the walk stays short
uint64_t morton2(uint32_t x, uint32_t y) {
  auto part = [](uint64_t v) {
    v &= 0xffffffffULL;
    v = (v | (v << 16)) & 0x0000ffff0000ffffULL;
    v = (v | (v << 8)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v << 4)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
  };
  return part(x) | (part(y) << 1);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay2(const std::vector<std::array<double, 2>>& pts) {
  int n = static_cast<int>(pts.size());
  if (n < 3) throw DegenerateError("delaunay2 needs at least 3 points");

  // starting triple: first pair of distinct points, then the first point off their line
  int i0 = 0, i1 = -1, i2 = -1;
  for (int j = 1; j < n && i1 < 0; ++j)
    if (pts[j] != pts[i0]) i1 = j;
  if (i1 < 0) throw DegenerateError("delaunay2: all points identical");
  int orient = 0;
  for (int j = i1 + 1; j < n && i2 < 0; ++j) {
    orient = orient2d(pts[i0].data(), pts[i1].data(), pts[j].data());
    if (orient != 0) i2 = j;
  }
  if (i2 < 0) throw DegenerateError("delaunay2: all points collinear");
  if (orient < 0) std::swap(i1, i2);

  Builder b(pts);
  {
    Tri t0;
    t0.v[0] = i0;
    t0.v[1] = i1;
    t0.v[2] = i2;
    Tri e0{{i1, i0, b.inf}, {0, 0, 0}, true};  // outside of hull edge i0->i1
    Tri e1{{i2, i1, b.inf}, {0, 0, 0}, true};
    Tri e2{{i0, i2, b.inf}, {0, 0, 0}, true};
    t0.nbr[0] = 2;  // across (i1, i2) -> e1 at index 2
    t0.nbr[1] = 3;  // across (i2, i0) -> e2
    t0.nbr[2] = 1;  // across (i0, i1) -> e0
    b.tris = {t0, e0, e1, e2};
    // infinite triangle (u, v, INF): edge (u,v) borders t0; edges with INF
    // border the infinite triangles of the adjacent hull edges
    b.tris[1].nbr[2] = 0;
    b.tris[1].nbr[0] = 3;  // across (i0, INF)
    b.tris[1].nbr[1] = 2;  // across (i1, INF)
    b.tris[2].nbr[2] = 0;
    b.tris[2].nbr[0] = 1;
    b.tris[2].nbr[1] = 3;
    b.tris[3].nbr[2] = 0;
    b.tris[3].nbr[0] = 2;
    b.tris[3].nbr[1] = 1;
  }

  std::vector<int> rest;
  rest.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    if (j != i0 && j != i1 && j != i2) rest.push_back(j);

  double minx = pts[0][0], maxx = pts[0][0], miny = pts[0][1], maxy = pts[0][1];
  for (const auto& p : pts) {
    minx = std::min(minx, p[0]);
    maxx = std::max(maxx, p[0]);
    miny = std::min(miny, p[1]);
    maxy = std::max(maxy, p[1]);
  }
  double sx = maxx > minx ? (maxx - minx) : 1.0;
  double sy = maxy > miny ? (maxy - miny) : 1.0;
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int bi) {
    auto code = [&](int i) {
      uint32_t gx = static_cast<uint32_t>((pts[i][0] - minx) / sx * 65535.0);
      uint32_t gy = static_cast<uint32_t>((pts[i][1] - miny) / sy * 65535.0);
      return morton2(gx, gy);
    };
    return code(a) < code(bi);
  });

  for (int j : rest) b.insert(j);

  std::vector<std::array<int, 3>> out;
  for (const auto& t : b.tris) {
    if (!t.alive) continue;
    if (t.v[0] == b.inf || t.v[1] == b.inf || t.v[2] == b.inf) continue;
    out.push_back({t.v[0], t.v[1], t.v[2]});
  }
  return out;
}

}  // namespace presto
