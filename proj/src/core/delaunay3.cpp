#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>

#include "core/delaunay.hpp"
#include "core/error.hpp"
#include "core/predicates.hpp"

namespace presto {

namespace {

constexpr int kNoTet = -1;

// Finite tets are positively oriented. An infinite tet stores its hull facet
// in slots 0..2 oriented so the outside is the positive side, INF in slot 3.
struct Tet {
  int v[4];
  int nbr[4];  // nbr[i] is across the face opposite v[i]
  bool alive = true;
};

// face opposite slot i, oriented so that v[i] lies on the positive side
void face_of(const Tet& t, int i, int* out) {
  if (i & 1) {
    out[0] = t.v[(i + 1) & 3];
    out[1] = t.v[(i + 2) & 3];
    out[2] = t.v[(i + 3) & 3];
  } else {
    out[0] = t.v[(i + 2) & 3];
    out[1] = t.v[(i + 1) & 3];
    out[2] = t.v[(i + 3) & 3];
  }
}

struct Builder {
  const std::vector<std::array<double, 3>>& pts;
  int inf;
  std::vector<Tet> tets;
  int hint = 0;

  explicit Builder(const std::vector<std::array<double, 3>>& p)
      : pts(p), inf(static_cast<int>(p.size())) {}

  const double* at(int i) const { return pts[static_cast<size_t>(i)].data(); }
  bool is_inf(int i) const { return i == inf; }

  bool in_conflict(const Tet& t, const double* p) const {
    if (is_inf(t.v[3])) {
      int s = orient3d(at(t.v[0]), at(t.v[1]), at(t.v[2]), p);
      if (s != 0) return s > 0;
      return incircle3d_coplanar(at(t.v[0]), at(t.v[1]), at(t.v[2]), p) > 0;
    }
    return insphere3d(at(t.v[0]), at(t.v[1]), at(t.v[2]), at(t.v[3]), p) > 0;
  }

  int first_alive() const {
    for (int i = 0; i < static_cast<int>(tets.size()); ++i)
      if (tets[i].alive) return i;
    return 0;
  }

  int locate_conflict(const double* p) {
    int cur = hint;
    if (cur >= static_cast<int>(tets.size()) || !tets[cur].alive) cur = first_alive();
    long steps_left = static_cast<long>(tets.size()) * 4 + 64;
    while (steps_left-- > 0) {
      Tet& t = tets[cur];
      if (is_inf(t.v[3])) {
        if (in_conflict(t, p)) return cur;
        cur = t.nbr[3];  // hop to the finite side and keep walking
        continue;
      }
      int exit_face = -1;
      for (int i = 0; i < 4; ++i) {
        int f[3];
        face_of(t, i, f);
        if (orient3d(at(f[0]), at(f[1]), at(f[2]), p) < 0) {
          exit_face = i;
          break;
        }
      }
      if (exit_face < 0) return cur;  // containing tet
      cur = t.nbr[exit_face];
    }
    for (int i = 0; i < static_cast<int>(tets.size()); ++i)
      if (tets[i].alive && in_conflict(tets[i], p)) return i;
    throw DegenerateError("delaunay3: no conflict region found for inserted point");
  }

  void insert(int pi) {
    const double* p = at(pi);
    int seed = locate_conflict(p);

    std::vector<int> cavity{seed};
    std::vector<char> mark(tets.size(), 0);
    mark[seed] = 1;
    std::vector<std::pair<int, int>> boundary;  // (tet, face slot)
    for (size_t q = 0; q < cavity.size(); ++q) {
      int ti = cavity[q];
      for (int i = 0; i < 4; ++i) {
        int ni = tets[ti].nbr[i];
        if (mark[ni]) continue;
        if (in_conflict(tets[ni], p)) {
          mark[ni] = 1;
          cavity.push_back(ni);
        } else {
          boundary.emplace_back(ti, i);
        }
      }
    }

    for (int ti : cavity) tets[ti].alive = false;

    std::unordered_map<int64_t, std::pair<int, int>> open_face;  // edge pair -> (tet, slot)
    auto edge_key = [this](int a, int b) {
      int lo = std::min(a, b), hi = std::max(a, b);
      return static_cast<int64_t>(lo) * (inf + 1) + hi;
    };

    int first_new = -1;
    for (auto [ti, i] : boundary) {
      const Tet& old = tets[ti];
      int f[3];
      face_of(old, i, f);
      int outside = old.nbr[i];

      int vs[4] = {f[0], f[1], f[2], pi};
      // move INF to slot 3, then one more swap to restore orientation parity
      for (int s = 0; s < 3; ++s) {
        if (is_inf(vs[s])) {
          std::swap(vs[s], vs[3]);
          std::swap(vs[(s + 1) % 3], vs[(s + 2) % 3]);
          break;
        }
      }
      Tet nt;
      for (int s = 0; s < 4; ++s) {
        nt.v[s] = vs[s];
        nt.nbr[s] = kNoTet;
      }
      int nti = static_cast<int>(tets.size());
      tets.push_back(nt);
      if (first_new < 0) first_new = nti;

      link_outside(nti, f, outside, ti);

      // the three side faces each carry p plus one edge of the old face
      for (int e = 0; e < 3; ++e) {
        int a = f[e], b = f[(e + 1) % 3];
        int64_t key = edge_key(a, b);
        int slot = face_slot(tets[nti], a, b, pi);
        auto it = open_face.find(key);
        if (it == open_face.end()) {
          open_face[key] = {nti, slot};
        } else {
          auto [oti, oslot] = it->second;
          tets[nti].nbr[slot] = oti;
          tets[oti].nbr[oslot] = nti;
          open_face.erase(it);
        }
      }
    }
    hint = first_new;
  }

  // slot of the vertex that is none of a, b, c
  static int face_slot(const Tet& t, int a, int b, int c) {
    for (int i = 0; i < 4; ++i)
      if (t.v[i] != a && t.v[i] != b && t.v[i] != c) return i;
    return 0;
  }

  void link_outside(int nti, const int* f, int outside, int old_ti) {
    tets[nti].nbr[face_slot(tets[nti], f[0], f[1], f[2])] = outside;
    for (int i = 0; i < 4; ++i) {
      if (tets[outside].nbr[i] == old_ti) {
        tets[outside].nbr[i] = nti;
        return;
      }
    }
    throw DegenerateError("delaunay3: adjacency repair failed");
  }
};

uint64_t morton3(uint32_t x, uint32_t y, uint32_t z) {
  auto part = [](uint64_t v) {
    v &= 0x1fffffULL;
    v = (v | (v << 32)) & 0x1f00000000ffffULL;
    v = (v | (v << 16)) & 0x1f0000ff0000ffULL;
    v = (v | (v << 8)) & 0x100f00f00f00f00fULL;
    v = (v | (v << 4)) & 0x10c30c30c30c30c3ULL;
    v = (v | (v << 2)) & 0x1249249249249249ULL;
    return v;
  };
  return part(x) | (part(y) << 1) | (part(z) << 2);
}

bool collinear3(const double* a, const double* b, const double* c) {
  double pxy_a[2] = {a[0], a[1]}, pxy_b[2] = {b[0], b[1]}, pxy_c[2] = {c[0], c[1]};
  double pxz_a[2] = {a[0], a[2]}, pxz_b[2] = {b[0], b[2]}, pxz_c[2] = {c[0], c[2]};
  double pyz_a[2] = {a[1], a[2]}, pyz_b[2] = {b[1], b[2]}, pyz_c[2] = {c[1], c[2]};
  return orient2d(pxy_a, pxy_b, pxy_c) == 0 && orient2d(pxz_a, pxz_b, pxz_c) == 0 &&
         orient2d(pyz_a, pyz_b, pyz_c) == 0;
}

}  // namespace

std::vector<std::array<int, 4>> delaunay3(const std::vector<std::array<double, 3>>& pts) {
  int n = static_cast<int>(pts.size());
  if (n < 4) throw DegenerateError("delaunay3 needs at least 4 points");

  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int j = 1; j < n && i1 < 0; ++j)
    if (pts[j] != pts[i0]) i1 = j;
  if (i1 < 0) throw DegenerateError("delaunay3: all points identical");
  for (int j = i1 + 1; j < n && i2 < 0; ++j)
    if (!collinear3(pts[i0].data(), pts[i1].data(), pts[j].data())) i2 = j;
  if (i2 < 0) throw DegenerateError("delaunay3: all points collinear");
  int orient = 0;
  for (int j = 1; j < n && i3 < 0; ++j) {
    if (j == i1 || j == i2) continue;
    orient = orient3d(pts[i0].data(), pts[i1].data(), pts[i2].data(), pts[j].data());
    if (orient != 0) i3 = j;
  }
  if (i3 < 0) throw DegenerateError("delaunay3: all points coplanar");
  if (orient < 0) std::swap(i1, i2);

  Builder b(pts);
  {
    Tet t0;
    t0.v[0] = i0;
    t0.v[1] = i1;
    t0.v[2] = i2;
    t0.v[3] = i3;
    for (int s = 0; s < 4; ++s) t0.nbr[s] = kNoTet;
    b.tets.push_back(t0);
    for (int i = 0; i < 4; ++i) {
      int f[3];
      face_of(t0, i, f);
      Tet ti_inf;
      ti_inf.v[0] = f[1];  // reversed: outside becomes the positive side
      ti_inf.v[1] = f[0];
      ti_inf.v[2] = f[2];
      ti_inf.v[3] = b.inf;
      for (int s = 0; s < 4; ++s) ti_inf.nbr[s] = kNoTet;
      b.tets.push_back(ti_inf);
    }
    // wire all adjacencies by matching sorted face triples
    std::map<std::tuple<int, int, int>, std::pair<int, int>> faces;
    for (int t = 0; t < 5; ++t) {
      for (int s = 0; s < 4; ++s) {
        int f[3];
        face_of(b.tets[t], s, f);
        int x[3] = {f[0], f[1], f[2]};
        std::sort(x, x + 3);
        auto key = std::make_tuple(x[0], x[1], x[2]);
        auto it = faces.find(key);
        if (it == faces.end()) {
          faces[key] = {t, s};
        } else {
          b.tets[t].nbr[s] = it->second.first;
          b.tets[it->second.first].nbr[it->second.second] = t;
        }
      }
    }
  }

  std::vector<int> rest;
  for (int j = 0; j < n; ++j)
    if (j != i0 && j != i1 && j != i2 && j != i3) rest.push_back(j);

  double lo[3], hi[3];
  for (int c = 0; c < 3; ++c) lo[c] = hi[c] = pts[0][static_cast<size_t>(c)];
  for (const auto& p : pts)
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], p[static_cast<size_t>(c)]);
      hi[c] = std::max(hi[c], p[static_cast<size_t>(c)]);
    }
  double span[3];
  for (int c = 0; c < 3; ++c) span[c] = hi[c] > lo[c] ? hi[c] - lo[c] : 1.0;
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int bi) {
    auto code = [&](int i) {
      uint32_t g[3];
      for (int c = 0; c < 3; ++c)
        g[c] = static_cast<uint32_t>((pts[i][static_cast<size_t>(c)] - lo[c]) / span[c] * 2097151.0);
      return morton3(g[0], g[1], g[2]);
    };
    return code(a) < code(bi);
  });

  for (int j : rest) b.insert(j);

  std::vector<std::array<int, 4>> out;
  for (const auto& t : b.tets) {
    if (!t.alive) continue;
    if (t.v[0] == b.inf || t.v[1] == b.inf || t.v[2] == b.inf || t.v[3] == b.inf) continue;
    out.push_back({t.v[0], t.v[1], t.v[2], t.v[3]});
  }
  return out;
}

}  // namespace presto
