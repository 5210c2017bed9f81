#pragma once

#include <array>
#include <vector>

namespace presto {

// Delaunay triangulation of 2-D points. Points must not all be collinear and
// must be pairwise distinct. Returns finite triangles as index triples.
std::vector<std::array<int, 3>> delaunay2(const std::vector<std::array<double, 2>>& pts);

// Delaunay tetrahedralization of 3-D points. Points must not all be coplanar
// and must be pairwise distinct. Returns finite tetrahedra as index quadruples.
std::vector<std::array<int, 4>> delaunay3(const std::vector<std::array<double, 3>>& pts);

}  // namespace presto
