#pragma once

#include <array>
#include <vector>

#include "core/embedding.hpp"

namespace presto {

struct Simplex {
  std::array<int, 4> v{-1, -1, -1, -1};  // sorted ascending, -1 padding
  int dim = 0;
  double filt = 0.0;
};

struct FilteredComplex {
  std::vector<Simplex> simplices;  // sorted by (filt, dim, lex vertices)
  int max_dim = 0;
  long n_vertices = 0;
  double max_filtration = 0.0;
};

// Alpha complex of a point cloud with 1 to 3 columns. Filtration values are
// squared circumradii; faces that are not Gabriel inherit the smallest value
// among their cofaces. Exact duplicates get a deterministic nudge; point sets
// that are affinely degenerate drop to the triangulation of their affine hull.
FilteredComplex alpha_complex(const Matrix& points);

// Vietoris-Rips from a symmetric distance matrix, built to dimension
// max_h + 1. A simplex enters at its largest pairwise distance.
// threshold < 0 means include every edge.
FilteredComplex rips_complex(const Matrix& dist, int max_h, double threshold = -1.0);

}  // namespace presto
