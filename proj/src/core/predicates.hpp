#pragma once

namespace presto {

// Sign predicates for Delaunay construction. Each evaluates in double with a
// conservative error bound and falls back to __float128 when inconclusive.
// Return value is -1, 0 or +1.

// +1 if a,b,c make a left turn
int orient2d(const double* a, const double* b, const double* c);

// for ccw triangle abc: +1 if d lies strictly inside the circumcircle
int incircle2d(const double* a, const double* b, const double* c, const double* d);

// +1 if d lies on the side of plane abc such that a,b,c,d is positively oriented
int orient3d(const double* a, const double* b, const double* c, const double* d);

// for positively oriented tet abcd: +1 if e lies strictly inside the circumsphere
int insphere3d(const double* a, const double* b, const double* c, const double* d,
               const double* e);

// circumcircle test for 4 coplanar points in 3-space: +1 if d is strictly inside
// the circle through a,b,c (in their common plane)
int incircle3d_coplanar(const double* a, const double* b, const double* c, const double* d);

}  // namespace presto
