#include "core/predicates.hpp"

#include <cmath>

namespace presto {

namespace {

using f128 = __float128;

inline int sign_of(f128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

int orient2d(const double* a, const double* b, const double* c) {
  double l = (b[0] - a[0]) * (c[1] - a[1]);
  double r = (b[1] - a[1]) * (c[0] - a[0]);
  double det = l - r;
  double bound = 3.4e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  f128 lx = (f128(b[0]) - f128(a[0])) * (f128(c[1]) - f128(a[1]));
  f128 rx = (f128(b[1]) - f128(a[1])) * (f128(c[0]) - f128(a[0]));
  return sign_of(lx - rx);
}

int incircle2d(const double* a, const double* b, const double* c, const double* d) {
  double adx = a[0] - d[0], ady = a[1] - d[1];
  double bdx = b[0] - d[0], bdy = b[1] - d[1];
  double cdx = c[0] - d[0], cdy = c[1] - d[1];
  double al = adx * adx + ady * ady;
  double bl = bdx * bdx + bdy * bdy;
  double cl = cdx * cdx + cdy * cdy;
  double det = al * (bdx * cdy - bdy * cdx) - bl * (adx * cdy - ady * cdx) +
               cl * (adx * bdy - ady * bdx);
  double perm = al * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                bl * (std::abs(adx * cdy) + std::abs(ady * cdx)) +
                cl * (std::abs(adx * bdy) + std::abs(ady * bdx));
  double bound = 1.2e-14 * perm;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  f128 Adx = f128(a[0]) - f128(d[0]), Ady = f128(a[1]) - f128(d[1]);
  f128 Bdx = f128(b[0]) - f128(d[0]), Bdy = f128(b[1]) - f128(d[1]);
  f128 Cdx = f128(c[0]) - f128(d[0]), Cdy = f128(c[1]) - f128(d[1]);
  f128 Al = Adx * Adx + Ady * Ady;
  f128 Bl = Bdx * Bdx + Bdy * Bdy;
  f128 Cl = Cdx * Cdx + Cdy * Cdy;
  f128 Det = Al * (Bdx * Cdy - Bdy * Cdx) - Bl * (Adx * Cdy - Ady * Cdx) +
             Cl * (Adx * Bdy - Ady * Bdx);
  return sign_of(Det);
}

int orient3d(const double* a, const double* b, const double* c, const double* d) {
  double adx = a[0] - d[0], ady = a[1] - d[1], adz = a[2] - d[2];
  double bdx = b[0] - d[0], bdy = b[1] - d[1], bdz = b[2] - d[2];
  double cdx = c[0] - d[0], cdy = c[1] - d[1], cdz = c[2] - d[2];
  double det = adx * (bdy * cdz - bdz * cdy) - ady * (bdx * cdz - bdz * cdx) +
               adz * (bdx * cdy - bdy * cdx);
  double perm = std::abs(adx) * (std::abs(bdy * cdz) + std::abs(bdz * cdy)) +
                std::abs(ady) * (std::abs(bdx * cdz) + std::abs(bdz * cdx)) +
                std::abs(adz) * (std::abs(bdx * cdy) + std::abs(bdy * cdx));
  double bound = 8e-15 * perm;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  f128 Adx = f128(a[0]) - f128(d[0]), Ady = f128(a[1]) - f128(d[1]), Adz = f128(a[2]) - f128(d[2]);
  f128 Bdx = f128(b[0]) - f128(d[0]), Bdy = f128(b[1]) - f128(d[1]), Bdz = f128(b[2]) - f128(d[2]);
  f128 Cdx = f128(c[0]) - f128(d[0]), Cdy = f128(c[1]) - f128(d[1]), Cdz = f128(c[2]) - f128(d[2]);
  f128 Det = Adx * (Bdy * Cdz - Bdz * Cdy) - Ady * (Bdx * Cdz - Bdz * Cdx) +
             Adz * (Bdx * Cdy - Bdy * Cdx);
  return sign_of(Det);
}

namespace {

f128 insphere_exact(const double* a, const double* b, const double* c, const double* d,
                    const double* e) {
  f128 ax = f128(a[0]) - f128(e[0]), ay = f128(a[1]) - f128(e[1]), az = f128(a[2]) - f128(e[2]);
  f128 bx = f128(b[0]) - f128(e[0]), by = f128(b[1]) - f128(e[1]), bz = f128(b[2]) - f128(e[2]);
  f128 cx = f128(c[0]) - f128(e[0]), cy = f128(c[1]) - f128(e[1]), cz = f128(c[2]) - f128(e[2]);
  f128 dx = f128(d[0]) - f128(e[0]), dy = f128(d[1]) - f128(e[1]), dz = f128(d[2]) - f128(e[2]);
  f128 al = ax * ax + ay * ay + az * az;
  f128 bl = bx * bx + by * by + bz * bz;
  f128 cl = cx * cx + cy * cy + cz * cz;
  f128 dl = dx * dx + dy * dy + dz * dz;

  f128 ab = ax * by - bx * ay, ac = ax * cy - cx * ay, ad = ax * dy - dx * ay;
  f128 bc = bx * cy - cx * by, bd = bx * dy - dx * by, cd = cx * dy - dx * cy;

  f128 abc = az * bc - bz * ac + cz * ab;
  f128 abd = az * bd - bz * ad + dz * ab;
  f128 acd = az * cd - cz * ad + dz * ac;
  f128 bcd = bz * cd - cz * bd + dz * bc;

  return dl * abc - cl * abd + bl * acd - al * bcd;
}

}  // namespace

int insphere3d(const double* a, const double* b, const double* c, const double* d,
               const double* e) {
  double ax = a[0] - e[0], ay = a[1] - e[1], az = a[2] - e[2];
  double bx = b[0] - e[0], by = b[1] - e[1], bz = b[2] - e[2];
  double cx = c[0] - e[0], cy = c[1] - e[1], cz = c[2] - e[2];
  double dx = d[0] - e[0], dy = d[1] - e[1], dz = d[2] - e[2];
  double al = ax * ax + ay * ay + az * az;
  double bl = bx * bx + by * by + bz * bz;
  double cl = cx * cx + cy * cy + cz * cz;
  double dl = dx * dx + dy * dy + dz * dz;

  double ab = ax * by - bx * ay, ac = ax * cy - cx * ay, ad = ax * dy - dx * ay;
  double bc = bx * cy - cx * by, bd = bx * dy - dx * by, cd = cx * dy - dx * cy;

  double abc = az * bc - bz * ac + cz * ab;
  double abd = az * bd - bz * ad + dz * ab;
  double acd = az * cd - cz * ad + dz * ac;
  double bcd = bz * cd - cz * bd + dz * bc;

  double det = dl * abc - cl * abd + bl * acd - al * bcd;

  double aezplus = std::abs(az), bezplus = std::abs(bz), cezplus = std::abs(cz),
         dezplus = std::abs(dz);
  double abplus = std::abs(ab), acplus = std::abs(ac), adplus = std::abs(ad);
  double bcplus = std::abs(bc), bdplus = std::abs(bd), cdplus = std::abs(cd);
  double perm = dl * (aezplus * bcplus + bezplus * acplus + cezplus * abplus) +
                cl * (aezplus * bdplus + bezplus * adplus + dezplus * abplus) +
                bl * (aezplus * cdplus + cezplus * adplus + dezplus * acplus) +
                al * (bezplus * cdplus + cezplus * bdplus + dezplus * bcplus);
  double bound = 2e-14 * perm;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return sign_of(insphere_exact(a, b, c, d, e));
}

int incircle3d_coplanar(const double* a, const double* b, const double* c, const double* d) {
  // project onto the dominant axis plane of the triangle normal, keeping orientation
  double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
  double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
  double nx = uy * vz - uz * vy;
  double ny = uz * vx - ux * vz;
  double nz = ux * vy - uy * vx;
  double axn = std::abs(nx), ayn = std::abs(ny), azn = std::abs(nz);

  int i0, i1;
  double flip;
  if (azn >= axn && azn >= ayn) {
    i0 = 0; i1 = 1; flip = nz;
  } else if (ayn >= axn) {
    i0 = 2; i1 = 0; flip = ny;
  } else {
    i0 = 1; i1 = 2; flip = nx;
  }
  double pa[2] = {a[i0], a[i1]};
  double pb[2] = {b[i0], b[i1]};
  double pc[2] = {c[i0], c[i1]};
  double pd[2] = {d[i0], d[i1]};
  int s = incircle2d(pa, pb, pc, pd);
  return flip >= 0 ? s : -s;
}

}  // namespace presto
