#pragma once

// Lattice-point counting in slanted strips and axis rectangles by direct
// enumeration, plus the quadratic-irrationality certificate for sqrt(3) that
// explains why the strip counts stay small on integer tori.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "zkw/errors.hpp"
#include "zkw/lattice.hpp"

namespace zkw {

inline constexpr double kMembershipGuard = 1e-9;

// S^alpha_{l,w} = {c1 v1 + c2 v2 : |c1|<=l, |c2|<=w} - alpha,
// v1 = (1, sqrt(3)), v2 = (-1, sqrt(3)).
struct Strip {
  double ell = 1.0;
  double w = 1.0;
  real2 alpha{0.0, 0.0};

  // strip coordinates of a translated point
  static real2 strip_coords(double x, double y) {
    const double s3 = SymmetrizerMap::s3;
    return {0.5 * (x + y / s3), 0.5 * (y / s3 - x)};
  }
  bool contains(double x, double y) const {
    const real2 c = strip_coords(x + alpha[0], y + alpha[1]);
    return std::abs(c[0]) <= ell + kMembershipGuard && std::abs(c[1]) <= w + kMembershipGuard;
  }
  // half-extents of the strip's bounding box, centered at -alpha
  real2 bbox_half() const {
    const double s3 = SymmetrizerMap::s3;
    return {ell + w, s3 * (ell + w)};
  }
};

namespace counting_detail {

struct IndexRange {
  std::int64_t lo, hi;
};

inline IndexRange index_range(double xmin, double xmax, double lambda) {
  return {std::int64_t(std::ceil(xmin * lambda - 0.5e-9)),
          std::int64_t(std::floor(xmax * lambda + 0.5e-9))};
}

}  // namespace counting_detail

inline std::int64_t count_strip(const Strip& strip, const DualLattice& lat) {
  using namespace counting_detail;
  const real2 h = strip.bbox_half();
  const double cx = -strip.alpha[0], cy = -strip.alpha[1];
  const IndexRange ra = index_range(cx - h[0], cx + h[0], double(lat.lambda));
  const IndexRange rb = index_range(cy - h[1], cy + h[1], double(lat.lambda));
  const std::int64_t B = lat.index_bound();
  if (ra.lo < -B || ra.hi > B || rb.lo < -B || rb.hi > B)
    throw TruncationExceeded("count_strip: strip leaves the lattice box");
  std::int64_t n = 0;
  for (std::int64_t a = ra.lo; a <= ra.hi; ++a)
    for (std::int64_t b = rb.lo; b <= rb.hi; ++b)
      if (strip.contains(double(a) / double(lat.lambda), double(b) / double(lat.lambda))) ++n;
  return n;
}

// Same count over the stretched lattice Z/lambda x sqrt(3)Z/lambda, where the
// strip direction v1 contains the lattice ray (q, sqrt(3) q) and the l*w bound
// fails.
inline std::int64_t count_strip_irrational_torus(const Strip& strip, std::int64_t lambda,
                                                 std::int64_t max_index = std::int64_t(1) << 22) {
  using namespace counting_detail;
  if (lambda < 1) throw ConfigInvalid("count_strip_irrational_torus: lambda >= 1");
  const double s3 = SymmetrizerMap::s3;
  const real2 h = strip.bbox_half();
  const double cx = -strip.alpha[0], cy = -strip.alpha[1];
  const IndexRange rq = index_range(cx - h[0], cx + h[0], double(lambda));
  const IndexRange rp = index_range((cy - h[1]) / s3, (cy + h[1]) / s3, double(lambda));
  if (std::max({std::abs(rq.lo), std::abs(rq.hi), std::abs(rp.lo), std::abs(rp.hi)}) > max_index)
    throw TruncationExceeded("count_strip_irrational_torus: strip too large");
  std::int64_t n = 0;
  for (std::int64_t q = rq.lo; q <= rq.hi; ++q)
    for (std::int64_t p = rp.lo; p <= rp.hi; ++p)
      if (strip.contains(double(q) / double(lambda), s3 * double(p) / double(lambda))) ++n;
  return n;
}

// |sqrt(3) - p/q| q^2; bounded below by a positive constant for all integers
// p, q >= 1 because sqrt(3) is a quadratic irrational.
inline double liouville_certificate(std::int64_t q, std::int64_t p) {
  if (q < 1) throw ConfigInvalid("liouville_certificate: q >= 1");
  return std::abs(SymmetrizerMap::s3 - double(p) / double(q)) * double(q) * double(q);
}

// scan min_{1<=q<=qmax} |sqrt(3) - p/q| q^2 with p the nearest integer
inline double liouville_scan_floor(std::int64_t qmax) {
  double best = liouville_certificate(1, 2);
  for (std::int64_t q = 1; q <= qmax; ++q) {
    const std::int64_t p = std::int64_t(std::llround(SymmetrizerMap::s3 * double(q)));
    best = std::min(best, liouville_certificate(q, p));
  }
  return best;
}

// R^alpha_{c1,c2} = {|xi| <= c1, |eta| <= c2} - alpha, counted over either
// Z^2/lambda or its image under the symmetrizer M.
struct AxisRectangle {
  double c1 = 1.0;
  double c2 = 1.0;
  real2 alpha{0.0, 0.0};
  bool on_m_lattice = false;

  bool contains(double x, double y) const {
    return std::abs(x + alpha[0]) <= c1 + kMembershipGuard &&
           std::abs(y + alpha[1]) <= c2 + kMembershipGuard;
  }
};

inline std::int64_t count_rectangle(const AxisRectangle& rect, const DualLattice& lat) {
  using namespace counting_detail;
  const double lam = double(lat.lambda);
  double xmin, xmax, ymin, ymax;
  if (rect.on_m_lattice) {
    // pull the rectangle corners back through M^-1 and take their bbox
    xmin = ymin = 1e300;
    xmax = ymax = -1e300;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1}) {
        const real2 corner{sx * rect.c1 - rect.alpha[0], sy * rect.c2 - rect.alpha[1]};
        const real2 k = SymmetrizerMap::inverse(corner[0], corner[1]);
        xmin = std::min(xmin, k[0]);
        xmax = std::max(xmax, k[0]);
        ymin = std::min(ymin, k[1]);
        ymax = std::max(ymax, k[1]);
      }
    const double g = 1e-9;
    xmin -= g, ymin -= g, xmax += g, ymax += g;
  } else {
    xmin = -rect.c1 - rect.alpha[0];
    xmax = rect.c1 - rect.alpha[0];
    ymin = -rect.c2 - rect.alpha[1];
    ymax = rect.c2 - rect.alpha[1];
  }
  const IndexRange ra = index_range(xmin, xmax, lam);
  const IndexRange rb = index_range(ymin, ymax, lam);
  const std::int64_t B = lat.index_bound();
  if (ra.lo < -B || ra.hi > B || rb.lo < -B || rb.hi > B)
    throw TruncationExceeded("count_rectangle: rectangle leaves the lattice box");
  std::int64_t n = 0;
  for (std::int64_t a = ra.lo; a <= ra.hi; ++a)
    for (std::int64_t b = rb.lo; b <= rb.hi; ++b) {
      double x = double(a) / lam, y = double(b) / lam;
      if (rect.on_m_lattice) {
        const real2 l = SymmetrizerMap::forward(x, y);
        x = l[0], y = l[1];
      }
      if (rect.contains(x, y)) ++n;
    }
  return n;
}

}  // namespace zkw
