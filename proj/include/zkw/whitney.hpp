#pragma once

// Whitney-type refinement of R^2 x R^2 into square tiles driven by the size of
// the resonance polynomial Phi and the transversality polynomial F, angular
// sectors, the near-degenerate strip regions K_j, the annular and flat
// rectangle tile families, and empirical multiplicity (almost-orthogonality)
// measurement for all three tile families.
//
// Classification is certified: a pair is accepted only when a corner minimum
// minus a Lipschitz slack clears the threshold, so accepted pairs provably
// satisfy the defining inequality on the whole product.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "zkw/errors.hpp"
#include "zkw/lattice.hpp"
#include "zkw/resonance.hpp"

namespace zkw {

// ---------------------------------------------------------------------------
// geometry helpers

struct Box2 {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // [x0,x1) x [y0,y1)

  std::array<real2, 4> corners() const {
    return {real2{x0, y0}, real2{x1, y0}, real2{x0, y1}, real2{x1, y1}};
  }
  double max_abs_coord() const {
    return std::max({std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1)});
  }
  double max_radius() const {
    double r = 0;
    for (const auto& c : corners()) r = std::max(r, std::hypot(c[0], c[1]));
    return r;
  }
  double min_radius() const {
    const double dx = (x0 > 0) ? x0 : (x1 < 0 ? -x1 : 0.0);
    const double dy = (y0 > 0) ? y0 : (y1 < 0 ? -y1 : 0.0);
    return std::hypot(dx, dy);
  }
  bool meets_annulus(double rlo, double rhi) const {
    return min_radius() <= rhi && max_radius() > rlo;
  }
  // range of the linear functional y - s*x over the box
  std::array<double, 2> linear_range(double s) const {
    double lo = 1e300, hi = -1e300;
    for (const auto& c : corners()) {
      const double v = c[1] - s * c[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }
  bool contains_origin() const { return x0 <= 0 && 0 < x1 && y0 <= 0 && 0 < y1; }
};

// convex quadrilateral given by corners of an affine box image
struct Quad2 {
  std::array<real2, 4> c{};  // order: (v lo,lo),(hi,lo),(lo,hi),(hi,hi)

  double max_abs_coord() const {
    double r = 0;
    for (const auto& p : c) r = std::max({r, std::abs(p[0]), std::abs(p[1])});
    return r;
  }
  double max_radius() const {
    double r = 0;
    for (const auto& p : c) r = std::max(r, std::hypot(p[0], p[1]));
    return r;
  }
  double min_radius() const {  // distance from origin to the quad (0 if inside)
    auto seg = [](const real2& a, const real2& b) {
      const double vx = b[0] - a[0], vy = b[1] - a[1];
      const double den = vx * vx + vy * vy;
      double t = den > 0 ? -(a[0] * vx + a[1] * vy) / den : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      return std::hypot(a[0] + t * vx, a[1] + t * vy);
    };
    // inside test via sign of cross products around the hull 0-1-3-2
    const int order[4] = {0, 1, 3, 2};
    bool pos = false, neg = false;
    for (int i = 0; i < 4; ++i) {
      const real2& a = c[order[i]];
      const real2& b = c[order[(i + 1) % 4]];
      const double cr = (b[0] - a[0]) * (-a[1]) - (b[1] - a[1]) * (-a[0]);
      (cr >= 0 ? pos : neg) = true;
    }
    if (!(pos && neg)) return 0.0;
    double r = 1e300;
    for (int i = 0; i < 4; ++i)
      r = std::min(r, seg(c[order[i]], c[order[(i + 1) % 4]]));
    return r;
  }
  bool meets_annulus(double rlo, double rhi) const {
    return min_radius() <= rhi && max_radius() > rlo;
  }
  std::array<double, 2> linear_range(double s) const {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : c) {
      const double v = p[1] - s * p[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }
  // half of the maximal diagonal: any interior point is this close to a corner
  double corner_slack_radius() const {
    const double d1 = std::hypot(c[3][0] - c[0][0], c[3][1] - c[0][1]);
    const double d2 = std::hypot(c[2][0] - c[1][0], c[2][1] - c[1][1]);
    return 0.5 * std::max(d1, d2);
  }
};

inline Quad2 quad_of_box(const Box2& b) {
  Quad2 q;
  q.c = b.corners();
  return q;
}

// ---------------------------------------------------------------------------
// certified pair classification

enum class TilePairClass { unresolved, phi_large, f_large };

inline bool pair_resolved(TilePairClass c) { return c != TilePairClass::unresolved; }

// lower bound for min |P| over quad1 x quad2 given a Lipschitz bound of P
template <class F>
double certified_min(const Quad2& q1, const Quad2& q2, F&& poly, double grad_bound) {
  double cmin = 1e300;
  for (const auto& p : q1.c)
    for (const auto& q : q2.c) cmin = std::min(cmin, std::abs(poly(p[0], p[1], q[0], q[1])));
  const double rho =
      std::sqrt(q1.corner_slack_radius() * q1.corner_slack_radius() +
                q2.corner_slack_radius() * q2.corner_slack_radius());
  return cmin - grad_bound * rho;
}

// |grad Phi| <= 6 r^2 and |grad F| <= 6 r on a region with sup-norm radius r
inline TilePairClass classify_product(const Quad2& q1, const Quad2& q2, double phi_threshold,
                                      double f_threshold) {
  const double r = std::max(q1.max_abs_coord(), q2.max_abs_coord());
  if (certified_min(q1, q2, [](double a, double b, double c, double d) {
        return resonance_Phi(a, b, c, d);
      }, 6.0 * r * r) >= phi_threshold)
    return TilePairClass::phi_large;
  if (certified_min(q1, q2, [](double a, double b, double c, double d) {
        return transversality_F(a, b, c, d);
      }, 6.0 * r) >= f_threshold)
    return TilePairClass::f_large;
  return TilePairClass::unresolved;
}

// ---------------------------------------------------------------------------
// square tiles T^A_m, side N1/A

struct SquareTile {
  std::int64_t A = 1;  // dyadic scale
  std::int64_t m1 = 0, m2 = 0;
  double N1 = 1.0;

  Box2 box() const {
    const double s = N1 / double(A);
    return {double(m1) * s, double(m2) * s, double(m1 + 1) * s, double(m2 + 1) * s};
  }
};

inline std::array<std::int64_t, 2> square_tile_locate(double x, double y, std::int64_t A,
                                                      double N1) {
  const double s = N1 / double(A);
  return {std::int64_t(std::floor(x / s)), std::int64_t(std::floor(y / s))};
}

inline TilePairClass classify_tile_pair(const SquareTile& t1, const SquareTile& t2) {
  if (t1.A != t2.A || t1.N1 != t2.N1) throw ScaleMismatch("classify_tile_pair");
  const double thr_phi = t1.N1 * t1.N1 * t1.N1 / double(t1.A);
  const double thr_f = t1.N1 * t1.N1 / double(t1.A);
  return classify_product(quad_of_box(t1.box()), quad_of_box(t2.box()), thr_phi, thr_f);
}

// ---------------------------------------------------------------------------
// angular sectors: directions with angle mod pi within 2pi/A of pi*j/A

struct AngularSector {
  std::int64_t A = 8;
  std::int64_t j = 0;

  bool contains(double x, double y) const {
    if (x == 0.0 && y == 0.0) return true;  // rays include the origin
    const double pi = 3.14159265358979323846;
    double phase = std::fmod(std::atan2(y, x), pi);
    if (phase < 0) phase += pi;  // now in [0, pi)
    const double lo = pi * double(j - 2) / double(A);
    const double hi = pi * double(j + 2) / double(A);
    for (int s = -1; s <= 1; ++s) {
      const double p = phase + s * pi;
      if (p >= lo && p <= hi) return true;
    }
    return false;
  }
};

inline bool sector_membership(double x, double y, const AngularSector& sec) {
  return sec.contains(x, y);
}

// Exact test: does the box meet the double cone of the sector?
inline bool box_meets_sector(const Box2& b, const AngularSector& sec) {
  for (const auto& c : b.corners())
    if (sec.contains(c[0], c[1])) return true;
  if (b.contains_origin()) return true;
  // otherwise an edge ray of the cone must cross the box
  const double pi = 3.14159265358979323846;
  const double angles[2] = {pi * double(sec.j - 2) / double(sec.A),
                            pi * double(sec.j + 2) / double(sec.A)};
  for (const double base : angles) {
    for (int half = 0; half < 2; ++half) {
      const double th = base + half * pi;
      const double dx = std::cos(th), dy = std::sin(th);
      // ray t*(dx,dy), t >= 0 against the box
      double tlo = 0.0, thi = 1e300;
      bool ok = true;
      for (int axis = 0; axis < 2 && ok; ++axis) {
        const double d = axis == 0 ? dx : dy;
        const double lo = axis == 0 ? b.x0 : b.y0;
        const double hi = axis == 0 ? b.x1 : b.y1;
        if (d == 0.0) {
          ok = lo <= 0.0 && 0.0 <= hi;
        } else {
          double t0 = lo / d, t1 = hi / d;
          if (t0 > t1) std::swap(t0, t1);
          tlo = std::max(tlo, t0);
          thi = std::min(thi, t1);
        }
      }
      if (ok && tlo <= thi) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// near-degenerate strips K_j

enum class KRegionId { K0, K1, K2, K0p, K1p, K2p };

inline double kregion_slope(KRegionId id) {
  // K0: eta = (sqrt2-1)^{4/3} xi ; K1: eta = (sqrt2+1)^{2/3}(sqrt2+sqrt3) xi ;
  // K2: eta = -(sqrt2+1)^{2/3}(sqrt3-sqrt2) xi
  const double s2 = SymmetrizerMap::s2, s3 = SymmetrizerMap::s3;
  switch (id) {
    case KRegionId::K0:
    case KRegionId::K0p:
      return std::pow(s2 - 1.0, 4.0 / 3.0);
    case KRegionId::K1:
    case KRegionId::K1p:
      return std::pow(s2 + 1.0, 2.0 / 3.0) * (s2 + s3);
    default:
      return -std::pow(s2 + 1.0, 2.0 / 3.0) * (s3 - s2);
  }
}

struct KRegion {
  KRegionId id = KRegionId::K0;
  double N1 = 1.0;

  double half_width() const { return std::ldexp(N1, -20); }
  bool primed() const {
    return id == KRegionId::K0p || id == KRegionId::K1p || id == KRegionId::K2p;
  }
  bool contains(double x, double y) const {
    if (primed()) std::swap(x, y);
    return std::abs(y - kregion_slope(id) * x) <= half_width();
  }
};

inline bool kregion_membership(double x, double y, const KRegion& reg) {
  return reg.contains(x, y);
}

inline bool box_meets_kregion(const Box2& b, const KRegion& reg) {
  Box2 bb = b;
  if (reg.primed()) bb = Box2{b.y0, b.x0, b.y1, b.x1};
  const auto r = bb.linear_range(kregion_slope(reg.id));
  const double w = reg.half_width();
  return r[0] <= w && r[1] >= -w;
}

inline bool quad_meets_kregion(const Quad2& q, const KRegion& reg) {
  Quad2 qq = q;
  if (reg.primed())
    for (auto& p : qq.c) std::swap(p[0], p[1]);
  const auto r = qq.linear_range(kregion_slope(reg.id));
  const double w = reg.half_width();
  return r[0] <= w && r[1] >= -w;
}

// pair sets K = (K0 x (K1 u K2)) u ((K1 u K2) x K0) and the primed analogue
inline bool pair_in_scriptK(double x1, double y1, double x2, double y2, double N1,
                            bool primed) {
  auto reg = [&](KRegionId base) { return KRegion{base, N1}; };
  const KRegionId i0 = primed ? KRegionId::K0p : KRegionId::K0;
  const KRegionId i1 = primed ? KRegionId::K1p : KRegionId::K1;
  const KRegionId i2 = primed ? KRegionId::K2p : KRegionId::K2;
  const bool p0 = reg(i0).contains(x1, y1), p12 = reg(i1).contains(x1, y1) || reg(i2).contains(x1, y1);
  const bool q0 = reg(i0).contains(x2, y2), q12 = reg(i1).contains(x2, y2) || reg(i2).contains(x2, y2);
  return (p0 && q12) || (p12 && q0);
}

// ---------------------------------------------------------------------------
// annular rectangle tiles R_{A,m,i}

// a_{A,1} = 0, a_{A,n+1} = a_{A,n} + N1/sqrt((n+1)A)
inline double annular_band_edge(std::int64_t A, double N1, std::int64_t n) {
  double a = 0.0;
  for (std::int64_t k = 2; k <= n; ++k) a += N1 / std::sqrt(double(k) * double(A));
  return a;
}

struct AnnularTile {
  std::int64_t A = 8;
  std::int64_t n = 1;  // band index, n >= 1
  std::int64_t z = 0;  // slice along eta - (sqrt2+1)^{2/3} xi
  int i = 1;           // which slope family: 1 or 2
  double N1 = 1.0;

  double line_slope() const {
    return kregion_slope(i == 1 ? KRegionId::K1 : KRegionId::K2);
  }
  static double base_slope() {
    return std::pow(SymmetrizerMap::s2 + 1.0, 2.0 / 3.0);
  }
  // the region is a union of two affine boxes (v1 sign branches) in the
  // coordinates v1 = eta - slope*xi, v2 = eta - base*xi
  std::array<Quad2, 2> branches() const {
    const double an = annular_band_edge(A, N1, n);
    const double an1 = annular_band_edge(A, N1, n + 1);
    const double w = N1 / double(A);
    const double sl = line_slope(), s0 = base_slope();
    auto to_xy = [&](double v1, double v2) {
      const double xi = (v2 - v1) / (sl - s0);
      return real2{xi, v1 + sl * xi};
    };
    std::array<Quad2, 2> out;
    for (int br = 0; br < 2; ++br) {
      const double lo = br == 0 ? an : -an1;
      const double hi = br == 0 ? an1 : -an;
      out[br].c = {to_xy(lo, double(z) * w), to_xy(hi, double(z) * w),
                   to_xy(lo, double(z + 1) * w), to_xy(hi, double(z + 1) * w)};
    }
    return out;
  }
};

inline std::array<std::int64_t, 2> annular_tile_locate(double x, double y, std::int64_t A,
                                                       int i, double N1) {
  const double sl = kregion_slope(i == 1 ? KRegionId::K1 : KRegionId::K2);
  const double s0 = AnnularTile::base_slope();
  const double v1 = std::abs(y - sl * x);
  std::int64_t n = 1;
  while (annular_band_edge(A, N1, n + 1) <= v1) ++n;
  const double w = N1 / double(A);
  const std::int64_t z = std::int64_t(std::floor((y - s0 * x) / w));
  return {n, z};
}

// ---------------------------------------------------------------------------
// flat rectangle tiles R_m^d (short xi-side d^-1 N1^-2 N3^3, long side d^-1 N3)

struct FlatTile {
  std::int64_t d = 8;
  std::int64_t m1 = 0, m2 = 0;
  double N1 = 1.0, N3 = 1.0;

  double side_x() const { return N3 * N3 * N3 / (double(d) * N1 * N1); }
  double side_y() const { return N3 / double(d); }
  Box2 box() const {
    const double sx = side_x(), sy = side_y();
    return {double(m1) * sx, double(m2) * sy, double(m1 + 1) * sx, double(m2 + 1) * sy};
  }
};

inline std::array<std::int64_t, 2> flat_tile_locate(double x, double y, std::int64_t d,
                                                    double N1, double N3) {
  const FlatTile t{d, 0, 0, N1, N3};
  return {std::int64_t(std::floor(x / t.side_x())), std::int64_t(std::floor(y / t.side_y()))};
}

// ---------------------------------------------------------------------------
// Whitney cover over square tile pairs

struct CoverEntry {
  std::int64_t A = 0;
  std::int64_t m1a = 0, m1b = 0, m2a = 0, m2b = 0;
  TilePairClass cls = TilePairClass::unresolved;
};

struct WhitneyConfig {
  double N1 = 128.0;
  std::int64_t A_floor = 8;    // coarsest dyadic scale
  std::int64_t A_max = 128;    // finest dyadic scale
};

// Refine tile pairs from the floor scale, emitting each pair at its first
// resolving scale; unresolved pairs at A_max are emitted as terminal residue.
// The seed filter selects floor-scale tile pairs of interest.
inline std::vector<CoverEntry> whitney_cover(
    const WhitneyConfig& cfg,
    const std::function<bool(const SquareTile&, const SquareTile&)>& seed_filter) {
  std::vector<CoverEntry> out;
  struct Item {
    std::int64_t A, m1a, m1b, m2a, m2b;
  };
  std::vector<Item> work;
  const std::int64_t Af = cfg.A_floor;
  for (std::int64_t m1a = -Af; m1a < Af; ++m1a)
    for (std::int64_t m1b = -Af; m1b < Af; ++m1b)
      for (std::int64_t m2a = -Af; m2a < Af; ++m2a)
        for (std::int64_t m2b = -Af; m2b < Af; ++m2b) {
          const SquareTile t1{Af, m1a, m1b, cfg.N1}, t2{Af, m2a, m2b, cfg.N1};
          if (seed_filter(t1, t2)) work.push_back({Af, m1a, m1b, m2a, m2b});
        }
  while (!work.empty()) {
    const Item it = work.back();
    work.pop_back();
    const SquareTile t1{it.A, it.m1a, it.m1b, cfg.N1}, t2{it.A, it.m2a, it.m2b, cfg.N1};
    const TilePairClass cls = classify_tile_pair(t1, t2);
    if (pair_resolved(cls)) {
      out.push_back({it.A, it.m1a, it.m1b, it.m2a, it.m2b, cls});
      continue;
    }
    if (it.A >= cfg.A_max) {
      out.push_back({it.A, it.m1a, it.m1b, it.m2a, it.m2b, TilePairClass::unresolved});
      continue;
    }
    for (int c1 = 0; c1 < 4; ++c1)
      for (int c2 = 0; c2 < 4; ++c2)
        work.push_back({it.A * 2, 2 * it.m1a + (c1 & 1), 2 * it.m1b + (c1 >> 1),
                        2 * it.m2a + (c2 & 1), 2 * it.m2b + (c2 >> 1)});
  }
  return out;
}

// max over first-tile (resp. second-tile) of the number of partners at a scale
inline std::int64_t multiplicity_profile(const std::vector<CoverEntry>& cover, int side) {
  std::unordered_map<std::uint64_t, std::int64_t> cnt;
  auto key = [](std::int64_t A, std::int64_t a, std::int64_t b) {
    return (std::uint64_t(A) << 40) ^ (std::uint64_t(std::uint32_t(a)) << 20) ^
           std::uint64_t(std::uint32_t(b));
  };
  std::int64_t best = 0;
  for (const auto& e : cover) {
    const std::uint64_t k =
        side == 1 ? key(e.A, e.m1a, e.m1b) : key(e.A, e.m2a, e.m2b);
    best = std::max(best, ++cnt[k]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// multiplicity measurement for the three almost-orthogonal families
//
// The existence conditions ("the tile product meets ...") are implemented as
// conjunctions of exact per-factor intersection tests; the angle condition is
// evaluated on corner pairs.  This is a deterministic, dilation-covariant
// surrogate for the exact joint intersection.

class SquareFamily {
 public:
  SquareFamily(double N1, std::int64_t A_floor) : N1_(N1), Af_(A_floor) {}

  bool in_Z(std::int64_t A, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
            std::int64_t m2b) {
    const std::uint64_t k = pack(A, m1a, m1b, m2a, m2b);
    auto it = zcache_.find(k);
    if (it != zcache_.end()) return it->second;
    const bool r = pair_resolved(
        classify_tile_pair(SquareTile{A, m1a, m1b, N1_}, SquareTile{A, m2a, m2b, N1_}));
    zcache_.emplace(k, r);
    return r;
  }
  // newly resolved at A (member of the disjoint cover layer Q_A)
  bool newly_resolved(std::int64_t A, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
                      std::int64_t m2b) {
    if (!in_Z(A, m1a, m1b, m2a, m2b)) return false;
    if (A == Af_) return true;
    return !in_Z(A / 2, floor2(m1a), floor2(m1b), floor2(m2a), floor2(m2b));
  }
  // side conditions: both tiles meet their shells, the angle condition holds
  // at some corner pair, and some corner pair avoids both K pair-regions
  bool side_conditions(std::int64_t A, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
                       std::int64_t m2b, bool require_K_complement) const {
    const Box2 b1 = SquareTile{A, m1a, m1b, N1_}.box();
    const Box2 b2 = SquareTile{A, m2a, m2b, N1_}.box();
    if (!b1.meets_annulus(N1_ / 2, N1_) || !b2.meets_annulus(N1_ / 2, N1_)) return false;
    bool angle_ok = false, kc_ok = !require_K_complement;
    for (const auto& p : b1.corners())
      for (const auto& q : b2.corners()) {
        if (abs_sin_angle(p, q) >= 0.5) angle_ok = true;
        if (require_K_complement && !pair_in_scriptK(p[0], p[1], q[0], q[1], N1_, false) &&
            !pair_in_scriptK(p[0], p[1], q[0], q[1], N1_, true))
          kc_ok = true;
      }
    return angle_ok && kc_ok;
  }
  bool in_Zhat(std::int64_t A, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
               std::int64_t m2b) {
    return newly_resolved(A, m1a, m1b, m2a, m2b) &&
           side_conditions(A, m1a, m1b, m2a, m2b, true);
  }
  // residual pairs at scale A: not inside any Zhat-labelled ancestor product
  bool in_Zbar(std::int64_t A, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
               std::int64_t m2b) {
    if (!side_conditions(A, m1a, m1b, m2a, m2b, true)) return false;
    std::int64_t a1 = m1a, b1 = m1b, a2 = m2a, b2 = m2b;
    for (std::int64_t s = A; s >= Af_; s /= 2) {
      if (in_Zhat(s, a1, b1, a2, b2)) return false;
      a1 = floor2(a1), b1 = floor2(b1), a2 = floor2(a2), b2 = floor2(b2);
    }
    return true;
  }

  double N1() const { return N1_; }
  std::int64_t floor_scale() const { return Af_; }

  // tiles at scale A meeting the shell annulus (N1/2, N1]
  std::vector<std::array<std::int64_t, 2>> shell_tiles(std::int64_t A) const {
    std::vector<std::array<std::int64_t, 2>> out;
    for (std::int64_t a = -A; a < A; ++a)
      for (std::int64_t b = -A; b < A; ++b)
        if (SquareTile{A, a, b, N1_}.box().meets_annulus(N1_ / 2, N1_))
          out.push_back({a, b});
    return out;
  }

 private:
  static std::int64_t floor2(std::int64_t m) { return m >= 0 ? m / 2 : (m - 1) / 2; }
  static std::uint64_t pack(std::int64_t A, std::int64_t a, std::int64_t b, std::int64_t c,
                            std::int64_t d) {
    auto u = [](std::int64_t v) { return std::uint64_t(v + 4096) & 0x1fff; };
    std::uint64_t lg = 0;
    while ((std::int64_t(1) << lg) < A) ++lg;
    return (((((u(a) << 13 | u(b)) << 13 | u(c)) << 13) | u(d)) << 5) | lg;
  }
  double N1_;
  std::int64_t Af_;
  std::unordered_map<std::uint64_t, bool> zcache_;
};

struct MultiplicityResult {
  std::int64_t zhat_side1 = 0;  // max partners of a fixed first tile
  std::int64_t zhat_side2 = 0;
  std::int64_t zbar_side1 = 0;
  std::int64_t zbar_side2 = 0;
  std::int64_t max_all() const {
    return std::max({zhat_side1, zhat_side2, zbar_side1, zbar_side2});
  }
};

// Max overlap multiplicity of the square-tile pair families over A in
// [floor, A_top], including the residual family at A_top.
inline MultiplicityResult measure_square_family(double N1, std::int64_t A_floor,
                                                std::int64_t A_top) {
  SquareFamily fam(N1, A_floor);
  MultiplicityResult res;
  for (std::int64_t A = A_floor; A <= A_top; A *= 2) {
    const auto tiles = fam.shell_tiles(A);
    std::unordered_map<std::uint64_t, std::int64_t> c1, c2;
    auto key = [](std::int64_t a, std::int64_t b) {
      return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
    };
    for (const auto& t1 : tiles)
      for (const auto& t2 : tiles) {
        if (fam.in_Zhat(A, t1[0], t1[1], t2[0], t2[1])) {
          res.zhat_side1 = std::max(res.zhat_side1, ++c1[key(t1[0], t1[1])]);
          res.zhat_side2 = std::max(res.zhat_side2, ++c2[key(t2[0], t2[1])]);
        }
      }
  }
  {
    const auto tiles = fam.shell_tiles(A_top);
    std::unordered_map<std::uint64_t, std::int64_t> c1, c2;
    auto key = [](std::int64_t a, std::int64_t b) {
      return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
    };
    for (const auto& t1 : tiles)
      for (const auto& t2 : tiles)
        if (fam.in_Zbar(A_top, t1[0], t1[1], t2[0], t2[1])) {
          res.zbar_side1 = std::max(res.zbar_side1, ++c1[key(t1[0], t1[1])]);
          res.zbar_side2 = std::max(res.zbar_side2, ++c2[key(t2[0], t2[1])]);
        }
  }
  return res;
}

// ---------------------------------------------------------------------------
// annular family (strip x square products near the K_i directions)

class AnnularFamily {
 public:
  AnnularFamily(double N1, std::int64_t A_floor, int i) : N1_(N1), Af_(A_floor), i_(i) {}

  bool in_M(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t ka,
            std::int64_t kb) {
    const std::uint64_t k = pack(A, n, z, ka, kb);
    auto it = mcache_.find(k);
    if (it != mcache_.end()) return it->second;
    const auto branches = AnnularTile{A, n, z, i_, N1_}.branches();
    const Quad2 sq = quad_of_box(SquareTile{A, ka, kb, N1_}.box());
    const double thr_phi = N1_ * N1_ * N1_ / double(A);
    const double thr_f = N1_ * N1_ / double(A);
    bool ok_phi = true, ok_f = true;
    for (const auto& br : branches) {
      const double r = std::max(br.max_abs_coord(), sq.max_abs_coord());
      if (certified_min(br, sq, [](double a, double b, double c, double d) {
            return resonance_Phi(a, b, c, d);
          }, 6.0 * r * r) < thr_phi)
        ok_phi = false;
      if (certified_min(br, sq, [](double a, double b, double c, double d) {
            return transversality_F(a, b, c, d);
          }, 6.0 * r) < thr_f)
        ok_f = false;
    }
    const bool r = ok_phi || ok_f;
    mcache_.emplace(k, r);
    return r;
  }

  // containment in the union of coarser-scale resolved products, sampled on a
  // deterministic subgrid of the product
  bool covered_coarser(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t ka,
                       std::int64_t kb) {
    if (A == Af_) return false;
    const auto branches = AnnularTile{A, n, z, i_, N1_}.branches();
    const Quad2 sq = quad_of_box(SquareTile{A, ka, kb, N1_}.box());
    const double fr[3] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
    for (const auto& br : branches)
      for (double f1 : fr)
        for (double f2 : fr) {
          const real2 p = bilerp(br, f1, f2);
          for (double g1 : fr)
            for (double g2 : fr) {
              const real2 q = bilerp(sq, g1, g2);
              bool covered = false;
              for (std::int64_t Ac = Af_; Ac < A && !covered; Ac *= 2) {
                const auto mloc = annular_tile_locate(p[0], p[1], Ac, i_, N1_);
                const auto kloc = square_tile_locate(q[0], q[1], Ac, N1_);
                covered = in_M(Ac, mloc[0], mloc[1], kloc[0], kloc[1]);
              }
              if (!covered) return false;
            }
        }
    return true;
  }

  bool side_conditions(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t ka,
                       std::int64_t kb) const {
    const KRegion ki{i_ == 1 ? KRegionId::K1 : KRegionId::K2, N1_};
    const KRegion k0{KRegionId::K0, N1_};
    const auto branches = AnnularTile{A, n, z, i_, N1_}.branches();
    bool strip_ok = false, shell_ok = false;
    for (const auto& br : branches) {
      if (quad_meets_kregion(br, ki)) strip_ok = true;
      if (br.meets_annulus(N1_ / 2, N1_)) shell_ok = true;
    }
    if (!strip_ok || !shell_ok) return false;
    const Box2 b = SquareTile{A, ka, kb, N1_}.box();
    return box_meets_kregion(b, k0) && b.meets_annulus(N1_ / 2, N1_);
  }

  bool in_Zhat(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t ka,
               std::int64_t kb) {
    return in_M(A, n, z, ka, kb) && !covered_coarser(A, n, z, ka, kb) &&
           side_conditions(A, n, z, ka, kb);
  }
  bool in_Zbar(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t ka,
               std::int64_t kb) {
    return !in_M(A, n, z, ka, kb) && side_conditions(A, n, z, ka, kb);
  }

  // enumerate candidate strip tiles (n,z) and square tiles meeting the side
  // conditions' individual regions
  std::vector<std::array<std::int64_t, 2>> strip_tiles(std::int64_t A) const {
    std::vector<std::array<std::int64_t, 2>> out;
    const KRegion ki{i_ == 1 ? KRegionId::K1 : KRegionId::K2, N1_};
    const std::int64_t zmax = 8 * A;
    for (std::int64_t n = 1; n <= 2; ++n) {
      if (annular_band_edge(A, N1_, n) > ki.half_width()) break;
      for (std::int64_t z = -zmax; z <= zmax; ++z) {
        const auto branches = AnnularTile{A, n, z, i_, N1_}.branches();
        bool strip_ok = false, shell_ok = false;
        for (const auto& br : branches) {
          if (quad_meets_kregion(br, ki)) strip_ok = true;
          if (br.meets_annulus(N1_ / 2, N1_)) shell_ok = true;
        }
        if (strip_ok && shell_ok) out.push_back({n, z});
      }
    }
    return out;
  }
  std::vector<std::array<std::int64_t, 2>> square_tiles(std::int64_t A) const {
    std::vector<std::array<std::int64_t, 2>> out;
    const KRegion k0{KRegionId::K0, N1_};
    for (std::int64_t a = -A; a < A; ++a)
      for (std::int64_t b = -A; b < A; ++b) {
        const Box2 bx = SquareTile{A, a, b, N1_}.box();
        if (box_meets_kregion(bx, k0) && bx.meets_annulus(N1_ / 2, N1_))
          out.push_back({a, b});
      }
    return out;
  }

 private:
  static real2 bilerp(const Quad2& q, double f1, double f2) {
    const real2& c00 = q.c[0];
    const real2& c10 = q.c[1];
    const real2& c01 = q.c[2];
    const real2& c11 = q.c[3];
    return {(1 - f1) * ((1 - f2) * c00[0] + f2 * c01[0]) + f1 * ((1 - f2) * c10[0] + f2 * c11[0]),
            (1 - f1) * ((1 - f2) * c00[1] + f2 * c01[1]) + f1 * ((1 - f2) * c10[1] + f2 * c11[1])};
  }
  static std::uint64_t pack(std::int64_t A, std::int64_t n, std::int64_t z, std::int64_t c,
                            std::int64_t d) {
    auto u = [](std::int64_t v) { return std::uint64_t(v + 16384) & 0x7fff; };
    std::uint64_t lg = 0;
    while ((std::int64_t(1) << lg) < A) ++lg;
    return (((((u(n) << 15 | u(z)) << 15 | u(c)) << 15) | u(d)) << 4) | lg;
  }
  double N1_;
  std::int64_t Af_;
  int i_;
  std::unordered_map<std::uint64_t, bool> mcache_;
};

inline MultiplicityResult measure_annular_family(double N1, std::int64_t A_floor,
                                                 std::int64_t A_top, int i) {
  AnnularFamily fam(N1, A_floor, i);
  MultiplicityResult res;
  auto key = [](std::int64_t a, std::int64_t b) {
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
  };
  for (std::int64_t A = A_floor; A <= A_top; A *= 2) {
    const auto strips = fam.strip_tiles(A);
    const auto squares = fam.square_tiles(A);
    std::unordered_map<std::uint64_t, std::int64_t> c1, c2, d1, d2;
    for (const auto& m : strips)
      for (const auto& k : squares) {
        if (fam.in_Zhat(A, m[0], m[1], k[0], k[1])) {
          res.zhat_side1 = std::max(res.zhat_side1, ++c1[key(m[0], m[1])]);
          res.zhat_side2 = std::max(res.zhat_side2, ++c2[key(k[0], k[1])]);
        }
        if (A == A_top && fam.in_Zbar(A, m[0], m[1], k[0], k[1])) {
          res.zbar_side1 = std::max(res.zbar_side1, ++d1[key(m[0], m[1])]);
          res.zbar_side2 = std::max(res.zbar_side2, ++d2[key(k[0], k[1])]);
        }
      }
  }
  return res;
}

// ---------------------------------------------------------------------------
// flat family (rectangle tiles at nearly opposite xi)

class FlatFamily {
 public:
  FlatFamily(double N1, double N3, std::int64_t d_floor, std::int64_t A0, std::int64_t j1,
             std::int64_t j2)
      : N1_(N1), N3_(N3), df_(d_floor), sec1_{A0, j1}, sec2_{A0, j2} {}

  // certified size conditions + sector side conditions + xi-sum condition
  bool in_Z(std::int64_t d, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
            std::int64_t m2b) {
    const std::uint64_t k = pack(d, m1a, m1b, m2a, m2b);
    auto it = zcache_.find(k);
    if (it != zcache_.end()) return it->second;
    const bool r = compute_Z(d, m1a, m1b, m2a, m2b);
    zcache_.emplace(k, r);
    return r;
  }
  bool newly_resolved(std::int64_t d, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
                      std::int64_t m2b) {
    if (!in_Z(d, m1a, m1b, m2a, m2b)) return false;
    if (d == df_) return true;
    return !in_Z(d / 2, floor2(m1a), floor2(m1b), floor2(m2a), floor2(m2b));
  }
  bool in_Zbar(std::int64_t d, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
               std::int64_t m2b) {
    const Box2 b1 = FlatTile{d, m1a, m1b, N1_, N3_}.box();
    const Box2 b2 = FlatTile{d, m2a, m2b, N1_, N3_}.box();
    return !in_Z(d, m1a, m1b, m2a, m2b) && side_ok(b1, b2);
  }

  std::vector<std::array<std::int64_t, 2>> tiles_in_sector(std::int64_t d,
                                                           const AngularSector& sec) const {
    std::vector<std::array<std::int64_t, 2>> out;
    const FlatTile t{d, 0, 0, N1_, N3_};
    const std::int64_t mx = std::int64_t(std::ceil(2.0 * N1_ / t.side_x()));
    const std::int64_t my = std::int64_t(std::ceil(2.0 * N1_ / t.side_y()));
    for (std::int64_t a = -mx; a < mx; ++a)
      for (std::int64_t b = -my; b < my; ++b)
        if (box_meets_sector(FlatTile{d, a, b, N1_, N3_}.box(), sec)) out.push_back({a, b});
    return out;
  }
  const AngularSector& sector1() const { return sec1_; }
  const AngularSector& sector2() const { return sec2_; }
  double xi_sum_cap() const { return 2.0 * N3_ * N3_ * N3_ / (N1_ * N1_); }

 private:
  bool side_ok(const Box2& b1, const Box2& b2) const {
    if (!box_meets_sector(b1, sec1_) || !box_meets_sector(b2, sec2_)) return false;
    const double smax = std::max({std::abs(b1.x0 + b2.x0), std::abs(b1.x0 + b2.x1),
                                  std::abs(b1.x1 + b2.x0), std::abs(b1.x1 + b2.x1)});
    return smax <= xi_sum_cap();
  }
  bool compute_Z(std::int64_t d, std::int64_t m1a, std::int64_t m1b, std::int64_t m2a,
                 std::int64_t m2b) {
    const Box2 b1 = FlatTile{d, m1a, m1b, N1_, N3_}.box();
    const Box2 b2 = FlatTile{d, m2a, m2b, N1_, N3_}.box();
    if (!side_ok(b1, b2)) return false;
    const double thr_phi = N3_ * N3_ * N3_ / double(d);
    const double thr_f = N1_ * N3_ / double(d);
    return pair_resolved(classify_product(quad_of_box(b1), quad_of_box(b2), thr_phi, thr_f));
  }
  static std::int64_t floor2(std::int64_t m) { return m >= 0 ? m / 2 : (m - 1) / 2; }
  static std::uint64_t pack(std::int64_t d, std::int64_t a, std::int64_t b, std::int64_t c,
                            std::int64_t e) {
    auto u = [](std::int64_t v) { return std::uint64_t(v + 16384) & 0x7fff; };
    std::uint64_t lg = 0;
    while ((std::int64_t(1) << lg) < d) ++lg;
    return (((((u(a) << 15 | u(b)) << 15 | u(c)) << 15) | u(e)) << 4) | lg;
  }
  double N1_, N3_;
  std::int64_t df_;
  AngularSector sec1_, sec2_;
  std::unordered_map<std::uint64_t, bool> zcache_;
};

inline MultiplicityResult measure_flat_family(double N1, double N3, std::int64_t d_floor,
                                              std::int64_t d_top, std::int64_t A0,
                                              std::int64_t j1, std::int64_t j2) {
  FlatFamily fam(N1, N3, d_floor, A0, j1, j2);
  MultiplicityResult res;
  auto key = [](std::int64_t a, std::int64_t b) {
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
  };
  for (std::int64_t d = d_floor; d <= d_top; d *= 2) {
    const auto t1s = fam.tiles_in_sector(d, fam.sector1());
    const auto t2s = fam.tiles_in_sector(d, fam.sector2());
    std::unordered_map<std::uint64_t, std::int64_t> c1, c2, e1, e2;
    for (const auto& t1 : t1s)
      for (const auto& t2 : t2s) {
        if (fam.newly_resolved(d, t1[0], t1[1], t2[0], t2[1])) {
          res.zhat_side1 = std::max(res.zhat_side1, ++c1[key(t1[0], t1[1])]);
          res.zhat_side2 = std::max(res.zhat_side2, ++c2[key(t2[0], t2[1])]);
        }
        if (d == d_top && fam.in_Zbar(d, t1[0], t1[1], t2[0], t2[1])) {
          res.zbar_side1 = std::max(res.zbar_side1, ++e1[key(t1[0], t1[1])]);
          res.zbar_side2 = std::max(res.zbar_side2, ++e2[key(t2[0], t2[1])]);
        }
      }
  }
  return res;
}

}  // namespace zkw
