#pragma once

// Thickened-hypersurface experiments in R^3: triple intersection volumes,
// the trilinear convolution form with an FFT-based 3-D convolution, and the
// ball-train counterexample showing that transversality restricted to
// convolution triples does not give the full trilinear bound.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "zkw/errors.hpp"
#include "zkw/fft.hpp"
#include "zkw/lattice.hpp"
#include "zkw/resonance.hpp"
#include "zkw/rng.hpp"

namespace zkw {

using real3 = std::array<double, 3>;

struct Box3 {
  real3 lo{-1, -1, -1};
  real3 hi{1, 1, 1};

  bool contains(const real3& p) const {
    for (int i = 0; i < 3; ++i)
      if (p[i] < lo[i] || p[i] >= hi[i]) return false;
    return true;
  }
  double volume() const {
    return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  }
  static Box3 intersect(const Box3& a, const Box3& b) {
    Box3 out;
    for (int i = 0; i < 3; ++i) {
      out.lo[i] = std::max(a.lo[i], b.lo[i]);
      out.hi[i] = std::min(a.hi[i], b.hi[i]);
      if (out.hi[i] < out.lo[i]) out.hi[i] = out.lo[i];
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// surface catalog: planes x.n = c and graphs x[axis] = F(u,v) with F affine,
// sinusoidal, or one of the two dispersion symbols

struct SurfaceSpec {
  enum class Kind { plane, graph };
  enum class GraphFun { affine, sine, dispersion, dispersion_sym };

  Kind kind = Kind::plane;
  real3 normal{0, 0, 1};  // unit normal (plane)
  double offset = 0;
  GraphFun fun = GraphFun::affine;
  int axis = 2;                    // graph coordinate
  double a0 = 0, a1 = 0, a2 = 0;   // affine coefficients; a0 doubles as the sine offset
  double eps = 0.125;
  Box3 domain{};
  double holder_b = 1.0, holder_beta = 1.0;  // recorded only

  static SurfaceSpec plane_through(const real3& n, double c, double eps, Box3 box) {
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!(len > 0) || !(eps > 0)) throw ConfigInvalid("plane_through");
    SurfaceSpec s;
    s.kind = Kind::plane;
    s.normal = {n[0] / len, n[1] / len, n[2] / len};
    s.offset = c / len;
    s.eps = eps;
    s.domain = box;
    return s;
  }
  static SurfaceSpec graph_of(GraphFun fun, int axis, double a0, double a1, double a2,
                              double eps, Box3 box) {
    if (axis < 0 || axis > 2 || !(eps > 0)) throw ConfigInvalid("graph_of");
    SurfaceSpec s;
    s.kind = Kind::graph;
    s.fun = fun;
    s.axis = axis;
    s.a0 = a0;
    s.a1 = a1;
    s.a2 = a2;
    s.eps = eps;
    s.domain = box;
    return s;
  }

  double graph_value(double u, double v) const {
    switch (fun) {
      case GraphFun::affine: return a0 + a1 * u + a2 * v;
      case GraphFun::sine: return std::sin(3.14159265358979323846 * u) + a0;
      case GraphFun::dispersion: return dispersion_phi(u, v);
      case GraphFun::dispersion_sym: return dispersion_psi_sym(u, v);
    }
    return 0;
  }
  std::array<double, 2> graph_grad(double u, double v) const {
    const double pi = 3.14159265358979323846;
    switch (fun) {
      case GraphFun::affine: return {a1, a2};
      case GraphFun::sine: return {pi * std::cos(pi * u), 0.0};
      case GraphFun::dispersion: return symbol_gradient(Symbol::phi, u, v);
      case GraphFun::dispersion_sym: return symbol_gradient(Symbol::psi_sym, u, v);
    }
    return {0, 0};
  }
  // (u,v) = the non-graph coordinates in increasing axis order
  std::array<int, 2> uv_axes() const {
    if (axis == 0) return {1, 2};
    if (axis == 1) return {0, 2};
    return {0, 1};
  }

  // signed distance-like coordinate: |t| < eps means inside the thickening
  double slab_coordinate(const real3& p) const {
    if (kind == Kind::plane)
      return normal[0] * p[0] + normal[1] * p[1] + normal[2] * p[2] - offset;
    const auto uv = uv_axes();
    return p[axis] - graph_value(p[uv[0]], p[uv[1]]);
  }
  bool contains(const real3& p) const {
    return domain.contains(p) && std::abs(slab_coordinate(p)) < eps;
  }
  // membership with a trapezoid boundary layer of width w (w = 0: hard)
  double soft_weight(const real3& p, double w) const {
    if (!domain.contains(p)) return 0.0;
    const double t = std::abs(slab_coordinate(p));
    if (w <= 0) return t < eps ? 1.0 : 0.0;
    return std::clamp((eps - t) / w + 0.5, 0.0, 1.0);
  }
  // l1 sensitivity of the slab coordinate to a coordinate displacement
  double slab_l1_sensitivity(const real3& p) const {
    if (kind == Kind::plane)
      return std::abs(normal[0]) + std::abs(normal[1]) + std::abs(normal[2]);
    const auto uv = uv_axes();
    const auto g = graph_grad(p[uv[0]], p[uv[1]]);
    return 1.0 + std::abs(g[0]) + std::abs(g[1]);
  }

  real3 normal_at(const real3& p) const {
    if (kind == Kind::plane) return normal;
    const auto uv = uv_axes();
    const auto g = graph_grad(p[uv[0]], p[uv[1]]);
    real3 n{0, 0, 0};
    n[axis] = 1.0;
    n[uv[0]] = -g[0];
    n[uv[1]] = -g[1];
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    return {n[0] / len, n[1] / len, n[2] / len};
  }
  // random point on the surface inside the domain box
  real3 sample_point(Rng& rng) const {
    if (kind == Kind::plane) {
      for (int tries = 0; tries < 256; ++tries) {
        real3 p;
        for (int i = 0; i < 3; ++i)
          p[i] = domain.lo[i] + rng.uniform() * (domain.hi[i] - domain.lo[i]);
        const double t = slab_coordinate(p);
        real3 q{p[0] - t * normal[0], p[1] - t * normal[1], p[2] - t * normal[2]};
        if (domain.contains(q)) return q;
      }
      throw DegenerateTransversality("plane does not meet its domain box");
    }
    const auto uv = uv_axes();
    for (int tries = 0; tries < 256; ++tries) {
      real3 p{0, 0, 0};
      p[uv[0]] = domain.lo[uv[0]] + rng.uniform() * (domain.hi[uv[0]] - domain.lo[uv[0]]);
      p[uv[1]] = domain.lo[uv[1]] + rng.uniform() * (domain.hi[uv[1]] - domain.lo[uv[1]]);
      p[axis] = graph_value(p[uv[0]], p[uv[1]]);
      if (domain.contains(p)) return p;
    }
    throw DegenerateTransversality("graph does not meet its domain box");
  }

  // z-footprint of the thickened surface over a base point (x,y):
  // an interval, the whole column, or nothing; nullopt = not column-separable
  struct ZFootprint {
    bool whole = false, empty = false;
    double lo = 0, hi = 0;
  };
  std::optional<ZFootprint> z_footprint(double x, double y) const {
    ZFootprint f;
    if (kind == Kind::plane) {
      const double rest = normal[0] * x + normal[1] * y - offset;
      if (normal[2] != 0.0) {
        double zlo = (-eps - rest) / normal[2], zhi = (eps - rest) / normal[2];
        if (zlo > zhi) std::swap(zlo, zhi);
        f.lo = zlo;
        f.hi = zhi;
      } else if (std::abs(rest) < eps) {
        f.whole = true;
      } else {
        f.empty = true;
      }
      return f;
    }
    if (axis == 2) {
      const double c = graph_value(x, y);
      f.lo = c - eps;
      f.hi = c + eps;
      return f;
    }
    if (fun == GraphFun::affine) {
      // |p[axis] - (a0 + a1 u + a2 v)| < eps with z one of (u,v)
      const double base = axis == 0 ? x : y;        // the graph coordinate value
      const double other = axis == 0 ? y : x;       // the non-z parameter
      const double rest = base - a0 - a1 * other;   // rest - a2 z in (-eps, eps)
      if (a2 != 0.0) {
        double zlo = (rest - eps) / a2, zhi = (rest + eps) / a2;
        if (zlo > zhi) std::swap(zlo, zhi);
        f.lo = zlo;
        f.hi = zhi;
        return f;
      }
      if (std::abs(rest) < eps) f.whole = true;
      else f.empty = true;
      return f;
    }
    return std::nullopt;  // nonlinear non-z graph: no exact column footprint
  }
};

// min |det(n1,n2,n3)| over random surface-point triples
inline double sampled_min_transversality(const SurfaceSpec& s1, const SurfaceSpec& s2,
                                         const SurfaceSpec& s3, int n_samples, Rng& rng) {
  double best = 1e300;
  for (int i = 0; i < n_samples; ++i) {
    const real3 p1 = s1.sample_point(rng);
    const real3 p2 = s2.sample_point(rng);
    const real3 p3 = s3.sample_point(rng);
    best = std::min(best,
                    std::abs(det3(s1.normal_at(p1), s2.normal_at(p2), s3.normal_at(p3))));
  }
  return best;
}

// ---------------------------------------------------------------------------
// triple intersection volume

struct VolumeEstimate {
  double value = 0;
  double stderr_est = 0;  // nonzero for the Monte-Carlo method
  double min_det = 0;     // sampled transversality; A = 1/min_det
  double A = 0;
};

enum class VolumeMethod { grid, monte_carlo };

inline VolumeEstimate triple_intersection_volume(const SurfaceSpec& s1, const SurfaceSpec& s2,
                                                 const SurfaceSpec& s3, VolumeMethod method,
                                                 double resolution, std::uint64_t seed = 7) {
  Rng rng(seed);
  VolumeEstimate out;
  out.min_det = sampled_min_transversality(s1, s2, s3, 1000, rng);
  if (out.min_det < 1e-6) throw DegenerateTransversality("triple_intersection_volume");
  out.A = 1.0 / out.min_det;

  const Box3 box = Box3::intersect(Box3::intersect(s1.domain, s2.domain), s3.domain);
  if (box.volume() <= 0) return out;

  if (method == VolumeMethod::monte_carlo) {
    const std::int64_t n = std::llround(resolution);
    if (n < 1) throw ConfigInvalid("monte_carlo sample count");
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      real3 p;
      for (int d = 0; d < 3; ++d)
        p[d] = box.lo[d] + rng.uniform() * (box.hi[d] - box.lo[d]);
      if (s1.contains(p) && s2.contains(p) && s3.contains(p)) ++hits;
    }
    const double phat = double(hits) / double(n);
    out.value = phat * box.volume();
    out.stderr_est = box.volume() * std::sqrt(std::max(phat * (1 - phat), 0.0) / double(n));
    return out;
  }

  const double h = resolution;
  if (!(h > 0)) throw ConfigInvalid("grid step");
  const auto f1 = [&](double x, double y) { return s1.z_footprint(x, y); };
  const bool separable = f1(box.lo[0], box.lo[1]).has_value() &&
                         s2.z_footprint(box.lo[0], box.lo[1]).has_value() &&
                         s3.z_footprint(box.lo[0], box.lo[1]).has_value();
  const std::int64_t nx = std::max<std::int64_t>(1, std::llround((box.hi[0] - box.lo[0]) / h));
  const std::int64_t ny = std::max<std::int64_t>(1, std::llround((box.hi[1] - box.lo[1]) / h));
  const double hx = (box.hi[0] - box.lo[0]) / double(nx);
  const double hy = (box.hi[1] - box.lo[1]) / double(ny);

  if (separable) {
    // midpoint rule in (x,y), exact measure along z
    double vol = 0;
    for (std::int64_t i = 0; i < nx; ++i)
      for (std::int64_t j = 0; j < ny; ++j) {
        const double x = box.lo[0] + (i + 0.5) * hx;
        const double y = box.lo[1] + (j + 0.5) * hy;
        double zlo = box.lo[2], zhi = box.hi[2];
        bool empty = false;
        for (const SurfaceSpec* s : {&s1, &s2, &s3}) {
          const auto fp = *s->z_footprint(x, y);
          if (fp.empty) { empty = true; break; }
          if (!fp.whole) {
            zlo = std::max(zlo, fp.lo);
            zhi = std::min(zhi, fp.hi);
          }
        }
        if (!empty && zhi > zlo) vol += hx * hy * (zhi - zlo);
      }
    out.value = vol;
    return out;
  }

  const std::int64_t nz = std::max<std::int64_t>(1, std::llround((box.hi[2] - box.lo[2]) / h));
  const double hz = (box.hi[2] - box.lo[2]) / double(nz);
  double vol = 0;
  for (std::int64_t i = 0; i < nx; ++i)
    for (std::int64_t j = 0; j < ny; ++j)
      for (std::int64_t k = 0; k < nz; ++k) {
        const real3 p{box.lo[0] + (i + 0.5) * hx, box.lo[1] + (j + 0.5) * hy,
                      box.lo[2] + (k + 0.5) * hz};
        if (s1.contains(p) && s2.contains(p) && s3.contains(p)) vol += hx * hy * hz;
      }
  out.value = vol;
  return out;
}

// ---------------------------------------------------------------------------
// trilinear convolution form int (f1*f2) f3 with indicator data on the
// thickened surfaces, via zero-padded FFT convolution

struct ThickenedTrilinearResult {
  double value = 0;
  std::array<double, 3> norms{0, 0, 0};
  double min_det = 0;
  double A = 0;
  double bound = 0;  // eps^{3/2} A^{1/2} * product of norms
  double ratio = 0;
};

inline ThickenedTrilinearResult thickened_trilinear(const SurfaceSpec& s1,
                                                    const SurfaceSpec& s2,
                                                    const SurfaceSpec& s3, std::size_t n,
                                                    std::uint64_t seed = 7) {
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigInvalid("grid size must be a power of two");
  const Box3& box = s1.domain;
  const double side = box.hi[0] - box.lo[0];
  if (side <= 0 || box.hi[1] - box.lo[1] != side || box.hi[2] - box.lo[2] != side)
    throw ConfigInvalid("thickened_trilinear needs a cubic domain box");
  const double h = side / double(n);
  const double eps_min = std::min({s1.eps, s2.eps, s3.eps});
  if (h > eps_min / 4.0) throw GridTooCoarse("thickened_trilinear");

  Rng rng(seed);
  ThickenedTrilinearResult out;
  out.min_det = sampled_min_transversality(s1, s2, s3, 1000, rng);
  if (out.min_det < 1e-6) throw DegenerateTransversality("thickened_trilinear");
  out.A = 1.0 / out.min_det;

  const std::size_t N = 2 * n;  // zero padding for a linear convolution
  std::vector<cplx> F1(N * N * N, cplx(0, 0)), F2(N * N * N, cplx(0, 0));
  auto mid = [&](std::size_t i) { return box.lo[0] + (double(i) + 0.5) * h; };
  double q1 = 0, q2 = 0, q3 = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const real3 p{box.lo[0] + (i + 0.5) * h, box.lo[1] + (j + 0.5) * h,
                      box.lo[2] + (k + 0.5) * h};
        const double v1 = s1.contains(p) ? 1.0 : 0.0;
        const double v2 = s2.contains(p) ? 1.0 : 0.0;
        const double v3 = s3.contains(p) ? 1.0 : 0.0;
        q1 += v1, q2 += v2, q3 += v3;
        const std::size_t idx = (i * N + j) * N + k;
        F1[idx] = v1;
        F2[idx] = v2;
      }
  (void)mid;
  out.norms = {std::sqrt(q1 * h * h * h), std::sqrt(q2 * h * h * h), std::sqrt(q3 * h * h * h)};

  fft3(F1, N, -1);
  fft3(F2, N, -1);
  for (std::size_t i = 0; i < F1.size(); ++i) F1[i] *= F2[i];
  fft3(F1, N, +1);
  const double inv = 1.0 / double(N * N * N);

  // the convolution node (i1+i2, j1+j2, k1+k2) sits at coordinate
  // 2*lo + (idx+1)*h per axis; evaluate f3 there with a trapezoid boundary
  double acc = 0;
  for (std::size_t i = 0; i + 1 < N; ++i)
    for (std::size_t j = 0; j + 1 < N; ++j)
      for (std::size_t k = 0; k + 1 < N; ++k) {
        const real3 p{2 * box.lo[0] + (double(i) + 1) * h, 2 * box.lo[1] + (double(j) + 1) * h,
                      2 * box.lo[2] + (double(k) + 1) * h};
        if (!box.contains(p)) continue;
        const double w = s3.soft_weight(p, h * s3.slab_l1_sensitivity(p));
        if (w > 0) acc += w * F1[(i * N + j) * N + k].real() * inv;
      }
  out.value = acc * h * h * h * h * h * h;
  out.bound = std::pow(eps_min, 1.5) * std::sqrt(out.A) * out.norms[0] * out.norms[1] *
              out.norms[2];
  out.ratio = out.bound > 0 ? out.value / out.bound : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// ball-train counterexample

struct BallTrain {
  std::int64_t R = 8;
  double radius = std::ldexp(1.0, -10);

  bool contains(const real3& p) const {
    const double k = std::round(p[0]);
    if (std::abs(k) > double(R)) return false;
    const double dx = p[0] - k;
    return dx * dx + p[1] * p[1] + p[2] * p[2] <= radius * radius;
  }
  // number of center pairs (k1,k2) with k1+k2 also a center
  double pair_count() const {
    const double n = double(2 * R + 1);
    return n * n - double(R) * double(R + 1);
  }
};

// the three surfaces of the counterexample, thickness 2^-5
inline std::array<SurfaceSpec, 3> counterexample_surfaces(double R) {
  const double e = std::ldexp(1.0, -5);
  const double X = R + 1.0;
  Box3 strip1{{-X, -e, -1}, {X, e, 1}};
  Box3 strip2{{-X, -1, -e}, {X, 1, e}};
  Box3 full{{-X, -1, -1}, {X, 1, 1}};
  SurfaceSpec s1 = SurfaceSpec::plane_through({0, 0, 1}, 0.0, e, strip1);
  SurfaceSpec s2 = SurfaceSpec::plane_through({0, 1, 0}, 0.0, e, strip2);
  SurfaceSpec s3 = SurfaceSpec::graph_of(SurfaceSpec::GraphFun::sine, 2, 0, 0, 0, e, full);
  return {s1, s2, s3};
}

struct CounterexampleResult {
  std::int64_t R = 0;
  double epsilon = std::ldexp(1.0, -5);
  double value = 0;         // int (f1*f2) f3 with f_i the ball-train indicator
  double norm_product = 0;  // product of the three L2 norms
  double ratio = 0;
  double min_det = 0;       // over convolution-constrained surface triples
  double single_ball_value = 0;
  double pair_count = 0;
};

// The train's balls are 1-separated while each ball pair convolution has
// diameter < 1/2, so the trilinear integral splits exactly into
// (number of center pairs with k1+k2 in the train) x (single-ball integral).
// The single-ball integral is quadrature over the outer variable with the
// exact two-ball overlap volume as integrand.
inline CounterexampleResult restricted_transversality_counterexample(std::int64_t R,
                                                                     double step,
                                                                     std::uint64_t seed = 7) {
  if (R < 0) throw ConfigInvalid("R must be nonnegative");
  BallTrain train{R};
  const double r = train.radius;
  if (!(step > 0)) step = r / 8.0;

  // overlap volume of two balls of radius r at center distance d
  auto lens = [&](double d) {
    if (d >= 2 * r) return 0.0;
    const double t = d / r;
    return (3.14159265358979323846 / 12.0) * (4.0 + t) * (2.0 - t) * (2.0 - t) * r * r * r;
  };
  const std::int64_t m = std::max<std::int64_t>(1, std::llround(2 * r / step));
  const double h = 2 * r / double(m);
  double t0 = 0;
  double ball_cells = 0;
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      for (std::int64_t k = 0; k < m; ++k) {
        const double x = -r + (i + 0.5) * h;
        const double y = -r + (j + 0.5) * h;
        const double z = -r + (k + 0.5) * h;
        const double d = std::sqrt(x * x + y * y + z * z);
        if (d <= r) {
          t0 += lens(d);
          ball_cells += 1.0;
        }
      }
  t0 *= h * h * h;
  const double ball_volume = ball_cells * h * h * h;

  CounterexampleResult out;
  out.R = R;
  out.single_ball_value = t0;
  out.pair_count = train.pair_count();
  out.value = out.pair_count * t0;
  const double norm2 = double(2 * R + 1) * ball_volume;  // squared L2 norm of the indicator
  out.norm_product = std::pow(norm2, 1.5);
  out.ratio = out.norm_product > 0 ? out.value / out.norm_product : 0.0;

  // transversality at convolution triples p1 + p2 = p3 with p_i in the train
  const auto surf = counterexample_surfaces(double(R));
  Rng rng(seed);
  double best = 1e300;
  for (int s = 0; s < 1000; ++s) {
    const std::int64_t k1 = std::int64_t(rng.uniform_int(2 * R + 1)) - R;
    std::int64_t k2 = std::int64_t(rng.uniform_int(2 * R + 1)) - R;
    if (std::abs(k1 + k2) > R) k2 = -k1;  // fold back onto an admissible pair
    real3 d1, d2;
    do {
      for (int c = 0; c < 3; ++c) d1[c] = (2 * rng.uniform() - 1) * r;
    } while (d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2] > r * r);
    do {
      for (int c = 0; c < 3; ++c) d2[c] = (2 * rng.uniform() - 1) * r;
    } while (d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2] > r * r);
    const real3 p3{double(k1) + d1[0] + double(k2) + d2[0], d1[1] + d2[1], d1[2] + d2[2]};
    const real3 n3 = surf[2].normal_at({p3[0], p3[1], 0});
    best = std::min(best, std::abs(det3(surf[0].normal, surf[1].normal, n3)));
  }
  out.min_det = best;
  return out;
}

}  // namespace zkw
