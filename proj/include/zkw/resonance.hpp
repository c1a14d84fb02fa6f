#pragma once

// Resonance and transversality polynomials for the unsymmetrized (phi) and
// symmetrized (psi~) flows, surface normals of the dispersion graphs, and the
// transversality determinant of a normal triple.

#include <array>
#include <cmath>

#include "zkw/errors.hpp"
#include "zkw/lattice.hpp"

namespace zkw {

struct FreqPair {
  real2 k1{0.0, 0.0};
  real2 k2{0.0, 0.0};
  real2 k3() const { return {k1[0] + k2[0], k1[1] + k2[1]}; }
};

// Phi = xi1 xi2 (xi1+xi2) + eta1 eta2 (eta1+eta2)
inline double resonance_Phi(double x1, double y1, double x2, double y2) {
  return x1 * x2 * (x1 + x2) + y1 * y2 * (y1 + y2);
}
inline double resonance_Phi(const FreqPair& p) {
  return resonance_Phi(p.k1[0], p.k1[1], p.k2[0], p.k2[1]);
}

// F = xi1 eta2 + xi2 eta1 + 2 (xi1 eta1 + xi2 eta2)
inline double transversality_F(double x1, double y1, double x2, double y2) {
  return x1 * y2 + x2 * y1 + 2.0 * (x1 * y1 + x2 * y2);
}
inline double transversality_F(const FreqPair& p) {
  return transversality_F(p.k1[0], p.k1[1], p.k2[0], p.k2[1]);
}

// Phi^ = 3 xi1 xi2 (xi1+xi2) + xi1 eta2 (2 eta1 + eta2) + xi2 eta1 (eta1 + 2 eta2);
// identically equal to phi(k1+k2) - phi(k1) - phi(k2).
inline double resonance_Phi_hat(double x1, double y1, double x2, double y2) {
  return 3.0 * x1 * x2 * (x1 + x2) + x1 * y2 * (2.0 * y1 + y2) + x2 * y1 * (y1 + 2.0 * y2);
}
inline double resonance_Phi_hat(const FreqPair& p) {
  return resonance_Phi_hat(p.k1[0], p.k1[1], p.k2[0], p.k2[1]);
}

// resonance of a triple k1 + k2 -> k3 under a chosen symbol
inline double resonance_under(Symbol s, const real2& k1, const real2& k2) {
  const real2 k3{k1[0] + k2[0], k1[1] + k2[1]};
  return symbol_value(s, k1[0], k1[1]) + symbol_value(s, k2[0], k2[1]) -
         symbol_value(s, k3[0], k3[1]);
}

inline real2 symbol_gradient(Symbol s, double x, double y) {
  if (s == Symbol::phi) return {3.0 * x * x + y * y, 2.0 * x * y};
  return {3.0 * x * x, 3.0 * y * y};
}

struct SurfacePoint {
  real2 base{0.0, 0.0};
  Symbol symbol = Symbol::phi;
  double lift() const { return symbol_value(symbol, base[0], base[1]); }
};

// Unit normal of the graph tau = symbol(xi,eta), oriented with negative first
// (tau) coordinate: proportional to (-1, dsymbol/dxi, dsymbol/deta).
inline std::array<double, 3> surface_normal(const SurfacePoint& pt) {
  const real2 g = symbol_gradient(pt.symbol, pt.base[0], pt.base[1]);
  const double n = std::sqrt(1.0 + g[0] * g[0] + g[1] * g[1]);
  return {-1.0 / n, g[0] / n, g[1] / n};
}

inline double transversality_det(const SurfacePoint& p1, const SurfacePoint& p2,
                                 const SurfacePoint& p3) {
  if (p1.symbol != p2.symbol || p2.symbol != p3.symbol)
    throw ScaleMismatch("transversality_det: mixed symbols");
  const auto n1 = surface_normal(p1), n2 = surface_normal(p2), n3 = surface_normal(p3);
  return n1[0] * (n2[1] * n3[2] - n2[2] * n3[1]) - n1[1] * (n2[0] * n3[2] - n2[2] * n3[0]) +
         n1[2] * (n2[0] * n3[1] - n2[1] * n3[0]);
}

inline double det3(const std::array<double, 3>& n1, const std::array<double, 3>& n2,
                   const std::array<double, 3>& n3) {
  return n1[0] * (n2[1] * n3[2] - n2[2] * n3[1]) - n1[1] * (n2[0] * n3[2] - n2[2] * n3[0]) +
         n1[2] * (n2[0] * n3[1] - n2[1] * n3[0]);
}

// (xi1 eta2 - xi2 eta1) * (3(xi1^2+xi1 xi2+xi2^2) - (eta1^2+eta1 eta2+eta2^2)),
// the pair transversality expression whose size ~ A^-1 N1^4 is hypothesized in
// the convolution estimates for the unsymmetrized symbol.
inline double pair_transversality_expr(double x1, double y1, double x2, double y2) {
  return (x1 * y2 - x2 * y1) *
         (3.0 * (x1 * x1 + x1 * x2 + x2 * x2) - (y1 * y1 + y1 * y2 + y2 * y2));
}
inline double pair_transversality_expr(const FreqPair& p) {
  return pair_transversality_expr(p.k1[0], p.k1[1], p.k2[0], p.k2[1]);
}

// |sin of the angle between two plane vectors|; 0 if either vanishes
inline double abs_sin_angle(const real2& u, const real2& v) {
  const double nu = std::hypot(u[0], u[1]), nv = std::hypot(v[0], v[1]);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::abs(u[0] * v[1] - u[1] * v[0]) / (nu * nv);
}

}  // namespace zkw
