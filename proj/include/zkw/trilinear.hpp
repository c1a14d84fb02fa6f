#pragma once

// Trilinear convolution forms for tensor-form inputs g(k) 1{|tau-symbol(k)|<=L}
// on R x (Z^2/lambda).  The tau integration is done in closed form by the
// overlap kernel, so form values are exact up to floating point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "zkw/errors.hpp"
#include "zkw/lattice.hpp"
#include "zkw/resonance.hpp"

namespace zkw {

// area of {(s1,s2): |s1|<=L1, |s2|<=L2, |s1+s2+Phi|<=L3}; piecewise quadratic
// and even in Phi, supported in |Phi| <= L1+L2+L3
inline double overlap_kernel(double Phi, double L1, double L2, double L3) {
  if (L1 <= 0.0 || L2 <= 0.0 || L3 <= 0.0)
    throw ConfigInvalid("overlap_kernel: widths must be positive");
  // T(u) = (1_{[-L1,L1]} * 1_{[-L2,L2]})(u): trapezoid with plateau 2*min(L1,L2)
  const double D = std::abs(L1 - L2);      // plateau half-width
  const double S = L1 + L2;                // support half-width
  const double m2 = 2.0 * std::min(L1, L2);
  // antiderivative G(x) = int_0^x T, extended oddly
  auto G = [&](double x) {
    const double ax = std::min(std::abs(x), S);
    double g;
    if (ax <= D) {
      g = m2 * ax;
    } else {
      g = m2 * D + S * (ax - D) - 0.5 * (ax * ax - D * D);
    }
    return x < 0.0 ? -g : g;
  };
  // integrate T over {|u + Phi| <= L3}
  const double val = G(L3 - Phi) - G(-L3 - Phi);
  return std::max(val, 0.0);
}

struct ModeAmp {
  std::int64_t a = 0;
  std::int64_t b = 0;
  double g = 0.0;
};

// f(tau,k) = g(k) 1{|tau - symbol(k)| <= L}, g supported on finitely many
// lattice points inside the dyadic shell
struct ModFunction {
  DualLattice lattice;
  Symbol symbol = Symbol::phi;
  DyadicShell shell;
  double L = 1.0;
  std::vector<ModeAmp> entries;

  static std::uint64_t key(std::int64_t a, std::int64_t b) {
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint64_t(std::uint32_t(b));
  }
  const std::unordered_map<std::uint64_t, double>& index() const {
    if (index_.size() != entries.size()) {
      index_.clear();
      for (const auto& e : entries) index_[key(e.a, e.b)] = e.g;
    }
    return index_;
  }
  double amp(std::int64_t a, std::int64_t b) const {
    const auto& m = index();
    const auto it = m.find(key(a, b));
    return it == m.end() ? 0.0 : it->second;
  }
  // all entries inside the shell, positive width
  void validate() const {
    if (L <= 0.0) throw ConfigInvalid("ModFunction: L must be positive");
    for (const auto& e : entries) {
      const double r = std::hypot(double(e.a), double(e.b)) / double(lattice.lambda);
      if (!shell.contains(r)) throw HypothesisViolated("ModFunction: entry outside shell");
    }
  }
  std::size_t support_size() const {
    std::size_t n = 0;
    for (const auto& e : entries)
      if (e.g != 0.0) ++n;
    return n;
  }

 private:
  mutable std::unordered_map<std::uint64_t, double> index_;
};

// ||f||_{L^2_tau L^2_{(dk)_lambda}} = (lambda^-2 sum g^2 2L)^{1/2}
inline double mod_norm(const ModFunction& f) {
  double s = 0.0;
  for (const auto& e : f.entries) s += e.g * e.g;
  return std::sqrt(s * 2.0 * f.L) / double(f.lattice.lambda);
}

enum class WeightKind {
  none,        // plain form
  mixed_x,     // |k_{3,1}| + |k_{1,1}| N3/N1
  sum_coords,  // k_{3,1} + k_{3,2}
};

inline void check_compatible(const ModFunction& f1, const ModFunction& f2,
                             const ModFunction& f3) {
  if (!(f1.lattice == f2.lattice) || !(f2.lattice == f3.lattice))
    throw LatticeMismatch("trilinear_form: lattices differ");
  if (f1.symbol != f2.symbol || f2.symbol != f3.symbol)
    throw LatticeMismatch("trilinear_form: symbols differ");
}

// lambda^-4 sum_{k1,k2} w(k1,k3) g1(k1) g2(k2) g3(k1+k2)
//   * overlap(symbol(k1)+symbol(k2)-symbol(k1+k2); L1,L2,L3)
inline double trilinear_form_weighted(const ModFunction& f1, const ModFunction& f2,
                                      const ModFunction& f3, WeightKind wk) {
  check_compatible(f1, f2, f3);
  const double lam = double(f1.lattice.lambda);
  const double N1 = f1.shell.N(), N3 = f3.shell.N();
  double acc = 0.0;
  for (const auto& e1 : f1.entries) {
    if (e1.g == 0.0) continue;
    const double x1 = double(e1.a) / lam, y1 = double(e1.b) / lam;
    const double s1 = symbol_value(f1.symbol, x1, y1);
    for (const auto& e2 : f2.entries) {
      if (e2.g == 0.0) continue;
      const std::int64_t a3 = e1.a + e2.a, b3 = e1.b + e2.b;
      const double g3 = f3.amp(a3, b3);
      if (g3 == 0.0) continue;
      const double x2 = double(e2.a) / lam, y2 = double(e2.b) / lam;
      const double x3 = double(a3) / lam, y3 = double(b3) / lam;
      const double res = s1 + symbol_value(f1.symbol, x2, y2) - symbol_value(f1.symbol, x3, y3);
      const double ov = overlap_kernel(res, f1.L, f2.L, f3.L);
      if (ov == 0.0) continue;
      double w = 1.0;
      if (wk == WeightKind::mixed_x) {
        w = std::abs(x3) + std::abs(x1) * N3 / N1;
      } else if (wk == WeightKind::sum_coords) {
        w = x3 + y3;
      }
      acc += w * e1.g * e2.g * g3 * ov;
    }
  }
  return acc / (lam * lam * lam * lam);
}

inline double trilinear_form(const ModFunction& f1, const ModFunction& f2,
                             const ModFunction& f3) {
  return trilinear_form_weighted(f1, f2, f3, WeightKind::none);
}

inline double weighted_trilinear_form(const ModFunction& f1, const ModFunction& f2,
                                      const ModFunction& f3,
                                      WeightKind wk = WeightKind::mixed_x) {
  return trilinear_form_weighted(f1, f2, f3, wk);
}

inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

inline void sort3(double& lmin, double& lmed, double& lmax, double L1, double L2, double L3) {
  lmin = std::min({L1, L2, L3});
  lmax = std::max({L1, L2, L3});
  lmed = L1 + L2 + L3 - lmin - lmax;
}

// C(A,N,L1,L2,L3) = Lmin^{1/2} <N Lmed>^{1/2} <A N Lmax>^{1/2}
inline double constant_C(double A, double N, double L1, double L2, double L3) {
  double lmin, lmed, lmax;
  sort3(lmin, lmed, lmax, L1, L2, L3);
  return std::sqrt(lmin) * std::sqrt(bracket(N * lmed)) * std::sqrt(bracket(A * N * lmax));
}

// piecewise form of the same constant
inline double constant_C_piecewise(double A, double N, double L1, double L2, double L3) {
  double lmin, lmed, lmax;
  sort3(lmin, lmed, lmax, L1, L2, L3);
  if (lmed <= 1.0 / N) return std::sqrt(lmin) * std::sqrt(bracket(A * N * lmax));
  return std::sqrt(A * L1 * L2 * L3) * N;
}

// C~(A,N1,L1,L2,L3) = Lmin^{1/2} <Lmed N1^-2>^{1/2} <A Lmax N1^-2>^{1/2}
inline double constant_C_tilde(double A, double N1, double L1, double L2, double L3) {
  double lmin, lmed, lmax;
  sort3(lmin, lmed, lmax, L1, L2, L3);
  const double n2 = 1.0 / (N1 * N1);
  return std::sqrt(lmin) * std::sqrt(bracket(lmed * n2)) * std::sqrt(bracket(A * lmax * n2));
}

inline double constant_C_tilde_piecewise(double A, double N1, double L1, double L2, double L3) {
  double lmin, lmed, lmax;
  sort3(lmin, lmed, lmax, L1, L2, L3);
  const double n2 = 1.0 / (N1 * N1);
  if (lmed <= N1 * N1) return std::sqrt(lmin) * std::sqrt(bracket(A * lmax * n2));
  return std::sqrt(A * L1 * L2 * L3) * n2;
}

// (P Lmin)^{1/2}/lambda * prod ||f_i||, P = min spatial support cardinality
inline double cauchy_schwarz_bound(const ModFunction& f1, const ModFunction& f2,
                                   const ModFunction& f3) {
  check_compatible(f1, f2, f3);
  const double P =
      double(std::min({f1.support_size(), f2.support_size(), f3.support_size()}));
  const double lmin = std::min({f1.L, f2.L, f3.L});
  return std::sqrt(P * lmin) / double(f1.lattice.lambda) * mod_norm(f1) * mod_norm(f2) *
         mod_norm(f3);
}

struct TrilinearReport {
  double value = 0.0;
  double norm1 = 0.0, norm2 = 0.0, norm3 = 0.0;
  double C = 0.0;
  double ratio = 0.0;
  double N1 = 0.0, N2 = 0.0, N3 = 0.0;
  double L1 = 0.0, L2 = 0.0, L3 = 0.0;
  double A = 1.0;
  double lambda = 1.0;
  std::string tag;
};

}  // namespace zkw
