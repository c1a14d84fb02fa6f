#pragma once

// Exact dual-lattice arithmetic on Z^2/lambda, dispersion symbols, Sobolev
// norms, sharp Littlewood-Paley shells, modulation regions, and the
// symmetrizing change of Fourier variables.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "zkw/errors.hpp"

namespace zkw {

using cplx = std::complex<double>;
using real2 = std::array<double, 2>;

// Frequency k = (a/lambda, b/lambda) stored by integer numerators.
struct FreqIndex {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t lambda = 1;

  double xi() const { return double(a) / double(lambda); }
  double eta() const { return double(b) / double(lambda); }
  real2 coords() const { return {xi(), eta()}; }
  double abs() const { return std::hypot(xi(), eta()); }

  FreqIndex operator+(const FreqIndex& o) const {
    if (lambda != o.lambda) throw LatticeMismatch();
    return {a + o.a, b + o.b, lambda};
  }
  FreqIndex operator-(const FreqIndex& o) const {
    if (lambda != o.lambda) throw LatticeMismatch();
    return {a - o.a, b - o.b, lambda};
  }
  FreqIndex operator-() const { return {-a, -b, lambda}; }
  bool operator==(const FreqIndex& o) const = default;
};

struct DualLattice {
  std::int64_t lambda = 1;            // torus scale, integer >= 1
  std::int64_t truncation_radius = 128;  // K: max |k| coordinate

  DualLattice() = default;
  DualLattice(std::int64_t lam, std::int64_t K) : lambda(lam), truncation_radius(K) {
    if (lam < 1 || K < 1) throw ConfigInvalid("DualLattice: lambda and K must be >= 1");
  }

  // integer-index box bound: points are {(a/l,b/l): |a|,|b| <= K*l}
  std::int64_t index_bound() const { return truncation_radius * lambda; }
  std::int64_t side() const { return 2 * index_bound() + 1; }
  bool contains(std::int64_t a, std::int64_t b) const {
    const std::int64_t B = index_bound();
    return a >= -B && a <= B && b >= -B && b <= B;
  }
  bool operator==(const DualLattice& o) const = default;
};

// phi(xi,eta) = xi^3 + xi*eta^2  (dispersion symbol of the unsymmetrized flow)
inline double dispersion_phi(double xi, double eta) { return xi * xi * xi + xi * eta * eta; }
inline double dispersion_phi(const FreqIndex& k) { return dispersion_phi(k.xi(), k.eta()); }

// psi~(l) = l1^3 + l2^3  (symmetrized dispersion)
inline double dispersion_psi_sym(double l1, double l2) { return l1 * l1 * l1 + l2 * l2 * l2; }
inline double dispersion_psi_sym(const real2& l) { return dispersion_psi_sym(l[0], l[1]); }

enum class Symbol { phi, psi_sym };

inline double symbol_value(Symbol s, double x, double y) {
  return s == Symbol::phi ? dispersion_phi(x, y) : dispersion_psi_sym(x, y);
}
inline double symbol_value(Symbol s, const FreqIndex& k) {
  return symbol_value(s, k.xi(), k.eta());
}

// Dense complex field over the truncation box of a dual lattice.
class GridFunction {
 public:
  GridFunction() : GridFunction(DualLattice{}) {}
  explicit GridFunction(const DualLattice& lat)
      : lat_(lat), v_(std::size_t(lat.side()) * std::size_t(lat.side()), cplx{0.0, 0.0}) {}

  const DualLattice& lattice() const { return lat_; }

  cplx& at(std::int64_t a, std::int64_t b) {
    if (!lat_.contains(a, b)) throw TruncationExceeded("GridFunction::at outside box");
    return v_[idx(a, b)];
  }
  const cplx& at(std::int64_t a, std::int64_t b) const {
    if (!lat_.contains(a, b)) throw TruncationExceeded("GridFunction::at outside box");
    return v_[idx(a, b)];
  }
  cplx get(std::int64_t a, std::int64_t b) const {
    return lat_.contains(a, b) ? v_[idx(a, b)] : cplx{0.0, 0.0};
  }
  cplx operator()(const FreqIndex& k) const {
    if (k.lambda != lat_.lambda) throw LatticeMismatch();
    return get(k.a, k.b);
  }

  // L^2 with the normalized counting measure: (lambda^-2 sum |v|^2)^{1/2}
  double l2_norm() const {
    double s = 0.0;
    for (const auto& z : v_) s += std::norm(z);
    return std::sqrt(s) / double(lat_.lambda);
  }

  bool is_hermitian(double tol) const {
    const std::int64_t B = lat_.index_bound();
    for (std::int64_t a = -B; a <= B; ++a)
      for (std::int64_t b = -B; b <= B; ++b) {
        const cplx d = v_[idx(a, b)] - std::conj(v_[idx(-a, -b)]);
        if (std::abs(d) > tol) return false;
      }
    return true;
  }

  std::vector<cplx>& raw() { return v_; }
  const std::vector<cplx>& raw() const { return v_; }

 private:
  std::size_t idx(std::int64_t a, std::int64_t b) const {
    const std::int64_t B = lat_.index_bound();
    return std::size_t(a + B) * std::size_t(lat_.side()) + std::size_t(b + B);
  }
  DualLattice lat_;
  std::vector<cplx> v_;
};

// (lambda^-2 sum <k>^{2s} |f(k)|^2)^{1/2} with <k> = (1+|k|^2)^{1/2}
inline double sobolev_norm(const GridFunction& f, double s) {
  const DualLattice& lat = f.lattice();
  const std::int64_t B = lat.index_bound();
  double acc = 0.0;
  for (std::int64_t a = -B; a <= B; ++a)
    for (std::int64_t b = -B; b <= B; ++b) {
      const cplx z = f.get(a, b);
      if (z == cplx{0.0, 0.0}) continue;
      const double x = double(a) / double(lat.lambda);
      const double y = double(b) / double(lat.lambda);
      acc += std::pow(1.0 + x * x + y * y, s) * std::norm(z);
    }
  return std::sqrt(acc) / double(lat.lambda);
}

// Sharp dyadic shells: A_0 = {|k| <= 1}, A_n = {2^{n-1} < |k| <= 2^n}.
struct DyadicShell {
  int n = 0;
  double N() const { return std::ldexp(1.0, n); }
  bool contains(double r) const {
    if (n == 0) return r <= 1.0;
    return r > std::ldexp(1.0, n - 1) && r <= std::ldexp(1.0, n);
  }
  bool contains(const FreqIndex& k) const { return contains(k.abs()); }
  // the unique shell index of a radius (partition property)
  static int locate(double r) {
    if (r <= 1.0) return 0;
    int n = 1;
    while (r > std::ldexp(1.0, n)) ++n;
    return n;
  }
};

inline GridFunction littlewood_paley_project(const GridFunction& f, int n) {
  if (n < 0) throw ConfigInvalid("littlewood_paley_project: n >= 0 required");
  const DyadicShell sh{n};
  GridFunction out(f.lattice());
  const std::int64_t B = f.lattice().index_bound();
  const double lam = double(f.lattice().lambda);
  for (std::int64_t a = -B; a <= B; ++a)
    for (std::int64_t b = -B; b <= B; ++b) {
      const double r = std::hypot(double(a) / lam, double(b) / lam);
      if (sh.contains(r)) out.at(a, b) = f.get(a, b);
    }
  return out;
}

// G_{N,<=L}: |k| in shell(N) and |tau - symbol(k)| <= L
struct ModulationRegion {
  DyadicShell shell;
  double L = 1.0;
  Symbol symbol = Symbol::phi;

  bool contains(double tau, const FreqIndex& k) const {
    return shell.contains(k) && std::abs(tau - symbol_value(symbol, k)) <= L;
  }
  bool contains(double tau, double x, double y) const {
    return shell.contains(std::hypot(x, y)) && std::abs(tau - symbol_value(symbol, x, y)) <= L;
  }
};

// Linear change of Fourier variables turning xi^3 + xi eta^2 into a multiple
// of l1^3 + l2^3; maps the strip direction (1, sqrt(3)) to the l1-axis.
struct SymmetrizerMap {
  // forward entries: sqrt(2) * [[1, 3^-1/2], [1, -3^-1/2]]
  static constexpr double s2 = 1.4142135623730951;   // sqrt(2)
  static constexpr double s3 = 1.7320508075688772;   // sqrt(3)

  static real2 forward(double x, double y) {
    return {s2 * (x + y / s3), s2 * (x - y / s3)};
  }
  static real2 inverse(double l1, double l2) {
    const double c = 1.0 / (2.0 * s2);  // 2^{-3/2}
    return {c * (l1 + l2), c * (s3 * l1 - s3 * l2)};
  }
  static double det() {
    const double m11 = s2, m12 = s2 / s3, m21 = s2, m22 = -s2 / s3;
    return m11 * m22 - m12 * m21;  // = -4/sqrt(3)
  }
};

inline real2 symmetrize(const FreqIndex& k) { return SymmetrizerMap::forward(k.xi(), k.eta()); }
inline real2 symmetrize(double x, double y) { return SymmetrizerMap::forward(x, y); }
inline real2 unsymmetrize(const real2& l) { return SymmetrizerMap::inverse(l[0], l[1]); }

}  // namespace zkw
