#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "zkw/rng.hpp"
#include "zkw/trilinear.hpp"

using namespace zkw;
using Catch::Approx;

namespace {

// independent overlap oracle: midpoint rule in s1 with the exact inner
// interval length in s2 (piecewise linear integrand, kink error O(h^2))
double overlap_quad(double Phi, double L1, double L2, double L3, double h) {
  const std::int64_t n = std::int64_t(std::ceil(2.0 * L1 / h));
  const double step = 2.0 * L1 / double(n);
  double acc = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double s1 = -L1 + (double(i) + 0.5) * step;
    const double lo = std::max(-L2, -L3 - Phi - s1);
    const double hi = std::min(L2, L3 - Phi - s1);
    acc += std::max(0.0, hi - lo);
  }
  return acc * step;
}

ModFunction make_mod(const DualLattice& lat, Symbol s, int shell, double L,
                     std::vector<ModeAmp> entries) {
  ModFunction f;
  f.lattice = lat;
  f.symbol = s;
  f.shell = DyadicShell{shell};
  f.L = L;
  f.entries = std::move(entries);
  return f;
}

}  // namespace

TEST_CASE("overlap kernel closed form") {
  REQUIRE(overlap_kernel(10.0, 1, 2, 3) == 0.0);  // |Phi| > L1+L2+L3
  REQUIRE(overlap_kernel(0.0, 0.5, 1.0, 2.0) == Approx(4 * 0.5 * 1.0).epsilon(1e-14));
  REQUIRE(overlap_kernel(1.0, 1, 1, 1) == Approx(2.0).epsilon(1e-13));
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const double L1 = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    const double L2 = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    const double L3 = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    const double Phi = rng.uniform(-1.2, 1.2) * (L1 + L2 + L3);
    const double v = overlap_kernel(Phi, L1, L2, L3);
    REQUIRE(v == overlap_kernel(-Phi, L1, L2, L3));  // even in Phi
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 4 * L1 * L2 + 1e-12);
    const double q = overlap_quad(Phi, L1, L2, L3, std::min({L1, L2, L3}) / 64.0);
    REQUIRE(v == Approx(q).margin(1e-3 * (1.0 + v)));
  }
}

TEST_CASE("trilinear form on the resonant sharp triple") {
  for (const std::int64_t N : {std::int64_t(8), std::int64_t(16)}) {
    DualLattice lat{1, 4 * N};
    const double L1 = 0.5, L2 = 1.0, L3 = 2.0;
    auto f1 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(double(N), double(N))), L1, {{N, -N, 1.0}});
    auto f2 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(double(N), 2.0 * double(N))), L2, {{N, 2 * N, 1.0}});
    auto f3 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(2.0 * double(N), double(N))), L3, {{2 * N, N, 1.0}});
    const double value = trilinear_form(f1, f2, f3);
    REQUIRE(value == Approx(4 * L1 * L2).epsilon(1e-13));
    const double ratio = value / (mod_norm(f1) * mod_norm(f2) * mod_norm(f3));
    REQUIRE(ratio == Approx(std::sqrt(2 * L1 * 2 * L2 / (2 * L3))).epsilon(1e-13));
  }
}

TEST_CASE("trilinear form equals tau-grid quadrature") {
  Rng rng(37);
  for (int inst = 0; inst < 20; ++inst) {
    DualLattice lat{1, 8};
    auto entries = [&](int count) {
      std::vector<ModeAmp> out;
      for (int i = 0; i < count; ++i)
        out.push_back({std::int64_t(rng.uniform_int(7)) - 3,
                       std::int64_t(rng.uniform_int(7)) - 3, rng.uniform(0.2, 1.0)});
      return out;
    };
    auto f1 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.0)), entries(3));
    auto f2 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.0)), entries(3));
    auto f3 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.0)), entries(4));
    const double got = trilinear_form(f1, f2, f3);
    double want = 0;
    const double h = std::min({f1.L, f2.L, f3.L}) / 64.0;
    for (const auto& e1 : f1.entries)
      for (const auto& e2 : f2.entries) {
        const double g3 = f3.amp(e1.a + e2.a, e1.b + e2.b);
        if (g3 == 0) continue;
        const double Phi = resonance_under(
            Symbol::phi, {double(e1.a), double(e1.b)}, {double(e2.a), double(e2.b)});
        want += e1.g * e2.g * g3 * overlap_quad(Phi, f1.L, f2.L, f3.L, h);
      }
    REQUIRE(got == Approx(want).margin(1e-3 * (1.0 + std::abs(want))));
  }
}

TEST_CASE("trilinear form symmetry and scaling") {
  Rng rng(41);
  DualLattice lat{2, 8};
  auto entries = [&](int count) {
    std::vector<ModeAmp> out;
    for (int i = 0; i < count; ++i)
      out.push_back({std::int64_t(rng.uniform_int(9)) - 4,
                     std::int64_t(rng.uniform_int(9)) - 4, rng.uniform(0.2, 1.0)});
    return out;
  };
  auto f1 = make_mod(lat, Symbol::psi_sym, 2, 0.7, entries(4));
  auto f2 = make_mod(lat, Symbol::psi_sym, 2, 1.3, entries(4));
  auto f3 = make_mod(lat, Symbol::psi_sym, 2, 0.9, entries(5));
  REQUIRE(trilinear_form(f1, f2, f3) == trilinear_form(f2, f1, f3));
  auto f1s = f1;
  for (auto& e : f1s.entries) e.g *= 3.0;
  REQUIRE(trilinear_form(f1s, f2, f3) ==
          Approx(3.0 * trilinear_form(f1, f2, f3)).epsilon(1e-13));
  REQUIRE(mod_norm(f1s) == Approx(3.0 * mod_norm(f1)).epsilon(1e-13));

  auto zero = make_mod(lat, Symbol::psi_sym, 2, 1.0, {});
  REQUIRE(trilinear_form(f1, f2, zero) == 0.0);
}

TEST_CASE("lattice and symbol compatibility is enforced") {
  auto f1 = make_mod(DualLattice{1, 8}, Symbol::phi, 1, 1.0, {{1, 0, 1.0}});
  auto f2 = make_mod(DualLattice{2, 8}, Symbol::phi, 1, 1.0, {{1, 0, 1.0}});
  auto f3 = make_mod(DualLattice{1, 8}, Symbol::psi_sym, 1, 1.0, {{1, 0, 1.0}});
  REQUIRE_THROWS_AS(trilinear_form(f1, f2, f2), LatticeMismatch);
  REQUIRE_THROWS_AS(trilinear_form(f1, f3, f3), LatticeMismatch);
  auto bad = make_mod(DualLattice{1, 8}, Symbol::phi, 1, 1.0, {{8, 8, 1.0}});
  REQUIRE_THROWS_AS(bad.validate(), HypothesisViolated);
  auto nol = make_mod(DualLattice{1, 8}, Symbol::phi, 1, -2.0, {{1, 0, 1.0}});
  REQUIRE_THROWS_AS(nol.validate(), ConfigInvalid);
}

TEST_CASE("mod_norm closed form") {
  auto f = make_mod(DualLattice{1, 4}, Symbol::phi, 0, 0.5, {{1, 0, 1.0}});
  REQUIRE(mod_norm(f) == Approx(1.0).epsilon(1e-14));  // 2L = 1
  auto g = make_mod(DualLattice{3, 4}, Symbol::phi, 0, 2.0, {{1, 0, 2.0}, {0, 1, 1.0}});
  REQUIRE(mod_norm(g) == Approx(std::sqrt(4.0 * (4.0 + 1.0)) / 3.0).epsilon(1e-14));
}

TEST_CASE("constant C bracket regimes") {
  // saturated brackets with small arguments: C ~ sqrt(L)
  const double c0 = constant_C(1, 1, 0.25, 0.25, 0.25);
  REQUIRE(std::abs(c0 / 0.5 - 1.0) < 0.3);
  // L_med <= 1/N regime
  const double c1 = constant_C(8, 16, 4.0, 1.0 / 64, 1.0 / 32);
  const double t1 = std::sqrt(1.0 / 64) * std::sqrt(bracket(8 * 16 * 4.0));
  REQUIRE(c1 / t1 >= 0.5);
  REQUIRE(c1 / t1 <= 2.0);
  // both brackets large: C within factor 2 of (A L1 L2 L3)^{1/2} N
  const double c2 = constant_C(4, 8, 1, 1, 2);
  const double t2 = std::sqrt(4.0 * 1 * 1 * 2) * 8;
  REQUIRE(c2 / t2 >= 0.5);
  REQUIRE(c2 / t2 <= 2.0);
  // piecewise form tracks the bracket form in its regimes
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const double A = std::ldexp(1.0, int(rng.uniform_int(6)));
    const double N = std::ldexp(1.0, int(rng.uniform_int(6)));
    const double L1 = std::ldexp(1.0, int(rng.uniform_int(13)) - 6);
    const double L2 = std::ldexp(1.0, int(rng.uniform_int(13)) - 6);
    const double L3 = std::ldexp(1.0, int(rng.uniform_int(13)) - 6);
    const double a = constant_C(A, N, L1, L2, L3);
    const double b = constant_C_piecewise(A, N, L1, L2, L3);
    REQUIRE(a / b <= 2.0 + 1e-12);
    REQUIRE(b / a <= 2.0 + 1e-12);
  }
}

TEST_CASE("constant C-tilde matches its bracket definition") {
  const double A = 4, N1 = 16, L1 = 2, L2 = 8, L3 = 1;
  const double want = std::sqrt(1.0) * std::sqrt(bracket(2.0 / (N1 * N1))) *
                      std::sqrt(bracket(A * 8.0 / (N1 * N1)));
  REQUIRE(constant_C_tilde(A, N1, L1, L2, L3) == Approx(want).epsilon(1e-13));
}

TEST_CASE("cauchy-schwarz support bound dominates the form") {
  Rng rng(71);
  DualLattice lat{1, 8};
  auto f1 = make_mod(lat, Symbol::phi, 1, 0.5, {{1, 1, 1.0}});
  auto f2 = make_mod(lat, Symbol::phi, 1, 2.0, {{2, 0, 1.0}, {0, 2, 0.5}});
  auto f3 = make_mod(lat, Symbol::phi, 2, 1.0, {{3, 1, 1.0}, {1, 3, 1.0}});
  const double b = cauchy_schwarz_bound(f1, f2, f3);
  // P = 1, L_min = 0.5
  REQUIRE(b == Approx(std::sqrt(0.5) * mod_norm(f1) * mod_norm(f2) * mod_norm(f3))
                   .epsilon(1e-13));
  for (int inst = 0; inst < 50; ++inst) {
    auto entries = [&](int count) {
      std::vector<ModeAmp> out;
      for (int i = 0; i < count; ++i)
        out.push_back({std::int64_t(rng.uniform_int(9)) - 4,
                       std::int64_t(rng.uniform_int(9)) - 4, rng.uniform(0.2, 1.0)});
      return out;
    };
    auto g1 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.5)), entries(3));
    auto g2 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.5)), entries(3));
    auto g3 = make_mod(lat, Symbol::phi, 3, std::exp(rng.uniform(-1.0, 1.5)), entries(4));
    REQUIRE(std::abs(trilinear_form(g1, g2, g3)) <=
            4.0 * cauchy_schwarz_bound(g1, g2, g3) + 1e-12);
  }
}

TEST_CASE("weighted forms apply the stated weights") {
  DualLattice lat{1, 64};
  // single contributing pair k1 = (2,0), k2 = (-1,2), k3 = (1,2):
  // resonance 8 - 5 - 5 = -2 sits inside the L window so the overlap is positive
  auto f1 = make_mod(lat, Symbol::phi, 1, 1.0, {{2, 0, 1.5}});
  auto f2 = make_mod(lat, Symbol::phi, 2, 1.0, {{-1, 2, 2.0}});
  auto f3 = make_mod(lat, Symbol::phi, 2, 3.0, {{1, 2, 0.5}});
  const double plain = trilinear_form(f1, f2, f3);
  REQUIRE(plain > 0.0);
  const double N1 = f1.shell.N(), N3 = f3.shell.N();
  const double wx = std::abs(1.0) + std::abs(2.0) * N3 / N1;
  REQUIRE(weighted_trilinear_form(f1, f2, f3, WeightKind::mixed_x) ==
          Approx(wx * plain).epsilon(1e-13));
  REQUIRE(trilinear_form_weighted(f1, f2, f3, WeightKind::sum_coords) ==
          Approx(3.0 * plain).epsilon(1e-13));

  // symmetrized resonant triple: weighted ratio ~ N * L^{1/2}
  for (const std::int64_t N : {std::int64_t(8), std::int64_t(16), std::int64_t(32)}) {
    const double L = 0.5;
    auto s1 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(double(N), double(N))), L, {{N, -N, 1.0}});
    auto s2 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(double(N), 2.0 * double(N))), L, {{N, 2 * N, 1.0}});
    auto s3 = make_mod(lat, Symbol::psi_sym, DyadicShell::locate(std::hypot(2.0 * double(N), double(N))), 8 * L, {{2 * N, N, 1.0}});
    const double r = trilinear_form_weighted(s1, s2, s3, WeightKind::sum_coords) /
                     (mod_norm(s1) * mod_norm(s2) * mod_norm(s3));
    const double target = double(N) * std::sqrt(L);
    REQUIRE(r >= 0.5 * target);
    REQUIRE(r <= 2.0 * target);
  }
}
