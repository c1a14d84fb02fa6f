#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zkw/resonance.hpp"
#include "zkw/rng.hpp"

using namespace zkw;
using Catch::Approx;

TEST_CASE("resonance polynomial values") {
  REQUIRE(resonance_Phi(0, 0, 3, 7) == 0.0);
  REQUIRE(resonance_Phi(1, 2, 3, 4) == 60.0);
  REQUIRE(transversality_F(0, 0, 0, 0) == 0.0);
  REQUIRE(transversality_F(1, 0, 0, 1) == 1.0);
  const double N = 8;
  REQUIRE(transversality_F(N, -N, N, 2 * N) == 3 * N * N);
  REQUIRE(resonance_Phi_hat(1, 1, 1, 1) == 12.0);
  REQUIRE(resonance_Phi_hat(0, 2, 16, -1) == 0.0);  // the resonant mode pair
  REQUIRE(resonance_Phi_hat(0, 0, 5, -3) == 0.0);
}

TEST_CASE("Phi-hat equals the dispersion defect exactly on integers") {
  Rng rng(101);
  for (int i = 0; i < 10000; ++i) {
    const double x1 = double(std::int64_t(rng.uniform_int(41)) - 20);
    const double y1 = double(std::int64_t(rng.uniform_int(41)) - 20);
    const double x2 = double(std::int64_t(rng.uniform_int(41)) - 20);
    const double y2 = double(std::int64_t(rng.uniform_int(41)) - 20);
    const double lhs = resonance_Phi_hat(x1, y1, x2, y2);
    const double rhs =
        dispersion_phi(x1 + x2, y1 + y2) - dispersion_phi(x1, y1) - dispersion_phi(x2, y2);
    REQUIRE(lhs == rhs);  // both sides exact in double for these ranges
  }
}

TEST_CASE("symmetrized resonance identity") {
  Rng rng(23);
  for (int i = 0; i < 10000; ++i) {
    const real2 l1{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const real2 l2{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double lhs = resonance_under(Symbol::psi_sym, l1, l2);
    const double rhs = -3.0 * resonance_Phi(l1[0], l1[1], l2[0], l2[1]);
    REQUIRE(lhs == Approx(rhs).margin(1e-10 * (1.0 + std::abs(rhs))));
  }
}

TEST_CASE("Phi and F are symmetric under pair swap") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double x1 = rng.uniform(-5, 5), y1 = rng.uniform(-5, 5);
    const double x2 = rng.uniform(-5, 5), y2 = rng.uniform(-5, 5);
    REQUIRE(resonance_Phi(x1, y1, x2, y2) == resonance_Phi(x2, y2, x1, y1));
    REQUIRE(transversality_F(x1, y1, x2, y2) == transversality_F(x2, y2, x1, y1));
  }
}

TEST_CASE("surface normals are unit and tangent-orthogonal") {
  REQUIRE(surface_normal({{0, 0}, Symbol::phi}) == std::array<double, 3>{-1, 0, 0});
  const auto n10 = surface_normal({{1, 0}, Symbol::phi});
  REQUIRE(n10[0] == Approx(-1.0 / std::sqrt(10.0)).epsilon(1e-13));
  REQUIRE(n10[1] == Approx(3.0 / std::sqrt(10.0)).epsilon(1e-13));
  REQUIRE(n10[2] == 0.0);

  Rng rng(77);
  for (const Symbol s : {Symbol::phi, Symbol::psi_sym})
    for (int i = 0; i < 200; ++i) {
      const real2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const auto n = surface_normal({p, s});
      REQUIRE(std::hypot(n[0], std::hypot(n[1], n[2])) == Approx(1.0).epsilon(1e-12));
      const double h = 1e-4;
      // central-difference tangents of the graph (x, y, symbol(x,y))
      const double dx =
          (symbol_value(s, p[0] + h, p[1]) - symbol_value(s, p[0] - h, p[1])) / (2 * h);
      const double dy =
          (symbol_value(s, p[0], p[1] + h) - symbol_value(s, p[0], p[1] - h)) / (2 * h);
      REQUIRE(std::abs(n[0] * dx + n[1] * 1.0) < 1e-6);
      REQUIRE(std::abs(n[0] * dy + n[2] * 1.0) < 1e-6);
    }
}

TEST_CASE("transversality determinant") {
  const SurfacePoint p{{1.5, -0.5}, Symbol::phi};
  REQUIRE(transversality_det(p, p, p) == 0.0);
  REQUIRE(det3({1, 0, 0}, {0, 1, 0}, {0, 0, 1}) == 1.0);
  // unit normals flatten as the gradients grow, so the determinant itself
  // decays like 1/N^2; the scale-invariant quantity is N^2 * det
  double scaled0 = 0;
  for (const double N : {8.0, 16.0, 32.0}) {
    const SurfacePoint q1{{N, -N}, Symbol::psi_sym};
    const SurfacePoint q2{{N, 2 * N}, Symbol::psi_sym};
    const SurfacePoint q3{{2 * N, N}, Symbol::psi_sym};
    const double d = std::abs(transversality_det(q1, q2, q3));
    REQUIRE(d > 0.0);
    REQUIRE(d <= 1.0);
    const double scaled = N * N * d;
    if (scaled0 == 0)
      scaled0 = scaled;
    else
      REQUIRE(scaled == Approx(scaled0).epsilon(1e-3));
  }
  REQUIRE(scaled0 > 0.1);
  REQUIRE(scaled0 < 0.15);
  const SurfacePoint q1{{8.0, -8.0}, Symbol::psi_sym};
  const SurfacePoint q2{{8.0, 16.0}, Symbol::psi_sym};
  REQUIRE_THROWS_AS(transversality_det(q1, q2, SurfacePoint{{1, 1}, Symbol::phi}),
                    ScaleMismatch);
}

TEST_CASE("pair transversality expression is degree-4 homogeneous") {
  Rng rng(55);
  for (int i = 0; i < 500; ++i) {
    const double x1 = rng.uniform(-3, 3), y1 = rng.uniform(-3, 3);
    const double x2 = rng.uniform(-3, 3), y2 = rng.uniform(-3, 3);
    const double t = 2.0;
    const double lhs = pair_transversality_expr(t * x1, t * y1, t * x2, t * y2);
    const double rhs = 16.0 * pair_transversality_expr(x1, y1, x2, y2);
    REQUIRE(lhs == Approx(rhs).margin(1e-9 * (1.0 + std::abs(rhs))));
  }
  REQUIRE(abs_sin_angle({1, 0}, {0, 2}) == 1.0);
  REQUIRE(abs_sin_angle({1, 1}, {2, 2}) == Approx(0.0).margin(1e-15));
  REQUIRE(abs_sin_angle({0, 0}, {1, 0}) == 0.0);
}
