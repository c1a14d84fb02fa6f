#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zkw/rng.hpp"
#include "zkw/surfaces.hpp"

using namespace zkw;
using Catch::Approx;

namespace {
const double kPi = 3.14159265358979323846;
Box3 cube() { return Box3{{-1, -1, -1}, {1, 1, 1}}; }
}  // namespace

TEST_CASE("plane specs normalize and report membership") {
  auto s = SurfaceSpec::plane_through({0, 0, 2}, 1.0, 0.25, cube());
  REQUIRE(s.normal[2] == Approx(1.0));
  REQUIRE(s.offset == Approx(0.5));
  REQUIRE(s.contains({0.3, -0.4, 0.6}));       // distance 0.1 < 0.25
  REQUIRE_FALSE(s.contains({0.3, -0.4, 0.8})); // distance 0.3
  REQUIRE_FALSE(s.contains({0.3, -1.4, 0.5})); // outside the domain box
  REQUIRE(s.slab_coordinate({0, 0, 0.9}) == Approx(0.4));
  REQUIRE_THROWS_AS(SurfaceSpec::plane_through({0, 0, 0}, 0, 0.25, cube()), ConfigInvalid);
  REQUIRE_THROWS_AS(SurfaceSpec::graph_of(SurfaceSpec::GraphFun::affine, 3, 0, 0, 0, 0.25, cube()),
                    ConfigInvalid);

  // trapezoid boundary layer
  REQUIRE(s.soft_weight({0, 0, 0.5}, 0.0) == 1.0);
  REQUIRE(s.soft_weight({0, 0, 0.75}, 0.1) == Approx(0.5));
  REQUIRE(s.soft_weight({0, 0, 0.70}, 0.1) == 1.0);
  REQUIRE(s.soft_weight({0, 0, 0.80}, 0.1) == 0.0);
}

TEST_CASE("z footprints agree with membership") {
  Rng rng(11);
  auto zplane = SurfaceSpec::plane_through({1, -2, 3}, 0.3, 0.2, cube());
  auto xgraph = SurfaceSpec::graph_of(SurfaceSpec::GraphFun::affine, 0, 0.1, 0.4, -0.3, 0.2, cube());
  auto zgraph = SurfaceSpec::graph_of(SurfaceSpec::GraphFun::sine, 2, 0.0, 0, 0, 0.3, cube());
  for (const auto* s : {&zplane, &xgraph, &zgraph}) {
    for (int i = 0; i < 500; ++i) {
      const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1), z = rng.uniform(-1, 1);
      const auto fp = s->z_footprint(x, y);
      REQUIRE(fp.has_value());
      const bool via_fp = fp->whole || (!fp->empty && fp->lo < z && z < fp->hi);
      if (std::abs(std::abs(s->slab_coordinate({x, y, z})) - s->eps) < 1e-9) continue;
      REQUIRE(via_fp == s->contains({x, y, z}));
    }
  }
  // vertical plane: whole-column or empty
  auto xplane = SurfaceSpec::plane_through({1, 0, 0}, 0, 0.25, cube());
  REQUIRE(xplane.z_footprint(0.1, 0.5)->whole);
  REQUIRE(xplane.z_footprint(0.5, 0.5)->empty);
  // nonlinear graph over a non-z axis has no exact column footprint
  auto xsine = SurfaceSpec::graph_of(SurfaceSpec::GraphFun::sine, 0, 0, 0, 0, 0.25, cube());
  REQUIRE_FALSE(xsine.z_footprint(0.2, 0.2).has_value());
}

TEST_CASE("sampled surface points lie on the surface") {
  Rng rng(13);
  auto plane = SurfaceSpec::plane_through({1, 1, 1}, 0.2, 0.1, cube());
  auto graph = SurfaceSpec::graph_of(SurfaceSpec::GraphFun::sine, 2, 0.1, 0, 0, 0.1, cube());
  for (int i = 0; i < 200; ++i) {
    const real3 p = plane.sample_point(rng);
    REQUIRE(plane.domain.contains(p));
    REQUIRE(std::abs(plane.slab_coordinate(p)) < 1e-12);
    const real3 q = graph.sample_point(rng);
    REQUIRE(graph.domain.contains(q));
    REQUIRE(std::abs(graph.slab_coordinate(q)) < 1e-12);
  }
  // graph normals: unit, orthogonal to the tangent directions
  const real3 n = graph.normal_at({0.3, 0.5, 0.0});
  REQUIRE(std::hypot(n[0], std::hypot(n[1], n[2])) == Approx(1.0).epsilon(1e-12));
  const double g = kPi * std::cos(kPi * 0.3);
  REQUIRE(n[0] == Approx(-g / std::sqrt(1 + g * g)).epsilon(1e-12));
  REQUIRE(n[2] == Approx(1 / std::sqrt(1 + g * g)).epsilon(1e-12));
  // a plane that misses its domain box cannot be sampled
  auto off = SurfaceSpec::plane_through({0, 0, 1}, 0, 0.1, Box3{{-1, -1, 0.5}, {1, 1, 1}});
  REQUIRE_THROWS_AS(off.sample_point(rng), DegenerateTransversality);
}

TEST_CASE("orthogonal slab volume is exact on the column grid") {
  const double eps = 0.25;
  auto s1 = SurfaceSpec::plane_through({1, 0, 0}, 0, eps, cube());
  auto s2 = SurfaceSpec::plane_through({0, 1, 0}, 0, eps, cube());
  auto s3 = SurfaceSpec::plane_through({0, 0, 1}, 0, eps, cube());
  const auto est = triple_intersection_volume(s1, s2, s3, VolumeMethod::grid, eps / 8);
  const double exact = 8 * eps * eps * eps;
  REQUIRE(est.value == Approx(exact).epsilon(1e-12));
  REQUIRE(est.min_det == Approx(1.0).epsilon(1e-12));

  // tilted third plane: volume scales by 1/|det|
  auto t3 = SurfaceSpec::plane_through({1, 1, 1}, 0, eps, cube());
  const auto tilted = triple_intersection_volume(s1, s2, t3, VolumeMethod::grid, eps / 8);
  REQUIRE(tilted.value == Approx(exact * std::sqrt(3.0)).epsilon(1e-9));
  REQUIRE(tilted.min_det == Approx(1 / std::sqrt(3.0)).epsilon(1e-12));

  // Monte-Carlo agrees within its own error bars
  const auto mc = triple_intersection_volume(s1, s2, s3, VolumeMethod::monte_carlo, 200000, 5);
  REQUIRE(mc.stderr_est > 0);
  REQUIRE(std::abs(mc.value - exact) <= 5 * mc.stderr_est + 1e-12);

  // parallel planes are rejected
  auto p2 = SurfaceSpec::plane_through({1, 0, 0}, 0.1, eps, cube());
  REQUIRE_THROWS_AS(triple_intersection_volume(s1, p2, s3, VolumeMethod::grid, eps / 8),
                    DegenerateTransversality);
  REQUIRE_THROWS_AS(triple_intersection_volume(s1, s2, s3, VolumeMethod::grid, -1.0),
                    ConfigInvalid);
}

TEST_CASE("thickened trilinear convolution matches the slab closed form") {
  const double eps = 0.25;
  auto s1 = SurfaceSpec::plane_through({1, 0, 0}, 0, eps, cube());
  auto s2 = SurfaceSpec::plane_through({0, 1, 0}, 0, eps, cube());
  auto s3 = SurfaceSpec::plane_through({0, 0, 1}, 0, eps, cube());
  const auto res = thickened_trilinear(s1, s2, s3, 32);
  const double axis = 4 * eps - eps * eps;
  REQUIRE(res.value == Approx(axis * axis * axis).epsilon(1e-9));
  // each slab has volume 2 eps * 4
  REQUIRE(res.norms[0] == Approx(std::sqrt(2 * eps * 4.0)).epsilon(1e-12));
  REQUIRE(res.A == Approx(1.0).epsilon(1e-12));
  REQUIRE(res.bound == Approx(std::pow(eps, 1.5) * res.norms[0] * res.norms[1] * res.norms[2])
                           .epsilon(1e-12));
  REQUIRE(res.ratio == Approx(res.value / res.bound).epsilon(1e-12));

  REQUIRE_THROWS_AS(thickened_trilinear(s1, s2, s3, 16), GridTooCoarse);
  REQUIRE_THROWS_AS(thickened_trilinear(s1, s2, s3, 24), ConfigInvalid);
  auto odd = s1;
  odd.domain = Box3{{-1, -1, -1}, {1, 1, 2}};
  REQUIRE_THROWS_AS(thickened_trilinear(odd, s2, s3, 32), ConfigInvalid);
}

TEST_CASE("ball train center pairs") {
  BallTrain t{2};
  REQUIRE(t.pair_count() == 19.0);
  std::int64_t brute = 0;
  for (std::int64_t k1 = -2; k1 <= 2; ++k1)
    for (std::int64_t k2 = -2; k2 <= 2; ++k2)
      if (std::abs(k1 + k2) <= 2) ++brute;
  REQUIRE(t.pair_count() == double(brute));
  REQUIRE(t.contains({1.0002, 0, 0}));
  REQUIRE_FALSE(t.contains({1.5, 0, 0}));
  REQUIRE_FALSE(t.contains({3.0, 0, 0}));
}

TEST_CASE("restricted transversality counterexample splits into ball pairs") {
  const auto res = restricted_transversality_counterexample(4, std::ldexp(1.0, -10) / 4);
  const double r = std::ldexp(1.0, -10);
  const double t0 = (5.0 * kPi * kPi / 6.0) * std::pow(r, 6);
  REQUIRE(res.pair_count == BallTrain{4}.pair_count());
  REQUIRE(res.single_ball_value == Approx(t0).epsilon(0.05));
  REQUIRE(res.value == Approx(res.pair_count * res.single_ball_value).epsilon(1e-13));
  // the constrained normals stay uniformly transversal
  REQUIRE(res.min_det >= 0.5);
  REQUIRE(res.min_det == Approx(kPi / std::sqrt(1 + kPi * kPi)).margin(2e-3));
  REQUIRE(res.ratio > 0);
  REQUIRE_THROWS_AS(restricted_transversality_counterexample(-1, 0.1), ConfigInvalid);

  // counterexample surfaces: strips plus the sine graph with thickness 2^-5
  const auto surf = counterexample_surfaces(4.0);
  REQUIRE(surf[0].eps == std::ldexp(1.0, -5));
  REQUIRE(surf[2].kind == SurfaceSpec::Kind::graph);
}
