#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>

#include "zkw/io.hpp"

using namespace zkw;
using Catch::Approx;

TEST_CASE("shortest-roundtrip formatting recovers doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-300, -2.5e17, 0.0}) {
    const std::string s = g17(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
  REQUIRE(g17(1.0) == "1");
}

TEST_CASE("csv builder enforces widths and prepends comments") {
  CsvBuilder csv({"t", "value"});
  csv.row({CsvBuilder::num(0.5), CsvBuilder::num(std::int64_t(7))});
  REQUIRE_THROWS_AS(csv.row({"only-one"}), IoError);
  csv.comment("seed=42");
  REQUIRE(csv.data == "# seed=42\nt,value\n0.5,7\n");
}

TEST_CASE("fnv1a64 matches its reference constants") {
  REQUIRE(fnv1a64("") == 14695981039346656037ULL);
  REQUIRE(fnv1a64("a") != fnv1a64("b"));
  REQUIRE(fnv1a64("ab") != fnv1a64("ba"));
  REQUIRE(hex16(0) == "0000000000000000");
  REQUIRE(hex16(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("file helpers round-trip bytes") {
  const std::string path = "zkw_io_test.tmp";
  const std::string payload("line1\nline2\0binary", 18);  // embedded NUL
  write_file(path, payload);
  REQUIRE(read_file(path) == payload);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(read_file("definitely/not/a/file"), IoError);
}

TEST_CASE("coefficient fields survive the json round trip") {
  DualLattice lat{2, 8};
  GridFunction f(lat);
  f.at(1, -3) = cplx(0.25, -0.75);
  f.at(-1, 3) = cplx(0.25, 0.75);
  const auto j = grid_to_json(f);
  const GridFunction g = grid_from_json(j);
  REQUIRE(g.lattice().lambda == 2);
  for (std::int64_t a = -8; a <= 8; ++a)
    for (std::int64_t b = -8; b <= 8; ++b) REQUIRE(g.get(a, b) == f.get(a, b));

  auto bad = j;
  bad["surprise"] = 1;
  REQUIRE_THROWS_AS(grid_from_json(bad), ConfigInvalid);
}

TEST_CASE("manifests compare field by field") {
  ResultManifest a;
  a.experiment = "solve";
  a.config_hash = "00ff";
  a.file_digests["series.csv"] = hex16(fnv1a64("bytes"));
  a.metrics["mass_drift"] = 1e-12;
  const ResultManifest b = ResultManifest::from_json(a.to_json());
  REQUIRE(b.experiment == a.experiment);
  REQUIRE(b.file_digests == a.file_digests);
  REQUIRE(compare_manifests(a, b).identical);

  ResultManifest c = b;
  c.metrics["mass_drift"] = 2e-12;
  c.file_digests["extra.csv"] = "0";
  const ManifestDiff d = compare_manifests(a, c);
  REQUIRE_FALSE(d.identical);
  REQUIRE(d.lines.size() == 2);

  ResultManifest e = b;
  e.experiment = "counting";
  REQUIRE_THROWS_AS(compare_manifests(a, e), ManifestMismatch);
}

TEST_CASE("least squares fits are exact on exact data") {
  const auto fit = linear_fit({0, 1, 2, 3}, {1, 4, 7, 10});
  REQUIRE(fit[0] == Approx(3.0).epsilon(1e-14));
  REQUIRE(fit[1] == Approx(1.0).epsilon(1e-13));
  REQUIRE(loglog_slope({1, 2, 4, 8}, {1, 4, 16, 64}) == Approx(2.0).epsilon(1e-13));
}
