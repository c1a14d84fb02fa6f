#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "zkw/fft.hpp"
#include "zkw/rng.hpp"

using namespace zkw;

namespace {

std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  const double w = 2.0 * 3.14159265358979323846 * sign / double(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc(0, 0);
    for (std::size_t j = 0; j < n; ++j)
      acc += in[j] * cplx(std::cos(w * double(j * k)), std::sin(w * double(j * k)));
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fft matches the naive transform") {
  Rng rng(42);
  for (const std::size_t n : {std::size_t(8), std::size_t(16), std::size_t(64)}) {
    std::vector<cplx> a(n);
    for (auto& z : a) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    auto ref = naive_dft(a, +1);
    std::vector<cplx> b = a;
    fft(b.data(), n, +1);
    for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(b[k] - ref[k]) < 1e-10 * double(n));
  }
}

TEST_CASE("fft roundtrip is the identity up to scaling") {
  Rng rng(7);
  const std::size_t n = 128;
  std::vector<cplx> a(n), orig;
  for (auto& z : a) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  orig = a;
  fft(a.data(), n, +1);
  fft(a.data(), n, -1);
  for (std::size_t k = 0; k < n; ++k)
    REQUIRE(std::abs(a[k] / double(n) - orig[k]) < 1e-13);
}

TEST_CASE("delta and constant transform to bit-exact counterparts") {
  // the solver's mode-purity guarantee rests on these exact zeros
  const std::size_t n = 64;
  std::vector<cplx> delta(n, cplx(0, 0));
  delta[0] = cplx(1, 0);
  fft(delta.data(), n, +1);
  for (std::size_t k = 0; k < n; ++k) {
    REQUIRE(delta[k].real() == 1.0);
    REQUIRE(delta[k].imag() == 0.0);
  }
  std::vector<cplx> ones(n, cplx(2.5, 0));
  fft(ones.data(), n, -1);
  REQUIRE(ones[0].real() == 2.5 * double(n));
  for (std::size_t k = 1; k < n; ++k) {
    REQUIRE(ones[k].real() == 0.0);
    REQUIRE(ones[k].imag() == 0.0);
  }
}

TEST_CASE("fft2 separable mode stays on its row and column") {
  // a pure y-independent field has exact zeros in every b != 0 bin
  const std::size_t n = 32;
  std::vector<cplx> a(n * n);
  Rng rng(3);
  std::vector<cplx> row(n);
  for (auto& z : row) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = row[i];
  fft2(a, n, +1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) {
      REQUIRE(a[i * n + j].real() == 0.0);
      REQUIRE(a[i * n + j].imag() == 0.0);
    }
}

TEST_CASE("fft2 roundtrip") {
  const std::size_t n = 64;
  Rng rng(11);
  std::vector<cplx> a(n * n), orig;
  for (auto& z : a) z = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  orig = a;
  fft2(a, n, +1);
  fft2(a, n, -1);
  for (std::size_t k = 0; k < n * n; ++k)
    REQUIRE(std::abs(a[k] / double(n * n) - orig[k]) < 1e-12);
}

TEST_CASE("fft rejects non-power-of-two sizes") {
  std::vector<cplx> a(12);
  REQUIRE_THROWS(fft(a.data(), 12, +1));
}
