// Evaluate the trilinear interaction on the extremal single-mode triple
// (N,-N), (N,2N), (2N,N) and compare the value and normalized ratio with the
// closed forms 4*L1*L2 and sqrt(2L1*2L2/(2L3)).
#include <cmath>
#include <cstdio>

#include "zkw/trilinear.hpp"

zkw::ModFunction mode(const zkw::DualLattice& lat, std::int64_t a, std::int64_t b, double L) {
  zkw::ModFunction f;
  f.lattice = lat;
  f.symbol = zkw::Symbol::psi_sym;
  f.shell = zkw::DyadicShell{zkw::DyadicShell::locate(std::hypot(double(a), double(b)))};
  f.L = L;
  f.entries = {{a, b, 1.0}};
  return f;
}

int main() {
  const double L1 = 0.5, L2 = 1.0, L3 = 2.0;
  std::printf("# N    value      ratio      closed-form ratio\n");
  for (const std::int64_t N : {8, 16, 32, 64}) {
    const zkw::DualLattice lat{1, 4 * N};
    const auto f1 = mode(lat, N, -N, L1);
    const auto f2 = mode(lat, N, 2 * N, L2);
    const auto f3 = mode(lat, 2 * N, N, L3);
    const double v = zkw::trilinear_form(f1, f2, f3);
    const double ratio = v / (zkw::mod_norm(f1) * zkw::mod_norm(f2) * zkw::mod_norm(f3));
    std::printf("%4lld  %9.6f  %9.6f  %9.6f\n", (long long)N, v, ratio,
                std::sqrt(2 * L1 * 2 * L2 / (2 * L3)));
  }
  return 0;
}
