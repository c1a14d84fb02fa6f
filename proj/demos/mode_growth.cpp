// Seed a single unstable mode on top of a constant background and watch its
// amplitude grow like e^{N*A*t}; prints the fitted rate against the prediction.
#include <cstdio>

#include "zkw/solver.hpp"

int main() {
  const double A = 1.0, B = 1.0;
  const std::int64_t N = 8;
  const zkw::ModeHistory h = zkw::run_norm_inflation_1(A, B, N, 4.0 / (N * A), 1e-4, 32);
  std::printf("# t  |u_hat(N,0)|\n");
  for (std::size_t i = 0; i < h.rows.size(); i += h.rows.size() / 16)
    std::printf("%8.5f  %.6e\n", h.rows[i].t, h.rows[i].target_abs);
  std::printf("fitted rate %.6f  (prediction %g)\n", h.fitted_rate, double(N) * A);
  return 0;
}
