#pragma once

// Iterative radix-2 complex FFT for power-of-two sizes, with a batched
// variant that transforms along the outer index of a row-major [n][batch]
// block so the inner loop runs over contiguous memory.
//
// All transforms are unnormalized: sign=+1 computes sum_j a_j e^{+2 pi i jk/n},
// sign=-1 the conjugate exponent.  Callers apply 1/n factors themselves.
//
// The butterfly is u + w*v / u - w*v with w taken from a table whose t=0
// entry is exactly (1,0).  Consequence: a constant input column produces
// exact floating-point zeros in every nonzero bin, and a single-bin input
// produces an exactly constant output.  The solver relies on this to keep
// never-excited modes at bit-zero.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace zkw {

using cplx = std::complex<double>;

namespace fft_detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Tables {
  std::size_t n = 0;
  std::vector<std::size_t> rev;   // bit-reversal permutation
  std::vector<cplx> w;            // per-stage twiddles, sign=+1, concatenated
  std::vector<std::size_t> off;   // stage offsets into w (stage s: len = 2^{s+1})
};

inline const Tables& tables_for(std::size_t n) {
  static std::vector<Tables> cache;  // indexed by log2(n)
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  std::size_t lg = 0;
  while ((std::size_t{1} << lg) < n) ++lg;
  if (cache.size() <= lg) cache.resize(lg + 1);
  Tables& t = cache[lg];
  if (t.n == n) return t;
  t.n = n;
  t.rev.assign(n, 0);
  for (std::size_t i = 1; i < n; ++i)
    t.rev[i] = (t.rev[i >> 1] >> 1) | ((i & 1) ? n >> 1 : 0);
  t.w.clear();
  t.off.clear();
  const double pi = 3.14159265358979323846264338327950288;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    t.off.push_back(t.w.size());
    for (std::size_t k = 0; k < len / 2; ++k) {
      if (k == 0) { t.w.emplace_back(1.0, 0.0); continue; }
      double ang = 2.0 * pi * double(k) / double(len);
      t.w.emplace_back(std::cos(ang), std::sin(ang));
    }
  }
  return t;
}

}  // namespace fft_detail

// In-place transform along the outer index of row-major data[n][batch].
inline void fft_batched(cplx* a, std::size_t n, std::size_t batch, int sign) {
  if (n == 1) return;
  const auto& t = fft_detail::tables_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = t.rev[i];
    if (i < j) {
      cplx* p = a + i * batch;
      cplx* q = a + j * batch;
      for (std::size_t b = 0; b < batch; ++b) std::swap(p[b], q[b]);
    }
  }
  std::size_t stage = 0;
  for (std::size_t len = 2; len <= n; len <<= 1, ++stage) {
    const std::size_t half = len / 2;
    const cplx* tw = t.w.data() + t.off[stage];
    for (std::size_t blk = 0; blk < n; blk += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = tw[k];
        if (sign < 0) w = std::conj(w);
        const double wr = w.real(), wi = w.imag();
        double* p = reinterpret_cast<double*>(a + (blk + k) * batch);
        double* q = reinterpret_cast<double*>(a + (blk + k + half) * batch);
        for (std::size_t b = 0; b < batch; ++b) {
          const double ur = p[2 * b], ui = p[2 * b + 1];
          const double xr = q[2 * b], xi = q[2 * b + 1];
          const double vr = xr * wr - xi * wi;
          const double vi = xr * wi + xi * wr;
          p[2 * b] = ur + vr;
          p[2 * b + 1] = ui + vi;
          q[2 * b] = ur - vr;
          q[2 * b + 1] = ui - vi;
        }
      }
    }
  }
}

inline void fft(cplx* a, std::size_t n, int sign) { fft_batched(a, n, 1, sign); }

inline void transpose(const cplx* src, cplx* dst, std::size_t n) {
  constexpr std::size_t B = 32;  // block for cache friendliness
  for (std::size_t i0 = 0; i0 < n; i0 += B)
    for (std::size_t j0 = 0; j0 < n; j0 += B)
      for (std::size_t i = i0; i < i0 + B && i < n; ++i)
        for (std::size_t j = j0; j < j0 + B && j < n; ++j)
          dst[j * n + i] = src[i * n + j];
}

// 2-d transform of row-major a[n][n]; scratch must hold n*n entries.
inline void fft2(cplx* a, std::size_t n, int sign, cplx* scratch) {
  fft_batched(a, n, n, sign);        // along the outer (row) index
  transpose(a, scratch, n);
  fft_batched(scratch, n, n, sign);  // along the former inner index
  transpose(scratch, a, n);
}

inline void fft2(std::vector<cplx>& a, std::size_t n, int sign) {
  if (a.size() != n * n) throw std::invalid_argument("fft2: bad buffer size");
  std::vector<cplx> scratch(n * n);
  fft2(a.data(), n, sign, scratch.data());
}

// 3-d transform of row-major a[n][n][n].
inline void fft3(std::vector<cplx>& a, std::size_t n, int sign) {
  if (a.size() != n * n * n) throw std::invalid_argument("fft3: bad buffer size");
  std::vector<cplx> scratch(n * n);
  for (std::size_t z = 0; z < n; ++z) fft2(a.data() + z * n * n, n, sign, scratch.data());
  fft_batched(a.data(), n, n * n, sign);
}

}  // namespace zkw
