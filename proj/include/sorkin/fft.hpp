#pragma once
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace sorkin {

using Complex = std::complex<double>;

/// Transform sizes are restricted to 2^a * 3^b.
inline bool is_fft_size(std::size_t n) {
  if (n == 0) return false;
  while (n % 2 == 0) n /= 2;
  while (n % 3 == 0) n /= 3;
  return n == 1;
}

inline std::size_t next_fft_size(std::size_t n) {
  while (!is_fft_size(n)) ++n;
  return n;
}

namespace detail {

/// Out-of-place decimation-in-time FFT over a strided input, radix 2/3.
/// sign = -1 forward, +1 inverse (unscaled).
inline void fft_rec(Complex* out, const Complex* in, std::size_t n, std::size_t stride,
                    double sign) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
  if (n % 2 == 0) {
    const std::size_t m = n / 2;
    fft_rec(out, in, m, stride * 2, sign);
    fft_rec(out + m, in + stride, m, stride * 2, sign);
    const Complex wstep = std::polar(1.0, ang);
    Complex w{1.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      if ((j & 255u) == 0) w = std::polar(1.0, ang * static_cast<double>(j));
      const Complex u = out[j];
      const Complex v = out[m + j] * w;
      out[j] = u + v;
      out[m + j] = u - v;
      w *= wstep;
    }
  } else {  // n % 3 == 0 by construction
    const std::size_t m = n / 3;
    fft_rec(out, in, m, stride * 3, sign);
    fft_rec(out + m, in + stride, m, stride * 3, sign);
    fft_rec(out + 2 * m, in + 2 * stride, m, stride * 3, sign);
    const Complex wstep = std::polar(1.0, ang);
    const Complex r1 = std::polar(1.0, sign * 2.0 * std::numbers::pi / 3.0);
    const Complex r2 = std::polar(1.0, sign * 4.0 * std::numbers::pi / 3.0);
    Complex w{1.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      if ((j & 255u) == 0) w = std::polar(1.0, ang * static_cast<double>(j));
      const Complex t0 = out[j];
      const Complex t1 = out[m + j] * w;
      const Complex t2 = out[2 * m + j] * (w * w);
      out[j] = t0 + t1 + t2;
      out[m + j] = t0 + r1 * t1 + r2 * t2;
      out[2 * m + j] = t0 + r2 * t1 + r1 * t2;
      w *= wstep;
    }
  }
}

inline void transpose_blocked(const Complex* src, Complex* dst, std::size_t rows,
                              std::size_t cols) {
  constexpr std::size_t B = 64;
  for (std::size_t r0 = 0; r0 < rows; r0 += B)
    for (std::size_t c0 = 0; c0 < cols; c0 += B) {
      const std::size_t r1 = std::min(rows, r0 + B);
      const std::size_t c1 = std::min(cols, c0 + B);
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) dst[c * rows + r] = src[r * cols + c];
    }
}

}  // namespace detail

/// In-place 1D FFT. n must be a 2^a 3^b size. Inverse is scaled by 1/n.
inline void fft(std::vector<Complex>& data, bool inverse) {
  const std::size_t n = data.size();
  std::vector<Complex> tmp(n);
  detail::fft_rec(tmp.data(), data.data(), n, 1, inverse ? +1.0 : -1.0);
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (Complex& z : tmp) z *= s;
  }
  data.swap(tmp);
}

/// In-place 2D FFT of a row-major (rows x cols) array. Both dimensions must be
/// 2^a 3^b sizes. The inverse transform is scaled by 1/(rows*cols).
/// `scratch` is resized to rows*cols and reused across calls.
inline void fft2d(std::vector<Complex>& data, std::size_t rows, std::size_t cols, bool inverse,
                  std::vector<Complex>& scratch) {
  const double sign = inverse ? +1.0 : -1.0;
  scratch.resize(rows * cols);
  std::vector<Complex> rowbuf(std::max(rows, cols));

  for (std::size_t r = 0; r < rows; ++r) {
    detail::fft_rec(rowbuf.data(), data.data() + r * cols, cols, 1, sign);
    std::copy(rowbuf.begin(), rowbuf.begin() + static_cast<std::ptrdiff_t>(cols),
              data.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  detail::transpose_blocked(data.data(), scratch.data(), rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    detail::fft_rec(rowbuf.data(), scratch.data() + c * rows, rows, 1, sign);
    std::copy(rowbuf.begin(), rowbuf.begin() + static_cast<std::ptrdiff_t>(rows),
              scratch.begin() + static_cast<std::ptrdiff_t>(c * rows));
  }
  detail::transpose_blocked(scratch.data(), data.data(), cols, rows);

  if (inverse) {
    const double s = 1.0 / static_cast<double>(rows * cols);
    for (Complex& z : data) z *= s;
  }
}

}  // namespace sorkin
