// include/gwhi/sigproc.hpp

// Copyright 2026 gwhi authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Frequency, time-frequency, analytic and intrinsic-mode representations of
// raw waveforms: FFT, STFT, Hilbert transform and EMD sifting.

#ifndef GWHI_SIGPROC_HPP
#define GWHI_SIGPROC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "gwhi/common.hpp"

namespace gwhi {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 Cooley-Tukey. `sign` is the exponent sign of
/// the kernel: -1 forward, +1 inverse (inverse is NOT scaled here).
inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    cplx wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Bluestein's chirp-z algorithm for arbitrary lengths. Chirp phases are
/// reduced modulo 2N in exact integer arithmetic before the trig call, which
/// keeps the transform at ~1e-13 relative error even for N in the thousands.
inline std::vector<cplx> fft_bluestein(const std::vector<cplx>& x, int sign) {
  const size_t n = x.size();
  std::vector<cplx> w(n);
  for (size_t k = 0; k < n; ++k) {
    uint64_t k2 = (static_cast<uint64_t>(k) * k) % (2 * n);
    double ang = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    w[k] = cplx(std::cos(ang), std::sin(ang));
  }
  const size_t m = next_pow2(2 * n - 1);
  std::vector<cplx> a(m, cplx(0, 0)), b(m, cplx(0, 0));
  for (size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
  for (size_t k = 0; k < n; ++k) {
    b[k] = std::conj(w[k]);
    if (k != 0) b[m - k] = std::conj(w[k]);
  }
  fft_pow2(a, -1);
  fft_pow2(b, -1);
  for (size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, +1);
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = a[k] * w[k] / static_cast<double>(m);
  return out;
}

inline void fft_inplace(std::vector<cplx>& a, int sign) {
  if (a.size() < 2) return;
  if (is_pow2(a.size())) {
    fft_pow2(a, sign);
  } else {
    a = fft_bluestein(a, sign);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// Full complex DFT of a real signal, X_k = sum_n x_n e^{-2 pi i k n / L}.
struct Spectrum {
  std::vector<cplx> bins;
  double sample_rate = 1.0;

  size_t size() const { return bins.size(); }
  double bin_resolution() const { return sample_rate / static_cast<double>(bins.size()); }

  /// One-sided magnitudes, bins 0..L/2.
  std::vector<double> onesided_magnitudes() const {
    std::vector<double> mags(bins.size() / 2 + 1);
    for (size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(bins[k]);
    return mags;
  }

  std::vector<double> onesided_freqs() const {
    std::vector<double> fs(bins.size() / 2 + 1);
    for (size_t k = 0; k < fs.size(); ++k) fs[k] = static_cast<double>(k) * bin_resolution();
    return fs;
  }
};

inline std::vector<cplx> fft_complex(std::vector<cplx> a) {
  detail::fft_inplace(a, -1);
  return a;
}

inline std::vector<cplx> ifft_complex(std::vector<cplx> a) {
  detail::fft_inplace(a, +1);
  for (auto& v : a) v /= static_cast<double>(a.size());
  return a;
}

inline Spectrum fft(std::span<const double> signal, double sample_rate = 1.0) {
  if (signal.empty()) throw ArgumentError("fft: empty input");
  for (double v : signal)
    if (!std::isfinite(v)) throw ArgumentError("fft: non-finite input");
  std::vector<cplx> a(signal.begin(), signal.end());
  detail::fft_inplace(a, -1);
  return Spectrum{std::move(a), sample_rate};
}

// ---------------------------------------------------------------------------
// Spectrogram
// ---------------------------------------------------------------------------

/// One-sided magnitude spectrogram; rows are time windows taken every
/// (win_len - overlap) samples, rectangular window, no padding.
struct Spectrogram {
  std::vector<std::vector<double>> rows;  // [window][frequency bin]
  int win_len = 0;
  int hop_len = 0;

  int window_count() const { return static_cast<int>(rows.size()); }
  int bin_count() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

inline int stft_window_count(int signal_len, int win_len, int overlap) {
  return (signal_len - win_len) / (win_len - overlap) + 1;
}

inline Spectrogram stft(std::span<const double> signal, int win_len = 250, int overlap = 125) {
  if (win_len <= 0 || overlap < 0 || overlap >= win_len)
    throw ArgumentError("stft: need 0 <= overlap < win_len");
  if (static_cast<size_t>(win_len) > signal.size())
    throw ArgumentError("stft: window longer than signal");
  Spectrogram sg;
  sg.win_len = win_len;
  sg.hop_len = win_len - overlap;
  const int n_windows = stft_window_count(static_cast<int>(signal.size()), win_len, overlap);
  sg.rows.reserve(static_cast<size_t>(n_windows));
  for (int w = 0; w < n_windows; ++w) {
    auto slice = signal.subspan(static_cast<size_t>(w) * sg.hop_len, static_cast<size_t>(win_len));
    sg.rows.push_back(fft(slice).onesided_magnitudes());
  }
  return sg;
}

// ---------------------------------------------------------------------------
// Analytic signal (Hilbert transform)
// ---------------------------------------------------------------------------

struct AnalyticSignal {
  std::vector<cplx> values;

  std::vector<double> envelope() const {
    std::vector<double> env(values.size());
    for (size_t i = 0; i < values.size(); ++i) env[i] = std::abs(values[i]);
    return env;
  }

  std::vector<double> phase() const {
    std::vector<double> ph(values.size());
    for (size_t i = 0; i < values.size(); ++i) ph[i] = std::arg(values[i]);
    return ph;
  }
};

/// Spectrum method: zero the negative frequencies, double the positive ones,
/// keep DC and (for even lengths) Nyquist.
inline AnalyticSignal hilbert_analytic(std::span<const double> signal) {
  if (signal.size() < 2) throw ArgumentError("hilbert_analytic: need length >= 2");
  std::vector<cplx> spec(signal.begin(), signal.end());
  detail::fft_inplace(spec, -1);
  const size_t n = spec.size();
  const size_t half = n / 2;
  for (size_t k = 1; k < half + (n % 2 ? 1 : 0); ++k) spec[k] *= 2.0;
  for (size_t k = half + 1; k < n; ++k) spec[k] = cplx(0, 0);
  // n even: bin `half` is Nyquist, kept unscaled.
  return AnalyticSignal{ifft_complex(std::move(spec))};
}

// ---------------------------------------------------------------------------
// Empirical mode decomposition
// ---------------------------------------------------------------------------

struct ImfDecomposition {
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;
};

struct EmdParams {
  double sd_stop = 0.1;
  int max_sift_iters = 10;
};

namespace detail {

/// Interior extrema; plateaus contribute their middle sample. Returns indices.
inline void find_extrema(std::span<const double> x, std::vector<int>& maxima,
                         std::vector<int>& minima) {
  maxima.clear();
  minima.clear();
  const int n = static_cast<int>(x.size());
  int prev_slope = 0;
  int plateau_start = 0;
  for (int i = 1; i < n; ++i) {
    double d = x[i] - x[i - 1];
    int slope = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (slope == 0) continue;
    if (prev_slope == 1 && slope == -1) {
      maxima.push_back((plateau_start + i - 1) / 2);
    } else if (prev_slope == -1 && slope == 1) {
      minima.push_back((plateau_start + i - 1) / 2);
    }
    // Start of the candidate plateau for the next turning point: the sample
    // where the current monotone run ends.
    prev_slope = slope;
    plateau_start = i;
  }
}

/// Natural cubic spline through strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    const int n = static_cast<int>(x_.size());
    if (n < 2) throw ArgumentError("spline needs >= 2 knots");
    m_.assign(static_cast<size_t>(n), 0.0);
    if (n == 2) return;
    // Tridiagonal solve for second derivatives, natural boundary (m_0=m_n=0).
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      double h0 = x_[i] - x_[i - 1];
      double h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (int i = 2; i < n - 1; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    for (int i = n - 2; i >= 1; --i) {
      m_[static_cast<size_t>(i)] = (d[i] - c[i] * m_[static_cast<size_t>(i + 1)]) / b[i];
    }
  }

  double operator()(double x) const {
    const int n = static_cast<int>(x_.size());
    int lo = 0, hi = n - 1;
    if (x <= x_[0]) {
      hi = 1;
    } else if (x >= x_[static_cast<size_t>(n - 1)]) {
      lo = n - 2;
    } else {
      while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (x_[static_cast<size_t>(mid)] <= x ? lo : hi) = mid;
      }
    }
    double h = x_[static_cast<size_t>(lo + 1)] - x_[static_cast<size_t>(lo)];
    double t0 = (x_[static_cast<size_t>(lo + 1)] - x) / h;
    double t1 = (x - x_[static_cast<size_t>(lo)]) / h;
    return t0 * y_[static_cast<size_t>(lo)] + t1 * y_[static_cast<size_t>(lo + 1)] +
           ((t0 * t0 * t0 - t0) * m_[static_cast<size_t>(lo)] +
            (t1 * t1 * t1 - t1) * m_[static_cast<size_t>(lo + 1)]) *
               h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_;
  std::vector<double> m_;  // second derivatives at knots
};

/// Envelope through the given extrema, with the two end extrema mirrored
/// beyond each boundary to tame end swings.
inline std::vector<double> spline_envelope(std::span<const double> x,
                                           const std::vector<int>& extrema) {
  const int n = static_cast<int>(x.size());
  std::vector<double> ks, vs;
  const int e0 = extrema.front(), e1 = extrema[1];
  const int eK = extrema.back(), eK1 = extrema[extrema.size() - 2];
  // Mirror about sample 0 and sample n-1.
  ks.push_back(-static_cast<double>(e1));
  vs.push_back(x[static_cast<size_t>(e1)]);
  ks.push_back(-static_cast<double>(e0));
  vs.push_back(x[static_cast<size_t>(e0)]);
  for (int e : extrema) {
    ks.push_back(static_cast<double>(e));
    vs.push_back(x[static_cast<size_t>(e)]);
  }
  ks.push_back(static_cast<double>(2 * (n - 1) - eK));
  vs.push_back(x[static_cast<size_t>(eK)]);
  ks.push_back(static_cast<double>(2 * (n - 1) - eK1));
  vs.push_back(x[static_cast<size_t>(eK1)]);
  // Mirrors can collide with boundary extrema; keep strictly increasing knots.
  std::vector<double> kk, vv;
  for (size_t i = 0; i < ks.size(); ++i) {
    if (!kk.empty() && ks[i] <= kk.back()) continue;
    kk.push_back(ks[i]);
    vv.push_back(vs[i]);
  }
  CubicSpline sp(std::move(kk), std::move(vv));
  std::vector<double> env(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) env[static_cast<size_t>(i)] = sp(static_cast<double>(i));
  return env;
}

inline double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace detail

/// Sifting with cubic-spline envelopes; a candidate IMF is accepted when the
/// Cauchy-type SD between successive siftings drops below sd_stop or after
/// max_sift_iters passes. Extraction stops when the residual has fewer than
/// 4 extrema (monotonic included) or is numerically exhausted.
inline ImfDecomposition emd(std::span<const double> signal, const EmdParams& params = {}) {
  for (double v : signal)
    if (!std::isfinite(v)) throw ArgumentError("emd: non-finite input");
  ImfDecomposition out;
  out.residual.assign(signal.begin(), signal.end());
  if (signal.size() < 8) return out;

  const double input_rms = detail::rms(signal);
  std::vector<int> maxima, minima;
  std::vector<double> h(signal.size()), h_next(signal.size());

  while (true) {
    detail::find_extrema(out.residual, maxima, minima);
    if (maxima.size() + minima.size() < 4 || maxima.size() < 2 || minima.size() < 2) break;
    if (input_rms > 0.0 && detail::rms(out.residual) < 1e-10 * input_rms) break;

    h = out.residual;
    for (int iter = 0; iter < params.max_sift_iters; ++iter) {
      detail::find_extrema(h, maxima, minima);
      if (maxima.size() < 2 || minima.size() < 2) break;
      std::vector<double> upper = detail::spline_envelope(h, maxima);
      std::vector<double> lower = detail::spline_envelope(h, minima);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < h.size(); ++i) {
        double mean_env = 0.5 * (upper[i] + lower[i]);
        h_next[i] = h[i] - mean_env;
        num += mean_env * mean_env;  // (h - h_next)^2
        den += h[i] * h[i];
      }
      h.swap(h_next);
      if (den > 0.0 && num / den < params.sd_stop) break;
    }
    out.imfs.push_back(h);
    for (size_t i = 0; i < h.size(); ++i) out.residual[i] -= h[i];
  }
  return out;
}

}  // namespace gwhi

#endif  // GWHI_SIGPROC_HPP
