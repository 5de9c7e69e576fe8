// Copyright 2026 The OODLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OODLAB_TESTS_TEST_UTIL_HPP_
#define OODLAB_TESTS_TEST_UTIL_HPP_

// Independent oracles used by the unit and acceptance suites. These stay
// deliberately naive (straight loops and textbook formulas) so they share no
// code path with the implementation they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace oodlab::testutil {

// Direct 7-loop valid cross-correlation.
inline Tensor conv2d_bruteforce(const Tensor& x, const Tensor& w) {
  const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), iw = x.dim(3);
  const int64_t f = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int64_t oh = h - kh + 1, ow = iw - kw + 1;
  Tensor out({n, f, oh, ow});
  for (int64_t in = 0; in < n; ++in)
    for (int64_t jf = 0; jf < f; ++jf)
      for (int64_t i = 0; i < oh; ++i)
        for (int64_t j = 0; j < ow; ++j) {
          double acc = 0.0;
          for (int64_t ic = 0; ic < c; ++ic)
            for (int64_t r = 0; r < kh; ++r)
              for (int64_t s = 0; s < kw; ++s)
                acc += x[((in * c + ic) * h + i + r) * iw + j + s] *
                       w[((jf * c + ic) * kh + r) * kw + s];
          out[((in * f + jf) * oh + i) * ow + j] = acc;
        }
  return out;
}

inline Tensor maxpool2x2_bruteforce(const Tensor& x) {
  const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor out({n, c, h / 2, w / 2});
  int64_t oi = 0;
  for (int64_t p = 0; p < n * c; ++p)
    for (int64_t i = 0; i < h / 2; ++i)
      for (int64_t j = 0; j < w / 2; ++j, ++oi) {
        double best = -1e300;
        for (int64_t di = 0; di < 2; ++di)
          for (int64_t dj = 0; dj < 2; ++dj)
            best = std::max(best,
                            x[p * h * w + (2 * i + di) * w + 2 * j + dj]);
        out[oi] = best;
      }
  return out;
}

// Relative error with a floor so near-zero gradients compare absolutely.
inline double rel_err(double a, double b, double floor_scale = 1e-2) {
  return std::abs(a - b) /
         std::max({std::abs(a), std::abs(b), floor_scale});
}

// Central finite differences of f at `probes` random coordinates of x0,
// compared against the analytic gradient; returns the max relative error.
inline double gradcheck_max_rel(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& analytic,
    int probes, Rng& rng, double h_scale = 1e-5) {
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const size_t i = static_cast<size_t>(
        rng.uniform_int(0, static_cast<int64_t>(x0.size()) - 1));
    const double h = h_scale * std::max(1.0, std::abs(x0[i]));
    std::vector<double> xp = x0, xm = x0;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (f(xp) - f(xm)) / (2.0 * h);
    worst = std::max(worst, rel_err(analytic[i], fd));
  }
  return worst;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Largest principal angle between the row spans of two k x d matrices with
// orthonormal rows, via the singular values of their cross-Gramian.
inline double subspace_angle(const std::vector<std::vector<double>>& a,
                             const std::vector<std::vector<double>>& b) {
  // k = 2 here; the 2x2 SVD reduces to an eigenproblem of M^T M.
  const size_t d = a[0].size();
  double m[2][2] = {{0, 0}, {0, 0}};
  for (size_t r = 0; r < 2; ++r)
    for (size_t c = 0; c < 2; ++c)
      for (size_t j = 0; j < d; ++j) m[r][c] += a[r][j] * b[c][j];
  // eigenvalues of M^T M are the squared singular values
  const double g00 = m[0][0] * m[0][0] + m[1][0] * m[1][0];
  const double g11 = m[0][1] * m[0][1] + m[1][1] * m[1][1];
  const double g01 = m[0][0] * m[0][1] + m[1][0] * m[1][1];
  const double tr = 0.5 * (g00 + g11);
  const double disc =
      std::sqrt(std::max(0.0, 0.25 * (g00 - g11) * (g00 - g11) + g01 * g01));
  const double smin2 = std::max(0.0, tr - disc);
  const double smin = std::min(1.0, std::sqrt(smin2));
  return std::acos(smin);
}

}  // namespace oodlab::testutil

#endif  // OODLAB_TESTS_TEST_UTIL_HPP_
