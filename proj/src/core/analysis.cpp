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

#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/autodiff.hpp"
#include "core/error.hpp"

namespace oodlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

MetricsReport confusion_metrics(const std::vector<double>& probabilities,
                                const std::vector<uint8_t>& labels,
                                double threshold) {
  require(probabilities.size() == labels.size(), ErrorKind::kArgument,
          "confusion_metrics: prediction/label length mismatch");
  require(!labels.empty(), ErrorKind::kArgument,
          "confusion_metrics: empty input");
  MetricsReport r;
  for (size_t i = 0; i < labels.size(); ++i) {
    const bool positive = labels[i] == 1;  // malignant
    const bool predicted = probabilities[i] >= threshold;
    if (positive && predicted) ++r.tp;
    else if (positive && !predicted) ++r.fn;
    else if (!positive && predicted) ++r.fp;
    else ++r.tn;
  }
  r.acc = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.total());
  r.se = (r.tp + r.fn) > 0
             ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn)
             : kNan;
  r.sp = (r.tn + r.fp) > 0
             ? static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp)
             : kNan;
  // acc = (se*P + sp*N) / (P+N) whenever both ratios are defined
  if (std::isfinite(r.se) && std::isfinite(r.sp)) {
    const double p = static_cast<double>(r.tp + r.fn);
    const double n = static_cast<double>(r.tn + r.fp);
    require(std::abs(r.acc - (r.se * p + r.sp * n) / (p + n)) < 1e-12,
            ErrorKind::kInternal, "metrics identity violated");
  }
  return r;
}

Tensor extract_features(const EncoderParams& encoder, const Dataset& dataset) {
  constexpr int kChunk = 64;
  const int n = static_cast<int>(dataset.samples.size());
  Tensor features({n, kEmbeddingDim});
  for (int start = 0; start < n; start += kChunk) {
    const int stop = std::min(start + kChunk, n);
    std::vector<const float*> ptrs;
    for (int i = start; i < stop; ++i) {
      ptrs.push_back(dataset.samples[static_cast<size_t>(i)].pixels.data());
    }
    const Tensor emb =
        encode(encoder, batch_to_tensor(ptrs, dataset.spec.image_size));
    std::copy(emb.data(), emb.data() + emb.numel(),
              features.data() + static_cast<int64_t>(start) * kEmbeddingDim);
  }
  return features;
}

void symmetric_eigen(const std::vector<double>& matrix, int n,
                     std::vector<double>* eigenvalues,
                     std::vector<double>* eigenvectors) {
  require(static_cast<int>(matrix.size()) == n * n, ErrorKind::kArgument,
          "symmetric_eigen: matrix size mismatch");
  std::vector<double> a = matrix;
  std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

  auto at = [&](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<size_t>(r) * n + c];
  };

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    }
    if (off < 1e-26) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> diag(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) diag[static_cast<size_t>(i)] = at(a, i, i);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
    return diag[static_cast<size_t>(x)] > diag[static_cast<size_t>(y)];
  });

  eigenvalues->resize(static_cast<size_t>(n));
  eigenvectors->assign(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r) {
    const int src = idx[static_cast<size_t>(r)];
    (*eigenvalues)[static_cast<size_t>(r)] = diag[static_cast<size_t>(src)];
    for (int k = 0; k < n; ++k) {
      (*eigenvectors)[static_cast<size_t>(r) * n + k] = at(v, k, src);
    }
  }
}

Pca pca_fit(const Tensor& features) {
  require(features.rank() == 2, ErrorKind::kArgument,
          "pca_fit: features must be a matrix");
  const int64_t n = features.dim(0), d = features.dim(1);
  require(n >= 3, ErrorKind::kArgument, "pca_fit: need at least 3 samples");

  Pca pca;
  pca.mean.assign(static_cast<size_t>(d), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const double* row = features.data() + i * d;
    for (int64_t j = 0; j < d; ++j) pca.mean[static_cast<size_t>(j)] += row[j];
  }
  for (double& m : pca.mean) m /= static_cast<double>(n);

  std::vector<double> cov(static_cast<size_t>(d) * d, 0.0);
  std::vector<double> centered(static_cast<size_t>(d));
  for (int64_t i = 0; i < n; ++i) {
    const double* row = features.data() + i * d;
    for (int64_t j = 0; j < d; ++j) {
      centered[static_cast<size_t>(j)] = row[j] - pca.mean[static_cast<size_t>(j)];
    }
    for (int64_t r = 0; r < d; ++r) {
      const double cr = centered[static_cast<size_t>(r)];
      double* crow = cov.data() + r * d;
      for (int64_t cix = r; cix < d; ++cix) {
        crow[cix] += cr * centered[static_cast<size_t>(cix)];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (int64_t r = 0; r < d; ++r) {
    for (int64_t cix = r; cix < d; ++cix) {
      const double val = cov[static_cast<size_t>(r) * d + cix] * inv;
      cov[static_cast<size_t>(r) * d + cix] = val;
      cov[static_cast<size_t>(cix) * d + r] = val;
    }
  }

  std::vector<double> eigenvalues, eigenvectors;
  symmetric_eigen(cov, static_cast<int>(d), &eigenvalues, &eigenvectors);

  pca.total_variance =
      std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  pca.explained_variance = {eigenvalues[0], eigenvalues[1]};
  require(eigenvalues[1] > 1e-12 * std::max(eigenvalues[0], 1e-30),
          ErrorKind::kArgument,
          "pca_fit: degenerate data, feature rank < 2");

  for (int comp = 0; comp < 2; ++comp) {
    std::vector<double> vec(
        eigenvectors.begin() + static_cast<int64_t>(comp) * d,
        eigenvectors.begin() + static_cast<int64_t>(comp + 1) * d);
    // sign convention: largest-magnitude coordinate positive
    size_t arg = 0;
    for (size_t j = 1; j < vec.size(); ++j) {
      if (std::abs(vec[j]) > std::abs(vec[arg])) arg = j;
    }
    if (vec[arg] < 0.0) {
      for (double& x : vec) x = -x;
    }
    pca.basis[static_cast<size_t>(comp)] = std::move(vec);
  }

  // orthonormality is a hard postcondition of every fit
  double n0 = 0.0, n1 = 0.0, dot = 0.0;
  for (int64_t j = 0; j < d; ++j) {
    n0 += pca.basis[0][static_cast<size_t>(j)] * pca.basis[0][static_cast<size_t>(j)];
    n1 += pca.basis[1][static_cast<size_t>(j)] * pca.basis[1][static_cast<size_t>(j)];
    dot += pca.basis[0][static_cast<size_t>(j)] * pca.basis[1][static_cast<size_t>(j)];
  }
  require(std::abs(n0 - 1.0) < 1e-10 && std::abs(n1 - 1.0) < 1e-10 &&
              std::abs(dot) < 1e-10,
          ErrorKind::kInternal, "pca_fit: basis not orthonormal");
  return pca;
}

std::vector<Point2> pca_project(const Pca& pca, const Tensor& features) {
  require(features.rank() == 2 &&
              features.dim(1) == static_cast<int64_t>(pca.mean.size()),
          ErrorKind::kArgument, "pca_project: dimension mismatch");
  const int64_t n = features.dim(0), d = features.dim(1);
  std::vector<Point2> out(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const double* row = features.data() + i * d;
    double x = 0.0, y = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      const double c = row[j] - pca.mean[static_cast<size_t>(j)];
      x += c * pca.basis[0][static_cast<size_t>(j)];
      y += c * pca.basis[1][static_cast<size_t>(j)];
    }
    out[static_cast<size_t>(i)] = {x, y};
  }
  return out;
}

std::optional<Ellipse2Std> ellipse_2std(const std::vector<Point2>& points) {
  if (points.size() < 3) return std::nullopt;
  const double n = static_cast<double>(points.size());
  Ellipse2Std e;
  for (const Point2& p : points) {
    e.cx += p.x;
    e.cy += p.y;
  }
  e.cx /= n;
  e.cy /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Point2& p : points) {
    const double dx = p.x - e.cx, dy = p.y - e.cy;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  sxx /= n - 1.0;
  sxy /= n - 1.0;
  syy /= n - 1.0;
  const double tr = 0.5 * (sxx + syy);
  const double det = std::sqrt(std::max(0.0, 0.25 * (sxx - syy) * (sxx - syy) +
                                                 sxy * sxy));
  const double l1 = tr + det;
  const double l2 = std::max(0.0, tr - det);
  e.rx = 2.0 * std::sqrt(std::max(0.0, l1));
  e.ry = 2.0 * std::sqrt(l2);
  if (std::abs(sxy) > 1e-300) {
    e.angle_rad = std::atan2(l1 - sxx, sxy);
  } else {
    e.angle_rad = sxx >= syy ? 0.0 : 1.5707963267948966;
  }
  return e;
}

SaliencyMap saliency(const ModelParams& model, const Tensor& image) {
  return saliency_of(
      [&model](Tape& tape, NodeId x) {
        const EncoderNodes enc = stage_encoder(tape, model.encoder, false);
        const ClassifierNodes cls =
            stage_classifier(tape, model.classifier, false);
        return classifier_score(tape, cls, encoder_forward(tape, enc, x));
      },
      image);
}

SaliencyMap saliency_of(const std::function<NodeId(Tape&, NodeId)>& score,
                        const Tensor& image) {
  require(image.rank() == 4 && image.dim(0) == 1 && image.dim(1) == 1,
          ErrorKind::kArgument, "saliency expects a single (1,1,S,S) image");
  Tape tape;
  const NodeId x = tape.leaf(image, true);
  const NodeId s = score(tape, x);
  require(tape.value(s).numel() == 1, ErrorKind::kArgument,
          "saliency scorer must be scalar");
  tape.backward(s);
  const Tensor& g = tape.grad(x);
  SaliencyMap map;
  map.image_size = static_cast<int>(image.dim(2));
  map.values.resize(static_cast<size_t>(g.numel()));
  double maxv = 0.0;
  for (int64_t i = 0; i < g.numel(); ++i) {
    const double v = std::abs(g[i]);
    map.values[static_cast<size_t>(i)] = v;
    maxv = std::max(maxv, v);
  }
  if (maxv == 0.0) {
    map.all_zero = true;
    return map;
  }
  for (double& v : map.values) v /= maxv;
  return map;
}

}  // namespace oodlab
