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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef OODLAB_HAVE_EIGEN
#include <Eigen/Dense>
#endif

#include <cmath>
#include <vector>

#include "core/analysis.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace oodlab;
using namespace oodlab::testutil;

namespace {

// Hand-enumerated confusion counting, independent of the implementation.
struct OracleCounts {
  int tp = 0, tn = 0, fp = 0, fn = 0;
};

OracleCounts enumerate_confusion(const std::vector<double>& probs,
                                 const std::vector<uint8_t>& labels,
                                 double thr) {
  OracleCounts c;
  for (size_t i = 0; i < probs.size(); ++i) {
    const bool pred_malignant = probs[i] >= thr;
    if (labels[i] == 1) {
      pred_malignant ? ++c.tp : ++c.fn;
    } else {
      pred_malignant ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("confusion metrics closed forms") {
  SUBCASE("all correct") {
    const MetricsReport r =
        confusion_metrics({0.9, 0.1, 0.8, 0.2}, {1, 0, 1, 0});
    CHECK(r.acc == 1.0);
    CHECK(r.se == 1.0);
    CHECK(r.sp == 1.0);
  }
  SUBCASE("balanced set, everything predicted malignant") {
    const MetricsReport r =
        confusion_metrics({0.9, 0.9, 0.8, 0.7}, {1, 0, 1, 0});
    CHECK(r.acc == 0.5);
    CHECK(r.se == 1.0);
    CHECK(r.sp == 0.0);
  }
  SUBCASE("zero denominators report NaN, never silently 0") {
    const MetricsReport r = confusion_metrics({0.9, 0.2}, {1, 1});
    CHECK(std::isnan(r.sp));
    CHECK(r.se == 0.5);
  }
  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(confusion_metrics({0.5}, {1, 0}), Error);
  }
}

TEST_CASE("confusion metrics equal hand-enumerated tables on 50 random instances") {
  Rng rng(6001);
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<double> probs(20);
    std::vector<uint8_t> labels(20);
    for (int i = 0; i < 20; ++i) {
      probs[static_cast<size_t>(i)] = rng.uniform();
      labels[static_cast<size_t>(i)] = rng.uniform() < 0.5 ? 0 : 1;
    }
    const MetricsReport r = confusion_metrics(probs, labels);
    const OracleCounts c = enumerate_confusion(probs, labels, 0.5);
    CHECK(r.tp == c.tp);
    CHECK(r.tn == c.tn);
    CHECK(r.fp == c.fp);
    CHECK(r.fn == c.fn);
    CHECK(r.acc == static_cast<double>(c.tp + c.tn) / 20.0);
    if (c.tp + c.fn > 0) {
      CHECK(r.se == static_cast<double>(c.tp) / (c.tp + c.fn));
    }
    if (c.tn + c.fp > 0) {
      CHECK(r.sp == static_cast<double>(c.tn) / (c.tn + c.fp));
    }
    // identity: acc = (se*P + sp*N) / (P+N)
    if (std::isfinite(r.se) && std::isfinite(r.sp)) {
      const double p = static_cast<double>(c.tp + c.fn);
      const double n = static_cast<double>(c.tn + c.fp);
      CHECK(std::abs(r.acc - (r.se * p + r.sp * n) / (p + n)) < 1e-12);
    }
  }
}

TEST_CASE("extract_features is consistent with single-sample encoding") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 6, 77, DatasetRole::kTrain);
  const EncoderParams enc = EncoderParams::init(9);
  const Tensor feats = extract_features(enc, ds);
  CHECK(feats.shape() == Shape{6, kEmbeddingDim});
  for (int i = 0; i < 6; ++i) {
    std::vector<const float*> one{ds.samples[static_cast<size_t>(i)].pixels.data()};
    const Tensor e = encode(enc, batch_to_tensor(one, spec.image_size));
    for (int64_t j = 0; j < kEmbeddingDim; ++j) {
      CHECK(feats[i * kEmbeddingDim + j] == e[j]);
    }
  }
}

TEST_CASE("pca recovers the two active axes of an embedded anisotropic cloud") {
  Rng rng(6002);
  const int n = 400, d = 84;
  Tensor feats({n, d});
  const int ax0 = 10, ax1 = 42;
  for (int i = 0; i < n; ++i) {
    feats[i * d + ax0] = rng.normal(0.0, 5.0);
    feats[i * d + ax1] = rng.normal(0.0, 2.0);
  }
  const Pca pca = pca_fit(feats);
  CHECK(std::abs(pca.basis[0][ax0]) > 0.99);
  CHECK(std::abs(pca.basis[1][ax1]) > 0.99);
  CHECK(pca.explained_variance[0] >= pca.explained_variance[1]);
  // sign convention: the dominant coordinate is positive
  CHECK(pca.basis[0][ax0] > 0.0);
  CHECK(pca.basis[1][ax1] > 0.0);
}

TEST_CASE("pca on isotropic data gives equal variances") {
  Rng rng(6003);
  const int n = 3000, d = 5;
  Tensor feats({n, d});
  for (int64_t i = 0; i < feats.numel(); ++i) feats[i] = rng.normal();
  const Pca pca = pca_fit(feats);
  CHECK(std::abs(pca.explained_variance[0] - pca.explained_variance[1]) /
            pca.explained_variance[0] < 0.15);
}

TEST_CASE("pca basis is orthonormal within 1e-10") {
  Rng rng(6004);
  Tensor feats({40, 84});
  for (int64_t i = 0; i < feats.numel(); ++i) feats[i] = rng.uniform(-1, 1);
  const Pca pca = pca_fit(feats);
  double n0 = 0, n1 = 0, dot = 0;
  for (size_t j = 0; j < 84; ++j) {
    n0 += pca.basis[0][j] * pca.basis[0][j];
    n1 += pca.basis[1][j] * pca.basis[1][j];
    dot += pca.basis[0][j] * pca.basis[1][j];
  }
  CHECK(std::abs(n0 - 1.0) < 1e-10);
  CHECK(std::abs(n1 - 1.0) < 1e-10);
  CHECK(std::abs(dot) < 1e-10);
}

TEST_CASE("pca rejects degenerate inputs") {
  CHECK_THROWS_AS(pca_fit(Tensor({2, 84})), Error);  // too few samples
  // rank-1 data: all rows on one line
  Tensor feats({10, 84});
  Rng rng(6005);
  std::vector<double> dir(84);
  for (auto& v : dir) v = rng.uniform(-1, 1);
  for (int i = 0; i < 10; ++i) {
    const double t = static_cast<double>(i);
    for (int j = 0; j < 84; ++j) feats[i * 84 + j] = t * dir[static_cast<size_t>(j)];
  }
  CHECK_THROWS_AS(pca_fit(feats), Error);
}

#ifdef OODLAB_HAVE_EIGEN
TEST_CASE("pca top-2 equals the full eigendecomposition oracle") {
  Rng rng(6006);
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 10, d = 84;
    Tensor feats({n, d});
    for (int64_t i = 0; i < feats.numel(); ++i) feats[i] = rng.uniform(-1, 1);
    const Pca pca = pca_fit(feats);

    // oracle: Eigen full eigendecomposition of the sample covariance
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = feats[i * d + j];
    const Eigen::RowVectorXd mu = m.colwise().mean();
    const Eigen::MatrixXd centered = m.rowwise() - mu;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    REQUIRE(es.info() == Eigen::Success);
    std::vector<std::vector<double>> oracle(2, std::vector<double>(d));
    for (int j = 0; j < d; ++j) {
      oracle[0][static_cast<size_t>(j)] = es.eigenvectors()(j, d - 1);
      oracle[1][static_cast<size_t>(j)] = es.eigenvectors()(j, d - 2);
    }
    std::vector<std::vector<double>> mine = {
        pca.basis[0], pca.basis[1]};
    CHECK(subspace_angle(mine, oracle) < 1e-6);

    // eigenvalues agree too
    CHECK(std::abs(pca.explained_variance[0] - es.eigenvalues()(d - 1)) <
          1e-9);
    CHECK(std::abs(pca.explained_variance[1] - es.eigenvalues()(d - 2)) <
          1e-9);

    // reconstruction identity: residual variance after taking the top-2
    // components equals total variance minus their eigenvalues
    const std::vector<Point2> proj = pca_project(pca, feats);
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        const double c = feats[i * d + j] - pca.mean[static_cast<size_t>(j)];
        const double rec = proj[static_cast<size_t>(i)].x * pca.basis[0][static_cast<size_t>(j)] +
                           proj[static_cast<size_t>(i)].y * pca.basis[1][static_cast<size_t>(j)];
        resid += (c - rec) * (c - rec);
      }
    }
    resid /= static_cast<double>(n - 1);
    const double want = pca.total_variance - pca.explained_variance[0] -
                        pca.explained_variance[1];
    CHECK(std::abs(resid - want) < 1e-8);
  }
}
#endif

TEST_CASE("projection basics") {
  Rng rng(6007);
  Tensor feats({50, 84});
  for (int64_t i = 0; i < feats.numel(); ++i) feats[i] = rng.uniform(-1, 1);
  const Pca pca = pca_fit(feats);

  // projecting the training mean lands on the origin
  Tensor mean_row({1, 84});
  for (int j = 0; j < 84; ++j) mean_row[j] = pca.mean[static_cast<size_t>(j)];
  const std::vector<Point2> origin = pca_project(pca, mean_row);
  CHECK(std::abs(origin[0].x) < 1e-12);
  CHECK(std::abs(origin[0].y) < 1e-12);

  // affine: project(a+b) - project(a) does not depend on a
  Tensor a({1, 84}), b({1, 84}), a2({1, 84});
  for (int j = 0; j < 84; ++j) {
    a[j] = rng.uniform(-1, 1);
    b[j] = rng.uniform(-1, 1);
    a2[j] = rng.uniform(-1, 1);
  }
  auto plus = [](const Tensor& x, const Tensor& y) {
    Tensor out({1, 84});
    for (int j = 0; j < 84; ++j) out[j] = x[j] + y[j];
    return out;
  };
  const Point2 d1 = {pca_project(pca, plus(a, b))[0].x - pca_project(pca, a)[0].x,
                     pca_project(pca, plus(a, b))[0].y - pca_project(pca, a)[0].y};
  const Point2 d2 = {pca_project(pca, plus(a2, b))[0].x - pca_project(pca, a2)[0].x,
                     pca_project(pca, plus(a2, b))[0].y - pca_project(pca, a2)[0].y};
  CHECK(std::abs(d1.x - d2.x) < 1e-9);
  CHECK(std::abs(d1.y - d2.y) < 1e-9);
}

TEST_CASE("2-std ellipse of N(0, diag(4,1)) has semi-axes (4,2)") {
  Rng rng(6008);
  std::vector<Point2> pts(1000);
  for (auto& p : pts) {
    p.x = rng.normal(0.0, 2.0);  // variance 4
    p.y = rng.normal(0.0, 1.0);  // variance 1
  }
  const auto e = ellipse_2std(pts);
  REQUIRE(e.has_value());
  CHECK(std::abs(e->rx - 4.0) / 4.0 < 0.10);
  CHECK(std::abs(e->ry - 2.0) / 2.0 < 0.10);
  // dominant axis is x-aligned
  CHECK(std::abs(std::remainder(e->angle_rad, 3.14159265358979)) < 0.2);

  CHECK_FALSE(ellipse_2std({{0, 0}, {1, 1}}).has_value());
}

TEST_CASE("saliency of a purely linear scorer is proportional to |w|") {
  Rng rng(6009);
  const int s = 64;
  Tensor w({s * s, 1});
  for (int64_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-1, 1);
  auto scorer = [&w](Tape& t, NodeId x) {
    return matmul(t, flatten(t, x), t.leaf(w));
  };
  const Tensor img = random_tensor({1, 1, s, s}, rng, 0.0, 1.0);
  const SaliencyMap map = saliency_of(scorer, img);
  CHECK(map.image_size == s);
  CHECK_FALSE(map.all_zero);
  double wmax = 0.0;
  for (int64_t i = 0; i < w.numel(); ++i) wmax = std::max(wmax, std::abs(w[i]));
  for (int64_t i = 0; i < w.numel(); ++i) {
    CHECK(std::abs(map.values[static_cast<size_t>(i)] - std::abs(w[i]) / wmax) <
          1e-12);
  }

  // shifting every input pixel by a constant leaves the map unchanged
  Tensor shifted = img;
  for (int64_t i = 0; i < shifted.numel(); ++i) shifted[i] += 0.25;
  const SaliencyMap map2 = saliency_of(scorer, shifted);
  CHECK(map.values == map2.values);
}

TEST_CASE("saliency matches central finite differences on the real model") {
  DistributionSpec spec;
  spec.i_mal = 150;
  spec.i_ben = 150;
  const Dataset ds = generate_dataset(spec, 2, 88, DatasetRole::kTrain);
  ModelParams model{EncoderParams::init(30), ClassifierParams::init(31)};
  std::vector<const float*> one{ds.samples[0].pixels.data()};
  const Tensor img = batch_to_tensor(one, spec.image_size);
  const SaliencyMap map = saliency(model, img);
  CHECK(map.image_size == spec.image_size);
  CHECK(map.values.size() == static_cast<size_t>(spec.image_size) * spec.image_size);

  auto score_at = [&](const Tensor& x) {
    Tape t;
    const EncoderNodes enc = stage_encoder(t, model.encoder, false);
    const ClassifierNodes cls = stage_classifier(t, model.classifier, false);
    return t.value(classifier_score(t, cls,
                                    encoder_forward(t, enc, t.leaf(x))))
        .item();
  };
  // recover the normalization factor from the analytic map
  Tape t;
  const NodeId xin = t.leaf(img, true);
  const EncoderNodes enc = stage_encoder(t, model.encoder, false);
  const ClassifierNodes cls = stage_classifier(t, model.classifier, false);
  t.backward(classifier_score(t, cls, encoder_forward(t, enc, xin)));
  const Tensor& g = t.grad(xin);
  double gmax = 0.0;
  for (int64_t i = 0; i < g.numel(); ++i) gmax = std::max(gmax, std::abs(g[i]));
  REQUIRE(gmax > 0.0);

  Rng rng(6010);
  double worst = 0.0;
  for (int probe = 0; probe < 25; ++probe) {
    const int64_t i = rng.uniform_int(0, img.numel() - 1);
    const double h = 1e-5;
    Tensor xp = img, xm = img;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (score_at(xp) - score_at(xm)) / (2 * h);
    const double got = map.values[static_cast<size_t>(i)] * gmax;
    worst = std::max(worst, std::abs(got - std::abs(fd)) /
                                std::max({std::abs(fd), got, 1e-6}));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("all-zero saliency maps are flagged") {
  ModelParams model;  // zero weights everywhere -> zero input gradient
  const Tensor img({1, 1, 64, 64});
  const SaliencyMap map = saliency(model, img);
  CHECK(map.all_zero);
  for (double v : map.values) CHECK(v == 0.0);
}
