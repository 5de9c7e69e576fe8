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

#include "core/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace oodlab {

namespace {

void check_rank(const Tensor& t, int64_t rank, const char* op) {
  require(t.rank() == rank, ErrorKind::kArgument,
          std::string(op) + ": expected rank " + std::to_string(rank) +
              ", got shape " + Tensor::shape_str(t.shape()));
}

}  // namespace

size_t Tape::check(NodeId id) const {
  require(id >= 0 && static_cast<size_t>(id) < nodes_.size(),
          ErrorKind::kArgument, "invalid tape node id");
  return static_cast<size_t>(id);
}

NodeId Tape::leaf(Tensor value, bool requires_grad) {
  value.ensure_finite("leaf");
  nodes_.push_back(Node{"leaf", std::move(value), Tensor{}, {}, requires_grad,
                        BackwardFn{}});
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::append(const char* op, Tensor value, std::vector<NodeId> inputs,
                    BackwardFn backward) {
  value.ensure_finite(op);
  bool requires_grad = false;
  for (NodeId in : inputs) requires_grad = requires_grad || needs_grad(in);
  nodes_.push_back(Node{op, std::move(value), Tensor{},
                        std::move(inputs), requires_grad,
                        std::move(backward)});
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tensor& Tape::grad_buffer(NodeId id) {
  Node& n = nodes_[check(id)];
  if (n.grad.numel() == 0 && n.value.numel() > 0) {
    n.grad = Tensor::zeros(n.value.shape());
  }
  return n.grad;
}

void Tape::backward(NodeId loss) {
  const Tensor& lv = value(loss);
  require(lv.numel() == 1, ErrorKind::kArgument,
          "backward target must be scalar, got shape " +
              Tensor::shape_str(lv.shape()));
  grad_buffer(loss)[0] = 1.0;
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad || !n.backward) continue;
    if (n.grad.numel() == 0) continue;  // no downstream use
    n.backward(*this, id);
  }
}

// ---------------------------------------------------------------------------

NodeId add(Tape& t, NodeId a, NodeId b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require(av.same_shape(bv), ErrorKind::kArgument,
          "add: shape mismatch " + Tensor::shape_str(av.shape()) + " vs " +
              Tensor::shape_str(bv.shape()));
  Tensor out(av.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = av[i] + bv[i];
  return t.append("add", std::move(out), {a, b}, [a, b](Tape& tp, NodeId self) {
    const Tensor& g = tp.grad_buffer(self);
    for (NodeId in : {a, b}) {
      if (!tp.needs_grad(in)) continue;
      Tensor& gi = tp.grad_buffer(in);
      for (int64_t i = 0; i < g.numel(); ++i) gi[i] += g[i];
    }
  });
}

NodeId add_bias(Tape& t, NodeId x, NodeId bias) {
  const Tensor& xv = t.value(x);
  const Tensor& bv = t.value(bias);
  check_rank(bv, 1, "add_bias");
  Tensor out(xv.shape());
  int64_t channels, inner;
  if (xv.rank() == 2) {
    channels = xv.dim(1);
    inner = 1;
  } else if (xv.rank() == 4) {
    channels = xv.dim(1);
    inner = xv.dim(2) * xv.dim(3);
  } else {
    fail(ErrorKind::kArgument, "add_bias: input must be rank 2 or 4");
  }
  require(bv.dim(0) == channels, ErrorKind::kArgument,
          "add_bias: bias length does not match channel count");
  const int64_t outer = xv.numel() / (channels * inner);
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t c = 0; c < channels; ++c) {
      const double b = bv[c];
      double* dst = out.data() + (o * channels + c) * inner;
      const double* src = xv.data() + (o * channels + c) * inner;
      for (int64_t i = 0; i < inner; ++i) dst[i] = src[i] + b;
    }
  }
  return t.append(
      "add_bias", std::move(out), {x, bias},
      [x, bias, outer, channels, inner](Tape& tp, NodeId self) {
        const Tensor& g = tp.grad_buffer(self);
        if (tp.needs_grad(x)) {
          Tensor& gx = tp.grad_buffer(x);
          for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i];
        }
        if (tp.needs_grad(bias)) {
          Tensor& gb = tp.grad_buffer(bias);
          for (int64_t o = 0; o < outer; ++o) {
            for (int64_t c = 0; c < channels; ++c) {
              const double* src = g.data() + (o * channels + c) * inner;
              double acc = 0.0;
              for (int64_t i = 0; i < inner; ++i) acc += src[i];
              gb[c] += acc;
            }
          }
        }
      });
}

NodeId matmul(Tape& t, NodeId a, NodeId b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  check_rank(av, 2, "matmul");
  check_rank(bv, 2, "matmul");
  require(av.dim(1) == bv.dim(0), ErrorKind::kArgument,
          "matmul: inner dimensions differ, " + Tensor::shape_str(av.shape()) +
              " x " + Tensor::shape_str(bv.shape()));
  const int64_t n = av.dim(0), k = av.dim(1), m = bv.dim(1);
  Tensor out({n, m});
  for (int64_t i = 0; i < n; ++i) {
    double* yr = out.data() + i * m;
    const double* ar = av.data() + i * k;
    for (int64_t kk = 0; kk < k; ++kk) {
      const double aval = ar[kk];
      const double* br = bv.data() + kk * m;
      for (int64_t j = 0; j < m; ++j) yr[j] += aval * br[j];
    }
  }
  return t.append(
      "matmul", std::move(out), {a, b}, [a, b, n, k, m](Tape& tp, NodeId self) {
        const Tensor& g = tp.grad_buffer(self);
        const Tensor& av = tp.value(a);
        const Tensor& bv = tp.value(b);
        if (tp.needs_grad(a)) {
          Tensor& ga = tp.grad_buffer(a);
          for (int64_t i = 0; i < n; ++i) {
            const double* gr = g.data() + i * m;
            double* gar = ga.data() + i * k;
            for (int64_t kk = 0; kk < k; ++kk) {
              const double* br = bv.data() + kk * m;
              double acc = 0.0;
              for (int64_t j = 0; j < m; ++j) acc += gr[j] * br[j];
              gar[kk] += acc;
            }
          }
        }
        if (tp.needs_grad(b)) {
          Tensor& gb = tp.grad_buffer(b);
          for (int64_t i = 0; i < n; ++i) {
            const double* ar = av.data() + i * k;
            const double* gr = g.data() + i * m;
            for (int64_t kk = 0; kk < k; ++kk) {
              const double aval = ar[kk];
              double* gbr = gb.data() + kk * m;
              for (int64_t j = 0; j < m; ++j) gbr[j] += aval * gr[j];
            }
          }
        }
      });
}

NodeId conv2d(Tape& t, NodeId x, NodeId w) {
  const Tensor& xv = t.value(x);
  const Tensor& wv = t.value(w);
  check_rank(xv, 4, "conv2d");
  check_rank(wv, 4, "conv2d");
  require(xv.dim(1) == wv.dim(1), ErrorKind::kArgument,
          "conv2d: channel mismatch");
  const int64_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), iw = xv.dim(3);
  const int64_t f = wv.dim(0), kh = wv.dim(2), kw = wv.dim(3);
  require(kh >= 1 && kw >= 1 && kh <= h && kw <= iw, ErrorKind::kArgument,
          "conv2d: kernel larger than input");
  const int64_t oh = h - kh + 1, ow = iw - kw + 1;
  Tensor out({n, f, oh, ow});
  for (int64_t in = 0; in < n; ++in) {
    for (int64_t inf = 0; inf < f; ++inf) {
      double* yplane = out.data() + ((in * f + inf) * oh) * ow;
      for (int64_t ic = 0; ic < c; ++ic) {
        const double* xplane = xv.data() + ((in * c + ic) * h) * iw;
        const double* wplane = wv.data() + ((inf * c + ic) * kh) * kw;
        for (int64_t r = 0; r < kh; ++r) {
          for (int64_t s = 0; s < kw; ++s) {
            const double wval = wplane[r * kw + s];
            for (int64_t i = 0; i < oh; ++i) {
              const double* xr = xplane + (i + r) * iw + s;
              double* yr = yplane + i * ow;
              for (int64_t j = 0; j < ow; ++j) yr[j] += wval * xr[j];
            }
          }
        }
      }
    }
  }
  return t.append(
      "conv2d", std::move(out), {x, w},
      [x, w, n, c, h, iw, f, kh, kw, oh, ow](Tape& tp, NodeId self) {
        const Tensor& g = tp.grad_buffer(self);
        const Tensor& xv = tp.value(x);
        const Tensor& wv = tp.value(w);
        if (tp.needs_grad(x)) {
          Tensor& gx = tp.grad_buffer(x);
          for (int64_t in = 0; in < n; ++in) {
            for (int64_t inf = 0; inf < f; ++inf) {
              const double* gplane = g.data() + ((in * f + inf) * oh) * ow;
              for (int64_t ic = 0; ic < c; ++ic) {
                double* gxplane = gx.data() + ((in * c + ic) * h) * iw;
                const double* wplane = wv.data() + ((inf * c + ic) * kh) * kw;
                for (int64_t r = 0; r < kh; ++r) {
                  for (int64_t s = 0; s < kw; ++s) {
                    const double wval = wplane[r * kw + s];
                    for (int64_t i = 0; i < oh; ++i) {
                      double* gxr = gxplane + (i + r) * iw + s;
                      const double* gr = gplane + i * ow;
                      for (int64_t j = 0; j < ow; ++j) gxr[j] += wval * gr[j];
                    }
                  }
                }
              }
            }
          }
        }
        if (tp.needs_grad(w)) {
          Tensor& gw = tp.grad_buffer(w);
          for (int64_t in = 0; in < n; ++in) {
            for (int64_t inf = 0; inf < f; ++inf) {
              const double* gplane = g.data() + ((in * f + inf) * oh) * ow;
              for (int64_t ic = 0; ic < c; ++ic) {
                const double* xplane = xv.data() + ((in * c + ic) * h) * iw;
                double* gwplane = gw.data() + ((inf * c + ic) * kh) * kw;
                for (int64_t r = 0; r < kh; ++r) {
                  for (int64_t s = 0; s < kw; ++s) {
                    double acc = 0.0;
                    for (int64_t i = 0; i < oh; ++i) {
                      const double* xr = xplane + (i + r) * iw + s;
                      const double* gr = gplane + i * ow;
                      for (int64_t j = 0; j < ow; ++j) acc += xr[j] * gr[j];
                    }
                    gwplane[r * kw + s] += acc;
                  }
                }
              }
            }
          }
        }
      });
}

NodeId maxpool2x2(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  check_rank(xv, 4, "maxpool2x2");
  const int64_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  require(h % 2 == 0 && w % 2 == 0, ErrorKind::kArgument,
          "maxpool2x2: spatial dims must be even");
  const int64_t oh = h / 2, ow = w / 2;
  Tensor out({n, c, oh, ow});
  std::vector<int64_t> argmax(static_cast<size_t>(out.numel()));
  int64_t oi = 0;
  for (int64_t p = 0; p < n * c; ++p) {
    const double* plane = xv.data() + p * h * w;
    for (int64_t i = 0; i < oh; ++i) {
      for (int64_t j = 0; j < ow; ++j, ++oi) {
        // ties resolve to the first element in scan order
        int64_t best = (2 * i) * w + 2 * j;
        double bv = plane[best];
        const int64_t cand[3] = {(2 * i) * w + 2 * j + 1,
                                 (2 * i + 1) * w + 2 * j,
                                 (2 * i + 1) * w + 2 * j + 1};
        for (int64_t k : cand) {
          if (plane[k] > bv) {
            bv = plane[k];
            best = k;
          }
        }
        out[oi] = bv;
        argmax[static_cast<size_t>(oi)] = p * h * w + best;
      }
    }
  }
  return t.append("maxpool2x2", std::move(out), {x},
                  [x, argmax = std::move(argmax)](Tape& tp, NodeId self) {
                    if (!tp.needs_grad(x)) return;
                    const Tensor& g = tp.grad_buffer(self);
                    Tensor& gx = tp.grad_buffer(x);
                    for (int64_t i = 0; i < g.numel(); ++i) {
                      gx[argmax[static_cast<size_t>(i)]] += g[i];
                    }
                  });
}

NodeId avgpool2x2(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  check_rank(xv, 4, "avgpool2x2");
  const int64_t n = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  require(h % 2 == 0 && w % 2 == 0, ErrorKind::kArgument,
          "avgpool2x2: spatial dims must be even");
  const int64_t oh = h / 2, ow = w / 2;
  Tensor out({n, c, oh, ow});
  int64_t oi = 0;
  for (int64_t p = 0; p < n * c; ++p) {
    const double* plane = xv.data() + p * h * w;
    for (int64_t i = 0; i < oh; ++i) {
      for (int64_t j = 0; j < ow; ++j, ++oi) {
        out[oi] = 0.25 * (plane[(2 * i) * w + 2 * j] +
                          plane[(2 * i) * w + 2 * j + 1] +
                          plane[(2 * i + 1) * w + 2 * j] +
                          plane[(2 * i + 1) * w + 2 * j + 1]);
      }
    }
  }
  return t.append(
      "avgpool2x2", std::move(out), {x},
      [x, n, c, h, w, oh, ow](Tape& tp, NodeId self) {
        if (!tp.needs_grad(x)) return;
        const Tensor& g = tp.grad_buffer(self);
        Tensor& gx = tp.grad_buffer(x);
        int64_t oi = 0;
        for (int64_t p = 0; p < n * c; ++p) {
          double* plane = gx.data() + p * h * w;
          for (int64_t i = 0; i < oh; ++i) {
            for (int64_t j = 0; j < ow; ++j, ++oi) {
              const double gv = 0.25 * g[oi];
              plane[(2 * i) * w + 2 * j] += gv;
              plane[(2 * i) * w + 2 * j + 1] += gv;
              plane[(2 * i + 1) * w + 2 * j] += gv;
              plane[(2 * i + 1) * w + 2 * j + 1] += gv;
            }
          }
        }
      });
}

NodeId tanh_op(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  Tensor out(xv.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(xv[i]);
  return t.append("tanh", std::move(out), {x}, [x](Tape& tp, NodeId self) {
    if (!tp.needs_grad(x)) return;
    const Tensor& g = tp.grad_buffer(self);
    const Tensor& y = tp.value(self);
    Tensor& gx = tp.grad_buffer(x);
    for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

NodeId sigmoid_op(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  Tensor out(xv.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-xv[i]));
  }
  return t.append("sigmoid", std::move(out), {x}, [x](Tape& tp, NodeId self) {
    if (!tp.needs_grad(x)) return;
    const Tensor& g = tp.grad_buffer(self);
    const Tensor& y = tp.value(self);
    Tensor& gx = tp.grad_buffer(x);
    for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

NodeId scale(Tape& t, NodeId x, double factor) {
  const Tensor& xv = t.value(x);
  Tensor out(xv.shape());
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = xv[i] * factor;
  return t.append("scale", std::move(out), {x},
                  [x, factor](Tape& tp, NodeId self) {
                    if (!tp.needs_grad(x)) return;
                    const Tensor& g = tp.grad_buffer(self);
                    Tensor& gx = tp.grad_buffer(x);
                    for (int64_t i = 0; i < g.numel(); ++i) {
                      gx[i] += g[i] * factor;
                    }
                  });
}

NodeId flatten(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  require(xv.rank() >= 1, ErrorKind::kArgument, "flatten: rank 0 input");
  const int64_t n = xv.dim(0);
  const int64_t k = n > 0 ? xv.numel() / n : 0;
  Tensor out = xv.reshaped({n, k});
  return t.append("flatten", std::move(out), {x}, [x](Tape& tp, NodeId self) {
    if (!tp.needs_grad(x)) return;
    const Tensor& g = tp.grad_buffer(self);
    Tensor& gx = tp.grad_buffer(x);
    for (int64_t i = 0; i < g.numel(); ++i) gx[i] += g[i];
  });
}

NodeId squared_euclidean(Tape& t, NodeId a, NodeId b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  check_rank(av, 2, "squared_euclidean");
  require(av.same_shape(bv), ErrorKind::kArgument,
          "squared_euclidean: shape mismatch");
  const int64_t n = av.dim(0), d = av.dim(1);
  Tensor out({n});
  for (int64_t i = 0; i < n; ++i) {
    const double* ar = av.data() + i * d;
    const double* br = bv.data() + i * d;
    double acc = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      const double diff = ar[j] - br[j];
      acc += diff * diff;
    }
    out[i] = acc;
  }
  return t.append(
      "squared_euclidean", std::move(out), {a, b},
      [a, b, n, d](Tape& tp, NodeId self) {
        const Tensor& g = tp.grad_buffer(self);
        const Tensor& av = tp.value(a);
        const Tensor& bv = tp.value(b);
        for (int64_t i = 0; i < n; ++i) {
          const double gi = 2.0 * g[i];
          const double* ar = av.data() + i * d;
          const double* br = bv.data() + i * d;
          if (tp.needs_grad(a)) {
            double* gr = tp.grad_buffer(a).data() + i * d;
            for (int64_t j = 0; j < d; ++j) gr[j] += gi * (ar[j] - br[j]);
          }
          if (tp.needs_grad(b)) {
            double* gr = tp.grad_buffer(b).data() + i * d;
            for (int64_t j = 0; j < d; ++j) gr[j] -= gi * (ar[j] - br[j]);
          }
        }
      });
}

NodeId sum(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  double acc = 0.0;
  for (int64_t i = 0; i < xv.numel(); ++i) acc += xv[i];
  return t.append("sum", Tensor::scalar(acc), {x}, [x](Tape& tp, NodeId self) {
    if (!tp.needs_grad(x)) return;
    const double g = tp.grad_buffer(self)[0];
    Tensor& gx = tp.grad_buffer(x);
    for (int64_t i = 0; i < gx.numel(); ++i) gx[i] += g;
  });
}

NodeId mean(Tape& t, NodeId x) {
  const Tensor& xv = t.value(x);
  require(xv.numel() > 0, ErrorKind::kArgument, "mean: empty tensor");
  double acc = 0.0;
  for (int64_t i = 0; i < xv.numel(); ++i) acc += xv[i];
  const double inv = 1.0 / static_cast<double>(xv.numel());
  return t.append("mean", Tensor::scalar(acc * inv), {x},
                  [x, inv](Tape& tp, NodeId self) {
                    if (!tp.needs_grad(x)) return;
                    const double g = tp.grad_buffer(self)[0] * inv;
                    Tensor& gx = tp.grad_buffer(x);
                    for (int64_t i = 0; i < gx.numel(); ++i) gx[i] += g;
                  });
}

NodeId bce(Tape& t, NodeId p, Tensor targets) {
  const Tensor& pv = t.value(p);
  require(pv.same_shape(targets), ErrorKind::kArgument,
          "bce: prediction/target shape mismatch");
  Tensor out(pv.shape());
  for (int64_t i = 0; i < out.numel(); ++i) {
    const double y = targets[i];
    const double ph = std::clamp(pv[i], kProbClamp, 1.0 - kProbClamp);
    out[i] = -y * std::log(ph) - (1.0 - y) * std::log(1.0 - ph);
  }
  return t.append(
      "bce", std::move(out), {p},
      [p, targets = std::move(targets)](Tape& tp, NodeId self) {
        if (!tp.needs_grad(p)) return;
        const Tensor& g = tp.grad_buffer(self);
        const Tensor& pv = tp.value(p);
        Tensor& gp = tp.grad_buffer(p);
        for (int64_t i = 0; i < g.numel(); ++i) {
          // zero slope once the clamp is active
          if (pv[i] <= kProbClamp || pv[i] >= 1.0 - kProbClamp) continue;
          const double y = targets[i];
          gp[i] += g[i] * (-y / pv[i] + (1.0 - y) / (1.0 - pv[i]));
        }
      });
}

NodeId contrastive_mean(Tape& t, NodeId embeddings,
                        std::vector<PairSample> pairs, double margin) {
  const Tensor& ev = t.value(embeddings);
  check_rank(ev, 2, "contrastive_mean");
  require(!pairs.empty(), ErrorKind::kArgument,
          "contrastive_mean: empty pair list");
  require(margin > 0.0, ErrorKind::kArgument,
          "contrastive_mean: margin must be positive");
  const int64_t n = ev.dim(0), d = ev.dim(1);
  std::vector<double> dist(pairs.size());
  double acc = 0.0;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const PairSample& pr = pairs[k];
    require(pr.first >= 0 && pr.first < n && pr.second >= 0 && pr.second < n,
            ErrorKind::kArgument, "contrastive_mean: pair index out of range");
    const double* ea = ev.data() + pr.first * d;
    const double* eb = ev.data() + pr.second * d;
    double sq = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      const double diff = ea[j] - eb[j];
      sq += diff * diff;
    }
    const double dd = std::sqrt(sq);
    dist[k] = dd;
    if (pr.same_class) {
      acc += sq;
    } else {
      const double h = std::max(0.0, margin - dd);
      acc += h * h;
    }
  }
  const double inv = 1.0 / static_cast<double>(pairs.size());
  return t.append(
      "contrastive_mean", Tensor::scalar(acc * inv), {embeddings},
      [embeddings, pairs = std::move(pairs), dist = std::move(dist), margin,
       inv, d](Tape& tp, NodeId self) {
        if (!tp.needs_grad(embeddings)) return;
        const double g = tp.grad_buffer(self)[0] * inv;
        const Tensor& ev = tp.value(embeddings);
        Tensor& ge = tp.grad_buffer(embeddings);
        for (size_t k = 0; k < pairs.size(); ++k) {
          const PairSample& pr = pairs[k];
          const double* ea = ev.data() + pr.first * d;
          const double* eb = ev.data() + pr.second * d;
          double* ga = ge.data() + pr.first * d;
          double* gb = ge.data() + pr.second * d;
          if (pr.same_class) {
            for (int64_t j = 0; j < d; ++j) {
              const double v = 2.0 * g * (ea[j] - eb[j]);
              ga[j] += v;
              gb[j] -= v;
            }
          } else {
            const double dd = dist[k];
            if (dd >= margin || dd <= 0.0) continue;  // dead hinge
            const double coef = -2.0 * g * (margin - dd) / dd;
            for (int64_t j = 0; j < d; ++j) {
              const double v = coef * (ea[j] - eb[j]);
              ga[j] += v;
              gb[j] -= v;
            }
          }
        }
      });
}

}  // namespace oodlab
