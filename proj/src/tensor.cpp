#include "mtl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mtl {

namespace {

thread_local Tape* g_active_tape = nullptr;

std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw DimensionError("negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

bool is_scalar_like(const Tensor& t) { return t.numel() == 1 && t.rank() <= 1; }

Tensor make_result(std::vector<int> shape, std::vector<double> values,
                   bool requires_grad) {
  auto d = std::make_shared<TensorData>();
  d->shape = std::move(shape);
  d->values = std::move(values);
  d->requires_grad = requires_grad;
  return Tensor(std::move(d));
}

// Records the backward step if a tape is active and the result needs grads.
void record(const Tensor& out, std::function<void()> step) {
  Tape* t = g_active_tape;
  if (t != nullptr && out.requires_grad()) t->record(std::move(step));
}

}  // namespace

Tensor Tensor::leaf(std::vector<int> shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size())
    throw DimensionError("leaf: shape " + shape_str(shape) + " expects " +
                         std::to_string(shape_numel(shape)) + " values, got " +
                         std::to_string(values.size()));
  return make_result(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return make_result(std::move(shape), std::vector<double>(n, 0.0),
                     requires_grad);
}

Tensor Tensor::filled(std::vector<int> shape, double v, bool requires_grad) {
  std::size_t n = shape_numel(shape);
  return make_result(std::move(shape), std::vector<double>(n, v),
                     requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return make_result({1}, {v}, requires_grad);
}

double Tensor::item() const {
  if (numel() != 1) throw ContractError("item: tensor is not scalar");
  return d_->values[0];
}

bool Tensor::all_finite() const {
  for (double v : d_->values)
    if (!std::isfinite(v)) return false;
  return true;
}

Tape::Tape() = default;
Tape::~Tape() = default;

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw ContractError("backward: loss must be scalar, shape is " +
                        shape_str(loss.shape()));
  if (steps_.empty()) throw ContractError("backward: tape is empty");
  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

Tape* active_tape() { return g_active_tape; }

TapeScope::TapeScope(Tape& t) : prev_(g_active_tape) { g_active_tape = &t; }
TapeScope::~TapeScope() { g_active_tape = prev_; }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw DimensionError("matmul: expects 2-D operands, got " +
                         shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const int m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
  if (k != k2)
    throw DimensionError("matmul: inner dimensions disagree: " +
                         shape_str(a.shape()) + " x " + shape_str(b.shape()));
  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv + p * n;
      double* orow = out.data() + i * n;
      for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  Tensor y = make_result({m, n}, std::move(out),
                         a.requires_grad() || b.requires_grad());
  record(y, [ad = a.ptr(), bd = b.ptr(), yd = y.ptr(), m, k, n]() {
    const double* g = yd->grad.data();
    if (ad->requires_grad) {
      ad->ensure_grad();
      double* ga = ad->grad.data();
      const double* bv = bd->values.data();
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          double s = 0.0;
          const double* grow = g + i * n;
          const double* brow = bv + p * n;
          for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
          ga[i * k + p] += s;
        }
    }
    if (bd->requires_grad) {
      bd->ensure_grad();
      double* gb = bd->grad.data();
      const double* av = ad->values.data();
      for (int p = 0; p < k; ++p)
        for (int i = 0; i < m; ++i) {
          const double aip = av[i * k + p];
          if (aip == 0.0) continue;
          const double* grow = g + i * n;
          double* gbrow = gb + p * n;
          for (int j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
        }
    }
  });
  return y;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  if (w.rank() != 2 || x.rank() != 1)
    throw DimensionError("matvec: expects [m,k] and [k], got " +
                         shape_str(w.shape()) + " x " + shape_str(x.shape()));
  const int m = w.dim(0), k = w.dim(1);
  if (x.dim(0) != k)
    throw DimensionError("matvec: inner dimensions disagree: " +
                         shape_str(w.shape()) + " x " + shape_str(x.shape()));
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  const double* wv = w.values().data();
  const double* xv = x.values().data();
  for (int i = 0; i < m; ++i) {
    const double* wrow = wv + i * k;
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += wrow[j] * xv[j];
    out[static_cast<std::size_t>(i)] = s;
  }
  Tensor y = make_result({m}, std::move(out),
                         w.requires_grad() || x.requires_grad());
  record(y, [wd = w.ptr(), xd = x.ptr(), yd = y.ptr(), m, k]() {
    const double* g = yd->grad.data();
    if (wd->requires_grad) {
      wd->ensure_grad();
      double* gw = wd->grad.data();
      const double* xv = xd->values.data();
      for (int i = 0; i < m; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        double* grow = gw + i * k;
        for (int j = 0; j < k; ++j) grow[j] += gi * xv[j];
      }
    }
    if (xd->requires_grad) {
      xd->ensure_grad();
      double* gx = xd->grad.data();
      const double* wv = wd->values.data();
      for (int i = 0; i < m; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const double* wrow = wv + i * k;
        for (int j = 0; j < k; ++j) gx[j] += gi * wrow[j];
      }
    }
  });
  return y;
}

namespace {

enum class BinOp { kAdd, kSub, kMul };

Tensor binary_elementwise(BinOp op, const Tensor& a, const Tensor& b) {
  const bool a_scalar = is_scalar_like(a), b_scalar = is_scalar_like(b);
  if (a.shape() != b.shape() && !a_scalar && !b_scalar)
    throw DimensionError("elementwise: shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  const Tensor& big = (a_scalar && !b_scalar) ? b : a;
  const std::size_t n = big.numel();
  std::vector<double> out(n);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  const bool broad_a = a_scalar && !b_scalar, broad_b = b_scalar && !a_scalar;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = broad_a ? av[0] : av[i];
    const double y = broad_b ? bv[0] : bv[i];
    out[i] = op == BinOp::kAdd ? x + y : op == BinOp::kSub ? x - y : x * y;
  }
  Tensor r = make_result(big.shape(), std::move(out),
                         a.requires_grad() || b.requires_grad());
  record(r, [op, ad = a.ptr(), bd = b.ptr(), rd = r.ptr(), broad_a, broad_b,
             n]() {
    const double* g = rd->grad.data();
    if (ad->requires_grad) {
      ad->ensure_grad();
      double* ga = ad->grad.data();
      if (op == BinOp::kMul) {
        const double* bv = bd->values.data();
        if (broad_a) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[i] * bv[i];
          ga[0] += s;
        } else if (broad_b) {
          const double bs = bv[0];
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * bs;
        } else {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * bv[i];
        }
      } else {
        if (broad_a) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[i];
          ga[0] += s;
        } else {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        }
      }
    }
    if (bd->requires_grad) {
      bd->ensure_grad();
      double* gb = bd->grad.data();
      const double sign = op == BinOp::kSub ? -1.0 : 1.0;
      if (op == BinOp::kMul) {
        const double* av = ad->values.data();
        if (broad_b) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[i] * av[i];
          gb[0] += s;
        } else if (broad_a) {
          const double as = av[0];
          for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * as;
        } else {
          for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * av[i];
        }
      } else {
        if (broad_b) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += g[i];
          gb[0] += sign * s;
        } else {
          for (std::size_t i = 0; i < n; ++i) gb[i] += sign * g[i];
        }
      }
    }
  });
  return r;
}

template <typename Fwd, typename Bwd>
Tensor unary_elementwise(const Tensor& x, Fwd fwd, Bwd bwd) {
  const std::size_t n = x.numel();
  std::vector<double> out(n);
  const double* xv = x.values().data();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(xv[i]);
  Tensor y = make_result(x.shape(), std::move(out), x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), bwd, n]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    const double* xv = xd->values.data();
    const double* yv = yd->values.data();
    double* gx = xd->grad.data();
    for (std::size_t i = 0; i < n; ++i) gx[i] += g[i] * bwd(xv[i], yv[i]);
  });
  return y;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise(BinOp::kAdd, a, b);
}
Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise(BinOp::kSub, a, b);
}
Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise(BinOp::kMul, a, b);
}

Tensor sigmoid(const Tensor& x) {
  return unary_elementwise(
      x,
      [](double v) {
        // split on sign to avoid overflow in exp
        return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                        : std::exp(v) / (1.0 + std::exp(v));
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary_elementwise(x, [](double v) { return std::tanh(v); },
                           [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& x) {
  return unary_elementwise(x, [](double v) { return std::exp(v); },
                           [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.values())
    if (v <= 0.0) throw DomainError("log: non-positive input");
  return unary_elementwise(x, [](double v) { return std::log(v); },
                           [](double v, double) { return 1.0 / v; });
}

Tensor negate(const Tensor& x) {
  return unary_elementwise(x, [](double v) { return -v; },
                           [](double, double) { return -1.0; });
}

Tensor abs(const Tensor& x) {
  return unary_elementwise(
      x, [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

namespace {

void softmax_values(const double* x, double* y, int n) {
  double mx = x[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    y[i] = std::exp(x[i] - mx);
    z += y[i];
  }
  for (int i = 0; i < n; ++i) y[i] /= z;
}

}  // namespace

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 1 || logits.dim(0) < 1)
    throw DimensionError("softmax: expects nonempty 1-D input");
  const int n = logits.dim(0);
  std::vector<double> out(static_cast<std::size_t>(n));
  softmax_values(logits.values().data(), out.data(), n);
  Tensor y = make_result({n}, std::move(out), logits.requires_grad());
  record(y, [xd = logits.ptr(), yd = y.ptr(), n]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    const double* yv = yd->values.data();
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += g[i] * yv[i];
    double* gx = xd->grad.data();
    for (int i = 0; i < n; ++i) gx[i] += yv[i] * (g[i] - dot);
  });
  return y;
}

Tensor log_softmax(const Tensor& logits) {
  if (logits.rank() != 1 || logits.dim(0) < 1)
    throw DimensionError("log_softmax: expects nonempty 1-D input");
  const int n = logits.dim(0);
  const double* x = logits.values().data();
  double mx = x[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(x[i] - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x[i] - lse;
  Tensor y = make_result({n}, std::move(out), logits.requires_grad());
  record(y, [xd = logits.ptr(), yd = y.ptr(), n]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    const double* yv = yd->values.data();
    double gsum = 0.0;
    for (int i = 0; i < n; ++i) gsum += g[i];
    double* gx = xd->grad.data();
    for (int i = 0; i < n; ++i) gx[i] += g[i] - std::exp(yv[i]) * gsum;
  });
  return y;
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw DimensionError("concat: no parts");
  const int rank = parts[0].rank();
  if (axis < 0 || axis >= rank) throw DimensionError("concat: bad axis");
  for (const Tensor& p : parts) {
    if (p.rank() != rank) throw DimensionError("concat: rank mismatch");
    for (int d = 0; d < rank; ++d)
      if (d != axis && p.dim(d) != parts[0].dim(d))
        throw DimensionError("concat: incompatible shapes " +
                             shape_str(p.shape()) + " vs " +
                             shape_str(parts[0].shape()));
  }
  if (rank > 2) throw DimensionError("concat: rank > 2 unsupported");

  std::vector<int> out_shape = parts[0].shape();
  int total = 0;
  for (const Tensor& p : parts) total += p.dim(axis);
  out_shape[static_cast<std::size_t>(axis)] = total;

  bool rg = false;
  for (const Tensor& p : parts) rg = rg || p.requires_grad();

  std::vector<double> out(shape_numel(out_shape));
  // outer = rows kept fixed across the axis, span = contiguous run per part
  const int outer = (rank == 2 && axis == 1) ? out_shape[0] : 1;
  const int out_stride = (rank == 2 && axis == 1) ? out_shape[1] : 0;
  {
    int off = 0;
    for (const Tensor& p : parts) {
      if (rank == 1 || axis == 0) {
        std::copy(p.values().begin(), p.values().end(), out.begin() + off);
        off += static_cast<int>(p.numel());
      } else {
        const int span = p.dim(1);
        for (int r = 0; r < outer; ++r)
          std::copy(p.values().begin() + r * span,
                    p.values().begin() + (r + 1) * span,
                    out.begin() + r * out_stride + off);
        off += span;
      }
    }
  }
  Tensor y = make_result(std::move(out_shape), std::move(out), rg);
  std::vector<std::shared_ptr<TensorData>> pd;
  pd.reserve(parts.size());
  for (const Tensor& p : parts) pd.push_back(p.ptr());
  record(y, [pd = std::move(pd), yd = y.ptr(), rank, axis, outer,
             out_stride]() {
    const double* g = yd->grad.data();
    int off = 0;
    for (const auto& p : pd) {
      const int len = (rank == 1 || axis == 0)
                          ? static_cast<int>(p->numel())
                          : p->shape[1];
      if (p->requires_grad) {
        p->ensure_grad();
        double* gp = p->grad.data();
        if (rank == 1 || axis == 0) {
          for (int i = 0; i < len; ++i) gp[i] += g[off + i];
        } else {
          for (int r = 0; r < outer; ++r)
            for (int i = 0; i < len; ++i)
              gp[r * len + i] += g[r * out_stride + off + i];
        }
      }
      off += len;
    }
  });
  return y;
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw DimensionError("stack_rows: no rows");
  const int d = rows[0].dim(0);
  bool rg = false;
  for (const Tensor& r : rows) {
    if (r.rank() != 1 || r.dim(0) != d)
      throw DimensionError("stack_rows: rows must be equal-length vectors");
    rg = rg || r.requires_grad();
  }
  const int n = static_cast<int>(rows.size());
  std::vector<double> out(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    std::copy(rows[static_cast<std::size_t>(i)].values().begin(),
              rows[static_cast<std::size_t>(i)].values().end(),
              out.begin() + static_cast<std::size_t>(i) * d);
  Tensor y = make_result({n, d}, std::move(out), rg);
  std::vector<std::shared_ptr<TensorData>> rd;
  rd.reserve(rows.size());
  for (const Tensor& r : rows) rd.push_back(r.ptr());
  record(y, [rd = std::move(rd), yd = y.ptr(), d]() {
    const double* g = yd->grad.data();
    for (std::size_t i = 0; i < rd.size(); ++i) {
      if (!rd[i]->requires_grad) continue;
      rd[i]->ensure_grad();
      double* gr = rd[i]->grad.data();
      for (int j = 0; j < d; ++j) gr[j] += g[i * static_cast<std::size_t>(d) + j];
    }
  });
  return y;
}

Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) throw DimensionError("transpose: expects 2-D input");
  const int m = x.dim(0), n = x.dim(1);
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  const double* xv = x.values().data();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j) * m + i] = xv[i * n + j];
  Tensor y = make_result({n, m}, std::move(out), x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), m, n]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    double* gx = xd->grad.data();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) gx[i * n + j] += g[j * m + i];
  });
  return y;
}

Tensor slice(const Tensor& x, int from, int to) {
  if (x.rank() != 1) throw DimensionError("slice: expects 1-D input");
  if (from < 0 || to > x.dim(0) || from >= to)
    throw DimensionError("slice: bad range [" + std::to_string(from) + "," +
                         std::to_string(to) + ") for length " +
                         std::to_string(x.dim(0)));
  std::vector<double> out(x.values().begin() + from, x.values().begin() + to);
  Tensor y = make_result({to - from}, std::move(out), x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), from, to]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    double* gx = xd->grad.data();
    for (int i = 0; i < to - from; ++i) gx[from + i] += g[i];
  });
  return y;
}

Tensor reduce(Reduce kind, const Tensor& x, int axis) {
  if (x.rank() < 1 || x.rank() > 2) throw DimensionError("reduce: rank must be 1 or 2");
  if (axis < 0 || axis >= x.rank()) throw DimensionError("reduce: bad axis");
  if (x.dim(axis) == 0) throw DimensionError("reduce: empty axis");

  const int len = x.dim(axis);
  // slices = number of independent reductions
  const int slices = x.rank() == 1 ? 1 : x.dim(1 - axis);
  const int slice_stride = (x.rank() == 2 && axis == 0) ? 1 : len;
  const int step = (x.rank() == 2 && axis == 0) ? x.dim(1) : 1;

  std::vector<double> out(static_cast<std::size_t>(slices));
  std::vector<int> argmax(kind == Reduce::kMax ? slices : 0, 0);
  const double* xv = x.values().data();
  for (int s = 0; s < slices; ++s) {
    const double* base = xv + s * slice_stride;
    if (kind == Reduce::kMax) {
      double best = base[0];
      int bi = 0;
      for (int i = 1; i < len; ++i) {
        const double v = base[i * step];
        if (v > best) {
          best = v;
          bi = i;
        }
      }
      out[static_cast<std::size_t>(s)] = best;
      argmax[static_cast<std::size_t>(s)] = bi;
    } else {
      double acc = 0.0;
      for (int i = 0; i < len; ++i) acc += base[i * step];
      out[static_cast<std::size_t>(s)] = kind == Reduce::kMean ? acc / len : acc;
    }
  }
  std::vector<int> out_shape =
      x.rank() == 1 ? std::vector<int>{1} : std::vector<int>{slices};
  Tensor y = make_result(std::move(out_shape), std::move(out), x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), kind, len, slices, slice_stride, step,
             argmax = std::move(argmax)]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    double* gx = xd->grad.data();
    for (int s = 0; s < slices; ++s) {
      double* base = gx + s * slice_stride;
      if (kind == Reduce::kMax) {
        base[argmax[static_cast<std::size_t>(s)] * step] += g[s];
      } else {
        const double gs = kind == Reduce::kMean ? g[s] / len : g[s];
        for (int i = 0; i < len; ++i) base[i * step] += gs;
      }
    }
  });
  return y;
}

Tensor sum_all(const Tensor& x) {
  const std::size_t n = x.numel();
  if (n == 0) throw DimensionError("sum_all: empty tensor");
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  Tensor y = make_result({1}, {acc}, x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), n]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double g = yd->grad[0];
    double* gx = xd->grad.data();
    for (std::size_t i = 0; i < n; ++i) gx[i] += g;
  });
  return y;
}

Tensor frobenius_sq(const Tensor& a) {
  if (a.rank() != 2) throw DimensionError("frobenius_sq: expects 2-D input");
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  Tensor y = make_result({1}, {acc}, a.requires_grad());
  record(y, [ad = a.ptr(), yd = y.ptr()]() {
    if (!ad->requires_grad) return;
    ad->ensure_grad();
    const double g = yd->grad[0];
    const double* av = ad->values.data();
    double* ga = ad->grad.data();
    for (std::size_t i = 0; i < ad->values.size(); ++i)
      ga[i] += 2.0 * av[i] * g;
  });
  return y;
}

Tensor grad_reverse(const Tensor& x, double lambda_adv) {
  if (lambda_adv < 0.0) throw ContractError("grad_reverse: lambda_adv < 0");
  Tensor y = make_result(x.shape(), x.values(), x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), lambda_adv]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    const double* g = yd->grad.data();
    double* gx = xd->grad.data();
    for (std::size_t i = 0; i < xd->values.size(); ++i)
      gx[i] += -lambda_adv * g[i];
  });
  return y;
}

Tensor pick(const Tensor& x, int index) {
  if (x.rank() != 1) throw DimensionError("pick: expects 1-D input");
  if (index < 0 || index >= x.dim(0))
    throw IndexError("pick: index " + std::to_string(index) + " out of [0," +
                     std::to_string(x.dim(0)) + ")");
  Tensor y = make_result({1}, {x.values()[static_cast<std::size_t>(index)]},
                         x.requires_grad());
  record(y, [xd = x.ptr(), yd = y.ptr(), index]() {
    if (!xd->requires_grad) return;
    xd->ensure_grad();
    xd->grad[static_cast<std::size_t>(index)] += yd->grad[0];
  });
  return y;
}

Tensor take_row(const Tensor& m, int row) {
  if (m.rank() != 2) throw DimensionError("take_row: expects 2-D input");
  if (row < 0 || row >= m.dim(0))
    throw IndexError("take_row: row " + std::to_string(row) + " out of [0," +
                     std::to_string(m.dim(0)) + ")");
  const int c = m.dim(1);
  std::vector<double> out(m.values().begin() + static_cast<std::size_t>(row) * c,
                          m.values().begin() + static_cast<std::size_t>(row + 1) * c);
  Tensor y = make_result({c}, std::move(out), m.requires_grad());
  record(y, [md = m.ptr(), yd = y.ptr(), row, c]() {
    if (!md->requires_grad) return;
    md->ensure_grad();
    const double* g = yd->grad.data();
    double* gm = md->grad.data() + static_cast<std::size_t>(row) * c;
    for (int j = 0; j < c; ++j) gm[j] += g[j];
  });
  return y;
}

void fill_uniform(Tensor& t, double lo, double hi, RngStream& rng) {
  for (double& v : t.values()) v = rng.uniform(lo, hi);
}

void fill_normal(Tensor& t, RngStream& rng) {
  for (double& v : t.values()) v = rng.normal();
}

}  // namespace mtl
