#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mtl/errors.hpp"
#include "mtl/rng.hpp"

namespace mtl {

// Dense 64-bit tensor node. Values are row-major; grad is allocated lazily
// and always matches the value buffer in size once touched.
struct TensorData {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;

  std::size_t numel() const { return values.size(); }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
};

// Lightweight handle; copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorData> d) : d_(std::move(d)) {}

  static Tensor leaf(std::vector<int> shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor filled(std::vector<int> shape, double v,
                       bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }
  const std::vector<int>& shape() const { return d_->shape; }
  int rank() const { return static_cast<int>(d_->shape.size()); }
  int dim(int i) const { return d_->shape[static_cast<std::size_t>(i)]; }
  std::size_t numel() const { return d_->numel(); }

  std::vector<double>& values() { return d_->values; }
  const std::vector<double>& values() const { return d_->values; }

  // Allocates the grad buffer on first access.
  std::vector<double>& grad() {
    d_->ensure_grad();
    return d_->grad;
  }
  const std::vector<double>& grad() const {
    d_->ensure_grad();
    return d_->grad;
  }

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool b) { d_->requires_grad = b; }
  void zero_grad() {
    if (!d_->grad.empty()) std::fill(d_->grad.begin(), d_->grad.end(), 0.0);
  }

  double item() const;
  bool all_finite() const;

  TensorData* node() const { return d_.get(); }
  const std::shared_ptr<TensorData>& ptr() const { return d_; }

 private:
  std::shared_ptr<TensorData> d_;
};

// Ordered record of one forward episode. Ops append their backward step to
// the thread's active tape; backward() replays the record in reverse.
// A tape and the tensors it references are confined to one thread.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
  // requires_grad tensor reachable on the tape. Repeated calls accumulate.
  void backward(const Tensor& loss);

  void clear() { steps_.clear(); }
  std::size_t size() const { return steps_.size(); }

  void record(std::function<void()> step) { steps_.push_back(std::move(step)); }

 private:
  std::vector<std::function<void()>> steps_;
};

// Thread-local active tape. Ops executed with no active tape compute values
// eagerly and record nothing (evaluation mode).
Tape* active_tape();

class TapeScope {
 public:
  explicit TapeScope(Tape& t);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

enum class Reduce { kMean, kMax, kSum };

// a[m,k] * b[k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);
// w[m,k] * x[k] -> [m]
Tensor matvec(const Tensor& w, const Tensor& x);

// Binary elementwise ops require equal shapes; the only broadcast allowed is
// a scalar (numel 1, rank <= 1) against a tensor.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor negate(const Tensor& x);
Tensor abs(const Tensor& x);

// 1-D, max-subtracted for stability; outputs sum to 1.
Tensor softmax(const Tensor& logits);
Tensor log_softmax(const Tensor& logits);

Tensor concat(const std::vector<Tensor>& parts, int axis = 0);
// [d] rows -> [n, d]
Tensor stack_rows(const std::vector<Tensor>& rows);
// [m,n] -> [n,m]
Tensor transpose(const Tensor& x);
// x[n] -> [to-from), half-open
Tensor slice(const Tensor& x, int from, int to);
Tensor reduce(Reduce kind, const Tensor& x, int axis);
Tensor sum_all(const Tensor& x);
// sum of squared entries of a 2-D tensor -> scalar
Tensor frobenius_sq(const Tensor& a);
// identity forward; backward passes -lambda_adv * upstream
Tensor grad_reverse(const Tensor& x, double lambda_adv);
// x[n] -> [1] at index
Tensor pick(const Tensor& x, int index);
// m[r,c] -> [c]
Tensor take_row(const Tensor& m, int row);

void fill_uniform(Tensor& t, double lo, double hi, RngStream& rng);
void fill_normal(Tensor& t, RngStream& rng);

}  // namespace mtl
