// Dense float64 tensors with reverse-mode automatic differentiation over a
// small fixed op set. A Graph is a dynamic tape rebuilt per sentence/batch;
// backward replays it in reverse, accumulating gradients into tracked inputs.
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace jnlp {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // same size as value when tracked
  bool tracked = false;
  std::string name;

  std::size_t numel() const { return value.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool is_scalar() const { return numel() == 1; }
  double scalar() const;
  void ensure_grad();
  void zero_grad();
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(std::vector<std::size_t> shape, bool tracked = false);
TensorPtr make_tensor(std::vector<std::size_t> shape, std::vector<double> values,
                      bool tracked = false);
TensorPtr make_scalar(double v);

// Recorded op sequence for one forward pass. Ops are appended in execution
// order, so the tape is topologically ordered by construction and backward
// visits each op exactly once in reverse.
class Graph {
 public:
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  // C = op(a) * op(b); ta/tb transpose the operand first.
  TensorPtr matmul(const TensorPtr& a, const TensorPtr& b, bool ta = false, bool tb = false);
  TensorPtr add(const TensorPtr& a, const TensorPtr& b);
  TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
  TensorPtr mul(const TensorPtr& a, const TensorPtr& b);  // pointwise
  TensorPtr scale(const TensorPtr& a, double c);
  TensorPtr add_rowvec(const TensorPtr& m, const TensorPtr& v);  // m[i][j] + v[j]
  TensorPtr add_colvec(const TensorPtr& m, const TensorPtr& v);  // m[i][j] + v[i]
  TensorPtr concat_cols(const TensorPtr& a, const TensorPtr& b);
  TensorPtr stack_rows(const std::vector<TensorPtr>& rows);
  TensorPtr slice_rows(const TensorPtr& m, std::size_t r0, std::size_t r1);
  TensorPtr gather_rows(const TensorPtr& m, const std::vector<int>& ids);
  TensorPtr reshape(const TensorPtr& x, std::vector<std::size_t> shape);
  TensorPtr relu(const TensorPtr& x);
  TensorPtr tanh(const TensorPtr& x);
  TensorPtr softplus(const TensorPtr& x);
  TensorPtr softmax_rows(const TensorPtr& x);
  TensorPtr log_softmax_rows(const TensorPtr& x);
  TensorPtr logsumexp_rows(const TensorPtr& x);  // (r,c) -> (r)
  TensorPtr logsumexp_cols(const TensorPtr& x);  // (r,c) -> (c)
  TensorPtr logsumexp_all(const TensorPtr& x);   // -> scalar
  TensorPtr sum(const TensorPtr& x);
  TensorPtr mean(const TensorPtr& x);
  // Picks entries at flat offsets; result is a vector of length flat.size().
  TensorPtr select(const TensorPtr& x, const std::vector<std::size_t>& flat);
  // Copy of x with the given flat offsets set to -inf. The only op whose
  // output may legitimately contain an infinity.
  TensorPtr mask_neg_inf(const TensorPtr& x, const std::vector<std::size_t>& flat);
  // Sum over rows of logsumexp(row) - row[target]; accepts -inf entries in
  // non-target columns (softmax assigns them zero probability).
  TensorPtr cross_entropy_rows(const TensorPtr& logits, const std::vector<int>& targets);

  // Seeds d(loss)/d(loss) = seed and replays the tape in reverse. Repeated
  // calls without zeroing accumulate into parameter gradients.
  void backward(const TensorPtr& loss, double seed = 1.0);

  bool grad_enabled() const { return grad_enabled_; }

 private:
  bool grad_enabled_;
  std::vector<std::function<void()>> tape_;
  std::vector<TensorPtr> owned_;  // intermediates; grads reset on each backward

  bool track(const TensorPtr& t) const { return grad_enabled_ && t->tracked; }
  TensorPtr result(std::vector<std::size_t> shape, bool tracked);
  void record(std::function<void()> fn) { tape_.push_back(std::move(fn)); }
};

// Throws if any entry is NaN, or infinite when allow_inf is false.
void check_finite(const Tensor& t, const char* op, bool allow_inf = false);

}  // namespace jnlp
