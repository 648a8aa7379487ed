#include "jnlp/tensor.h"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jnlp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

std::size_t numel_of(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw std::runtime_error(std::string("shape mismatch in ") + op + ": " + detail);
}

std::string shape_str(const Tensor& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.shape[i]);
  }
  return s + ")";
}

// Stable log(sum(exp(x))) over a contiguous range; -inf entries contribute
// nothing. Throws only via the caller's finiteness check.
double lse_range(const double* x, std::size_t n) {
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > m) m = x[i];
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(x[i] - m);
  return m + std::log(acc);
}

}  // namespace

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw std::runtime_error("rows(): tensor is not rank 2");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw std::runtime_error("cols(): tensor is not rank 2");
  return shape[1];
}

double Tensor::scalar() const {
  if (!is_scalar()) throw std::runtime_error("scalar(): tensor has more than one entry");
  return value[0];
}

void Tensor::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

void Tensor::zero_grad() {
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
}

TensorPtr make_tensor(std::vector<std::size_t> shape, bool tracked) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->value.assign(numel_of(t->shape), 0.0);
  t->tracked = tracked;
  if (tracked) t->ensure_grad();
  return t;
}

TensorPtr make_tensor(std::vector<std::size_t> shape, std::vector<double> values,
                      bool tracked) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  if (values.size() != numel_of(t->shape))
    throw std::runtime_error("make_tensor: value count does not match shape");
  t->value = std::move(values);
  t->tracked = tracked;
  if (tracked) t->ensure_grad();
  return t;
}

TensorPtr make_scalar(double v) { return make_tensor({1}, std::vector<double>{v}); }

void check_finite(const Tensor& t, const char* op, bool allow_inf) {
  for (double v : t.value) {
    if (std::isnan(v) || (!allow_inf && std::isinf(v))) {
      throw std::runtime_error(std::string("non-finite output in op ") + op +
                               (t.name.empty() ? "" : " (tensor " + t.name + ")"));
    }
  }
}

TensorPtr Graph::result(std::vector<std::size_t> shape, bool tracked) {
  auto t = make_tensor(std::move(shape), tracked);
  if (tracked) owned_.push_back(t);
  return t;
}

TensorPtr Graph::matmul(const TensorPtr& a, const TensorPtr& b, bool ta, bool tb) {
  if (a->rank() != 2 || b->rank() != 2) shape_error("matmul", "operands must be rank 2");
  std::size_t am = ta ? a->cols() : a->rows();
  std::size_t ak = ta ? a->rows() : a->cols();
  std::size_t bk = tb ? b->cols() : b->rows();
  std::size_t bn = tb ? b->rows() : b->cols();
  if (ak != bk) shape_error("matmul", shape_str(*a) + " x " + shape_str(*b));
  auto out = result({am, bn}, track(a) || track(b));

  CMap A(a->value.data(), a->rows(), a->cols());
  CMap B(b->value.data(), b->rows(), b->cols());
  MMap C(out->value.data(), am, bn);
  if (!ta && !tb) C.noalias() = A * B;
  else if (ta && !tb) C.noalias() = A.transpose() * B;
  else if (!ta && tb) C.noalias() = A * B.transpose();
  else C.noalias() = A.transpose() * B.transpose();
  check_finite(*out, "matmul");

  if (out->tracked) {
    record([a, b, out, ta, tb, am, bn]() {
      CMap A(a->value.data(), a->rows(), a->cols());
      CMap B(b->value.data(), b->rows(), b->cols());
      CMap dC(out->grad.data(), am, bn);
      if (a->tracked) {
        a->ensure_grad();
        MMap dA(a->grad.data(), a->rows(), a->cols());
        // dA' = dC * B'^T with A' = op(A); transpose back if needed.
        if (!ta && !tb) dA.noalias() += dC * B.transpose();
        else if (!ta && tb) dA.noalias() += dC * B;
        else if (ta && !tb) dA.noalias() += B * dC.transpose();
        else dA.noalias() += B.transpose() * dC.transpose();
      }
      if (b->tracked) {
        b->ensure_grad();
        MMap dB(b->grad.data(), b->rows(), b->cols());
        if (!ta && !tb) dB.noalias() += A.transpose() * dC;
        else if (ta && !tb) dB.noalias() += A * dC;
        else if (!ta && tb) dB.noalias() += dC.transpose() * A;
        else dB.noalias() += dC.transpose() * A.transpose();
      }
    });
  }
  return out;
}

TensorPtr Graph::add(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("add", shape_str(*a) + " vs " + shape_str(*b));
  auto out = result(a->shape, track(a) || track(b));
  for (std::size_t i = 0; i < out->numel(); ++i) out->value[i] = a->value[i] + b->value[i];
  check_finite(*out, "add");
  if (out->tracked) {
    record([a, b, out]() {
      if (a->tracked) {
        a->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
      }
      if (b->tracked) {
        b->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) b->grad[i] += out->grad[i];
      }
    });
  }
  return out;
}

TensorPtr Graph::sub(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("sub", shape_str(*a) + " vs " + shape_str(*b));
  auto out = result(a->shape, track(a) || track(b));
  for (std::size_t i = 0; i < out->numel(); ++i) out->value[i] = a->value[i] - b->value[i];
  check_finite(*out, "sub");
  if (out->tracked) {
    record([a, b, out]() {
      if (a->tracked) {
        a->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += out->grad[i];
      }
      if (b->tracked) {
        b->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) b->grad[i] -= out->grad[i];
      }
    });
  }
  return out;
}

TensorPtr Graph::mul(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("mul", shape_str(*a) + " vs " + shape_str(*b));
  auto out = result(a->shape, track(a) || track(b));
  for (std::size_t i = 0; i < out->numel(); ++i) out->value[i] = a->value[i] * b->value[i];
  check_finite(*out, "mul");
  if (out->tracked) {
    record([a, b, out]() {
      if (a->tracked) {
        a->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += b->value[i] * out->grad[i];
      }
      if (b->tracked) {
        b->ensure_grad();
        for (std::size_t i = 0; i < out->numel(); ++i) b->grad[i] += a->value[i] * out->grad[i];
      }
    });
  }
  return out;
}

TensorPtr Graph::scale(const TensorPtr& a, double c) {
  auto out = result(a->shape, track(a));
  for (std::size_t i = 0; i < out->numel(); ++i) out->value[i] = c * a->value[i];
  check_finite(*out, "scale");
  if (out->tracked) {
    record([a, out, c]() {
      a->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i) a->grad[i] += c * out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::add_rowvec(const TensorPtr& m, const TensorPtr& v) {
  if (m->rank() != 2 || v->rank() != 1 || v->shape[0] != m->cols())
    shape_error("add_rowvec", shape_str(*m) + " + " + shape_str(*v));
  std::size_t r = m->rows(), c = m->cols();
  auto out = result(m->shape, track(m) || track(v));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out->value[i * c + j] = m->value[i * c + j] + v->value[j];
  check_finite(*out, "add_rowvec");
  if (out->tracked) {
    record([m, v, out, r, c]() {
      if (m->tracked) {
        m->ensure_grad();
        for (std::size_t i = 0; i < r * c; ++i) m->grad[i] += out->grad[i];
      }
      if (v->tracked) {
        v->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) v->grad[j] += out->grad[i * c + j];
      }
    });
  }
  return out;
}

TensorPtr Graph::add_colvec(const TensorPtr& m, const TensorPtr& v) {
  if (m->rank() != 2 || v->rank() != 1 || v->shape[0] != m->rows())
    shape_error("add_colvec", shape_str(*m) + " + " + shape_str(*v));
  std::size_t r = m->rows(), c = m->cols();
  auto out = result(m->shape, track(m) || track(v));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out->value[i * c + j] = m->value[i * c + j] + v->value[i];
  check_finite(*out, "add_colvec");
  if (out->tracked) {
    record([m, v, out, r, c]() {
      if (m->tracked) {
        m->ensure_grad();
        for (std::size_t i = 0; i < r * c; ++i) m->grad[i] += out->grad[i];
      }
      if (v->tracked) {
        v->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) v->grad[i] += out->grad[i * c + j];
      }
    });
  }
  return out;
}

TensorPtr Graph::concat_cols(const TensorPtr& a, const TensorPtr& b) {
  if (a->rank() != 2 || b->rank() != 2 || a->rows() != b->rows())
    shape_error("concat_cols", shape_str(*a) + " | " + shape_str(*b));
  std::size_t r = a->rows(), ca = a->cols(), cb = b->cols();
  auto out = result({r, ca + cb}, track(a) || track(b));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < ca; ++j) out->value[i * (ca + cb) + j] = a->value[i * ca + j];
    for (std::size_t j = 0; j < cb; ++j) out->value[i * (ca + cb) + ca + j] = b->value[i * cb + j];
  }
  check_finite(*out, "concat_cols");
  if (out->tracked) {
    record([a, b, out, r, ca, cb]() {
      if (a->tracked) {
        a->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < ca; ++j) a->grad[i * ca + j] += out->grad[i * (ca + cb) + j];
      }
      if (b->tracked) {
        b->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < cb; ++j)
            b->grad[i * cb + j] += out->grad[i * (ca + cb) + ca + j];
      }
    });
  }
  return out;
}

TensorPtr Graph::stack_rows(const std::vector<TensorPtr>& rows) {
  if (rows.empty()) throw std::runtime_error("stack_rows: empty input");
  std::size_t c = 0, total = 0;
  bool tracked = false;
  for (const auto& r : rows) {
    if (r->rank() != 2) shape_error("stack_rows", "operands must be rank 2");
    if (c == 0) c = r->cols();
    if (r->cols() != c) shape_error("stack_rows", "column counts differ");
    total += r->rows();
    tracked = tracked || track(r);
  }
  auto out = result({total, c}, tracked);
  std::size_t off = 0;
  for (const auto& r : rows) {
    std::copy(r->value.begin(), r->value.end(), out->value.begin() + off);
    off += r->numel();
  }
  check_finite(*out, "stack_rows", /*allow_inf=*/true);
  if (out->tracked) {
    record([rows, out]() {
      std::size_t off = 0;
      for (const auto& r : rows) {
        if (r->tracked) {
          r->ensure_grad();
          for (std::size_t i = 0; i < r->numel(); ++i) r->grad[i] += out->grad[off + i];
        }
        off += r->numel();
      }
    });
  }
  return out;
}

TensorPtr Graph::slice_rows(const TensorPtr& m, std::size_t r0, std::size_t r1) {
  if (m->rank() != 2 || r1 > m->rows() || r0 >= r1)
    shape_error("slice_rows", shape_str(*m));
  std::size_t c = m->cols();
  auto out = result({r1 - r0, c}, track(m));
  std::copy(m->value.begin() + r0 * c, m->value.begin() + r1 * c, out->value.begin());
  check_finite(*out, "slice_rows", /*allow_inf=*/true);
  if (out->tracked) {
    record([m, out, r0, c]() {
      m->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i) m->grad[r0 * c + i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::gather_rows(const TensorPtr& m, const std::vector<int>& ids) {
  if (m->rank() != 2) shape_error("gather_rows", "operand must be rank 2");
  std::size_t c = m->cols();
  for (int id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= m->rows())
      throw std::runtime_error("gather_rows: row index out of range");
  auto out = result({ids.size(), c}, track(m));
  for (std::size_t k = 0; k < ids.size(); ++k)
    std::copy(m->value.begin() + ids[k] * c, m->value.begin() + (ids[k] + 1) * c,
              out->value.begin() + k * c);
  check_finite(*out, "gather_rows");
  if (out->tracked) {
    record([m, out, ids, c]() {
      m->ensure_grad();
      for (std::size_t k = 0; k < ids.size(); ++k)
        for (std::size_t j = 0; j < c; ++j)
          m->grad[ids[k] * c + j] += out->grad[k * c + j];
    });
  }
  return out;
}

TensorPtr Graph::reshape(const TensorPtr& x, std::vector<std::size_t> shape) {
  if (numel_of(shape) != x->numel()) shape_error("reshape", shape_str(*x));
  auto out = result(std::move(shape), track(x));
  out->value = x->value;
  check_finite(*out, "reshape", /*allow_inf=*/true);
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::relu(const TensorPtr& x) {
  auto out = result(x->shape, track(x));
  for (std::size_t i = 0; i < x->numel(); ++i)
    out->value[i] = x->value[i] > 0.0 ? x->value[i] : 0.0;
  check_finite(*out, "relu");
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i)
        if (x->value[i] > 0.0) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::tanh(const TensorPtr& x) {
  auto out = result(x->shape, track(x));
  for (std::size_t i = 0; i < x->numel(); ++i) out->value[i] = std::tanh(x->value[i]);
  check_finite(*out, "tanh");
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i)
        x->grad[i] += (1.0 - out->value[i] * out->value[i]) * out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::softplus(const TensorPtr& x) {
  auto out = result(x->shape, track(x));
  for (std::size_t i = 0; i < x->numel(); ++i) {
    double v = x->value[i];
    out->value[i] = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
  }
  check_finite(*out, "softplus");
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < out->numel(); ++i) {
        double s = 1.0 / (1.0 + std::exp(-x->value[i]));
        x->grad[i] += s * out->grad[i];
      }
    });
  }
  return out;
}

TensorPtr Graph::softmax_rows(const TensorPtr& x) {
  if (x->rank() != 2) shape_error("softmax_rows", "operand must be rank 2");
  std::size_t r = x->rows(), c = x->cols();
  auto out = result(x->shape, track(x));
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = x->value.data() + i * c;
    double m = kNegInf;
    for (std::size_t j = 0; j < c; ++j)
      if (row[j] > m) m = row[j];
    if (m == kNegInf)
      throw std::runtime_error("softmax_rows: row has no finite entry");
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) denom += std::exp(row[j] - m);
    for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] = std::exp(row[j] - m) / denom;
  }
  check_finite(*out, "softmax_rows");
  if (out->tracked) {
    record([x, out, r, c]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < r; ++i) {
        const double* y = out->value.data() + i * c;
        const double* dy = out->grad.data() + i * c;
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += y[j] * dy[j];
        for (std::size_t j = 0; j < c; ++j) x->grad[i * c + j] += y[j] * (dy[j] - dot);
      }
    });
  }
  return out;
}

TensorPtr Graph::log_softmax_rows(const TensorPtr& x) {
  if (x->rank() != 2) shape_error("log_softmax_rows", "operand must be rank 2");
  std::size_t r = x->rows(), c = x->cols();
  auto out = result(x->shape, track(x));
  for (std::size_t i = 0; i < r; ++i) {
    double lse = lse_range(x->value.data() + i * c, c);
    if (lse == kNegInf)
      throw std::runtime_error("log_softmax_rows: row has no finite entry");
    for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] = x->value[i * c + j] - lse;
  }
  check_finite(*out, "log_softmax_rows", /*allow_inf=*/true);
  if (out->tracked) {
    record([x, out, r, c]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < r; ++i) {
        const double* y = out->value.data() + i * c;
        const double* dy = out->grad.data() + i * c;
        double srow = 0.0;
        for (std::size_t j = 0; j < c; ++j) srow += dy[j];
        for (std::size_t j = 0; j < c; ++j)
          x->grad[i * c + j] += dy[j] - std::exp(y[j]) * srow;
      }
    });
  }
  return out;
}

TensorPtr Graph::logsumexp_rows(const TensorPtr& x) {
  if (x->rank() != 2) shape_error("logsumexp_rows", "operand must be rank 2");
  std::size_t r = x->rows(), c = x->cols();
  auto out = result({r}, track(x));
  for (std::size_t i = 0; i < r; ++i) out->value[i] = lse_range(x->value.data() + i * c, c);
  check_finite(*out, "logsumexp_rows");
  if (out->tracked) {
    record([x, out, r, c]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
          double v = x->value[i * c + j];
          if (v != kNegInf)
            x->grad[i * c + j] += std::exp(v - out->value[i]) * out->grad[i];
        }
    });
  }
  return out;
}

TensorPtr Graph::logsumexp_cols(const TensorPtr& x) {
  if (x->rank() != 2) shape_error("logsumexp_cols", "operand must be rank 2");
  std::size_t r = x->rows(), c = x->cols();
  auto out = result({c}, track(x));
  for (std::size_t j = 0; j < c; ++j) {
    double m = kNegInf;
    for (std::size_t i = 0; i < r; ++i)
      if (x->value[i * c + j] > m) m = x->value[i * c + j];
    if (m == kNegInf) {
      out->value[j] = kNegInf;
      continue;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i) acc += std::exp(x->value[i * c + j] - m);
    out->value[j] = m + std::log(acc);
  }
  check_finite(*out, "logsumexp_cols");
  if (out->tracked) {
    record([x, out, r, c]() {
      x->ensure_grad();
      for (std::size_t j = 0; j < c; ++j)
        for (std::size_t i = 0; i < r; ++i) {
          double v = x->value[i * c + j];
          if (v != kNegInf)
            x->grad[i * c + j] += std::exp(v - out->value[j]) * out->grad[j];
        }
    });
  }
  return out;
}

TensorPtr Graph::logsumexp_all(const TensorPtr& x) {
  auto out = result({1}, track(x));
  out->value[0] = lse_range(x->value.data(), x->numel());
  check_finite(*out, "logsumexp_all");
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < x->numel(); ++i) {
        double v = x->value[i];
        if (v != kNegInf) x->grad[i] += std::exp(v - out->value[0]) * out->grad[0];
      }
    });
  }
  return out;
}

TensorPtr Graph::sum(const TensorPtr& x) {
  auto out = result({1}, track(x));
  double acc = 0.0;
  for (double v : x->value) acc += v;
  out->value[0] = acc;
  check_finite(*out, "sum");
  if (out->tracked) {
    record([x, out]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < x->numel(); ++i) x->grad[i] += out->grad[0];
    });
  }
  return out;
}

TensorPtr Graph::mean(const TensorPtr& x) {
  auto out = result({1}, track(x));
  double acc = 0.0;
  for (double v : x->value) acc += v;
  double inv = 1.0 / static_cast<double>(x->numel());
  out->value[0] = acc * inv;
  check_finite(*out, "mean");
  if (out->tracked) {
    record([x, out, inv]() {
      x->ensure_grad();
      for (std::size_t i = 0; i < x->numel(); ++i) x->grad[i] += inv * out->grad[0];
    });
  }
  return out;
}

TensorPtr Graph::select(const TensorPtr& x, const std::vector<std::size_t>& flat) {
  for (auto f : flat)
    if (f >= x->numel()) throw std::runtime_error("select: flat index out of range");
  auto out = result({flat.size()}, track(x));
  for (std::size_t k = 0; k < flat.size(); ++k) out->value[k] = x->value[flat[k]];
  check_finite(*out, "select");
  if (out->tracked) {
    record([x, out, flat]() {
      x->ensure_grad();
      for (std::size_t k = 0; k < flat.size(); ++k) x->grad[flat[k]] += out->grad[k];
    });
  }
  return out;
}

TensorPtr Graph::mask_neg_inf(const TensorPtr& x, const std::vector<std::size_t>& flat) {
  for (auto f : flat)
    if (f >= x->numel()) throw std::runtime_error("mask_neg_inf: flat index out of range");
  auto out = result(x->shape, track(x));
  out->value = x->value;
  for (auto f : flat) out->value[f] = kNegInf;
  check_finite(*out, "mask_neg_inf", /*allow_inf=*/true);
  if (out->tracked) {
    record([x, out, flat]() {
      x->ensure_grad();
      std::vector<bool> masked(x->numel(), false);
      for (auto f : flat) masked[f] = true;
      for (std::size_t i = 0; i < x->numel(); ++i)
        if (!masked[i]) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

TensorPtr Graph::cross_entropy_rows(const TensorPtr& logits, const std::vector<int>& targets) {
  if (logits->rank() != 2) shape_error("cross_entropy", "logits must be rank 2");
  std::size_t r = logits->rows(), c = logits->cols();
  if (targets.size() != r)
    shape_error("cross_entropy", "one target per row required");
  for (int t : targets)
    if (t < 0 || static_cast<std::size_t>(t) >= c)
      throw std::runtime_error("cross_entropy: target id out of range");
  auto out = result({1}, track(logits));
  std::vector<double> lse(r);
  for (std::size_t i = 0; i < r; ++i) {
    lse[i] = lse_range(logits->value.data() + i * c, c);
    if (lse[i] == kNegInf)
      throw std::runtime_error("cross_entropy: row has no finite entry");
    double gold = logits->value[i * c + targets[i]];
    if (std::isinf(gold))
      throw std::runtime_error("cross_entropy: target entry is masked");
    out->value[0] += lse[i] - gold;
  }
  check_finite(*out, "cross_entropy");
  if (out->tracked) {
    record([logits, out, targets, lse, r, c]() {
      logits->ensure_grad();
      double d = out->grad[0];
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
          double v = logits->value[i * c + j];
          double p = (v == kNegInf) ? 0.0 : std::exp(v - lse[i]);
          double delta = (static_cast<std::size_t>(targets[i]) == j) ? 1.0 : 0.0;
          logits->grad[i * c + j] += (p - delta) * d;
        }
    });
  }
  return out;
}

void Graph::backward(const TensorPtr& loss, double seed) {
  if (!loss->is_scalar()) throw std::runtime_error("backward: loss must be scalar");
  if (!grad_enabled_) throw std::runtime_error("backward: graph has gradients disabled");
  if (!loss->tracked) return;  // loss does not depend on any tracked tensor
  for (auto& t : owned_) t->zero_grad();
  loss->ensure_grad();
  loss->grad[0] += seed;
  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) (*it)();
}

}  // namespace jnlp
