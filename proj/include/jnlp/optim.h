// Named parameter registry with AdamW state, initializers, and bit-exact
// little-endian serialization of parameter values.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jnlp/tensor.h"
#include "jnlp/util.h"

namespace jnlp {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Uniform in ±sqrt(6 / (fan_in + fan_out)) for a (fan_out, fan_in) matrix.
void init_xavier(Tensor& t, Rng& rng);
void init_normal(Tensor& t, Rng& rng, double stddev = 0.01);

class ParamStore {
 public:
  // Registers a fresh zero-valued tracked parameter. Name must be unique.
  TensorPtr create(const std::string& name, std::vector<std::size_t> shape);
  TensorPtr get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  const std::vector<TensorPtr>& params() const { return order_; }
  std::size_t step_count() const { return step_; }

  void zero_grad();
  double grad_norm() const;
  // Scales all grads by max_norm/norm when norm exceeds max_norm.
  void clip_grad_norm(double max_norm);
  // Decoupled weight decay: p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p).
  // Grads are left untouched; the caller zeroes them.
  void adamw_step(const AdamWConfig& cfg);

  // Deep copy of parameter values only (optimizer state excluded).
  std::vector<std::vector<double>> snapshot() const;
  void restore(const std::vector<std::vector<double>>& snap);

  // Text manifest (name \t dims... \t byte offset) + raw little-endian float64
  // payload. Round trip is bit-exact.
  void save(const std::string& manifest_path, const std::string& payload_path) const;
  // Loads values into already-created parameters; every name must match.
  void load(const std::string& manifest_path, const std::string& payload_path);

 private:
  std::vector<TensorPtr> order_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t step_ = 0;
};

// Little-endian float64 encoding helpers shared with checkpoint files.
void append_f64_le(std::vector<std::uint8_t>& buf, double v);
double read_f64_le(const std::uint8_t* p);

}  // namespace jnlp
