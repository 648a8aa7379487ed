#include "jnlp/optim.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

namespace jnlp {

void init_xavier(Tensor& t, Rng& rng) {
  std::size_t fan_out = t.rank() == 2 ? t.shape[0] : t.numel();
  std::size_t fan_in = t.rank() == 2 ? t.shape[1] : 1;
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.value) v = rng.uniform(-bound, bound);
}

void init_normal(Tensor& t, Rng& rng, double stddev) {
  for (auto& v : t.value) v = rng.normal(0.0, stddev);
}

TensorPtr ParamStore::create(const std::string& name, std::vector<std::size_t> shape) {
  if (index_.count(name))
    throw std::runtime_error("parameter name already registered: " + name);
  auto t = make_tensor(std::move(shape), /*tracked=*/true);
  t->name = name;
  index_[name] = order_.size();
  order_.push_back(t);
  m_.emplace_back(t->numel(), 0.0);
  v_.emplace_back(t->numel(), 0.0);
  return t;
}

TensorPtr ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::runtime_error("unknown parameter: " + name);
  return order_[it->second];
}

void ParamStore::zero_grad() {
  for (auto& p : order_) p->zero_grad();
}

double ParamStore::grad_norm() const {
  double acc = 0.0;
  for (const auto& p : order_)
    for (double g : p->grad) acc += g * g;
  return std::sqrt(acc);
}

void ParamStore::clip_grad_norm(double max_norm) {
  double norm = grad_norm();
  if (norm <= max_norm || norm == 0.0) return;
  double s = max_norm / norm;
  for (auto& p : order_)
    for (double& g : p->grad) g *= s;
}

void ParamStore::adamw_step(const AdamWConfig& cfg) {
  ++step_;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  double inv_bc1 = 1.0 / bc1, inv_bc2 = 1.0 / bc2;
  for (std::size_t k = 0; k < order_.size(); ++k) {
    Tensor& p = *order_[k];
    p.ensure_grad();
    const double* __restrict g = p.grad.data();
    double* __restrict m = m_[k].data();
    double* __restrict v = v_[k].data();
    double* __restrict x = p.value.data();
    for (std::size_t i = 0, n = p.numel(); i < n; ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double m_hat = m[i] * inv_bc1;
      double v_hat = v[i] * inv_bc2;
      x[i] -= cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) +
                        cfg.weight_decay * x[i]);
    }
    check_finite(p, "adamw_step");
  }
}

std::vector<std::vector<double>> ParamStore::snapshot() const {
  std::vector<std::vector<double>> snap;
  snap.reserve(order_.size());
  for (const auto& p : order_) snap.push_back(p->value);
  return snap;
}

void ParamStore::restore(const std::vector<std::vector<double>>& snap) {
  if (snap.size() != order_.size())
    throw std::runtime_error("snapshot does not match parameter store");
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (snap[k].size() != order_[k]->numel())
      throw std::runtime_error("snapshot shape mismatch for " + order_[k]->name);
    order_[k]->value = snap[k];
  }
}

void append_f64_le(std::vector<std::uint8_t>& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
}

double read_f64_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

void ParamStore::save(const std::string& manifest_path, const std::string& payload_path) const {
  std::ostringstream manifest;
  std::vector<std::uint8_t> payload;
  for (const auto& p : order_) {
    manifest << p->name;
    for (auto d : p->shape) manifest << "\t" << d;
    manifest << "\t" << payload.size() << "\n";
    for (double v : p->value) append_f64_le(payload, v);
  }
  write_text_file(manifest_path, manifest.str());
  std::ofstream out(payload_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + payload_path);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed: " + payload_path);
}

void ParamStore::load(const std::string& manifest_path, const std::string& payload_path) {
  std::ifstream bin(payload_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open file: " + payload_path);
  std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(bin)),
                                    std::istreambuf_iterator<char>());

  std::istringstream manifest(read_text_file(manifest_path));
  std::string line;
  std::size_t seen = 0;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() < 3)
      throw std::runtime_error("malformed manifest line: " + line);
    const std::string& name = fields[0];
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::runtime_error("manifest names unknown parameter: " + name);
    Tensor& p = *order_[it->second];
    std::vector<std::size_t> shape;
    for (std::size_t i = 1; i + 1 < fields.size(); ++i)
      shape.push_back(static_cast<std::size_t>(std::stoull(fields[i])));
    if (shape != p.shape)
      throw std::runtime_error("manifest shape mismatch for parameter: " + name);
    std::size_t offset = static_cast<std::size_t>(std::stoull(fields.back()));
    if (offset + 8 * p.numel() > payload.size())
      throw std::runtime_error("payload too short for parameter: " + name);
    for (std::size_t i = 0; i < p.numel(); ++i)
      p.value[i] = read_f64_le(payload.data() + offset + 8 * i);
    ++seen;
  }
  if (seen != order_.size())
    throw std::runtime_error("manifest is missing parameters");
}

}  // namespace jnlp
