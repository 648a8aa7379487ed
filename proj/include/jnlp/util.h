// Shared helpers: deterministic RNG, UTF-8 iteration, string utilities.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace jnlp {

// Deterministic RNG with hand-rolled distributions so that identical seeds
// give identical streams regardless of standard library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, 1) with 53 bits of entropy.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, cached second draw.
  double normal(double mean, double stddev);

  // Uniform integer in [0, n). Rejection sampling, unbiased.
  std::size_t uniform_int(std::size_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_int(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Splits a UTF-8 string into codepoint-sized substrings. Invalid lead bytes
// are passed through as single bytes.
std::vector<std::string> utf8_chars(const std::string& s);

// Splits on runs of spaces/tabs; never returns empty fields.
std::vector<std::string> split_ws(const std::string& line);

std::vector<std::string> split_char(const std::string& s, char sep);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string trim(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace jnlp
