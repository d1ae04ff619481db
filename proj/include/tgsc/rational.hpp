#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "tgsc/errors.hpp"

namespace tgsc {

// Exact reduced fraction; keeps compression-factor accounting free of
// floating-point noise.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Ratio() = default;
  Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw ParameterError("ratio denominator is zero");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.num == b.num && a.den == b.den;
  }
};

// Stored floats of the codes over stored floats of the raw subsignal.
inline Ratio compression_ratio(std::int64_t n_nodes, std::int64_t window, std::int64_t n_hyperedges,
                               std::int64_t node_code_dim, std::int64_t hyperedge_code_dim) {
  if (n_nodes <= 0 || window <= 0 || n_hyperedges <= 0 || node_code_dim <= 0 ||
      hyperedge_code_dim <= 0) {
    throw ParameterError("compression_ratio arguments must be positive");
  }
  return Ratio(n_nodes * node_code_dim + n_hyperedges * hyperedge_code_dim, n_nodes * window);
}

}  // namespace tgsc
