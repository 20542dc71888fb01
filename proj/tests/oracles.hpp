// Test-only oracles, kept independent of the library's computation paths:
// the DFT is evaluated by its O(n^2) definition on dense vectors.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "phasels/rng.hpp"

namespace oracle {

using Complex = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Definitional DFT value <f_m, x> = sum_t x[t] e^{-i 2 pi m t / n}.
inline Complex dft_at(const Eigen::VectorXcd& x, int m) {
  const int n = static_cast<int>(x.size());
  Complex acc(0.0, 0.0);
  for (int t = 0; t < n; ++t)
    acc += x(t) * std::polar(1.0, -kTwoPi * static_cast<double>(m) * t / n);
  return acc;
}

inline Eigen::VectorXcd low_freq(const Eigen::VectorXcd& x, int k_freq) {
  Eigen::VectorXcd y(2 * k_freq + 1);
  for (int m = -k_freq; m <= k_freq; ++m) y(m + k_freq) = dft_at(x, m);
  return y;
}

/// Masked magnitude-square by the definition: mask explicitly, dense DFT,
/// square.
inline double masked_power(const Eigen::VectorXcd& x, const Eigen::VectorXcd& mask,
                           int m) {
  return std::norm(dft_at(mask.cwiseProduct(x), m));
}

inline Eigen::VectorXcd random_dense(int n, phasels::RngStream& rng) {
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x(i) = Complex(rng.normal(), rng.normal());
  return x;
}

}  // namespace oracle
