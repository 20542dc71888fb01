#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "phasels/errors.hpp"

namespace phasels {

using Complex = std::complex<double>;

struct SpikeEntry {
  int position = 0;
  Complex amplitude{0.0, 0.0};
};

/// Sparse complex signal on an N-point circular grid. Entries are sorted by
/// position; zero-amplitude entries are dropped at construction so the
/// sparsity k and support positions are well defined. Immutable.
class SparseSignal {
 public:
  SparseSignal(int grid_length, std::vector<SpikeEntry> entries);

  int grid_length() const { return n_; }
  int sparsity() const { return static_cast<int>(entries_.size()); }
  const std::vector<SpikeEntry>& entries() const { return entries_; }

  Eigen::VectorXcd dense() const;
  double norm() const;

 private:
  int n_;
  std::vector<SpikeEntry> entries_;
};

/// The five diagonal modulation masks of the measurement design:
///   D0 = I, D1 = I + D^(l1), D2 = I - i D^(l1),
///   D3 = I + D^(l2), D4 = I - i D^(l2),
/// with d^(l)[n'] = exp(i 2 pi l n' / n).
class MaskSet {
 public:
  static constexpr int kMaskCount = 5;

  MaskSet(int grid_length, int l1, int l2);

  int grid_length() const { return n_; }
  int shift_l1() const { return l1_; }
  int shift_l2() const { return l2_; }
  const Eigen::VectorXcd& mask(int r) const { return masks_[r]; }

 private:
  int n_, l1_, l2_;
  std::vector<Eigen::VectorXcd> masks_;
};

inline MaskSet build_masks(int grid_length, int l1, int l2) {
  return MaskSet(grid_length, l1, l2);
}

/// Magnitude-square measurements Z[m, r] for -K <= m <= K, 0 <= r < R.
/// Noiseless values are nonnegative; noisy values may dip below zero and
/// consumers must tolerate that.
class MeasurementGrid {
 public:
  MeasurementGrid(int k_freq, int r_masks)
      : k_freq_(k_freq), values_(Eigen::MatrixXd::Zero(2 * k_freq + 1, r_masks)) {}

  int k_freq() const { return k_freq_; }
  int r_masks() const { return static_cast<int>(values_.cols()); }
  double at(int m, int r) const { return values_(m + k_freq_, r); }
  double& at(int m, int r) { return values_(m + k_freq_, r); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  int k_freq_;
  Eigen::MatrixXd values_;
};

/// The 2K+1 low-frequency DFT values y[-K..K], defined up to a global
/// unit-modulus factor.
class LowFreqVector {
 public:
  explicit LowFreqVector(int k_freq)
      : k_freq_(k_freq), values_(Eigen::VectorXcd::Zero(2 * k_freq + 1)) {}

  int k_freq() const { return k_freq_; }
  Complex at(int m) const { return values_(m + k_freq_); }
  Complex& at(int m) { return values_(m + k_freq_); }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }

 private:
  int k_freq_;
  Eigen::VectorXcd values_;
};

struct ConditionReport {
  bool separation_ok = false;   // 1: min separation >= factor * n / K
  bool nonzero_ok = false;      // 2: |y[m]| > zero_tol for all -K..K
  bool masks_ok = false;        // 3: masks have the five-mask form
  bool shifts_ok = false;       // 4: gcd(|l1|,|l2|) = 1 and |l1|+|l2| <= 2K
  double min_sep = 0.0;
  double required_sep = 0.0;
  double min_abs_y = 0.0;
  std::vector<std::string> failures;

  bool all_ok() const { return separation_ok && nonzero_ok && masks_ok && shifts_ok; }
};

/// Z[m,r] = |<f_m, D_r x>|^2 with the fixed convention
/// <f_m, v> = sum_n' v[n'] exp(-i 2 pi m n' / n); m is taken modulo n.
MeasurementGrid forward_measure(const SparseSignal& x, const MaskSet& masks, int k_freq);

/// y[m] = <f_m, x> for -K <= m <= K.
LowFreqVector low_freq_dft(const SparseSignal& x, int k_freq);

/// Minimum circular gap between support points (requires k >= 2).
int min_separation(const SparseSignal& x);

/// Checks the four recoverability conditions; never throws, always reports.
/// zero_tol for condition 2 is zero_tol_scale * ||x||.
ConditionReport validate_conditions(const SparseSignal& x, const MaskSet& masks,
                                    int k_freq, double separation_factor = 2.0,
                                    double zero_tol_scale = 1e-9);

/// ||a - c b|| / ||b|| minimized over unit-modulus c; the natural metric on
/// vectors defined up to a global phase.
double phase_aligned_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace phasels
