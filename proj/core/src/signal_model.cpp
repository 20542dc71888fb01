#include "phasels/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace phasels {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

int positive_mod(long long v, int n) {
  const long long r = v % n;
  return static_cast<int>(r < 0 ? r + n : r);
}
}  // namespace

SparseSignal::SparseSignal(int grid_length, std::vector<SpikeEntry> entries)
    : n_(grid_length) {
  if (n_ < 1) throw InvalidSignal("grid length must be positive");
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.position < 0 || e.position >= n_)
      throw InvalidSignal("spike position out of range [0, n)");
    if (e.amplitude != Complex(0.0, 0.0)) entries_.push_back(e);
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const SpikeEntry& a, const SpikeEntry& b) { return a.position < b.position; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].position == entries_[i - 1].position)
      throw InvalidSignal("duplicate spike positions");
  }
  if (entries_.empty()) throw InvalidSignal("signal has no nonzero entries");
}

Eigen::VectorXcd SparseSignal::dense() const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_);
  for (const auto& e : entries_) v(e.position) = e.amplitude;
  return v;
}

double SparseSignal::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e.amplitude);
  return std::sqrt(s);
}

MaskSet::MaskSet(int grid_length, int l1, int l2) : n_(grid_length), l1_(l1), l2_(l2) {
  if (n_ < 2) throw DimensionMismatch("mask grid length must be at least 2");
  if (l1 == 0 || l2 == 0) throw InvalidShift("mask shifts must be nonzero");
  if (l1 == l2) throw InvalidShift("mask shifts must be distinct");
  if (std::gcd(std::abs(l1), std::abs(l2)) != 1)
    throw NonCoprimeShifts("gcd(|l1|, |l2|) must be 1");

  const auto modulation = [this](int l) {
    Eigen::VectorXcd d(n_);
    for (int np = 0; np < n_; ++np)
      d(np) = std::polar(1.0, kTwoPi * static_cast<double>(l) * np / n_);
    return d;
  };
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n_);
  const Eigen::VectorXcd d1 = modulation(l1);
  const Eigen::VectorXcd d2 = modulation(l2);
  const Complex mi(0.0, -1.0);
  masks_.resize(kMaskCount);
  masks_[0] = ones;
  masks_[1] = ones + d1;
  masks_[2] = ones + mi * d1;
  masks_[3] = ones + d2;
  masks_[4] = ones + mi * d2;
}

MeasurementGrid forward_measure(const SparseSignal& x, const MaskSet& masks, int k_freq) {
  const int n = x.grid_length();
  if (masks.grid_length() != n)
    throw DimensionMismatch("mask and signal grid lengths differ");
  if (2 * k_freq + 1 > n)
    throw DimensionMismatch("2K+1 must not exceed the grid length");

  MeasurementGrid z(k_freq, MaskSet::kMaskCount);
  for (int r = 0; r < MaskSet::kMaskCount; ++r) {
    const Eigen::VectorXcd& d = masks.mask(r);
    for (int m = -k_freq; m <= k_freq; ++m) {
      Complex acc(0.0, 0.0);
      for (const auto& e : x.entries()) {
        const double angle = -kTwoPi * static_cast<double>(m) * e.position / n;
        acc += d(e.position) * e.amplitude * std::polar(1.0, angle);
      }
      z.at(m, r) = std::norm(acc);
    }
  }
  return z;
}

LowFreqVector low_freq_dft(const SparseSignal& x, int k_freq) {
  const int n = x.grid_length();
  if (2 * k_freq + 1 > n)
    throw DimensionMismatch("2K+1 must not exceed the grid length");
  LowFreqVector y(k_freq);
  for (int m = -k_freq; m <= k_freq; ++m) {
    Complex acc(0.0, 0.0);
    for (const auto& e : x.entries()) {
      const double angle = -kTwoPi * static_cast<double>(m) * e.position / n;
      acc += e.amplitude * std::polar(1.0, angle);
    }
    y.at(m) = acc;
  }
  return y;
}

int min_separation(const SparseSignal& x) {
  const int k = x.sparsity();
  if (k < 2) throw TooFewSpikes("min separation needs at least two spikes");
  const int n = x.grid_length();
  int best = n;
  // Entries are sorted; circular gaps between consecutive support points.
  for (int i = 0; i < k; ++i) {
    const int a = x.entries()[i].position;
    const int b = x.entries()[(i + 1) % k].position;
    const int gap = positive_mod(static_cast<long long>(b) - a, n);
    best = std::min(best, gap);
  }
  return best;
}

ConditionReport validate_conditions(const SparseSignal& x, const MaskSet& masks,
                                    int k_freq, double separation_factor,
                                    double zero_tol_scale) {
  ConditionReport report;
  const int n = x.grid_length();

  // Condition 1: minimum separation. Vacuous for a single spike.
  report.required_sep =
      k_freq > 0 ? separation_factor * n / k_freq
                 : std::numeric_limits<double>::infinity();
  if (x.sparsity() < 2) {
    report.min_sep = static_cast<double>(n);
    report.separation_ok = true;
  } else {
    report.min_sep = static_cast<double>(min_separation(x));
    report.separation_ok = report.min_sep >= report.required_sep;
  }
  if (!report.separation_ok)
    report.failures.push_back("condition 1: minimum separation below factor*n/K");

  // Condition 2: all low-frequency DFT values bounded away from zero.
  const double zero_tol = zero_tol_scale * x.norm();
  if (2 * k_freq + 1 <= n) {
    const LowFreqVector y = low_freq_dft(x, k_freq);
    report.min_abs_y = y.values().cwiseAbs().minCoeff();
    report.nonzero_ok = report.min_abs_y > zero_tol;
  } else {
    report.min_abs_y = 0.0;
    report.nonzero_ok = false;
  }
  if (!report.nonzero_ok)
    report.failures.push_back("condition 2: some low-frequency DFT value is (near) zero");

  // Condition 3: masks have the five-mask form for some valid (l1, l2).
  report.masks_ok = true;
  if (masks.grid_length() != n) {
    report.masks_ok = false;
  } else {
    const MaskSet reference(masks.grid_length(), masks.shift_l1(), masks.shift_l2());
    for (int r = 0; r < MaskSet::kMaskCount && report.masks_ok; ++r) {
      if ((masks.mask(r) - reference.mask(r)).cwiseAbs().maxCoeff() > 1e-12)
        report.masks_ok = false;
    }
  }
  if (!report.masks_ok)
    report.failures.push_back("condition 3: masks do not match the five-mask form");

  // Condition 4: coprime shifts within the measured band.
  const int l1 = masks.shift_l1(), l2 = masks.shift_l2();
  report.shifts_ok = std::gcd(std::abs(l1), std::abs(l2)) == 1 &&
                     std::abs(l1) + std::abs(l2) <= 2 * k_freq;
  if (!report.shifts_ok)
    report.failures.push_back("condition 4: shifts not coprime or |l1|+|l2| > 2K");

  return report;
}

double phase_aligned_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
  const double bn = b.norm();
  if (bn == 0.0) throw ZeroReference("reference vector is zero");
  const Complex overlap = b.dot(a);  // sum conj(b) a
  const Complex c = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap)
                                            : Complex(1.0, 0.0);
  return (a - c * b).norm() / bn;
}

}  // namespace phasels
