#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "phasels/lifted_sdp.hpp"
#include "phasels/rng.hpp"
#include "phasels/signal_model.hpp"

namespace phasels {

/// Batch experiment configuration. A (config, seed) pair fully determines
/// every output byte, at any worker count.
struct TrialConfig {
  int n = 20;
  std::vector<int> k_freq_range;
  std::vector<int> delta_range;
  int l1 = 2, l2 = 3;
  int trials_per_cell = 20;
  std::uint64_t seed = 0;
  std::vector<double> snr_list_db;
  double success_threshold = 1e-3;
  SolverParams solver;
  int workers = 0;  // 0 = hardware concurrency
};

struct TrialOutcome {
  double rel_error = 0.0;
  bool success = false;
  bool converged = false;
  int iterations = 0;
};

struct CellResult {
  int k_freq = 0;
  int delta = 0;
  double success_rate = 0.0;
  std::vector<TrialOutcome> trials;
  long resamples = 0;
};

struct PhaseTransitionResult {
  std::vector<CellResult> cells;
  long total_resamples = 0;
};

struct SnrPoint {
  double snr_db = 0.0;
  double mse = 0.0;
  std::vector<TrialOutcome> trials;
  long resamples = 0;
};

struct SnrSweepResult {
  int k_freq = 0;
  int delta = 0;
  std::vector<SnrPoint> points;
  long total_resamples = 0;
};

/// Draws a k-sparse signal whose support satisfies the minimum-separation
/// constraint (rejection sampling, with a deterministic equispaced-plus-jitter
/// fallback after 1000 rejections); amplitudes are complex standard normal.
SparseSignal gen_signal(int n, int k_sparsity, int delta_min, RngStream& rng);

/// Adds i.i.d. N(0, sigma^2) noise with sigma set from the target SNR in dB
/// (signal power = mean square of the grid entries). Returns sigma, which the
/// solver uses for its interval slack. An infinite snr_db is a passthrough.
std::pair<MeasurementGrid, double> add_noise(const MeasurementGrid& z, double snr_db,
                                             RngStream& rng);

/// Success probability per (K, delta) cell on noiseless instances.
PhaseTransitionResult run_phase_transition(const TrialConfig& cfg);

/// Mean squared phase-aligned relative error per SNR point, at the fixed
/// (K, delta) = (k_freq_range[0], delta_range[0]) cell, solving with
/// interval slack 3*sigma.
SnrSweepResult run_snr_sweep(const TrialConfig& cfg);

/// Multiplies xhat by the unit scalar that best aligns it with x.
Eigen::VectorXcd align_phase(const Eigen::VectorXcd& xhat, const Eigen::VectorXcd& x);

/// Runs fn(0..count-1) on a pool of `workers` threads (0 = hardware
/// concurrency). fn must not throw; tasks own disjoint output slots, so the
/// results are independent of scheduling.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace phasels
