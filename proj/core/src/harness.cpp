#include "phasels/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

namespace phasels {

namespace {

constexpr int kMaxRejections = 1000;
constexpr int kMaxCondition2Resamples = 100;

Complex draw_amplitude(RngStream& rng) {
  while (true) {
    const double re = rng.normal();
    const double im = rng.normal();
    if (re != 0.0 || im != 0.0) return {re, im};
  }
}

/// One recovery trial; never throws (solver errors count as failures).
struct TrialSpec {
  int n, k_sparsity, delta, k_freq, l1, l2;
  double snr_db = std::numeric_limits<double>::infinity();
  double success_threshold;
  SolverParams solver;
};

TrialOutcome run_trial(const TrialSpec& spec, RngStream& rng, long& resamples) {
  TrialOutcome outcome;
  outcome.rel_error = std::numeric_limits<double>::infinity();
  try {
    const MaskSet masks(spec.n, spec.l1, spec.l2);

    // Resample the signal if condition 2 fails (measure-zero for random
    // amplitudes, but the contract logs it rather than silently proceeding).
    SparseSignal x = gen_signal(spec.n, spec.k_sparsity, spec.delta, rng);
    for (int attempt = 0; attempt < kMaxCondition2Resamples; ++attempt) {
      const double zero_tol = 1e-9 * x.norm();
      if (low_freq_dft(x, spec.k_freq).values().cwiseAbs().minCoeff() > zero_tol) break;
      ++resamples;
      x = gen_signal(spec.n, spec.k_sparsity, spec.delta, rng);
    }

    MeasurementGrid z = forward_measure(x, masks, spec.k_freq);
    SolverParams solver = spec.solver;
    if (std::isfinite(spec.snr_db)) {
      auto [noisy, sigma] = add_noise(z, spec.snr_db, rng);
      z = std::move(noisy);
      solver.slack = 3.0 * sigma;
      // Solving far below the noise floor is wasted work; loosen the
      // tolerance toward the noise-induced error level, never below the
      // configured one.
      solver.tol_rel = std::max(solver.tol_rel,
                                std::min(1e-4, 0.03 * std::pow(10.0, -spec.snr_db / 20.0)));
    }

    LiftedSolution solution =
        solver.mode == SolveMode::two_stage
            ? solve_two_stage(z, masks, solver)
            : solve_lifted(assemble_constraints(masks, spec.k_freq, z, solver.slack),
                           spec.n, solver);

    const Eigen::VectorXcd xhat = rank_one_extract(solution.x).x;
    outcome.rel_error = phase_aligned_distance(xhat, x.dense());
    outcome.converged = solution.report.converged;
    outcome.iterations = solution.report.iterations;
  } catch (const Error&) {
    // Failed trial: infinite error, success false.
  }
  outcome.success = outcome.rel_error <= spec.success_threshold;
  return outcome;
}

}  // namespace

SparseSignal gen_signal(int n, int k_sparsity, int delta_min, RngStream& rng) {
  if (k_sparsity < 1) throw InfeasibleSeparation("sparsity must be at least 1");
  const int delta = std::max(delta_min, 1);
  if (static_cast<long long>(k_sparsity) * delta > n)
    throw InfeasibleSeparation("k * delta_min exceeds the grid length");

  std::vector<int> support;
  if (k_sparsity == 1) {
    support.push_back(rng.uniform_int(0, n - 1));
  } else {
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxRejections && !accepted; ++attempt) {
      std::set<int> draw;
      while (static_cast<int>(draw.size()) < k_sparsity)
        draw.insert(rng.uniform_int(0, n - 1));
      std::vector<int> sorted(draw.begin(), draw.end());
      int min_gap = n;
      for (int i = 0; i < k_sparsity; ++i) {
        const int a = sorted[i];
        const int b = sorted[(i + 1) % k_sparsity];
        min_gap = std::min(min_gap, ((b - a) % n + n) % n);
      }
      if (min_gap >= delta) {
        support = std::move(sorted);
        accepted = true;
      }
    }
    if (!accepted) {
      // Deterministic fallback: equispaced placement, rotated, with jitter
      // small enough to keep every circular gap >= delta.
      const int spacing = n / k_sparsity;
      const int jitter_bound =
          std::max(0, std::min((n - k_sparsity * delta) / k_sparsity, spacing - delta));
      const int rotation = rng.uniform_int(0, n - 1);
      for (int i = 0; i < k_sparsity; ++i) {
        const int jitter = jitter_bound > 0 ? rng.uniform_int(0, jitter_bound - 1) : 0;
        support.push_back((rotation + i * spacing + jitter) % n);
      }
    }
  }

  std::vector<SpikeEntry> entries;
  entries.reserve(support.size());
  for (int t : support) entries.push_back({t, draw_amplitude(rng)});
  return SparseSignal(n, std::move(entries));
}

std::pair<MeasurementGrid, double> add_noise(const MeasurementGrid& z, double snr_db,
                                             RngStream& rng) {
  if (std::isinf(snr_db)) return {z, 0.0};
  const int count = (2 * z.k_freq() + 1) * z.r_masks();
  const double power = z.values().squaredNorm() / count;
  const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));

  MeasurementGrid noisy = z;
  for (int m = -z.k_freq(); m <= z.k_freq(); ++m)
    for (int r = 0; r < z.r_masks(); ++r) noisy.at(m, r) += sigma * rng.normal();
  return {std::move(noisy), sigma};
}

PhaseTransitionResult run_phase_transition(const TrialConfig& cfg) {
  PhaseTransitionResult result;
  const int cells = static_cast<int>(cfg.k_freq_range.size() * cfg.delta_range.size());
  const int trials = cfg.trials_per_cell;
  result.cells.resize(cells);

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cells) * trials);
  std::vector<long> resamples(static_cast<std::size_t>(cells) * trials, 0);

  const int deltas = static_cast<int>(cfg.delta_range.size());
  parallel_for(cells * trials, cfg.workers, [&](int task) {
    const int cell = task / trials;
    const int trial = task % trials;
    const int k_freq = cfg.k_freq_range[cell / deltas];
    const int delta = cfg.delta_range[cell % deltas];

    TrialSpec spec;
    spec.n = cfg.n;
    spec.delta = delta;
    spec.k_sparsity = std::max(1, cfg.n / std::max(delta, 1));
    spec.k_freq = k_freq;
    spec.l1 = cfg.l1;
    spec.l2 = cfg.l2;
    spec.success_threshold = cfg.success_threshold;
    spec.solver = cfg.solver;

    RngStream rng(cfg.seed, static_cast<std::uint64_t>(cell),
                  static_cast<std::uint64_t>(trial));
    outcomes[task] = run_trial(spec, rng, resamples[task]);
  });

  for (int cell = 0; cell < cells; ++cell) {
    CellResult& cr = result.cells[cell];
    cr.k_freq = cfg.k_freq_range[cell / deltas];
    cr.delta = cfg.delta_range[cell % deltas];
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[cell * trials + t];
      cr.trials.push_back(o);
      cr.resamples += resamples[cell * trials + t];
      if (o.success) ++successes;
    }
    cr.success_rate = static_cast<double>(successes) / trials;
    result.total_resamples += cr.resamples;
  }
  return result;
}

SnrSweepResult run_snr_sweep(const TrialConfig& cfg) {
  if (cfg.snr_list_db.empty()) throw Error("snr_list_db must be nonempty");
  if (cfg.k_freq_range.empty() || cfg.delta_range.empty())
    throw Error("snr sweep needs k_freq_range[0] and delta_range[0]");

  SnrSweepResult result;
  result.k_freq = cfg.k_freq_range.front();
  result.delta = cfg.delta_range.front();
  const int points = static_cast<int>(cfg.snr_list_db.size());
  const int trials = cfg.trials_per_cell;
  result.points.resize(points);

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(points) * trials);
  std::vector<long> resamples(static_cast<std::size_t>(points) * trials, 0);

  parallel_for(points * trials, cfg.workers, [&](int task) {
    const int point = task / trials;
    const int trial = task % trials;

    TrialSpec spec;
    spec.n = cfg.n;
    spec.delta = result.delta;
    spec.k_sparsity = std::max(1, cfg.n / std::max(result.delta, 1));
    spec.k_freq = result.k_freq;
    spec.l1 = cfg.l1;
    spec.l2 = cfg.l2;
    spec.snr_db = cfg.snr_list_db[point];
    spec.success_threshold = cfg.success_threshold;
    spec.solver = cfg.solver;

    RngStream rng(cfg.seed, 0x534E52 /*'SNR'*/ + static_cast<std::uint64_t>(point),
                  static_cast<std::uint64_t>(trial));
    outcomes[task] = run_trial(spec, rng, resamples[task]);
  });

  for (int point = 0; point < points; ++point) {
    SnrPoint& sp = result.points[point];
    sp.snr_db = cfg.snr_list_db[point];
    double sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      const TrialOutcome& o = outcomes[point * trials + t];
      sp.trials.push_back(o);
      sp.resamples += resamples[point * trials + t];
      sum_sq += o.rel_error * o.rel_error;
    }
    sp.mse = sum_sq / trials;
    result.total_resamples += sp.resamples;
  }
  return result;
}

Eigen::VectorXcd align_phase(const Eigen::VectorXcd& xhat, const Eigen::VectorXcd& x) {
  if (x.norm() == 0.0) throw ZeroReference("alignment reference is zero");
  if (xhat.size() != x.size()) throw DimensionMismatch("vector sizes differ");
  const Complex overlap = x.dot(xhat);  // sum conj(x) xhat
  if (std::abs(overlap) == 0.0) return xhat;
  return xhat * std::polar(1.0, -std::arg(overlap));
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 0; w < workers - 1; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

}  // namespace phasels
