#include "phasels/lifted_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

namespace phasels {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void hermitize(Eigen::MatrixXcd& x) { x = 0.5 * (x + x.adjoint()).eval(); }

double entrywise_l1(const Eigen::MatrixXcd& x) { return x.cwiseAbs().sum(); }

void soft_threshold(const Eigen::MatrixXcd& v, double tau, Eigen::MatrixXcd& out) {
  out.resize(v.rows(), v.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const Complex value = v(i, j);
      const double mag = std::abs(value);
      out(i, j) = mag <= tau ? Complex(0.0, 0.0) : value * (1.0 - tau / mag);
    }
  }
}

void psd_project(const Eigen::MatrixXcd& v, Eigen::MatrixXcd& out) {
  Eigen::MatrixXcd h = 0.5 * (v + v.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  out.noalias() = eig.eigenvectors() * clipped.asDiagonal() *
                  eig.eigenvectors().adjoint();
}

/// Consensus ADMM over three blocks: l1 prox, PSD projection, and a
/// problem-specific projection onto the data-constraint set.
struct ConsensusSpec {
  int n = 0;
  std::function<void(const Eigen::MatrixXcd&, Eigen::MatrixXcd&)> data_projection;
  std::function<double(const Eigen::MatrixXcd&)> violation;
  Eigen::MatrixXcd initial;
  double violation_scale = 1.0;
};

LiftedSolution run_consensus(const ConsensusSpec& spec, const SolverParams& params) {
  const int n = spec.n;
  const double sqrt3 = std::sqrt(3.0);
  double rho = params.rho;

  Eigen::MatrixXcd xc = spec.initial;
  hermitize(xc);
  Eigen::MatrixXcd x1 = xc, x2 = xc, x3 = xc;
  Eigen::MatrixXcd u1 = Eigen::MatrixXcd::Zero(n, n), u2 = u1, u3 = u1;
  Eigen::MatrixXcd xc_prev(n, n), v(n, n);

  SolverReport report;
  double best_violation = std::numeric_limits<double>::infinity();
  double window_best = best_violation;
  const int stall_window = 1000;
  const double infeasible_floor = 1e3 * params.tol_abs * spec.violation_scale;

  const double alpha = params.over_relaxation;
  int iter = 0;
  for (; iter < params.max_iter; ++iter) {
    xc_prev = xc;

    v = xc - u1;
    soft_threshold(v, 1.0 / rho, x1);
    v = xc - u2;
    psd_project(v, x2);
    v = xc - u3;
    spec.data_projection(v, x3);

    if (alpha != 1.0) {
      x1 = alpha * x1 + (1.0 - alpha) * xc;
      x2 = alpha * x2 + (1.0 - alpha) * xc;
      x3 = alpha * x3 + (1.0 - alpha) * xc;
    }
    xc = (x1 + x2 + x3 + u1 + u2 + u3) / 3.0;
    hermitize(xc);
    u1 += x1 - xc;
    u2 += x2 - xc;
    u3 += x3 - xc;

    const double primal = std::sqrt((x1 - xc).squaredNorm() + (x2 - xc).squaredNorm() +
                                    (x3 - xc).squaredNorm());
    const double dual = sqrt3 * rho * (xc - xc_prev).norm();
    report.primal_residual = primal;
    report.dual_residual = dual;

    const double block_scale =
        std::max(std::sqrt(x1.squaredNorm() + x2.squaredNorm() + x3.squaredNorm()),
                 sqrt3 * xc.norm());
    const double dual_scale =
        rho * std::sqrt(u1.squaredNorm() + u2.squaredNorm() + u3.squaredNorm());
    const double eps_pri = sqrt3 * n * params.tol_abs + params.tol_rel * block_scale;
    const double eps_dual = sqrt3 * n * params.tol_abs + params.tol_rel * dual_scale;

    if (primal <= eps_pri && dual <= eps_dual) {
      report.converged = true;
      report.status = SolveStatus::converged;
      ++iter;
      break;
    }

    // Residual balancing keeps the two residuals within a decade.
    if ((iter + 1) % 10 == 0) {
      double factor = 1.0;
      if (primal > 10.0 * dual)
        factor = 2.0;
      else if (dual > 10.0 * primal)
        factor = 0.5;
      if (factor != 1.0) {
        rho *= factor;
        u1 /= factor;
        u2 /= factor;
        u3 /= factor;
      }
    }

    // Infeasibility: the violation stalls well above tolerance.
    if ((iter + 1) % 50 == 0) {
      const double viol = spec.violation(xc);
      best_violation = std::min(best_violation, viol);
      if ((iter + 1) % stall_window == 0) {
        if (best_violation > infeasible_floor &&
            best_violation > (1.0 - 1e-3) * window_best) {
          report.status = SolveStatus::infeasible;
          ++iter;
          break;
        }
        window_best = best_violation;
      }
    }
  }

  // The consensus average can carry residual-level negative eigenvalues;
  // return its PSD projection so the output is a genuine cone member.
  Eigen::MatrixXcd final_x(n, n);
  psd_project(xc, final_x);
  report.iterations = iter;
  report.constraint_violation = spec.violation(final_x);
  report.objective = entrywise_l1(final_x);
  if (!report.converged && report.status != SolveStatus::infeasible)
    report.status = SolveStatus::max_iterations;
  return {std::move(final_x), std::move(report)};
}

Eigen::MatrixXcd lowfreq_dft_matrix(int n, int k_freq) {
  Eigen::MatrixXcd f(2 * k_freq + 1, n);
  for (int m = -k_freq; m <= k_freq; ++m)
    for (int np = 0; np < n; ++np)
      f(m + k_freq, np) = std::polar(1.0, -kTwoPi * static_cast<double>(m) * np / n);
  return f;
}

}  // namespace

ConstraintOperator assemble_constraints(const MaskSet& masks, int k_freq,
                                        const MeasurementGrid& z, double slack) {
  if (z.k_freq() != k_freq)
    throw DimensionMismatch("measurement grid and K disagree");
  if (z.r_masks() != MaskSet::kMaskCount)
    throw DimensionMismatch("measurement grid does not cover the five masks");
  const int n = masks.grid_length();
  if (2 * k_freq + 1 > n) throw DimensionMismatch("2K+1 must not exceed n");

  const int band = 2 * k_freq + 1;
  ConstraintOperator c;
  c.k_freq = k_freq;
  c.sensing.resize(n, band * MaskSet::kMaskCount);
  c.targets.resize(band * MaskSet::kMaskCount);
  c.slack = Eigen::VectorXd::Constant(band * MaskSet::kMaskCount, std::max(slack, 0.0));

  for (int r = 0; r < MaskSet::kMaskCount; ++r) {
    const Eigen::VectorXcd& d = masks.mask(r);
    for (int m = -k_freq; m <= k_freq; ++m) {
      const int idx = r * band + (m + k_freq);
      for (int np = 0; np < n; ++np) {
        const Complex fm = std::polar(1.0, kTwoPi * static_cast<double>(m) * np / n);
        c.sensing(np, idx) = std::conj(d(np)) * fm;
      }
      c.targets(idx) = z.at(m, r);
    }
  }
  return c;
}

Eigen::VectorXd apply_constraints(const ConstraintOperator& c, const LiftedMatrix& x) {
  if (x.rows() != c.dim() || x.cols() != c.dim())
    throw DimensionMismatch("matrix dimension does not match the sensing family");
  const Eigen::MatrixXcd prod = x * c.sensing;  // n x M
  Eigen::VectorXd out(c.count());
  for (int i = 0; i < c.count(); ++i)
    out(i) = c.sensing.col(i).dot(prod.col(i)).real();
  return out;
}

LiftedSolution solve_lifted(const ConstraintOperator& c, int n,
                            const SolverParams& params,
                            const LiftedMatrix* warm_start) {
  if (c.dim() != n) throw DimensionMismatch("sensing family dimension differs from n");

  // Normal-equations factorization of the stacked sensing vectors:
  // G_ij = |<a_i, a_j>|^2, pseudo-inverted once.
  const Eigen::MatrixXcd gram = c.sensing.adjoint() * c.sensing;
  const Eigen::MatrixXd g = gram.cwiseAbs2();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> geig(g);
  const Eigen::VectorXd& gvals = geig.eigenvalues();
  const double gtol = 1e-12 * std::max(gvals(g.rows() - 1), 0.0);
  Eigen::VectorXd ginv = Eigen::VectorXd::Zero(g.rows());
  for (int i = 0; i < g.rows(); ++i)
    if (gvals(i) > gtol) ginv(i) = 1.0 / gvals(i);
  const Eigen::MatrixXd gpinv =
      geig.eigenvectors() * ginv.asDiagonal() * geig.eigenvectors().transpose();

  const Eigen::VectorXd lo = c.targets - c.slack;
  const Eigen::VectorXd hi = c.targets + c.slack;

  ConsensusSpec spec;
  spec.n = n;
  spec.violation_scale = std::max(1.0, c.targets.cwiseAbs().maxCoeff());
  spec.data_projection = [&c, &gpinv, &lo, &hi](const Eigen::MatrixXcd& v,
                                                Eigen::MatrixXcd& out) {
    const Eigen::VectorXd q = apply_constraints(c, v);
    const Eigen::VectorXd target = q.cwiseMax(lo).cwiseMin(hi);
    const Eigen::VectorXd w = gpinv * (target - q);
    out = v;
    out.noalias() += (c.sensing * w.asDiagonal()) * c.sensing.adjoint();
    hermitize(out);
  };
  spec.violation = [&c, &lo, &hi](const Eigen::MatrixXcd& x) {
    const Eigen::VectorXd q = apply_constraints(c, x);
    return std::max({0.0, (q - hi).maxCoeff(), (lo - q).maxCoeff()});
  };

  if (warm_start != nullptr && warm_start->rows() == n && warm_start->cols() == n) {
    spec.initial = *warm_start;
  } else {
    // Start from the least-norm matrix reproducing the targets.
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(n, n);
    spec.initial = zero;
    spec.data_projection(zero, spec.initial);
  }

  return run_consensus(spec, params);
}

LiftedSolution solve_two_stage(const MeasurementGrid& z, const MaskSet& masks,
                               const SolverParams& params) {
  const int n = masks.grid_length();
  const int k_freq = z.k_freq();

  const PairwiseData pairwise = extract_pairwise(z, masks);
  const ConstraintGraph graph(k_freq, masks.shift_l1(), masks.shift_l2());
  const CompletionMode mode = params.slack > 0.0 ? CompletionMode::spectral_sync
                                                 : CompletionMode::exact_tree;
  const LowFreqVector yhat = complete_rank_one(pairwise, graph, mode);

  const Eigen::MatrixXcd f = lowfreq_dft_matrix(n, k_freq);
  const Eigen::MatrixXcd b = yhat.values() * yhat.values().adjoint();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);

  ConsensusSpec spec;
  spec.n = n;
  spec.violation_scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  spec.data_projection = [&f, &b, inv_n2](const Eigen::MatrixXcd& v,
                                          Eigen::MatrixXcd& out) {
    const Eigen::MatrixXcd residual = b - f * v * f.adjoint();
    out = v + inv_n2 * (f.adjoint() * residual * f);
    hermitize(out);
  };
  spec.violation = [&f, &b](const Eigen::MatrixXcd& x) {
    return (f * x * f.adjoint() - b).cwiseAbs().maxCoeff();
  };
  spec.initial = inv_n2 * (f.adjoint() * b * f);

  LiftedSolution solution = run_consensus(spec, params);
  return solution;
}

RankOneFactor rank_one_extract(const LiftedMatrix& xm) {
  Eigen::MatrixXcd h = 0.5 * (xm + xm.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const int n = static_cast<int>(h.rows());
  const double lambda1 = eig.eigenvalues()(n - 1);

  RankOneFactor factor;
  if (lambda1 <= 0.0) {
    factor.x = Eigen::VectorXcd::Zero(n);
    factor.rank_gap = 1.0;
    return factor;
  }
  factor.x = std::sqrt(lambda1) * eig.eigenvectors().col(n - 1);
  const double lambda2 = n >= 2 ? std::max(eig.eigenvalues()(n - 2), 0.0) : 0.0;
  factor.rank_gap = lambda2 / lambda1;
  return factor;
}

}  // namespace phasels
