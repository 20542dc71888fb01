#pragma once

#include <Eigen/Dense>

#include "phasels/phase_completion.hpp"
#include "phasels/signal_model.hpp"

namespace phasels {

using LiftedMatrix = Eigen::MatrixXcd;

enum class SolveMode { full, two_stage };
enum class SolveStatus { converged, max_iterations, infeasible };

struct SolverParams {
  double rho = 1.0;
  double tol_abs = 1e-7;
  double tol_rel = 1e-5;
  int max_iter = 50000;
  double slack = 0.0;  // 0 = equality constraints, > 0 = interval constraints
  SolveMode mode = SolveMode::full;
  double over_relaxation = 1.6;  // in (0, 2); 1 = plain consensus updates
};

struct SolverReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double constraint_violation = 0.0;
  bool converged = false;
  double objective = 0.0;  // entrywise l1 of the returned matrix
  SolveStatus status = SolveStatus::max_iterations;
};

/// The rank-one sensing family of the lifted program: one vector a_{m,r} per
/// measurement with trace(a a^* X) = Z[m, r]. Stored as columns of `sensing`.
struct ConstraintOperator {
  Eigen::MatrixXcd sensing;  // n x M, column i is a_i
  Eigen::VectorXd targets;   // b_i
  Eigen::VectorXd slack;     // per-constraint interval half-width
  int k_freq = 0;

  int count() const { return static_cast<int>(sensing.cols()); }
  int dim() const { return static_cast<int>(sensing.rows()); }
};

ConstraintOperator assemble_constraints(const MaskSet& masks, int k_freq,
                                        const MeasurementGrid& z, double slack = 0.0);

/// Evaluates trace(a_i a_i^* X) for all constraints (real for Hermitian X).
Eigen::VectorXd apply_constraints(const ConstraintOperator& c, const LiftedMatrix& x);

struct LiftedSolution {
  LiftedMatrix x;
  SolverReport report;
};

/// Solves min ||X||_1 s.t. the magnitude constraints and X PSD via
/// three-block consensus splitting (l1 prox, PSD projection, constraint-set
/// projection with a precomputed normal-equations factorization).
LiftedSolution solve_lifted(const ConstraintOperator& c, int n,
                            const SolverParams& params = {},
                            const LiftedMatrix* warm_start = nullptr);

/// Two-stage path: rank-one phase completion of y_K, then min ||X||_1 s.t.
/// F_K X F_K^* = y y^* and X PSD. Equivalent to the full program on valid
/// noiseless instances.
LiftedSolution solve_two_stage(const MeasurementGrid& z, const MaskSet& masks,
                               const SolverParams& params = {});

struct RankOneFactor {
  Eigen::VectorXcd x;
  double rank_gap = 0.0;  // lambda_2 / lambda_1; 1 when degenerate
};

/// Best rank-one factor sqrt(lambda_1) v_1 of a Hermitian matrix.
RankOneFactor rank_one_extract(const LiftedMatrix& xm);

}  // namespace phasels
