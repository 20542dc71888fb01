#pragma once

#include <map>
#include <utility>
#include <vector>

#include "phasels/phase_completion.hpp"
#include "phasels/signal_model.hpp"

namespace phasels {

/// Undirected graph on vertices {0..n-1}; the generalized setting of the
/// rank-one completion uniqueness result (the measured-frequency graph is a
/// special case, relabeled m -> m + K).
class VertexGraph {
 public:
  using Edge = std::pair<int, int>;  // canonical u < v

  VertexGraph(int vertex_count, std::vector<Edge> edges);
  static VertexGraph from_constraint_graph(const ConstraintGraph& g);

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }
  bool connected() const;
  /// Component label per vertex, labels 0.. in first-seen order.
  std::vector<int> component_labels() const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// W = sum over edges of w_ij w_ij^* with w_ij = conj(z[j]) e_i - conj(z[i]) e_j.
/// PSD by construction; for connected graphs and entrywise-nonzero z its
/// kernel is exactly span{z}.
struct CertificateMatrix {
  Eigen::MatrixXcd w;
  Eigen::VectorXd spectrum;  // ascending

  int dim() const { return static_cast<int>(w.rows()); }
};

/// Optimal dual variables reassembling W: lambda on the diagonal pattern,
/// mu on the edge pattern.
struct DualVariables {
  Eigen::VectorXd lambda;
  std::map<std::pair<int, int>, Complex> mu;
};

struct CertificateReport {
  bool psd = false;        // min eigenvalue >= -rank_tol * lambda_max
  bool slackness = false;  // |z^* W z| within tolerance of zero
  bool rank_ok = false;    // exactly one near-zero eigenvalue, eigvec || z
  double min_eig = 0.0;
  double null_angle_to_z = 0.0;

  bool all_ok() const { return psd && slackness && rank_ok; }
};

std::pair<CertificateMatrix, DualVariables> build_certificate(
    const Eigen::VectorXcd& z, const VertexGraph& g);

CertificateReport verify_certificate(const CertificateMatrix& cm,
                                     const Eigen::VectorXcd& z,
                                     double rank_tol = 1e-9);

/// True iff the measurement pattern (diagonal everywhere + graph edges) kills
/// every tangent-space perturbation z h^* + h z^* except the phase gauge:
/// the real-linear constraint map on h has numerical rank 2n-1.
bool tangent_space_uniqueness(const Eigen::VectorXcd& z, const VertexGraph& g,
                              double rank_tol = 1e-9);

/// Desk-scale brute force (n <= 8): grid-searches unit-modulus phase
/// assignments per connected component for a measurement-consistent
/// completion outside the global-phase family. Independent of the
/// certificate path; must agree with graph connectivity for nonzero z.
bool uniqueness_oracle(const Eigen::VectorXcd& z, const VertexGraph& g);

}  // namespace phasels
