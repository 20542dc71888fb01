#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phasels/signal_model.hpp"

namespace phasels {

/// Constraint graph on the measured frequencies {-K..K}: an edge joins two
/// frequencies whose cross-product y[u] conj(y[v]) is fixed by the masked
/// measurements. Every vertex also carries its own magnitude |y[m]|^2.
class ConstraintGraph {
 public:
  using Edge = std::pair<int, int>;  // canonical u < v

  ConstraintGraph(int k_freq, int l1, int l2);
  ConstraintGraph(int k_freq, std::vector<Edge> edges);

  int k_freq() const { return k_freq_; }
  int vertex_count() const { return 2 * k_freq_ + 1; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbors of a vertex in ascending order.
  const std::vector<int>& neighbors(int vertex) const {
    return adjacency_[vertex + k_freq_];
  }
  /// Edge list as CSV with header "u,v" (debug export).
  std::string edge_list_csv() const;

 private:
  void build_adjacency();

  int k_freq_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

inline ConstraintGraph build_constraint_graph(int k_freq, int l1, int l2) {
  return ConstraintGraph(k_freq, l1, l2);
}

/// True iff a single connected component spans all 2K+1 vertices (BFS).
bool check_connectivity(const ConstraintGraph& g);

/// Diagonal magnitudes |y[m]|^2 and the measured cross-products
/// cross[(u,v)] = y[u] conj(y[v]) for canonical u < v.
struct PairwiseData {
  int k_freq = 0;
  Eigen::VectorXd diag;  // index m + K
  std::map<std::pair<int, int>, Complex> cross;

  double diag_at(int m) const { return diag(m + k_freq); }
};

/// Rewrites the five-mask magnitude measurements as the fixed entries of
/// Y = y_K y_K^*: diagonal from the identity mask, cross terms from the
/// I + D^(l) and I - i D^(l) mask pairs. Index arithmetic wraps mod n; only
/// pairs with both endpoints in {-K..K} are emitted.
PairwiseData extract_pairwise(const MeasurementGrid& z, const MaskSet& masks);

enum class CompletionMode { exact_tree, spectral_sync };

/// Recovers y_K up to a global phase from the pairwise data, assuming the
/// graph is connected and no measured frequency vanishes (condition 2).
/// exact_tree propagates phases along a BFS spanning tree anchored at the
/// given vertex (the anchor's phase is set to 0; any anchor gives the same
/// result up to a global phase); spectral_sync takes the leading eigenvector
/// of the edge-phase matrix (robust under noise). Magnitudes are
/// sqrt(max(diag, 0)).
LowFreqVector complete_rank_one(const PairwiseData& p, const ConstraintGraph& g,
                                CompletionMode mode, double phase_tol = 1e-8,
                                double zero_tol_rel = 1e-18, int anchor = 0);

}  // namespace phasels
