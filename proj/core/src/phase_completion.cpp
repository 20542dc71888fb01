#include "phasels/phase_completion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace phasels {

namespace {

int symmetric_residue(long long v, int n) {
  long long r = v % n;
  if (r < 0) r += n;
  return static_cast<int>(2 * r <= n ? r : r - n);
}

int bfs_component_size(const ConstraintGraph& g, int start) {
  const int k = g.k_freq();
  std::vector<char> seen(g.vertex_count(), 0);
  std::deque<int> queue{start};
  seen[start + k] = 1;
  int count = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    ++count;
    for (int v : g.neighbors(u)) {
      if (!seen[v + k]) {
        seen[v + k] = 1;
        queue.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

ConstraintGraph::ConstraintGraph(int k_freq, int l1, int l2) : k_freq_(k_freq) {
  std::set<Edge> set;
  for (int l : {l1, l2}) {
    for (int m = -k_freq_; m <= k_freq_; ++m) {
      const int other = m - l;
      if (other < -k_freq_ || other > k_freq_ || other == m) continue;
      set.insert({std::min(m, other), std::max(m, other)});
    }
  }
  edges_.assign(set.begin(), set.end());
  build_adjacency();
}

ConstraintGraph::ConstraintGraph(int k_freq, std::vector<Edge> edges)
    : k_freq_(k_freq) {
  std::set<Edge> set;
  for (auto [u, v] : edges) {
    if (u < -k_freq_ || u > k_freq_ || v < -k_freq_ || v > k_freq_)
      throw DimensionMismatch("edge endpoint outside {-K..K}");
    if (u == v) continue;
    set.insert({std::min(u, v), std::max(u, v)});
  }
  edges_.assign(set.begin(), set.end());
  build_adjacency();
}

void ConstraintGraph::build_adjacency() {
  adjacency_.assign(vertex_count(), {});
  for (const auto& [u, v] : edges_) {
    adjacency_[u + k_freq_].push_back(v);
    adjacency_[v + k_freq_].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::string ConstraintGraph::edge_list_csv() const {
  std::ostringstream out;
  out << "u,v\n";
  for (const auto& [u, v] : edges_) out << u << "," << v << "\n";
  return out.str();
}

bool check_connectivity(const ConstraintGraph& g) {
  return bfs_component_size(g, -g.k_freq()) == g.vertex_count();
}

PairwiseData extract_pairwise(const MeasurementGrid& z, const MaskSet& masks) {
  if (z.r_masks() != MaskSet::kMaskCount)
    throw MissingMask("measurement grid does not cover the five-mask family");
  const int k = z.k_freq();
  const int n = masks.grid_length();

  PairwiseData p;
  p.k_freq = k;
  p.diag.resize(2 * k + 1);
  for (int m = -k; m <= k; ++m) p.diag(m + k) = z.at(m, 0);

  // Duplicate pairs (possible when both shifts hit the same frequency pair)
  // are averaged.
  std::map<std::pair<int, int>, std::pair<Complex, int>> acc;
  const std::pair<int, int> shift_masks[2] = {{1, 2}, {3, 4}};
  const int shifts[2] = {masks.shift_l1(), masks.shift_l2()};
  for (int s = 0; s < 2; ++s) {
    const int l = shifts[s];
    const auto [r_plus, r_quad] = shift_masks[s];
    for (int m = -k; m <= k; ++m) {
      const int partner = symmetric_residue(static_cast<long long>(m) - l, n);
      if (partner < -k || partner > k || partner == m) continue;
      // Z[m, r+] = |y[m]|^2 + |y[p]|^2 + 2 Re(y[m] conj(y[p]))
      // Z[m, ri] = |y[m]|^2 + |y[p]|^2 - 2 Im(y[m] conj(y[p]))
      const double base = z.at(m, 0) + z.at(partner, 0);
      const double re = 0.5 * (z.at(m, r_plus) - base);
      const double im = 0.5 * (base - z.at(m, r_quad));
      const Complex value(re, im);  // y[m] conj(y[partner])
      const std::pair<int, int> key{std::min(m, partner), std::max(m, partner)};
      const Complex oriented = m < partner ? value : std::conj(value);
      auto [it, inserted] = acc.try_emplace(key, oriented, 1);
      if (!inserted) {
        it->second.first += oriented;
        it->second.second += 1;
      }
    }
  }
  for (const auto& [key, sum_count] : acc)
    p.cross[key] = sum_count.first / static_cast<double>(sum_count.second);
  return p;
}

LowFreqVector complete_rank_one(const PairwiseData& p, const ConstraintGraph& g,
                                CompletionMode mode, double phase_tol,
                                double zero_tol_rel, int anchor) {
  const int k = g.k_freq();
  if (p.k_freq != k) throw DimensionMismatch("pairwise data and graph disagree on K");
  if (anchor < -k || anchor > k) throw DimensionMismatch("anchor vertex out of range");
  if (!check_connectivity(g)) throw DisconnectedGraph("constraint graph is disconnected");

  // Condition 2 is enforced strictly on the noiseless path; the spectral
  // mode clamps noisy magnitudes at zero instead (a near-zero |y[m]| only
  // deweights that vertex in the synchronization).
  const double zero_tol = zero_tol_rel * std::max(p.diag.maxCoeff(), 0.0);
  if (mode == CompletionMode::exact_tree) {
    for (int m = -k; m <= k; ++m) {
      if (p.diag_at(m) <= zero_tol)
        throw ZeroFrequency("a measured frequency magnitude is zero (condition 2)");
    }
  } else if (p.diag.maxCoeff() <= 0.0) {
    throw ZeroFrequency("all measured magnitudes vanish");
  }

  Eigen::VectorXd magnitudes(2 * k + 1);
  for (int i = 0; i < 2 * k + 1; ++i) magnitudes(i) = std::sqrt(std::max(p.diag(i), 0.0));

  const auto edge_usable = [&](int u, int v, Complex& value) {
    const auto it = p.cross.find({std::min(u, v), std::max(u, v)});
    if (it == p.cross.end()) return false;
    value = u < v ? it->second : std::conj(it->second);
    const double floor =
        phase_tol * std::sqrt(std::max(p.diag_at(u), 0.0) * std::max(p.diag_at(v), 0.0));
    return std::abs(value) >= floor && std::abs(value) > 0.0;
  };

  LowFreqVector yhat(k);
  if (mode == CompletionMode::exact_tree) {
    // BFS over usable edges only; the anchor's phase is 0.
    std::vector<double> phase(2 * k + 1, 0.0);
    std::vector<char> seen(2 * k + 1, 0);
    std::deque<int> queue{anchor};
    seen[anchor + k] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : g.neighbors(u)) {
        if (seen[v + k]) continue;
        Complex value;  // y[u] conj(y[v])
        if (!edge_usable(u, v, value)) continue;
        phase[v + k] = phase[u + k] - std::arg(value);
        seen[v + k] = 1;
        ++reached;
        queue.push_back(v);
      }
    }
    if (reached != 2 * k + 1)
      throw ZeroFrequency("phase propagation tree disconnected by near-zero cross terms");
    for (int m = -k; m <= k; ++m)
      yhat.at(m) = std::polar(magnitudes(m + k), phase[m + k]);
  } else {
    // Edge-phase matrix; the leading eigenvector synchronizes the phases.
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(2 * k + 1, 2 * k + 1);
    for (const auto& [key, raw] : p.cross) {
      const auto [u, v] = key;
      Complex value;
      if (!edge_usable(u, v, value)) continue;
      h(u + k, v + k) = value / std::abs(value);
      h(v + k, u + k) = std::conj(h(u + k, v + k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const Eigen::VectorXcd lead = eig.eigenvectors().col(2 * k);
    for (int m = -k; m <= k; ++m) {
      const Complex w = lead(m + k);
      const Complex unit = std::abs(w) > 0.0 ? w / std::abs(w) : Complex(1.0, 0.0);
      yhat.at(m) = magnitudes(m + k) * unit;
    }
  }
  return yhat;
}

}  // namespace phasels
