#include "phasels/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace phasels {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_nonzero_entries(const Eigen::VectorXcd& z) {
  const double scale = z.cwiseAbs().maxCoeff();
  const double tol = 1e-14 * scale;
  for (int i = 0; i < z.size(); ++i) {
    if (std::abs(z(i)) <= tol)
      throw ZeroEntry("certificate requires a vector with nonzero entries");
  }
}
}  // namespace

VertexGraph::VertexGraph(int vertex_count, std::vector<Edge> edges) : n_(vertex_count) {
  if (n_ < 1) throw DimensionMismatch("graph needs at least one vertex");
  std::set<Edge> set;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw DimensionMismatch("edge endpoint out of range");
    if (u == v) continue;
    set.insert({std::min(u, v), std::max(u, v)});
  }
  edges_.assign(set.begin(), set.end());
  adjacency_.assign(n_, {});
  for (const auto& [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

VertexGraph VertexGraph::from_constraint_graph(const ConstraintGraph& g) {
  const int k = g.k_freq();
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const auto& [u, v] : g.edges()) edges.push_back({u + k, v + k});
  return VertexGraph(2 * k + 1, std::move(edges));
}

std::vector<int> VertexGraph::component_labels() const {
  std::vector<int> label(n_, -1);
  int next = 0;
  for (int start = 0; start < n_; ++start) {
    if (label[start] != -1) continue;
    std::deque<int> queue{start};
    label[start] = next;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adjacency_[u]) {
        if (label[v] == -1) {
          label[v] = next;
          queue.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

bool VertexGraph::connected() const {
  const auto labels = component_labels();
  return *std::max_element(labels.begin(), labels.end()) == 0;
}

std::pair<CertificateMatrix, DualVariables> build_certificate(
    const Eigen::VectorXcd& z, const VertexGraph& g) {
  if (static_cast<int>(z.size()) != g.vertex_count())
    throw DimensionMismatch("vector length and graph size differ");
  require_nonzero_entries(z);

  const int n = g.vertex_count();
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    Eigen::VectorXcd wij = Eigen::VectorXcd::Zero(n);
    wij(i) = std::conj(z(j));
    wij(j) = -std::conj(z(i));
    w.noalias() += wij * wij.adjoint();
  }

  CertificateMatrix cm;
  cm.w = 0.5 * (w + w.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cm.w,
                                                      Eigen::EigenvaluesOnly);
  cm.spectrum = eig.eigenvalues();

  DualVariables duals;
  duals.lambda.setZero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j : g.neighbors(i)) s += std::norm(z(j));
    duals.lambda(i) = s;
  }
  for (const auto& [i, j] : g.edges())
    duals.mu[{i, j}] = -std::conj(z(j)) * z(i);
  return {std::move(cm), std::move(duals)};
}

CertificateReport verify_certificate(const CertificateMatrix& cm,
                                     const Eigen::VectorXcd& z, double rank_tol) {
  if (static_cast<int>(z.size()) != cm.dim())
    throw DimensionMismatch("vector length and certificate size differ");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cm.w);
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const int n = cm.dim();
  const double lambda_max = std::max(vals(n - 1), 0.0);
  const double tol = rank_tol * lambda_max;

  CertificateReport report;
  report.min_eig = vals(0);
  report.psd = vals(0) >= -tol;

  const double quad = std::abs((z.adjoint() * cm.w * z).value());
  report.slackness = quad <= std::max(tol * z.squaredNorm(), 0.0);

  int near_zero = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(vals(i)) <= tol) ++near_zero;
  // Angle via the orthogonal residual; acos of a near-unit cosine would lose
  // half the precision.
  const Eigen::VectorXcd null_vec = eig.eigenvectors().col(0).normalized();
  const Eigen::VectorXcd zn = z.normalized();
  const double residual = (null_vec - zn * zn.dot(null_vec)).norm();
  report.null_angle_to_z = std::asin(std::min(1.0, residual));
  report.rank_ok = near_zero == 1 && report.null_angle_to_z <= 1e-8;
  return report;
}

bool tangent_space_uniqueness(const Eigen::VectorXcd& z, const VertexGraph& g,
                              double rank_tol) {
  if (static_cast<int>(z.size()) != g.vertex_count())
    throw DimensionMismatch("vector length and graph size differ");
  require_nonzero_entries(z);

  // H = z h^* + h z^*; measured entries are the full diagonal and the graph
  // edges. Real-linear in h = (Re h, Im h) in R^{2n}.
  const int n = g.vertex_count();
  const int rows = n + 2 * static_cast<int>(g.edges().size());
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(rows, 2 * n);
  // Diagonal: H[i,i] = 2 Re(conj(z_i) h_i) = 2(Re z_i Re h_i + Im z_i Im h_i).
  for (int i = 0; i < n; ++i) {
    map(i, i) = 2.0 * z(i).real();
    map(i, n + i) = 2.0 * z(i).imag();
  }
  // Edge (i,j): H[i,j] = z_i conj(h_j) + h_i conj(z_j); two real rows.
  int row = n;
  for (const auto& [i, j] : g.edges()) {
    // Re H[i,j] = Re z_i Re h_j + Im z_i Im h_j + Re z_j Re h_i + Im z_j Im h_i
    map(row, j) += z(i).real();
    map(row, n + j) += z(i).imag();
    map(row, i) += z(j).real();
    map(row, n + i) += z(j).imag();
    ++row;
    // Im H[i,j] = Im z_i Re h_j - Re z_i Im h_j - Im z_j Re h_i + Re z_j Im h_i
    map(row, j) += z(i).imag();
    map(row, n + j) -= z(i).real();
    map(row, i) -= z(j).imag();
    map(row, n + i) += z(j).real();
    ++row;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = std::max(rank_tol, 1e-12) * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank == 2 * n - 1;
}

bool uniqueness_oracle(const Eigen::VectorXcd& z, const VertexGraph& g) {
  const int n = g.vertex_count();
  if (n > 8) throw TooLarge("uniqueness oracle is desk-scale only (n <= 8)");
  if (static_cast<int>(z.size()) != n)
    throw DimensionMismatch("vector length and graph size differ");
  require_nonzero_entries(z);

  const std::vector<int> labels = g.component_labels();
  const int components = *std::max_element(labels.begin(), labels.end()) + 1;
  const int free_phases = std::min(components - 1, 3);
  if (free_phases == 0) return true;  // only the gauge family exists

  const double meas_tol = 1e-9 * z.cwiseAbs().maxCoeff() * z.cwiseAbs().maxCoeff();
  const double equiv_tol = 1e-6 * z.norm();

  const auto candidate = [&](const std::vector<double>& phases) {
    Eigen::VectorXcd w(n);
    for (int i = 0; i < n; ++i) {
      const int c = labels[i];
      const double phi = (c >= 1 && c <= free_phases) ? phases[c - 1] : 0.0;
      w(i) = z(i) * std::polar(1.0, phi);
    }
    return w;
  };
  const auto measurement_residual = [&](const Eigen::VectorXcd& w) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(std::norm(w(i)) - std::norm(z(i))));
    for (const auto& [i, j] : g.edges())
      worst = std::max(worst,
                       std::abs(w(i) * std::conj(w(j)) - z(i) * std::conj(z(j))));
    return worst;
  };
  const auto equivalent_to_z = [&](const Eigen::VectorXcd& w) {
    return phase_aligned_distance(w, z) * z.norm() <= equiv_tol;
  };

  const int steps = 360;
  const double near_tol = 1e3 * meas_tol;
  std::vector<int> index(free_phases, 0);
  std::vector<double> phases(free_phases, 0.0);
  while (true) {
    for (int d = 0; d < free_phases; ++d) phases[d] = kTwoPi * index[d] / steps;
    const Eigen::VectorXcd w = candidate(phases);
    const double residual = measurement_residual(w);
    if (residual <= meas_tol && !equivalent_to_z(w)) return false;
    if (residual <= near_tol && !equivalent_to_z(w)) {
      // Near-hit: refine locally (+-1 step bisection) before trusting the
      // coarse grid to have ruled a violation out.
      std::vector<double> probe = phases;
      double step = kTwoPi / steps;
      double best = residual;
      for (int iter = 0; iter < 20; ++iter) {
        for (int d = 0; d < free_phases; ++d) {
          for (double sign : {-1.0, 1.0}) {
            std::vector<double> trial = probe;
            trial[d] += sign * step;
            const Eigen::VectorXcd wt = candidate(trial);
            const double rt = measurement_residual(wt);
            if (rt < best && !equivalent_to_z(wt)) {
              best = rt;
              probe = trial;
            }
          }
        }
        step *= 0.5;
      }
      if (best <= meas_tol && !equivalent_to_z(candidate(probe))) return false;
    }
    // Advance the mixed-radix counter.
    int d = 0;
    while (d < free_phases && ++index[d] == steps) {
      index[d] = 0;
      ++d;
    }
    if (d == free_phases) break;
  }
  return true;
}

}  // namespace phasels
