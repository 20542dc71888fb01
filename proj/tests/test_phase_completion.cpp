#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "phasels/phase_completion.hpp"
#include "phasels/rng.hpp"

using namespace phasels;

namespace {

SparseSignal random_sparse(int n, int k, RngStream& rng) {
  std::vector<SpikeEntry> entries;
  std::vector<int> used;
  while (static_cast<int>(entries.size()) < k) {
    const int t = rng.uniform_int(0, n - 1);
    if (std::find(used.begin(), used.end(), t) != used.end()) continue;
    used.push_back(t);
    entries.push_back({t, Complex(rng.normal(), rng.normal())});
  }
  return SparseSignal(n, std::move(entries));
}

bool has_edge(const ConstraintGraph& g, int u, int v) {
  const auto key = std::make_pair(std::min(u, v), std::max(u, v));
  return std::find(g.edges().begin(), g.edges().end(), key) != g.edges().end();
}

}  // namespace

TEST_CASE("constraint graph edges and connectivity") {
  SUBCASE("K=2, l1=1, l2=2: chain plus skip edges, connected") {
    const ConstraintGraph g(2, 1, 2);
    for (const auto& [u, v] : std::vector<std::pair<int, int>>{
             {-2, -1}, {-1, 0}, {0, 1}, {1, 2}, {-2, 0}, {-1, 1}, {0, 2}})
      CHECK(has_edge(g, u, v));
    CHECK(g.edges().size() == 7);
    CHECK(check_connectivity(g));
  }
  SUBCASE("K=2, l1=2, l2=4: even/odd classes disconnect") {
    const ConstraintGraph g(2, 2, 4);
    CHECK_FALSE(check_connectivity(g));
  }
  SUBCASE("K=1, l1=1, l2=2: the skip edge (-1,1) appears") {
    const ConstraintGraph g(1, 1, 2);
    CHECK(has_edge(g, -1, 1));
    CHECK(check_connectivity(g));
  }
  SUBCASE("K=0 singleton graph is connected") {
    CHECK(check_connectivity(ConstraintGraph(0, 1, 2)));
  }
  SUBCASE("coprime shifts within the band connect the graph") {
    for (int k_freq : {3, 5, 9}) {
      CHECK(check_connectivity(ConstraintGraph(k_freq, 2, 3)));
      CHECK(check_connectivity(ConstraintGraph(k_freq, 1, 2)));
    }
  }
  SUBCASE("gcd d > 1 splits into residue classes whenever 2K+1 > d") {
    for (int k_freq : {1, 2, 3, 5}) {
      const ConstraintGraph g(k_freq, 2, 4);
      CHECK_FALSE(check_connectivity(g));
    }
  }
  SUBCASE("edge list CSV export") {
    const ConstraintGraph g(1, 1, 2);
    const std::string csv = g.edge_list_csv();
    CHECK(csv.rfind("u,v\n", 0) == 0);
    CHECK(csv.find("-1,0\n") != std::string::npos);
    CHECK(csv.find("-1,1\n") != std::string::npos);
  }
}

TEST_CASE("extract_pairwise") {
  SUBCASE("flat spectrum: unit diagonal and unit cross terms") {
    const SparseSignal x(8, {{0, {1, 0}}});
    const MaskSet masks(8, 1, 2);
    const PairwiseData p = extract_pairwise(forward_measure(x, masks, 3), masks);
    for (int m = -3; m <= 3; ++m) CHECK(p.diag_at(m) == doctest::Approx(1.0));
    CHECK_FALSE(p.cross.empty());
    for (const auto& [key, value] : p.cross)
      CHECK(std::abs(value - Complex(1, 0)) < 1e-12);
  }
  SUBCASE("cross terms equal oracle products y[u] conj(y[v])") {
    RngStream rng(21);
    for (int rep = 0; rep < 20; ++rep) {
      const SparseSignal x = random_sparse(8, 3, rng);
      const MaskSet masks(8, 1, 2);
      const PairwiseData p = extract_pairwise(forward_measure(x, masks, 3), masks);
      const Eigen::VectorXcd y = oracle::low_freq(x.dense(), 3);
      REQUIRE(p.cross.count({0, 1}) == 1);
      const Complex expected = y(3) * std::conj(y(4));  // y[0] conj(y[1])
      CHECK(std::abs(p.cross.at({0, 1}) - expected) <=
            1e-10 * std::max(1.0, std::abs(expected)));
      for (const auto& [key, value] : p.cross) {
        const Complex want = y(key.first + 3) * std::conj(y(key.second + 3));
        CHECK(std::abs(value - want) <= 1e-10 * std::max(1.0, std::abs(want)));
      }
    }
  }
  SUBCASE("noiseless data satisfies Cauchy-Schwarz exactly") {
    RngStream rng(22);
    for (int rep = 0; rep < 10; ++rep) {
      const SparseSignal x = random_sparse(12, 4, rng);
      const MaskSet masks(12, 2, 3);
      const PairwiseData p = extract_pairwise(forward_measure(x, masks, 5), masks);
      for (const auto& [key, value] : p.cross) {
        const double bound = p.diag_at(key.first) * p.diag_at(key.second);
        CHECK(std::norm(value) <= bound * (1.0 + 1e-10) + 1e-10);
      }
    }
  }
  SUBCASE("missing masks are rejected") {
    const MaskSet masks(8, 1, 2);
    MeasurementGrid z(3, 3);  // only three mask columns
    CHECK_THROWS_AS(extract_pairwise(z, masks), MissingMask);
  }
}

TEST_CASE("complete_rank_one exact_tree") {
  SUBCASE("flat data completes to the all-ones vector up to phase") {
    PairwiseData p;
    p.k_freq = 2;
    p.diag = Eigen::VectorXd::Ones(5);
    const ConstraintGraph g(2, 1, 2);
    for (const auto& [u, v] : g.edges()) p.cross[{u, v}] = Complex(1, 0);
    const LowFreqVector yhat = complete_rank_one(p, g, CompletionMode::exact_tree);
    CHECK(phase_aligned_distance(yhat.values(), Eigen::VectorXcd::Ones(5)) < 1e-12);
  }
  SUBCASE("hand-propagated three-vertex chain") {
    // diag (1,4,1), cross[(-1,0)] = 2i, cross[(0,1)] = -2i. Anchored at
    // vertex 0 the phases satisfy arg y[-1] - arg y[0] = pi/2, giving
    // (i, 2, i) up to a global unit factor.
    PairwiseData p;
    p.k_freq = 1;
    p.diag.resize(3);
    p.diag << 1.0, 4.0, 1.0;
    p.cross[{-1, 0}] = Complex(0, 2);
    p.cross[{0, 1}] = Complex(0, -2);
    const ConstraintGraph g(1, {{-1, 0}, {0, 1}});
    const LowFreqVector yhat = complete_rank_one(p, g, CompletionMode::exact_tree);
    Eigen::VectorXcd expected(3);
    expected << Complex(0, 1), Complex(2, 0), Complex(0, 1);
    CHECK(phase_aligned_distance(yhat.values(), expected) < 1e-12);
    CHECK(std::arg(yhat.at(-1)) - std::arg(yhat.at(0)) ==
          doctest::Approx(1.5707963267948966));
  }
  SUBCASE("random noiseless instances complete to the oracle y_K") {
    RngStream rng(23);
    for (int rep = 0; rep < 20; ++rep) {
      const SparseSignal x = random_sparse(8, 3, rng);
      const MaskSet masks(8, 1, 2);
      const PairwiseData p = extract_pairwise(forward_measure(x, masks, 3), masks);
      const ConstraintGraph g(3, 1, 2);
      const Eigen::VectorXcd y = oracle::low_freq(x.dense(), 3);
      if (y.cwiseAbs().minCoeff() < 1e-6 * y.norm()) continue;  // condition 2
      const LowFreqVector yhat = complete_rank_one(p, g, CompletionMode::exact_tree);
      CHECK(phase_aligned_distance(yhat.values(), y) <= 1e-10);
    }
  }
  SUBCASE("anchor independence: any anchor differs by a global phase") {
    RngStream rng(24);
    const SparseSignal x = random_sparse(12, 4, rng);
    const MaskSet masks(12, 2, 3);
    const PairwiseData p = extract_pairwise(forward_measure(x, masks, 5), masks);
    const ConstraintGraph g(5, 2, 3);
    const LowFreqVector base =
        complete_rank_one(p, g, CompletionMode::exact_tree, 1e-8, 1e-18, 0);
    for (int anchor : {-5, -2, 3, 5}) {
      const LowFreqVector other =
          complete_rank_one(p, g, CompletionMode::exact_tree, 1e-8, 1e-18, anchor);
      CHECK(phase_aligned_distance(other.values(), base.values()) < 1e-12);
    }
  }
}

TEST_CASE("complete_rank_one spectral_sync") {
  SUBCASE("noiseless spectral synchronization matches the tree solution") {
    RngStream rng(25);
    for (int rep = 0; rep < 15; ++rep) {
      const int n = 16, k_freq = 6;
      const SparseSignal x = random_sparse(n, 4, rng);
      const MaskSet masks(n, 2, 3);
      const PairwiseData p = extract_pairwise(forward_measure(x, masks, k_freq), masks);
      const ConstraintGraph g(k_freq, 2, 3);
      const Eigen::VectorXcd y = oracle::low_freq(x.dense(), k_freq);
      if (y.cwiseAbs().minCoeff() < 1e-6 * y.norm()) continue;
      const LowFreqVector tree = complete_rank_one(p, g, CompletionMode::exact_tree);
      const LowFreqVector sync = complete_rank_one(p, g, CompletionMode::spectral_sync);
      CHECK(phase_aligned_distance(sync.values(), tree.values()) <= 1e-6);
    }
  }
  SUBCASE("noisy magnitudes are clamped at zero before the square root") {
    PairwiseData p;
    p.k_freq = 1;
    p.diag.resize(3);
    p.diag << 1.0, 1.0, -1e-3;  // noise pushed a magnitude negative
    const ConstraintGraph g(1, {{-1, 0}, {0, 1}});
    p.cross[{-1, 0}] = Complex(1, 0);
    p.cross[{0, 1}] = Complex(1, 0);
    const LowFreqVector yhat = complete_rank_one(p, g, CompletionMode::spectral_sync);
    CHECK(std::abs(yhat.at(1)) == 0.0);  // clamped, not propagated as NaN
    // The noiseless path enforces condition 2 strictly.
    CHECK_THROWS_AS(complete_rank_one(p, g, CompletionMode::exact_tree), ZeroFrequency);
  }
}

TEST_CASE("complete_rank_one error paths") {
  SUBCASE("disconnected graph") {
    PairwiseData p;
    p.k_freq = 1;
    p.diag = Eigen::VectorXd::Ones(3);
    p.cross[{-1, 0}] = Complex(1, 0);
    const ConstraintGraph g(1, {{-1, 0}});  // vertex 1 isolated
    CHECK_THROWS_AS(complete_rank_one(p, g, CompletionMode::exact_tree),
                    DisconnectedGraph);
  }
  SUBCASE("zero frequency magnitude") {
    PairwiseData p;
    p.k_freq = 1;
    p.diag.resize(3);
    p.diag << 1.0, 0.0, 1.0;
    const ConstraintGraph g(1, {{-1, 0}, {0, 1}});
    p.cross[{-1, 0}] = Complex(0, 0);
    p.cross[{0, 1}] = Complex(0, 0);
    CHECK_THROWS_AS(complete_rank_one(p, g, CompletionMode::exact_tree), ZeroFrequency);
  }
  SUBCASE("near-zero cross terms that disconnect the tree raise ZeroFrequency") {
    PairwiseData p;
    p.k_freq = 1;
    p.diag = Eigen::VectorXd::Ones(3);
    p.cross[{-1, 0}] = Complex(1, 0);
    p.cross[{0, 1}] = Complex(1e-12, 0);  // below phase_tol * sqrt(diag diag)
    const ConstraintGraph g(1, {{-1, 0}, {0, 1}});
    CHECK_THROWS_AS(complete_rank_one(p, g, CompletionMode::exact_tree), ZeroFrequency);
  }
}

TEST_CASE("full-pipeline exactness up to a global phase (operational step 1)") {
  RngStream rng(26);
  int tested = 0;
  for (int rep = 0; rep < 40 && tested < 25; ++rep) {
    const int n = 10 + 2 * rng.uniform_int(0, 10);       // 10..30
    const int k_freq = rng.uniform_int(3, (n - 1) / 2);  // condition 4 below
    const int l1 = 1 + rng.uniform_int(0, 1);            // 1 or 2
    const int l2 = l1 + 1;                               // coprime with l1
    if (std::abs(l1) + std::abs(l2) > 2 * k_freq) continue;
    const SparseSignal x = random_sparse(n, std::min(4, n / 2), rng);
    const Eigen::VectorXcd y = oracle::low_freq(x.dense(), k_freq);
    if (y.cwiseAbs().minCoeff() < 1e-5 * y.norm()) continue;  // condition 2
    const MaskSet masks(n, l1, l2);
    const PairwiseData p = extract_pairwise(forward_measure(x, masks, k_freq), masks);
    const ConstraintGraph g(k_freq, l1, l2);
    const LowFreqVector yhat = complete_rank_one(p, g, CompletionMode::exact_tree);
    CHECK(phase_aligned_distance(yhat.values(), y) <= 1e-8);
    ++tested;
  }
  CHECK(tested >= 20);
}
