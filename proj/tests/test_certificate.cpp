#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "phasels/certificate.hpp"
#include "phasels/rng.hpp"

using namespace phasels;

namespace {

Eigen::VectorXcd random_nonzero(int n, RngStream& rng) {
  Eigen::VectorXcd z(n);
  for (int i = 0; i < n; ++i) {
    Complex v(rng.normal(), rng.normal());
    while (std::abs(v) < 0.1) v = Complex(rng.normal(), rng.normal());
    z(i) = v;
  }
  return z;
}

VertexGraph random_connected(int n, RngStream& rng) {
  std::vector<VertexGraph::Edge> edges;
  for (int v = 1; v < n; ++v) edges.push_back({rng.uniform_int(0, v - 1), v});
  const int extras = rng.uniform_int(0, n);
  for (int e = 0; e < extras; ++e) {
    const int u = rng.uniform_int(0, n - 1);
    const int v = rng.uniform_int(0, n - 1);
    if (u != v) edges.push_back({std::min(u, v), std::max(u, v)});
  }
  return VertexGraph(n, std::move(edges));
}

VertexGraph random_disconnected(int n, RngStream& rng) {
  // Split {0..n-1} into two halves with no cross edges.
  const int cut = rng.uniform_int(1, n - 1);
  std::vector<VertexGraph::Edge> edges;
  for (int v = 1; v < cut; ++v) edges.push_back({rng.uniform_int(0, v - 1), v});
  for (int v = cut + 1; v < n; ++v) edges.push_back({cut + rng.uniform_int(0, v - cut - 1), v});
  return VertexGraph(n, std::move(edges));
}

}  // namespace

TEST_CASE("build_certificate hand-checked 2x2 cases") {
  SUBCASE("z = (1,1), single edge") {
    Eigen::VectorXcd z(2);
    z << Complex(1, 0), Complex(1, 0);
    const auto [cm, duals] = build_certificate(z, VertexGraph(2, {{0, 1}}));
    Eigen::MatrixXcd expected(2, 2);
    expected << Complex(1, 0), Complex(-1, 0), Complex(-1, 0), Complex(1, 0);
    CHECK((cm.w - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(cm.spectrum(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cm.spectrum(1) == doctest::Approx(2.0));
    // null vector is z itself
    CHECK((cm.w * z).norm() < 1e-14);
  }
  SUBCASE("z = (1,i), single edge: w01 = (-i,-1)") {
    Eigen::VectorXcd z(2);
    z << Complex(1, 0), Complex(0, 1);
    const auto [cm, duals] = build_certificate(z, VertexGraph(2, {{0, 1}}));
    // Hand expansion of w w* with w = (-i, -1): diagonal 1, W(0,1) = i.
    Eigen::MatrixXcd expected(2, 2);
    expected << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
    CHECK((cm.w - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(cm.spectrum(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cm.spectrum(1) == doctest::Approx(2.0));
    CHECK((cm.w * z).norm() < 1e-14);
  }
  SUBCASE("zero entries are rejected") {
    Eigen::VectorXcd z(2);
    z << Complex(1, 0), Complex(0, 0);
    CHECK_THROWS_AS(build_certificate(z, VertexGraph(2, {{0, 1}})), ZeroEntry);
  }
}

TEST_CASE("dual variables reassemble the certificate exactly") {
  RngStream rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = rng.uniform_int(2, 8);
    const VertexGraph g = random_connected(n, rng);
    const Eigen::VectorXcd z = random_nonzero(n, rng);
    const auto [cm, duals] = build_certificate(z, g);

    // lambda_i = sum over neighbors of |z_j|^2
    for (int i = 0; i < n; ++i) {
      double expected = 0.0;
      for (int j : g.neighbors(i)) expected += std::norm(z(j));
      CHECK(duals.lambda(i) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(duals.lambda(i) >= 0.0);
    }

    // Rebuild W from the diagonal and edge patterns.
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) rebuilt(i, i) = duals.lambda(i);
    for (const auto& [edge, mu] : duals.mu) {
      rebuilt(edge.first, edge.second) = mu;
      rebuilt(edge.second, edge.first) = std::conj(mu);
    }
    CHECK((rebuilt - cm.w).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, cm.w.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("quadratic form identity y*Wy = sum over edges |y_i z_j - y_j z_i|^2") {
  RngStream rng(42);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = rng.uniform_int(2, 8);
    const VertexGraph g = random_connected(n, rng);
    const Eigen::VectorXcd z = random_nonzero(n, rng);
    const Eigen::VectorXcd y = oracle::random_dense(n, rng);
    const auto [cm, duals] = build_certificate(z, g);
    const double quad = (y.adjoint() * cm.w * y).value().real();
    double expected = 0.0;
    for (const auto& [i, j] : g.edges()) expected += std::norm(y(i) * z(j) - y(j) * z(i));
    CHECK(quad == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("verify_certificate") {
  RngStream rng(43);
  SUBCASE("connected graphs with nonzero z pass all three properties") {
    for (int rep = 0; rep < 25; ++rep) {
      const int n = rng.uniform_int(2, 8);
      const VertexGraph g = random_connected(n, rng);
      const Eigen::VectorXcd z = random_nonzero(n, rng);
      const auto [cm, duals] = build_certificate(z, g);
      const CertificateReport report = verify_certificate(cm, z);
      CHECK(report.psd);
      CHECK(report.slackness);
      CHECK(report.rank_ok);
    }
  }
  SUBCASE("disconnected graphs fail the rank check") {
    for (int rep = 0; rep < 25; ++rep) {
      const int n = rng.uniform_int(3, 8);
      const VertexGraph g = random_disconnected(n, rng);
      const Eigen::VectorXcd z = random_nonzero(n, rng);
      const auto [cm, duals] = build_certificate(z, g);
      const CertificateReport report = verify_certificate(cm, z);
      CHECK_FALSE(report.rank_ok);  // one kernel vector per component
    }
  }
  SUBCASE("kernel characterization: Wz = 0, perturbations are not killed") {
    const VertexGraph g(3, {{0, 1}, {1, 2}});
    Eigen::VectorXcd z(3);
    z << Complex(1, 0), Complex(0.5, 0.5), Complex(0, -1);
    const auto [cm, duals] = build_certificate(z, g);
    CHECK((cm.w * z).norm() < 1e-12);
    Eigen::VectorXcd y = z;
    y(2) *= Complex(0, 1);  // change one entry's phase
    CHECK((y.adjoint() * cm.w * y).value().real() > 1e-3);
  }
}

TEST_CASE("certificate is invariant to a global phase of z") {
  RngStream rng(44);
  const int n = 6;
  const VertexGraph g = random_connected(n, rng);
  const Eigen::VectorXcd z = random_nonzero(n, rng);
  const Complex c = std::polar(1.0, 0.77);
  const auto [cm_a, duals_a] = build_certificate(z, g);
  const auto [cm_b, duals_b] = build_certificate((c * z).eval(), g);
  CHECK((cm_a.w - cm_b.w).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, cm_a.w.cwiseAbs().maxCoeff()));
}

TEST_CASE("tangent_space_uniqueness") {
  SUBCASE("two vertices, one edge: only the gauge survives") {
    Eigen::VectorXcd z(2);
    z << Complex(1, 0), Complex(1, 0);
    CHECK(tangent_space_uniqueness(z, VertexGraph(2, {{0, 1}})));
  }
  SUBCASE("an isolated vertex keeps a free phase") {
    Eigen::VectorXcd z(3);
    z << Complex(1, 0), Complex(1, 0), Complex(1, 0);
    CHECK_FALSE(tangent_space_uniqueness(z, VertexGraph(3, {{0, 1}})));
  }
  SUBCASE("single vertex: the diagonal alone suffices") {
    Eigen::VectorXcd z(1);
    z << Complex(0.5, -0.5);
    CHECK(tangent_space_uniqueness(z, VertexGraph(1, {})));
  }
}

TEST_CASE("uniqueness_oracle") {
  RngStream rng(45);
  SUBCASE("connected implies unique") {
    for (int rep = 0; rep < 10; ++rep) {
      const int n = rng.uniform_int(2, 6);
      const VertexGraph g = random_connected(n, rng);
      CHECK(uniqueness_oracle(random_nonzero(n, rng), g));
    }
  }
  SUBCASE("an isolated vertex breaks uniqueness") {
    Eigen::VectorXcd z = random_nonzero(3, rng);
    CHECK_FALSE(uniqueness_oracle(z, VertexGraph(3, {{0, 1}})));
  }
  SUBCASE("two components break uniqueness") {
    Eigen::VectorXcd z = random_nonzero(4, rng);
    CHECK_FALSE(uniqueness_oracle(z, VertexGraph(4, {{0, 1}, {2, 3}})));
  }
  SUBCASE("desk-scale bound") {
    CHECK_THROWS_AS(uniqueness_oracle(random_nonzero(9, rng), VertexGraph(9, {{0, 1}})),
                    TooLarge);
  }
}

TEST_CASE("agreement across all four uniqueness routes (n <= 6)") {
  RngStream rng(46);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = rng.uniform_int(2, 6);
    const bool want_connected = rng.uniform_int(0, 1) == 1;
    const VertexGraph g = (want_connected || n < 3) ? random_connected(n, rng)
                                                    : random_disconnected(n, rng);
    const Eigen::VectorXcd z = random_nonzero(n, rng);
    const bool connected = g.connected();
    const auto [cm, duals] = build_certificate(z, g);
    const bool verified = verify_certificate(cm, z).all_ok();
    const bool tangent = tangent_space_uniqueness(z, g);
    const bool unique = uniqueness_oracle(z, g);
    CHECK(unique == connected);
    CHECK(tangent == connected);
    CHECK(verified == connected);
  }
}

TEST_CASE("constraint-graph relabeling preserves connectivity semantics") {
  const ConstraintGraph cg(2, 1, 2);
  const VertexGraph vg = VertexGraph::from_constraint_graph(cg);
  CHECK(vg.vertex_count() == 5);
  CHECK(vg.connected() == check_connectivity(cg));
  const ConstraintGraph split(2, 2, 4);
  CHECK(VertexGraph::from_constraint_graph(split).connected() ==
        check_connectivity(split));
}
