#include <doctest.h>

#include "support/oracles.hpp"
#include "voi.hpp"

using namespace voikit;

namespace {

LinearGaussianModel desk_model(int N = 2) {
  MatrixXd one = MatrixXd::Identity(1, 1);
  return LinearGaussianModel::stationary(one, one, one, one, one, VectorXd::Zero(1), one,
                                         N);
}

CostWeights desk_costs(int N, double lambda = 1.0) {
  return CostWeights::stationary(MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1), 1.0,
                                 lambda, N);
}

struct Desk {
  LinearGaussianModel md;
  CostWeights costs;
  RiccatiSolution ric;
  EncoderGains gains;
  Desk(int N = 2, double lambda = 1.0)
      : md(desk_model(N)), costs(desk_costs(N, lambda)), ric(riccati_backward(md, costs)),
        gains(compute_encoder_gains(md)) {}
};

}  // namespace

TEST_CASE("gauss-hermite sanity") {
  for (int s : {3, 9, 17, 64, 257}) {
    GaussQuadrature q = gauss_hermite(s);
    REQUIRE(q.nodes.size() == s);
    // exact symmetry by construction
    for (int i = 0; i < s; ++i) {
      CHECK(q.nodes[i] == -q.nodes[s - 1 - i]);
      CHECK(q.weights[i] == q.weights[s - 1 - i]);
    }
    CHECK(std::abs(q.weights.sum() - 1.0) <= 1e-14);
    // standard normal moments
    double m2 = 0, m4 = 0;
    for (int i = 0; i < s; ++i) {
      m2 += q.weights[i] * q.nodes[i] * q.nodes[i];
      m4 += q.weights[i] * std::pow(q.nodes[i], 4);
    }
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    if (s >= 9) CHECK(m4 == doctest::Approx(3.0).epsilon(1e-11));
  }
}

TEST_CASE("grid construction") {
  Desk d;
  SUBCASE("even point count rejected") {
    GridSpec spec;
    spec.points = 200;
    CHECK_THROWS_AS(build_grid(d.md, d.gains, spec), ValidationError);
  }
  SUBCASE("dimension guard points at the quadratic approximation") {
    LinearGaussianModel big = LinearGaussianModel::stationary(
        MatrixXd::Identity(3, 3), MatrixXd::Ones(3, 1), MatrixXd::Ones(1, 3),
        MatrixXd::Identity(3, 3), MatrixXd::Identity(1, 1), VectorXd::Zero(3),
        MatrixXd::Identity(3, 3), 2);
    EncoderGains g = compute_encoder_gains(big);
    GridSpec spec;
    CHECK_THROWS_WITH_AS(build_grid(big, g, spec), doctest::Contains("VoI+"),
                         ValidationError);
  }
  SUBCASE("symmetric by construction") {
    GridSpec spec;
    spec.points = 21;
    MismatchGrid g = build_grid(d.md, d.gains, spec);
    for (int i = 0; i < 21; ++i) CHECK(g.coord(0, i) == -g.coord(0, 20 - i));
    // never-transmit envelope at N=2: 0.5 -> 1.4 -> ~2.3846
    CHECK(g.scale[0] == doctest::Approx(std::sqrt(2.38461538)).epsilon(1e-6));
  }
}

TEST_CASE("voi table on the desk model") {
  Desk d;
  GridSpec gspec;
  gspec.points = 201;
  QuadratureSpec qspec;
  qspec.nodes = 9;
  VoiTable t = build_voi_table(d.md, d.costs, d.ric, d.gains, gspec, qspec);
  const long nodes = t.grid.total_nodes();

  SUBCASE("terminal identities") {
    for (long f = 0; f < nodes; ++f) {
      CHECK(t.voi[d.md.N][f] == -d.ric.theta[d.md.N]);  // VoI_N = -theta(N), exactly
      CHECK(t.rho[d.md.N][f] == 0.0);
      VectorXd e = t.grid.node(f);
      CHECK(voi_quadratic(e, d.md.N, d.ric, d.md) == -d.ric.theta[d.md.N]);
    }
    CHECK(t.lookup_value(d.md.N + 1, VectorXd::Constant(1, 0.37)) == 0.0);
  }

  SUBCASE("bit-exact symmetry on the grid") {
    for (int k = 0; k <= d.md.N; ++k)
      for (long f = 0; f < nodes; ++f) {
        long m = t.grid.mirror(f);
        CHECK(t.voi[k][f] == t.voi[k][m]);
        CHECK(t.value[k][f] == t.value[k][m]);
        CHECK(t.rho[k][f] == t.rho[k][m]);
      }
  }

  SUBCASE("decomposition VoI = VoI+ + rho") {
    double worst = 0.0;
    for (int k = 0; k <= d.md.N; ++k)
      for (long f = 0; f < nodes; ++f) {
        VectorXd e = t.grid.node(f);
        double lhs = t.voi[k][f];
        double rhs = voi_quadratic(e, k, d.ric, d.md) + t.rho[k][f];
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    CHECK(worst <= 1e-6);
  }

  SUBCASE("VoI_k(0) = rho_k(0) - theta(k), and rho vanishes at zero mismatch") {
    VectorXd zero = VectorXd::Zero(1);
    for (int k = 0; k <= d.md.N; ++k) {
      CHECK(rho_extract(t, k, zero) == 0.0);  // hold and reset coincide at 0
      CHECK(voi_lookup(t, k, zero) ==
            doctest::Approx(rho_extract(t, k, zero) - d.ric.theta[k]).epsilon(1e-12));
    }
  }

  SUBCASE("lookup contract") {
    // midpoint of two nodes -> arithmetic mean (scalar linear interpolation)
    double e0 = t.grid.coord(0, 80), e1 = t.grid.coord(0, 81);
    VectorXd mid = VectorXd::Constant(1, 0.5 * (e0 + e1));
    double expect = 0.5 * (t.voi[0][80] + t.voi[0][81]);
    CHECK(voi_lookup(t, 0, mid) == doctest::Approx(expect).epsilon(1e-15));
    // exact at nodes
    VectorXd at = VectorXd::Constant(1, t.grid.coord(0, 37));
    CHECK(voi_lookup(t, 1, at) == t.voi[1][37]);
    // clamped beyond the bounds
    VectorXd far = VectorXd::Constant(1, 100.0 * t.grid.bound[0]);
    CHECK(voi_lookup(t, 0, far) == t.voi[0][nodes - 1]);
    // stage range
    CHECK_THROWS_AS(voi_lookup(t, d.md.N + 1, at), ArgError);
    CHECK_THROWS_AS(rho_extract(t, -1, at), ArgError);
  }

  SUBCASE("transmit set is symmetric; no-transmit set is an interval around 0") {
    for (int k = 0; k <= d.md.N; ++k) {
      if (d.ric.theta[k] <= t.rho[k][(nodes - 1) / 2]) continue;
      long first_no = -1, last_no = -1;
      for (long f = 0; f < nodes; ++f) {
        bool tx = t.voi[k][f] >= 0.0;
        CHECK(tx == (t.voi[k][t.grid.mirror(f)] >= 0.0));
        if (!tx) {
          if (first_no < 0) first_no = f;
          last_no = f;
        }
      }
      REQUIRE(first_no >= 0);
      CHECK(first_no <= (nodes - 1) / 2);
      CHECK(last_no >= (nodes - 1) / 2);
      for (long f = first_no; f <= last_no; ++f) CHECK(t.voi[k][f] < 0.0);
    }
  }
}

TEST_CASE("voi_quadratic closed form") {
  SUBCASE("direct formula: a = 2, Gamma(k+1) = 0.5, theta = 1") {
    MatrixXd a2(1, 1);
    a2 << 2.0;
    LinearGaussianModel md = LinearGaussianModel::stationary(
        a2, MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1),
        MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1), VectorXd::Zero(1),
        MatrixXd::Identity(1, 1), 1);
    RiccatiSolution ric;
    ric.Gamma.assign(3, MatrixXd::Constant(1, 1, 0.5));
    ric.theta.assign(2, 1.0);
    CHECK(voi_quadratic(VectorXd::Constant(1, 1.0), 0, ric, md) ==
          doctest::Approx(1.0).epsilon(1e-15));  // 4 * 0.5 - 1
    CHECK(voi_quadratic(VectorXd::Zero(1), 0, ric, md) == doctest::Approx(-1.0));
  }
  SUBCASE("section-9 weights: VoI+(0) = -lambda ell") {
    Desk d(2, 0.0066);
    CHECK(voi_quadratic(VectorXd::Zero(1), 1, d.ric, d.md) ==
          doctest::Approx(-0.0066).epsilon(1e-15));
  }
}

TEST_CASE("table agrees with the fine-grid dense-integration oracle") {
  // lighter settings than the acceptance run, same construction
  Desk d;
  GridSpec gspec;
  gspec.points = 201;
  QuadratureSpec qspec;
  qspec.nodes = 513;
  VoiTable t = build_voi_table(d.md, d.costs, d.ric, d.gains, gspec, qspec);

  oracles::ScalarDpOracle oracle;
  oracle.N = 2;
  oracle.grid_points = 2001;
  oracle.grid_bound = t.grid.bound[0];
  oracle.integration_points = 2001;
  oracle.solve();

  double worst = 0.0, worst_rho = 0.0;
  for (int pi = 0; pi < 50; ++pi) {
    long f = 40 + pi * (201 - 80) / 50;
    VectorXd e = t.grid.node(f);
    for (int k = 0; k <= 2; ++k) {
      worst = std::max(worst, std::abs(t.voi[k][f] - oracle.voi_at(k, e[0])));
      worst_rho = std::max(worst_rho, std::abs(t.rho[k][f] - oracle.rho_at(k, e[0])));
    }
  }
  CHECK(worst < 1e-3);
  CHECK(worst_rho < 1e-3);
}

TEST_CASE("monotone refinement") {
  Desk d;
  GridSpec g1, g2;
  g1.points = 201;
  g2.points = 401;
  QuadratureSpec q1, q2;
  q1.nodes = 129;
  q2.nodes = 257;
  VoiTable coarse = build_voi_table(d.md, d.costs, d.ric, d.gains, g1, q1);
  VoiTable fine = build_voi_table(d.md, d.costs, d.ric, d.gains, g2, q2);
  double worst = 0.0;
  for (double probe : {-2.0, -1.3, -0.5, 0.0, 0.4, 1.1, 2.2}) {
    VectorXd e = VectorXd::Constant(1, probe);
    for (int k = 0; k <= 2; ++k)
      worst = std::max(worst, std::abs(coarse.lookup_voi(k, e) - fine.lookup_voi(k, e)));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("two-dimensional table is symmetric and decomposes") {
  MatrixXd A(2, 2), B(2, 1), C(1, 2), W(2, 2), V(1, 1), M0(2, 2);
  A << 1.0, 0.1, 0.0, 0.95;
  B << 0.0, 1.0;
  C << 1.0, 0.0;
  W << 0.4, 0.1, 0.1, 0.3;
  V << 0.5;
  M0 << 1.0, 0.0, 0.0, 1.0;
  LinearGaussianModel md =
      LinearGaussianModel::stationary(A, B, C, W, V, VectorXd::Zero(2), M0, 2);
  CostWeights costs = CostWeights::stationary(MatrixXd::Identity(2, 2),
                                              MatrixXd::Identity(1, 1), 1.0, 0.8, 2);
  RiccatiSolution ric = riccati_backward(md, costs);
  EncoderGains gains = compute_encoder_gains(md);
  GridSpec gspec;
  gspec.points = 41;
  QuadratureSpec qspec;
  qspec.nodes = 9;
  VoiTable t = build_voi_table(md, costs, ric, gains, gspec, qspec);
  const long nodes = t.grid.total_nodes();
  REQUIRE(nodes == 41L * 41L);
  double worst = 0.0;
  for (int k = 0; k <= 2; ++k)
    for (long f = 0; f < nodes; ++f) {
      CHECK(t.voi[k][f] == t.voi[k][t.grid.mirror(f)]);
      VectorXd e = t.grid.node(f);
      worst = std::max(worst,
                       std::abs(t.voi[k][f] - (voi_quadratic(e, k, ric, md) + t.rho[k][f])));
    }
  CHECK(worst <= 1e-6);
}
