#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "d2d/model.hpp"
#include "d2d/oracle.hpp"
#include "d2d/selection.hpp"

using namespace d2d;

namespace {

Network random_network(int dues, std::uint64_t seed, int max_walls) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 200.0);
  std::uniform_int_distribution<int> walls(0, max_walls);
  std::vector<Point> pts(dues);
  for (auto& p : pts) p = {pos(rng), pos(rng)};
  Scenario s = make_scenario({{100.0, 100.0}}, pts, seed);
  for (auto& row : s.walls)
    for (auto& w : row) w = walls(rng);
  return build_network(s);
}

int support(const std::vector<double>& x) {
  return static_cast<int>(std::count_if(x.begin(), x.end(), [](double v) { return v > 0.0; }));
}

// support columns stacked with a row of ones have full column rank
bool affinely_independent(const Eigen::MatrixXd& phi, const std::vector<double>& x) {
  std::vector<int> cols;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0.0) cols.push_back(static_cast<int>(k));
  Eigen::MatrixXd a(phi.rows() + 1, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    a.block(0, static_cast<Eigen::Index>(j), phi.rows(), 1) = phi.col(cols[j]);
    a(phi.rows(), static_cast<Eigen::Index>(j)) = phi.cwiseAbs().maxCoeff();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  return lu.rank() == static_cast<Eigen::Index>(cols.size());
}

Eigen::VectorXd mat_vec(const Eigen::MatrixXd& phi, const std::vector<double>& x) {
  return phi * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

TEST_CASE("brute force on one BS and one DUE") {
  const Network net = build_network(make_scenario({{0, 0}}, {{40, 0}}));
  const BruteForce bf = brute_force(net);
  REQUIRE(bf.allocation.status == SolveStatus::kOptimal);
  REQUIRE(bf.patterns.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const double expect = bf.patterns[i].to_string() == "10" ? 1.0 : 0.0;
    CHECK(bf.allocation.x[i] == doctest::Approx(expect));
  }
}

TEST_CASE("brute force guard") {
  const Network net = random_network(13, 0, 0);
  CHECK_THROWS_AS(brute_force(net), GuardExceeded);
  CHECK_THROWS_AS(brute_force(random_network(5, 0, 0), {}, 5), GuardExceeded);
  CHECK_NOTHROW(brute_force(random_network(4, 0, 0), {}, 5));
}

TEST_CASE("reduce_support examples") {
  SUBCASE("duplicate columns merge") {
    Eigen::MatrixXd phi(2, 3);
    phi << 1.0, 1.0, 3.0, 2.0, 2.0, 1.0;
    const auto out = reduce_support(phi, std::vector{0.3, 0.7, 0.0});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out[2] == 0.0);
  }
  SUBCASE("independent support is left alone") {
    Eigen::MatrixXd phi(2, 3);
    phi << 1.0, 0.0, 2.0, 0.0, 1.0, 3.0;
    const std::vector<double> x{0.2, 0.3, 0.5};
    const auto out = reduce_support(phi, x);
    for (int k = 0; k < 3; ++k) CHECK(out[k] == doctest::Approx(x[k]).epsilon(1e-15));
  }
  SUBCASE("random dense input") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int users = 2 + trial % 3, cols = 5 + trial % 6;
      Eigen::MatrixXd phi(users, cols);
      for (int r = 0; r < users; ++r)
        for (int c = 0; c < cols; ++c) phi(r, c) = 40.0 * unit(rng) - 5.0;
      std::vector<double> x(cols);
      for (double& v : x) v = unit(rng) + 0.01;
      const double sum = std::accumulate(x.begin(), x.end(), 0.0);
      for (double& v : x) v /= sum;

      const auto out = reduce_support(phi, x);
      CHECK(support(out) <= users + 1);
      CHECK(std::abs(std::accumulate(out.begin(), out.end(), 0.0) - 1.0) <= 1e-12);
      CHECK((mat_vec(phi, out) - mat_vec(phi, x)).cwiseAbs().maxCoeff() <= 1e-9);
      for (double v : out) CHECK(v >= 0.0);
      CHECK(affinely_independent(phi, out));
    }
  }
}

TEST_CASE("pattern-rate matrix of a brute-force solution reproduces its rates") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Network net = random_network(3, seed, 4);
    const BruteForce bf = brute_force(net);
    REQUIRE(bf.allocation.feasible());
    const Eigen::MatrixXd phi = pattern_rate_matrix(bf.table, bf.allocation);
    CHECK(phi.rows() == net.num_users());
    const Eigen::VectorXd r = mat_vec(phi, bf.allocation.x);
    for (int u = 0; u < net.num_users(); ++u)
      CHECK(r[u] == doctest::Approx(bf.allocation.rates.effective_bps[u] / 1e6).epsilon(1e-9));
  }
}

TEST_CASE("baseline chain and brute-force bound") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Network net = random_network(2 + static_cast<int>(seed % 3), seed, 3);
    const SolveReport bs = bs_only_baseline(net);
    const SolveReport orth = orthogonal_baseline(net);
    const SolveReport brute = brute_force_report(net);
    const SolveReport algo = run_selection(net);
    REQUIRE(brute.status == SolveStatus::kOptimal);
    const double tol = 1e-6 * std::abs(brute.relaxed.objective);
    if (bs.relaxed.feasible()) CHECK(bs.relaxed.objective <= brute.relaxed.objective + tol);
    if (orth.relaxed.feasible()) CHECK(orth.relaxed.objective <= brute.relaxed.objective + tol);
    REQUIRE(algo.status == SolveStatus::kOptimal);
    CHECK(algo.relaxed.objective <= brute.relaxed.objective + tol);
    CHECK(brute.method == "brute");
  }
}

TEST_CASE("orthogonal baseline with a lone DUE is infeasible") {
  const Network net = build_network(make_scenario({{0, 0}}, {{40, 0}}));
  const SolveReport r = orthogonal_baseline(net);
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK(r.method == "orthogonal");
}

TEST_CASE("BS-only baseline") {
  SUBCASE("equal efficiencies split evenly") {
    const int users = 4;
    std::vector<Point> pts;
    for (int k = 0; k < users; ++k) {
      const double a = 2.0 * std::numbers::pi * k / users;
      pts.push_back({100.0 + 60.0 * std::cos(a), 100.0 + 60.0 * std::sin(a)});
    }
    const Network net = build_network(make_scenario({{100, 100}}, pts));
    const SolveReport r = bs_only_baseline(net);
    REQUIRE(r.status == SolveStatus::kOptimal);
    const double c = spectral_efficiency(0, 0, Pattern::parse("10000"), net.gains, net.power_w);
    for (double v : r.final_allocation.rates.effective_bps)
      CHECK(v == doctest::Approx(net.bandwidth_hz * c / users).epsilon(1e-6));
  }
  SUBCASE("fully blocked DUE is infeasible") {
    Scenario s = make_scenario({{100, 100}}, {{150, 100}, {60, 60}});
    s.walls[0][1] = 60;
    const Network net = build_network(s);
    CHECK(bs_only_baseline(net).status == SolveStatus::kInfeasible);
    CHECK(run_selection(net).status == SolveStatus::kOptimal);
  }
}
