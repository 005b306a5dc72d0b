#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "d2d/metrics.hpp"
#include "d2d/model.hpp"

using namespace d2d;

namespace {

// Two-server network (one BS, one DUE) placed on a line.
Scenario line_scenario(double bs_to_due_m) { return make_scenario({{0.0, 0.0}}, {{bs_to_due_m, 0.0}}); }

Scenario random_scenario(int dues, std::uint64_t seed, int max_walls) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 200.0);
  std::uniform_int_distribution<int> walls(0, max_walls);
  std::vector<Point> pts(dues);
  for (auto& p : pts) p = {pos(rng), pos(rng)};
  Scenario s = make_scenario({{100.0, 100.0}}, pts, seed);
  for (auto& row : s.walls)
    for (auto& w : row) w = walls(rng);
  return s;
}

}  // namespace

TEST_CASE("dbm_to_watts") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(dbm_to_watts(-174.0) == doctest::Approx(3.981071705534973e-21).epsilon(1e-12));
}

TEST_CASE("path loss") {
  CHECK(path_loss_db(1.0, 0) == doctest::Approx(35.3));
  CHECK(path_loss_db(10.0, 0) == doctest::Approx(72.9));
  CHECK(path_loss_db(10.0, 2) == doctest::Approx(82.9));
  CHECK_THROWS_AS(path_loss_db(0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_db(-1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_db(5.0, -1), std::invalid_argument);

  double prev = path_loss_db(1.0, 0);
  for (double d = 1.5; d < 500.0; d *= 1.5) {
    const double pl = path_loss_db(d, 0);
    CHECK(pl > prev);
    CHECK(path_loss_db(d, 1) > pl);
    prev = pl;
  }
}

TEST_CASE("gains and noise") {
  const auto built = build_gains(line_scenario(10.0));
  const auto& g = built.gains;
  CHECK(g.gain(0, 0) == doctest::Approx(std::pow(10.0, -7.29)).epsilon(1e-12));
  CHECK(g.gain(1, 0) == 0.0);  // self link
  CHECK(g.noise_power_w() == doctest::Approx(7.962143411069947e-14).epsilon(1e-9));
  CHECK(built.clamped_links.empty());
}

TEST_CASE("coincident nodes are clamped to 1 m and reported") {
  const Network net = build_network(line_scenario(0.2));
  CHECK(net.gains.gain(0, 0) == doctest::Approx(std::pow(10.0, -3.53)).epsilon(1e-12));
  REQUIRE(net.warnings.size() == 1);
  CHECK(net.warnings[0].find("clamped") != std::string::npos);
}

TEST_CASE("scenario validation") {
  Scenario s = line_scenario(10.0);
  s.walls[0][0] = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = line_scenario(10.0);
  s.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = line_scenario(10.0);
  s.positions.pop_back();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = line_scenario(10.0);
  s.tx_power_dbm[0] = std::nan("");
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sinr") {
  const double noise = 1e-10;
  // servers: BS, DUE1, DUE2; users: DUE1, DUE2
  const GainMatrix g(3, 2, {1e-9, 2e-9, 0.0, 1e-9, 1e-9, 0.0}, noise);
  const std::vector<double> p{1.0, 1.0, 1.0};

  SUBCASE("inactive server") { CHECK(sinr(0, 2, Pattern::parse("100"), g, p) == 0.0); }
  SUBCASE("no interference") { CHECK(sinr(0, 0, Pattern::parse("100"), g, p) == doctest::Approx(10.0)); }
  SUBCASE("symmetric interference with negligible noise") {
    const GainMatrix h(3, 2, {1.0, 1.0, 0.0, 1.0, 1.0, 0.0}, 1e-12);
    CHECK(std::abs(sinr(0, 0, Pattern::parse("101"), h, p) - 1.0) < 1e-9);
  }
  SUBCASE("bounded by the interference-free value and decreasing in the active set") {
    const double alone = sinr(0, 0, Pattern::parse("100"), g, p);
    const double shared = sinr(0, 0, Pattern::parse("101"), g, p);
    CHECK(shared <= alone);
    CHECK(shared == doctest::Approx(1e-9 / (noise + 1e-9)));
  }
}

TEST_CASE("spectral efficiency") {
  const double noise = 1.0;
  const GainMatrix g(3, 2, {1.0, 3.0, 0.0, 1.0, 1.0, 0.0}, noise);
  const std::vector<double> p{1.0, 1.0, 1.0};
  CHECK(spectral_efficiency(0, 0, Pattern::parse("100"), g, p) == doctest::Approx(1.0));   // SINR 1
  CHECK(spectral_efficiency(1, 0, Pattern::parse("100"), g, p) == doctest::Approx(2.0));   // SINR 3
  CHECK(spectral_efficiency(0, 0, Pattern::parse("110"), g, p) == 0.0);                    // own server on
  CHECK(spectral_efficiency(1, 0, Pattern::parse("101"), g, p) == 0.0);
}

TEST_CASE("rate table structure") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Network net = build_network(random_scenario(4, seed, 2));
    const int n = net.num_servers();
    std::vector<Pattern> all;
    for (std::uint64_t bits = 1; bits < (1ULL << n); ++bits) all.emplace_back(n, bits);
    const RateTable t = build_rate_table(net, all);
    for (int i = 0; i < t.num_patterns(); ++i)
      for (int s = 0; s < n; ++s)
        for (int u = 0; u < t.num_users(); ++u) {
          const double c = t.eff(u, s, i);
          CHECK(c >= 0.0);
          if (!t.pattern(i).active(s) || t.pattern(i).active(1 + u)) CHECK(c == 0.0);
          // independent per-link evaluation
          CHECK(c == doctest::Approx(spectral_efficiency(u, s, t.pattern(i), net.gains, net.power_w)).epsilon(1e-12));
        }
  }
}

TEST_CASE("rate table examples") {
  const Network net = build_network(make_scenario({{100, 100}}, {{120, 100}, {100, 150}}));
  SUBCASE("BS-only pattern") {
    const Pattern bs = Pattern::parse("100");
    const RateTable t = build_rate_table(net, std::vector{bs});
    for (int u = 0; u < 2; ++u) {
      const double gamma = net.power_w[0] * net.gains.gain(0, u) / net.gains.noise_power_w();
      CHECK(t.eff(u, 0, 0) == doctest::Approx(std::log2(1.0 + gamma)));
      CHECK(t.eff(u, 1, 0) == 0.0);
      CHECK(t.eff(u, 2, 0) == 0.0);
    }
  }
  SUBCASE("relay-on pattern silences its own DUE") {
    const RateTable t = build_rate_table(net, std::vector{Pattern::parse("110")});
    for (int s = 0; s < 3; ++s) CHECK(t.eff(0, s, 0) == 0.0);
    CHECK(t.eff(1, 0, 0) > 0.0);
  }
  SUBCASE("permuting the pattern list permutes slices") {
    const std::vector<Pattern> a{Pattern::parse("100"), Pattern::parse("101"), Pattern::parse("011")};
    const std::vector<Pattern> b{a[2], a[0], a[1]};
    const RateTable ta = build_rate_table(net, a), tb = build_rate_table(net, b);
    const int map[] = {1, 2, 0};
    for (int i = 0; i < 3; ++i)
      for (int s = 0; s < 3; ++s)
        for (int u = 0; u < 2; ++u) CHECK(ta.eff(u, s, i) == tb.eff(u, s, map[i]));
  }
  SUBCASE("duplicates rejected") {
    CHECK_THROWS_AS(build_rate_table(net, std::vector{Pattern::parse("100"), Pattern::parse("100")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_rate_table(net, std::vector<Pattern>{}), std::invalid_argument);
  }
}

TEST_CASE("rates from allocation") {
  // BS -> DUE2 on pattern 100 (c = 3), DUE2 -> DUE1 on pattern 001 (c = 1)
  const std::vector<Pattern> pats{Pattern::parse("100"), Pattern::parse("001")};
  std::vector<double> c(12, 0.0);
  const auto idx = [](int u, int n, int i) { return (i * 3 + n) * 2 + u; };
  c[idx(1, 0, 0)] = 3.0;
  c[idx(0, 0, 0)] = 2.0;
  c[idx(0, 2, 1)] = 1.0;
  const RateTable t(1, 2, 2e7, pats, c);

  SUBCASE("zero allocation") {
    const Rates r = rates_from_allocation(t, std::vector<double>(12, 0.0));
    for (double v : r.effective_bps) CHECK(v == 0.0);
  }
  SUBCASE("single link W c") {
    std::vector<double> y(12, 0.0);
    y[idx(0, 0, 0)] = 1.0;
    const Rates r = rates_from_allocation(t, y);
    CHECK(r.received_bps[0] == doctest::Approx(40e6));
    CHECK(r.effective_bps[0] == doctest::Approx(40e6));
  }
  SUBCASE("relay chain") {
    std::vector<double> y(12, 0.0);
    y[idx(1, 0, 0)] = 0.5;  // 30 Mbps to DUE2
    y[idx(0, 2, 1)] = 0.5;  // 10 Mbps DUE2 -> DUE1
    const Rates r = rates_from_allocation(t, y);
    CHECK(r.received_bps[1] == doctest::Approx(30e6));
    CHECK(r.served_bps[2] == doctest::Approx(10e6));
    CHECK(r.effective_bps[1] == doctest::Approx(20e6));
    CHECK(r.effective_bps[0] == doctest::Approx(10e6));

    std::vector<double> y2 = y;
    for (double& v : y2) v *= 0.3;
    const Rates r2 = rates_from_allocation(t, y2);
    for (int u = 0; u < 2; ++u) CHECK(r2.effective_bps[u] == doctest::Approx(0.3 * r.effective_bps[u]));
  }
}

TEST_CASE("metrics") {
  const Metrics m = metrics(std::vector{10e6, 40e6});
  CHECK(m.gm_mbps == doctest::Approx(20.0));
  CHECK(m.pf == doctest::Approx(std::log(10e6) + std::log(40e6)));
  CHECK(metrics(std::vector{7e6, 7e6, 7e6}).gm_mbps == doctest::Approx(7.0));
  CHECK_THROWS_AS(metrics(std::vector{1e6, 0.0}), std::domain_error);
  CHECK_THROWS_AS(metrics(std::vector<double>{}), std::domain_error);

  const Metrics lo = metrics(std::vector{5e6, 9e6});
  const Metrics hi = metrics(std::vector{6e6, 9e6});
  CHECK(hi.pf > lo.pf);
  CHECK(hi.gm_mbps > lo.gm_mbps);
}
