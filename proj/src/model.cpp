#include "d2d/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace d2d {

double distance_m(const Point& a, const Point& b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

void Scenario::validate() const {
  if (num_bs < 1 || num_due < 1) throw std::invalid_argument("scenario: need B >= 1 and U >= 1");
  const int n = num_servers();
  if (n > kMaxServers) throw std::invalid_argument("scenario: more than 64 servers");
  if (static_cast<int>(positions.size()) != n)
    throw std::invalid_argument("scenario: positions must have B+U entries");
  if (static_cast<int>(tx_power_dbm.size()) != n)
    throw std::invalid_argument("scenario: tx_power_dbm must have B+U entries");
  for (double p : tx_power_dbm)
    if (!std::isfinite(p)) throw std::invalid_argument("scenario: non-finite transmit power");
  for (const auto& pt : positions)
    if (!std::isfinite(pt.x_m) || !std::isfinite(pt.y_m))
      throw std::invalid_argument("scenario: non-finite position");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
    throw std::invalid_argument("scenario: bandwidth_hz must be positive");
  if (!std::isfinite(noise_psd_dbm_hz)) throw std::invalid_argument("scenario: non-finite noise PSD");
  if (static_cast<int>(walls.size()) != n) throw std::invalid_argument("scenario: walls must be (B+U) x U");
  for (const auto& row : walls) {
    if (static_cast<int>(row.size()) != num_due)
      throw std::invalid_argument("scenario: walls must be (B+U) x U");
    for (int w : row)
      if (w < 0) throw std::invalid_argument("scenario: negative wall count");
  }
}

Scenario make_scenario(std::vector<Point> bs, std::vector<Point> dues, std::uint64_t seed) {
  Scenario s;
  s.num_bs = static_cast<int>(bs.size());
  s.num_due = static_cast<int>(dues.size());
  s.positions = std::move(bs);
  s.positions.insert(s.positions.end(), dues.begin(), dues.end());
  s.tx_power_dbm.assign(s.num_bs, kDefaultBsPowerDbm);
  s.tx_power_dbm.resize(s.num_servers(), kDefaultDuePowerDbm);
  s.walls.assign(s.num_servers(), std::vector<int>(s.num_due, 0));
  s.seed = seed;
  s.validate();
  return s;
}

double dbm_to_watts(double p_dbm) { return std::pow(10.0, p_dbm / 10.0) / 1000.0; }

double path_loss_db(double distance_m, int walls, const PathLossModel& model) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  if (walls < 0) throw std::invalid_argument("path_loss_db: negative wall count");
  return model.slope_db * std::log10(distance_m) + model.intercept_db + model.wall_db * walls;
}

GainMatrix::GainMatrix(int num_servers, int num_users, std::vector<double> gains, double noise_power_w)
    : num_servers_(num_servers), num_users_(num_users), g_(std::move(gains)), noise_power_w_(noise_power_w) {
  if (num_users < 1 || num_servers <= num_users) throw std::invalid_argument("gains: bad dimensions");
  if (g_.size() != static_cast<std::size_t>(num_servers) * num_users)
    throw std::invalid_argument("gains: size mismatch");
  for (double g : g_)
    if (!(g >= 0.0)) throw std::invalid_argument("gains: negative or NaN gain");
  if (!(noise_power_w > 0.0)) throw std::invalid_argument("gains: noise power must be positive");
}

GainBuild build_gains(const Scenario& s) {
  s.validate();
  const int n_servers = s.num_servers();
  const int n_users = s.num_due;
  std::vector<double> g(static_cast<std::size_t>(n_servers) * n_users, 0.0);
  std::vector<std::pair<int, int>> clamped;
  for (int n = 0; n < n_servers; ++n) {
    for (int u = 0; u < n_users; ++u) {
      if (n == s.num_bs + u) continue;  // a DUE never serves itself
      double d = distance_m(s.positions[n], s.positions[s.num_bs + u]);
      if (d < kMinDistanceM) {
        clamped.emplace_back(n, u);
        d = kMinDistanceM;
      }
      g[n * n_users + u] = std::pow(10.0, -path_loss_db(d, s.walls[n][u], s.pathloss) / 10.0);
    }
  }
  const double noise_w = dbm_to_watts(s.noise_psd_dbm_hz + 10.0 * std::log10(s.bandwidth_hz));
  return {GainMatrix(n_servers, n_users, std::move(g), noise_w), std::move(clamped)};
}

double sinr(int user, int server, const Pattern& pattern, const GainMatrix& gains,
            std::span<const double> powers_w) {
  if (user < 0 || user >= gains.num_users()) throw std::out_of_range("sinr: user index");
  if (server < 0 || server >= gains.num_servers()) throw std::out_of_range("sinr: server index");
  if (!pattern.active(server)) return 0.0;
  double interference = 0.0;
  for (int m : pattern.active_set())
    if (m != server) interference += powers_w[m] * gains.gain(m, user);
  return powers_w[server] * gains.gain(server, user) / (gains.noise_power_w() + interference);
}

double spectral_efficiency(int user, int server, const Pattern& pattern, const GainMatrix& gains,
                           std::span<const double> powers_w) {
  if (pattern.active(gains.num_bs() + user)) return 0.0;
  const double c = std::log2(1.0 + sinr(user, server, pattern, gains, powers_w));
  return c < kEfficiencyFloor ? 0.0 : c;
}

Network build_network(const Scenario& scenario) {
  auto built = build_gains(scenario);
  std::vector<double> power_w;
  power_w.reserve(scenario.tx_power_dbm.size());
  for (double p : scenario.tx_power_dbm) power_w.push_back(dbm_to_watts(p));
  std::vector<std::string> warnings;
  for (auto [n, u] : built.clamped_links)
    warnings.push_back("distance clamped to 1 m on link server " + std::to_string(n + 1) + " -> DUE " +
                       std::to_string(u + 1));
  return Network{std::move(built.gains), std::move(power_w), scenario.bandwidth_hz, std::move(warnings)};
}

std::vector<double> pattern_efficiencies(const Network& net, const Pattern& pattern) {
  const int n_servers = net.num_servers();
  const int n_users = net.num_users();
  const int b = net.num_bs();
  if (pattern.num_servers() != n_servers) throw std::invalid_argument("pattern length != server count");
  const auto active = pattern.active_set();
  const auto k = active.size();
  std::vector<double> c(static_cast<std::size_t>(n_servers) * n_users, 0.0);
  std::vector<double> rx(k), prefix(k + 1), suffix(k + 1);
  for (int u = 0; u < n_users; ++u) {
    if (pattern.active(b + u)) continue;  // half duplex
    for (std::size_t a = 0; a < k; ++a) rx[a] = net.power_w[active[a]] * net.gains.gain(active[a], u);
    // interference excluding the serving link without subtracting it out
    prefix[0] = 0.0;
    for (std::size_t a = 0; a < k; ++a) prefix[a + 1] = prefix[a] + rx[a];
    suffix[k] = 0.0;
    for (std::size_t a = k; a-- > 0;) suffix[a] = suffix[a + 1] + rx[a];
    for (std::size_t a = 0; a < k; ++a) {
      const double gamma = rx[a] / (net.gains.noise_power_w() + prefix[a] + suffix[a + 1]);
      const double eff = std::log2(1.0 + gamma);
      c[active[a] * n_users + u] = eff < kEfficiencyFloor ? 0.0 : eff;
    }
  }
  return c;
}

RateTable::RateTable(int num_bs, int num_users, double bandwidth_hz, std::vector<Pattern> patterns,
                     std::vector<double> efficiency)
    : num_bs_(num_bs),
      num_users_(num_users),
      bandwidth_hz_(bandwidth_hz),
      patterns_(std::move(patterns)),
      c_(std::move(efficiency)) {
  if (patterns_.empty()) throw std::invalid_argument("rate table: no patterns");
  if (c_.size() != patterns_.size() * num_servers() * num_users_)
    throw std::invalid_argument("rate table: efficiency size mismatch");
}

RateTable build_rate_table(const Network& net, std::span<const Pattern> patterns) {
  if (patterns.empty()) throw std::invalid_argument("build_rate_table: empty pattern list");
  std::set<std::uint64_t> seen;
  for (const auto& p : patterns)
    if (!seen.insert(p.bits()).second)
      throw std::invalid_argument("build_rate_table: duplicate pattern " + p.to_string());
  std::vector<double> c;
  c.reserve(patterns.size() * net.num_servers() * net.num_users());
  for (const auto& p : patterns) {
    auto slice = pattern_efficiencies(net, p);
    c.insert(c.end(), slice.begin(), slice.end());
  }
  return RateTable(net.num_bs(), net.num_users(), net.bandwidth_hz,
                   std::vector<Pattern>(patterns.begin(), patterns.end()), std::move(c));
}

Rates rates_from_allocation(const RateTable& t, std::span<const double> y) {
  if (y.size() != t.size()) throw std::invalid_argument("rates_from_allocation: y size mismatch");
  const int n_users = t.num_users();
  const int n_servers = t.num_servers();
  Rates r;
  r.received_bps.assign(n_users, 0.0);
  r.served_bps.assign(n_servers, 0.0);
  const double w = t.bandwidth_hz();
  for (int i = 0; i < t.num_patterns(); ++i) {
    for (int n = 0; n < n_servers; ++n) {
      const std::size_t base = t.index(0, n, i);
      for (int u = 0; u < n_users; ++u) {
        const double v = w * y[base + u] * t.eff(u, n, i);
        r.received_bps[u] += v;
        r.served_bps[n] += v;
      }
    }
  }
  r.effective_bps.resize(n_users);
  for (int u = 0; u < n_users; ++u) r.effective_bps[u] = r.received_bps[u] - r.served_bps[t.num_bs() + u];
  return r;
}

}  // namespace d2d
