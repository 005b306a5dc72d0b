#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "d2d/pattern.hpp"

namespace d2d {

/// Links shorter than this are evaluated at this distance.
inline constexpr double kMinDistanceM = 1.0;
/// Spectral efficiencies below this (bits/s/Hz) are treated as zero.
inline constexpr double kEfficiencyFloor = 1e-12;

inline constexpr double kDefaultBsPowerDbm = 30.0;
inline constexpr double kDefaultDuePowerDbm = 20.0;

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

double distance_m(const Point& a, const Point& b);

/// slope_db * log10(d) + intercept_db + wall_db * walls
struct PathLossModel {
  double slope_db = 37.6;
  double intercept_db = 35.3;
  double wall_db = 5.0;
};

/// Static description of the network. Nodes 0..B-1 are base stations,
/// nodes B..B+U-1 are DUEs; DUE u as a transmitter is server B+u.
struct Scenario {
  int num_bs = 1;
  int num_due = 1;
  std::vector<Point> positions;
  std::vector<double> tx_power_dbm;
  double bandwidth_hz = 2.0e7;
  double noise_psd_dbm_hz = -174.0;
  PathLossModel pathloss;
  /// walls[n][u]: wall count on the link from server n to DUE u.
  std::vector<std::vector<int>> walls;
  std::uint64_t seed = 0;

  int num_servers() const { return num_bs + num_due; }
  /// Throws std::invalid_argument on a malformed scenario.
  void validate() const;
};

/// Scenario with default powers, bandwidth, noise and no walls.
Scenario make_scenario(std::vector<Point> bs, std::vector<Point> dues, std::uint64_t seed = 0);

double dbm_to_watts(double p_dbm);
double path_loss_db(double distance_m, int walls, const PathLossModel& model = {});

/// Average linear power gains from every server to every DUE.
class GainMatrix {
 public:
  GainMatrix(int num_servers, int num_users, std::vector<double> gains, double noise_power_w);

  int num_servers() const { return num_servers_; }
  int num_users() const { return num_users_; }
  int num_bs() const { return num_servers_ - num_users_; }
  double gain(int server, int user) const { return g_[server * num_users_ + user]; }
  double noise_power_w() const { return noise_power_w_; }

 private:
  int num_servers_;
  int num_users_;
  std::vector<double> g_;
  double noise_power_w_;
};

/// Gains plus the (server, user) links whose distance was clamped.
struct GainBuild {
  GainMatrix gains;
  std::vector<std::pair<int, int>> clamped_links;
};

GainBuild build_gains(const Scenario& scenario);

double sinr(int user, int server, const Pattern& pattern, const GainMatrix& gains,
            std::span<const double> powers_w);

double spectral_efficiency(int user, int server, const Pattern& pattern, const GainMatrix& gains,
                           std::span<const double> powers_w);

/// Everything the optimizers need from a Scenario, converted once.
struct Network {
  GainMatrix gains;
  std::vector<double> power_w;
  double bandwidth_hz;
  std::vector<std::string> warnings;

  int num_bs() const { return gains.num_bs(); }
  int num_users() const { return gains.num_users(); }
  int num_servers() const { return gains.num_servers(); }
};

Network build_network(const Scenario& scenario);

/// Efficiencies c[n * U + u] for one pattern, with the floor and the
/// half-duplex rule applied.
std::vector<double> pattern_efficiencies(const Network& network, const Pattern& pattern);

/// Spectral efficiencies c_{u,n,i} for an ordered list of patterns.
/// Storage is pattern-major, then server, then user.
class RateTable {
 public:
  RateTable(int num_bs, int num_users, double bandwidth_hz, std::vector<Pattern> patterns,
            std::vector<double> efficiency);

  int num_bs() const { return num_bs_; }
  int num_users() const { return num_users_; }
  int num_servers() const { return num_bs_ + num_users_; }
  int num_patterns() const { return static_cast<int>(patterns_.size()); }
  double bandwidth_hz() const { return bandwidth_hz_; }
  const std::vector<Pattern>& patterns() const { return patterns_; }
  const Pattern& pattern(int i) const { return patterns_[i]; }

  std::size_t index(int user, int server, int pattern) const {
    return (static_cast<std::size_t>(pattern) * num_servers() + server) * num_users_ + user;
  }
  std::size_t size() const { return c_.size(); }
  double eff(int user, int server, int pattern) const { return c_[index(user, server, pattern)]; }
  /// Efficiencies of every user for one (server, pattern).
  std::span<const double> slice(int server, int pattern) const {
    return {c_.data() + index(0, server, pattern), static_cast<std::size_t>(num_users_)};
  }
  /// Efficiencies of one pattern, server-major.
  std::span<const double> pattern_slice(int pattern) const {
    return {c_.data() + index(0, 0, pattern), static_cast<std::size_t>(num_servers()) * num_users_};
  }

 private:
  int num_bs_;
  int num_users_;
  double bandwidth_hz_;
  std::vector<Pattern> patterns_;
  std::vector<double> c_;
};

/// Throws std::invalid_argument for an empty list or duplicate patterns.
RateTable build_rate_table(const Network& network, std::span<const Pattern> patterns);

struct Rates {
  std::vector<double> received_bps;  // per user
  std::vector<double> served_bps;    // per server
  std::vector<double> effective_bps; // per user: received minus what its relay forwards
};

/// y uses the RateTable layout.
Rates rates_from_allocation(const RateTable& table, std::span<const double> y);

}  // namespace d2d
