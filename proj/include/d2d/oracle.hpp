#pragma once

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2d/model.hpp"
#include "d2d/selection.hpp"
#include "d2d/solver.hpp"

namespace d2d {

inline constexpr int kDefaultBruteForceGuard = 13;

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BruteForce {
  PatternSet patterns;  // all 2^N - 1 patterns, ascending bitmask order
  RateTable table;
  Allocation allocation;
  double wall_time_s = 0.0;
};

/// Relaxed optimum over every nonzero pattern. Throws GuardExceeded when
/// N > guard_servers.
BruteForce brute_force(const Network& network, const SolverOptions& options = {},
                       int guard_servers = kDefaultBruteForceGuard);

/// brute_force() packaged as a report restricted to the active patterns.
SolveReport brute_force_report(const Network& network, const SelectionOptions& options = {},
                               int guard_servers = kDefaultBruteForceGuard);

/// Per-pattern effective-rate vectors Phi^i (U x K, Mbps) at the time-sharing
/// ratios y / x_i of a solved allocation. Columns of zero-share patterns are zero.
Eigen::MatrixXd pattern_rate_matrix(const RateTable& table, const Allocation& allocation);

/// Carathéodory reduction: x' >= 0 with sum x' = 1, phi x' = phi x and at most
/// rows(phi) + 1 nonzeros, by pivoting along null-space directions of the
/// support columns.
std::vector<double> reduce_support(const Eigen::MatrixXd& phi, std::span<const double> x);

/// BS plus exactly one relay active: {e_1 + e_{B+u}}.
SolveReport orthogonal_baseline(const Network& network, const SelectionOptions& options = {});

/// Base stations only, each alone: {e_b}.
SolveReport bs_only_baseline(const Network& network, const SelectionOptions& options = {});

}  // namespace d2d
