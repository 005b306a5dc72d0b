#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "d2d/model.hpp"

namespace d2d {

enum class SolveStatus { kOptimal, kNotConverged, kInfeasible };

std::string_view to_string(SolveStatus status);

struct SolverOptions {
  /// Target for the Frank-Wolfe gap relative to |objective|.
  double tolerance = 1e-6;
  /// Column-generation rounds.
  int max_iters = 400;
  double feasibility_tol = 1e-8;
  /// New vertices added per round (best patterns first).
  int columns_per_iter = 4;
  /// Barrier reduction factor in the restricted master problem.
  double barrier_shrink = 0.1;
};

struct TracePoint {
  int iteration = 0;
  double objective = 0.0;
  double fw_gap = 0.0;
};

/// Single-server association: server[i * U + u] serves user u under pattern i.
struct Association {
  int num_users = 0;
  int num_patterns = 0;
  std::vector<int> server;

  int at(int user, int pattern) const { return server[static_cast<std::size_t>(pattern) * num_users + user]; }
  int& at(int user, int pattern) { return server[static_cast<std::size_t>(pattern) * num_users + user]; }
};

struct Allocation {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> x;  // per pattern of the table
  std::vector<double> y;  // RateTable layout
  Rates rates;
  /// sum_u ln R_u with R_u in bit/s; -inf when infeasible.
  double objective = 0.0;
  /// max over feasible directions of grad . (y' - y) at the returned point.
  double fw_gap = 0.0;
  int iterations = 0;
  std::vector<TracePoint> trace;

  bool feasible() const { return status != SolveStatus::kInfeasible; }
};

/// A previous solution used to seed the working vertex set. Patterns are
/// matched to the new table by content; unmatched ones are dropped.
struct WarmStart {
  std::vector<Pattern> patterns;
  const Allocation* allocation = nullptr;
};

/// Maximizes sum_u ln R_u over x on the simplex and y with sum_u y_{u,n,i} = x_i.
Allocation solve_allocation(const RateTable& table, const SolverOptions& options = {},
                            const WarmStart* warm = nullptr);

/// Same objective with y_{u,n,i} = 0 unless z assigns u to n under i, and
/// sum_u y_{u,n,i} <= x_i.
Allocation solve_fixed_association(const RateTable& table, const Association& z,
                                   const SolverOptions& options = {}, const WarmStart* warm = nullptr);

struct ObjectiveValue {
  double value = 0.0;
  bool finite = false;
};

ObjectiveValue directional_objective(const RateTable& table, std::span<const double> y);

/// Largest constraint residuals of an allocation, for certificates.
struct Residuals {
  double simplex = 0.0;       // |sum x - 1|
  double server_time = 0.0;   // max |sum_u y - x_i| (or max violation of <= when inequality)
  double min_y = 0.0;
  double min_x = 0.0;
};

Residuals residuals(const RateTable& table, const Allocation& a, bool equality = true);

}  // namespace d2d
