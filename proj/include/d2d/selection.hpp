#pragma once

#include <map>
#include <string>
#include <vector>

#include "d2d/model.hpp"
#include "d2d/pattern.hpp"
#include "d2d/solver.hpp"

namespace d2d {

struct SelectionOptions {
  double eps1 = 1e-4;  // trim threshold on pattern shares
  double eps2 = 1e-4;  // stop when the objective moves less than this
  int max_outer_iters = 50;
  /// Seed V^1 with the BS-only pattern e_1 as well.
  bool add_bs_only_pattern = true;
  SolverOptions solver;

  void validate() const;
};

struct IterationRecord {
  int t = 0;
  int num_patterns = 0;  // |V^t| at the start of the iteration
  int num_candidates = 0;
  double objective = 0.0;  // P^t
  double elapsed_s = 0.0;
};

struct ReportFlags {
  bool converged = false;
  bool pattern_cap_hit = false;
  bool rounding_loss = false;
  bool bs_only_seeded = false;
  bool association_repaired = false;
};

struct SolveReport {
  std::string method;
  SolveStatus status = SolveStatus::kInfeasible;
  int num_bs = 1;
  int num_users = 0;
  double bandwidth_hz = 0.0;
  PatternSet final_patterns;
  /// Relaxed (multi-server) allocation on final_patterns.
  Allocation relaxed;
  /// Returned schedule: single-server association when rounding ran,
  /// otherwise the relaxed allocation.
  Allocation final_allocation;
  Association associations;
  bool single_association = false;
  std::vector<double> objective_trace;
  std::vector<IterationRecord> iterations;
  double pf_objective = 0.0;
  double gm_mbps = 0.0;
  double wall_time_s = 0.0;
  ReportFlags flags;
  std::vector<std::string> warnings;

  /// Patterns with x_i > eps in the returned schedule.
  int active_patterns(double eps = 0.0) const;
};

/// p_{u,n,i} = W c_{u,n,i} (1/R_u - 1{n >= B} / R_{n-B}), RateTable layout.
/// Throws std::domain_error if some effective rate is not positive.
std::vector<double> gradient(const RateTable& table, const Rates& rates);

struct PatternScore {
  double score = 0.0;
  std::vector<int> best_user;  // per server; -1 when inactive
};

/// Scores one pattern from its own efficiencies (computed here, not looked up).
PatternScore score_pattern(const Pattern& candidate, const Network& network, const Rates& rates);

/// Score of pattern i of an existing table.
PatternScore score_pattern(const RateTable& table, int pattern, const Rates& rates);

using ScoreCache = std::map<std::uint64_t, PatternScore>;

/// For every server n, the best-scoring pattern among flip_neighborhood(V, n)
/// that is not already in V. Union in server order, deduplicated.
std::vector<Pattern> propose_candidates(const PatternSet& current, const Network& network, const Rates& rates,
                                        ScoreCache* cache = nullptr);

/// z_{u,n,i} = 1 for n = argmax_n y_{u,n,i} c_{u,n,i}; server 0 when all are zero.
Association round_association(const Allocation& allocation, const RateTable& table);

/// Pattern selection and resource allocation, followed by rounding to a
/// single-server association and a final fixed-association solve.
SolveReport run_selection(const Scenario& scenario, const SelectionOptions& options = {});
SolveReport run_selection(const Network& network, const SelectionOptions& options = {});

/// Solve on a fixed pattern set, round, and re-solve with the association.
/// Shared by the baselines.
SolveReport solve_fixed_set(const Network& network, const PatternSet& patterns, const SelectionOptions& options,
                            std::string method, const WarmStart* warm = nullptr);

}  // namespace d2d
