#include "d2d/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "d2d/metrics.hpp"

namespace d2d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_rates(const Rates& rates) {
  for (double r : rates.effective_bps)
    if (!(r > 0.0)) throw std::domain_error("gradient: effective rates must be positive");
}

// Best user per active server for one pattern's efficiencies c[n * U + u].
PatternScore score_efficiencies(const Pattern& pattern, std::span<const double> c, int num_bs, double bandwidth_hz,
                                const Rates& rates) {
  check_rates(rates);
  const int n_users = static_cast<int>(rates.effective_bps.size());
  PatternScore out;
  out.best_user.assign(pattern.num_servers(), -1);
  for (int n : pattern.active_set()) {
    const double relay_inv = n >= num_bs ? 1.0 / rates.effective_bps[n - num_bs] : 0.0;
    double best = 0.0;
    int best_u = -1;
    for (int u = 0; u < n_users; ++u) {
      const double p = bandwidth_hz * c[n * n_users + u] * (1.0 / rates.effective_bps[u] - relay_inv);
      if (best_u < 0 || p > best) {
        best = p;
        best_u = u;
      }
    }
    out.best_user[n] = best_u;
    out.score += best;
  }
  return out;
}

// Users no longer reachable from a BS under z get reattached to a reachable
// server with positive efficiency. Returns true when z changed.
bool repair_association(const RateTable& t, const Allocation& relaxed, Association& z) {
  const int b = t.num_bs();
  const int n_users = t.num_users();
  bool changed = false;
  for (;;) {
    std::vector<bool> reached(n_users, false);
    for (bool grew = true; grew;) {
      grew = false;
      for (int u = 0; u < n_users; ++u) {
        if (reached[u]) continue;
        for (int i = 0; i < t.num_patterns() && !reached[u]; ++i) {
          const int n = z.at(u, i);
          if (t.eff(u, n, i) > 0.0 && (n < b || reached[n - b])) reached[u] = grew = true;
        }
      }
    }
    bool fixed_any = false;
    for (int u = 0; u < n_users; ++u) {
      if (reached[u]) continue;
      for (int i = 0; i < t.num_patterns(); ++i) {
        int best = -1;
        double best_key = 0.0, best_c = 0.0;
        for (int n : t.pattern(i).active_set()) {
          if (n >= b && !reached[n - b]) continue;
          const double c = t.eff(u, n, i);
          if (c <= 0.0) continue;
          const double key = relaxed.y.empty() ? 0.0 : relaxed.y[t.index(u, n, i)] * c;
          if (best < 0 || key > best_key || (key == best_key && c > best_c)) {
            best = n;
            best_key = key;
            best_c = c;
          }
        }
        if (best >= 0 && z.at(u, i) != best) {
          z.at(u, i) = best;
          fixed_any = true;
        }
      }
    }
    if (!fixed_any) return changed;
    changed = true;
  }
}

void fill_metrics(SolveReport& report) {
  const auto& a = report.final_allocation;
  if (!a.feasible()) return;
  const Metrics m = metrics(a.rates.effective_bps);
  report.pf_objective = m.pf;
  report.gm_mbps = m.gm_mbps;
}

}  // namespace

void SelectionOptions::validate() const {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("selection: eps1 must be in (0, 1)");
  if (!(eps2 > 0.0 && eps2 < 1.0)) throw std::invalid_argument("selection: eps2 must be in (0, 1)");
  if (max_outer_iters < 1) throw std::invalid_argument("selection: max_outer_iters must be >= 1");
}

int SolveReport::active_patterns(double eps) const {
  return static_cast<int>(std::count_if(final_allocation.x.begin(), final_allocation.x.end(),
                                        [eps](double v) { return v > eps; }));
}

std::vector<double> gradient(const RateTable& t, const Rates& rates) {
  check_rates(rates);
  const int b = t.num_bs();
  std::vector<double> p(t.size(), 0.0);
  for (int i = 0; i < t.num_patterns(); ++i)
    for (int n = 0; n < t.num_servers(); ++n) {
      const double relay_inv = n >= b ? 1.0 / rates.effective_bps[n - b] : 0.0;
      for (int u = 0; u < t.num_users(); ++u)
        p[t.index(u, n, i)] = t.bandwidth_hz() * t.eff(u, n, i) * (1.0 / rates.effective_bps[u] - relay_inv);
    }
  return p;
}

PatternScore score_pattern(const Pattern& candidate, const Network& network, const Rates& rates) {
  const auto c = pattern_efficiencies(network, candidate);
  return score_efficiencies(candidate, c, network.num_bs(), network.bandwidth_hz, rates);
}

PatternScore score_pattern(const RateTable& t, int pattern, const Rates& rates) {
  return score_efficiencies(t.pattern(pattern), t.pattern_slice(pattern), t.num_bs(), t.bandwidth_hz(), rates);
}

std::vector<Pattern> propose_candidates(const PatternSet& current, const Network& network, const Rates& rates,
                                        ScoreCache* cache) {
  ScoreCache local;
  ScoreCache& scores = cache ? *cache : local;
  std::vector<Pattern> out;
  for (int n = 0; n < network.num_servers(); ++n) {
    const Pattern* best = nullptr;
    double best_score = 0.0;
    const auto neighbours = flip_neighborhood(current, n);
    for (const auto& v : neighbours) {
      if (current.contains(v)) continue;
      auto it = scores.find(v.bits());
      if (it == scores.end()) it = scores.emplace(v.bits(), score_pattern(v, network, rates)).first;
      if (best == nullptr || it->second.score > best_score) {
        best = &v;
        best_score = it->second.score;
      }
    }
    if (best != nullptr && std::find(out.begin(), out.end(), *best) == out.end()) out.push_back(*best);
  }
  return out;
}

Association round_association(const Allocation& a, const RateTable& t) {
  Association z{t.num_users(), t.num_patterns(),
                std::vector<int>(static_cast<std::size_t>(t.num_users()) * t.num_patterns(), 0)};
  for (int i = 0; i < t.num_patterns(); ++i)
    for (int u = 0; u < t.num_users(); ++u) {
      int best = 0;
      double best_val = 0.0;
      for (int n = 0; n < t.num_servers(); ++n) {
        const double v = a.y[t.index(u, n, i)] * t.eff(u, n, i);
        if (v > best_val) {
          best_val = v;
          best = n;
        }
      }
      z.at(u, i) = best;
    }
  return z;
}

SolveReport solve_fixed_set(const Network& network, const PatternSet& patterns, const SelectionOptions& options,
                            std::string method, const WarmStart* warm) {
  const auto start = Clock::now();
  SolveReport report;
  report.method = std::move(method);
  report.num_bs = network.num_bs();
  report.num_users = network.num_users();
  report.bandwidth_hz = network.bandwidth_hz;
  report.final_patterns = patterns;
  report.warnings = network.warnings;
  const RateTable table = build_rate_table(network, patterns.members());
  report.relaxed = solve_allocation(table, options.solver, warm);
  if (!report.relaxed.feasible()) {
    report.status = SolveStatus::kInfeasible;
    report.final_allocation = report.relaxed;
    report.wall_time_s = seconds_since(start);
    return report;
  }
  report.associations = round_association(report.relaxed, table);
  const WarmStart from_relaxed{patterns.members(), &report.relaxed};
  report.final_allocation = solve_fixed_association(table, report.associations, options.solver, &from_relaxed);
  if (!report.final_allocation.feasible() && repair_association(table, report.relaxed, report.associations)) {
    report.flags.association_repaired = true;
    report.warnings.push_back("rounded association left a DUE without a path from the BS; reattached");
    report.final_allocation = solve_fixed_association(table, report.associations, options.solver);
  }
  report.single_association = true;
  report.status = report.final_allocation.status;
  if (report.final_allocation.feasible()) {
    const double tol = options.solver.tolerance * std::abs(report.relaxed.objective);
    report.flags.rounding_loss = report.final_allocation.objective < report.relaxed.objective - tol;
  }
  fill_metrics(report);
  report.wall_time_s = seconds_since(start);
  return report;
}

SolveReport run_selection(const Scenario& scenario, const SelectionOptions& options) {
  return run_selection(build_network(scenario), options);
}

SolveReport run_selection(const Network& net, const SelectionOptions& options) {
  options.validate();
  const auto start = Clock::now();
  const int n_users = net.num_users();

  PatternSet v = initial_set(net.num_bs(), n_users);
  bool seeded = false;
  if (options.add_bs_only_pattern) seeded = v.insert(Pattern::unit(net.num_servers(), 0));

  std::vector<IterationRecord> iterations;
  std::vector<double> trace;
  RateTable table = build_rate_table(net, v.members());
  Allocation alloc = solve_allocation(table, options.solver);
  if (!alloc.feasible()) {
    SolveReport report;
    report.method = "algo";
    report.status = SolveStatus::kInfeasible;
    report.num_bs = net.num_bs();
    report.num_users = n_users;
    report.bandwidth_hz = net.bandwidth_hz;
    report.final_patterns = v;
    report.relaxed = report.final_allocation = alloc;
    report.flags.bs_only_seeded = seeded;
    report.warnings = net.warnings;
    report.wall_time_s = seconds_since(start);
    return report;
  }
  double p_prev = -1.0;
  double p_now = alloc.objective;
  trace.push_back(p_now);
  iterations.push_back({1, static_cast<int>(v.size()), 0, p_now, seconds_since(start)});
  v = trim(v, alloc.x, options.eps1);

  bool converged = false;
  bool cap_hit = static_cast<int>(v.size()) > n_users;
  for (int t = 1; !cap_hit && t < options.max_outer_iters; ++t) {
    if (std::abs(p_now - p_prev) <= options.eps2) {
      converged = true;
      break;
    }
    ScoreCache cache;
    const auto candidates = propose_candidates(v, net, alloc.rates, &cache);
    double best_in_set = -std::numeric_limits<double>::infinity();
    for (const auto& p : v) best_in_set = std::max(best_in_set, score_pattern(p, net, alloc.rates).score);
    double best_candidate = -std::numeric_limits<double>::infinity();
    for (const auto& p : candidates) best_candidate = std::max(best_candidate, cache.at(p.bits()).score);
    if (candidates.empty() || !(best_candidate > best_in_set)) {
      converged = true;
      break;
    }
    const int size_before = static_cast<int>(v.size());
    PatternSet expanded = v;
    for (const auto& p : candidates) expanded.insert(p);
    const WarmStart previous{table.patterns(), &alloc};
    RateTable next_table = build_rate_table(net, expanded.members());
    Allocation next = solve_allocation(next_table, options.solver, &previous);
    table = std::move(next_table);
    alloc = std::move(next);
    if (!alloc.feasible()) throw std::logic_error("selection: superset of a feasible pattern set became infeasible");
    p_prev = p_now;
    p_now = alloc.objective;
    trace.push_back(p_now);
    iterations.push_back({t + 1, size_before, static_cast<int>(candidates.size()), p_now, seconds_since(start)});
    v = trim(expanded, alloc.x, options.eps1);
    cap_hit = static_cast<int>(v.size()) > n_users;
  }
  if (!converged && !cap_hit && std::abs(p_now - p_prev) <= options.eps2) converged = true;

  const WarmStart last{table.patterns(), &alloc};
  SolveReport report = solve_fixed_set(net, v, options, "algo", &last);
  report.objective_trace = std::move(trace);
  report.iterations = std::move(iterations);
  report.flags.converged = converged;
  report.flags.pattern_cap_hit = cap_hit;
  report.flags.bs_only_seeded = seeded;
  if (seeded) report.warnings.push_back("initial pattern set seeded with the BS-only pattern");
  report.wall_time_s = seconds_since(start);
  return report;
}

}  // namespace d2d
