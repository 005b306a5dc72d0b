// Proportional-fair allocation over a fixed pattern set.
//
// The feasible set {x in simplex, y in F(x)} is a polytope whose vertices pick
// one pattern and, for every active server, one user (or idle time when the
// association is fixed). Effective rates are linear in y, so the problem is
// max sum_u ln R_u over the convex hull of per-vertex rate vectors. We solve it
// by fully-corrective Frank-Wolfe: the linear oracle is the per-server argmax
// of the gradient entries, and the restricted master over the working vertices
// is solved by a log-barrier Newton method followed by an active-set polish.

#include "d2d/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace d2d {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kNotConverged: return "not_converged";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr int kIdle = -1;

// Which users an active server may serve under a pattern.
class LinkRules {
 public:
  LinkRules(const RateTable& table, const Association* z) : table_(table), z_(z) {}

  bool relaxed() const { return z_ == nullptr; }

  bool allowed(int user, int server, int pattern) const {
    if (!table_.pattern(pattern).active(server)) return false;
    return relaxed() || z_->at(user, pattern) == server;
  }

  // Time an active server cannot use productively goes to a zero-efficiency
  // user in the relaxed problem and to idle time otherwise.
  int dump_user(int server, int pattern) const {
    if (!relaxed()) return kIdle;
    const int b = table_.num_bs();
    if (server >= b) return server - b;
    auto c = table_.slice(server, pattern);
    return static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin());
  }

 private:
  const RateTable& table_;
  const Association* z_;
};

struct Column {
  int pattern = 0;
  std::vector<int> serve;  // per server; kIdle for inactive servers or idle time
  Eigen::VectorXd phi;     // effective-rate contribution per user, bit/s/Hz

  bool same_vertex(const Column& o) const { return pattern == o.pattern && serve == o.serve; }
};

Eigen::VectorXd column_rates(const RateTable& t, int pattern, const std::vector<int>& serve) {
  const int b = t.num_bs();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(t.num_users());
  for (int n = 0; n < t.num_servers(); ++n) {
    const int u = serve[n];
    if (u == kIdle) continue;
    const double c = t.eff(u, n, pattern);
    phi[u] += c;
    if (n >= b) phi[n - b] -= c;
  }
  return phi;
}

struct OracleResult {
  int pattern = -1;
  double score = -std::numeric_limits<double>::infinity();
  std::vector<double> pattern_scores;
  std::vector<std::vector<int>> best_serve;
};

// Linear maximization of the gradient over every vertex, pattern by pattern.
OracleResult linear_oracle(const RateTable& t, const LinkRules& rules, const Eigen::VectorXd& weights) {
  const int n_users = t.num_users();
  const int b = t.num_bs();
  OracleResult out;
  out.pattern_scores.resize(t.num_patterns());
  out.best_serve.resize(t.num_patterns());
  for (int i = 0; i < t.num_patterns(); ++i) {
    std::vector<int> serve(t.num_servers(), kIdle);
    double score = 0.0;
    for (int n : t.pattern(i).active_set()) {
      const double relay_w = n >= b ? weights[n - b] : 0.0;
      auto c = t.slice(n, i);
      int best = kIdle;
      double best_val = rules.relaxed() ? -std::numeric_limits<double>::infinity() : 0.0;
      for (int u = 0; u < n_users; ++u) {
        if (!rules.allowed(u, n, i)) continue;
        const double val = c[u] * (weights[u] - relay_w);
        if (val > best_val) {
          best_val = val;
          best = u;
        }
      }
      serve[n] = best;
      score += best == kIdle ? 0.0 : best_val;
    }
    out.pattern_scores[i] = score;
    out.best_serve[i] = std::move(serve);
    if (score > out.score) {
      out.score = score;
      out.pattern = i;
    }
  }
  return out;
}

struct Segment {
  int user;
  double mass;
};

// Splits per-server time segments of one pattern into vertices.
void decompose_pattern(const RateTable& t, int pattern, const std::vector<std::vector<Segment>>& segments,
                       std::vector<Column>& columns, std::vector<double>& weights) {
  const int n_servers = t.num_servers();
  std::vector<std::size_t> pos(n_servers, 0);
  std::vector<double> end(n_servers, 0.0);
  double total = 0.0;
  for (int n = 0; n < n_servers; ++n)
    if (!segments[n].empty()) {
      end[n] = segments[n][0].mass;
      total = std::max(total, std::accumulate(segments[n].begin(), segments[n].end(), 0.0,
                                              [](double s, const Segment& g) { return s + g.mass; }));
    }
  double at = 0.0;
  while (at < total) {
    double next = total;
    for (int n = 0; n < n_servers; ++n)
      if (!segments[n].empty() && pos[n] + 1 < segments[n].size()) next = std::min(next, end[n]);
    std::vector<int> serve(n_servers, kIdle);
    for (int n = 0; n < n_servers; ++n)
      if (!segments[n].empty()) serve[n] = segments[n][pos[n]].user;
    if (next > at) {
      columns.push_back({pattern, serve, column_rates(t, pattern, serve)});
      weights.push_back(next - at);
    }
    at = next;
    for (int n = 0; n < n_servers; ++n)
      if (!segments[n].empty() && pos[n] + 1 < segments[n].size() && end[n] <= at) {
        ++pos[n];
        end[n] += segments[n][pos[n]].mass;
      }
  }
}

struct Start {
  bool feasible = false;
  std::vector<Column> columns;
  std::vector<double> weights;
};

// Every user reachable from a BS through positive-efficiency links admits a
// strictly positive effective rate, and only then: an unreachable group of
// users receives nothing from outside while still forwarding, so its total
// effective rate is <= 0. The start routes a small flow along a shortest
// relay tree, using half of each link's time.
Start feasible_start(const RateTable& t, const LinkRules& rules) {
  const int n_users = t.num_users();
  const int b = t.num_bs();
  std::vector<int> parent_server(n_users, -1), parent_pattern(n_users, -1), depth(n_users, -1);
  std::vector<int> order;
  for (int layer = 0;; ++layer) {
    std::vector<int> newly;
    for (int u = 0; u < n_users; ++u) {
      if (depth[u] >= 0) continue;
      double best_c = 0.0;
      for (int i = 0; i < t.num_patterns(); ++i) {
        for (int n : t.pattern(i).active_set()) {
          if (n >= b && depth[n - b] < 0) continue;
          if (!rules.allowed(u, n, i)) continue;
          const double c = t.eff(u, n, i);
          if (c > best_c) {
            best_c = c;
            parent_server[u] = n;
            parent_pattern[u] = i;
          }
        }
      }
      if (best_c > 0.0) newly.push_back(u);
    }
    if (newly.empty()) break;
    for (int u : newly) {
      depth[u] = layer;
      order.push_back(u);
    }
  }
  Start start;
  if (static_cast<int>(order.size()) < n_users) return start;
  start.feasible = true;

  std::vector<double> subtree(n_users, 1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int n = parent_server[*it];
    if (n >= b) subtree[n - b] += subtree[*it];
  }
  std::vector<int> used;
  for (int u : order) used.push_back(parent_pattern[u]);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  const double share = 1.0 / static_cast<double>(used.size());

  // time per unit of flow on each (server, pattern) link group
  std::map<std::pair<int, int>, double> load;
  for (int u : order) load[{parent_server[u], parent_pattern[u]}] += subtree[u] / t.eff(u, parent_server[u], parent_pattern[u]);
  double flow = std::numeric_limits<double>::infinity();
  for (const auto& [key, l] : load) flow = std::min(flow, 0.5 * share / l);

  for (int i : used) {
    std::vector<std::vector<Segment>> segments(t.num_servers());
    for (int n : t.pattern(i).active_set()) {
      double busy = 0.0;
      for (int u : order)
        if (parent_server[u] == n && parent_pattern[u] == i) {
          const double time = flow * subtree[u] / t.eff(u, n, i);
          segments[n].push_back({u, time});
          busy += time;
        }
      segments[n].push_back({rules.dump_user(n, i), share - busy});
      // merge neighbours serving the same user
      std::vector<Segment> merged;
      for (const auto& s : segments[n]) {
        if (!merged.empty() && merged.back().user == s.user)
          merged.back().mass += s.mass;
        else
          merged.push_back(s);
      }
      segments[n] = std::move(merged);
    }
    decompose_pattern(t, i, segments, start.columns, start.weights);
  }
  return start;
}

Eigen::MatrixXd rate_matrix(const std::vector<Column>& columns, int n_users) {
  Eigen::MatrixXd phi(n_users, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) phi.col(static_cast<Eigen::Index>(k)) = columns[k].phi;
  return phi;
}

double log_sum(const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) s += std::log(v[k]);
  return s;
}

// Newton direction for max f on {sum lambda = 1} with Hessian -m and gradient g.
Eigen::VectorXd constrained_newton(const Eigen::MatrixXd& m, const Eigen::VectorXd& g) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  const Eigen::VectorXd a = ldlt.solve(g);
  const Eigen::VectorXd one_sol = ldlt.solve(Eigen::VectorXd::Ones(g.size()));
  const double nu = a.sum() / one_sol.sum();
  return a - nu * one_sol;
}

// Largest step keeping r + step * dr strictly positive (fraction to boundary).
double rate_step_limit(const Eigen::VectorXd& r, const Eigen::VectorXd& dr) {
  double alpha = 1.0;
  for (Eigen::Index u = 0; u < r.size(); ++u)
    if (dr[u] < 0.0) alpha = std::min(alpha, 0.99 * r[u] / -dr[u]);
  return alpha;
}

// max sum_u ln (phi lambda)_u over the simplex, by a log-barrier path.
void barrier_master(const Eigen::MatrixXd& phi, Eigen::VectorXd& lambda, double mu_start, double mu_final,
                    double shrink) {
  const auto s = lambda.size();
  if (s == 1) {
    lambda[0] = 1.0;
    return;
  }
  double mu = std::max(mu_start, mu_final);
  auto barrier_value = [&](const Eigen::VectorXd& lam, double m) {
    return log_sum(phi * lam) + m * log_sum(lam);
  };
  for (;;) {
    for (int step = 0; step < 80; ++step) {
      const Eigen::VectorXd r = phi * lambda;
      const Eigen::VectorXd w = r.cwiseInverse();
      const Eigen::VectorXd g = phi.transpose() * w + mu * lambda.cwiseInverse();
      Eigen::MatrixXd m = phi.transpose() * w.cwiseAbs2().asDiagonal() * phi;
      m.diagonal() += mu * lambda.cwiseAbs2().cwiseInverse();
      const Eigen::VectorXd d = constrained_newton(m, g);
      const double decrement = g.dot(d);
      if (!(decrement > 1e-13)) break;
      double alpha = rate_step_limit(r, phi * d);
      for (Eigen::Index k = 0; k < s; ++k)
        if (d[k] < 0.0) alpha = std::min(alpha, 0.99 * lambda[k] / -d[k]);
      const double f0 = barrier_value(lambda, mu);
      while (alpha > 1e-14 && !(barrier_value(lambda + alpha * d, mu) >= f0 + 0.25 * alpha * decrement))
        alpha *= 0.5;
      if (alpha <= 1e-14) break;
      lambda += alpha * d;
    }
    if (mu <= mu_final) break;
    mu = std::max(mu * shrink, mu_final);
  }
}

// Newton on the affine hull of the suspected support, no barrier. Returns
// false when the support guess is wrong (some weight turns negative).
bool polish_master(const Eigen::MatrixXd& phi, Eigen::VectorXd& lambda) {
  const auto s = lambda.size();
  if (s == 1) {
    lambda[0] = 1.0;
    return (phi.col(0).array() > 0.0).all();
  }
  for (int step = 0; step < 40; ++step) {
    const Eigen::VectorXd r = phi * lambda;
    const Eigen::VectorXd w = r.cwiseInverse();
    const Eigen::VectorXd g = phi.transpose() * w;
    Eigen::MatrixXd m = phi.transpose() * w.cwiseAbs2().asDiagonal() * phi;
    m.diagonal().array() += 1e-13 * std::max(m.diagonal().maxCoeff(), 1e-300);
    const Eigen::VectorXd d = constrained_newton(m, g);
    const double decrement = g.dot(d);
    if (!(decrement > 1e-26)) break;
    double alpha = rate_step_limit(r, phi * d);
    const double f0 = log_sum(r);
    while (alpha > 1e-14 && !(log_sum(phi * (lambda + alpha * d)) >= f0 + 0.25 * alpha * decrement)) alpha *= 0.5;
    if (alpha <= 1e-14) break;
    lambda += alpha * d;
  }
  if (lambda.minCoeff() < -1e-13) return false;
  lambda = lambda.cwiseMax(0.0);
  lambda /= lambda.sum();
  return ((phi * lambda).array() > 0.0).all();
}

class FrankWolfe {
 public:
  FrankWolfe(const RateTable& table, const Association* z, const SolverOptions& options)
      : t_(table), rules_(table, z), opt_(options) {}

  Allocation solve(const WarmStart* warm) {
    Allocation out;
    Start start = feasible_start(t_, rules_);
    if (!start.feasible) {
      out.status = SolveStatus::kInfeasible;
      out.objective = -std::numeric_limits<double>::infinity();
      return out;
    }
    if (warm != nullptr && warm->allocation != nullptr && warm->allocation->feasible()) blend_warm(*warm, start);
    columns_ = std::move(start.columns);
    lambda_ = Eigen::Map<Eigen::VectorXd>(start.weights.data(), static_cast<Eigen::Index>(start.weights.size()));
    merge_duplicates();

    const double log_w = std::log(t_.bandwidth_hz());
    const double users = static_cast<double>(t_.num_users());
    SolveStatus status = SolveStatus::kNotConverged;
    double gap = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < opt_.max_iters; ++iter) {
      solve_master();
      const Eigen::VectorXd r = rate_matrix(columns_, t_.num_users()) * lambda_;
      const Eigen::VectorXd w = r.cwiseInverse();
      const double objective = log_sum(r) + users * log_w;
      const double target = std::max(opt_.tolerance * std::abs(objective), 1e-12);
      const OracleResult oracle = linear_oracle(t_, rules_, w);
      gap = std::max(oracle.score - w.dot(r), 0.0);
      out.trace.push_back({iter, objective, gap});
      if (gap <= target) {
        status = SolveStatus::kOptimal;
        break;
      }
      if (!add_columns(oracle, w.dot(r) + target)) break;
      last_gap_ = gap;
    }
    out.status = status;
    out.iterations = iter + (status == SolveStatus::kOptimal ? 1 : 0);
    out.fw_gap = gap;
    assemble(out);
    return out;
  }

 private:
  // Replaces the tree start by the warm solution's vertices when those give
  // positive rates, or by the largest blend with the tree start that does.
  void blend_warm(const WarmStart& warm, Start& start) {
    const Allocation& a = *warm.allocation;
    const int n_users = t_.num_users();
    const int n_servers = t_.num_servers();
    std::map<std::uint64_t, int> index;
    for (int j = 0; j < t_.num_patterns(); ++j) index[t_.pattern(j).bits()] = j;

    std::vector<Column> cols;
    std::vector<double> weights;
    for (std::size_t i = 0; i < warm.patterns.size(); ++i) {
      const auto it = index.find(warm.patterns[i].bits());
      if (it == index.end() || !(a.x[i] > 0.0)) continue;
      const int j = it->second;
      std::vector<std::vector<Segment>> segments(n_servers);
      for (int n : t_.pattern(j).active_set()) {
        double busy = 0.0;
        for (int u = 0; u < n_users; ++u) {
          const double v = a.y[(i * n_servers + n) * n_users + u];
          if (v > 0.0 && rules_.allowed(u, n, j)) {
            segments[n].push_back({u, v});
            busy += v;
          }
        }
        if (a.x[i] > busy) segments[n].push_back({rules_.dump_user(n, j), a.x[i] - busy});
      }
      decompose_pattern(t_, j, segments, cols, weights);
    }
    if (cols.empty()) return;
    const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= mass;

    Eigen::VectorXd r_warm = Eigen::VectorXd::Zero(n_users);
    for (std::size_t k = 0; k < cols.size(); ++k) r_warm += weights[k] * cols[k].phi;
    Eigen::VectorXd r_tree = Eigen::VectorXd::Zero(n_users);
    for (std::size_t k = 0; k < start.columns.size(); ++k) r_tree += start.weights[k] * start.columns[k].phi;
    for (double alpha : {1.0, 0.99, 0.9, 0.5}) {
      if (!((alpha * r_warm + (1.0 - alpha) * r_tree).array() > 0.0).all()) continue;
      for (double& w : weights) w *= alpha;
      if (alpha < 1.0) {
        for (std::size_t k = 0; k < start.columns.size(); ++k) {
          cols.push_back(std::move(start.columns[k]));
          weights.push_back((1.0 - alpha) * start.weights[k]);
        }
      }
      start.columns = std::move(cols);
      start.weights = std::move(weights);
      warm_ = true;
      return;
    }
  }

  void merge_duplicates() {
    std::vector<Column> cols;
    std::vector<double> lam;
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.same_vertex(columns_[k]); });
      if (it == cols.end()) {
        cols.push_back(std::move(columns_[k]));
        lam.push_back(lambda_[static_cast<Eigen::Index>(k)]);
      } else {
        lam[it - cols.begin()] += lambda_[static_cast<Eigen::Index>(k)];
      }
    }
    columns_ = std::move(cols);
    lambda_ = Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    lambda_ /= lambda_.sum();
  }

  void solve_master() {
    const Eigen::MatrixXd phi = rate_matrix(columns_, t_.num_users());
    const double users = static_cast<double>(t_.num_users());
    const double size = static_cast<double>(columns_.size());
    const double mu_final = 1e-10 * users / size;
    // later rounds start near the optimum; the last gap bounds the distance
    double mu_start = 1e-2 * users / size;
    if (std::isfinite(last_gap_)) mu_start = std::min(mu_start, last_gap_ / size);
    else if (warm_) mu_start = 1e-4 * users / size;
    barrier_master(phi, lambda_, mu_start, mu_final, opt_.barrier_shrink);

    // crossover: weights well above the barrier's complementarity scale form the support
    const double cut = std::sqrt(mu_final);
    std::vector<int> keep;
    for (Eigen::Index k = 0; k < lambda_.size(); ++k)
      if (lambda_[k] > cut) keep.push_back(static_cast<int>(k));
    if (keep.empty()) return;
    Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(keep.size()));
    Eigen::VectorXd lam(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j)) = phi.col(keep[j]);
      lam[static_cast<Eigen::Index>(j)] = lambda_[keep[j]];
    }
    lam /= lam.sum();
    if (!((sub * lam).array() > 0.0).all()) return;
    const double before = log_sum(phi * lambda_);
    if (!polish_master(sub, lam)) return;
    if (log_sum(sub * lam) < before - 1e-9 * std::max(1.0, std::abs(before))) return;
    std::vector<Column> cols;
    std::vector<double> weights;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if (lam[static_cast<Eigen::Index>(j)] > 0.0) {
        cols.push_back(std::move(columns_[keep[j]]));
        weights.push_back(lam[static_cast<Eigen::Index>(j)]);
      }
    columns_ = std::move(cols);
    lambda_ = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  }

  // Adds the best vertex of each improving pattern, best first. Returns false
  // when nothing new can be added.
  bool add_columns(const OracleResult& oracle, double threshold) {
    std::vector<int> order(t_.num_patterns());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return oracle.pattern_scores[a] > oracle.pattern_scores[b]; });
    std::vector<Column> fresh;
    for (int i : order) {
      if (static_cast<int>(fresh.size()) >= opt_.columns_per_iter) break;
      if (!(oracle.pattern_scores[i] > threshold)) break;
      Column c{i, oracle.best_serve[i], column_rates(t_, i, oracle.best_serve[i])};
      const bool present = std::any_of(columns_.begin(), columns_.end(), [&](const Column& o) { return o.same_vertex(c); });
      if (!present) fresh.push_back(std::move(c));
    }
    if (fresh.empty()) return false;

    const Eigen::VectorXd r = rate_matrix(columns_, t_.num_users()) * lambda_;
    Eigen::VectorXd added = Eigen::VectorXd::Zero(t_.num_users());
    for (const auto& c : fresh) added += c.phi;
    added /= static_cast<double>(fresh.size());
    double gamma = 0.05;
    while (!(((1.0 - gamma) * r + gamma * added).array() > 0.0).all()) gamma *= 0.5;

    const auto old = lambda_.size();
    lambda_.conservativeResize(old + static_cast<Eigen::Index>(fresh.size()));
    lambda_.head(old) *= 1.0 - gamma;
    lambda_.tail(static_cast<Eigen::Index>(fresh.size())).setConstant(gamma / static_cast<double>(fresh.size()));
    for (auto& c : fresh) columns_.push_back(std::move(c));
    return true;
  }

  void assemble(Allocation& out) const {
    const int n_servers = t_.num_servers();
    out.x.assign(t_.num_patterns(), 0.0);
    out.y.assign(t_.size(), 0.0);
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      const Column& c = columns_[k];
      const double lam = lambda_[static_cast<Eigen::Index>(k)];
      out.x[c.pattern] += lam;
      const Pattern& p = t_.pattern(c.pattern);
      for (int n = 0; n < n_servers; ++n) {
        if (c.serve[n] != kIdle)
          out.y[t_.index(c.serve[n], n, c.pattern)] += lam;
        else if (rules_.relaxed() && !p.active(n))
          out.y[t_.index(0, n, c.pattern)] += lam;  // slack of an inactive server
      }
    }
    out.rates = rates_from_allocation(t_, out.y);
    const auto obj = directional_objective(t_, out.y);
    out.objective = obj.value;
  }

  const RateTable& t_;
  LinkRules rules_;
  SolverOptions opt_;
  std::vector<Column> columns_;
  Eigen::VectorXd lambda_;
  double last_gap_ = std::numeric_limits<double>::infinity();
  bool warm_ = false;
};

void check_options(const SolverOptions& o) {
  if (!(o.tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (o.max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (o.columns_per_iter < 1) throw std::invalid_argument("solver: columns_per_iter must be >= 1");
  if (!(o.barrier_shrink > 0.0 && o.barrier_shrink < 1.0))
    throw std::invalid_argument("solver: barrier_shrink must be in (0, 1)");
}

}  // namespace

Allocation solve_allocation(const RateTable& table, const SolverOptions& options, const WarmStart* warm) {
  check_options(options);
  return FrankWolfe(table, nullptr, options).solve(warm);
}

Allocation solve_fixed_association(const RateTable& table, const Association& z, const SolverOptions& options,
                                   const WarmStart* warm) {
  check_options(options);
  if (z.num_users != table.num_users() || z.num_patterns != table.num_patterns() ||
      z.server.size() != static_cast<std::size_t>(z.num_users) * z.num_patterns)
    throw std::invalid_argument("solve_fixed_association: association shape mismatch");
  for (int s : z.server)
    if (s < 0 || s >= table.num_servers()) throw std::invalid_argument("solve_fixed_association: bad server index");
  return FrankWolfe(table, &z, options).solve(warm);
}

ObjectiveValue directional_objective(const RateTable& table, std::span<const double> y) {
  const Rates r = rates_from_allocation(table, y);
  ObjectiveValue out{0.0, true};
  for (double rate : r.effective_bps) {
    if (!(rate > 0.0)) return {-std::numeric_limits<double>::infinity(), false};
    out.value += std::log(rate);
  }
  return out;
}

Residuals residuals(const RateTable& t, const Allocation& a, bool equality) {
  Residuals res;
  res.simplex = std::abs(std::accumulate(a.x.begin(), a.x.end(), 0.0) - 1.0);
  res.min_x = a.x.empty() ? 0.0 : *std::min_element(a.x.begin(), a.x.end());
  res.min_y = a.y.empty() ? 0.0 : *std::min_element(a.y.begin(), a.y.end());
  for (int i = 0; i < t.num_patterns(); ++i)
    for (int n = 0; n < t.num_servers(); ++n) {
      double used = 0.0;
      for (int u = 0; u < t.num_users(); ++u) used += a.y[t.index(u, n, i)];
      const double diff = used - a.x[i];
      res.server_time = std::max(res.server_time, equality ? std::abs(diff) : std::max(diff, 0.0));
    }
  return res;
}

}  // namespace d2d
