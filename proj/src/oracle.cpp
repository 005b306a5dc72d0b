#include "d2d/oracle.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "d2d/metrics.hpp"

namespace d2d {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Table and allocation restricted to the listed patterns.
std::pair<RateTable, Allocation> restrict_to(const RateTable& t, const Allocation& a, const std::vector<int>& keep) {
  std::vector<Pattern> patterns;
  std::vector<double> c;
  Allocation out = a;
  out.x.clear();
  out.y.clear();
  for (int i : keep) {
    patterns.push_back(t.pattern(i));
    auto slice = t.pattern_slice(i);
    c.insert(c.end(), slice.begin(), slice.end());
    out.x.push_back(a.x[i]);
    const auto first = a.y.begin() + static_cast<std::ptrdiff_t>(t.index(0, 0, i));
    out.y.insert(out.y.end(), first, first + static_cast<std::ptrdiff_t>(slice.size()));
  }
  return {RateTable(t.num_bs(), t.num_users(), t.bandwidth_hz(), std::move(patterns), std::move(c)), std::move(out)};
}

}  // namespace

BruteForce brute_force(const Network& network, const SolverOptions& options, int guard_servers) {
  const int n = network.num_servers();
  if (n > guard_servers)
    throw GuardExceeded("brute force: " + std::to_string(n) + " servers exceeds the guard of " +
                        std::to_string(guard_servers));
  const auto start = std::chrono::steady_clock::now();
  std::vector<Pattern> all;
  all.reserve((std::size_t{1} << n) - 1);
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) all.emplace_back(n, bits);
  RateTable table = build_rate_table(network, all);
  Allocation allocation = solve_allocation(table, options);
  return {PatternSet(std::move(all)), std::move(table), std::move(allocation), seconds_since(start)};
}

SolveReport brute_force_report(const Network& network, const SelectionOptions& options, int guard_servers) {
  BruteForce bf = brute_force(network, options.solver, guard_servers);
  SolveReport report;
  report.method = "brute";
  report.status = bf.allocation.status;
  report.num_bs = network.num_bs();
  report.num_users = network.num_users();
  report.bandwidth_hz = network.bandwidth_hz;
  report.warnings = network.warnings;
  report.wall_time_s = bf.wall_time_s;
  if (!bf.allocation.feasible()) {
    report.final_patterns = PatternSet({bf.table.pattern(0)});
    report.relaxed = report.final_allocation = bf.allocation;
    return report;
  }
  std::vector<int> keep;
  for (int i = 0; i < bf.table.num_patterns(); ++i)
    if (bf.allocation.x[i] > 0.0) keep.push_back(i);
  auto [table, allocation] = restrict_to(bf.table, bf.allocation, keep);
  report.final_patterns = PatternSet(table.patterns());
  report.relaxed = report.final_allocation = std::move(allocation);
  report.flags.converged = bf.allocation.status == SolveStatus::kOptimal;
  const Metrics m = metrics(report.final_allocation.rates.effective_bps);
  report.pf_objective = m.pf;
  report.gm_mbps = m.gm_mbps;
  return report;
}

Eigen::MatrixXd pattern_rate_matrix(const RateTable& t, const Allocation& a) {
  const int b = t.num_bs();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(t.num_users(), t.num_patterns());
  const double scale = t.bandwidth_hz() / 1e6;
  for (int i = 0; i < t.num_patterns(); ++i) {
    if (!(a.x[i] > 0.0)) continue;
    for (int n = 0; n < t.num_servers(); ++n)
      for (int u = 0; u < t.num_users(); ++u) {
        const double v = scale * a.y[t.index(u, n, i)] / a.x[i] * t.eff(u, n, i);
        phi(u, i) += v;
        if (n >= b) phi(n - b, i) -= v;
      }
  }
  return phi;
}

std::vector<double> reduce_support(const Eigen::MatrixXd& phi, std::span<const double> x_in) {
  const auto rows = phi.rows();
  if (static_cast<Eigen::Index>(x_in.size()) != phi.cols())
    throw std::invalid_argument("reduce_support: x length != phi columns");
  std::vector<double> x(x_in.begin(), x_in.end());
  for (double v : x)
    if (!(v >= 0.0)) throw std::invalid_argument("reduce_support: negative share");
  const double row_scale = std::max(phi.cwiseAbs().maxCoeff(), 1.0);

  for (;;) {
    std::vector<int> support;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] > 0.0) support.push_back(static_cast<int>(j));
    const auto s = static_cast<Eigen::Index>(support.size());
    if (s <= 1) break;

    Eigen::MatrixXd a(rows + 1, s);
    for (Eigen::Index k = 0; k < s; ++k) {
      a.col(k).head(rows) = phi.col(support[k]);
      a(rows, k) = row_scale;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double threshold = 1e-11 * std::max(sigma.size() > 0 ? sigma[0] : 0.0, row_scale);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
      if (sigma[k] > threshold) ++rank;
    if (rank >= s) break;
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(s - rank);

    // smallest share with a component in the null space
    Eigen::Index pick = -1;
    for (Eigen::Index k = 0; k < s; ++k) {
      if (null_basis.row(k).norm() <= 1e-9) continue;
      if (pick < 0 || x[support[k]] < x[support[pick]]) pick = k;
    }
    if (pick < 0) break;
    const Eigen::VectorXd d = null_basis * null_basis.row(pick).transpose();

    double theta = std::numeric_limits<double>::infinity();
    Eigen::Index hit = -1;
    const double dmax = d.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < s; ++k) {
      if (d[k] <= 1e-12 * dmax) continue;
      const double ratio = x[support[k]] / d[k];
      if (ratio < theta || (ratio == theta && x[support[k]] < x[support[hit]])) {
        theta = ratio;
        hit = k;
      }
    }
    for (Eigen::Index k = 0; k < s; ++k) {
      double& v = x[support[k]];
      v = k == hit ? 0.0 : std::max(v - theta * d[k], 0.0);
    }
  }
  return x;
}

SolveReport orthogonal_baseline(const Network& network, const SelectionOptions& options) {
  const int n = network.num_servers();
  std::vector<Pattern> patterns;
  for (int u = 0; u < network.num_users(); ++u)
    patterns.emplace_back(n, std::uint64_t{1} | (std::uint64_t{1} << (network.num_bs() + u)));
  return solve_fixed_set(network, PatternSet(std::move(patterns)), options, "orthogonal");
}

SolveReport bs_only_baseline(const Network& network, const SelectionOptions& options) {
  std::vector<Pattern> patterns;
  for (int b = 0; b < network.num_bs(); ++b) patterns.push_back(Pattern::unit(network.num_servers(), b));
  return solve_fixed_set(network, PatternSet(std::move(patterns)), options, "bs_only");
}

}  // namespace d2d
