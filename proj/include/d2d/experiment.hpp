#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/model.hpp"
#include "d2d/report.hpp"
#include "d2d/selection.hpp"

namespace d2d {

/// Random drop: one BS at the centre of a square, DUEs uniform over it.
struct GeneratorParams {
  int dues = 1;
  std::uint64_t seed = 0;
  double area_m = 200.0;
  /// Per-link wall count drawn uniformly from {0..walls_random}.
  int walls_random = 0;
  /// The first blocked_bs DUEs get blocked_walls walls on their BS link.
  int blocked_bs = 0;
  int blocked_walls = 20;
};

Scenario generate_scenario(const GeneratorParams& params);

enum class Method { kAlgo, kBrute, kOrthogonal, kBsOnly };

std::string_view to_string(Method m);
/// Accepts "algo", "brute", "orthogonal", "bs_only" and "bs-only".
Method parse_method(std::string_view name);
std::vector<Method> parse_methods(std::string_view comma_list);

struct ExperimentConfig {
  std::optional<std::string> scenario_file;
  std::optional<GeneratorParams> generator;
  SelectionOptions selection;
  std::vector<Method> methods{Method::kAlgo};
  int brute_guard = 13;
  std::string out_dir = "out";
  bool trace = false;
  /// When false every wall time is written as 0 so reruns are byte-identical.
  bool record_timing = true;

  void validate() const;
};

Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig read_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
/// FNV-1a over the canonical JSON of the config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct MethodResult {
  Method method = Method::kAlgo;
  SolveReport report;
  /// Set when the method could not run at all (e.g. brute-force guard).
  std::optional<std::string> error;

  bool ok() const { return !error && report.final_allocation.feasible(); }
};

struct ExperimentResult {
  std::string config_hash;
  std::uint64_t seed = 0;
  Scenario scenario;
  std::vector<MethodResult> methods;

  bool any_infeasible() const;
  const MethodResult* find(Method m) const;
};

/// Runs every selected method on the configured scenario. INFEASIBLE or a
/// guard refusal of one method does not stop the others.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// (gm_brute - gm_algo) / gm_brute when both ran successfully.
std::optional<double> gm_gap_vs_brute(const ExperimentResult& result);

std::string summary_csv_header();
/// One row per method.
std::string summary_csv_rows(const ExperimentResult& result);
/// Sorted effective rates in Mbps with empirical quantiles k/U, per method.
std::string cdf_csv(const ExperimentResult& result);

/// Writes scenario.json, <method>.json, summary.csv, cdf.csv, per-method
/// schedule tables and, with config.trace, the trace CSVs into config.out_dir.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& config);

struct CompareRow {
  int dues = 0;
  std::uint64_t seed = 0;
  std::optional<double> gm_brute_mbps;
  std::optional<double> gm_algo_mbps;
  std::optional<double> t_brute_s;
  std::optional<double> t_algo_s;

  std::optional<double> gap() const;
};

CompareRow compare_one(const GeneratorParams& params, const SelectionOptions& options, int brute_guard,
                       bool record_timing = true);

std::string compare_csv_header();
std::string compare_csv_row(const CompareRow& row);

}  // namespace d2d
