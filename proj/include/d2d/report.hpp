#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "d2d/model.hpp"
#include "d2d/selection.hpp"
#include "d2d/solver.hpp"

namespace d2d {

using Json = nlohmann::json;

Json scenario_to_json(const Scenario& scenario);
/// Missing optional fields take the Scenario defaults. Validates the result.
Scenario scenario_from_json(const Json& j);

void write_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario read_scenario(const std::filesystem::path& path);

/// x, nonzero y triplets, rates in Mbps, objective and gap.
Json allocation_to_json(const Allocation& allocation, const std::vector<Pattern>& patterns, int num_users);

Json report_to_json(const SolveReport& report);

/// iteration,objective,fw_gap
std::string solver_trace_csv(const std::vector<TracePoint>& trace);
/// t,num_patterns,objective,wall_time_s
std::string selection_trace_csv(const std::vector<IterationRecord>& iterations);

/// Servers as rows, active patterns as columns. A cell lists the DUEs the
/// server transmits to under that pattern ("idle" when active without
/// traffic, empty when silent). The first row holds the x_i shares.
std::string schedule_table_csv(const SolveReport& report, double min_share = 0.0);

std::string server_label(int server, int num_bs);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace d2d
