#include "d2d/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace d2d {

namespace {

// Shortest round-trip decimal form.
std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

Json patterns_json(const std::vector<Pattern>& patterns) {
  Json out = Json::array();
  for (const auto& p : patterns) out.push_back(p.to_string());
  return out;
}

Json mbps(const std::vector<double>& bps) {
  Json out = Json::array();
  for (double v : bps) out.push_back(v / 1e6);
  return out;
}

}  // namespace

std::string server_label(int server, int num_bs) {
  return server < num_bs ? "BS" + std::to_string(server + 1) : "DUE" + std::to_string(server - num_bs + 1);
}

Json scenario_to_json(const Scenario& s) {
  Json positions = Json::array();
  for (const auto& p : s.positions) positions.push_back({{"x_m", p.x_m}, {"y_m", p.y_m}});
  return {
      {"num_bs", s.num_bs},
      {"num_due", s.num_due},
      {"positions_m", positions},
      {"tx_power_dbm", s.tx_power_dbm},
      {"bandwidth_hz", s.bandwidth_hz},
      {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
      {"pathloss_db", {{"slope_db", s.pathloss.slope_db},
                       {"intercept_db", s.pathloss.intercept_db},
                       {"wall_db", s.pathloss.wall_db}}},
      {"walls", s.walls},
      {"seed", s.seed},
  };
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.num_bs = j.at("num_bs").get<int>();
  s.num_due = j.at("num_due").get<int>();
  for (const auto& p : j.at("positions_m")) s.positions.push_back({p.at("x_m").get<double>(), p.at("y_m").get<double>()});
  const int n = s.num_servers();
  if (j.contains("tx_power_dbm")) {
    s.tx_power_dbm = j.at("tx_power_dbm").get<std::vector<double>>();
  } else {
    s.tx_power_dbm.assign(n, kDefaultDuePowerDbm);
    for (int b = 0; b < s.num_bs && b < n; ++b) s.tx_power_dbm[b] = kDefaultBsPowerDbm;
  }
  s.bandwidth_hz = j.value("bandwidth_hz", s.bandwidth_hz);
  s.noise_psd_dbm_hz = j.value("noise_psd_dbm_hz", s.noise_psd_dbm_hz);
  if (j.contains("pathloss_db")) {
    const auto& pl = j.at("pathloss_db");
    s.pathloss.slope_db = pl.value("slope_db", s.pathloss.slope_db);
    s.pathloss.intercept_db = pl.value("intercept_db", s.pathloss.intercept_db);
    s.pathloss.wall_db = pl.value("wall_db", s.pathloss.wall_db);
  }
  if (j.contains("walls"))
    s.walls = j.at("walls").get<std::vector<std::vector<int>>>();
  else
    s.walls.assign(n, std::vector<int>(std::max(s.num_due, 0), 0));
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text(path, scenario_to_json(scenario).dump(2) + "\n");
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  return scenario_from_json(Json::parse(in));
}

Json allocation_to_json(const Allocation& a, const std::vector<Pattern>& patterns, int num_users) {
  Json out{{"status", std::string(to_string(a.status))}, {"patterns", patterns_json(patterns)}};
  if (!a.feasible()) return out;
  out["x"] = a.x;
  Json y = Json::array();
  const int n_servers = patterns.empty() ? 0 : patterns.front().num_servers();
  for (std::size_t i = 0; i < patterns.size(); ++i)
    for (int n = 0; n < n_servers; ++n)
      for (int u = 0; u < num_users; ++u) {
        const double v = a.y[(i * n_servers + n) * num_users + u];
        if (v > 0.0) y.push_back({{"user", u}, {"server", n}, {"pattern", i}, {"y", v}});
      }
  out["y"] = y;
  out["rates_mbps"] = {{"received", mbps(a.rates.received_bps)},
                       {"served", mbps(a.rates.served_bps)},
                       {"effective", mbps(a.rates.effective_bps)}};
  out["objective"] = a.objective;
  out["fw_gap"] = a.fw_gap;
  out["iterations"] = a.iterations;
  return out;
}

Json report_to_json(const SolveReport& r) {
  const auto& patterns = r.final_patterns.members();
  Json out{
      {"method", r.method},
      {"status", std::string(to_string(r.status))},
      {"num_bs", r.num_bs},
      {"num_users", r.num_users},
      {"bandwidth_hz", r.bandwidth_hz},
      {"final_patterns", patterns_json(patterns)},
      {"active_patterns", r.active_patterns()},
      {"final_allocation", allocation_to_json(r.final_allocation, patterns, r.num_users)},
      {"relaxed_objective", r.relaxed.feasible() ? Json(r.relaxed.objective) : Json(nullptr)},
      {"single_association", r.single_association},
      {"objective_trace", r.objective_trace},
      {"wall_time_s", r.wall_time_s},
      {"flags", {{"converged", r.flags.converged},
                 {"pattern_cap_hit", r.flags.pattern_cap_hit},
                 {"rounding_loss", r.flags.rounding_loss},
                 {"bs_only_seeded", r.flags.bs_only_seeded},
                 {"association_repaired", r.flags.association_repaired}}},
      {"warnings", r.warnings},
  };
  if (r.final_allocation.feasible()) {
    out["pf_objective"] = r.pf_objective;
    out["gm_mbps"] = r.gm_mbps;
  }
  if (r.single_association) {
    Json z = Json::array();
    for (int i = 0; i < r.associations.num_patterns; ++i) {
      Json row = Json::array();
      for (int u = 0; u < r.associations.num_users; ++u) row.push_back(r.associations.at(u, i));
      z.push_back(row);
    }
    out["associations"] = z;
  }
  Json iters = Json::array();
  for (const auto& it : r.iterations)
    iters.push_back({{"t", it.t},
                     {"num_patterns", it.num_patterns},
                     {"num_candidates", it.num_candidates},
                     {"objective", it.objective},
                     {"elapsed_s", it.elapsed_s}});
  out["iterations"] = iters;
  return out;
}

std::string solver_trace_csv(const std::vector<TracePoint>& trace) {
  std::string out = "iteration,objective,fw_gap\n";
  for (const auto& p : trace) out += std::to_string(p.iteration) + "," + num(p.objective) + "," + num(p.fw_gap) + "\n";
  return out;
}

std::string selection_trace_csv(const std::vector<IterationRecord>& iterations) {
  std::string out = "t,num_patterns,objective,wall_time_s\n";
  for (const auto& it : iterations)
    out += std::to_string(it.t) + "," + std::to_string(it.num_patterns) + "," + num(it.objective) + "," +
           num(it.elapsed_s) + "\n";
  return out;
}

std::string schedule_table_csv(const SolveReport& r, double min_share) {
  const auto& a = r.final_allocation;
  std::vector<int> cols;
  if (a.feasible())
    for (std::size_t i = 0; i < a.x.size(); ++i)
      if (a.x[i] > min_share) cols.push_back(static_cast<int>(i));
  const int n_servers = r.num_bs + r.num_users;
  const int n_users = r.num_users;

  std::ostringstream out;
  out << "server";
  for (int i : cols) out << ',' << r.final_patterns[i].to_string();
  out << "\nx";
  for (int i : cols) out << ',' << num(a.x[i]);
  out << '\n';
  for (int n = 0; n < n_servers; ++n) {
    out << server_label(n, r.num_bs);
    for (int i : cols) {
      out << ',';
      if (!r.final_patterns[i].active(n)) continue;
      std::string cell;
      for (int u = 0; u < n_users; ++u) {
        const std::size_t k = (static_cast<std::size_t>(i) * n_servers + n) * n_users + u;
        if (a.y[k] > 0.0) cell += (cell.empty() ? "" : " ") + server_label(r.num_bs + u, r.num_bs);
      }
      out << (cell.empty() ? "idle" : cell);
    }
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace d2d
