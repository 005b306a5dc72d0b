#include "d2d/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "d2d/oracle.hpp"

namespace d2d {

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

// Uniform [0, 1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void clear_timing(SolveReport& r) {
  r.wall_time_s = 0.0;
  for (auto& it : r.iterations) it.elapsed_s = 0.0;
}

std::string method_status(const MethodResult& m) {
  return m.error ? std::string("error") : std::string(to_string(m.report.status));
}

}  // namespace

Scenario generate_scenario(const GeneratorParams& p) {
  if (p.dues < 1) throw std::invalid_argument("generator: dues must be >= 1");
  if (!(p.area_m > 0.0)) throw std::invalid_argument("generator: area_m must be positive");
  if (p.walls_random < 0 || p.blocked_walls < 0) throw std::invalid_argument("generator: wall counts must be >= 0");
  if (p.blocked_bs < 0 || p.blocked_bs > p.dues) throw std::invalid_argument("generator: blocked_bs out of range");

  std::mt19937_64 rng(p.seed);
  std::vector<Point> dues(p.dues);
  for (auto& d : dues) {
    d.x_m = unit_draw(rng) * p.area_m;
    d.y_m = unit_draw(rng) * p.area_m;
  }
  Scenario s = make_scenario({{p.area_m / 2, p.area_m / 2}}, std::move(dues), p.seed);
  const int n = s.num_servers();
  if (p.walls_random > 0) {
    const auto range = static_cast<std::uint64_t>(p.walls_random) + 1;
    for (int src = 0; src < n; ++src)
      for (int u = 0; u < p.dues; ++u)
        s.walls[src][u] = src == s.num_bs + u ? 0 : static_cast<int>(rng() % range);
  }
  // Drop order is random, so the first DUEs are a random subset.
  for (int u = 0; u < p.blocked_bs; ++u) s.walls[0][u] = p.blocked_walls;
  s.validate();
  return s;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kAlgo: return "algo";
    case Method::kBrute: return "brute";
    case Method::kOrthogonal: return "orthogonal";
    case Method::kBsOnly: return "bs_only";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "algo") return Method::kAlgo;
  if (name == "brute") return Method::kBrute;
  if (name == "orthogonal") return Method::kOrthogonal;
  if (name == "bs_only" || name == "bs-only") return Method::kBsOnly;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = list.substr(0, comma);
    if (!item.empty()) {
      const Method m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("no methods selected");
  return out;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("config: at least one method is required");
  if (scenario_file.has_value() == generator.has_value())
    throw std::invalid_argument("config: give exactly one of scenario_file and generator");
  if (brute_guard < 1 || brute_guard > kMaxServers) throw std::invalid_argument("config: brute_guard out of range");
  selection.validate();
}

Json config_to_json(const ExperimentConfig& c) {
  const auto& so = c.selection.solver;
  Json j{
      {"selection", {{"eps1", c.selection.eps1},
                     {"eps2", c.selection.eps2},
                     {"max_outer_iters", c.selection.max_outer_iters},
                     {"add_bs_only_pattern", c.selection.add_bs_only_pattern},
                     {"solver", {{"tolerance", so.tolerance},
                                 {"max_iters", so.max_iters},
                                 {"feasibility_tol", so.feasibility_tol},
                                 {"columns_per_iter", so.columns_per_iter},
                                 {"barrier_shrink", so.barrier_shrink}}}}},
      {"brute_guard", c.brute_guard},
      {"out_dir", c.out_dir},
      {"trace", c.trace},
      {"record_timing", c.record_timing},
  };
  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  if (c.scenario_file) j["scenario_file"] = *c.scenario_file;
  if (c.generator) {
    const auto& g = *c.generator;
    j["generator"] = {{"dues", g.dues},           {"seed", g.seed},
                      {"area_m", g.area_m},       {"walls_random", g.walls_random},
                      {"blocked_bs", g.blocked_bs}, {"blocked_walls", g.blocked_walls}};
  }
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  if (j.contains("scenario_file")) c.scenario_file = j.at("scenario_file").get<std::string>();
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    GeneratorParams p;
    p.dues = g.at("dues").get<int>();
    p.seed = g.value("seed", p.seed);
    p.area_m = g.value("area_m", p.area_m);
    p.walls_random = g.value("walls_random", p.walls_random);
    p.blocked_bs = g.value("blocked_bs", p.blocked_bs);
    p.blocked_walls = g.value("blocked_walls", p.blocked_walls);
    c.generator = p;
  }
  if (j.contains("selection")) {
    const auto& s = j.at("selection");
    auto& so = c.selection;
    so.eps1 = s.value("eps1", so.eps1);
    so.eps2 = s.value("eps2", so.eps2);
    so.max_outer_iters = s.value("max_outer_iters", so.max_outer_iters);
    so.add_bs_only_pattern = s.value("add_bs_only_pattern", so.add_bs_only_pattern);
    if (s.contains("solver")) {
      const auto& v = s.at("solver");
      auto& o = so.solver;
      o.tolerance = v.value("tolerance", o.tolerance);
      o.max_iters = v.value("max_iters", o.max_iters);
      o.feasibility_tol = v.value("feasibility_tol", o.feasibility_tol);
      o.columns_per_iter = v.value("columns_per_iter", o.columns_per_iter);
      o.barrier_shrink = v.value("barrier_shrink", o.barrier_shrink);
    }
  }
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) {
      const Method parsed = parse_method(m.get<std::string>());
      if (std::find(c.methods.begin(), c.methods.end(), parsed) == c.methods.end()) c.methods.push_back(parsed);
    }
  }
  c.brute_guard = j.value("brute_guard", c.brute_guard);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.trace = j.value("trace", c.trace);
  c.record_timing = j.value("record_timing", c.record_timing);
  c.validate();
  return c;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  ExperimentConfig c = config_from_json(Json::parse(in));
  // relative scenario paths are taken from the config's directory
  if (c.scenario_file && std::filesystem::path(*c.scenario_file).is_relative())
    c.scenario_file = (path.parent_path() / *c.scenario_file).string();
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  Json j = config_to_json(config);
  j.erase("out_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

bool ExperimentResult::any_infeasible() const {
  return std::any_of(methods.begin(), methods.end(), [](const MethodResult& m) { return !m.ok(); });
}

const MethodResult* ExperimentResult::find(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config_hash = config_hash(config);
  result.scenario = config.scenario_file ? read_scenario(*config.scenario_file) : generate_scenario(*config.generator);
  result.seed = result.scenario.seed;
  const Network net = build_network(result.scenario);
  for (Method m : config.methods) {
    MethodResult mr;
    mr.method = m;
    switch (m) {
      case Method::kAlgo: mr.report = run_selection(net, config.selection); break;
      case Method::kBrute:
        try {
          mr.report = brute_force_report(net, config.selection, config.brute_guard);
        } catch (const GuardExceeded& e) {
          mr.report.method = "brute";
          mr.error = e.what();
        }
        break;
      case Method::kOrthogonal: mr.report = orthogonal_baseline(net, config.selection); break;
      case Method::kBsOnly: mr.report = bs_only_baseline(net, config.selection); break;
    }
    if (!config.record_timing) clear_timing(mr.report);
    result.methods.push_back(std::move(mr));
  }
  return result;
}

std::optional<double> gm_gap_vs_brute(const ExperimentResult& result) {
  const auto* brute = result.find(Method::kBrute);
  const auto* algo = result.find(Method::kAlgo);
  if (!brute || !algo || !brute->ok() || !algo->ok()) return std::nullopt;
  return (brute->report.gm_mbps - algo->report.gm_mbps) / brute->report.gm_mbps;
}

std::string summary_csv_header() {
  return "config_hash,seed,method,status,gm_mbps,pf_objective,active_patterns,wall_time_s,gm_gap_vs_brute\n";
}

std::string summary_csv_rows(const ExperimentResult& result) {
  const std::string gap = opt_num(gm_gap_vs_brute(result));
  std::string out;
  for (const auto& m : result.methods) {
    const auto& r = m.report;
    out += result.config_hash + "," + std::to_string(result.seed) + "," + std::string(to_string(m.method)) + "," +
           method_status(m) + ",";
    if (m.ok())
      out += num(r.gm_mbps) + "," + num(r.pf_objective) + "," + std::to_string(r.active_patterns()) + ",";
    else
      out += ",,,";
    out += num(r.wall_time_s) + "," + (m.method == Method::kAlgo ? gap : std::string()) + "\n";
  }
  return out;
}

std::string cdf_csv(const ExperimentResult& result) {
  std::string out = "config_hash,seed,method,rank,rate_mbps,quantile\n";
  for (const auto& m : result.methods) {
    if (!m.ok()) continue;
    std::vector<double> rates;
    for (double r : m.report.final_allocation.rates.effective_bps) rates.push_back(r / 1e6);
    std::sort(rates.begin(), rates.end());
    const auto count = static_cast<double>(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k)
      out += result.config_hash + "," + std::to_string(result.seed) + "," + std::string(to_string(m.method)) + "," +
             std::to_string(k + 1) + "," + num(rates[k]) + "," + num(static_cast<double>(k + 1) / count) + "\n";
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config) {
  const std::filesystem::path dir = config.out_dir;
  std::filesystem::create_directories(dir);
  write_scenario(result.scenario, dir / "scenario.json");
  for (const auto& m : result.methods) {
    const std::string name(to_string(m.method));
    Json j = report_to_json(m.report);
    j["config_hash"] = result.config_hash;
    j["seed"] = result.seed;
    if (m.error) j["error"] = *m.error;
    write_text(dir / (name + ".json"), j.dump(2) + "\n");
    if (m.ok()) write_text(dir / (name + "_schedule.csv"), schedule_table_csv(m.report));
    if (config.trace) {
      write_text(dir / (name + "_solver_trace.csv"), solver_trace_csv(m.report.final_allocation.trace));
      if (m.method == Method::kAlgo) write_text(dir / (name + "_selection_trace.csv"), selection_trace_csv(m.report.iterations));
    }
  }
  write_text(dir / "summary.csv", summary_csv_header() + summary_csv_rows(result));
  write_text(dir / "cdf.csv", cdf_csv(result));
}

std::optional<double> CompareRow::gap() const {
  if (!gm_brute_mbps || !gm_algo_mbps) return std::nullopt;
  return (*gm_brute_mbps - *gm_algo_mbps) / *gm_brute_mbps;
}

CompareRow compare_one(const GeneratorParams& params, const SelectionOptions& options, int brute_guard,
                       bool record_timing) {
  CompareRow row;
  row.dues = params.dues;
  row.seed = params.seed;
  const Network net = build_network(generate_scenario(params));
  const SolveReport algo = run_selection(net, options);
  if (algo.final_allocation.feasible()) row.gm_algo_mbps = algo.gm_mbps;
  row.t_algo_s = record_timing ? algo.wall_time_s : 0.0;
  try {
    const SolveReport brute = brute_force_report(net, options, brute_guard);
    if (brute.final_allocation.feasible()) row.gm_brute_mbps = brute.gm_mbps;
    row.t_brute_s = record_timing ? brute.wall_time_s : 0.0;
  } catch (const GuardExceeded&) {
  }
  return row;
}

std::string compare_csv_header() { return "U,seed,gm_brute,gm_algo,gap,t_brute_s,t_algo_s\n"; }

std::string compare_csv_row(const CompareRow& r) {
  return std::to_string(r.dues) + "," + std::to_string(r.seed) + "," + opt_num(r.gm_brute_mbps) + "," +
         opt_num(r.gm_algo_mbps) + "," + opt_num(r.gap()) + "," + opt_num(r.t_brute_s) + "," + opt_num(r.t_algo_s) +
         "\n";
}

}  // namespace d2d
