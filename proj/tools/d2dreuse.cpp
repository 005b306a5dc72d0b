// d2dreuse: scenario generation, experiment runs and algorithm-vs-brute-force
// comparison batches.

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "d2d/experiment.hpp"
#include "d2d/oracle.hpp"
#include "d2d/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

// "3..7" or "5"
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_u64(text)};
  const auto lo = parse_u64(std::string_view(text).substr(0, dots));
  const auto hi = parse_u64(std::string_view(text).substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("empty seed range " + text);
  std::vector<std::uint64_t> out;
  for (auto s = lo; s <= hi; ++s) out.push_back(s);
  return out;
}

struct GenArgs {
  d2d::GeneratorParams params;
  std::string out;
};

struct RunArgs {
  std::string config;
  std::string methods;
  std::string out;
  bool trace = false;
  bool no_timing = false;
};

struct CompareArgs {
  std::string seeds = "0..19";
  std::vector<int> dues{5};
  d2d::GeneratorParams params;
  int guard = d2d::kDefaultBruteForceGuard;
  int jobs = 1;
  std::string out;
  bool no_timing = false;
};

int do_gen(const GenArgs& a) {
  const auto scenario = d2d::generate_scenario(a.params);
  const std::string text = d2d::scenario_to_json(scenario).dump(2) + "\n";
  if (a.out.empty())
    std::cout << text;
  else
    d2d::write_text(a.out, text);
  return kExitOk;
}

int do_run(const RunArgs& a) {
  auto config = d2d::read_config(a.config);
  if (!a.methods.empty()) config.methods = d2d::parse_methods(a.methods);
  if (!a.out.empty()) config.out_dir = a.out;
  if (a.trace) config.trace = true;
  if (a.no_timing) config.record_timing = false;
  config.validate();

  const auto result = d2d::run_experiment(config);
  d2d::write_outputs(result, config);
  std::cout << d2d::summary_csv_header() << d2d::summary_csv_rows(result);
  for (const auto& m : result.methods) {
    if (m.error) std::cerr << to_string(m.method) << ": " << *m.error << "\n";
    for (const auto& w : m.report.warnings) std::cerr << to_string(m.method) << ": warning: " << w << "\n";
  }
  return result.any_infeasible() ? kExitInfeasible : kExitOk;
}

int do_compare(const CompareArgs& a) {
  const auto seeds = parse_seed_range(a.seeds);
  std::vector<d2d::GeneratorParams> jobs;
  for (int u : a.dues)
    for (auto s : seeds) {
      auto p = a.params;
      p.dues = u;
      p.seed = s;
      jobs.push_back(p);
    }
  std::vector<d2d::CompareRow> rows(jobs.size());
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard guard(lock);
        if (next == jobs.size()) return;
        k = next++;
      }
      rows[k] = d2d::compare_one(jobs[k], d2d::SelectionOptions{}, a.guard, !a.no_timing);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(a.jobs, 1); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string text = d2d::compare_csv_header();
  bool missing = false;
  for (const auto& r : rows) {
    text += d2d::compare_csv_row(r);
    missing = missing || !r.gm_algo_mbps;
  }
  if (a.out.empty())
    std::cout << text;
  else
    d2d::write_text(a.out, text);
  return missing ? kExitInfeasible : kExitOk;
}

void add_generator_flags(CLI::App* cmd, d2d::GeneratorParams& p) {
  cmd->add_option("--walls-random", p.walls_random, "draw each link's wall count from {0..K}")->check(CLI::NonNegativeNumber);
  cmd->add_option("--block-bs", p.blocked_bs, "number of DUEs whose BS link is obstructed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--block-walls", p.blocked_walls, "walls on each obstructed BS link")->check(CLI::NonNegativeNumber);
  cmd->add_option("--area", p.area_m, "side of the square drop area in meters")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-reuse pattern selection and PF allocation for D2D relay networks"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a random scenario");
  gen_cmd->add_option("--dues", gen.params.dues, "number of DUEs")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.params.seed, "random seed");
  add_generator_flags(gen_cmd, gen.params);
  gen_cmd->add_option("--out", gen.out, "output file (stdout when omitted)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run the configured methods on one scenario");
  run_cmd->add_option("--config", run.config, "experiment config JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--methods", run.methods, "comma list of algo,brute,orthogonal,bs-only");
  run_cmd->add_option("--out", run.out, "output directory (overrides the config)");
  run_cmd->add_flag("--trace", run.trace, "write solver and selection trace CSVs");
  run_cmd->add_flag("--no-timing", run.no_timing, "write wall times as 0 for byte-identical reruns");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "algorithm vs brute force over a seed batch");
  cmp_cmd->add_option("--seeds", cmp.seeds, "seed range a..b");
  cmp_cmd->add_option("--dues", cmp.dues, "DUE counts")->delimiter(',')->check(CLI::PositiveNumber);
  add_generator_flags(cmp_cmd, cmp.params);
  cmp_cmd->add_option("--guard", cmp.guard, "largest server count brute force accepts")->check(CLI::Range(1, 64));
  cmp_cmd->add_option("--jobs", cmp.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--out", cmp.out, "output CSV (stdout when omitted)");
  cmp_cmd->add_flag("--no-timing", cmp.no_timing, "write wall times as 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return do_gen(gen);
    if (*run_cmd) return do_run(run);
    if (*cmp_cmd) return do_compare(cmp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
