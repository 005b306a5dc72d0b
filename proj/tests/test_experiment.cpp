#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "d2d/experiment.hpp"
#include "d2d/report.hpp"

using namespace d2d;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("d2dreuse_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig generated(int dues, std::uint64_t seed, std::vector<Method> methods) {
  ExperimentConfig c;
  GeneratorParams g;
  g.dues = dues;
  g.seed = seed;
  g.walls_random = 4;
  c.generator = g;
  c.methods = std::move(methods);
  return c;
}

}  // namespace

TEST_CASE("generator") {
  GeneratorParams p;
  p.dues = 30;
  p.seed = 7;
  const Scenario s = generate_scenario(p);
  CHECK(s.num_bs + s.num_due == 31);
  CHECK(s.positions[0].x_m == 100.0);
  CHECK(s.positions[0].y_m == 100.0);

  // the documented draw: 53 high bits of each mt19937_64 output
  std::mt19937_64 rng(7);
  for (int u = 0; u < 30; ++u) {
    const double x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 200.0;
    const double y = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 200.0;
    CHECK(s.positions[1 + u].x_m == x);
    CHECK(s.positions[1 + u].y_m == y);
  }

  CHECK(scenario_to_json(generate_scenario(p)).dump() == scenario_to_json(s).dump());
  p.seed = 8;
  CHECK(scenario_to_json(generate_scenario(p)).dump() != scenario_to_json(s).dump());

  p.walls_random = 2;
  const Scenario w = generate_scenario(p);
  bool saw_two = false;
  for (std::size_t n = 0; n < w.walls.size(); ++n)
    for (std::size_t u = 0; u < w.walls[n].size(); ++u) {
      CHECK(w.walls[n][u] >= 0);
      CHECK(w.walls[n][u] <= 2);
      saw_two = saw_two || w.walls[n][u] == 2;
      if (n == 1 + u) CHECK(w.walls[n][u] == 0);
    }
  CHECK(saw_two);

  p.walls_random = 0;
  p.blocked_bs = 3;
  const Scenario b = generate_scenario(p);
  for (int u = 0; u < 30; ++u) CHECK(b.walls[0][u] == (u < 3 ? 20 : 0));

  p.blocked_bs = 31;
  CHECK_THROWS_AS(generate_scenario(p), std::invalid_argument);
}

TEST_CASE("scenario JSON round trip is bit exact") {
  GeneratorParams p;
  p.dues = 6;
  p.seed = 123;
  p.walls_random = 3;
  const Scenario s = generate_scenario(p);
  const fs::path dir = scratch("roundtrip");
  write_scenario(s, dir / "s.json");
  const Scenario r = read_scenario(dir / "s.json");
  REQUIRE(r.positions.size() == s.positions.size());
  for (std::size_t k = 0; k < s.positions.size(); ++k) {
    CHECK(r.positions[k].x_m == s.positions[k].x_m);
    CHECK(r.positions[k].y_m == s.positions[k].y_m);
  }
  CHECK(r.walls == s.walls);
  CHECK(r.tx_power_dbm == s.tx_power_dbm);
  CHECK(r.seed == s.seed);
  write_scenario(r, dir / "t.json");
  CHECK(slurp(dir / "s.json") == slurp(dir / "t.json"));

  Json bad = scenario_to_json(s);
  bad["walls"][0][0] = -1;
  CHECK_THROWS(scenario_from_json(bad));
  fs::remove_all(dir);
}

TEST_CASE("config parsing and hashing") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

  const Json j = Json::parse(R"({"generator": {"dues": 4, "seed": 9}, "methods": ["algo", "bs-only"]})");
  const ExperimentConfig c = config_from_json(j);
  REQUIRE(c.generator);
  CHECK(c.generator->dues == 4);
  CHECK(c.generator->seed == 9);
  CHECK(c.methods == std::vector{Method::kAlgo, Method::kBsOnly});
  CHECK(c.selection.eps1 == 1e-4);

  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(config_from_json(config_to_json(c))) == h);
  ExperimentConfig moved = c;
  moved.out_dir = "elsewhere";
  CHECK(config_hash(moved) == h);
  ExperimentConfig other = c;
  other.generator->seed = 10;
  CHECK(config_hash(other) != h);

  CHECK_THROWS(config_from_json(Json::parse(R"({"methods": ["algo"]})")));
  CHECK_THROWS(config_from_json(Json::parse(R"({"generator": {"dues": 3}, "methods": ["nope"]})")));
  CHECK(parse_methods("algo,brute") == std::vector{Method::kAlgo, Method::kBrute});
}

TEST_CASE("summary gap column") {
  const ExperimentResult r = run_experiment(generated(5, 2, {Method::kAlgo, Method::kBrute}));
  const auto rows = parse_csv(summary_csv_header() + summary_csv_rows(r));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].back() == "gm_gap_vs_brute");
  const auto* algo = r.find(Method::kAlgo);
  const auto* brute = r.find(Method::kBrute);
  REQUIRE(algo);
  REQUIRE(brute);
  const double expect = (brute->report.gm_mbps - algo->report.gm_mbps) / brute->report.gm_mbps;
  CHECK(rows[1][2] == "algo");
  CHECK(std::stod(rows[1][8]) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rows[2][8].empty());
  CHECK(std::stod(rows[1][4]) == algo->report.gm_mbps);
}

TEST_CASE("BS-only CDF on a symmetric pair") {
  const fs::path dir = scratch("cdf");
  const Scenario s = make_scenario({{100, 100}}, {{150, 100}, {50, 100}}, 0);
  write_scenario(s, dir / "pair.json");
  ExperimentConfig c;
  c.scenario_file = (dir / "pair.json").string();
  c.methods = {Method::kBsOnly};
  const auto rows = parse_csv(cdf_csv(run_experiment(c)));
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][4]) == doctest::Approx(std::stod(rows[2][4])).epsilon(1e-9));
  CHECK(rows[1][5] == "0.5");
  CHECK(rows[2][5] == "1");
  fs::remove_all(dir);
}

TEST_CASE("guard refusal does not stop other methods") {
  ExperimentConfig c = generated(4, 1, {Method::kBrute, Method::kAlgo});
  c.brute_guard = 3;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.methods.size() == 2);
  CHECK(r.methods[0].error);
  CHECK(r.methods[1].ok());
  CHECK(r.any_infeasible());
  const auto rows = parse_csv(summary_csv_rows(r));
  CHECK(rows[0][3] == "error");
}

TEST_CASE("seed batch gives one row per seed") {
  std::string text = summary_csv_header();
  for (std::uint64_t seed = 0; seed < 20; ++seed) text += summary_csv_rows(run_experiment(generated(4, seed, {Method::kAlgo})));
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 21);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].size() == rows[0].size());
    CHECK(rows[k][1] == std::to_string(k - 1));
    CHECK(std::stod(rows[k][4]) > 0.0);
  }
}

TEST_CASE("outputs are reproducible without timing") {
  ExperimentConfig c = generated(5, 4, {Method::kAlgo, Method::kBrute, Method::kOrthogonal, Method::kBsOnly});
  c.record_timing = false;
  c.trace = true;
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  c.out_dir = a.string();
  write_outputs(run_experiment(c), c);
  c.out_dir = b.string();
  write_outputs(run_experiment(c), c);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());
  }
  CHECK(fs::exists(a / "algo_solver_trace.csv"));
  CHECK(files >= 12);
  const Json algo = Json::parse(slurp(a / "algo.json"));
  CHECK(algo.at("wall_time_s").get<double>() == 0.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("compare rows") {
  GeneratorParams p;
  p.dues = 4;
  p.seed = 3;
  p.walls_random = 4;
  const CompareRow row = compare_one(p, {}, 13, false);
  REQUIRE(row.gm_algo_mbps);
  REQUIRE(row.gm_brute_mbps);
  CHECK(*row.gap() == doctest::Approx((*row.gm_brute_mbps - *row.gm_algo_mbps) / *row.gm_brute_mbps));
  CHECK(*row.t_algo_s == 0.0);
  const auto cells = parse_csv(compare_csv_header() + compare_csv_row(row));
  CHECK(cells[0] == std::vector<std::string>{"U", "seed", "gm_brute", "gm_algo", "gap", "t_brute_s", "t_algo_s"});
  CHECK(cells[1][0] == "4");

  const CompareRow big = compare_one(p, {}, 4, false);
  CHECK_FALSE(big.gm_brute_mbps);
  CHECK_FALSE(big.gap());
}
