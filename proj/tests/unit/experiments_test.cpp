#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wmn/error.hpp"
#include "wmn/experiments.hpp"
#include "wmn/risktheory.hpp"

namespace {

using namespace wmn;
using namespace wmn::cli;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wmn_experiments_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

double num(const Cell& c) { return std::holds_alternative<double>(c) ? std::get<double>(c) : double(std::get<std::int64_t>(c)); }

std::size_t col(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Lookup;
}

ExperimentSpec random_spec(oracle::Gen& gen) {
  ExperimentSpec s;
  s.command = gen.pick(std::vector<Command>{Command::RiskCurve, Command::McRisk, Command::Heatmap,
                                            Command::BoundCheck, Command::Interp, Command::Concentration});
  s.n = gen.size(1, 64);
  s.D = s.n * gen.size(1, 32);
  if (gen.coin()) {
    std::vector<std::size_t> ps(gen.size(0, 5));
    for (auto& p : ps) p = gen.size(1, s.D);
    s.p_list = ps;
  }
  s.p_rule = gen.pick(std::vector<std::string>{"curve", "aligned", "all"});
  s.r_list.resize(gen.size(0, 4));
  for (auto& r : s.r_list) r = gen.real(0, 3);
  s.q_list.resize(gen.size(0, 4));
  for (auto& q : s.q_list) q = gen.real(0, 3);
  s.q_rule = gen.coin() ? "list" : "equal_r";
  s.n_list = {gen.size(1, 9)};
  s.l_list = {gen.size(1, 4), gen.size(1, 4)};
  s.tau_per_l = {gen.size(1, 4)};
  s.t_multipliers.resize(gen.size(0, 3));
  for (auto& t : s.t_multipliers) t = gen.real(0, 4);
  s.mc.trials = gen.size(1, 5000);
  s.mc.seed = gen.engine()();
  s.mc.coefficient_model = gen.coin() ? CoefficientModel::RealGaussian : CoefficientModel::ComplexGaussian;
  s.mc.confidence = gen.real(0.01, 0.99);
  s.target = gen.pick(std::vector<std::string>{"", "cubic1d", "cos2d"});
  s.samples_file = gen.coin() ? "" : "samples.csv";
  s.n_axis = gen.size(1, 40);
  s.D_axis = gen.size(1, 4000);
  s.p_under_axis = gen.size(0, 10);
  s.p_over_axis = gen.size(0, 100);
  s.methods = {gen.pick(std::vector<std::string>{"least_squares", "plain_min_norm", "weighted_min_norm"})};
  s.noise_sigma = gen.real(0, 1);
  s.weight = gen.coin() ? WeightKind::Separable : WeightKind::Euclidean;
  s.eval_points_axis = gen.size(0, 2000);
  s.domain = PeriodicDomain{gen.real(-5, 5), gen.real(0.1, 5)};
  s.threads = int(gen.size(0, 8));
  s.out = "out_" + std::to_string(gen.size(0, 99));
  s.format = gen.coin() ? OutputFormat::Csv : OutputFormat::Json;
  return s;
}

TEST(Spec, RoundTripsThroughJson) {
  oracle::Gen gen(131);
  for (int trial = 0; trial < 200; ++trial) {
    const auto spec = random_spec(gen);
    const auto text = to_json(spec).dump();
    EXPECT_EQ(parse_spec(nlohmann::json::parse(text)), spec) << text;
  }
}

TEST(Spec, StrictValidation) {
  try {
    parse_spec(nlohmann::json{{"D", 64}, {"colour", "red"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfiguration);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  try {
    parse_spec(nlohmann::json{{"r_list", "1.0"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("r_list"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { parse_spec(nlohmann::json{{"D", -4}}); }), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of([] { parse_spec(nlohmann::json{{"n", 128}, {"D", 64}}); }), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of([] { parse_spec(nlohmann::json{{"command", "plot"}}); }), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of([] { parse_spec(nlohmann::json{{"confidence", 1.5}}); }), ErrorKind::InvalidConfiguration);
  EXPECT_EQ(kind_of([] { parse_spec(nlohmann::json::array()); }), ErrorKind::InvalidConfiguration);
}

TEST(Spec, PRules) {
  ExperimentSpec s;
  s.D = 16;
  s.n = 4;
  EXPECT_EQ(p_values(s), (std::vector<std::size_t>{1, 2, 3, 4, 8, 12, 16}));
  s.p_rule = "aligned";
  EXPECT_EQ(p_values(s), (std::vector<std::size_t>{4, 8, 12, 16}));
  s.p_rule = "all";
  EXPECT_EQ(p_values(s).size(), 16u);
  s.p_list = std::vector<std::size_t>{8, 2, 8};
  EXPECT_EQ(p_values(s), (std::vector<std::size_t>{2, 8}));
  s.p_list = std::vector<std::size_t>{};
  EXPECT_EQ(kind_of([&] { p_values(s); }), ErrorKind::InvalidConfiguration);
  s.p_list = std::vector<std::size_t>{17};
  EXPECT_EQ(kind_of([&] { p_values(s); }), ErrorKind::InvalidConfiguration);
}

TEST(Tables, CsvAndJsonFormatting) {
  Table t{{"a", "b", "c", "d", "e"}, {{std::int64_t(3), 0.1, std::string("x"), true, std::monostate{}}}};
  EXPECT_EQ(to_csv(t), "a,b,c,d,e\n3,0.10000000000000001,x,true,\n");
  const auto j = nlohmann::json::parse(to_json_text(t));
  EXPECT_EQ(j[0]["a"], 3);
  EXPECT_EQ(j[0]["b"].get<double>(), 0.1);
  EXPECT_TRUE(j[0]["e"].is_null());
  EXPECT_EQ(j[0].begin().key(), "a");
}

TEST(Tables, DoublesRoundTripThroughCsv) {
  oracle::Gen gen(137);
  for (int i = 0; i < 500; ++i) {
    const double v = std::ldexp(gen.real(-1, 1), int(gen.size(0, 200)) - 100);
    const std::string csv = to_csv(Table{{"v"}, {{v}}});
    EXPECT_EQ(std::stod(csv.substr(2)), v);
  }
}

TEST(RiskCurve, RowsSortedAndKnownValues) {
  ExperimentSpec s;
  s.D = 1024;
  s.n = 64;
  s.r_list = {1.0, 0.5};
  s.q_list = {0.5, 0.0};
  const auto t = compute_risk_curve(s).tables.at(0).second;
  EXPECT_EQ(t.columns, (std::vector<std::string>{"D", "n", "p", "r", "q", "regime", "risk_theory"}));
  ASSERT_EQ(t.rows.size(), 4 * (63 + 16));
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const auto key = [&](std::size_t k) {
      return std::tuple(num(t.rows[k][3]), num(t.rows[k][4]), num(t.rows[k][2]));
    };
    EXPECT_LT(key(i - 1), key(i));
  }
  double at_n = 0, at_16n = 0;
  for (const auto& row : t.rows) {
    const double r = num(row[3]), q = num(row[4]), p = num(row[2]);
    if (p == 1024 && q == 0.0) EXPECT_NEAR(num(row[6]), 1.0 - 64.0 / 1024.0, 1e-14);
    if (r == 0.5 && q == 0.5 && p == 64) at_n = num(row[6]);
    if (r == 0.5 && q == 0.5 && p == 1024) at_16n = num(row[6]);
    EXPECT_EQ(std::get<std::string>(row[5]), p <= 64 ? "under" : "over");
  }
  EXPECT_GT(at_n, at_16n);
}

TEST(RiskCurve, EmptyGridWritesNothing) {
  ExperimentSpec s;
  s.D = 64;
  s.n = 8;
  s.p_list = std::vector<std::size_t>{};
  s.out = scratch("empty.csv").string();
  fs::remove(s.out);
  EXPECT_EQ(kind_of([&] { run(s); }), ErrorKind::InvalidConfiguration);
  EXPECT_FALSE(fs::exists(s.out));

  s.p_list = std::vector<std::size_t>{20};  // > n and not a multiple of n
  EXPECT_EQ(kind_of([&] { run(s); }), ErrorKind::InvalidConfiguration);
  EXPECT_FALSE(fs::exists(s.out));
}

TEST(Heatmap, TransitionsAndShape) {
  ExperimentSpec s;
  s.command = Command::Heatmap;
  s.D = 256;
  s.n = 16;
  s.r_list = {1.5, 2.0};
  s.q_list = {0.0};
  auto t = compute_heatmap(s).tables.at(0).second;
  EXPECT_EQ(t.columns, (std::vector<std::string>{"D", "n", "r", "q", "p", "regime", "risk", "log10_risk"}));
  for (double r : {1.5, 2.0}) {
    double below = 0, above = 0;
    for (const auto& row : t.rows) {
      if (num(row[2]) != r) continue;
      if (num(row[4]) == 15) below = num(row[6]);
      if (num(row[4]) == 32) above = num(row[6]);
      EXPECT_NEAR(num(row[7]), std::log10(num(row[6])), 1e-15);
    }
    EXPECT_GT(above, below) << r;
  }

  s.q_rule = "equal_r";
  s.r_list = {1.5};
  t = compute_heatmap(s).tables.at(0).second;
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(num(t.rows[i][6]), num(t.rows[i - 1][6]));

  s.p_list = std::vector<std::size_t>{32};
  EXPECT_EQ(compute_heatmap(s).tables.at(0).second.rows.size(), 1u);
}

TEST(BoundCheck, SlackAndWarnings) {
  ExperimentSpec s;
  s.command = Command::BoundCheck;
  s.r_list = {0.4, 1.0};
  s.q_rule = "equal_r";
  s.n_list = {16};
  s.l_list = {2};
  s.tau_per_l = {2, 4};
  s.out = scratch("bound.csv").string();
  const auto written = run(s);
  ASSERT_EQ(written.size(), 2u);
  EXPECT_EQ(written[1], s.out + ".log");
  const std::string log = slurp(s.out + ".log");
  EXPECT_NE(log.find("r <= 1/2"), std::string::npos);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);

  const auto t = compute_bound_check(s).tables.at(0).second;
  ASSERT_EQ(t.rows.size(), 3u);
  // D = 64, n = 16, p = 32, r = q = 1
  EXPECT_EQ(num(t.rows[0][0]), 64);
  EXPECT_GE(num(t.rows[0][col(t, "slack")]), 0.0);
  EXPECT_EQ(std::get<std::string>(t.rows.back()[col(t, "kind")]), "summary");
  EXPECT_TRUE(std::get<bool>(t.rows.back()[col(t, "valid")]));
  EXPECT_EQ(num(t.rows.back()[col(t, "slack")]),
            std::min(num(t.rows[0][col(t, "slack")]), num(t.rows[1][col(t, "slack")])));
  EXPECT_EQ(slurp(s.out).find("0.40000000000000002"), std::string::npos);
}

TEST(Concentration, TableShape) {
  ExperimentSpec s;
  s.command = Command::Concentration;
  s.D = 64;
  s.n = 8;
  s.p_list = std::vector<std::size_t>{4, 16};
  s.r_list = {1.0};
  s.q_rule = "equal_r";
  s.mc.trials = 100;
  const auto out = compute_concentration(s);
  const auto& t = out.tables.at(0).second;
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(out.warnings.size(), 1u);
  EXPECT_NEAR(num(t.rows[0][col(t, "T_q")]), 4.0 * std::sqrt(10.0 / 3.0), 1e-14);
  EXPECT_EQ(num(t.rows[2][col(t, "t_multiplier")]), 2.0);
}

TEST(Interp, SampleFileRoundTrip) {
  const auto file = scratch("samples.csv");
  {
    std::ofstream out(file);
    out << "x,value\n";
    for (int j = 0; j < 8; ++j) out << -1.0 + 0.25 * j << "," << (j % 3) * 0.5 - 0.25 << "\n";
  }
  ExperimentSpec s;
  s.command = Command::Interp;
  s.samples_file = file.string();
  s.n_axis = 8;
  s.D_axis = 20;
  s.p_under_axis = 8;
  s.q_list = {1.0};
  s.eval_points_axis = 16;
  const auto out = compute_interp(s);
  ASSERT_TRUE(out.metrics);
  const auto& m = *out.metrics;
  for (int j = 0; j < 8; ++j) {
    EXPECT_EQ(m["sample_points"][j].get<double>(), -1.0 + 0.25 * j);
    EXPECT_EQ(m["sample_values"][j].get<double>(), (j % 3) * 0.5 - 0.25);
  }
  EXPECT_EQ(out.tables.size(), 3u);
  EXPECT_TRUE(m["methods"][0]["rmse"].is_null());
  for (const auto& mm : m["methods"]) EXPECT_LT(mm["sample_residual"].get<double>(), 1e-10);

  // off-grid coordinates are rejected
  {
    std::ofstream out(file);
    out << "x,value\n";
    for (int j = 0; j < 8; ++j) out << 0.3 * j << ",1\n";
  }
  EXPECT_EQ(kind_of([&] { compute_interp(s); }), ErrorKind::InvalidConfiguration);
}

TEST(Interp, UnknownTargetAndWeightedBeatsPlain) {
  ExperimentSpec s;
  s.command = Command::Interp;
  s.target = "wiggle";
  EXPECT_EQ(kind_of([&] { compute_interp(s); }), ErrorKind::Lookup);

  s.target = "cos2d";
  s.n_axis = 10;
  s.D_axis = 41;
  s.q_list = {2.0};
  s.noise_sigma = 0.0;
  s.eval_points_axis = 40;
  s.methods = {"plain_min_norm", "weighted_min_norm"};
  const auto m = *compute_interp(s).metrics;
  EXPECT_LT(m["methods"][1]["rmse"].get<double>(), m["methods"][0]["rmse"].get<double>());
  EXPECT_LT(m["methods"][1]["weighted_norm"].get<double>(), m["methods"][0]["weighted_norm"].get<double>());
}

TEST(Determinism, McRiskIdenticalAcrossThreadCounts) {
  ExperimentSpec s;
  s.command = Command::McRisk;
  s.D = 64;
  s.n = 8;
  s.r_list = {1.0};
  s.q_rule = "equal_r";
  s.mc.trials = 40;
  s.mc.seed = 99;
  s.out = scratch("mc_a.csv").string();
  s.threads = 1;
  run(s);
  const auto a = slurp(s.out);
  s.threads = 4;
  s.out = scratch("mc_b.csv").string();
  run(s);
  EXPECT_EQ(a, slurp(s.out));
  s.mc.seed = 100;
  s.out = scratch("mc_c.csv").string();
  run(s);
  EXPECT_NE(a, slurp(s.out));
}

#ifdef WMN_CLI_PATH
int run_cli(const std::string& args) {
  const int status = std::system((std::string(WMN_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesAndOverrides) {
  const auto cfg = scratch("cli.json");
  const auto out = scratch("cli_out.csv");
  {
    std::ofstream f(cfg);
    f << R"({"D": 32, "n": 4, "r_list": [1.0], "q_rule": "equal_r", "trials": 10, "seed": 1, "out": "unused"})";
  }
  fs::remove(out);
  EXPECT_EQ(run_cli("mc-risk --config " + cfg.string() + " --out " + out.string() + " --seed 2 --trials 12"), 0);
  ASSERT_TRUE(fs::exists(out));

  ExperimentSpec s = load_spec(cfg.string());
  s.command = Command::McRisk;
  s.mc.seed = 2;
  s.mc.trials = 12;
  s.out = scratch("cli_lib.csv").string();
  run(s);
  EXPECT_EQ(slurp(out), slurp(s.out));

  {
    std::ofstream f(cfg);
    f << R"({"D": 32, "n": 4, "bogus": 1})";
  }
  EXPECT_EQ(run_cli("risk-curve --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run_cli("risk-curve"), 2);  // no output path
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("interp --out " + scratch("x").string()), 2);  // neither target nor samples
}
#endif

}  // namespace
