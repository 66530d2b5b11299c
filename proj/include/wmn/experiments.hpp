#pragma once

// Experiment runner behind the `wmn` command-line tool: parses experiment
// specs, sweeps parameter grids and writes deterministic CSV/JSON tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wmn/interpolation.hpp"
#include "wmn/montecarlo.hpp"

namespace wmn::cli {

enum class Command { RiskCurve, McRisk, Heatmap, BoundCheck, Interp, Concentration };
enum class OutputFormat { Csv, Json };

const char* to_string(Command command) noexcept;
Command parse_command(const std::string& name);

struct ExperimentSpec {
  Command command = Command::RiskCurve;

  // model grid
  std::size_t D = 1024;
  std::size_t n = 64;
  std::optional<std::vector<std::size_t>> p_list;  // unset: generated by p_rule
  std::string p_rule = "curve";  // "curve" | "aligned" | "all"
  std::vector<double> r_list{0.3, 0.5, 1.0};
  std::vector<double> q_list{0.0};
  std::string q_rule = "list";  // "list" | "equal_r"

  // bound-check grid
  std::vector<std::size_t> n_list{8, 16, 32};
  std::vector<std::size_t> l_list{2, 4};
  std::vector<std::size_t> tau_per_l{2, 4};

  // concentration (also bound-check when non-empty)
  std::vector<double> t_multipliers;

  // Monte Carlo
  McConfig mc;

  // interpolation
  std::string target;
  std::string samples_file;
  std::size_t n_axis = 15;
  std::size_t D_axis = 1000;
  std::size_t p_under_axis = 0;  // 0: n_axis / 2 (at least 1)
  std::size_t p_over_axis = 0;   // 0: D_axis
  std::vector<std::string> methods{"least_squares", "plain_min_norm", "weighted_min_norm"};
  double noise_sigma = 0.1;  // relative to the largest absolute sample
  WeightKind weight = WeightKind::Separable;
  std::size_t eval_points_axis = 0;  // 0: 1000 in 1-D, 100 per axis otherwise
  PeriodicDomain domain;             // only used with samples_file

  // runtime
  int threads = 0;
  std::string out;
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Strict parse: unknown keys, wrong types and invalid values throw
/// Error(InvalidConfiguration) naming the offending field.
ExperimentSpec parse_spec(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::string& path);

using Cell = std::variant<std::int64_t, double, std::string, bool, std::monostate>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Doubles use 17 significant digits; LF line endings; header row first.
std::string to_csv(const Table& table);
/// Array of row objects with keys in column order.
std::string to_json_text(const Table& table);

struct Tables {
  std::vector<std::pair<std::string, Table>> tables;  // suffix, table
  std::vector<std::string> warnings;
  std::optional<nlohmann::ordered_json> metrics;  // interp only
};

/// p values for the grid: explicit list, or "curve" (1..n-1 then n, 2n, ..., D),
/// "aligned" (n, 2n, ..., D), "all" (1..D).
std::vector<std::size_t> p_values(const ExperimentSpec& spec);

Tables compute_risk_curve(const ExperimentSpec& spec);
Tables compute_mc_risk(const ExperimentSpec& spec);
Tables compute_heatmap(const ExperimentSpec& spec);
Tables compute_bound_check(const ExperimentSpec& spec);
Tables compute_interp(const ExperimentSpec& spec);
Tables compute_concentration(const ExperimentSpec& spec);

Tables compute(const ExperimentSpec& spec);

/// Runs the command and writes its files; returns the paths written. Data
/// goes to spec.out (interp: spec.out + "_<label>.<ext>" and
/// spec.out + "_metrics.json"); warnings to spec.out + ".log".
std::vector<std::string> run(const ExperimentSpec& spec);

}  // namespace wmn::cli
