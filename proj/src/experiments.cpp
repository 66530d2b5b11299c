#include "wmn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "wmn/error.hpp"
#include "wmn/risktheory.hpp"

namespace wmn::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::InvalidConfiguration, "field '" + field + "': " + why);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- parsing

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t is assumed to be 64-bit");

template <class T>
T get_as(const json& v, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        config_error(field, "expected a non-negative integer");
      }
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) config_error(field, "expected an integer");
      return v.get<int>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) config_error(field, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) config_error(field, "expected a string");
      return v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  } catch (const json::exception& e) {
    config_error(field, e.what());
  }
}

template <class T>
std::vector<T> get_list(const json& v, const std::string& field) {
  if (!v.is_array()) config_error(field, "expected an array");
  std::vector<T> out;
  for (const auto& item : v) out.push_back(get_as<T>(item, field));
  return out;
}

CoefficientModel parse_model(const std::string& s) {
  if (s == "complex_gaussian") return CoefficientModel::ComplexGaussian;
  if (s == "real_gaussian") return CoefficientModel::RealGaussian;
  config_error("coefficient_model", "expected complex_gaussian or real_gaussian");
}

WeightKind parse_weight(const std::string& s) {
  if (s == "separable") return WeightKind::Separable;
  if (s == "euclidean") return WeightKind::Euclidean;
  config_error("weight", "expected separable or euclidean");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  config_error("format", "expected csv or json");
}

FitMethod parse_method(const std::string& s) {
  if (s == "least_squares") return FitMethod::LeastSquares;
  if (s == "plain_min_norm") return FitMethod::PlainMinNorm;
  if (s == "weighted_min_norm") return FitMethod::WeightedMinNorm;
  config_error("methods", "unknown method '" + s + "'");
}

void validate(const ExperimentSpec& s) {
  if (s.D == 0) config_error("D", "must be >= 1");
  if (s.n == 0 || s.n > s.D) config_error("n", "must satisfy 1 <= n <= D");
  if (s.p_rule != "curve" && s.p_rule != "aligned" && s.p_rule != "all") {
    config_error("p_rule", "expected curve, aligned or all");
  }
  if (s.q_rule != "list" && s.q_rule != "equal_r") config_error("q_rule", "expected list or equal_r");
  for (double r : s.r_list)
    if (!(r >= 0.0) || !std::isfinite(r)) config_error("r_list", "entries must be finite and >= 0");
  for (double q : s.q_list)
    if (!(q >= 0.0) || !std::isfinite(q)) config_error("q_list", "entries must be finite and >= 0");
  if (s.mc.trials == 0) config_error("trials", "must be >= 1");
  if (!(s.mc.confidence > 0.0 && s.mc.confidence < 1.0)) config_error("confidence", "must lie in (0, 1)");
  if (!(s.noise_sigma >= 0.0)) config_error("noise_sigma", "must be >= 0");
  if (!(s.domain.length > 0.0)) config_error("domain_length", "must be positive");
  for (const auto& m : s.methods) parse_method(m);
  for (double t : s.t_multipliers)
    if (!(t >= 0.0)) config_error("t_multipliers", "entries must be >= 0");
}

// ---------------------------------------------------------------- helpers

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> q_values(const ExperimentSpec& spec, double r) {
  if (spec.q_rule == "equal_r") return {r};
  return sorted_unique(spec.q_list);
}

std::string regime_label(const GridConfig& g) { return g.p <= g.n ? "under" : "over"; }

struct SweepPoint {
  double r;
  double q;
  std::size_t p;
};

std::vector<SweepPoint> sweep(const ExperimentSpec& spec, const std::vector<std::size_t>& ps) {
  std::vector<SweepPoint> pts;
  for (double r : sorted_unique(spec.r_list))
    for (double q : q_values(spec, r))
      for (std::size_t p : ps) pts.push_back({r, q, p});
  return pts;
}

void require_closed_form_grid(const ExperimentSpec& spec, const std::vector<std::size_t>& ps) {
  if (spec.D % spec.n != 0) config_error("n", "closed-form risks need n to divide D");
  for (std::size_t p : ps) {
    if (p > spec.n && p % spec.n != 0) {
      config_error("p_list", "p=" + std::to_string(p) + " > n is not a multiple of n; no closed form");
    }
  }
}

std::map<double, Spectrum> spectra(std::size_t D, const std::vector<double>& rs) {
  std::map<double, Spectrum> out;
  for (double r : rs) out.emplace(r, build_spectrum(D, r));
  return out;
}

std::string path_with_suffix(const std::string& out, const std::string& suffix, const std::string& ext) {
  return suffix.empty() ? out : out + "_" + suffix + ext;
}

std::string label_for(const std::string& method, double q) {
  if (method != "weighted_min_norm") return method;
  std::ostringstream s;
  s << method << "_q" << q;
  return s.str();
}

struct TabulatedSamples {
  std::size_t d = 1;
  std::vector<double> points;
  CVector values;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

// Header: coordinate columns, then "value" and optionally "value_imag".
TabulatedSamples read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("samples_file", "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) config_error("samples_file", "empty file");
  const auto header = split_csv_line(line);
  auto value_col = std::find(header.begin(), header.end(), "value");
  if (value_col == header.end()) config_error("samples_file", "missing 'value' column");
  TabulatedSamples out;
  out.d = static_cast<std::size_t>(value_col - header.begin());
  if (out.d == 0) config_error("samples_file", "no coordinate columns before 'value'");
  const bool has_imag = header.size() > out.d + 1 && header[out.d + 1] == "value_imag";
  std::vector<cplx> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) config_error("samples_file", "row with wrong column count");
    try {
      for (std::size_t a = 0; a < out.d; ++a) out.points.push_back(std::stod(cells[a]));
      const double re = std::stod(cells[out.d]);
      const double im = has_imag ? std::stod(cells[out.d + 1]) : 0.0;
      values.emplace_back(re, im);
    } catch (const std::exception&) {
      config_error("samples_file", "non-numeric entry in '" + line + "'");
    }
  }
  out.values = Eigen::Map<CVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) config_error("out", "cannot write '" + path + "'");
  out << text;
}

}  // namespace

// ---------------------------------------------------------------- spec I/O

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::RiskCurve: return "risk-curve";
    case Command::McRisk: return "mc-risk";
    case Command::Heatmap: return "heatmap";
    case Command::BoundCheck: return "bound-check";
    case Command::Interp: return "interp";
    case Command::Concentration: return "concentration";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (auto c : {Command::RiskCurve, Command::McRisk, Command::Heatmap, Command::BoundCheck, Command::Interp,
                 Command::Concentration}) {
    if (name == to_string(c)) return c;
  }
  config_error("command", "unknown command '" + name + "'");
}

ExperimentSpec parse_spec(const json& doc) {
  if (!doc.is_object()) config_error("<root>", "expected a JSON object");
  ExperimentSpec s;
  for (const auto& [key, v] : doc.items()) {
    if (key == "command") s.command = parse_command(get_as<std::string>(v, key));
    else if (key == "D") s.D = get_as<std::size_t>(v, key);
    else if (key == "n") s.n = get_as<std::size_t>(v, key);
    else if (key == "p_list") s.p_list = get_list<std::size_t>(v, key);
    else if (key == "p_rule") s.p_rule = get_as<std::string>(v, key);
    else if (key == "r_list") s.r_list = get_list<double>(v, key);
    else if (key == "q_list") s.q_list = get_list<double>(v, key);
    else if (key == "q_rule") s.q_rule = get_as<std::string>(v, key);
    else if (key == "n_list") s.n_list = get_list<std::size_t>(v, key);
    else if (key == "l_list") s.l_list = get_list<std::size_t>(v, key);
    else if (key == "tau_per_l") s.tau_per_l = get_list<std::size_t>(v, key);
    else if (key == "t_multipliers") s.t_multipliers = get_list<double>(v, key);
    else if (key == "trials") s.mc.trials = get_as<std::size_t>(v, key);
    else if (key == "seed") s.mc.seed = get_as<std::uint64_t>(v, key);
    else if (key == "coefficient_model") s.mc.coefficient_model = parse_model(get_as<std::string>(v, key));
    else if (key == "confidence") s.mc.confidence = get_as<double>(v, key);
    else if (key == "target") s.target = get_as<std::string>(v, key);
    else if (key == "samples_file") s.samples_file = get_as<std::string>(v, key);
    else if (key == "n_axis") s.n_axis = get_as<std::size_t>(v, key);
    else if (key == "D_axis") s.D_axis = get_as<std::size_t>(v, key);
    else if (key == "p_under_axis") s.p_under_axis = get_as<std::size_t>(v, key);
    else if (key == "p_over_axis") s.p_over_axis = get_as<std::size_t>(v, key);
    else if (key == "methods") s.methods = get_list<std::string>(v, key);
    else if (key == "noise_sigma") s.noise_sigma = get_as<double>(v, key);
    else if (key == "weight") s.weight = parse_weight(get_as<std::string>(v, key));
    else if (key == "eval_points_axis") s.eval_points_axis = get_as<std::size_t>(v, key);
    else if (key == "domain_origin") s.domain.origin = get_as<double>(v, key);
    else if (key == "domain_length") s.domain.length = get_as<double>(v, key);
    else if (key == "threads") s.threads = get_as<int>(v, key);
    else if (key == "out") s.out = get_as<std::string>(v, key);
    else if (key == "format") s.format = parse_format(get_as<std::string>(v, key));
    else config_error(key, "unknown field");
  }
  validate(s);
  return s;
}

ojson to_json(const ExperimentSpec& s) {
  ojson j;
  j["command"] = to_string(s.command);
  j["D"] = s.D;
  j["n"] = s.n;
  if (s.p_list) j["p_list"] = *s.p_list;
  j["p_rule"] = s.p_rule;
  j["r_list"] = s.r_list;
  j["q_list"] = s.q_list;
  j["q_rule"] = s.q_rule;
  j["n_list"] = s.n_list;
  j["l_list"] = s.l_list;
  j["tau_per_l"] = s.tau_per_l;
  j["t_multipliers"] = s.t_multipliers;
  j["trials"] = s.mc.trials;
  j["seed"] = s.mc.seed;
  j["coefficient_model"] = to_string(s.mc.coefficient_model);
  j["confidence"] = s.mc.confidence;
  j["target"] = s.target;
  j["samples_file"] = s.samples_file;
  j["n_axis"] = s.n_axis;
  j["D_axis"] = s.D_axis;
  j["p_under_axis"] = s.p_under_axis;
  j["p_over_axis"] = s.p_over_axis;
  j["methods"] = s.methods;
  j["noise_sigma"] = s.noise_sigma;
  j["weight"] = to_string(s.weight);
  j["eval_points_axis"] = s.eval_points_axis;
  j["domain_origin"] = s.domain.origin;
  j["domain_length"] = s.domain.length;
  j["threads"] = s.threads;
  j["out"] = s.out;
  j["format"] = s.format == OutputFormat::Csv ? "csv" : "json";
  return j;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("--config", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    config_error("--config", e.what());
  }
  return parse_spec(doc);
}

// ---------------------------------------------------------------- tables

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) out << format_double(v);
            else if constexpr (std::is_same_v<V, bool>) out << (v ? "true" : "false");
            else if constexpr (std::is_same_v<V, std::monostate>) out << "";
            else out << v;
          },
          row[c]);
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json_text(const Table& table) {
  ojson arr = ojson::array();
  for (const auto& row : table.rows) {
    ojson obj = ojson::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) obj[table.columns[c]] = nullptr;
            else if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v)) obj[table.columns[c]] = v;
              else obj[table.columns[c]] = format_double(v);
            } else obj[table.columns[c]] = v;
          },
          row[c]);
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

// ---------------------------------------------------------------- commands

std::vector<std::size_t> p_values(const ExperimentSpec& spec) {
  std::vector<std::size_t> ps;
  if (spec.p_list) {
    ps = *spec.p_list;
    if (ps.empty()) config_error("p_list", "empty p grid");
    for (std::size_t p : ps)
      if (p == 0 || p > spec.D) config_error("p_list", "p=" + std::to_string(p) + " outside [1, D]");
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
  }
  if (spec.p_rule == "all") {
    for (std::size_t p = 1; p <= spec.D; ++p) ps.push_back(p);
    return ps;
  }
  if (spec.p_rule == "curve") {
    for (std::size_t p = 1; p < spec.n; ++p) ps.push_back(p);
  }
  for (std::size_t p = spec.n; p <= spec.D; p += spec.n) ps.push_back(p);
  return ps;
}

Tables compute_risk_curve(const ExperimentSpec& spec) {
  validate(spec);
  const auto ps = p_values(spec);
  require_closed_form_grid(spec, ps);
  if (spec.r_list.empty()) config_error("r_list", "empty r grid");
  const auto specs = spectra(spec.D, spec.r_list);
  const auto pts = sweep(spec, ps);

  const auto risks = indexed_map<double>(pts.size(), [&](std::size_t i) {
    const auto& pt = pts[i];
    return risk_closed(specs.at(pt.r), classify_grid(spec.D, spec.n, pt.p), pt.q);
  });

  Table t{{"D", "n", "p", "r", "q", "regime", "risk_theory"}, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto g = classify_grid(spec.D, spec.n, pts[i].p);
    t.rows.push_back({std::int64_t(spec.D), std::int64_t(spec.n), std::int64_t(pts[i].p), pts[i].r, pts[i].q,
                      regime_label(g), risks[i]});
  }
  return {{{"", std::move(t)}}, {}, std::nullopt};
}

Tables compute_mc_risk(const ExperimentSpec& spec) {
  validate(spec);
  const auto ps = p_values(spec);
  if (spec.r_list.empty()) config_error("r_list", "empty r grid");
  const auto specs = spectra(spec.D, spec.r_list);
  const auto pts = sweep(spec, ps);

  Table t{{"D", "n", "p", "r", "q", "regime", "risk_theory", "risk_mc_mean", "ci_low", "ci_high"}, {}};
  for (const auto& pt : pts) {
    const auto& s = specs.at(pt.r);
    const auto g = classify_grid(spec.D, spec.n, pt.p);
    const bool closed = g.tau && (g.p <= g.n || g.l);
    const double theory = closed ? risk_closed(s, g, pt.q) : risk_trace(s, g, pt.q);
    const auto est = empirical_risk(s, g, pt.q, spec.mc);
    t.rows.push_back({std::int64_t(spec.D), std::int64_t(spec.n), std::int64_t(pt.p), pt.r, pt.q, regime_label(g),
                      theory, est.mean, est.ci_low, est.ci_high});
  }
  return {{{"", std::move(t)}}, {}, std::nullopt};
}

Tables compute_heatmap(const ExperimentSpec& spec) {
  validate(spec);
  const auto ps = p_values(spec);
  require_closed_form_grid(spec, ps);
  if (spec.r_list.empty()) config_error("r_list", "empty r grid");
  const auto specs = spectra(spec.D, spec.r_list);
  const auto pts = sweep(spec, ps);

  const auto risks = indexed_map<double>(pts.size(), [&](std::size_t i) {
    const auto& pt = pts[i];
    return risk_closed(specs.at(pt.r), classify_grid(spec.D, spec.n, pt.p), pt.q);
  });

  Table t{{"D", "n", "r", "q", "p", "regime", "risk", "log10_risk"}, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto g = classify_grid(spec.D, spec.n, pts[i].p);
    t.rows.push_back({std::int64_t(spec.D), std::int64_t(spec.n), pts[i].r, pts[i].q, std::int64_t(pts[i].p),
                      regime_label(g), risks[i], std::log10(risks[i])});
  }
  return {{{"", std::move(t)}}, {}, std::nullopt};
}

Tables compute_bound_check(const ExperimentSpec& spec) {
  validate(spec);
  struct Config {
    std::size_t D, n, p;
    double r, q;
  };
  std::vector<Config> configs;
  std::vector<std::string> warnings;
  for (double r : sorted_unique(spec.r_list))
    for (double q : q_values(spec, r))
      for (std::size_t n : spec.n_list)
        for (std::size_t l : spec.l_list)
          for (std::size_t m : spec.tau_per_l) {
            if (n == 0 || l == 0 || m == 0) config_error("n_list", "grid entries must be >= 1");
            Config c{m * l * n, n, l * n, r, q};
            std::ostringstream why;
            if (std::abs(q - r) > 1e-12) why << "q != r";
            else if (!(r > 0.5)) why << "r <= 1/2";
            else if (l < 2) why << "l < 2";
            if (!why.str().empty()) {
              std::ostringstream w;
              w << "skipped D=" << c.D << " n=" << n << " p=" << c.p << " r=" << format_double(r)
                << " q=" << format_double(q) << ": " << why.str();
              warnings.push_back(w.str());
              continue;
            }
            configs.push_back(c);
          }

  struct Result {
    double risk, bound;
  };
  const auto results = indexed_map<Result>(configs.size(), [&](std::size_t i) {
    const auto& c = configs[i];
    const auto s = build_spectrum(c.D, c.r);
    const auto g = classify_grid(c.D, c.n, c.p);
    return Result{risk_over_closed(s, g, c.q).risk, asymptotic_bound(s, g, c.q).bound};
  });

  Table t{{"D", "n", "p", "r", "q", "kind", "t", "risk", "bound", "slack", "valid"}, {}};
  double min_slack = std::numeric_limits<double>::infinity();
  bool all_valid = true;
  auto push = [&](const Config& c, const char* kind, Cell tcell, double risk, double bound) {
    const double slack = bound - risk;
    min_slack = std::min(min_slack, slack);
    all_valid = all_valid && slack >= 0.0;
    t.rows.push_back({std::int64_t(c.D), std::int64_t(c.n), std::int64_t(c.p), c.r, c.q, std::string(kind),
                      std::move(tcell), risk, bound, slack, slack >= 0.0});
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    push(configs[i], "rate", std::monostate{}, results[i].risk, results[i].bound);
  }
  if (!spec.t_multipliers.empty()) {
    for (const auto& c : configs) {
      const auto s = build_spectrum(c.D, c.r);
      const auto g = classify_grid(c.D, c.n, c.p);
      const double T = concentration_bound(c.r, c.q, 1.0).T_q;
      std::vector<double> ts;
      for (double m : spec.t_multipliers) ts.push_back(m * T);
      for (const auto& row : concentration_check(s, g, c.q, ts, spec.mc)) {
        push(c, "concentration", row.t, row.empirical_tail, row.bound_tail + 3.0 * row.standard_error);
      }
    }
  }
  const auto none = Cell{std::monostate{}};
  t.rows.push_back({none, none, none, none, none, std::string("summary"), none, none, none,
                    configs.empty() ? none : Cell{min_slack}, all_valid});
  return {{{"", std::move(t)}}, std::move(warnings), std::nullopt};
}

Tables compute_concentration(const ExperimentSpec& spec) {
  validate(spec);
  const auto ps = p_values(spec);
  const std::vector<double> multipliers =
      spec.t_multipliers.empty() ? std::vector<double>{0.5, 1.0, 2.0} : spec.t_multipliers;
  std::vector<std::string> warnings;
  Table t{{"D", "n", "p", "r", "q", "T_q", "t_multiplier", "t", "empirical_tail", "bound_tail", "standard_error",
           "dominated"},
          {}};
  for (const auto& pt : sweep(spec, ps)) {
    if (!(pt.q > 0.5) || !(pt.r >= pt.q) || pt.p < spec.n) {
      std::ostringstream w;
      w << "skipped p=" << pt.p << " r=" << format_double(pt.r) << " q=" << format_double(pt.q)
        << ": needs r >= q > 1/2 and p >= n";
      warnings.push_back(w.str());
      continue;
    }
    const auto s = build_spectrum(spec.D, pt.r);
    const auto g = classify_grid(spec.D, spec.n, pt.p);
    const double T = concentration_bound(pt.r, pt.q, 1.0).T_q;
    std::vector<double> ts;
    for (double m : multipliers) ts.push_back(m * T);
    const auto rows = concentration_check(s, g, pt.q, ts, spec.mc);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.rows.push_back({std::int64_t(spec.D), std::int64_t(spec.n), std::int64_t(pt.p), pt.r, pt.q, T,
                        multipliers[i], rows[i].t, rows[i].empirical_tail, rows[i].bound_tail,
                        rows[i].standard_error, rows[i].dominated});
    }
  }
  return {{{"", std::move(t)}}, std::move(warnings), std::nullopt};
}

Tables compute_interp(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.target.empty() == spec.samples_file.empty()) {
    config_error("target", "give exactly one of target or samples_file");
  }
  if (spec.methods.empty()) config_error("methods", "no methods requested");
  if (spec.n_axis == 0) config_error("n_axis", "must be >= 1");

  std::optional<TargetFunction> truth;
  InterpolationProblem base;
  std::vector<double> sample_pts;
  if (!spec.target.empty()) {
    truth = builtin_target(spec.target);
    base = make_problem(*truth, spec.n_axis, 1, spec.D_axis, 0.0, spec.noise_sigma, spec.mc.seed, spec.weight);
    sample_pts = sample_points(base.d, spec.n_axis, base.domain);
  } else {
    const auto tab = read_samples(spec.samples_file);
    base.d = tab.d;
    base.n_axis = spec.n_axis;
    base.D_axis = spec.D_axis;
    base.domain = spec.domain;
    base.weight = spec.weight;
    base.samples = tab.values;
    if (static_cast<std::size_t>(tab.values.size()) != base.sample_count()) {
      config_error("samples_file", "expected n_axis^d = " + std::to_string(base.sample_count()) + " rows");
    }
    sample_pts = sample_points(base.d, spec.n_axis, base.domain);
    for (std::size_t i = 0; i < sample_pts.size(); ++i) {
      if (std::abs(sample_pts[i] - tab.points[i]) > 1e-9 * std::max(1.0, spec.domain.length)) {
        config_error("samples_file", "coordinates do not match the equispaced grid on the periodic domain");
      }
    }
  }
  const std::size_t d = base.d;
  const std::size_t p_over = spec.p_over_axis ? spec.p_over_axis : spec.D_axis;
  const std::size_t p_under = spec.p_under_axis ? spec.p_under_axis : std::max<std::size_t>(1, spec.n_axis / 2);
  if (spec.D_axis != 0 && p_over > spec.D_axis) config_error("p_over_axis", "exceeds D_axis");

  // dense evaluation grid
  const std::size_t m = spec.eval_points_axis ? spec.eval_points_axis : (d == 1 ? 1000 : 100);
  const auto eval_pts = sample_points(d, m, base.domain);
  std::vector<double> f_true;
  if (truth) {
    f_true.resize(eval_pts.size() / d);
    for (std::size_t i = 0; i < f_true.size(); ++i) f_true[i] = truth->eval(std::span<const double>(&eval_pts[i * d], d));
  }

  struct Job {
    std::string method;
    double q;
  };
  std::vector<Job> jobs;
  const auto qs = sorted_unique(spec.q_list);
  const double norm_q = qs.empty() ? 0.0 : qs.back();
  for (const auto& method : spec.methods) {
    if (method == "weighted_min_norm") {
      for (double q : qs) jobs.push_back({method, q});
    } else {
      jobs.push_back({method, 0.0});
    }
  }

  Tables out;
  ojson metrics;
  metrics["target"] = truth ? truth->name : std::string("samples_file");
  metrics["d"] = d;
  metrics["n_axis"] = spec.n_axis;
  metrics["D_axis"] = spec.D_axis;
  metrics["domain_origin"] = base.domain.origin;
  metrics["domain_length"] = base.domain.length;
  metrics["noise_sigma"] = truth ? spec.noise_sigma : 0.0;
  metrics["sample_points"] = sample_pts;
  {
    std::vector<double> re, im;
    for (Eigen::Index i = 0; i < base.samples.size(); ++i) {
      re.push_back(base.samples(i).real());
      im.push_back(base.samples(i).imag());
    }
    metrics["sample_values"] = re;
    metrics["sample_values_imag"] = im;
  }
  metrics["norm_q"] = norm_q;
  ojson method_metrics = ojson::array();

  for (const auto& job : jobs) {
    const FitMethod method = parse_method(job.method);
    InterpolationProblem problem = base;
    problem.p_axis = method == FitMethod::LeastSquares ? p_under : p_over;
    problem.q = job.q;
    const auto fit = fit_interpolant(problem, method);
    const auto values = evaluate_interpolant(fit, eval_pts);

    Table t;
    for (std::size_t a = 0; a < d; ++a) t.columns.push_back(a == 0 ? "x" : (a == 1 ? "y" : "x" + std::to_string(a)));
    t.columns.insert(t.columns.end(), {"f_true", "f_hat", "f_hat_imag"});
    double se = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::vector<Cell> row;
      for (std::size_t a = 0; a < d; ++a) row.push_back(eval_pts[i * d + a]);
      row.push_back(truth ? Cell{f_true[i]} : Cell{std::monostate{}});
      row.push_back(values[i].real());
      row.push_back(values[i].imag());
      t.rows.push_back(std::move(row));
      if (truth) se += std::norm(values[i] - f_true[i]);
    }
    const std::string label = label_for(job.method, job.q);
    ojson mm;
    mm["label"] = label;
    mm["method"] = job.method;
    mm["q"] = job.q;
    mm["p_axis"] = problem.p_axis;
    mm["sample_residual"] = sample_residual(fit, problem);
    mm["weighted_norm"] = weighted_norm(fit, norm_q, spec.weight);
    mm["plain_norm"] = fit.coefficients.norm();
    if (truth) mm["rmse"] = std::sqrt(se / static_cast<double>(values.size()));
    else mm["rmse"] = nullptr;
    method_metrics.push_back(std::move(mm));
    out.tables.emplace_back(label, std::move(t));
  }
  metrics["methods"] = std::move(method_metrics);
  out.metrics = std::move(metrics);
  return out;
}

Tables compute(const ExperimentSpec& spec) {
  switch (spec.command) {
    case Command::RiskCurve: return compute_risk_curve(spec);
    case Command::McRisk: return compute_mc_risk(spec);
    case Command::Heatmap: return compute_heatmap(spec);
    case Command::BoundCheck: return compute_bound_check(spec);
    case Command::Interp: return compute_interp(spec);
    case Command::Concentration: return compute_concentration(spec);
  }
  config_error("command", "unhandled command");
}

std::vector<std::string> run(const ExperimentSpec& spec) {
  if (spec.out.empty()) config_error("out", "no output path given");
  set_thread_count(spec.threads);
  const Tables result = compute(spec);

  const std::string ext = spec.format == OutputFormat::Csv ? ".csv" : ".json";
  std::vector<std::string> written;
  for (const auto& [suffix, table] : result.tables) {
    const std::string path = path_with_suffix(spec.out, suffix, ext);
    write_file(path, spec.format == OutputFormat::Csv ? to_csv(table) : to_json_text(table));
    written.push_back(path);
  }
  if (result.metrics) {
    const std::string path = spec.out + "_metrics.json";
    write_file(path, result.metrics->dump(2) + "\n");
    written.push_back(path);
  }
  if (!result.warnings.empty()) {
    std::string text;
    for (const auto& w : result.warnings) text += "warning: " + w + "\n";
    write_file(spec.out + ".log", text);
    written.push_back(spec.out + ".log");
  }
  return written;
}

}  // namespace wmn::cli
