#include "winstat/config.hpp"

#include <cmath>
#include <fstream>

namespace winstat {

using nlohmann::json;

namespace {

// ---- typed field access with path-tagged errors ----

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

double get_number(const json& j, const std::string& path, const char* key) {
  return as_number(require(j, path, key), path + "." + key);
}

double get_number_or(const json& j, const std::string& path, const char* key,
                     double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), path + "." + key);
}

bool get_bool_or(const json& j, const std::string& path, const char* key, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_string_or(const json& j, const std::string& path, const char* key,
                          const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---- marginals ----

MarginalModel parse_marginal(const json& j, const std::string& path) {
  const std::string type = get_string_or(j, path, "type", "");
  if (type.empty()) throw ConfigError(path + ".type", "missing required field");
  try {
    if (type == "exponential") {
      return Exponential(get_number(j, path, "rate"));
    }
    if (type == "piecewise_exponential") {
      return PiecewiseExponential(
          as_number_array(require(j, path, "breakpoints"), path + ".breakpoints"),
          as_number_array(require(j, path, "rates"), path + ".rates"));
    }
    if (type == "tabulated") {
      return Tabulated(as_number_array(require(j, path, "times"), path + ".times"),
                       as_number_array(require(j, path, "survival"), path + ".survival"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".type",
                    "unknown marginal type '" + type +
                        "' (expected exponential, piecewise_exponential or tabulated)");
}

json marginal_to_json(const MarginalModel& m) {
  struct Visitor {
    json operator()(const Exponential& x) const {
      return {{"type", "exponential"}, {"rate", x.rate()}};
    }
    json operator()(const PiecewiseExponential& x) const {
      return {{"type", "piecewise_exponential"},
              {"breakpoints", x.breakpoints()},
              {"rates", x.rates()}};
    }
    json operator()(const Tabulated& x) const {
      std::vector<double> surv;
      surv.reserve(x.times().size());
      for (double t : x.times()) surv.push_back(x.survival(t));
      return {{"type", "tabulated"}, {"times", x.times()}, {"survival", surv}};
    }
  };
  return std::visit(Visitor{}, m);
}

// ---- scenario pieces ----

EndpointConfig parse_endpoint(const json& j, const std::string& path) {
  EndpointConfig e{parse_marginal(require(j, path, "control"), path + ".control"),
                   std::nullopt, std::nullopt, std::nullopt};
  int specs = 0;
  if (j.contains("treatment")) {
    e.treatment = parse_marginal(j.at("treatment"), path + ".treatment");
    ++specs;
  }
  if (j.contains("log_hazard_ratio")) {
    e.log_hazard_ratio = as_number(j.at("log_hazard_ratio"), path + ".log_hazard_ratio");
    ++specs;
  }
  if (j.contains("hazard_ratio")) {
    e.hazard_ratio = as_number(j.at("hazard_ratio"), path + ".hazard_ratio");
    if (!(*e.hazard_ratio > 0.0)) {
      throw ConfigError(path + ".hazard_ratio", "must be > 0");
    }
    ++specs;
  }
  if (specs != 1) {
    throw ConfigError(path,
                      "specify exactly one of treatment, log_hazard_ratio, hazard_ratio");
  }
  return e;
}

CopulaConfig parse_copula(const json& j, const std::string& path) {
  CopulaConfig c;
  const std::string family = get_string_or(j, path, "family", "gumbel_hougaard");
  if (family == "gumbel_hougaard" || family == "gumbel") {
    c.family = CopulaConfig::Family::gumbel_hougaard;
  } else if (family == "gaussian") {
    c.family = CopulaConfig::Family::gaussian;
  } else {
    throw ConfigError(path + ".family",
                      "unknown copula family '" + family +
                          "' (expected gumbel_hougaard or gaussian)");
  }
  if (j.contains("tau")) {
    c.tau = as_number(j.at("tau"), path + ".tau");
    if (*c.tau < 0.0 || *c.tau >= 1.0) throw ConfigError(path + ".tau", "must lie in [0, 1)");
  }
  if (j.contains("kappa")) {
    if (c.family != CopulaConfig::Family::gumbel_hougaard) {
      throw ConfigError(path + ".kappa", "only valid for the Gumbel-Hougaard family");
    }
    c.kappa = as_number(j.at("kappa"), path + ".kappa");
    if (!(*c.kappa >= 1.0)) throw ConfigError(path + ".kappa", "must be >= 1");
  }
  if (j.contains("tau_matrix")) {
    if (c.family != CopulaConfig::Family::gaussian) {
      throw ConfigError(path + ".tau_matrix", "only valid for the Gaussian family");
    }
    const json& m = j.at("tau_matrix");
    if (!m.is_array()) throw ConfigError(path + ".tau_matrix", "expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
      rows.push_back(as_number_array(m[i], path + ".tau_matrix[" + std::to_string(i) + "]"));
      if (rows.back().size() != m.size()) {
        throw ConfigError(path + ".tau_matrix", "matrix must be square");
      }
    }
    c.tau_matrix = std::move(rows);
  }
  if (!c.tau && !c.kappa && !c.tau_matrix) {
    throw ConfigError(path, "specify tau, kappa, or tau_matrix");
  }
  if (c.tau && c.kappa) {
    throw ConfigError(path, "specify only one of tau and kappa");
  }
  return c;
}

CensoringConfig parse_censoring(const json& j, const std::string& path) {
  CensoringConfig c;
  c.study_length = get_number(j, path, "study_length");
  c.accrual_length = get_number_or(j, path, "accrual_length", 0.0);
  if (j.contains("accrual_shape")) {
    const auto shape = as_number_array(j.at("accrual_shape"), path + ".accrual_shape");
    if (shape.size() != 2) {
      throw ConfigError(path + ".accrual_shape", "expected [early, late] shape parameters");
    }
    c.accrual_shape = {shape[0], shape[1]};
  }
  if (j.contains("dropout_rate")) {
    c.dropout_rate = as_number(j.at("dropout_rate"), path + ".dropout_rate");
    if (!(*c.dropout_rate > 0.0)) throw ConfigError(path + ".dropout_rate", "must be > 0");
  }
  if (j.contains("dropout")) {
    if (c.dropout_rate) {
      throw ConfigError(path, "specify only one of dropout_rate and dropout");
    }
    c.dropout = parse_marginal(j.at("dropout"), path + ".dropout");
  }
  return c;
}

ScenarioConfig parse_scenario(const json& j, const std::string& path) {
  ScenarioConfig s;
  const json& eps = require(j, path, "endpoints");
  if (!eps.is_array() || eps.empty()) {
    throw ConfigError(path + ".endpoints", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < eps.size(); ++i) {
    s.endpoints.push_back(
        parse_endpoint(eps[i], path + ".endpoints[" + std::to_string(i) + "]"));
  }
  s.copula = parse_copula(require(j, path, "copula"), path + ".copula");
  s.censoring = parse_censoring(require(j, path, "censoring"), path + ".censoring");
  s.semi_competing = get_bool_or(j, path, "semi_competing", false);
  if (s.copula.tau_matrix && s.copula.tau_matrix->size() != s.endpoints.size()) {
    throw ConfigError(path + ".copula.tau_matrix", "dimension must match endpoint count");
  }
  return s;
}

json copula_to_json(const CopulaConfig& c) {
  json j;
  j["family"] =
      c.family == CopulaConfig::Family::gumbel_hougaard ? "gumbel_hougaard" : "gaussian";
  if (c.tau) j["tau"] = *c.tau;
  if (c.kappa) j["kappa"] = *c.kappa;
  if (c.tau_matrix) j["tau_matrix"] = *c.tau_matrix;
  return j;
}

json scenario_to_json(const ScenarioConfig& s) {
  json eps = json::array();
  for (const auto& e : s.endpoints) {
    json je;
    je["control"] = marginal_to_json(e.control);
    if (e.treatment) je["treatment"] = marginal_to_json(*e.treatment);
    if (e.log_hazard_ratio) je["log_hazard_ratio"] = *e.log_hazard_ratio;
    if (e.hazard_ratio) je["hazard_ratio"] = *e.hazard_ratio;
    eps.push_back(std::move(je));
  }
  json cens;
  cens["study_length"] = s.censoring.study_length;
  cens["accrual_length"] = s.censoring.accrual_length;
  cens["accrual_shape"] = {s.censoring.accrual_shape.first, s.censoring.accrual_shape.second};
  if (s.censoring.dropout_rate) cens["dropout_rate"] = *s.censoring.dropout_rate;
  if (s.censoring.dropout) cens["dropout"] = marginal_to_json(*s.censoring.dropout);
  return {{"endpoints", std::move(eps)},
          {"copula", copula_to_json(s.copula)},
          {"censoring", std::move(cens)},
          {"semi_competing", s.semi_competing}};
}

}  // namespace

ScenarioSpec ScenarioConfig::build(std::optional<double> tau_override,
                                   std::optional<double> study_length_override) const {
  const std::size_t k = endpoints.size();

  std::vector<MarginalModel> control_margs, treat_margs;
  for (const auto& e : endpoints) {
    control_margs.push_back(e.control);
    if (e.treatment) {
      treat_margs.push_back(*e.treatment);
    } else if (e.log_hazard_ratio) {
      treat_margs.push_back(scale_hazard(e.control, std::exp(-*e.log_hazard_ratio)));
    } else {
      treat_margs.push_back(scale_hazard(e.control, *e.hazard_ratio));
    }
  }

  CopulaSpec spec = GumbelHougaard{1.0};
  if (copula.family == CopulaConfig::Family::gumbel_hougaard) {
    double kap;
    if (tau_override) {
      kap = tau_to_kappa(*tau_override);
    } else if (copula.kappa) {
      kap = *copula.kappa;
    } else {
      kap = tau_to_kappa(*copula.tau);
    }
    spec = GumbelHougaard{kap};
  } else {
    Eigen::MatrixXd corr;
    if (tau_override) {
      corr = exchangeable_gauss_corr(static_cast<int>(k), *tau_override);
    } else if (copula.tau_matrix) {
      const auto& tm = *copula.tau_matrix;
      corr.resize(static_cast<int>(k), static_cast<int>(k));
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          corr(static_cast<int>(i), static_cast<int>(j)) =
              (i == j) ? 1.0 : tau_to_gauss_rho(tm[i][j]);
        }
      }
    } else {
      corr = exchangeable_gauss_corr(static_cast<int>(k), *copula.tau);
    }
    spec = GaussianCopula{std::move(corr)};
  }

  const double s = study_length_override.value_or(censoring.study_length);
  std::optional<MarginalModel> dropout = censoring.dropout;
  if (censoring.dropout_rate) dropout = Exponential(*censoring.dropout_rate);

  return ScenarioSpec{
      ArmJointModel(std::move(treat_margs), spec),
      ArmJointModel(std::move(control_margs), spec),
      CensoringModel(s, censoring.accrual_length, censoring.accrual_shape,
                     std::move(dropout)),
      semi_competing};
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  RunConfig cfg;
  cfg.scenario = parse_scenario(require(j, "config", "scenario"), "scenario");

  if (j.contains("design")) {
    const json& d = j.at("design");
    cfg.design.alpha = get_number_or(d, "design", "alpha", 0.05);
    if (!(cfg.design.alpha > 0.0) || !(cfg.design.alpha < 1.0)) {
      throw ConfigError("design.alpha", "must lie in (0, 1)");
    }
    cfg.design.power = get_number_or(d, "design", "power", 0.9);
    if (!(cfg.design.power > 0.0) || !(cfg.design.power < 1.0)) {
      throw ConfigError("design.power", "must lie in (0, 1)");
    }
    cfg.design.allocation = get_number_or(d, "design", "allocation", 0.5);
    if (!(cfg.design.allocation > 0.0) || !(cfg.design.allocation < 1.0)) {
      throw ConfigError("design.allocation", "must lie in (0, 1)");
    }
    if (d.contains("n")) {
      const double n = as_number(d.at("n"), "design.n");
      if (!(n >= 2.0) || n != std::floor(n)) {
        throw ConfigError("design.n", "must be an integer >= 2");
      }
      cfg.design_n = static_cast<long>(n);
    }
    if (d.contains("strata")) {
      const json& st = d.at("strata");
      if (!st.is_array() || st.empty()) {
        throw ConfigError("design.strata", "expected a non-empty array");
      }
      double fsum = 0.0;
      for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string path = "design.strata[" + std::to_string(i) + "]";
        StratumConfig sc;
        sc.weight = get_number_or(st[i], path, "weight", 1.0);
        if (!(sc.weight > 0.0)) throw ConfigError(path + ".weight", "must be > 0");
        sc.fraction = get_number(st[i], path, "fraction");
        if (!(sc.fraction > 0.0)) throw ConfigError(path + ".fraction", "must be > 0");
        fsum += sc.fraction;
        sc.scenario = parse_scenario(require(st[i], path, "scenario"), path + ".scenario");
        cfg.strata.push_back(std::move(sc));
      }
      if (std::fabs(fsum - 1.0) > 1e-8) {
        throw ConfigError("design.strata", "fractions must sum to 1");
      }
    }
  }

  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    SweepConfig s;
    s.taus = as_number_array(require(sw, "sweep", "taus"), "sweep.taus");
    for (double t : s.taus) {
      if (t < 0.0 || t >= 1.0) throw ConfigError("sweep.taus", "values must lie in [0, 1)");
    }
    if (sw.contains("study_lengths")) {
      s.study_lengths =
          as_number_array(sw.at("study_lengths"), "sweep.study_lengths");
      for (double v : s.study_lengths) {
        if (!(v > 0.0)) throw ConfigError("sweep.study_lengths", "values must be > 0");
      }
    } else {
      s.study_lengths = {cfg.scenario.censoring.study_length};
    }
    if (s.taus.empty()) throw ConfigError("sweep.taus", "expected at least one value");
    cfg.sweep = std::move(s);
  }

  cfg.sim.alpha = cfg.design.alpha;
  cfg.sim.allocation = cfg.design.allocation;
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    const double reps = get_number_or(s, "sim", "replicates", 2000.0);
    if (!(reps >= 1.0) || reps != std::floor(reps)) {
      throw ConfigError("sim.replicates", "must be a positive integer");
    }
    cfg.sim.replicates = static_cast<int>(reps);
    const double n = get_number_or(s, "sim", "n_per_trial", 1000.0);
    if (!(n >= 2.0) || n != std::floor(n)) {
      throw ConfigError("sim.n_per_trial", "must be an integer >= 2");
    }
    cfg.sim.n_per_trial = static_cast<int>(n);
    cfg.sim.allocation = get_number_or(s, "sim", "allocation", cfg.sim.allocation);
    if (!(cfg.sim.allocation > 0.0) || !(cfg.sim.allocation < 1.0)) {
      throw ConfigError("sim.allocation", "must lie in (0, 1)");
    }
    cfg.sim.alpha = get_number_or(s, "sim", "alpha", cfg.sim.alpha);
    const double seed = get_number_or(s, "sim", "seed", 1.0);
    if (!(seed >= 0.0) || seed != std::floor(seed)) {
      throw ConfigError("sim.seed", "must be a non-negative integer");
    }
    cfg.sim.seed = static_cast<std::uint64_t>(seed);
  }
  cfg.sim.semi_competing = cfg.scenario.semi_competing;

  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.output.format = get_string_or(o, "output", "format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "md" &&
        cfg.output.format != "txt") {
      throw ConfigError("output.format", "expected csv, md or txt");
    }
    cfg.output.path = get_string_or(o, "output", "path", "-");
  }

  return cfg;
}

RunConfig load_config(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw ConfigError("config", "cannot open file '" + file_path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::json dump_config(const RunConfig& cfg) {
  json j;
  j["scenario"] = scenario_to_json(cfg.scenario);
  json d;
  d["alpha"] = cfg.design.alpha;
  d["power"] = cfg.design.power;
  d["allocation"] = cfg.design.allocation;
  if (cfg.design_n) d["n"] = *cfg.design_n;
  if (!cfg.strata.empty()) {
    json st = json::array();
    for (const auto& s : cfg.strata) {
      st.push_back({{"weight", s.weight},
                    {"fraction", s.fraction},
                    {"scenario", scenario_to_json(s.scenario)}});
    }
    d["strata"] = std::move(st);
  }
  j["design"] = std::move(d);
  if (cfg.sweep) {
    j["sweep"] = {{"taus", cfg.sweep->taus}, {"study_lengths", cfg.sweep->study_lengths}};
  }
  j["sim"] = {{"replicates", cfg.sim.replicates},
              {"n_per_trial", cfg.sim.n_per_trial},
              {"allocation", cfg.sim.allocation},
              {"alpha", cfg.sim.alpha},
              {"seed", cfg.sim.seed},
              {"semi_competing", cfg.sim.semi_competing}};
  j["output"] = {{"format", cfg.output.format}, {"path", cfg.output.path}};
  return j;
}

}  // namespace winstat
