#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "winstat/design.hpp"
#include "winstat/sim.hpp"
#include "winstat/winprob.hpp"

// Run configuration: one structured JSON file with scenario / design / sweep /
// sim / output blocks.  The scenario block is a template; tau and the study
// length can be overridden per grid cell when sweeping.

namespace winstat {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path + ": " + message), path(std::move(field_path)) {}
  std::string path;
};

struct EndpointConfig {
  MarginalModel control;
  std::optional<MarginalModel> treatment;   // explicit treatment marginal
  std::optional<double> log_hazard_ratio;   // lambda_t = lambda_c * exp(-value)
  std::optional<double> hazard_ratio;       // lambda_t = lambda_c * value
};

struct CopulaConfig {
  enum class Family { gumbel_hougaard, gaussian };
  Family family = Family::gumbel_hougaard;
  std::optional<double> tau;
  std::optional<double> kappa;  // Gumbel-Hougaard only
  std::optional<std::vector<std::vector<double>>> tau_matrix;  // Gaussian only
};

struct CensoringConfig {
  double study_length = 0.0;
  double accrual_length = 0.0;
  std::pair<double, double> accrual_shape{1.0, 1.0};
  std::optional<double> dropout_rate;        // exponential shorthand
  std::optional<MarginalModel> dropout;      // general dropout law
};

struct ScenarioConfig {
  std::vector<EndpointConfig> endpoints;
  CopulaConfig copula;
  CensoringConfig censoring;
  bool semi_competing = false;

  // Builds the concrete scenario, optionally overriding tau and the study
  // length (used by grid sweeps).
  ScenarioSpec build(std::optional<double> tau_override = std::nullopt,
                     std::optional<double> study_length_override = std::nullopt) const;
};

struct StratumConfig {
  double weight = 1.0;
  double fraction = 1.0;
  ScenarioConfig scenario;
};

struct SweepConfig {
  std::vector<double> taus;
  std::vector<double> study_lengths;
};

struct OutputConfig {
  std::string format = "csv";  // csv | md | txt
  std::string path = "-";      // "-" means stdout
};

struct RunConfig {
  ScenarioConfig scenario;
  DesignSpec design;
  std::optional<long> design_n;  // fixed total sample size
  std::vector<StratumConfig> strata;
  std::optional<SweepConfig> sweep;
  SimConfig sim;
  OutputConfig output;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& file_path);
nlohmann::json dump_config(const RunConfig& cfg);

}  // namespace winstat
