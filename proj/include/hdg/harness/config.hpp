#ifndef HDG_HARNESS_CONFIG_HPP
#define HDG_HARNESS_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/cti.hpp"
#include "hdg/sisgcg.hpp"

namespace hdg::harness {

enum class ExperimentKind { CtiFig1, SisFig2, Custom };
enum class ModelKind { Cti, Sisgcg };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::CtiFig1;
  ModelKind model = ModelKind::Cti;
  CtiExperimentConfig cti;
  SisgcgExperimentConfig sis;
  std::string out = "out";
  /// Every key with its value after defaults were applied.
  nlohmann::json resolved;
  /// Keys whose defaults are not stated by the model description.
  std::vector<std::string> extrapolated;

  std::size_t trials() const { return model == ModelKind::Cti ? cti.trials : sis.trials; }
  std::size_t T() const { return model == ModelKind::Cti ? cti.T : sis.T; }
};

/// Built-in defaults for an experiment kind, as a config document.
nlohmann::json default_document(ExperimentKind kind, ModelKind model = ModelKind::Cti);

/// Validates `doc` (unknown keys, types, ranges), fills defaults and builds the
/// typed config. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file and parses it. Throws ConfigError on unreadable or
/// malformed input.
ExperimentConfig parse_config_file(const std::string& path);

/// Applies "a.b=value" to `doc`; the value is parsed as JSON when possible,
/// otherwise kept as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

std::string to_string(ExperimentKind kind);

}  // namespace hdg::harness

#endif  // HDG_HARNESS_CONFIG_HPP
