#ifndef HDG_HARNESS_EXPERIMENT_HPP
#define HDG_HARNESS_EXPERIMENT_HPP

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hdg/dataset.hpp"
#include "hdg/harness/config.hpp"

namespace hdg::harness {

/// CTI runs compare means only from this step on; the two models start from
/// the same draw and need time to separate.
inline constexpr std::size_t kCtiBurnIn = 50;

struct MeanDominance {
  std::size_t from_t = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  double worst_margin = 0.0;  // min over t of dyn - (stat - z * pooled SE)
  bool passed() const { return violations == 0; }
  nlohmann::json to_json() const;
};

/// dyn mean >= stat mean - z * sqrt(se_dyn^2 + se_stat^2) for every t >= from_t.
MeanDominance mean_dominance(const SeriesStats& dynamic, const SeriesStats& reference, std::size_t from_t,
                             double z = 2.0);

struct ExperimentResult {
  Dataset data;
  nlohmann::json summary;
  /// Deterministic checks only (the epidemic invariance); statistical
  /// verdicts are reported in the summary but do not fail a run.
  bool passed = true;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes results.csv, summary.json and figure.svg into `dir` (created if
/// missing). Throws std::runtime_error when a file cannot be written.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::string& dir);

}  // namespace hdg::harness

#endif  // HDG_HARNESS_EXPERIMENT_HPP
