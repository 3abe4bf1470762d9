#ifndef HDG_DATASET_HPP
#define HDG_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdg {

/// Observables of one simulated trial, one entry per time step t = 0..T-1.
struct TrialSeries {
  std::vector<std::uint32_t> count_ones;
  std::vector<double> infected;  // empty when the model has no epidemic state
};

struct ModelSeries {
  std::string model;  // "dynamic" or "static"
  std::vector<TrialSeries> trials;
};

/// Paired dynamic/static runs sharing per-trial random streams.
struct Dataset {
  std::size_t num_agents = 0;
  std::size_t T = 0;
  ModelSeries dynamic{"dynamic", {}};
  ModelSeries reference{"static", {}};
  /// Epidemic runs only: latest per-trial entry time into S <= gamma/beta1,
  /// empty if some trial never entered.
  std::optional<std::size_t> t_bar;
  /// Epidemic runs only: max over trials and t >= entry of S(t) - gamma/beta1.
  std::optional<double> max_invariance_excursion;
};

struct SeriesStats {
  std::vector<double> mean_count;
  std::vector<double> se_count;  // sample standard deviation / sqrt(trials)
  std::vector<double> frac_all_ones;
  std::vector<double> mean_infected;  // empty without epidemic state
};

SeriesStats summarize(const ModelSeries& series, std::size_t num_agents);

}  // namespace hdg

#endif  // HDG_DATASET_HPP
