#include "hdg/dataset.hpp"

#include <cmath>

namespace hdg {

SeriesStats summarize(const ModelSeries& series, std::size_t num_agents) {
  SeriesStats s;
  if (series.trials.empty()) return s;
  const std::size_t T = series.trials.front().count_ones.size();
  const double m = static_cast<double>(series.trials.size());
  const bool infected = !series.trials.front().infected.empty();
  s.mean_count.assign(T, 0.0);
  s.se_count.assign(T, 0.0);
  s.frac_all_ones.assign(T, 0.0);
  if (infected) s.mean_infected.assign(T, 0.0);
  for (const auto& tr : series.trials) {
    for (std::size_t t = 0; t < T; ++t) {
      s.mean_count[t] += tr.count_ones[t];
      s.frac_all_ones[t] += tr.count_ones[t] == num_agents ? 1.0 : 0.0;
      if (infected) s.mean_infected[t] += tr.infected[t];
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    s.mean_count[t] /= m;
    s.frac_all_ones[t] /= m;
    if (infected) s.mean_infected[t] /= m;
  }
  if (series.trials.size() > 1) {
    for (const auto& tr : series.trials) {
      for (std::size_t t = 0; t < T; ++t) {
        const double d = tr.count_ones[t] - s.mean_count[t];
        s.se_count[t] += d * d;
      }
    }
    for (std::size_t t = 0; t < T; ++t) s.se_count[t] = std::sqrt(s.se_count[t] / (m - 1.0) / m);
  }
  return s;
}

}  // namespace hdg
