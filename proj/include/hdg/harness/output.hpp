#ifndef HDG_HARNESS_OUTPUT_HPP
#define HDG_HARNESS_OUTPUT_HPP

#include <optional>
#include <ostream>
#include <string>

#include "hdg/dataset.hpp"

namespace hdg::harness {

inline constexpr const char* kCsvHeader = "model,trial,t,count_ones,at_all_ones,infected_fraction";

/// One row per (model, trial, t): dynamic rows first, then static; trials and
/// t (0-based) ascending. infected_fraction is written with %.12g and left
/// empty when the model has no epidemic state.
void write_csv(std::ostream& out, const Dataset& data);

/// Faint per-trial traces (first `max_traces` trials) and trial means of the
/// count of 1-players; dynamic in red, static in blue, mean I(t) dotted when
/// present. `reference_line` draws a horizontal guide on the I(t) axis.
std::string render_svg(const Dataset& data, const std::string& title, std::size_t max_traces = 40,
                       std::optional<double> reference_line = std::nullopt);

}  // namespace hdg::harness

#endif  // HDG_HARNESS_OUTPUT_HPP
