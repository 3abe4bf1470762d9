#include "hdg/harness/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hdg/harness/output.hpp"
#include "hdg/version.hpp"

namespace hdg::harness {

namespace {

using nlohmann::json;

json stats_json(const SeriesStats& s) {
  json j{{"mean_count", s.mean_count}, {"se_count", s.se_count}, {"frac_all_ones", s.frac_all_ones}};
  if (!s.mean_infected.empty()) j["mean_infected"] = s.mean_infected;
  return j;
}

}  // namespace

json MeanDominance::to_json() const {
  json j{{"from_t", from_t}, {"checked", checked}, {"violations", violations}, {"passed", passed()},
         {"worst_margin", worst_margin}, {"kind", "statistical"}};
  j["first_violation"] = first_violation ? json(*first_violation) : json(nullptr);
  return j;
}

MeanDominance mean_dominance(const SeriesStats& dynamic, const SeriesStats& reference, std::size_t from_t, double z) {
  MeanDominance d;
  d.from_t = from_t;
  d.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = from_t; t < dynamic.mean_count.size(); ++t) {
    const double pooled = std::hypot(dynamic.se_count[t], reference.se_count[t]);
    const double margin = dynamic.mean_count[t] - (reference.mean_count[t] - z * pooled);
    ++d.checked;
    d.worst_margin = std::min(d.worst_margin, margin);
    if (margin < 0.0) {
      ++d.violations;
      if (!d.first_violation) d.first_violation = t;
    }
  }
  if (d.checked == 0) d.worst_margin = 0.0;
  return d;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult r;
  json& s = r.summary;
  s["tool"] = "hdg";
  s["version"] = kVersion;
  s["experiment"] = to_string(cfg.kind);
  s["config"] = cfg.resolved;
  s["extrapolated"] = cfg.extrapolated;

  std::size_t from_t = kCtiBurnIn;
  if (cfg.model == ModelKind::Cti) {
    r.data = run_cti_experiment(cfg.cti);
    s["model"] = "cti";
    s["conditions"] = cti_condition_check(cfg.cti.model).to_json();
  } else {
    r.data = run_sisgcg_experiment(cfg.sis);
    s["model"] = "sisgcg";
    s["conditions"] = sisgcg_condition_check(cfg.sis.model).to_json();
    s["lambda"] = cfg.sis.model.lambda;
    s["reference_infection"] = cfg.sis.model.reference_infection();
    json inv{{"all_trials_entered", r.data.t_bar.has_value()}};
    inv["t_bar"] = r.data.t_bar ? json(*r.data.t_bar) : json(nullptr);
    inv["max_excursion"] =
        r.data.max_invariance_excursion ? json(*r.data.max_invariance_excursion) : json(nullptr);
    const bool holds = cfg.sis.model.S0 >= 1.0 ||
                       (r.data.t_bar && r.data.max_invariance_excursion.value_or(0.0) <= kInvarianceTolerance);
    inv["holds"] = holds;
    if (cfg.sis.model.S0 >= 1.0) inv["note"] = "hypothesis violated: I(0)>0 required";
    s["invariance"] = inv;
    r.passed = r.passed && holds;
    from_t = r.data.t_bar.value_or(r.data.T);
  }
  s["t_bar"] = cfg.model == ModelKind::Sisgcg && r.data.t_bar ? json(*r.data.t_bar) : json(nullptr);

  const SeriesStats sd = summarize(r.data.dynamic, r.data.num_agents);
  const SeriesStats ss = summarize(r.data.reference, r.data.num_agents);
  s["per_t"] = {{"dynamic", stats_json(sd)}, {"static", stats_json(ss)}};
  const double pd = sd.frac_all_ones.back(), ps = ss.frac_all_ones.back();
  s["dominance"] = {{"mean_count", mean_dominance(sd, ss, from_t).to_json()},
                    {"terminal_all_ones", {{"dynamic", pd}, {"static", ps}, {"holds", pd >= ps}}}};
  s["passed"] = r.passed;
  return r;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_csv(f, result.data);
    if (!f) throw std::runtime_error("write failed: results.csv");
  }
  {
    auto f = open("summary.json");
    f << result.summary.dump(2) << '\n';
  }
  {
    auto f = open("figure.svg");
    const bool sis = cfg.model == ModelKind::Sisgcg;
    const std::string title = sis ? "SIS-coupled coordination: dynamic vs frozen-infection reference"
                                  : "CTI sharing: dynamic values vs lower-bound reference";
    f << render_svg(result.data, title, 40,
                    sis ? std::optional<double>(cfg.sis.model.reference_infection()) : std::nullopt);
  }
}

}  // namespace hdg::harness
