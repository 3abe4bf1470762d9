// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// An optional argument selects a single criterion by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hdg/coupling.hpp"
#include "hdg/cti.hpp"
#include "hdg/equilibrium.hpp"
#include "hdg/sisgcg.hpp"
#include "hdg/harness/config.hpp"
#include "hdg/harness/experiment.hpp"
#include "hdg/harness/output.hpp"
#include "hdg/harness/verify.hpp"

using namespace hdg;
using namespace hdg::harness;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CtiConfig cti_instance(const Graph& g, bool uniform_values, std::uint64_t seed = 11) {
  const std::size_t n = g.size();
  return CtiConfig{g, std::vector<double>(n, 0.4),
                   uniform_values ? ValueProcess::bounded_uniform(0.4, 0.1, 0.001, seed) : ValueProcess::constant(0.45),
                   std::nullopt};
}

// The epidemic pair is aligned once S <= gamma/beta1; exact oracles start there.
SisgcgConfig sis_instance(std::size_t n) {
  SisgcgConfig cfg;
  cfg.graph = Graph::ring(n);
  cfg.S0 = 0.5;
  return cfg;
}

Outcome coupling_sweep() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<AlignedGamePair> pairs;
  for (std::size_t n = 2; n <= 4; ++n) {
    for (const bool uniform : {false, true}) {
      pairs.push_back(cti_pair(cti_instance(Graph::ring(n), uniform)));
      pairs.push_back(cti_pair(cti_instance(Graph::complete(n), uniform)));
    }
  }
  for (std::size_t n = 2; n <= 3; ++n) pairs.push_back(sisgcg_pair(sis_instance(n)));
  const LogLinearRule ll(0.3);
  const BestResponseRule br;
  std::size_t couplings = 0;
  double worst = 0.0;
  for (const auto& pair : pairs) {
    for (const LearningRule* rule : {static_cast<const LearningRule*>(&ll), static_cast<const LearningRule*>(&br)}) {
      const auto s = sweep_one_step_couplings(pair, *rule, 3);
      couplings += s.couplings;
      worst = std::max(worst, s.max_violation);
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-12 && secs < 60.0, std::to_string(couplings) + " couplings, max violation " +
                                             fmt("%.3g", worst) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome path_marginals() {
  const auto start = std::chrono::steady_clock::now();
  const LogLinearRule ll(0.3);
  double worst = 0.0;
  std::size_t pairs_seen = 0;
  for (const auto& [n, T] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 4}, {3, 3}}) {
    for (const auto& pair : {cti_pair(cti_instance(Graph::ring(n), true)), sisgcg_pair(sis_instance(n))}) {
      const auto c = check_path_marginals(pair, ll, InitialDistribution::uniform(n), T);
      worst = std::max(worst, c.max_violation());
      pairs_seen += c.coupled_pairs;
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-12 && secs < 120.0, std::to_string(pairs_seen) + " coupled path pairs, max error " +
                                              fmt("%.3g", worst) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome dominance() {
  const LogLinearRule ll(0.3);
  const BestResponseRule br;
  double min_gap = 0.0, gap_error = 0.0;
  std::size_t comparisons = 0;
  for (const auto& pair : {cti_pair(cti_instance(Graph::ring(3), true)), sisgcg_pair(sis_instance(3))}) {
    for (const LearningRule* rule : {static_cast<const LearningRule*>(&ll), static_cast<const LearningRule*>(&br)}) {
      for (std::size_t T = 1; T <= 5; ++T) {
        const auto d = dominance_oracle(pair, *rule, InitialDistribution::uniform(3), T);
        min_gap = std::min(min_gap, d.min_gap());
        comparisons += d.entries.size();
      }
    }
    for (const auto& z : increasing_path_functionals()) {
      const auto g = coupling_gap_identity(pair, ll, InitialDistribution::uniform(3), 3, z);
      gap_error = std::max(gap_error, g.abs_error());
    }
  }
  return {min_gap >= -1e-12 && gap_error <= 1e-10, std::to_string(comparisons) + " comparisons, min gap " +
                                                       fmt("%.3g", min_gap) + ", gap identity error " +
                                                       fmt("%.3g", gap_error)};
}

Outcome potential() {
  // Reference of the experiment's CTI game, centred comparison with the closed form.
  const auto cti = cti_figure1_defaults().model;
  const auto check = check_exact_potential(*cti_reference(cti));
  double centred = std::numeric_limits<double>::infinity();
  if (check.exact) {
    const auto closed = cti_potential(cti);
    const auto& rec = check.potential->values();
    const auto& want = closed.values();
    double mr = 0.0, mw = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      mr += rec[k];
      mw += want[k];
    }
    mr /= static_cast<double>(rec.size());
    mw /= static_cast<double>(rec.size());
    centred = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) centred = std::max(centred, std::abs((rec[k] - mr) - (want[k] - mw)));
  }
  CtiConfig ring10{Graph::ring(10), std::vector<double>(10, 0.4), ValueProcess::constant(0.401), std::nullopt};
  const auto maxima = potential_maximizers(cti_potential(ring10));
  const bool unique_ones = maxima.size() == 1 && maxima.front().all_ones();

  double tv = 0.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto cfg = cti_instance(Graph::ring(n), false);
    const auto ref = cti_reference(cfg);
    for (const double tau : {1.0, 0.5, 0.1}) {
      tv = std::max(tv, total_variation(stationary_distribution(*ref, LogLinearRule(tau)),
                                        gibbs_distribution(cti_potential(cfg), tau)));
    }
    SisgcgConfig sis;
    sis.graph = Graph::ring(n);
    const auto gcg = gcg_reference(sis);
    const auto phi = gcg_potential(sis, sis.reference_infection());
    tv = std::max(tv, total_variation(stationary_distribution(*gcg, LogLinearRule(0.5)), gibbs_distribution(phi, 0.5)));
  }
  const bool ok = check.exact && centred <= 1e-9 && unique_ones && tv <= 1e-9;
  return {ok, std::string("potential ") + (check.exact ? "exact" : "NOT exact") + ", centred error " +
                  fmt("%.3g", centred) + ", ring-10 maximizer " + (unique_ones ? "{1}" : "not {1}") +
                  ", max TV to Gibbs " + fmt("%.3g", tv)};
}

Outcome figure1() {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = parse_config(json{{"experiment", "cti-fig1"}, {"seed", 1}, {"trials", 1000}, {"parallelism", 8}});
  const auto result = run_experiment(cfg);
  const auto dyn = summarize(result.data.dynamic, result.data.num_agents);
  const auto stat = summarize(result.data.reference, result.data.num_agents);
  const auto dom = mean_dominance(dyn, stat, kCtiBurnIn);
  const double pd = dyn.frac_all_ones.back(), ps = stat.frac_all_ones.back();
  const double secs = seconds_since(start);
  return {dom.passed() && pd >= ps && secs < 600.0,
          std::to_string(dom.violations) + " of " + std::to_string(dom.checked) +
              " steps below 2 SE (worst margin " + fmt("%.3g", dom.worst_margin) + "), terminal Pr(all share) " +
              fmt("%.3f", pd) + " vs " + fmt("%.3f", ps) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome figure2() {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = parse_config(json{{"experiment", "sis-fig2"}, {"seed", 1}, {"trials", 1000}, {"parallelism", 8}});
  const auto result = run_experiment(cfg);
  const auto& data = result.data;
  if (!data.t_bar) return {false, "some trial never entered S <= gamma/beta1"};
  const std::size_t t_bar = *data.t_bar;
  const auto dyn = summarize(data.dynamic, data.num_agents);
  const auto stat = summarize(data.reference, data.num_agents);
  const double floor = cfg.sis.model.reference_infection() - 1e-3;
  double min_infected = 1.0;
  for (std::size_t t = t_bar; t < data.T; ++t) min_infected = std::min(min_infected, dyn.mean_infected[t]);
  const auto dom = mean_dominance(dyn, stat, t_bar);
  const double secs = seconds_since(start);
  return {t_bar < data.T && min_infected > floor && dom.passed() && secs < 900.0,
          "t_bar " + std::to_string(t_bar) + ", min mean I after t_bar " + fmt("%.4f", min_infected) + " (floor " +
              fmt("%.4f", floor) + "), " + std::to_string(dom.violations) + " of " + std::to_string(dom.checked) +
              " steps below 2 SE, " + fmt("%.1f", secs) + " s"};
}

Outcome rule_suites() {
  const auto ensemble = random_ensemble(200, 4, 1);
  const std::vector<double> grid{0.0, 0.1, 1.0, 10.0};
  const auto ll = verify_rule_properties(LogLinearRule(0.5), ensemble, grid);
  const auto ll_cold = verify_rule_properties(LogLinearRule(0.05), ensemble, grid);
  const auto br = verify_rule_properties(BestResponseRule(), ensemble, grid);
  const auto inertial = verify_rule_properties(InertialRule(0.9), ensemble, grid);
  const bool ok = ll.passed() && ll_cold.passed() && br.passed() && !inertial.passed();
  return {ok, std::string("log-linear ") + (ll.passed() && ll_cold.passed() ? "pass" : "FAIL") + ", best-response " +
                  (br.passed() ? "pass" : "FAIL") + ", inertial " + (inertial.passed() ? "pass (unexpected)" : "rejected") +
                  " over " + std::to_string(ll.checks) + " checks"};
}

Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"cti-fig1", "sis-fig2"}) {
    std::string bytes[2];
    int slot = 0;
    for (const int workers : {1, 8}) {
      const auto cfg = parse_config(json{{"experiment", kind}, {"seed", 7}, {"parallelism", workers}});
      std::ostringstream out;
      write_csv(out, run_experiment(cfg).data);
      bytes[slot++] = out.str();
    }
    const bool same = bytes[0] == bytes[1] && !bytes[0].empty();
    ok = ok && same;
    detail += std::string(kind) + (same ? " identical" : " DIFFERENT") + " (" + std::to_string(bytes[0].size()) +
              " bytes); ";
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 coupling validity sweep", coupling_sweep},
      {"2 path-coupling marginals", path_marginals},
      {"3 dominance oracle and gap identity", dominance},
      {"4 potential machinery", potential},
      {"5 CTI figure reproduction", figure1},
      {"6 SISGCG figure reproduction", figure2},
      {"7 learning-rule suites", rule_suites},
      {"8 determinism across parallelism", determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "usage: %s [criterion 1-%zu]\n", argv[0], criteria.size());
    return 2;
  }
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    const auto& [name, run] = criteria[k];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
