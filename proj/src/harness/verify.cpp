#include "hdg/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "hdg/cti.hpp"
#include "hdg/equilibrium.hpp"
#include "hdg/errors.hpp"
#include "hdg/sisgcg.hpp"

namespace hdg::harness {

namespace {

using nlohmann::json;

bool fault_is(const VerifyOptions& o, const char* name) { return o.fault && *o.fault == name; }

PropertyVerdict verdict(const std::string& scope, const std::string& name, bool passed, double violation,
                        json details = json::object()) {
  return PropertyVerdict{scope, name, passed, violation, std::move(details)};
}

CtiConfig cti_instance(const Graph& g, bool uniform_values, std::uint64_t seed) {
  CtiConfig c;
  c.graph = g;
  c.costs.assign(g.size(), 0.4);
  c.value = uniform_values ? ValueProcess::bounded_uniform(0.4, 0.1, 0.001, seed) : ValueProcess::constant(0.5);
  return c;
}

SisgcgConfig sis_instance(std::size_t n) {
  SisgcgConfig c;
  c.graph = Graph::ring(n);
  c.lambda = sisgcg_lambda(c.gamma, c.beta1, 1e-3);
  // Below gamma/beta1 from the start, so every history is past the entry time.
  c.S0 = 0.5;
  return c;
}

History path_from_bits(std::size_t n, std::size_t length, std::uint64_t bits) {
  History h;
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  for (std::size_t t = 0; t < length; ++t) h.push_back(ActionProfile::from_index(n, (bits >> (t * n)) & mask));
  return h;
}

/// Dynamic side pays 1 less for sharing than the reference: violates alignment.
AlignedGamePair misaligned_pair(const CtiConfig& cfg) {
  auto reference = cti_reference(cfg);
  auto dynamic = std::make_shared<FunctionHistoryGame>(
      cfg.num_agents(), [reference](std::size_t i, const History&, const ActionProfile& a) {
        return reference->utility(i, a) - (a[i] == 1 ? 1.0 : 0.0);
      });
  return AlignedGamePair{dynamic, reference};
}

void core_suite(const VerifyOptions& o, VerificationReport& report) {
  const std::size_t N = std::min<std::size_t>(o.max_agents, 6);

  {
    std::size_t failures = 0, checks = 0;
    for (std::size_t n = 1; n <= std::min<std::size_t>(N, 4); ++n) {
      const auto all = all_profiles(n);
      for (const auto& a : all) {
        failures += leq_profile(a, a) ? 0 : 1;
        for (const auto& b : all) {
          ++checks;
          if (leq_profile(a, b) && leq_profile(b, a) && a != b) ++failures;
          for (const auto& c : all) {
            if (leq_profile(a, b) && leq_profile(b, c) && !leq_profile(a, c)) ++failures;
          }
        }
      }
    }
    report.properties.push_back(verdict("core", "profile-order-is-partial-order", failures == 0,
                                        static_cast<double>(failures), {{"pairs", checks}}));
  }

  {
    std::size_t failures = 0, pairs = 0;
    for (std::size_t n = 1; n <= N; ++n) {
      const auto all = all_profiles(n);
      for (const auto& a : all) {
        for (const auto& ap : all) {
          if (!leq_profile(a, ap)) continue;
          ++pairs;
          const PartitionSets p = partition_sets(a, ap);
          if (p.r.size() + p.q.size() + p.s.size() != n || p.R.size() + p.Q.size() + p.S.size() != n) ++failures;
          if (p.r.size() != p.S.size() || p.s.size() != p.R.size() || p.q.size() != p.Q.size()) ++failures;
          auto maps_into = [&](const std::vector<ActionProfile>& from, const std::vector<ActionProfile>& to) {
            std::vector<ActionProfile> image;
            for (const auto& z : from) {
              const ActionProfile b = mirror_b(a, ap, z);
              if (deviator(a, z) != deviator(ap, b)) return false;
              image.push_back(b);
            }
            std::sort(image.begin(), image.end());
            return image == to;
          };
          if (!maps_into(p.r, p.S) || !maps_into(p.s, p.R) || !maps_into(p.q, p.Q)) ++failures;
        }
      }
    }
    report.properties.push_back(verdict("core", "partition-sets-and-mirror-bijection", failures == 0,
                                        static_cast<double>(failures), {{"pairs", pairs}, {"max_agents", N}}));
  }

  {
    const CtiConfig cfg = cti_instance(Graph::ring(3), true, o.seed);
    const AlignedGamePair pair = fault_is(o, "alignment") ? misaligned_pair(cfg) : cti_pair(cfg);
    const AlignmentReport r = check_aligned(pair, 3);
    report.properties.push_back(verdict("core", "cti-aligned", r.passed, r.passed ? 0.0 : 1.0, r.to_json()));
  }
  {
    const AlignmentReport r = check_aligned(sisgcg_pair(sis_instance(3)), 3);
    report.properties.push_back(
        verdict("core", "sisgcg-aligned-after-entry", r.passed, r.passed ? 0.0 : 1.0, r.to_json()));
  }

  const auto ensemble = random_ensemble(200, 4, o.seed);
  const std::vector<double> grid{0.0, 0.1, 1.0, 10.0};
  {
    const LogLinearRule ll(0.5);
    const InertialRule inertial;
    const LearningRule& rule = fault_is(o, "rule") ? static_cast<const LearningRule&>(inertial) : ll;
    const auto r = verify_rule_properties(rule, ensemble, grid, o.seed);
    report.properties.push_back(verdict("core", "rule-log-linear", r.passed(),
                                        std::max({r.max_individual_violation, r.max_locality_violation,
                                                  r.max_monotonicity_violation}),
                                        r.to_json()));
  }
  {
    const auto r = verify_rule_properties(BestResponseRule{}, ensemble, grid, o.seed);
    report.properties.push_back(verdict("core", "rule-best-response", r.passed(),
                                        std::max({r.max_individual_violation, r.max_locality_violation,
                                                  r.max_monotonicity_violation}),
                                        r.to_json()));
  }
  {
    const auto r = verify_rule_properties(InertialRule{}, ensemble, grid, o.seed);
    report.properties.push_back(verdict("core", "rule-inertial-rejected", !r.local, 0.0, r.to_json()));
  }
}

void coupling_suite(const VerifyOptions& o, VerificationReport& report) {
  const std::size_t N = std::min<std::size_t>(o.max_agents, 5);
  const LogLinearRule ll(0.3);
  const BestResponseRule br;

  {
    double worst = 0.0, clamped = 0.0;
    std::size_t total = 0;
    json instances = json::array();
    bool corrupt = fault_is(o, "coupling-cell");
    auto run = [&](const std::string& label, const AlignedGamePair& pair) {
      for (const LearningRule* rule : {static_cast<const LearningRule*>(&ll), static_cast<const LearningRule*>(&br)}) {
        const CouplingSweep s = sweep_one_step_couplings(pair, *rule, 3, corrupt);
        corrupt = false;
        total += s.couplings;
        clamped += s.clamped_mass;
        worst = std::max(worst, s.max_violation);
        instances.push_back({{"instance", label}, {"rule", rule->name()}, {"couplings", s.couplings},
                             {"max_violation", s.max_violation}});
      }
    };
    for (std::size_t n = 2; n <= N; ++n) {
      for (bool uniform : {false, true}) {
        const std::string values = uniform ? "bounded-uniform" : "constant";
        run("cti ring-" + std::to_string(n) + " " + values, cti_pair(cti_instance(Graph::ring(n), uniform, o.seed)));
        if (n >= 4) {
          run("cti complete-" + std::to_string(n) + " " + values,
              cti_pair(cti_instance(Graph::complete(n), uniform, o.seed)));
        }
      }
    }
    for (std::size_t n = 2; n <= std::min<std::size_t>(N, 3); ++n) {
      run("sisgcg ring-" + std::to_string(n), sisgcg_pair(sis_instance(n)));
    }
    report.properties.push_back(verdict("coupling", "one-step-coupling-sweep", worst <= 1e-12, worst,
                                        {{"couplings", total}, {"clamped_mass", clamped}, {"instances", instances}}));
  }

  {
    double worst = 0.0;
    json runs = json::array();
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{{2, 4}, {3, 3}};
    for (const auto& [n, T] : shapes) {
      if (n > N) continue;
      for (int model = 0; model < 2; ++model) {
        const AlignedGamePair pair =
            model == 0 ? cti_pair(cti_instance(Graph::ring(n), true, o.seed)) : sisgcg_pair(sis_instance(n));
        const PathMarginalCheck c = check_path_marginals(pair, ll, InitialDistribution::uniform(n), T);
        worst = std::max(worst, c.max_violation());
        runs.push_back({{"model", model == 0 ? "cti" : "sisgcg"}, {"n", n}, {"T", T}, {"pairs", c.coupled_pairs},
                        {"max_violation", c.max_violation()}});
      }
    }
    report.properties.push_back(
        verdict("coupling", "path-coupling-marginals", worst <= 1e-12, worst, {{"runs", runs}}));
  }

  {
    bool ok = true;
    double worst_gap = 0.0;
    json runs = json::array();
    for (int model = 0; model < 2; ++model) {
      const AlignedGamePair pair =
          model == 0 ? cti_pair(cti_instance(Graph::ring(3), true, o.seed)) : sisgcg_pair(sis_instance(3));
      const auto pi = InitialDistribution::uniform(3);
      for (std::size_t T = 1; T <= 5; ++T) {
        DominanceOptions opt;
        opt.seed = o.seed + T;
        const DominanceReport d = dominance_oracle(pair, ll, pi, T, opt);
        ok = ok && d.passed();
        worst_gap = std::min(worst_gap, d.min_gap());
        runs.push_back({{"model", model == 0 ? "cti" : "sisgcg"}, {"T", T}, {"passed", d.passed()},
                        {"min_gap", d.min_gap()}});
      }
    }
    report.properties.push_back(verdict("coupling", "dominance-oracle", ok, std::max(0.0, -worst_gap), {{"runs", runs}}));
  }

  {
    double worst = 0.0;
    json runs = json::array();
    const AlignedGamePair pair = cti_pair(cti_instance(Graph::ring(3), true, o.seed));
    for (const auto& z : increasing_path_functionals()) {
      const GapIdentityReport g = coupling_gap_identity(pair, ll, InitialDistribution::uniform(3), 3, z);
      worst = std::max(worst, g.abs_error());
      runs.push_back({{"Z", z.name}, {"lhs", g.lhs}, {"rhs", g.rhs}});
    }
    report.properties.push_back(verdict("coupling", "gap-identity", worst <= 1e-10, worst, {{"runs", runs}}));
  }

  {
    bool ok = true;
    for (const auto& z : increasing_path_functionals()) ok = ok && is_increasing(z, 2, 3);
    const bool rejects = !is_increasing(final_count_zeros(), 2, 3);
    report.properties.push_back(verdict("coupling", "increasing-library", ok && rejects, 0.0,
                                        {{"library_increasing", ok}, {"decreasing_rejected", rejects}}));
  }
}

void equilibrium_suite(const VerifyOptions& o, VerificationReport& report) {
  CtiConfig cti;
  cti.graph = Graph::ring(10);
  cti.costs.assign(10, 0.4);
  cti.value = ValueProcess::bounded_uniform(0.4, 0.1, 0.001, o.seed);
  const auto reference = cti_reference(cti);

  {
    PotentialCheck check;
    if (fault_is(o, "potential")) {
      TableGame perturbed = TableGame::tabulate(*reference);
      const ActionProfile a = ActionProfile::parse("1011001110");
      perturbed.set(2, a, perturbed.utility(2, a) + 0.05);
      check = check_exact_potential(perturbed);
    } else {
      check = check_exact_potential(*reference);
    }
    double centered = 0.0;
    if (check.exact) {
      const auto expected = cti_potential(cti).values();
      const auto& got = check.potential->values();
      const double shift = got[0] - expected[0];
      for (std::size_t k = 0; k < got.size(); ++k) centered = std::max(centered, std::abs(got[k] - expected[k] - shift));
    }
    const bool ok = check.exact && centered <= 1e-9;
    report.properties.push_back(verdict("equilibrium", "cti-exact-potential", ok,
                                        check.exact ? centered : check.max_violation, check.to_json()));
  }
  {
    const auto maxima = potential_maximizers(cti_potential(cti));
    const bool ok = maxima.size() == 1 && maxima[0].all_ones();
    json list = json::array();
    for (const auto& a : maxima) list.push_back(a.to_string());
    report.properties.push_back(verdict("equilibrium", "cti-unique-maximizer", ok, 0.0,
                                        {{"maximizers", list}, {"conditions", cti_condition_check(cti).to_json()}}));
  }
  {
    const bool ok = is_strict_nash(*reference, ActionProfile::ones(10));
    report.properties.push_back(verdict("equilibrium", "cti-all-share-strict-nash", ok, 0.0));
  }
  {
    SisgcgConfig sis = sis_instance(8);
    const auto ref = gcg_reference(sis);
    const PotentialCheck check = check_exact_potential(*ref);
    double centered = 0.0;
    if (check.exact) {
      const auto expected = gcg_potential(sis, sis.reference_infection()).values();
      const auto& got = check.potential->values();
      const double shift = got[0] - expected[0];
      for (std::size_t k = 0; k < got.size(); ++k) centered = std::max(centered, std::abs(got[k] - expected[k] - shift));
    }
    const auto maxima = potential_maximizers(gcg_potential(sis, sis.reference_infection()));
    const bool unique = maxima.size() == 1 && maxima[0].all_ones();
    report.properties.push_back(verdict("equilibrium", "gcg-exact-potential-and-maximizer",
                                        check.exact && centered <= 1e-9 && unique, centered,
                                        {{"potential", check.to_json()}, {"unique_all_ones_maximizer", unique}}));
  }
  {
    double worst = 0.0;
    json runs = json::array();
    for (std::size_t n : {3, 5, 8}) {
      CtiConfig c;
      c.graph = Graph::ring(n);
      c.costs.assign(n, 0.4);
      c.value = ValueProcess::constant(0.5);
      const CtiReferenceGame game(c);
      for (double tau : {1.0, 0.5}) {
        const auto st = stationary_distribution(game, LogLinearRule(tau));
        const double tv = total_variation(st, gibbs_distribution(cti_potential(c), tau));
        worst = std::max(worst, tv);
        runs.push_back({{"n", n}, {"tau", tau}, {"tv", tv}});
      }
    }
    report.properties.push_back(verdict("equilibrium", "stationary-matches-gibbs", worst <= 1e-9, worst, {{"runs", runs}}));
  }
}

}  // namespace

bool VerificationReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

json VerificationReport::to_json() const {
  json props = json::array();
  for (const auto& p : properties) {
    props.push_back({{"scope", p.scope}, {"property", p.name}, {"passed", p.passed},
                     {"max_violation", p.max_violation}, {"details", p.details}});
  }
  return {{"passed", passed()}, {"properties", props}};
}

std::vector<std::string> known_faults() { return {"alignment", "coupling-cell", "potential", "rule"}; }

VerificationReport run_verifications(const VerifyOptions& options) {
  if (options.fault) {
    const auto faults = known_faults();
    if (std::find(faults.begin(), faults.end(), *options.fault) == faults.end()) {
      throw ConfigError("inject-fault", "unknown fault '" + *options.fault + "'");
    }
  }
  if (options.max_agents < 2) throw ConfigError("budget", "must be >= 2");
  VerificationReport report;
  const bool all = options.scope == VerifyScope::All;
  if (all || options.scope == VerifyScope::Core) core_suite(options, report);
  if (all || options.scope == VerifyScope::Coupling) coupling_suite(options, report);
  if (all || options.scope == VerifyScope::Equilibrium) equilibrium_suite(options, report);
  return report;
}

CouplingSweep sweep_one_step_couplings(const AlignedGamePair& pair, const LearningRule& rule,
                                       std::size_t max_length, bool corrupt) {
  CouplingSweep sweep;
  const std::size_t n = pair.num_agents();
  const auto profiles = all_profiles(n);
  for_each_history(*pair.dynamic, max_length, [&](const History& h, const Environment& env) {
    const ActionProfile& top = h.last();
    const TransitionDistribution column = async_step_distribution(rule, top, env);
    for (const auto& a : profiles) {
      if (!leq_profile(a, top)) continue;
      CouplingMatrix m = build_one_step_coupling(*pair.reference, env, rule, a, top);
      if (corrupt) {
        m.add(m.cells().front().x, m.cells().front().y, 0.01);
        corrupt = false;
      }
      const CouplingReport r =
          verify_one_step_coupling(m, async_step_distribution(rule, a, *pair.reference), column);
      ++sweep.couplings;
      sweep.clamped_mass += r.clamped_mass;
      if (r.max_violation() > sweep.max_violation || sweep.worst.is_null()) {
        sweep.max_violation = std::max(sweep.max_violation, r.max_violation());
        sweep.worst = r.to_json();
        sweep.worst["history"] = h.to_string();
        sweep.worst["a"] = a.to_string();
      }
    }
    return true;
  });
  return sweep;
}

double PathMarginalCheck::max_violation() const {
  return std::max({max_static_error, max_dynamic_error, max_order_violation, std::abs(total_mass - 1.0)});
}

PathMarginalCheck check_path_marginals(const AlignedGamePair& pair, const LearningRule& rule,
                                       const InitialDistribution& pi, std::size_t length) {
  const std::size_t n = pair.num_agents();
  if (n * length > 20) throw BudgetError("check_path_marginals: 2^(nT) paths exceed the budget");
  PathMarginalCheck c;
  std::map<History, double> xs, ys;
  for_each_coupled_path(pair, rule, pi, length, [&](const History& x, const History& y, double m) {
    ++c.coupled_pairs;
    c.total_mass += m;
    xs[x] += m;
    ys[y] += m;
    if (!leq_path(x, y)) c.max_order_violation = std::max(c.max_order_violation, m);
  });
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n * length)); ++bits) {
    const History p = path_from_bits(n, length, bits);
    const auto fx = xs.find(p);
    const auto fy = ys.find(p);
    const double sx = fx == xs.end() ? 0.0 : fx->second;
    const double sy = fy == ys.end() ? 0.0 : fy->second;
    c.max_static_error =
        std::max(c.max_static_error, std::abs(sx - exact_path_probability(*pair.reference, rule, pi, p)));
    c.max_dynamic_error =
        std::max(c.max_dynamic_error, std::abs(sy - exact_path_probability(*pair.dynamic, rule, pi, p)));
  }
  return c;
}

}  // namespace hdg::harness
