#include "hdg/learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hdg/errors.hpp"

namespace hdg {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

void require_finite(double u0, double u1) {
  if (!std::isfinite(u0) || !std::isfinite(u1)) throw NumericError("non-finite utility");
}

}  // namespace

LogLinearRule::LogLinearRule(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("log-linear temperature must be > 0");
}

ActionProbs LogLinearRule::individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const {
  const double u0 = u.utility(agent, a.with(agent, 0));
  const double u1 = u.utility(agent, a.with(agent, 1));
  require_finite(u0, u1);
  const double m = std::max(u0, u1);
  const double e0 = std::exp((u0 - m) / tau_);
  const double e1 = std::exp((u1 - m) / tau_);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

ActionProbs BestResponseRule::individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const {
  const double u0 = u.utility(agent, a.with(agent, 0));
  const double u1 = u.utility(agent, a.with(agent, 1));
  require_finite(u0, u1);
  if (std::abs(u1 - u0) <= kTieTolerance) return {0.5, 0.5};
  return u1 > u0 ? ActionProbs{0.0, 1.0} : ActionProbs{1.0, 0.0};
}

ActionProbs InertialRule::individual(std::size_t agent, const ActionProfile& a, const Utilities&) const {
  return a[agent] == 1 ? ActionProbs{1.0 - keep_, keep_} : ActionProbs{keep_, 1.0 - keep_};
}

std::shared_ptr<const LearningRule> LearningRuleSpec::make() const {
  switch (kind) {
    case Kind::LogLinear:
      return std::make_shared<LogLinearRule>(tau);
    case Kind::BestResponse:
      return std::make_shared<BestResponseRule>();
  }
  throw std::logic_error("unknown rule kind");
}

ActionProbs individual_step(const LearningRule& rule, std::size_t agent, const ActionProfile& a,
                            const Utilities& u) {
  const ActionProbs p = rule.individual(agent, a, u);
  if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || p[0] < 0.0 || p[1] < 0.0 ||
      std::abs(p[0] + p[1] - 1.0) > kProbabilityTolerance) {
    throw NumericError(rule.name() + ": invalid action distribution for agent " + std::to_string(agent + 1));
  }
  return p;
}

TransitionDistribution::TransitionDistribution(ActionProfile origin,
                                               std::vector<std::pair<ActionProfile, double>> entries)
    : origin_(std::move(origin)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
}

double TransitionDistribution::probability(const ActionProfile& to) const {
  for (const auto& [p, w] : entries_) {
    if (p == to) return w;
  }
  return 0.0;
}

double TransitionDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

std::vector<ActionProbs> individual_steps(const LearningRule& rule, const ActionProfile& a, const Utilities& u) {
  std::vector<ActionProbs> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(individual_step(rule, i, a, u));
  return out;
}

TransitionDistribution async_step_distribution(const LearningRule& rule, const ActionProfile& a,
                                               const Utilities& u) {
  const std::size_t n = a.size();
  const double share = 1.0 / static_cast<double>(n);
  std::vector<std::pair<ActionProfile, double>> entries;
  entries.reserve(n + 1);
  double stay = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ActionProbs p = individual_step(rule, i, a, u);
    stay += share * p[static_cast<std::size_t>(a[i])];
    entries.emplace_back(a.flipped(i), share * p[static_cast<std::size_t>(1 - a[i])]);
  }
  entries.emplace_back(a, stay);
  return TransitionDistribution(a, std::move(entries));
}

ActionProfile sample_step(const LearningRule& rule, const ActionProfile& a, const Utilities& u, Rng& rng) {
  const std::size_t i = rng.below(a.size());
  const ActionProbs p = individual_step(rule, i, a, u);
  return a.with(i, rng.uniform() < p[1] ? 1 : 0);
}

InitialDistribution InitialDistribution::uniform(std::size_t n) {
  InitialDistribution d;
  d.n_ = n;
  d.uniform_ = true;
  return d;
}

InitialDistribution InitialDistribution::point(const ActionProfile& a) {
  return explicit_entries({{a, 1.0}});
}

InitialDistribution InitialDistribution::explicit_entries(std::vector<std::pair<ActionProfile, double>> entries) {
  if (entries.empty()) throw std::invalid_argument("initial distribution has no entries");
  InitialDistribution d;
  d.n_ = entries.front().first.size();
  d.uniform_ = false;
  double total = 0.0;
  for (const auto& [p, w] : entries) {
    if (p.size() != d.n_) throw DimensionError("initial distribution: profile length mismatch");
    if (!(w >= 0.0)) throw std::invalid_argument("initial distribution: negative probability");
    total += w;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument("initial distribution does not sum to 1");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  d.entries_ = std::move(entries);
  return d;
}

double InitialDistribution::probability(const ActionProfile& a) const {
  if (a.size() != n_) throw DimensionError("initial distribution: profile length mismatch");
  if (uniform_) return std::ldexp(1.0, -static_cast<int>(n_));
  for (const auto& [p, w] : entries_) {
    if (p == a) return w;
  }
  return 0.0;
}

ActionProfile InitialDistribution::sample(Rng& rng) const {
  if (uniform_) {
    ActionProfile a(n_);
    for (std::size_t i = 0; i < n_; ++i) a.set(i, rng.bernoulli(0.5) ? 1 : 0);
    return a;
  }
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [p, w] : entries_) {
    acc += w;
    if (u < acc) return p;
  }
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return entries_.back().first;
}

std::vector<std::pair<ActionProfile, double>> InitialDistribution::support() const {
  if (!uniform_) return entries_;
  std::vector<std::pair<ActionProfile, double>> out;
  const double w = std::ldexp(1.0, -static_cast<int>(n_));
  for (auto& a : all_profiles(n_)) out.emplace_back(std::move(a), w);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

History simulate_path(const HistoryGame& game, const LearningRule& rule, const InitialDistribution& pi,
                      std::size_t length, Rng& rng) {
  if (length == 0) throw std::invalid_argument("simulate_path: T must be >= 1");
  if (pi.num_agents() != game.num_agents()) throw DimensionError("simulate_path: pi has the wrong length");
  auto env = game.start();
  History path;
  ActionProfile current = pi.sample(rng);
  env->push(current);
  path.push_back(current);
  while (path.length() < length) {
    current = sample_step(rule, current, *env, rng);
    env->push(current);
    path.push_back(current);
  }
  return path;
}

History simulate_path(const StaticGame& game, const LearningRule& rule, const InitialDistribution& pi,
                      std::size_t length, Rng& rng) {
  if (length == 0) throw std::invalid_argument("simulate_path: T must be >= 1");
  History path;
  ActionProfile current = pi.sample(rng);
  path.push_back(current);
  while (path.length() < length) {
    current = sample_step(rule, current, game, rng);
    path.push_back(current);
  }
  return path;
}

namespace {

double step_probability(const LearningRule& rule, const ActionProfile& from, const ActionProfile& to,
                        const Utilities& u) {
  try {
    deviator(from, to);
  } catch (const InvalidPairError&) {
    return 0.0;  // two or more agents moved
  }
  return async_step_distribution(rule, from, u).probability(to);
}

}  // namespace

double exact_path_probability(const HistoryGame& game, const LearningRule& rule, const InitialDistribution& pi,
                              const History& path) {
  if (path.empty()) throw std::invalid_argument("exact_path_probability: empty path");
  double p = pi.probability(path.at(0));
  auto env = game.start();
  env->push(path.at(0));
  for (std::size_t t = 0; t + 1 < path.length() && p > 0.0; ++t) {
    p *= step_probability(rule, path.at(t), path.at(t + 1), *env);
    env->push(path.at(t + 1));
  }
  return p;
}

double exact_path_probability(const StaticGame& game, const LearningRule& rule, const InitialDistribution& pi,
                              const History& path) {
  if (path.empty()) throw std::invalid_argument("exact_path_probability: empty path");
  double p = pi.probability(path.at(0));
  for (std::size_t t = 0; t + 1 < path.length() && p > 0.0; ++t) {
    p *= step_probability(rule, path.at(t), path.at(t + 1), game);
  }
  return p;
}

nlohmann::json RulePropertyReport::to_json() const {
  nlohmann::json j{{"passed", passed()},
                   {"individual", individual},
                   {"local", local},
                   {"monotone", monotone},
                   {"max_individual_violation", max_individual_violation},
                   {"max_locality_violation", max_locality_violation},
                   {"max_monotonicity_violation", max_monotonicity_violation},
                   {"checks", checks}};
  if (first_counterexample) j["counterexample"] = *first_counterexample;
  return j;
}

RulePropertyReport verify_rule_properties(const LearningRule& rule, const std::vector<TableGame>& ensemble,
                                          const std::vector<double>& l_grid, std::uint64_t seed) {
  RulePropertyReport report;
  Rng rng(seed);
  auto note = [&](const std::string& what) {
    if (!report.first_counterexample) report.first_counterexample = what;
  };
  auto describe = [&](std::size_t k, std::size_t i, const ActionProfile& a) {
    std::ostringstream os;
    os << "rule=" << rule.name() << " instance=" << k << " agent=" << i + 1 << " profile=" << a.to_string();
    return os.str();
  };

  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const TableGame& game = ensemble[k];
    const std::size_t n = game.num_agents();
    for (const auto& a : all_profiles(n)) {
      for (std::size_t i = 0; i < n; ++i) {
        ++report.checks;
        const ActionProbs p = rule.individual(i, a, game);

        // Individual: a distribution over {(0,a_-i), (1,a_-i)}; the interface
        // admits no mass elsewhere, so only conditions 1-2 can fail.
        double bad = 0.0;
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
          bad = 1.0;
        } else {
          bad = std::max({-p[0], -p[1], std::abs(p[0] + p[1] - 1.0), 0.0});
        }
        report.max_individual_violation = std::max(report.max_individual_violation, bad);
        if (bad > kProbabilityTolerance) {
          report.individual = false;
          note("individual: " + describe(k, i, a));
        }

        // Locality: own previous action must not matter.
        const ActionProbs p_flip = rule.individual(i, a.flipped(i), game);
        double loc = std::max(std::abs(p_flip[0] - p[0]), std::abs(p_flip[1] - p[1]));
        if (loc > kProbabilityTolerance && report.local) {
          std::ostringstream os;
          os << "locality (own action): " << describe(k, i, a) << " p(1) " << p[1] << " -> " << p_flip[1];
          note(os.str());
        }
        // Locality: entries other than U_i(., a_-i) must not matter.
        TableGame perturbed = game;
        for (const auto& b : all_profiles(n)) {
          for (std::size_t j = 0; j < n; ++j) {
            bool same_row = true;
            for (std::size_t m = 0; m < n; ++m) {
              if (m != i && b[m] != a[m]) same_row = false;
            }
            if (j == i && same_row) continue;
            perturbed.set(j, b, game.utility(j, b) + (rng.uniform() * 4.0 - 2.0));
          }
        }
        const ActionProbs p_pert = rule.individual(i, a, perturbed);
        const double loc2 = std::max(std::abs(p_pert[0] - p[0]), std::abs(p_pert[1] - p[1]));
        if (loc2 > kProbabilityTolerance && loc <= kProbabilityTolerance && report.local) {
          note("locality (non-local payoffs): " + describe(k, i, a));
        }
        loc = std::max(loc, loc2);
        report.max_locality_violation = std::max(report.max_locality_violation, loc);
        if (loc > kProbabilityTolerance) report.local = false;

        // Monotone with respect to utility.
        for (int x = 0; x <= 1; ++x) {
          for (double l : l_grid) {
            TableGame raised = game;
            for (const auto& b : all_profiles(n)) {
              if (b[i] == x) raised.set(i, b, game.utility(i, b) + l);
            }
            const ActionProbs p_up = rule.individual(i, a, raised);
            const double drop = p[static_cast<std::size_t>(x)] - p_up[static_cast<std::size_t>(x)];
            report.max_monotonicity_violation = std::max(report.max_monotonicity_violation, std::max(drop, 0.0));
            if (drop > kProbabilityTolerance) {
              if (report.monotone) {
                std::ostringstream os;
                os << "monotonicity: " << describe(k, i, a) << " action=" << x << " l=" << l;
                note(os.str());
              }
              report.monotone = false;
            }
          }
        }
      }
    }
  }
  return report;
}

std::vector<TableGame> random_ensemble(std::size_t count, std::size_t max_agents, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TableGame> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = 1 + rng.below(max_agents);
    const bool coarse = rng.below(3) == 0;
    TableGame g(n);
    for (const auto& a : all_profiles(n)) {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = coarse ? static_cast<double>(rng.below(3)) - 1.0 : rng.uniform() * 4.0 - 2.0;
        g.set(i, a, v);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace hdg
