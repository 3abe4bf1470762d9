#include "hdg/sisgcg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"
#include "hdg/rng.hpp"

namespace hdg {

void SisgcgConfig::validate() const {
  if (graph.size() == 0) throw std::invalid_argument("SISGCG needs at least one agent");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(beta1 > 0.0)) throw std::invalid_argument("beta1 must be > 0");
  if (!(beta1 < beta0)) throw std::invalid_argument("beta1 must be < beta0");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in (0, 1]");
  if (!(S0 >= 0.0 && S0 <= 1.0)) throw std::invalid_argument("S0 must be in [0, 1]");
  if (substeps == 0) throw std::invalid_argument("substeps must be >= 1");
}

double beta_of_profile(const SisgcgConfig& cfg, const ActionProfile& a) {
  const double n = static_cast<double>(a.size());
  const double ones = static_cast<double>(a.count_ones());
  return (ones * cfg.beta1 + (n - ones) * cfg.beta0) / n;
}

double sis_integrate(double gamma, double beta, double S, std::size_t substeps) {
  if (substeps == 0) throw std::invalid_argument("substeps must be >= 1");
  auto f = [gamma, beta](double s) { return (1.0 - s) * (gamma - beta * s); };
  const double h = 1.0 / static_cast<double>(substeps);
  for (std::size_t k = 0; k < substeps; ++k) {
    const double k1 = f(S);
    const double k2 = f(S + 0.5 * h * k1);
    const double k3 = f(S + 0.5 * h * k2);
    const double k4 = f(S + h * k3);
    const double dS = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(dS) || std::abs(dS) > 0.5) {
      throw NumericError("sis_integrate: unstable substep; increase substeps");
    }
    S += dS;
  }
  if (S < -1e-9 || S > 1.0 + 1e-9) throw NumericError("sis_integrate: S left [0, 1]; increase substeps");
  return std::clamp(S, 0.0, 1.0);
}

double sis_step(const SisgcgConfig& cfg, double S, const ActionProfile& a) {
  return sis_integrate(cfg.gamma, beta_of_profile(cfg, a), S, cfg.substeps);
}

double sisgcg_utility(const SisgcgConfig& cfg, double infected, const ActionProfile& a, std::size_t agent) {
  if (a[agent] == 1) {
    return static_cast<double>(cfg.graph.neighbors_playing(agent, a, 1)) * (cfg.lambda + infected);
  }
  return static_cast<double>(cfg.graph.neighbors_playing(agent, a, 0));
}

namespace {

class SisgcgEnvironment final : public Environment {
 public:
  explicit SisgcgEnvironment(std::shared_ptr<const SisgcgConfig> cfg) : cfg_(std::move(cfg)), S_(cfg_->S0) {}
  std::size_t num_agents() const override { return cfg_->num_agents(); }
  double utility(std::size_t agent, const ActionProfile& a) const override {
    return sisgcg_utility(*cfg_, 1.0 - S_, a, agent);
  }
  void push(const ActionProfile& a) override {
    if (length_ > 0) S_ = sis_step(*cfg_, S_, last_);
    last_ = a;
    ++length_;
  }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<SisgcgEnvironment>(*this); }
  std::size_t length() const override { return length_; }

 private:
  std::shared_ptr<const SisgcgConfig> cfg_;
  double S_;
  ActionProfile last_;
  std::size_t length_ = 0;
};

}  // namespace

SisgcgGame::SisgcgGame(SisgcgConfig cfg) : cfg_(std::make_shared<const SisgcgConfig>(std::move(cfg))) {
  cfg_->validate();
}

std::unique_ptr<Environment> SisgcgGame::start() const { return std::make_unique<SisgcgEnvironment>(cfg_); }

std::shared_ptr<const StaticGame> gcg_reference(const SisgcgConfig& cfg) {
  cfg.validate();
  return std::make_shared<GcgGame>(std::make_shared<const SisgcgConfig>(cfg), cfg.reference_infection());
}

AlignedGamePair sisgcg_pair(const SisgcgConfig& cfg) {
  return AlignedGamePair{std::make_shared<SisgcgGame>(cfg), gcg_reference(cfg)};
}

PotentialFunction gcg_potential(const SisgcgConfig& cfg, double infected) {
  const double w = cfg.lambda + infected;
  const auto edges = cfg.graph.edges();
  std::vector<double> values;
  for (const auto& a : all_profiles(cfg.num_agents())) {
    double phi = 0.0;
    for (const auto& [i, j] : edges) {
      if (a[i] == 1 && a[j] == 1) phi += w;
      if (a[i] == 0 && a[j] == 0) phi += 1.0;
    }
    values.push_back(phi);
  }
  return PotentialFunction(cfg.num_agents(), std::move(values));
}

SisgcgRun sisgcg_simulate(const SisgcgConfig& cfg, const LearningRule& rule, const InitialDistribution& pi,
                          std::size_t T, Rng& rng) {
  if (T == 0) throw std::invalid_argument("sisgcg_simulate: T must be >= 1");
  cfg.validate();
  const auto shared = std::make_shared<const SisgcgConfig>(cfg);
  SisgcgRun run;
  double S = cfg.S0;
  ActionProfile a = pi.sample(rng);
  run.path.push_back(a);
  run.S.push_back(S);
  while (run.path.length() < T) {
    const GcgGame now(shared, 1.0 - S);
    ActionProfile next = sample_step(rule, a, now, rng);
    S = sis_step(cfg, S, a);
    a = std::move(next);
    run.path.push_back(a);
    run.S.push_back(S);
  }
  return run;
}

nlohmann::json InvarianceReport::to_json() const {
  nlohmann::json j{{"hypothesis_ok", hypothesis_ok}, {"holds", holds}, {"max_excursion", max_excursion}};
  j["t_bar"] = t_bar ? nlohmann::json(*t_bar) : nlohmann::json(nullptr);
  if (!hypothesis_ok) j["note"] = "hypothesis violated: I(0)>0 required";
  return j;
}

InvarianceReport invariance_check(const SisgcgConfig& cfg, const std::vector<double>& S) {
  InvarianceReport r;
  const double bound = cfg.susceptible_bound();
  r.hypothesis_ok = cfg.S0 < 1.0 && (S.empty() || S.front() < 1.0);
  if (!r.hypothesis_ok) return r;
  for (std::size_t t = 0; t < S.size(); ++t) {
    if (S[t] <= bound + kEntryTolerance) {
      r.t_bar = t;
      break;
    }
  }
  if (!r.t_bar) return r;
  r.max_excursion = -std::numeric_limits<double>::infinity();
  for (std::size_t t = *r.t_bar; t < S.size(); ++t) r.max_excursion = std::max(r.max_excursion, S[t] - bound);
  r.holds = r.max_excursion <= kInvarianceTolerance;
  return r;
}

nlohmann::json SisgcgConditionReport::to_json() const {
  return {{"beta1_over_gamma_gt_1", beta_ratio},
          {"lambda_plus_gamma_over_beta1_gt_1", lambda_literal},
          {"lambda_plus_reference_infection_gt_1", lambda_effective},
          {"maximizer_tie", maximizer_tie},
          {"infected_initially", infected_initially},
          {"stability_claimed", stability_claimed()}};
}

SisgcgConditionReport sisgcg_condition_check(const SisgcgConfig& cfg) {
  SisgcgConditionReport r;
  r.beta_ratio = cfg.beta1 / cfg.gamma > 1.0;
  r.lambda_literal = cfg.lambda + cfg.gamma / cfg.beta1 > 1.0;
  const double w = cfg.lambda + cfg.reference_infection();
  r.maximizer_tie = std::abs(w - 1.0) <= 1e-12;
  r.lambda_effective = w > 1.0 && !r.maximizer_tie;
  r.infected_initially = cfg.S0 < 1.0;
  return r;
}

SisgcgExperimentConfig sisgcg_figure2_defaults() {
  SisgcgExperimentConfig cfg;
  cfg.model.graph = Graph::ring(15);
  cfg.model.lambda = sisgcg_lambda(cfg.model.gamma, cfg.model.beta1, 1e-3);
  return cfg;
}

Dataset run_sisgcg_experiment(const SisgcgExperimentConfig& cfg) {
  cfg.model.validate();
  if (cfg.trials == 0 || cfg.T == 0) throw std::invalid_argument("trials and T must be >= 1");
  const auto rule = cfg.rule.make();
  const std::size_t n = cfg.model.num_agents();
  const auto pi = InitialDistribution::uniform(n);
  const auto reference = gcg_reference(cfg.model);

  Dataset data;
  data.num_agents = n;
  data.T = cfg.T;
  data.dynamic.trials.resize(cfg.trials);
  data.reference.trials.resize(cfg.trials);
  std::vector<InvarianceReport> invariance(cfg.trials);
  parallel_for(cfg.trials, cfg.parallelism, [&](std::size_t k) {
    Rng dyn_rng(derive_seed(cfg.seed, k, 0));
    const SisgcgRun run = sisgcg_simulate(cfg.model, *rule, pi, cfg.T, dyn_rng);
    TrialSeries& d = data.dynamic.trials[k];
    for (std::size_t t = 0; t < cfg.T; ++t) {
      d.count_ones.push_back(static_cast<std::uint32_t>(run.path.at(t).count_ones()));
      d.infected.push_back(1.0 - run.S[t]);
    }
    invariance[k] = invariance_check(cfg.model, run.S);

    Rng ref_rng(derive_seed(cfg.seed, k, 0));
    const History path = simulate_path(*reference, *rule, pi, cfg.T, ref_rng);
    TrialSeries& s = data.reference.trials[k];
    for (const auto& p : path.profiles()) s.count_ones.push_back(static_cast<std::uint32_t>(p.count_ones()));
  });

  std::size_t t_bar = 0;
  double excursion = -std::numeric_limits<double>::infinity();
  bool all_entered = true;
  for (const auto& r : invariance) {
    if (!r.t_bar) {
      all_entered = false;
      continue;
    }
    t_bar = std::max(t_bar, *r.t_bar);
    excursion = std::max(excursion, r.max_excursion);
  }
  if (all_entered) data.t_bar = t_bar;
  if (std::isfinite(excursion)) data.max_invariance_excursion = excursion;
  return data;
}

}  // namespace hdg
