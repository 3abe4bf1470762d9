#ifndef HDG_SISGCG_HPP
#define HDG_SISGCG_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/dataset.hpp"
#include "hdg/equilibrium.hpp"
#include "hdg/game.hpp"
#include "hdg/graph.hpp"
#include "hdg/learning.hpp"

namespace hdg {

struct SisgcgConfig {
  Graph graph;
  double gamma = 0.25;  // curing rate
  double beta0 = 0.9;   // infection rate of 0-players
  double beta1 = 0.45;  // infection rate of 1-players
  double lambda = 0.25 / 0.45 + 1e-3;
  double S0 = 0.99;
  std::size_t substeps = 100;  // RK4 substeps per unit of time

  std::size_t num_agents() const { return graph.size(); }
  /// gamma / beta1: the susceptible level below which alignment holds.
  double susceptible_bound() const { return gamma / beta1; }
  /// 1 - gamma / beta1: the infection level frozen into the reference game.
  double reference_infection() const { return 1.0 - gamma / beta1; }
  /// Throws std::invalid_argument unless 0 < beta1 < beta0, gamma > 0,
  /// lambda in (0, 1], S0 in [0, 1], substeps >= 1.
  void validate() const;
};

/// lambda = gamma / beta1 + epsilon.
inline double sisgcg_lambda(double gamma, double beta1, double epsilon) { return gamma / beta1 + epsilon; }

/// Mean infection rate (1/n) sum_i (a_i beta1 + (1 - a_i) beta0).
double beta_of_profile(const SisgcgConfig& cfg, const ActionProfile& a);

/// Integrates dS/dt = (1 - S)(gamma - beta S) over one unit of time with
/// `substeps` RK4 steps. Throws NumericError if a substep moves S by more than
/// 0.5 or the result leaves [0, 1] by more than 1e-9; smaller excursions are clamped.
double sis_integrate(double gamma, double beta, double S, std::size_t substeps);

/// One unit of time with beta held at beta_of_profile(a).
double sis_step(const SisgcgConfig& cfg, double S, const ActionProfile& a);

/// a_i |N_i(1)| (lambda + I) + (1 - a_i) |N_i(0)|.
double sisgcg_utility(const SisgcgConfig& cfg, double infected, const ActionProfile& a, std::size_t agent);

/// Coordination game at a fixed infection level.
class GcgGame final : public StaticGame {
 public:
  GcgGame(std::shared_ptr<const SisgcgConfig> cfg, double infected) : cfg_(std::move(cfg)), infected_(infected) {}
  std::size_t num_agents() const override { return cfg_->num_agents(); }
  double utility(std::size_t agent, const ActionProfile& a) const override {
    return sisgcg_utility(*cfg_, infected_, a, agent);
  }
  double infected() const noexcept { return infected_; }

 private:
  std::shared_ptr<const SisgcgConfig> cfg_;
  double infected_;
};

/// History-dependent game: after a history of length T the infection level is
/// 1 - S, where S starts at S0 and is integrated over T - 1 unit periods with
/// beta set by alpha^1, ..., alpha^{T-1}.
class SisgcgGame final : public HistoryGame {
 public:
  explicit SisgcgGame(SisgcgConfig cfg);
  std::size_t num_agents() const override { return cfg_->num_agents(); }
  std::unique_ptr<Environment> start() const override;
  const SisgcgConfig& config() const noexcept { return *cfg_; }

 private:
  std::shared_ptr<const SisgcgConfig> cfg_;
};

/// The coordination game with I frozen at 1 - gamma / beta1.
std::shared_ptr<const StaticGame> gcg_reference(const SisgcgConfig& cfg);
AlignedGamePair sisgcg_pair(const SisgcgConfig& cfg);

/// Edge sum of w a_i a_j + (1 - a_i)(1 - a_j) with w = lambda + I.
PotentialFunction gcg_potential(const SisgcgConfig& cfg, double infected);

struct SisgcgRun {
  History path;
  std::vector<double> S;  // S[t] is the susceptible level the step from t uses
};

/// alpha^1 ~ pi; each step revises one agent under the utilities at the
/// current I, then integrates the epidemic one unit with beta of the
/// pre-step profile.
SisgcgRun sisgcg_simulate(const SisgcgConfig& cfg, const LearningRule& rule, const InitialDistribution& pi,
                          std::size_t T, Rng& rng);

struct InvarianceReport {
  bool hypothesis_ok = true;  // I(0) > 0
  std::optional<std::size_t> t_bar;
  double max_excursion = 0.0;  // max_{t >= t_bar} S(t) - gamma/beta1
  bool holds = false;

  nlohmann::json to_json() const;
};

inline constexpr double kEntryTolerance = 1e-9;
inline constexpr double kInvarianceTolerance = 1e-6;

/// t_bar = first t with S(t) <= gamma/beta1 + 1e-9; holds when every later
/// S(t) stays within gamma/beta1 + 1e-6.
InvarianceReport invariance_check(const SisgcgConfig& cfg, const std::vector<double>& S);

struct SisgcgConditionReport {
  bool beta_ratio = false;        // beta1 / gamma > 1
  bool lambda_literal = false;    // lambda + gamma / beta1 > 1
  bool lambda_effective = false;  // lambda + (1 - gamma / beta1) > 1: 1 is the unique maximizer
  bool maximizer_tie = false;     // lambda + (1 - gamma / beta1) == 1 within 1e-12
  bool infected_initially = false;  // I(0) > 0
  bool stability_claimed() const { return beta_ratio && lambda_effective && infected_initially; }

  nlohmann::json to_json() const;
};

SisgcgConditionReport sisgcg_condition_check(const SisgcgConfig& cfg);

struct SisgcgExperimentConfig {
  SisgcgConfig model;
  LearningRuleSpec rule = LearningRuleSpec::log_linear(0.3);
  std::size_t trials = 40;
  std::size_t T = 500;
  std::uint64_t seed = 1;
  std::size_t parallelism = 1;
};

/// Ring of 15, gamma = 0.25, beta0 = 0.9, beta1 = 0.45, lambda = gamma/beta1 + 1e-3,
/// tau = 0.3, 40 trials, T = 500, S0 = 0.99, uniform start.
SisgcgExperimentConfig sisgcg_figure2_defaults();

/// Dynamic runs record I(t); trial k of both models uses derive_seed(seed, k, 0).
Dataset run_sisgcg_experiment(const SisgcgExperimentConfig& cfg);

}  // namespace hdg

#endif  // HDG_SISGCG_HPP
