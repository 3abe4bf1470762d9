#ifndef HDG_LEARNING_HPP
#define HDG_LEARNING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/game.hpp"
#include "hdg/profile.hpp"
#include "hdg/rng.hpp"

namespace hdg {

/// (p_i(0), p_i(1)): agent i's distribution over its own two actions.
using ActionProbs = std::array<double, 2>;

/// An individual learning rule P_i, expressed through the distribution it puts
/// on agent i's two actions (the rest of the profile is held fixed).
class LearningRule {
 public:
  virtual ~LearningRule() = default;
  virtual ActionProbs individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const = 0;
  virtual std::string name() const = 0;
};

/// Softmax over own actions with temperature tau, computed max-shifted.
class LogLinearRule final : public LearningRule {
 public:
  explicit LogLinearRule(double tau);
  ActionProbs individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const override;
  std::string name() const override { return "log-linear"; }
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// Uniform over the best-response set; payoffs within kTieTolerance tie.
class BestResponseRule final : public LearningRule {
 public:
  static constexpr double kTieTolerance = 1e-9;
  ActionProbs individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const override;
  std::string name() const override { return "best-response"; }
};

/// Keeps the current action with a fixed probability whatever the payoffs.
/// Not local; shipped as the counterexample for the property verifier.
class InertialRule final : public LearningRule {
 public:
  explicit InertialRule(double keep = 0.9) : keep_(keep) {}
  ActionProbs individual(std::size_t agent, const ActionProfile& a, const Utilities& u) const override;
  std::string name() const override { return "inertial"; }

 private:
  double keep_;
};

struct LearningRuleSpec {
  enum class Kind { LogLinear, BestResponse };
  Kind kind = Kind::LogLinear;
  double tau = 1.0;

  static LearningRuleSpec log_linear(double tau) { return {Kind::LogLinear, tau}; }
  static LearningRuleSpec best_response() { return {Kind::BestResponse, 0.0}; }
  /// Throws std::invalid_argument when tau <= 0 for log-linear.
  std::shared_ptr<const LearningRule> make() const;
};

/// P_i at profile a under utilities u; validates the result is a distribution.
ActionProbs individual_step(const LearningRule& rule, std::size_t agent, const ActionProfile& a,
                            const Utilities& u);

/// Distribution over f(origin) u {origin}, entries in canonical order.
class TransitionDistribution {
 public:
  TransitionDistribution() = default;
  TransitionDistribution(ActionProfile origin, std::vector<std::pair<ActionProfile, double>> entries);

  const ActionProfile& origin() const noexcept { return origin_; }
  const std::vector<std::pair<ActionProfile, double>>& entries() const noexcept { return entries_; }
  double probability(const ActionProfile& to) const;
  double total() const;

 private:
  ActionProfile origin_;
  std::vector<std::pair<ActionProfile, double>> entries_;
};

/// Per-agent action probabilities at `a`, one entry per agent.
std::vector<ActionProbs> individual_steps(const LearningRule& rule, const ActionProfile& a, const Utilities& u);

/// The asynchronous rule: a uniformly chosen agent revises by its individual rule.
TransitionDistribution async_step_distribution(const LearningRule& rule, const ActionProfile& a,
                                               const Utilities& u);

/// Draws the revising agent (rng.below(n)), then its action (1 iff
/// rng.uniform() < p_i(1)). Exactly two draws per step.
ActionProfile sample_step(const LearningRule& rule, const ActionProfile& a, const Utilities& u, Rng& rng);

/// pi in Delta(A): either uniform over {0,1}^n or explicit entries.
class InitialDistribution {
 public:
  static InitialDistribution uniform(std::size_t n);
  static InitialDistribution point(const ActionProfile& a);
  /// Throws std::invalid_argument unless entries are nonnegative and sum to 1.
  static InitialDistribution explicit_entries(std::vector<std::pair<ActionProfile, double>> entries);

  std::size_t num_agents() const noexcept { return n_; }
  bool is_uniform() const noexcept { return uniform_; }
  double probability(const ActionProfile& a) const;
  /// Uniform: one bernoulli(1/2) draw per agent in index order. Explicit:
  /// one uniform draw walked through the entries in canonical order.
  ActionProfile sample(Rng& rng) const;
  /// Support in canonical order (enumerates 2^n profiles when uniform).
  std::vector<std::pair<ActionProfile, double>> support() const;

 private:
  std::size_t n_ = 0;
  bool uniform_ = true;
  std::vector<std::pair<ActionProfile, double>> entries_;
};

/// Samples a length-T path: alpha^1 ~ pi, then each step from the
/// asynchronous rule under the utilities of the running history.
History simulate_path(const HistoryGame& game, const LearningRule& rule, const InitialDistribution& pi,
                      std::size_t length, Rng& rng);
History simulate_path(const StaticGame& game, const LearningRule& rule, const InitialDistribution& pi,
                      std::size_t length, Rng& rng);

/// pi(alpha^1) * prod_t P^{alpha^{<=t}}(alpha^{t+1}).
double exact_path_probability(const HistoryGame& game, const LearningRule& rule, const InitialDistribution& pi,
                              const History& path);
double exact_path_probability(const StaticGame& game, const LearningRule& rule, const InitialDistribution& pi,
                              const History& path);

struct RulePropertyReport {
  bool individual = true;
  bool local = true;
  bool monotone = true;
  double max_individual_violation = 0.0;
  double max_locality_violation = 0.0;
  double max_monotonicity_violation = 0.0;
  std::size_t checks = 0;
  std::optional<std::string> first_counterexample;

  bool passed() const noexcept { return individual && local && monotone; }
  nlohmann::json to_json() const;
};

/// Checks the individual-rule conditions, locality (own action and non-local
/// utility entries are perturbed), and monotonicity (adding l >= 0 to one own
/// action's payoff never lowers its probability) on every instance, profile and
/// agent of the ensemble.
RulePropertyReport verify_rule_properties(const LearningRule& rule, const std::vector<TableGame>& ensemble,
                                          const std::vector<double>& l_grid, std::uint64_t seed = 1);

/// Seeded random utility tables with n in [1, max_agents]; about a third of the
/// instances use a coarse payoff grid so that ties occur.
std::vector<TableGame> random_ensemble(std::size_t count, std::size_t max_agents, std::uint64_t seed);

}  // namespace hdg

#endif  // HDG_LEARNING_HPP
