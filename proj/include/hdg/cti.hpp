#ifndef HDG_CTI_HPP
#define HDG_CTI_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
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

/// Per-firm value of shared threat intelligence as a function of the history.
class ValueProcess {
 public:
  enum class Kind { Constant, BoundedUniform, Custom };
  using Fn = std::function<double(std::size_t agent, const History& history)>;

  static ValueProcess constant(double v);
  /// v = base + X_t + epsilon with X_t ~ U[0, width] drawn from (seed, t),
  /// t = history length. One draw per step shared by all firms unless per_firm.
  static ValueProcess bounded_uniform(double base, double width, double epsilon, std::uint64_t seed,
                                      bool per_firm = false);
  /// Arbitrary schedule; `lower_bound` is its declared infimum.
  static ValueProcess custom(Fn fn, double lower_bound);

  Kind kind() const noexcept { return kind_; }
  double base() const noexcept { return base_; }
  double width() const noexcept { return width_; }
  double epsilon() const noexcept { return epsilon_; }
  bool per_firm() const noexcept { return per_firm_; }
  /// Copy with another realization seed (bounded-uniform only).
  ValueProcess reseeded(std::uint64_t seed) const;

  /// The infimum over realizations (the declared bound for custom processes).
  double lower_bound() const;
  double value(std::size_t agent, const History& history) const;
  /// Value for processes that only depend on the history length.
  double value_at(std::size_t agent, std::size_t t) const;
  bool depends_on_history() const noexcept { return kind_ == Kind::Custom; }

 private:
  Kind kind_ = Kind::Constant;
  double base_ = 0.0, width_ = 0.0, epsilon_ = 0.0;
  std::uint64_t seed_ = 0;
  bool per_firm_ = false;
  Fn fn_;
  double custom_lower_ = 0.0;
};

struct CtiConfig {
  Graph graph;
  std::vector<double> costs;  // c_i >= 0, one per node
  ValueProcess value = ValueProcess::constant(0.5);
  /// Overrides the process's own bound as the reference value (e.g. to inject
  /// a bound the process actually dips below).
  std::optional<double> declared_lower_bound;

  std::size_t num_agents() const { return graph.size(); }
  double v_lower() const { return declared_lower_bound ? *declared_lower_bound : value.lower_bound(); }
  /// Throws std::invalid_argument on inconsistent sizes or negative costs.
  void validate() const;
};

/// a_i (-c_i + sum_{j in N_i} a_j v_j(alpha)).
double cti_utility(const CtiConfig& cfg, const History& history, const ActionProfile& a, std::size_t agent);

/// History-dependent CTI sharing game.
class CtiGame final : public HistoryGame {
 public:
  explicit CtiGame(CtiConfig cfg);
  std::size_t num_agents() const override { return cfg_.num_agents(); }
  std::unique_ptr<Environment> start() const override;
  const CtiConfig& config() const noexcept { return cfg_; }

 private:
  CtiConfig cfg_;
};

/// Static game with every value replaced by the lower bound v_lower.
class CtiReferenceGame final : public StaticGame {
 public:
  explicit CtiReferenceGame(CtiConfig cfg);
  std::size_t num_agents() const override { return cfg_.num_agents(); }
  double utility(std::size_t agent, const ActionProfile& a) const override;

 private:
  CtiConfig cfg_;
};

std::shared_ptr<const StaticGame> cti_reference(const CtiConfig& cfg);
AlignedGamePair cti_pair(const CtiConfig& cfg);

/// sum_i ((1 - a_i) c_i + (a_i / 2) sum_{j in N_i} a_j v_lower).
double cti_potential_value(const CtiConfig& cfg, const ActionProfile& a);
PotentialFunction cti_potential(const CtiConfig& cfg);

struct CtiAgentCondition {
  std::size_t degree = 0;
  double cost = 0.0;
  bool strict_nash_holds = false;        // |N_i| v_lower > c_i
  bool unique_maximizer_holds = false;   // |N_i| v_lower > 2 c_i
  bool unsatisfiable = false;            // isolated node
};

struct CtiConditionReport {
  double v_lower = 0.0;
  std::vector<CtiAgentCondition> agents;
  bool strict_nash_guarantee = false;
  bool unique_maximizer_guarantee = false;

  nlohmann::json to_json() const;
};

CtiConditionReport cti_condition_check(const CtiConfig& cfg);

struct CtiExperimentConfig {
  CtiConfig model;
  LearningRuleSpec rule = LearningRuleSpec::log_linear(0.1);
  std::size_t trials = 25;
  std::size_t T = 500;
  std::uint64_t seed = 1;
  std::size_t parallelism = 1;
};

/// Ring of 10 firms, c = 0.4, v = 0.4 + U[0, 0.1] + 0.001, tau = 0.1,
/// 25 trials, T = 500, uniform start.
CtiExperimentConfig cti_figure1_defaults();

/// Runs the dynamic game and its reference from uniform starts. Trial k of both
/// models uses the stream derive_seed(seed, k, 0); the value realization of
/// trial k is seeded with derive_seed(seed, k, 1).
Dataset run_cti_experiment(const CtiExperimentConfig& cfg);

}  // namespace hdg

#endif  // HDG_CTI_HPP
