#ifndef HDG_EQUILIBRIUM_HPP
#define HDG_EQUILIBRIUM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/game.hpp"
#include "hdg/learning.hpp"
#include "hdg/profile.hpp"

namespace hdg {

/// phi over {0,1}^n, stored by profile index.
class PotentialFunction {
 public:
  PotentialFunction() = default;
  PotentialFunction(std::size_t n, std::vector<double> values);

  std::size_t num_agents() const noexcept { return n_; }
  double operator()(const ActionProfile& a) const { return values_.at(a.index()); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct PotentialEdgeViolation {
  ActionProfile from;  // agent plays 0 here
  std::size_t agent = 0;
  double utility_difference = 0.0;    // U_i(1, a_-i) - U_i(0, a_-i)
  double potential_difference = 0.0;  // phi(1, a_-i) - phi(0, a_-i)
};

struct PotentialCheck {
  bool exact = false;
  double max_violation = 0.0;
  std::size_t edges_checked = 0;
  std::optional<PotentialFunction> potential;       // set when exact
  std::optional<PotentialEdgeViolation> violation;  // worst edge when not exact

  nlohmann::json to_json() const;
};

inline constexpr double kPotentialTolerance = 1e-9;

/// Integrates utility differences along a BFS tree from 0 and then checks the
/// potential equation on all n 2^(n-1) deviation edges. `anchor` fixes phi(0).
PotentialCheck check_exact_potential(const StaticGame& game, double anchor = 0.0);

/// Argmax set; values within 1e-12 of the maximum are included. Canonical order.
std::vector<ActionProfile> potential_maximizers(const PotentialFunction& phi);

/// Every unilateral deviation lowers the deviator's utility by more than 1e-9.
bool is_strict_nash(const StaticGame& game, const ActionProfile& a);

/// Probability vector over profiles, by index.
using ProfileDistribution = std::vector<double>;

struct StationaryOptions {
  std::size_t max_iterations = 1'000'000;
  double tolerance = 1e-12;  // L1 change per iteration
  /// Up to this many agents the iteration runs on repeated squares of the
  /// dense transition matrix, so iteration k applies 2^k steps. Slowly mixing
  /// chains (small tau) need far more than max_iterations single steps.
  std::size_t dense_max_agents = 8;
  std::size_t max_squarings = 64;
};

/// Stationary distribution of the asynchronous chain by power iteration from
/// the uniform vector. Throws NumericError without convergence, BudgetError
/// above 2^14 profiles.
ProfileDistribution stationary_distribution(const StaticGame& game, const LearningRule& rule,
                                            const StationaryOptions& options = {});

/// pi P^steps for the asynchronous chain.
ProfileDistribution evolve_distribution(const StaticGame& game, const LearningRule& rule,
                                        ProfileDistribution start, std::size_t steps);

/// exp(phi / tau), normalized (max-shifted).
ProfileDistribution gibbs_distribution(const PotentialFunction& phi, double tau);

double total_variation(const ProfileDistribution& p, const ProfileDistribution& q);

struct StabilityEstimate {
  double tau = 0.0;
  std::size_t T = 0;
  std::size_t trials = 0;
  double estimate = 0.0;
  double standard_error = 0.0;

  nlohmann::json to_json() const;
};

/// Monte Carlo frequency of alpha^T = 1 over `trials` paths, trial k seeded
/// with derive_seed(seed, k).
StabilityEstimate estimate_prob_all_ones(const HistoryGame& game, const LearningRule& rule,
                                         const InitialDistribution& pi, std::size_t T, std::size_t trials,
                                         std::uint64_t seed);
StabilityEstimate estimate_prob_all_ones(const StaticGame& game, const LearningRule& rule,
                                         const InitialDistribution& pi, std::size_t T, std::size_t trials,
                                         std::uint64_t seed);

}  // namespace hdg

#endif  // HDG_EQUILIBRIUM_HPP
