#ifndef HDG_HARNESS_VERIFY_HPP
#define HDG_HARNESS_VERIFY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/coupling.hpp"
#include "hdg/game.hpp"
#include "hdg/learning.hpp"

namespace hdg::harness {

enum class VerifyScope { Core, Coupling, Equilibrium, All };

struct PropertyVerdict {
  std::string scope;
  std::string name;
  bool passed = false;
  double max_violation = 0.0;
  nlohmann::json details;
};

struct VerificationReport {
  std::vector<PropertyVerdict> properties;
  bool passed() const;
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  VerifyScope scope = VerifyScope::All;
  /// Largest agent count for the exhaustive core and coupling sweeps.
  std::size_t max_agents = 4;
  std::uint64_t seed = 1;
  /// Test-only: corrupts one fixture so that its property must fail.
  std::optional<std::string> fault;
};

/// Names accepted by VerifyOptions::fault.
std::vector<std::string> known_faults();

VerificationReport run_verifications(const VerifyOptions& options);

struct CouplingSweep {
  std::size_t couplings = 0;
  double max_violation = 0.0;
  double clamped_mass = 0.0;
  nlohmann::json worst;  // report of the worst matrix
};

/// Builds and verifies the one-step coupling for every history of length
/// 1..max_length and every a <= alpha^T. Kernels for verification are
/// recomputed from the environment. `corrupt` adds 0.01 to one cell of the
/// first matrix.
CouplingSweep sweep_one_step_couplings(const AlignedGamePair& pair, const LearningRule& rule,
                                       std::size_t max_length, bool corrupt = false);

struct PathMarginalCheck {
  std::size_t coupled_pairs = 0;
  double total_mass = 0.0;
  double max_static_error = 0.0;   // |sum_y P(x, y) - static path probability of x|
  double max_dynamic_error = 0.0;  // |sum_x P(x, y) - dynamic path probability of y|
  double max_order_violation = 0.0;  // mass on pairs with x not <= y
  double max_violation() const;
};

/// Enumerates the path coupling and compares both marginals with the exact
/// path probabilities of every path in {0,1}^(nT).
PathMarginalCheck check_path_marginals(const AlignedGamePair& pair, const LearningRule& rule,
                                       const InitialDistribution& pi, std::size_t length);

}  // namespace hdg::harness

#endif  // HDG_HARNESS_VERIFY_HPP
