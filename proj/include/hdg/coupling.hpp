#ifndef HDG_COUPLING_HPP
#define HDG_COUPLING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/game.hpp"
#include "hdg/learning.hpp"
#include "hdg/profile.hpp"

namespace hdg {

/// Cells more negative than this are hard errors; smaller negatives are
/// floating-point cancellation and get clamped to 0.
inline constexpr double kClampTolerance = 1e-9;

struct CouplingCell {
  ActionProfile x;  // static side (row)
  ActionProfile y;  // dynamic side (column)
  double mass = 0.0;
};

/// Sparse joint distribution over (static next profile, dynamic next profile)
/// for one step. Rows follow the static kernel from `row_origin`, columns the
/// dynamic kernel from `column_origin` under the history's utilities.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  CouplingMatrix(ActionProfile row_origin, ActionProfile column_origin, std::vector<CouplingCell> cells,
                 TransitionDistribution row_kernel, TransitionDistribution column_kernel, double clamped_mass = 0.0);

  const ActionProfile& row_origin() const noexcept { return row_origin_; }
  const ActionProfile& column_origin() const noexcept { return column_origin_; }
  /// Canonical order by (x, y); at most one cell per pair.
  const std::vector<CouplingCell>& cells() const noexcept { return cells_; }
  const TransitionDistribution& row_kernel() const noexcept { return row_kernel_; }
  const TransitionDistribution& column_kernel() const noexcept { return column_kernel_; }
  double clamped_mass() const noexcept { return clamped_mass_; }

  double mass(const ActionProfile& x, const ActionProfile& y) const;
  double total() const;
  /// Adds `delta` to cell (x, y), creating it if needed. Used to inject faults.
  void add(const ActionProfile& x, const ActionProfile& y, double delta);

 private:
  ActionProfile row_origin_, column_origin_;
  std::vector<CouplingCell> cells_;
  TransitionDistribution row_kernel_, column_kernel_;
  double clamped_mass_ = 0.0;
};

/// The explicit monotone coupling between the static kernel at `a` (utilities
/// of `reference`) and the dynamic kernel at `a_prime` (utilities of `env`).
/// Throws OrderError unless a <= a_prime, AlignmentViolation when a cell is
/// below -kClampTolerance.
CouplingMatrix build_one_step_coupling(const StaticGame& reference, const Environment& env,
                                       const LearningRule& rule, const ActionProfile& a,
                                       const ActionProfile& a_prime);

/// Same, with the dynamic side at alpha^T under the utilities U^alpha.
CouplingMatrix build_one_step_coupling(const AlignedGamePair& pair, const LearningRule& rule,
                                       const ActionProfile& a, const History& alpha);

/// Independent coupling of the two kernels; generally not monotone.
CouplingMatrix product_coupling(const TransitionDistribution& row_kernel, const TransitionDistribution& column_kernel);

struct CouplingCheck {
  std::string condition;
  double max_violation = 0.0;
  std::optional<std::pair<ActionProfile, ActionProfile>> witness;
};

struct CouplingReport {
  CouplingCheck nonnegative{"nonnegative", 0.0, std::nullopt};
  CouplingCheck unit_mass{"unit-mass", 0.0, std::nullopt};
  CouplingCheck row_marginal{"row-marginal", 0.0, std::nullopt};
  CouplingCheck column_marginal{"column-marginal", 0.0, std::nullopt};
  CouplingCheck monotone_support{"monotone-support", 0.0, std::nullopt};
  double clamped_mass = 0.0;

  double max_violation() const;
  bool passed(double tolerance = 1e-12) const { return max_violation() <= tolerance; }
  nlohmann::json to_json() const;
};

/// Checks the matrix against the given kernels: nonnegativity, unit mass, both
/// marginal equations, and that every positive cell has x <= y.
CouplingReport verify_one_step_coupling(const CouplingMatrix& m, const TransitionDistribution& row_kernel,
                                        const TransitionDistribution& column_kernel);

/// Recomputes both kernels from the pair and rule, then verifies against them.
CouplingReport verify_one_step_coupling(const CouplingMatrix& m, const AlignedGamePair& pair,
                                        const LearningRule& rule, const History& alpha);

/// pi(x^1) 1(x^1 = y^1) prod_t coupling(x^t, y^{<=t})(x^{t+1}, y^{t+1}) for a
/// static path x and a dynamic path y. Zero whenever x^t <= y^t fails.
double path_coupling_probability(const AlignedGamePair& pair, const LearningRule& rule,
                                 const InitialDistribution& pi, const History& static_path,
                                 const History& dynamic_path);

/// Visits every coupled path pair of length T with positive mass, depth first
/// in cell order.
void for_each_coupled_path(const AlignedGamePair& pair, const LearningRule& rule, const InitialDistribution& pi,
                           std::size_t length,
                           const std::function<void(const History&, const History&, double)>& visit);

using PathDistribution = std::vector<std::pair<History, double>>;

/// All length-T paths with positive probability, with their exact probabilities.
PathDistribution path_distribution(const HistoryGame& game, const LearningRule& rule,
                                   const InitialDistribution& pi, std::size_t length);
PathDistribution path_distribution(const StaticGame& game, const LearningRule& rule,
                                   const InitialDistribution& pi, std::size_t length);

/// A real-valued function of a path.
struct PathFunctional {
  std::string name;
  std::function<double(const History&)> fn;
};

/// Count of 1-players at T, total 1-plays along the path, reached 1 by T, at 1 at T.
std::vector<PathFunctional> increasing_path_functionals();
/// Count of 0-players at T. Decreasing, so never part of the dominance library.
PathFunctional final_count_zeros();

/// Exhaustive check that Z never decreases along a single-bit raise of any
/// length-T path. Throws BudgetError when |A|^T exceeds `budget`.
bool is_increasing(const PathFunctional& z, std::size_t num_agents, std::size_t length,
                   std::uint64_t budget = 10'000'000);

/// Up-closure of a set of generator paths, kept as its minimal elements.
class UpperSet {
 public:
  explicit UpperSet(std::vector<History> generators);
  bool contains(const History& path) const;
  const std::vector<History>& minimal() const noexcept { return minimal_; }

 private:
  std::vector<History> minimal_;
};

UpperSet random_upper_set(std::size_t num_agents, std::size_t length, std::size_t generators, Rng& rng);

struct DominanceEntry {
  std::string name;
  double dynamic_value = 0.0;
  double static_value = 0.0;
};

struct DominanceReport {
  std::vector<DominanceEntry> entries;  // first entry: Pr(alpha^T = 1)
  double tolerance = 1e-12;

  double min_gap() const;
  bool passed() const { return min_gap() >= -tolerance; }
  nlohmann::json to_json() const;
};

struct DominanceOptions {
  std::size_t upper_sets = 16;
  std::size_t generators_per_set = 3;
  std::uint64_t seed = 1;
  std::uint64_t budget = 10'000'000;
};

/// Exact comparison of the dynamic and static path measures: Pr(alpha^T = 1),
/// E[Z] for every functional of the increasing library, and the probability of
/// seeded random upper sets.
DominanceReport dominance_oracle(const AlignedGamePair& pair, const LearningRule& rule,
                                 const InitialDistribution& pi, std::size_t length,
                                 const DominanceOptions& options = {});

struct GapIdentityReport {
  double dynamic_mean = 0.0;
  double static_mean = 0.0;
  double lhs = 0.0;  // E_dynamic[Z] - E_static[Z]
  double rhs = 0.0;  // sum over eta of coupled mass with Z(static) < eta <= Z(dynamic)
  double abs_error() const;
  nlohmann::json to_json() const;
};

/// Both sides of the gap identity for an integer-valued increasing Z. The left
/// side comes from the two path measures, the right side from the path coupling.
/// Throws std::invalid_argument if Z takes a non-integer value.
GapIdentityReport coupling_gap_identity(const AlignedGamePair& pair, const LearningRule& rule,
                                        const InitialDistribution& pi, std::size_t length,
                                        const PathFunctional& z);

}  // namespace hdg

#endif  // HDG_COUPLING_HPP
