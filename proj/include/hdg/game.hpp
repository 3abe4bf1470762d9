#ifndef HDG_GAME_HPP
#define HDG_GAME_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdg/profile.hpp"

namespace hdg {

/// A utility vector U = (U_1, ..., U_n), each U_i: A -> R.
class Utilities {
 public:
  virtual ~Utilities() = default;
  virtual std::size_t num_agents() const = 0;
  /// U_i(a) for 0-based agent i.
  virtual double utility(std::size_t agent, const ActionProfile& a) const = 0;
};

/// A static game (N, A, U). Implementations must be safe for concurrent reads.
class StaticGame : public Utilities {};

/// Static game backed by an explicit table, n <= kMaxEnumerableAgents.
class TableGame final : public StaticGame {
 public:
  explicit TableGame(std::size_t n);
  static TableGame tabulate(const Utilities& u);

  std::size_t num_agents() const override { return n_; }
  double utility(std::size_t agent, const ActionProfile& a) const override;
  void set(std::size_t agent, const ActionProfile& a, double value);

 private:
  std::size_t n_;
  std::vector<double> values_;  // [agent * 2^n + index]
};

class FunctionGame final : public StaticGame {
 public:
  using Fn = std::function<double(std::size_t, const ActionProfile&)>;
  FunctionGame(std::size_t n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  std::size_t num_agents() const override { return n_; }
  double utility(std::size_t agent, const ActionProfile& a) const override { return fn_(agent, a); }

 private:
  std::size_t n_;
  Fn fn_;
};

/// U^alpha for one growing history. Owned by a single trial or enumeration
/// branch; `push` appends the next profile of the path.
class Environment : public Utilities {
 public:
  virtual void push(const ActionProfile& a) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
  virtual std::size_t length() const = 0;
};

/// A history-dependent game (N, A, U^A). Utilities along a path are obtained by
/// starting an Environment and pushing the path's profiles in order.
class HistoryGame {
 public:
  virtual ~HistoryGame() = default;
  virtual std::size_t num_agents() const = 0;
  /// Environment for the empty history.
  virtual std::unique_ptr<Environment> start() const = 0;

  /// Environment after observing the whole of `history`.
  std::unique_ptr<Environment> at(const History& history) const;
  /// U_i^alpha(a). Re-plays the history, so prefer `at` for repeated queries.
  double utility(std::size_t agent, const History& history, const ActionProfile& a) const;
};

/// A static game viewed as a history-dependent one with U^alpha == U.
class StaticAsHistoryGame final : public HistoryGame {
 public:
  explicit StaticAsHistoryGame(std::shared_ptr<const StaticGame> game) : game_(std::move(game)) {}
  std::size_t num_agents() const override { return game_->num_agents(); }
  std::unique_ptr<Environment> start() const override;

 private:
  std::shared_ptr<const StaticGame> game_;
};

/// History-dependent game from a closure over the full stored history.
class FunctionHistoryGame final : public HistoryGame {
 public:
  using Fn = std::function<double(std::size_t, const History&, const ActionProfile&)>;
  FunctionHistoryGame(std::size_t n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  std::size_t num_agents() const override { return n_; }
  std::unique_ptr<Environment> start() const override;

 private:
  std::size_t n_;
  Fn fn_;
};

/// A history-dependent game paired with its static reference game.
struct AlignedGamePair {
  std::shared_ptr<const HistoryGame> dynamic;
  std::shared_ptr<const StaticGame> reference;

  std::size_t num_agents() const { return reference->num_agents(); }
};

/// Pair whose dynamic side is the reference itself.
AlignedGamePair degenerate_pair(std::shared_ptr<const StaticGame> reference);

struct AlignmentCounterexample {
  History history;
  ActionProfile reference_profile;  // a; only a_{-i} matters
  std::size_t agent = 0;            // 0-based
  int condition = 0;                // 1: playing 1, 2: playing 0
  double dynamic_value = 0.0;
  double reference_value = 0.0;
};

struct AlignmentReport {
  bool passed = true;
  bool sampled = false;  // true: "sampled pass", never a proof
  std::size_t histories_checked = 0;
  std::size_t comparisons = 0;
  std::optional<AlignmentCounterexample> counterexample;

  nlohmann::json to_json() const;
};

/// Slack for the two alignment inequalities, absorbing rounding in utilities
/// that are equal in exact arithmetic.
inline constexpr double kAlignmentTolerance = 1e-12;

/// Exhaustively checks both alignment inequalities over every history of
/// length 1..max_length and every a with alpha^T_{-i} >= a_{-i}. Stops at the
/// first counterexample. Throws BudgetError if |A|^max_length > budget.
AlignmentReport check_aligned(const AlignedGamePair& pair, std::size_t max_length,
                              std::uint64_t budget = 10'000'000);

/// Same conditions on `samples` uniformly drawn histories of length `length`.
AlignmentReport check_aligned_sampled(const AlignedGamePair& pair, std::size_t length,
                                      std::size_t samples, std::uint64_t seed);

/// Evaluates both alignment inequalities for one environment (history) and agent.
std::optional<AlignmentCounterexample> alignment_violation(const StaticGame& reference,
                                                           const Environment& env,
                                                           const ActionProfile& last,
                                                           std::size_t agent);

/// Calls `visit(history, env)` for every history of length 1..max_length
/// (canonical order, shorter first); `visit` returns false to stop early.
void for_each_history(const HistoryGame& game, std::size_t max_length,
                      const std::function<bool(const History&, const Environment&)>& visit);

}  // namespace hdg

#endif  // HDG_GAME_HPP
