#ifndef HDG_PROFILE_HPP
#define HDG_PROFILE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hdg {

/// Exact oracles enumerate {0,1}^n and are limited to this many agents.
inline constexpr std::size_t kMaxEnumerableAgents = 24;

/// Joint binary action, one bit per agent. Agents are 0-based in code; the
/// textual form puts agent 1 (index 0) leftmost.
class ActionProfile {
 public:
  ActionProfile() = default;
  explicit ActionProfile(std::size_t n);

  static ActionProfile zeros(std::size_t n) { return ActionProfile(n); }
  static ActionProfile ones(std::size_t n);
  /// Bit i of `index` is agent i's action.
  static ActionProfile from_index(std::size_t n, std::uint64_t index);
  /// Parses "0110..." (agent 1 leftmost). Throws std::invalid_argument.
  static ActionProfile parse(std::string_view bits);

  std::size_t size() const noexcept { return n_; }
  int operator[](std::size_t i) const noexcept {
    return static_cast<int>((words_[i >> 6] >> (i & 63)) & 1u);
  }
  void set(std::size_t i, int value) noexcept;
  ActionProfile flipped(std::size_t i) const;
  ActionProfile with(std::size_t i, int value) const;

  std::size_t count_ones() const noexcept;
  bool all_ones() const noexcept { return count_ones() == n_; }
  bool all_zeros() const noexcept { return count_ones() == 0; }

  /// Dense index for enumeration; requires n <= 63.
  std::uint64_t index() const;
  std::string to_string() const;

  bool operator==(const ActionProfile& other) const noexcept = default;
  /// Canonical order: lexicographic on the textual form.
  std::strong_ordering operator<=>(const ActionProfile& other) const noexcept;

  std::size_t hash() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Componentwise a <= b. Throws DimensionError on length mismatch.
bool leq_profile(const ActionProfile& a, const ActionProfile& b);

/// Ordered sequence of profiles of a common length, T >= 1 once populated.
class History {
 public:
  History() = default;
  explicit History(std::vector<ActionProfile> profiles);
  History(std::initializer_list<ActionProfile> profiles);
  static History parse(std::string_view text);  // "00,01,11"

  std::size_t length() const noexcept { return profiles_.size(); }
  bool empty() const noexcept { return profiles_.empty(); }
  std::size_t num_agents() const noexcept {
    return profiles_.empty() ? 0 : profiles_.front().size();
  }
  /// 0-based time index; at(0) is the first profile of the path.
  const ActionProfile& at(std::size_t t) const { return profiles_.at(t); }
  const ActionProfile& last() const { return profiles_.back(); }
  const std::vector<ActionProfile>& profiles() const noexcept { return profiles_; }
  /// First `t` profiles.
  History prefix(std::size_t t) const;

  void push_back(ActionProfile a);
  void pop_back() { profiles_.pop_back(); }

  std::string to_string() const;

  bool operator==(const History& other) const = default;
  auto operator<=>(const History& other) const = default;

 private:
  std::vector<ActionProfile> profiles_;
};

/// Componentwise-in-time order on equal-length paths.
bool leq_path(const History& lhs, const History& rhs);

/// f(a): the n profiles reachable by one unilateral deviation, canonical order.
std::vector<ActionProfile> unilateral_neighbors(const ActionProfile& a);

/// Which agent deviated between two profiles; value 0 means "no deviation",
/// otherwise the 1-based agent number.
struct DeviatorId {
  std::size_t value = 0;

  bool none() const noexcept { return value == 0; }
  /// 0-based agent index; only meaningful when !none().
  std::size_t agent() const noexcept { return value - 1; }
  bool operator==(const DeviatorId&) const = default;
};

/// Throws InvalidPairError when a and b differ in two or more coordinates.
DeviatorId deviator(const ActionProfile& a, const ActionProfile& b);

/// b^{a,a'}(abar): flips, in a', the coordinate of the agent that deviates
/// between a and abar. Requires a <= a' and abar in f(a).
ActionProfile mirror_b(const ActionProfile& a, const ActionProfile& a_prime,
                       const ActionProfile& a_bar);

/// The three-way splits of f(a) and f(a') used by the one-step coupling.
struct PartitionSets {
  std::vector<ActionProfile> r, q, s;  // subsets of f(a)
  std::vector<ActionProfile> R, Q, S;  // subsets of f(a')
};

/// Requires a <= a' (OrderError otherwise). Sets are in canonical order.
PartitionSets partition_sets(const ActionProfile& a, const ActionProfile& a_prime);

/// All 2^n profiles in index order. Throws BudgetError above kMaxEnumerableAgents.
std::vector<ActionProfile> all_profiles(std::size_t n);

}  // namespace hdg

template <>
struct std::hash<hdg::ActionProfile> {
  std::size_t operator()(const hdg::ActionProfile& a) const noexcept { return a.hash(); }
};

#endif  // HDG_PROFILE_HPP
