#include "hdg/profile.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "hdg/errors.hpp"

namespace hdg {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

void require_same_size(const ActionProfile& a, const ActionProfile& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": profiles of length " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
}

}  // namespace

ActionProfile::ActionProfile(std::size_t n) : n_(n), words_(word_count(n), 0) {}

ActionProfile ActionProfile::ones(std::size_t n) {
  ActionProfile a(n);
  for (std::size_t i = 0; i < n; ++i) a.set(i, 1);
  return a;
}

ActionProfile ActionProfile::from_index(std::size_t n, std::uint64_t index) {
  if (n > 63) throw BudgetError("from_index: n must be <= 63");
  ActionProfile a(n);
  if (n > 0) a.words_[0] = index & ((1ull << n) - 1);
  return a;
}

ActionProfile ActionProfile::parse(std::string_view bits) {
  ActionProfile a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      a.set(i, 1);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("profile string must contain only 0/1: '" + std::string(bits) + "'");
    }
  }
  return a;
}

void ActionProfile::set(std::size_t i, int value) noexcept {
  const std::uint64_t mask = 1ull << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

ActionProfile ActionProfile::flipped(std::size_t i) const {
  ActionProfile out = *this;
  out.words_[i >> 6] ^= 1ull << (i & 63);
  return out;
}

ActionProfile ActionProfile::with(std::size_t i, int value) const {
  ActionProfile out = *this;
  out.set(i, value);
  return out;
}

std::size_t ActionProfile::count_ones() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::uint64_t ActionProfile::index() const {
  if (n_ > 63) throw BudgetError("index: n must be <= 63");
  return words_.empty() ? 0 : words_[0];
}

std::string ActionProfile::to_string() const {
  std::string s(n_, '0');
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

std::strong_ordering ActionProfile::operator<=>(const ActionProfile& other) const noexcept {
  const std::size_t m = std::min(n_, other.n_);
  for (std::size_t i = 0; i < m; ++i) {
    const int x = (*this)[i];
    const int y = other[i];
    if (x != y) return x < y ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return n_ <=> other.n_;
}

std::size_t ActionProfile::hash() const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

bool leq_profile(const ActionProfile& a, const ActionProfile& b) {
  require_same_size(a, b, "leq_profile");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

History::History(std::vector<ActionProfile> profiles) : profiles_(std::move(profiles)) {
  for (const auto& p : profiles_) {
    if (p.size() != profiles_.front().size()) {
      throw DimensionError("History: profiles of differing length");
    }
  }
}

History::History(std::initializer_list<ActionProfile> profiles)
    : History(std::vector<ActionProfile>(profiles)) {}

History History::parse(std::string_view text) {
  std::vector<ActionProfile> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(ActionProfile::parse(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return History(std::move(out));
}

History History::prefix(std::size_t t) const {
  if (t > profiles_.size()) throw DimensionError("History::prefix beyond length");
  return History(std::vector<ActionProfile>(profiles_.begin(), profiles_.begin() + static_cast<std::ptrdiff_t>(t)));
}

void History::push_back(ActionProfile a) {
  if (!profiles_.empty() && a.size() != profiles_.front().size()) {
    throw DimensionError("History::push_back: profile length mismatch");
  }
  profiles_.push_back(std::move(a));
}

std::string History::to_string() const {
  std::string s;
  for (std::size_t t = 0; t < profiles_.size(); ++t) {
    if (t) s += ',';
    s += profiles_[t].to_string();
  }
  return s;
}

bool leq_path(const History& lhs, const History& rhs) {
  if (lhs.length() != rhs.length()) {
    throw DimensionError("leq_path: histories of length " + std::to_string(lhs.length()) + " and " +
                         std::to_string(rhs.length()));
  }
  for (std::size_t t = 0; t < lhs.length(); ++t) {
    if (!leq_profile(lhs.at(t), rhs.at(t))) return false;
  }
  return true;
}

std::vector<ActionProfile> unilateral_neighbors(const ActionProfile& a) {
  std::vector<ActionProfile> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.flipped(i));
  std::sort(out.begin(), out.end());
  return out;
}

DeviatorId deviator(const ActionProfile& a, const ActionProfile& b) {
  require_same_size(a, b, "deviator");
  DeviatorId id;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      if (!id.none()) {
        throw InvalidPairError("deviator: " + a.to_string() + " and " + b.to_string() +
                               " differ in more than one coordinate");
      }
      id.value = i + 1;
    }
  }
  return id;
}

ActionProfile mirror_b(const ActionProfile& a, const ActionProfile& a_prime, const ActionProfile& a_bar) {
  require_same_size(a, a_prime, "mirror_b");
  require_same_size(a, a_bar, "mirror_b");
  if (!leq_profile(a, a_prime)) {
    throw InvalidPairError("mirror_b: " + a.to_string() + " is not <= " + a_prime.to_string());
  }
  const DeviatorId g = deviator(a, a_bar);
  if (g.none()) {
    throw InvalidPairError("mirror_b: " + a_bar.to_string() + " is not a unilateral deviation of " +
                           a.to_string());
  }
  return a_prime.flipped(g.agent());
}

PartitionSets partition_sets(const ActionProfile& a, const ActionProfile& a_prime) {
  if (!leq_profile(a, a_prime)) {
    throw OrderError("partition_sets: " + a.to_string() + " is not <= " + a_prime.to_string());
  }
  PartitionSets out;
  for (const auto& z : unilateral_neighbors(a)) {
    const std::size_t g = deviator(a, z).agent();
    if (a[g] == 1) {
      out.r.push_back(z);
    } else if (leq_profile(z, a_prime)) {
      out.q.push_back(z);
    } else {
      out.s.push_back(z);
    }
  }
  for (const auto& z : unilateral_neighbors(a_prime)) {
    const std::size_t g = deviator(a_prime, z).agent();
    if (a_prime[g] == 0) {
      out.R.push_back(z);
    } else if (leq_profile(a, z)) {
      out.Q.push_back(z);
    } else {
      out.S.push_back(z);
    }
  }
  return out;
}

std::vector<ActionProfile> all_profiles(std::size_t n) {
  if (n > kMaxEnumerableAgents) {
    throw BudgetError("all_profiles: n=" + std::to_string(n) + " exceeds the exact-enumeration cap of " +
                      std::to_string(kMaxEnumerableAgents));
  }
  std::vector<ActionProfile> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) out.push_back(ActionProfile::from_index(n, k));
  return out;
}

}  // namespace hdg
