#include "hdg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "hdg/errors.hpp"
#include "hdg/rng.hpp"

namespace hdg {

namespace {

constexpr std::size_t kMaxStationaryAgents = 14;

struct SparseRow {
  std::vector<std::pair<std::uint64_t, double>> entries;
};

std::vector<SparseRow> transition_rows(const StaticGame& game, const LearningRule& rule) {
  const std::size_t n = game.num_agents();
  std::vector<SparseRow> rows;
  rows.reserve(std::size_t{1} << n);
  for (const auto& a : all_profiles(n)) {
    SparseRow row;
    const TransitionDistribution dist = async_step_distribution(rule, a, game);
    for (const auto& [to, p] : dist.entries()) {
      if (p > 0.0) row.entries.emplace_back(to.index(), p);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ProfileDistribution step(const std::vector<SparseRow>& rows, const ProfileDistribution& x) {
  ProfileDistribution y(x.size(), 0.0);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (x[s] == 0.0) continue;
    for (const auto& [to, p] : rows[s].entries) y[to] += x[s] * p;
  }
  return y;
}

// x P^(2^k) for k = 1, 2, ... on the dense matrix, stopping when two
// consecutive vectors agree.
ProfileDistribution stationary_by_squaring(const std::vector<SparseRow>& rows, const StationaryOptions& options) {
  const std::size_t size = rows.size();
  std::vector<double> m(size * size, 0.0), next(size * size);
  for (std::size_t s = 0; s < size; ++s) {
    for (const auto& [to, p] : rows[s].entries) m[s * size + to] += p;
  }
  ProfileDistribution x(size, 1.0 / static_cast<double>(size));
  for (std::size_t k = 0; k < options.max_squarings; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t l = 0; l < size; ++l) {
        const double v = m[i * size + l];
        if (v == 0.0) continue;
        const double* src = &m[l * size];
        double* dst = &next[i * size];
        for (std::size_t j = 0; j < size; ++j) dst[j] += v * src[j];
      }
    }
    m.swap(next);
    // Row sums drift as (1 + d)^(2^k) otherwise.
    for (std::size_t i = 0; i < size; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < size; ++j) row += m[i * size + j];
      for (std::size_t j = 0; j < size; ++j) m[i * size + j] /= row;
    }
    ProfileDistribution y(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) y[j] += x[i] * m[i * size + j];
    }
    double change = 0.0;
    for (std::size_t s = 0; s < size; ++s) change += std::abs(y[s] - x[s]);
    x = std::move(y);
    if (change <= options.tolerance) return x;
  }
  throw NumericError("stationary_distribution: no convergence after 2^" + std::to_string(options.max_squarings) +
                     " steps");
}

}  // namespace

PotentialFunction::PotentialFunction(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != (std::size_t{1} << n)) throw DimensionError("PotentialFunction: expected 2^n values");
}

nlohmann::json PotentialCheck::to_json() const {
  nlohmann::json j{{"exact", exact}, {"max_violation", max_violation}, {"edges_checked", edges_checked}};
  if (violation) {
    j["violation"] = {{"profile", violation->from.to_string()},
                      {"agent", violation->agent + 1},
                      {"utility_difference", violation->utility_difference},
                      {"potential_difference", violation->potential_difference}};
  }
  return j;
}

PotentialCheck check_exact_potential(const StaticGame& game, double anchor) {
  const std::size_t n = game.num_agents();
  if (n > kMaxEnumerableAgents) throw BudgetError("check_exact_potential: n too large to enumerate");
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> phi(size, 0.0);
  std::vector<bool> seen(size, false);

  std::deque<std::uint64_t> queue{0};
  seen[0] = true;
  phi[0] = anchor;
  while (!queue.empty()) {
    const std::uint64_t k = queue.front();
    queue.pop_front();
    const ActionProfile a = ActionProfile::from_index(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t m = k ^ (std::uint64_t{1} << i);
      if (seen[m]) continue;
      const ActionProfile b = a.flipped(i);
      phi[m] = phi[k] + game.utility(i, b) - game.utility(i, a);
      seen[m] = true;
      queue.push_back(m);
    }
  }

  PotentialCheck check;
  for (std::uint64_t k = 0; k < size; ++k) {
    const ActionProfile a = ActionProfile::from_index(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 1) continue;
      const ActionProfile b = a.flipped(i);
      ++check.edges_checked;
      const double du = game.utility(i, b) - game.utility(i, a);
      const double dphi = phi[b.index()] - phi[k];
      const double v = std::abs(du - dphi);
      if (!std::isfinite(du)) throw NumericError("check_exact_potential: non-finite utility");
      if (v > check.max_violation) {
        check.max_violation = v;
        check.violation = PotentialEdgeViolation{a, i, du, dphi};
      }
    }
  }
  check.exact = check.max_violation <= kPotentialTolerance;
  if (check.exact) {
    check.violation.reset();
    check.potential = PotentialFunction(n, std::move(phi));
  }
  return check;
}

std::vector<ActionProfile> potential_maximizers(const PotentialFunction& phi) {
  const auto& v = phi.values();
  const double best = *std::max_element(v.begin(), v.end());
  std::vector<ActionProfile> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] >= best - 1e-12) out.push_back(ActionProfile::from_index(phi.num_agents(), k));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_strict_nash(const StaticGame& game, const ActionProfile& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (game.utility(i, a) - game.utility(i, a.flipped(i)) <= 1e-9) return false;
  }
  return true;
}

ProfileDistribution stationary_distribution(const StaticGame& game, const LearningRule& rule,
                                            const StationaryOptions& options) {
  const std::size_t n = game.num_agents();
  if (n > kMaxStationaryAgents) throw BudgetError("stationary_distribution: more than 2^14 profiles");
  const auto rows = transition_rows(game, rule);
  if (n <= options.dense_max_agents) return stationary_by_squaring(rows, options);
  ProfileDistribution x(rows.size(), 1.0 / static_cast<double>(rows.size()));
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    ProfileDistribution y = step(rows, x);
    double change = 0.0;
    for (std::size_t s = 0; s < y.size(); ++s) change += std::abs(y[s] - x[s]);
    x = std::move(y);
    if (change <= options.tolerance) return x;
  }
  throw NumericError("stationary_distribution: no convergence after " + std::to_string(options.max_iterations) +
                     " iterations");
}

ProfileDistribution evolve_distribution(const StaticGame& game, const LearningRule& rule, ProfileDistribution start,
                                        std::size_t steps) {
  const auto rows = transition_rows(game, rule);
  if (start.size() != rows.size()) throw DimensionError("evolve_distribution: start has the wrong length");
  for (std::size_t t = 0; t < steps; ++t) start = step(rows, start);
  return start;
}

ProfileDistribution gibbs_distribution(const PotentialFunction& phi, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("gibbs_distribution: tau must be > 0");
  const auto& v = phi.values();
  const double m = *std::max_element(v.begin(), v.end());
  ProfileDistribution out(v.size());
  double z = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) z += out[k] = std::exp((v[k] - m) / tau);
  for (double& p : out) p /= z;
  return out;
}

double total_variation(const ProfileDistribution& p, const ProfileDistribution& q) {
  if (p.size() != q.size()) throw DimensionError("total_variation: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

nlohmann::json StabilityEstimate::to_json() const {
  return {{"tau", tau}, {"T", T}, {"trials", trials}, {"estimate", estimate}, {"standard_error", standard_error}};
}

namespace {

template <class Game>
StabilityEstimate estimate_impl(const Game& game, const LearningRule& rule, const InitialDistribution& pi,
                                std::size_t T, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("estimate_prob_all_ones: trials must be >= 1");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    if (simulate_path(game, rule, pi, T, rng).last().all_ones()) ++hits;
  }
  StabilityEstimate e;
  if (const auto* ll = dynamic_cast<const LogLinearRule*>(&rule)) e.tau = ll->tau();
  e.T = T;
  e.trials = trials;
  e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  e.standard_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
  return e;
}

}  // namespace

StabilityEstimate estimate_prob_all_ones(const HistoryGame& game, const LearningRule& rule,
                                         const InitialDistribution& pi, std::size_t T, std::size_t trials,
                                         std::uint64_t seed) {
  return estimate_impl(game, rule, pi, T, trials, seed);
}

StabilityEstimate estimate_prob_all_ones(const StaticGame& game, const LearningRule& rule,
                                         const InitialDistribution& pi, std::size_t T, std::size_t trials,
                                         std::uint64_t seed) {
  return estimate_impl(game, rule, pi, T, trials, seed);
}

}  // namespace hdg
