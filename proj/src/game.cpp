#include "hdg/game.hpp"

#include <cmath>

#include "hdg/errors.hpp"
#include "hdg/rng.hpp"

namespace hdg {

TableGame::TableGame(std::size_t n) : n_(n) {
  if (n > kMaxEnumerableAgents) throw BudgetError("TableGame: too many agents");
  values_.assign(n * (std::size_t{1} << n), 0.0);
}

TableGame TableGame::tabulate(const Utilities& u) {
  TableGame t(u.num_agents());
  for (const auto& a : all_profiles(t.n_)) {
    for (std::size_t i = 0; i < t.n_; ++i) t.set(i, a, u.utility(i, a));
  }
  return t;
}

double TableGame::utility(std::size_t agent, const ActionProfile& a) const {
  return values_[(agent << n_) + a.index()];
}

void TableGame::set(std::size_t agent, const ActionProfile& a, double value) {
  if (a.size() != n_) throw DimensionError("TableGame::set: profile length mismatch");
  values_.at((agent << n_) + a.index()) = value;
}

std::unique_ptr<Environment> HistoryGame::at(const History& history) const {
  auto env = start();
  for (const auto& p : history.profiles()) env->push(p);
  return env;
}

double HistoryGame::utility(std::size_t agent, const History& history, const ActionProfile& a) const {
  return at(history)->utility(agent, a);
}

namespace {

class StaticEnvironment final : public Environment {
 public:
  explicit StaticEnvironment(std::shared_ptr<const StaticGame> game) : game_(std::move(game)) {}
  std::size_t num_agents() const override { return game_->num_agents(); }
  double utility(std::size_t agent, const ActionProfile& a) const override { return game_->utility(agent, a); }
  void push(const ActionProfile&) override { ++length_; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<StaticEnvironment>(*this); }
  std::size_t length() const override { return length_; }

 private:
  std::shared_ptr<const StaticGame> game_;
  std::size_t length_ = 0;
};

class FunctionEnvironment final : public Environment {
 public:
  FunctionEnvironment(std::size_t n, const FunctionHistoryGame::Fn* fn) : n_(n), fn_(fn) {}
  std::size_t num_agents() const override { return n_; }
  double utility(std::size_t agent, const ActionProfile& a) const override { return (*fn_)(agent, history_, a); }
  void push(const ActionProfile& a) override { history_.push_back(a); }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<FunctionEnvironment>(*this); }
  std::size_t length() const override { return history_.length(); }

 private:
  std::size_t n_;
  const FunctionHistoryGame::Fn* fn_;
  History history_;
};

}  // namespace

std::unique_ptr<Environment> StaticAsHistoryGame::start() const {
  return std::make_unique<StaticEnvironment>(game_);
}

std::unique_ptr<Environment> FunctionHistoryGame::start() const {
  return std::make_unique<FunctionEnvironment>(n_, &fn_);
}

AlignedGamePair degenerate_pair(std::shared_ptr<const StaticGame> reference) {
  return AlignedGamePair{std::make_shared<StaticAsHistoryGame>(reference), reference};
}

nlohmann::json AlignmentReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed;
  j["verdict"] = !passed ? "counterexample" : (sampled ? "sampled pass" : "pass");
  j["histories_checked"] = histories_checked;
  j["comparisons"] = comparisons;
  if (counterexample) {
    const auto& c = *counterexample;
    j["counterexample"] = {{"history", c.history.to_string()},
                           {"reference_profile", c.reference_profile.to_string()},
                           {"agent", c.agent + 1},
                           {"condition", c.condition},
                           {"dynamic_value", c.dynamic_value},
                           {"reference_value", c.reference_value}};
  }
  return j;
}

std::optional<AlignmentCounterexample> alignment_violation(const StaticGame& reference, const Environment& env,
                                                           const ActionProfile& last, std::size_t agent) {
  const double dyn1 = env.utility(agent, last.with(agent, 1));
  const double dyn0 = env.utility(agent, last.with(agent, 0));
  if (!std::isfinite(dyn1) || !std::isfinite(dyn0)) throw NumericError("non-finite dynamic utility");

  // a_{-i} ranges over the subsets of the 1-players of last_{-i}.
  std::vector<std::size_t> ones;
  for (std::size_t j = 0; j < last.size(); ++j) {
    if (j != agent && last[j] == 1) ones.push_back(j);
  }
  if (ones.size() > 40) throw BudgetError("alignment_violation: too many 1-players to enumerate");
  const std::uint64_t subsets = std::uint64_t{1} << ones.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    ActionProfile a(last.size());
    for (std::size_t k = 0; k < ones.size(); ++k) {
      if ((mask >> k) & 1u) a.set(ones[k], 1);
    }
    const double ref1 = reference.utility(agent, a.with(agent, 1));
    if (dyn1 < ref1 - kAlignmentTolerance) {
      return AlignmentCounterexample{History{}, a.with(agent, 1), agent, 1, dyn1, ref1};
    }
    const double ref0 = reference.utility(agent, a.with(agent, 0));
    if (ref0 < dyn0 - kAlignmentTolerance) {
      return AlignmentCounterexample{History{}, a.with(agent, 0), agent, 2, dyn0, ref0};
    }
  }
  return std::nullopt;
}

void for_each_history(const HistoryGame& game, std::size_t max_length,
                      const std::function<bool(const History&, const Environment&)>& visit) {
  const auto profiles = all_profiles(game.num_agents());
  History path;
  bool stop = false;
  std::function<void(const Environment&, std::size_t)> descend = [&](const Environment& env, std::size_t target) {
    for (const auto& p : profiles) {
      if (stop) return;
      auto next = env.clone();
      next->push(p);
      path.push_back(p);
      if (path.length() == target) {
        if (!visit(path, *next)) stop = true;
      } else {
        descend(*next, target);
      }
      path.pop_back();
    }
  };
  const auto root = game.start();
  for (std::size_t t = 1; t <= max_length && !stop; ++t) descend(*root, t);
}

AlignmentReport check_aligned(const AlignedGamePair& pair, std::size_t max_length, std::uint64_t budget) {
  const std::size_t n = pair.num_agents();
  if (pair.dynamic->num_agents() != n) throw DimensionError("check_aligned: agent counts differ");
  if (n > kMaxEnumerableAgents) throw BudgetError("check_aligned: n too large to enumerate");
  const double size = std::pow(std::ldexp(1.0, static_cast<int>(n)), static_cast<double>(max_length));
  if (size > static_cast<double>(budget)) {
    throw BudgetError("check_aligned: |A|^T = " + std::to_string(size) + " exceeds budget " +
                      std::to_string(budget));
  }
  AlignmentReport report;
  for_each_history(*pair.dynamic, max_length, [&](const History& h, const Environment& env) {
    ++report.histories_checked;
    for (std::size_t i = 0; i < n; ++i) {
      ++report.comparisons;
      if (auto bad = alignment_violation(*pair.reference, env, h.last(), i)) {
        bad->history = h;
        report.passed = false;
        report.counterexample = std::move(bad);
        return false;
      }
    }
    return true;
  });
  return report;
}

AlignmentReport check_aligned_sampled(const AlignedGamePair& pair, std::size_t length, std::size_t samples,
                                      std::uint64_t seed) {
  const std::size_t n = pair.num_agents();
  AlignmentReport report;
  report.sampled = true;
  Rng rng(seed);
  for (std::size_t k = 0; k < samples; ++k) {
    auto env = pair.dynamic->start();
    History h;
    for (std::size_t t = 0; t < length; ++t) {
      ActionProfile p(n);
      for (std::size_t i = 0; i < n; ++i) p.set(i, rng.bernoulli(0.5) ? 1 : 0);
      env->push(p);
      h.push_back(std::move(p));
    }
    ++report.histories_checked;
    for (std::size_t i = 0; i < n; ++i) {
      ++report.comparisons;
      if (auto bad = alignment_violation(*pair.reference, *env, h.last(), i)) {
        bad->history = h;
        report.passed = false;
        report.counterexample = std::move(bad);
        return report;
      }
    }
  }
  return report;
}

}  // namespace hdg
