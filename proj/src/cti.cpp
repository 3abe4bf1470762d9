#include "hdg/cti.hpp"

#include <cmath>
#include <stdexcept>

#include "hdg/errors.hpp"
#include "hdg/parallel.hpp"
#include "hdg/rng.hpp"

namespace hdg {

ValueProcess ValueProcess::constant(double v) {
  ValueProcess p;
  p.kind_ = Kind::Constant;
  p.base_ = v;
  return p;
}

ValueProcess ValueProcess::bounded_uniform(double base, double width, double epsilon, std::uint64_t seed,
                                           bool per_firm) {
  if (!(width >= 0.0)) throw std::invalid_argument("value width must be >= 0");
  ValueProcess p;
  p.kind_ = Kind::BoundedUniform;
  p.base_ = base;
  p.width_ = width;
  p.epsilon_ = epsilon;
  p.seed_ = seed;
  p.per_firm_ = per_firm;
  return p;
}

ValueProcess ValueProcess::custom(Fn fn, double lower_bound) {
  ValueProcess p;
  p.kind_ = Kind::Custom;
  p.fn_ = std::move(fn);
  p.custom_lower_ = lower_bound;
  return p;
}

ValueProcess ValueProcess::reseeded(std::uint64_t seed) const {
  ValueProcess p = *this;
  p.seed_ = seed;
  return p;
}

double ValueProcess::lower_bound() const {
  switch (kind_) {
    case Kind::Constant:
      return base_;
    case Kind::BoundedUniform:
      return base_ + epsilon_;
    case Kind::Custom:
      return custom_lower_;
  }
  return 0.0;
}

double ValueProcess::value_at(std::size_t agent, std::size_t t) const {
  switch (kind_) {
    case Kind::Constant:
      return base_;
    case Kind::BoundedUniform: {
      const std::uint64_t stream = per_firm_ ? agent + 1 : 0;
      return base_ + width_ * to_unit(derive_seed(seed_, t, stream)) + epsilon_;
    }
    case Kind::Custom:
      throw std::logic_error("custom value process needs the full history");
  }
  return 0.0;
}

double ValueProcess::value(std::size_t agent, const History& history) const {
  if (kind_ == Kind::Custom) return fn_(agent, history);
  return value_at(agent, history.length());
}

void CtiConfig::validate() const {
  if (graph.size() == 0) throw std::invalid_argument("CTI game needs at least one firm");
  if (costs.size() != graph.size()) throw std::invalid_argument("costs must have one entry per firm");
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("costs must be finite and >= 0");
  }
  if (!(v_lower() > 0.0)) throw std::invalid_argument("value lower bound must be > 0");
}

namespace {

double sharing_payoff(const CtiConfig& cfg, std::size_t agent, const ActionProfile& a,
                      const std::vector<double>& v) {
  if (a[agent] == 0) return 0.0;
  double s = -cfg.costs[agent];
  for (std::size_t j : cfg.graph.neighbors(agent)) {
    if (a[j] == 1) s += v[j];
  }
  return s;
}

class CtiEnvironment final : public Environment {
 public:
  explicit CtiEnvironment(const CtiConfig* cfg) : cfg_(cfg), values_(cfg->num_agents(), 0.0) {}
  std::size_t num_agents() const override { return cfg_->num_agents(); }
  double utility(std::size_t agent, const ActionProfile& a) const override {
    return sharing_payoff(*cfg_, agent, a, values_);
  }
  void push(const ActionProfile& a) override {
    if (cfg_->value.depends_on_history()) {
      history_.push_back(a);
      for (std::size_t j = 0; j < values_.size(); ++j) values_[j] = cfg_->value.value(j, history_);
    } else {
      for (std::size_t j = 0; j < values_.size(); ++j) values_[j] = cfg_->value.value_at(j, length_ + 1);
    }
    ++length_;
  }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<CtiEnvironment>(*this); }
  std::size_t length() const override { return length_; }

 private:
  const CtiConfig* cfg_;
  std::vector<double> values_;
  std::size_t length_ = 0;
  History history_;
};

}  // namespace

double cti_utility(const CtiConfig& cfg, const History& history, const ActionProfile& a, std::size_t agent) {
  std::vector<double> v(cfg.num_agents());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = cfg.value.value(j, history);
  return sharing_payoff(cfg, agent, a, v);
}

CtiGame::CtiGame(CtiConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::unique_ptr<Environment> CtiGame::start() const { return std::make_unique<CtiEnvironment>(&cfg_); }

CtiReferenceGame::CtiReferenceGame(CtiConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

double CtiReferenceGame::utility(std::size_t agent, const ActionProfile& a) const {
  if (a[agent] == 0) return 0.0;
  const double v = cfg_.v_lower();
  double s = -cfg_.costs[agent];
  for (std::size_t j : cfg_.graph.neighbors(agent)) {
    if (a[j] == 1) s += v;
  }
  return s;
}

std::shared_ptr<const StaticGame> cti_reference(const CtiConfig& cfg) {
  return std::make_shared<CtiReferenceGame>(cfg);
}

AlignedGamePair cti_pair(const CtiConfig& cfg) {
  return AlignedGamePair{std::make_shared<CtiGame>(cfg), cti_reference(cfg)};
}

double cti_potential_value(const CtiConfig& cfg, const ActionProfile& a) {
  const double v = cfg.v_lower();
  double phi = 0.0;
  for (std::size_t i = 0; i < cfg.num_agents(); ++i) {
    if (a[i] == 0) {
      phi += cfg.costs[i];
    } else {
      phi += 0.5 * v * static_cast<double>(cfg.graph.neighbors_playing(i, a, 1));
    }
  }
  return phi;
}

PotentialFunction cti_potential(const CtiConfig& cfg) {
  std::vector<double> values;
  for (const auto& a : all_profiles(cfg.num_agents())) values.push_back(cti_potential_value(cfg, a));
  return PotentialFunction(cfg.num_agents(), std::move(values));
}

nlohmann::json CtiConditionReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& c = agents[i];
    rows.push_back({{"agent", i + 1},
                    {"degree", c.degree},
                    {"cost", c.cost},
                    {"strict_nash", c.unsatisfiable ? nlohmann::json("unsatisfiable") : nlohmann::json(c.strict_nash_holds)},
                    {"unique_maximizer",
                     c.unsatisfiable ? nlohmann::json("unsatisfiable") : nlohmann::json(c.unique_maximizer_holds)}});
  }
  return {{"v_lower", v_lower},
          {"strict_nash_guarantee", strict_nash_guarantee},
          {"unique_maximizer_guarantee", unique_maximizer_guarantee},
          {"agents", rows}};
}

CtiConditionReport cti_condition_check(const CtiConfig& cfg) {
  CtiConditionReport r;
  r.v_lower = cfg.v_lower();
  r.strict_nash_guarantee = true;
  r.unique_maximizer_guarantee = true;
  for (std::size_t i = 0; i < cfg.num_agents(); ++i) {
    CtiAgentCondition c;
    c.degree = cfg.graph.degree(i);
    c.cost = cfg.costs[i];
    c.unsatisfiable = c.degree == 0;
    if (!c.unsatisfiable) {
      // Multiplied through by |N_i| > 0 to avoid the division.
      const double reach = static_cast<double>(c.degree) * r.v_lower;
      c.strict_nash_holds = reach > c.cost;
      c.unique_maximizer_holds = reach > 2.0 * c.cost;
    }
    r.strict_nash_guarantee = r.strict_nash_guarantee && c.strict_nash_holds;
    r.unique_maximizer_guarantee = r.unique_maximizer_guarantee && c.unique_maximizer_holds;
    r.agents.push_back(c);
  }
  return r;
}

CtiExperimentConfig cti_figure1_defaults() {
  CtiExperimentConfig cfg;
  cfg.model.graph = Graph::ring(10);
  cfg.model.costs.assign(10, 0.4);
  cfg.model.value = ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 0);
  return cfg;
}

namespace {

TrialSeries observe(const History& path) {
  TrialSeries s;
  s.count_ones.reserve(path.length());
  for (const auto& p : path.profiles()) s.count_ones.push_back(static_cast<std::uint32_t>(p.count_ones()));
  return s;
}

}  // namespace

Dataset run_cti_experiment(const CtiExperimentConfig& cfg) {
  cfg.model.validate();
  if (cfg.trials == 0 || cfg.T == 0) throw std::invalid_argument("trials and T must be >= 1");
  const auto rule = cfg.rule.make();
  const std::size_t n = cfg.model.num_agents();
  const auto pi = InitialDistribution::uniform(n);
  const CtiReferenceGame reference(cfg.model);

  Dataset data;
  data.num_agents = n;
  data.T = cfg.T;
  data.dynamic.trials.resize(cfg.trials);
  data.reference.trials.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.parallelism, [&](std::size_t k) {
    CtiConfig trial_model = cfg.model;
    trial_model.value = cfg.model.value.reseeded(derive_seed(cfg.seed, k, 1));
    // The reference keeps the configured bound even after reseeding.
    trial_model.declared_lower_bound = cfg.model.v_lower();
    const CtiGame dynamic(std::move(trial_model));
    Rng dyn_rng(derive_seed(cfg.seed, k, 0));
    data.dynamic.trials[k] = observe(simulate_path(dynamic, *rule, pi, cfg.T, dyn_rng));
    Rng ref_rng(derive_seed(cfg.seed, k, 0));
    data.reference.trials[k] = observe(simulate_path(reference, *rule, pi, cfg.T, ref_rng));
  });
  return data;
}

}  // namespace hdg
