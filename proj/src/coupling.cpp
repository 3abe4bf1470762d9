#include "hdg/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hdg/errors.hpp"

namespace hdg {

namespace {

bool cell_less(const CouplingCell& l, const CouplingCell& r) {
  if (l.x != r.x) return l.x < r.x;
  return l.y < r.y;
}

std::shared_ptr<const HistoryGame> borrow_as_history_game(const StaticGame& game) {
  return std::make_shared<StaticAsHistoryGame>(std::shared_ptr<const StaticGame>(&game, [](const StaticGame*) {}));
}

nlohmann::json check_json(const CouplingCheck& c) {
  nlohmann::json j{{"condition", c.condition}, {"max_violation", c.max_violation}};
  if (c.witness) j["witness"] = {c.witness->first.to_string(), c.witness->second.to_string()};
  return j;
}

void raise(CouplingCheck& c, double v, const ActionProfile& x, const ActionProfile& y) {
  if (v > c.max_violation) {
    c.max_violation = v;
    c.witness = std::make_pair(x, y);
  }
}

}  // namespace

CouplingMatrix::CouplingMatrix(ActionProfile row_origin, ActionProfile column_origin,
                               std::vector<CouplingCell> cells, TransitionDistribution row_kernel,
                               TransitionDistribution column_kernel, double clamped_mass)
    : row_origin_(std::move(row_origin)),
      column_origin_(std::move(column_origin)),
      row_kernel_(std::move(row_kernel)),
      column_kernel_(std::move(column_kernel)),
      clamped_mass_(clamped_mass) {
  std::sort(cells.begin(), cells.end(), cell_less);
  for (auto& c : cells) {
    if (!cells_.empty() && cells_.back().x == c.x && cells_.back().y == c.y) {
      cells_.back().mass += c.mass;
    } else {
      cells_.push_back(std::move(c));
    }
  }
}

double CouplingMatrix::mass(const ActionProfile& x, const ActionProfile& y) const {
  const CouplingCell key{x, y, 0.0};
  auto it = std::lower_bound(cells_.begin(), cells_.end(), key, cell_less);
  if (it != cells_.end() && it->x == x && it->y == y) return it->mass;
  return 0.0;
}

double CouplingMatrix::total() const {
  double s = 0.0;
  for (const auto& c : cells_) s += c.mass;
  return s;
}

void CouplingMatrix::add(const ActionProfile& x, const ActionProfile& y, double delta) {
  CouplingCell key{x, y, delta};
  auto it = std::lower_bound(cells_.begin(), cells_.end(), key, cell_less);
  if (it != cells_.end() && it->x == x && it->y == y) {
    it->mass += delta;
  } else {
    cells_.insert(it, std::move(key));
  }
}

CouplingMatrix build_one_step_coupling(const StaticGame& reference, const Environment& env,
                                       const LearningRule& rule, const ActionProfile& a,
                                       const ActionProfile& a_prime) {
  const std::size_t n = a.size();
  if (a_prime.size() != n || reference.num_agents() != n || env.num_agents() != n) {
    throw DimensionError("build_one_step_coupling: agent counts differ");
  }
  const PartitionSets sets = partition_sets(a, a_prime);  // OrderError unless a <= a'
  const auto p_static = individual_steps(rule, a, reference);
  const auto p_dynamic = individual_steps(rule, a_prime, env);
  const double share = 1.0 / static_cast<double>(n);

  std::vector<CouplingCell> cells;
  cells.reserve(2 * n + 1);
  double clamped = 0.0;
  auto put = [&](const ActionProfile& x, const ActionProfile& y, double m) {
    if (m < 0.0) {
      if (m < -kClampTolerance) {
        std::ostringstream os;
        os << "coupling cell (" << x.to_string() << ", " << y.to_string() << ") = " << m
           << "; the pair is not aligned or the rule is not monotone at static " << a.to_string() << ", dynamic "
           << a_prime.to_string();
        throw AlignmentViolation(os.str());
      }
      clamped += -m;
      m = 0.0;
    }
    if (m > 0.0) cells.push_back({x, y, m});
  };
  auto g_of = [&](const ActionProfile& origin, const ActionProfile& z) { return deviator(origin, z).agent(); };

  double diagonal = static_cast<double>(n);
  for (const auto& z : sets.R) {
    const std::size_t g = g_of(a_prime, z);
    put(a, z, share * (p_dynamic[g][1] - p_static[g][1]));
    diagonal -= p_dynamic[g][1];
  }
  for (const auto& z : sets.Q) {
    const std::size_t g = g_of(a_prime, z);
    put(a, z, share * p_dynamic[g][0]);
    diagonal -= p_dynamic[g][0];
  }
  for (const auto& z : sets.r) {
    const std::size_t g = g_of(a, z);
    put(z, a_prime, share * (p_static[g][0] - p_dynamic[g][0]));
    put(z, mirror_b(a, a_prime, z), share * p_dynamic[g][0]);
    diagonal -= p_static[g][0];
  }
  for (const auto& z : sets.q) {
    const std::size_t g = g_of(a, z);
    put(z, a_prime, share * p_static[g][1]);
    diagonal -= p_static[g][1];
  }
  for (const auto& z : sets.s) {
    const std::size_t g = g_of(a, z);
    put(z, mirror_b(a, a_prime, z), share * p_static[g][1]);
  }
  put(a, a_prime, share * diagonal);

  return CouplingMatrix(a, a_prime, std::move(cells), async_step_distribution(rule, a, reference),
                        async_step_distribution(rule, a_prime, env), clamped);
}

CouplingMatrix build_one_step_coupling(const AlignedGamePair& pair, const LearningRule& rule,
                                       const ActionProfile& a, const History& alpha) {
  if (alpha.empty()) throw std::invalid_argument("build_one_step_coupling: empty history");
  const auto env = pair.dynamic->at(alpha);
  return build_one_step_coupling(*pair.reference, *env, rule, a, alpha.last());
}

CouplingMatrix product_coupling(const TransitionDistribution& row_kernel,
                                const TransitionDistribution& column_kernel) {
  std::vector<CouplingCell> cells;
  for (const auto& [x, px] : row_kernel.entries()) {
    for (const auto& [y, py] : column_kernel.entries()) {
      if (px * py > 0.0) cells.push_back({x, y, px * py});
    }
  }
  return CouplingMatrix(row_kernel.origin(), column_kernel.origin(), std::move(cells), row_kernel, column_kernel);
}

double CouplingReport::max_violation() const {
  return std::max({nonnegative.max_violation, unit_mass.max_violation, row_marginal.max_violation,
                   column_marginal.max_violation, monotone_support.max_violation});
}

nlohmann::json CouplingReport::to_json() const {
  return {{"passed", passed()},
          {"max_violation", max_violation()},
          {"clamped_mass", clamped_mass},
          {"checks",
           {check_json(nonnegative), check_json(unit_mass), check_json(row_marginal), check_json(column_marginal),
            check_json(monotone_support)}}};
}

CouplingReport verify_one_step_coupling(const CouplingMatrix& m, const TransitionDistribution& row_kernel,
                                        const TransitionDistribution& column_kernel) {
  CouplingReport report;
  report.clamped_mass = m.clamped_mass();
  std::map<ActionProfile, double> rows, columns;
  for (const auto& [x, p] : row_kernel.entries()) rows[x] -= p;
  for (const auto& [y, p] : column_kernel.entries()) columns[y] -= p;

  double total = 0.0;
  for (const auto& c : m.cells()) {
    total += c.mass;
    rows[c.x] += c.mass;
    columns[c.y] += c.mass;
    raise(report.nonnegative, -c.mass, c.x, c.y);
    if (c.mass > 0.0 && !leq_profile(c.x, c.y)) raise(report.monotone_support, c.mass, c.x, c.y);
  }
  report.unit_mass.max_violation = std::abs(total - 1.0);
  for (const auto& [x, d] : rows) raise(report.row_marginal, std::abs(d), x, m.column_origin());
  for (const auto& [y, d] : columns) raise(report.column_marginal, std::abs(d), m.row_origin(), y);
  return report;
}

CouplingReport verify_one_step_coupling(const CouplingMatrix& m, const AlignedGamePair& pair,
                                        const LearningRule& rule, const History& alpha) {
  const auto env = pair.dynamic->at(alpha);
  return verify_one_step_coupling(m, async_step_distribution(rule, m.row_origin(), *pair.reference),
                                  async_step_distribution(rule, alpha.last(), *env));
}

double path_coupling_probability(const AlignedGamePair& pair, const LearningRule& rule,
                                 const InitialDistribution& pi, const History& static_path,
                                 const History& dynamic_path) {
  if (static_path.length() != dynamic_path.length() || static_path.empty()) {
    throw DimensionError("path_coupling_probability: paths must be nonempty and of equal length");
  }
  if (static_path.at(0) != dynamic_path.at(0)) return 0.0;
  double p = pi.probability(static_path.at(0));
  auto env = pair.dynamic->start();
  env->push(dynamic_path.at(0));
  for (std::size_t t = 0; t + 1 < static_path.length() && p > 0.0; ++t) {
    if (!leq_profile(static_path.at(t), dynamic_path.at(t))) return 0.0;
    const CouplingMatrix m =
        build_one_step_coupling(*pair.reference, *env, rule, static_path.at(t), dynamic_path.at(t));
    p *= m.mass(static_path.at(t + 1), dynamic_path.at(t + 1));
    env->push(dynamic_path.at(t + 1));
  }
  return p;
}

void for_each_coupled_path(const AlignedGamePair& pair, const LearningRule& rule, const InitialDistribution& pi,
                           std::size_t length,
                           const std::function<void(const History&, const History&, double)>& visit) {
  if (length == 0) throw std::invalid_argument("for_each_coupled_path: T must be >= 1");
  History xs, ys;
  std::function<void(const Environment&, double)> descend = [&](const Environment& env, double mass) {
    if (xs.length() == length) {
      visit(xs, ys, mass);
      return;
    }
    const CouplingMatrix m = build_one_step_coupling(*pair.reference, env, rule, xs.last(), ys.last());
    for (const auto& c : m.cells()) {
      if (c.mass <= 0.0) continue;
      auto next = env.clone();
      next->push(c.y);
      xs.push_back(c.x);
      ys.push_back(c.y);
      descend(*next, mass * c.mass);
      xs.pop_back();
      ys.pop_back();
    }
  };
  for (const auto& [x, w] : pi.support()) {
    if (w <= 0.0) continue;
    auto env = pair.dynamic->start();
    env->push(x);
    xs.push_back(x);
    ys.push_back(x);
    descend(*env, w);
    xs.pop_back();
    ys.pop_back();
  }
}

PathDistribution path_distribution(const HistoryGame& game, const LearningRule& rule,
                                   const InitialDistribution& pi, std::size_t length) {
  if (length == 0) throw std::invalid_argument("path_distribution: T must be >= 1");
  PathDistribution out;
  History path;
  std::function<void(const Environment&, double)> descend = [&](const Environment& env, double mass) {
    if (path.length() == length) {
      out.emplace_back(path, mass);
      return;
    }
    const TransitionDistribution step = async_step_distribution(rule, path.last(), env);
    for (const auto& [y, p] : step.entries()) {
      if (p <= 0.0) continue;
      auto next = env.clone();
      next->push(y);
      path.push_back(y);
      descend(*next, mass * p);
      path.pop_back();
    }
  };
  for (const auto& [x, w] : pi.support()) {
    if (w <= 0.0) continue;
    auto env = game.start();
    env->push(x);
    path.push_back(x);
    descend(*env, w);
    path.pop_back();
  }
  return out;
}

PathDistribution path_distribution(const StaticGame& game, const LearningRule& rule,
                                   const InitialDistribution& pi, std::size_t length) {
  return path_distribution(*borrow_as_history_game(game), rule, pi, length);
}

std::vector<PathFunctional> increasing_path_functionals() {
  return {
      {"final_count_ones", [](const History& h) { return static_cast<double>(h.last().count_ones()); }},
      {"total_ones",
       [](const History& h) {
         double s = 0.0;
         for (const auto& p : h.profiles()) s += static_cast<double>(p.count_ones());
         return s;
       }},
      {"reached_all_ones",
       [](const History& h) {
         for (const auto& p : h.profiles()) {
           if (p.all_ones()) return 1.0;
         }
         return 0.0;
       }},
      {"final_all_ones", [](const History& h) { return h.last().all_ones() ? 1.0 : 0.0; }},
  };
}

PathFunctional final_count_zeros() {
  return {"final_count_zeros",
          [](const History& h) { return static_cast<double>(h.last().size() - h.last().count_ones()); }};
}

namespace {

History path_from_bits(std::size_t n, std::size_t length, std::uint64_t bits) {
  History h;
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  for (std::size_t t = 0; t < length; ++t) h.push_back(ActionProfile::from_index(n, (bits >> (t * n)) & mask));
  return h;
}

void require_path_budget(std::size_t n, std::size_t length, std::uint64_t budget, const char* who) {
  const double size = std::ldexp(1.0, static_cast<int>(n * length));
  if (n * length > 62 || size > static_cast<double>(budget)) {
    throw BudgetError(std::string(who) + ": |A|^T = 2^" + std::to_string(n * length) + " exceeds budget " +
                      std::to_string(budget));
  }
}

}  // namespace

bool is_increasing(const PathFunctional& z, std::size_t num_agents, std::size_t length, std::uint64_t budget) {
  require_path_budget(num_agents, length, budget, "is_increasing");
  const std::size_t width = num_agents * length;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << width); ++bits) {
    const double base = z.fn(path_from_bits(num_agents, length, bits));
    for (std::size_t k = 0; k < width; ++k) {
      if ((bits >> k) & 1u) continue;
      if (z.fn(path_from_bits(num_agents, length, bits | (std::uint64_t{1} << k))) < base - 1e-12) return false;
    }
  }
  return true;
}

UpperSet::UpperSet(std::vector<History> generators) {
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  for (std::size_t k = 0; k < generators.size(); ++k) {
    bool dominated = false;
    for (std::size_t m = 0; m < generators.size() && !dominated; ++m) {
      dominated = m != k && leq_path(generators[m], generators[k]);
    }
    if (!dominated) minimal_.push_back(generators[k]);
  }
}

bool UpperSet::contains(const History& path) const {
  for (const auto& g : minimal_) {
    if (leq_path(g, path)) return true;
  }
  return false;
}

UpperSet random_upper_set(std::size_t num_agents, std::size_t length, std::size_t generators, Rng& rng) {
  // Sparse generators keep the sets large enough to carry mass.
  const double density = 0.5 * rng.uniform();
  std::vector<History> gens;
  for (std::size_t k = 0; k < generators; ++k) {
    History h;
    for (std::size_t t = 0; t < length; ++t) {
      ActionProfile p(num_agents);
      for (std::size_t i = 0; i < num_agents; ++i) p.set(i, rng.bernoulli(density) ? 1 : 0);
      h.push_back(std::move(p));
    }
    gens.push_back(std::move(h));
  }
  return UpperSet(std::move(gens));
}

double DominanceReport::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) g = std::min(g, e.dynamic_value - e.static_value);
  return g;
}

nlohmann::json DominanceReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"name", e.name},
                    {"dynamic", e.dynamic_value},
                    {"static", e.static_value},
                    {"holds", e.dynamic_value - e.static_value >= -tolerance}});
  }
  return {{"passed", passed()}, {"min_gap", min_gap()}, {"tolerance", tolerance}, {"entries", rows}};
}

DominanceReport dominance_oracle(const AlignedGamePair& pair, const LearningRule& rule,
                                 const InitialDistribution& pi, std::size_t length,
                                 const DominanceOptions& options) {
  const std::size_t n = pair.num_agents();
  require_path_budget(n, length, options.budget, "dominance_oracle");
  const PathDistribution dyn = path_distribution(*pair.dynamic, rule, pi, length);
  const PathDistribution stat = path_distribution(*pair.reference, rule, pi, length);
  auto expect = [](const PathDistribution& d, const std::function<double(const History&)>& f) {
    double s = 0.0;
    for (const auto& [h, p] : d) s += p * f(h);
    return s;
  };

  DominanceReport report;
  const auto at_ones = [](const History& h) { return h.last().all_ones() ? 1.0 : 0.0; };
  report.entries.push_back({"prob_all_ones_at_T", expect(dyn, at_ones), expect(stat, at_ones)});
  for (const auto& z : increasing_path_functionals()) {
    report.entries.push_back({"mean_" + z.name, expect(dyn, z.fn), expect(stat, z.fn)});
  }
  Rng rng(options.seed);
  for (std::size_t k = 0; k < options.upper_sets; ++k) {
    const UpperSet u = random_upper_set(n, length, options.generators_per_set, rng);
    const auto in_u = [&u](const History& h) { return u.contains(h) ? 1.0 : 0.0; };
    report.entries.push_back({"upper_set_" + std::to_string(k), expect(dyn, in_u), expect(stat, in_u)});
  }
  return report;
}

double GapIdentityReport::abs_error() const { return std::abs(lhs - rhs); }

nlohmann::json GapIdentityReport::to_json() const {
  return {{"dynamic_mean", dynamic_mean}, {"static_mean", static_mean}, {"lhs", lhs},
          {"rhs", rhs},                   {"abs_error", abs_error()}};
}

GapIdentityReport coupling_gap_identity(const AlignedGamePair& pair, const LearningRule& rule,
                                        const InitialDistribution& pi, std::size_t length,
                                        const PathFunctional& z) {
  auto integer_z = [&z](const History& h) {
    const double v = z.fn(h);
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-12) throw std::invalid_argument("coupling_gap_identity: Z must be integer-valued");
    return static_cast<long long>(r);
  };

  GapIdentityReport report;
  for (const auto& [h, p] : path_distribution(*pair.dynamic, rule, pi, length)) {
    report.dynamic_mean += p * static_cast<double>(integer_z(h));
  }
  for (const auto& [h, p] : path_distribution(*pair.reference, rule, pi, length)) {
    report.static_mean += p * static_cast<double>(integer_z(h));
  }
  report.lhs = report.dynamic_mean - report.static_mean;

  struct Coupled {
    long long zs, zd;
    double mass;
  };
  std::vector<Coupled> pairs;
  long long lo = std::numeric_limits<long long>::max();
  long long hi = std::numeric_limits<long long>::min();
  for_each_coupled_path(pair, rule, pi, length, [&](const History& xs, const History& ys, double m) {
    const Coupled c{integer_z(xs), integer_z(ys), m};
    lo = std::min({lo, c.zs, c.zd});
    hi = std::max({hi, c.zs, c.zd});
    pairs.push_back(c);
  });
  for (long long eta = lo + 1; eta <= hi; ++eta) {
    for (const auto& c : pairs) {
      if (c.zs < eta && eta <= c.zd) report.rhs += c.mass;
    }
  }
  return report;
}

}  // namespace hdg
