#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "hdg/coupling.hpp"
#include "hdg/cti.hpp"
#include "hdg/errors.hpp"
#include "hdg/sisgcg.hpp"
#include "oracles.hpp"

using namespace hdg;

namespace {

ActionProfile P(const char* s) { return ActionProfile::parse(s); }

CtiConfig ring_cti(std::size_t n, ValueProcess v) {
  return CtiConfig{Graph::ring(n), std::vector<double>(n, 0.4), std::move(v), std::nullopt};
}

// Random aligned pair: the reference has U_i(1, .) increasing and U_i(0, .)
// decreasing in the others' actions; the dynamic game adds a nonnegative
// history-dependent bonus to playing 1 and subtracts one from playing 0.
AlignedGamePair random_aligned_pair(oracle::Gen& gen, std::size_t n) {
  auto ref = std::make_shared<TableGame>(n);
  std::vector<double> base1(n), base0(n);
  std::vector<std::vector<double>> w1(n, std::vector<double>(n)), w0(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    base1[i] = gen.real(-1.0, 1.0);
    base0[i] = gen.real(-1.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      w1[i][j] = gen.real(0.0, 1.0);
      w0[i][j] = gen.real(0.0, 1.0);
    }
  }
  for (const auto& a : all_profiles(n)) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = a[i] ? base1[i] : base0[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && a[j]) v += a[i] ? w1[i][j] : -w0[i][j];
      }
      ref->set(i, a, v);
    }
  }
  const std::uint64_t salt = gen.eng();
  const double scale = gen.real(0.0, 2.0);
  auto dyn = std::make_shared<FunctionHistoryGame>(
      n, [ref, salt, scale](std::size_t i, const History& h, const ActionProfile& a) {
        const double bonus =
            scale * to_unit(derive_seed(salt, std::hash<std::string>{}(h.to_string()), i + 2 * a[i]));
        return ref->utility(i, a) + (a[i] ? bonus : -bonus);
      });
  return AlignedGamePair{dyn, ref};
}

std::map<std::string, double> row_sums(const CouplingMatrix& m) {
  std::map<std::string, double> out;
  for (const auto& c : m.cells()) out[c.x.to_string()] += c.mass;
  return out;
}

std::map<std::string, double> column_sums(const CouplingMatrix& m) {
  std::map<std::string, double> out;
  for (const auto& c : m.cells()) out[c.y.to_string()] += c.mass;
  return out;
}

double max_gap(const std::map<std::string, double>& got, const std::map<std::string, double>& want) {
  double worst = 0.0;
  for (const auto& [k, v] : want) worst = std::max(worst, std::abs(v - (got.count(k) ? got.at(k) : 0.0)));
  for (const auto& [k, v] : got) {
    if (!want.count(k)) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

// Checks a coupling against kernels computed on the test side.
void expect_valid_coupling(const CouplingMatrix& m, const StaticGame& ref, const Utilities& dyn,
                           const ActionProfile& a, const ActionProfile& top, double tau) {
  const auto rows = oracle::log_linear_kernel(ref, a, tau);
  const auto cols = oracle::log_linear_kernel(dyn, top, tau);
  EXPECT_LE(max_gap(row_sums(m), rows), 1e-12);
  EXPECT_LE(max_gap(column_sums(m), cols), 1e-12);
  for (const auto& c : m.cells()) {
    EXPECT_GE(c.mass, 0.0);
    if (c.mass > 0.0) {
      EXPECT_TRUE(oracle::leq(c.x, c.y)) << c.x.to_string() << " " << c.y.to_string();
    }
  }
  EXPECT_NEAR(oracle::monotone_coupling_flow(rows, cols), 1.0, 1e-12);
}

}  // namespace

TEST(OneStep, IdenticalMarginalsGiveDiagonal) {
  const auto cfg = ring_cti(3, ValueProcess::constant(0.5));
  const auto pair = degenerate_pair(cti_reference(cfg));
  const LogLinearRule rule(0.5);
  for (const auto& a : all_profiles(3)) {
    const auto m = build_one_step_coupling(pair, rule, a, History{a});
    const auto k = async_step_distribution(rule, a, *pair.reference);
    for (const auto& c : m.cells()) {
      EXPECT_EQ(c.x, c.y);
      EXPECT_NEAR(c.mass, k.probability(c.x), 1e-15);
    }
  }
}

TEST(OneStep, TwoFirmInstanceAgainstFlowOracle) {
  const auto cfg = ring_cti(2, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 17));
  const auto pair = cti_pair(cfg);
  const LogLinearRule rule(0.3);
  const auto alpha = History::parse("00,11");
  const auto m = build_one_step_coupling(pair, rule, P("00"), alpha);
  const auto env = pair.dynamic->at(alpha);
  expect_valid_coupling(m, *pair.reference, *env, P("00"), P("11"), 0.3);
  EXPECT_NEAR(m.total(), 1.0, 1e-15);
  EXPECT_TRUE(verify_one_step_coupling(m, pair, rule, alpha).passed());
}

TEST(OneStep, OrderAndAlignmentErrors) {
  const auto cfg = ring_cti(2, ValueProcess::constant(0.5));
  const auto pair = cti_pair(cfg);
  EXPECT_THROW(build_one_step_coupling(pair, LogLinearRule(1.0), P("10"), History::parse("01")), OrderError);

  // Dynamic side strongly prefers 0: the coupling cannot be monotone.
  auto ref = cti_reference(cfg);
  auto worse = std::make_shared<FunctionHistoryGame>(2, [ref](std::size_t i, const History&, const ActionProfile& a) {
    return ref->utility(i, a) - (a[i] ? 5.0 : 0.0);
  });
  EXPECT_THROW(build_one_step_coupling(AlignedGamePair{worse, ref}, LogLinearRule(0.5), P("00"), History::parse("00")),
               AlignmentViolation);
}

TEST(OneStep, ProductCouplingIsFlagged) {
  const auto cfg = ring_cti(3, ValueProcess::constant(0.5));
  const auto pair = cti_pair(cfg);
  const LogLinearRule rule(1.0);
  const auto alpha = History::parse("010");
  const auto m = build_one_step_coupling(pair, rule, P("010"), alpha);
  const auto prod = product_coupling(m.row_kernel(), m.column_kernel());
  const auto report = verify_one_step_coupling(prod, m.row_kernel(), m.column_kernel());
  EXPECT_LE(report.row_marginal.max_violation, 1e-12);
  EXPECT_GT(report.monotone_support.max_violation, 1e-3);
  EXPECT_FALSE(report.passed());
}

TEST(OneStep, CorruptedCellIsFlagged) {
  const auto cfg = ring_cti(3, ValueProcess::constant(0.5));
  const auto pair = cti_pair(cfg);
  const LogLinearRule rule(1.0);
  const auto alpha = History::parse("011");
  auto m = build_one_step_coupling(pair, rule, P("001"), alpha);
  m.add(P("001"), P("011"), 0.01);
  const auto report = verify_one_step_coupling(m, pair, rule, alpha);
  EXPECT_NEAR(report.row_marginal.max_violation, 0.01, 1e-12);
  EXPECT_NEAR(report.column_marginal.max_violation, 0.01, 1e-12);
  EXPECT_FALSE(report.passed());
}

TEST(OneStepProperty, RandomAlignedPairsCoupleMonotonically) {
  oracle::Gen gen(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = gen.size(1, 4);
    const auto pair = random_aligned_pair(gen, n);
    const double tau = gen.real(0.1, 2.0);
    const LogLinearRule rule(tau);
    const std::size_t T = gen.size(1, 3);
    History alpha;
    for (std::size_t t = 0; t < T; ++t) alpha.push_back(gen.profile(n));
    const auto env = pair.dynamic->at(alpha);
    for (const auto& a : all_profiles(n)) {
      if (!oracle::leq(a, alpha.last())) continue;
      const auto m = build_one_step_coupling(pair, rule, a, alpha);
      expect_valid_coupling(m, *pair.reference, *env, a, alpha.last(), tau);
      EXPECT_TRUE(verify_one_step_coupling(m, pair, rule, alpha).passed());
    }
  }
}

TEST(OneStepProperty, BestResponseCouplingsAreValid) {
  oracle::Gen gen(77);
  const BestResponseRule rule;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = gen.size(2, 4);
    const auto pair = random_aligned_pair(gen, n);
    History alpha{gen.profile(n), gen.profile(n)};
    for (const auto& a : all_profiles(n)) {
      if (!oracle::leq(a, alpha.last())) continue;
      const auto m = build_one_step_coupling(pair, rule, a, alpha);
      EXPECT_TRUE(verify_one_step_coupling(m, pair, rule, alpha).passed());
    }
  }
}

TEST(PathCoupling, Examples) {
  const auto cfg = ring_cti(2, ValueProcess::constant(0.5));
  const auto pair = cti_pair(cfg);
  const LogLinearRule rule(0.5);
  const auto pi = InitialDistribution::uniform(2);
  EXPECT_EQ(path_coupling_probability(pair, rule, pi, History::parse("00"), History::parse("01")), 0.0);
  EXPECT_DOUBLE_EQ(path_coupling_probability(pair, rule, pi, History::parse("01"), History::parse("01")), 0.25);
  EXPECT_EQ(path_coupling_probability(pair, rule, pi, History::parse("01,01"), History::parse("01,00")), 0.0);
}

TEST(PathCoupling, MarginalsMatchPathMeasures) {
  const auto cfg = ring_cti(2, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 3));
  const auto pair = cti_pair(cfg);
  const LogLinearRule rule(0.4);
  const auto pi = InitialDistribution::uniform(2);
  std::map<std::string, double> xs, ys;
  double total = 0.0;
  for_each_coupled_path(pair, rule, pi, 3, [&](const History& x, const History& y, double p) {
    EXPECT_TRUE(leq_path(x, y));
    xs[x.to_string()] += p;
    ys[y.to_string()] += p;
    total += p;
  });
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (const auto& [x, p] : xs) {
    EXPECT_NEAR(p, exact_path_probability(*pair.reference, rule, pi, History::parse(x)), 1e-12);
  }
  for (const auto& [y, p] : ys) {
    EXPECT_NEAR(p, exact_path_probability(*pair.dynamic, rule, pi, History::parse(y)), 1e-12);
  }
}

TEST(Dominance, CtiRingOfThreeHolds) {
  const auto cfg = ring_cti(3, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 5));
  const auto report = dominance_oracle(cti_pair(cfg), LogLinearRule(0.3), InitialDistribution::uniform(3), 4);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.entries.front().name, "prob_all_ones_at_T");
  EXPECT_GE(report.entries.front().dynamic_value, report.entries.front().static_value - 1e-12);
}

TEST(Dominance, DegeneratePairIsEquality) {
  const auto cfg = ring_cti(3, ValueProcess::constant(0.5));
  const auto report =
      dominance_oracle(degenerate_pair(cti_reference(cfg)), LogLinearRule(0.3), InitialDistribution::uniform(3), 3);
  EXPECT_TRUE(report.passed());
  for (const auto& e : report.entries) EXPECT_NEAR(e.dynamic_value, e.static_value, 1e-12) << e.name;
}

TEST(Dominance, DecreasingFunctionalIsExcluded) {
  const auto zeros = final_count_zeros();
  EXPECT_FALSE(is_increasing(zeros, 2, 2));
  for (const auto& z : increasing_path_functionals()) {
    EXPECT_NE(z.name, zeros.name);
    EXPECT_TRUE(is_increasing(z, 3, 2)) << z.name;
  }
  // Under the aligned pair the mean number of 0-players goes the other way.
  const auto cfg = ring_cti(3, ValueProcess::constant(0.8));
  auto ref_cfg = cfg;
  ref_cfg.declared_lower_bound = 0.4;
  const auto pair = cti_pair(ref_cfg);
  const LogLinearRule rule(0.3);
  const auto pi = InitialDistribution::uniform(3);
  double dyn = 0.0, stat = 0.0;
  for (const auto& [h, p] : path_distribution(*pair.dynamic, rule, pi, 3)) dyn += p * zeros.fn(h);
  for (const auto& [h, p] : path_distribution(*pair.reference, rule, pi, 3)) stat += p * zeros.fn(h);
  EXPECT_LT(dyn, stat);
}

TEST(UpperSets, ClosedUpwardAndMinimal) {
  Rng rng(4);
  const auto u = random_upper_set(2, 2, 3, rng);
  for (const auto& m : u.minimal()) {
    EXPECT_TRUE(u.contains(m));
    EXPECT_TRUE(u.contains(History::parse("11,11")));
    for (const auto& other : u.minimal()) {
      if (!(other == m)) {
        EXPECT_FALSE(leq_path(other, m));
      }
    }
  }
  const UpperSet single({History::parse("01,00")});
  EXPECT_TRUE(single.contains(History::parse("01,10")));
  EXPECT_FALSE(single.contains(History::parse("10,11")));
}

TEST(GapIdentity, AllOnesIndicatorTwoFirms) {
  const auto cfg = ring_cti(2, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 6));
  const PathFunctional z{"final_all_ones", [](const History& h) { return h.last().all_ones() ? 1.0 : 0.0; }};
  const auto r = coupling_gap_identity(cti_pair(cfg), LogLinearRule(0.3), InitialDistribution::uniform(2), 3, z);
  EXPECT_LE(r.abs_error(), 1e-12);
  EXPECT_GE(r.lhs, -1e-12);
}

TEST(GapIdentity, ZeroFunctionalAndDegeneratePair) {
  const auto cfg = ring_cti(2, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 6));
  const PathFunctional zero{"zero", [](const History&) { return 0.0; }};
  const auto r0 = coupling_gap_identity(cti_pair(cfg), LogLinearRule(0.3), InitialDistribution::uniform(2), 3, zero);
  EXPECT_EQ(r0.lhs, 0.0);
  EXPECT_EQ(r0.rhs, 0.0);
  const PathFunctional count{"count", [](const History& h) { return static_cast<double>(h.last().count_ones()); }};
  const auto rd = coupling_gap_identity(degenerate_pair(cti_reference(cfg)), LogLinearRule(0.3),
                                        InitialDistribution::uniform(2), 3, count);
  EXPECT_NEAR(rd.lhs, 0.0, 1e-12);
  EXPECT_NEAR(rd.rhs, 0.0, 1e-12);
  const PathFunctional half{"half", [](const History&) { return 0.5; }};
  EXPECT_THROW(coupling_gap_identity(cti_pair(cfg), LogLinearRule(0.3), InitialDistribution::uniform(2), 2, half),
               std::invalid_argument);
}

TEST(GapIdentity, EpidemicPairAfterEntry) {
  SisgcgConfig cfg;
  cfg.graph = Graph::ring(3);
  cfg.S0 = 0.5;
  const PathFunctional count{"count", [](const History& h) { return static_cast<double>(h.last().count_ones()); }};
  const auto r = coupling_gap_identity(sisgcg_pair(cfg), LogLinearRule(0.3), InitialDistribution::uniform(3), 3, count);
  EXPECT_LE(r.abs_error(), 1e-10);
}
