#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "hdg/coupling.hpp"
#include "hdg/cti.hpp"
#include "hdg/equilibrium.hpp"
#include "hdg/errors.hpp"
#include "hdg/sisgcg.hpp"
#include "oracles.hpp"

using namespace hdg;

namespace {

ActionProfile P(const char* s) { return ActionProfile::parse(s); }

CtiConfig ring_cti(std::size_t n, double v, double c = 0.4) {
  return CtiConfig{Graph::ring(n), std::vector<double>(n, c), ValueProcess::constant(v), std::nullopt};
}

// Potential game from a random potential plus dummy terms that ignore own action.
TableGame random_potential_game(oracle::Gen& gen, std::size_t n, std::vector<double>& phi) {
  const std::size_t size = std::size_t{1} << n;
  phi.assign(size, 0.0);
  for (double& v : phi) v = gen.real(-1.0, 1.0);
  std::vector<std::vector<double>> dummy(n, std::vector<double>(size));
  for (auto& row : dummy) {
    for (double& v : row) v = gen.real(-1.0, 1.0);
  }
  TableGame g(n);
  for (const auto& a : all_profiles(n)) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t others = a.index() & ~(std::uint64_t{1} << i);
      g.set(i, a, phi[a.index()] + dummy[i][others]);
    }
  }
  return g;
}

std::size_t argmax(const ProfileDistribution& d) {
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

}  // namespace

TEST(Potential, CtiReferenceMatchesClosedForm) {
  for (const double v : {0.3, 0.401, 0.7}) {
    const auto cfg = ring_cti(6, v);
    const auto check = check_exact_potential(*cti_reference(cfg));
    ASSERT_TRUE(check.exact);
    ASSERT_TRUE(check.potential);
    EXPECT_EQ(check.edges_checked, 6u * 32u);
    const auto closed = cti_potential(cfg);
    const double shift = closed(P("000000")) - (*check.potential)(P("000000"));
    for (const auto& a : all_profiles(6)) {
      // Direct evaluation: sum_i (1 - a_i) c_i + (a_i / 2) sum_{j in N_i} a_j v.
      double want = 0.0;
      for (std::size_t i = 0; i < 6; ++i) {
        const int l = a[(i + 5) % 6], r = a[(i + 1) % 6];
        want += (1 - a[i]) * 0.4 + 0.5 * a[i] * (l + r) * v;
      }
      EXPECT_NEAR(closed(a), want, 1e-12);
      EXPECT_NEAR((*check.potential)(a) + shift, want, 1e-9);
    }
  }
}

TEST(Potential, GcgReferenceIsExact) {
  SisgcgConfig cfg;
  cfg.graph = Graph::ring(7);
  const auto check = check_exact_potential(*gcg_reference(cfg));
  ASSERT_TRUE(check.exact);
  const auto closed = gcg_potential(cfg, cfg.reference_infection());
  const double shift = closed(P("0000000")) - (*check.potential)(P("0000000"));
  for (const auto& a : all_profiles(7)) EXPECT_NEAR((*check.potential)(a) + shift, closed(a), 1e-9);
}

TEST(Potential, PerturbedPayoffIsReported) {
  auto g = TableGame::tabulate(*cti_reference(ring_cti(4, 0.5)));
  g.set(2, P("0110"), g.utility(2, P("0110")) + 0.05);
  const auto check = check_exact_potential(g);
  EXPECT_FALSE(check.exact);
  ASSERT_TRUE(check.violation);
  EXPECT_NEAR(check.max_violation, 0.05, 1e-12);
  EXPECT_FALSE(check.potential);
}

TEST(PotentialProperty, RandomPotentialGamesAreRecovered) {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = gen.size(1, 7);
    std::vector<double> phi;
    const auto g = random_potential_game(gen, n, phi);
    const auto check = check_exact_potential(g, phi[0]);
    ASSERT_TRUE(check.exact);
    for (std::size_t k = 0; k < phi.size(); ++k) EXPECT_NEAR(check.potential->values()[k], phi[k], 1e-9);
  }
}

TEST(Maximizers, Examples) {
  const auto ring10 = potential_maximizers(cti_potential(ring_cti(10, 0.401)));
  ASSERT_EQ(ring10.size(), 1u);
  EXPECT_TRUE(ring10.front().all_ones());
  const auto costly = potential_maximizers(cti_potential(ring_cti(10, 0.0)));
  ASSERT_EQ(costly.size(), 1u);
  EXPECT_TRUE(costly.front().all_zeros());
  const PotentialFunction tie(2, {1.0, 0.0, 0.0, 1.0});
  const auto both = potential_maximizers(tie);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0], P("00"));
  EXPECT_EQ(both[1], P("11"));
}

TEST(StrictNash, CtiExamples) {
  EXPECT_TRUE(is_strict_nash(*cti_reference(ring_cti(6, 0.25)), ActionProfile::ones(6)));
  EXPECT_FALSE(is_strict_nash(*cti_reference(ring_cti(6, 0.2)), ActionProfile::ones(6)));
  EXPECT_TRUE(is_strict_nash(*cti_reference(ring_cti(6, 0.5)), ActionProfile::zeros(6)));
}

TEST(Stationary, TwoStateClosedForm) {
  TableGame g(1);
  g.set(0, P("0"), 0.0);
  g.set(0, P("1"), 1.0);
  const auto d = stationary_distribution(g, LogLinearRule(1.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(d[0], 1.0 / (1.0 + e), 1e-12);
  EXPECT_NEAR(d[1], e / (1.0 + e), 1e-12);
}

TEST(Stationary, MatchesGibbsOnRandomPotentialGames) {
  oracle::Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = gen.size(1, 6);
    std::vector<double> phi;
    const auto g = random_potential_game(gen, n, phi);
    const double tau = gen.real(0.3, 2.0);
    const auto d = stationary_distribution(g, LogLinearRule(tau));
    const auto gibbs = gibbs_distribution(PotentialFunction(n, phi), tau);
    EXPECT_LE(total_variation(d, gibbs), 1e-9) << "n=" << n << " tau=" << tau;
  }
}

TEST(Stationary, LowTemperatureConcentratesOnAllShare) {
  const auto cfg = ring_cti(6, 0.5);
  const auto gibbs = gibbs_distribution(cti_potential(cfg), 0.05);
  EXPECT_GE(gibbs.back(), 0.99);
  const auto d = stationary_distribution(*cti_reference(cfg), LogLinearRule(0.05));
  EXPECT_GE(d.back(), 0.99);
}

TEST(Stationary, ArgmaxApproachesPotentialMaximizer) {
  const auto cfg = ring_cti(8, 0.401);
  std::size_t last = 0;
  for (const double tau : {1.0, 0.3, 0.1, 0.03}) {
    last = argmax(stationary_distribution(*cti_reference(cfg), LogLinearRule(tau)));
  }
  EXPECT_EQ(ActionProfile::from_index(8, last), potential_maximizers(cti_potential(cfg)).front());
}

TEST(Stationary, BudgetAndTotalVariation) {
  EXPECT_THROW(stationary_distribution(TableGame(15), LogLinearRule(1.0)), BudgetError);
  EXPECT_DOUBLE_EQ(total_variation({0.5, 0.5}, {1.0, 0.0}), 0.5);
  EXPECT_THROW(total_variation({1.0}, {0.5, 0.5}), DimensionError);
  EXPECT_THROW(gibbs_distribution(PotentialFunction(1, {0.0, 1.0}), 0.0), std::invalid_argument);
}

TEST(Stationary, StrictAllShareMassNondecreasingUnderBestResponse) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto g = cti_reference(ring_cti(n, 0.5));
    ASSERT_TRUE(is_strict_nash(*g, ActionProfile::ones(n)));
    ProfileDistribution x(std::size_t{1} << n, 1.0 / static_cast<double>(std::size_t{1} << n));
    double prev = x.back();
    for (int t = 0; t < 30; ++t) {
      x = evolve_distribution(*g, BestResponseRule(), x, 1);
      EXPECT_GE(x.back(), prev - 1e-15);
      prev = x.back();
    }
  }
}

TEST(Estimate, AbsorbingStarts) {
  const auto g = cti_reference(ring_cti(4, 0.5));
  const auto up = estimate_prob_all_ones(*g, BestResponseRule(), InitialDistribution::point(P("1111")), 20, 50, 1);
  EXPECT_EQ(up.estimate, 1.0);
  const auto down = estimate_prob_all_ones(*g, BestResponseRule(), InitialDistribution::point(P("0000")), 20, 50, 1);
  EXPECT_EQ(down.estimate, 0.0);
  EXPECT_THROW(estimate_prob_all_ones(*g, BestResponseRule(), InitialDistribution::uniform(4), 5, 0, 1),
               std::invalid_argument);
}

TEST(Estimate, AgreesWithExactEnumeration) {
  CtiConfig cfg{Graph::ring(3), {0.4, 0.4, 0.4}, ValueProcess::bounded_uniform(0.4, 0.1, 0.001, 2), std::nullopt};
  const CtiGame game(cfg);
  const LogLinearRule rule(0.3);
  const auto pi = InitialDistribution::uniform(3);
  double exact = 0.0;
  for (const auto& [h, p] : path_distribution(game, rule, pi, 5)) exact += h.last().all_ones() ? p : 0.0;
  const auto est = estimate_prob_all_ones(game, rule, pi, 5, 20000, 9);
  EXPECT_LE(std::abs(est.estimate - exact), 3.0 * est.standard_error);
}
