// Copyright 2026 The riskscene Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskscene/samplers.hpp"

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace riskscene {
namespace {

VariableSpec env(std::string name, double lo, double hi, std::optional<double> step = {},
                 std::optional<double> delta = {}) {
  return {std::move(name), VariableKind::kEnvironmental, lo, hi, step, delta, {}};
}

SceneSpace table_space() {
  VariableSpec rs{"RS", VariableKind::kStructural, 0, 9, 1.0, 1.0, {}};
  VariableSpec td = env("TD", 0, 20, 5.0, 10.0);
  td.dependency = Dependency{"RS", {{{0, 2}, {0, 20}}, {{3, 5}, {0, 15}}, {{6, 9}, {0, 10}}}};
  return SceneSpace({rs, env("P", 0, 100, 10.0, 5.0), env("T", 0, 90, 10.0, 10.0), env("C", 0, 100, 10.0, 5.0), td,
                     {"F1", VariableKind::kFault, 0, 1, {}, {}, {}}, {"F2", VariableKind::kFault, 0, 1, {}, {}, {}}});
}

std::vector<Scene> drive(Sampler& s, std::size_t n, const std::function<double(const Scene&)>& risk) {
  std::vector<Scene> out;
  std::optional<Feedback> last;
  for (std::size_t i = 0; i < n; ++i) {
    auto scene = s.next(last);
    if (!scene) break;
    out.push_back(*scene);
    last = Feedback{*scene, risk(*scene)};
  }
  return out;
}

// --- random -----------------------------------------------------------------

TEST(SampleRandom, DomainsAndMean) {
  const SceneSpace space({env("P", 0, 100), env("D", 3, 3), {"F", VariableKind::kFault, 0, 1, {}, {}, {}}});
  Rng rng(99);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = sample_random(rng, space);
    sum += s.values[0];
    EXPECT_EQ(s.values[1], 3.0);
    EXPECT_TRUE(s.values[2] == 0.0 || s.values[2] == 1.0);
  }
  EXPECT_NEAR(sum / 10000.0, 50.0, 2.0);
}

TEST(SampleRandom, RespectsDependencies) {
  const auto space = table_space();
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) ASSERT_TRUE(validate_scene(sample_random(rng, space), space).ok());
}

TEST(RandomSampler, DeterministicPerSeed) {
  const auto space = table_space();
  RandomSampler a(space, 5), b(space, 5), c(space, 6);
  const auto zero = [](const Scene&) { return 0.0; };
  const auto sa = drive(a, 50, zero);
  EXPECT_EQ(sa, drive(b, 50, zero));
  EXPECT_NE(sa, drive(c, 50, zero));
  EXPECT_EQ(sa.front().iteration, 1u);
  EXPECT_EQ(sa.back().iteration, 50u);
}

// --- grid -------------------------------------------------------------------

TEST(GridEnumerate, OrderAndCount) {
  const SceneSpace space({env("A", 0, 1, 0.5), env("B", 0, 1, 1.0)});
  const auto g = grid_enumerate(space, 100);
  ASSERT_EQ(g.size(), 6u);
  const std::vector<std::vector<double>> expected{{0, 0}, {0, 1}, {0.5, 0}, {0.5, 1}, {1, 0}, {1, 1}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g[i].values, expected[i]);
    EXPECT_EQ(g[i].iteration, i + 1);
  }
  EXPECT_EQ(grid_enumerate(space, 4).size(), 4u);
  EXPECT_EQ(grid_enumerate(space, 4).back().values, expected[3]);
}

TEST(GridEnumerate, InclusiveEndpointsAndFaults) {
  const SceneSpace single({{"RS", VariableKind::kStructural, 0, 9, 1.0, {}, {}}});
  const auto g = grid_enumerate(single, 100);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g.back().values[0], 9.0);

  const SceneSpace tenth({env("X", 0, 1, 0.1), {"F", VariableKind::kFault, 0, 1, {}, {}, {}}});
  const auto t = grid_enumerate(tenth, 100);
  ASSERT_EQ(t.size(), 22u);
  EXPECT_EQ(t.back().values, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(GridCursor(tenth).product_size(), 22.0);
}

TEST(GridEnumerate, SkipsDependencyViolations) {
  const auto space = table_space();
  GridCursor cursor(space);
  std::size_t n = 0;
  while (auto s = cursor.next()) {
    ASSERT_TRUE(validate_scene(*s, space).ok()) << validate_scene(*s, space).summary();
    ++n;
  }
  // TD grid {0, 5, 10, 15, 20}: 5 values for RS 0..2, 4 for 3..5, 3 for 6..9.
  const std::size_t td_rs = 3 * 5 + 3 * 4 + 4 * 3;
  EXPECT_EQ(n, td_rs * 11 * 10 * 11 * 4);
  EXPECT_EQ(GridCursor(space).product_size(), 10.0 * 11 * 10 * 11 * 5 * 4);
}

TEST(GridEnumerate, Errors) {
  EXPECT_THROW(GridCursor(SceneSpace({env("X", 0, 1)})), std::invalid_argument);
  EXPECT_THROW(GridCursor(SceneSpace({{"S", VariableKind::kStructural, 0, 4, 1.5, {}, {}}})), std::invalid_argument);
}

TEST(GridSampler, ExhaustsAndIgnoresFeedback) {
  GridSampler g(SceneSpace({env("A", 0, 1, 0.5)}));
  EXPECT_EQ(g.next({})->values[0], 0.0);
  EXPECT_EQ(g.next(Feedback{{}, 9.0})->values[0], 0.5);
  EXPECT_EQ(g.next({})->values[0], 1.0);
  EXPECT_FALSE(g.next({}));
}

// --- Halton -----------------------------------------------------------------

TEST(RadicalInverse, Examples) {
  EXPECT_EQ(radical_inverse(0, 2), 0.0);
  EXPECT_EQ(radical_inverse(0, 7), 0.0);
  EXPECT_EQ(radical_inverse(1, 2), 0.5);
  EXPECT_EQ(radical_inverse(3, 2), 0.75);
  EXPECT_EQ(oracle::radical_inverse(5, 3), 7.0 / 9.0);
  EXPECT_DOUBLE_EQ(radical_inverse(5, 3), 7.0 / 9.0);
  EXPECT_THROW(radical_inverse(1, 1), std::invalid_argument);
}

TEST(RadicalInverse, MatchesExactOracle) {
  for (std::uint32_t base : {2u, 3u, 5u, 7u, 11u, 97u}) {
    for (std::uint64_t i = 0; i < 5000; ++i) {
      const double v = radical_inverse(i, base);
      EXPECT_NEAR(v, oracle::radical_inverse(i, base), 1e-15) << i << " base " << base;
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(HaltonPoint, UsesPrimeBases) {
  const auto p = halton_point(1, 2);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 1.0 / 3.0);
  const auto q = halton_point(7, 25);
  const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                  83, 89, 97};
  for (std::size_t j = 0; j < 25; ++j) EXPECT_NEAR(q[j], oracle::radical_inverse(7, primes[j]), 1e-15);
  EXPECT_THROW(halton_point(1, 26), std::invalid_argument);
}

TEST(SampleHalton, MapsIntoSpace) {
  const auto space = table_space();
  EXPECT_THROW(sample_halton(0, space), std::invalid_argument);
  for (std::uint64_t i = 1; i <= 2000; ++i) {
    const auto s = sample_halton(i, space);
    ASSERT_TRUE(validate_scene(s, space).ok()) << i << ": " << validate_scene(s, space).summary();
  }
  const SceneSpace two({env("P", 0, 100), env("T", 0, 90)});
  const auto first = sample_halton(1, two);
  EXPECT_EQ(first.values[0], 50.0);
  EXPECT_DOUBLE_EQ(first.values[1], 30.0);
}

TEST(SampleHalton, LowerDiscrepancyThanRandom) {
  std::vector<std::vector<double>> halton;
  for (std::uint64_t i = 1; i <= 256; ++i) halton.push_back(halton_point(i, 2));
  const double h = oracle::centered_l2_discrepancy_sq(halton);
  double random_mean = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(256);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    random_mean += oracle::centered_l2_discrepancy_sq(pts) / 20.0;
  }
  EXPECT_LT(h, random_mean);
}

TEST(HaltonSampler, SeedIndependentViaFactory) {
  const auto space = table_space();
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kHalton;
  auto a = make_sampler(cfg, space, 1, 0.65);
  auto b = make_sampler(cfg, space, 12345, 0.65);
  const auto zero = [](const Scene&) { return 0.0; };
  EXPECT_EQ(drive(*a, 30, zero), drive(*b, 30, zero));
  EXPECT_THROW(HaltonSampler(SceneSpace(std::vector<VariableSpec>(26, env("X", 0, 1)))), std::invalid_argument);
}

// --- RNS --------------------------------------------------------------------

TEST(CountNeighbors, MatchesBruteForce) {
  Rng rng(1);
  KdTree idx(3);
  std::vector<std::vector<double>> pts;
  EXPECT_EQ(count_neighbors(idx, std::vector<double>{0, 0, 0}, 1.0), 0u);
  for (int i = 0; i < 200; ++i) {
    pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    idx.insert(pts.back());
  }
  for (int q = 0; q < 50; ++q) {
    const std::vector<double> query{rng.uniform(), rng.uniform(), rng.uniform()};
    const double tau = rng.uniform(0.05, 0.5);
    EXPECT_EQ(count_neighbors(idx, query, tau), oracle::brute_count(pts, query, tau));
  }
  KdTree line(1);
  line.insert(std::vector<double>{0.25});
  EXPECT_EQ(count_neighbors(line, std::vector<double>{0.0}, 0.25), 0u);
}

TEST(RnsSampler, FirstCallExplores) {
  RnsSampler s(table_space(), {}, 0.65, 1);
  const auto first = s.next({});
  ASSERT_TRUE(first);
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExplore);
  EXPECT_FALSE(s.anchor());
  EXPECT_FALSE(s.reference());
  EXPECT_TRUE(s.explored().empty());
}

TEST(RnsSampler, HighRiskAnchorsNeighbourhood) {
  const auto space = table_space();
  RnsSampler s(space, {6, 0.15}, 0.65, 2);
  const auto r = *s.next({});
  auto next = *s.next(Feedback{r, 0.9});
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExploit);
  ASSERT_TRUE(s.anchor());
  EXPECT_EQ(*s.anchor(), r);
  EXPECT_EQ(*s.reference(), r);
  EXPECT_TRUE(within_step_constraints(r, next, space));
  EXPECT_TRUE(validate_scene(next, space).ok());
  // Neighbourhood samples keep the original anchor.
  for (int i = 0; i < 3; ++i) {
    next = *s.next(Feedback{next, 0.95});
    EXPECT_EQ(*s.anchor(), r);
    EXPECT_TRUE(within_step_constraints(r, next, space));
  }
  EXPECT_EQ(s.explored().size(), 4u);
  EXPECT_EQ(s.explored_index().size(), 4u);
  EXPECT_EQ(s.explored_risks().back(), 0.95);
}

TEST(RnsSampler, ThresholdIsStrictAndLowRiskExplores) {
  RnsSampler s(table_space(), {}, 0.65, 3);
  const auto r = *s.next({});
  s.next(Feedback{r, 0.65});
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExplore);
  const auto r2 = *s.next(Feedback{r, 0.9});
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExploit);
  s.next(Feedback{r2, 0.1});
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExplore);
  EXPECT_FALSE(s.anchor());
}

TEST(RnsSampler, EnoughNeighboursReturnsToExplore) {
  const SceneSpace space({env("P", 0, 100, {}, 5.0), env("T", 0, 90, {}, 10.0)});
  RnsSampler s(space, {6, 10.0}, 0.65, 4);  // tau covers the whole unit square
  auto scene = *s.next({});
  for (int i = 0; i < 5; ++i) {
    scene = *s.next(Feedback{scene, 0.9});
    EXPECT_EQ(s.mode(), RnsSampler::Mode::kExploit) << i;
  }
  s.next(Feedback{scene, 0.9});  // sixth explored point
  EXPECT_EQ(s.mode(), RnsSampler::Mode::kExplore);
  EXPECT_FALSE(s.anchor());
}

TEST(RnsSampler, ExploitScenesRespectConstraints) {
  const auto space = table_space();
  RnsSampler s(space, {6, 0.15}, 0.5, 8);
  std::optional<Feedback> last;
  Rng risk_rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto scene = *s.next(last);
    ASSERT_TRUE(validate_scene(scene, space).ok());
    if (s.mode() == RnsSampler::Mode::kExploit) {
      EXPECT_TRUE(within_step_constraints(*s.anchor(), scene, space));
    }
    last = Feedback{scene, risk_rng.uniform()};
  }
  EXPECT_EQ(s.explored().size(), 499u);
  for (std::size_t i = 0; i < s.explored().size(); ++i) {
    EXPECT_GE(count_neighbors(s.explored_index(), s.explored()[i], 1e-12), 1u);
  }
}

TEST(RnsSampler, DeterministicAndValidated) {
  const auto space = table_space();
  const auto risk = [](const Scene& s) { return s.values[1] / 100.0; };
  RnsSampler a(space, {}, 0.65, 9), b(space, {}, 0.65, 9);
  EXPECT_EQ(drive(a, 200, risk), drive(b, 200, risk));
  EXPECT_THROW(RnsSampler(space, {0, 0.1}, 0.65, 1), std::invalid_argument);
  EXPECT_THROW(RnsSampler(space, {1, 0.0}, 0.65, 1), std::invalid_argument);
}

// --- UCB / GBO --------------------------------------------------------------

TEST(UcbSelect, BetaZeroAndSingleton) {
  const SceneSpace space({env("X", 0, 1)});
  const std::vector<double> y{0.0, 1.0, 0.0};
  const auto gp = GaussianProcess::fit({{0.1}, {0.5}, {0.9}}, y, SeKernel{});
  Rng rng(1);
  const auto region = full_region(space);
  const auto best = ucb_select(gp, region, space, 0.0, 512, rng, 1);
  EXPECT_NEAR(best.values[0], 0.5, 0.02);

  Rng r1(7), r2(7);
  const auto only = ucb_select(gp, region, space, 30.0, 1, r1, 1);
  EXPECT_EQ(only, sample_in_region(r2, region, space, 1));
  EXPECT_THROW(ucb_select(gp, region, space, 1.0, 0, r1, 1), std::invalid_argument);
}

TEST(UcbSelect, MatchesDenseGridAcquisition) {
  // Two bumps; the UCB of the chosen candidate is compared with the maximum
  // of the acquisition over a dense grid, both computed by the oracle.
  const SceneSpace space({env("X", 0, 1)});
  const std::vector<std::vector<double>> x{{0.05}, {0.2}, {0.35}, {0.5}, {0.65}, {0.8}, {0.95}};
  std::vector<double> y;
  for (const auto& p : x) {
    y.push_back(std::exp(-std::pow((p[0] - 0.2) / 0.08, 2)) + 0.7 * std::exp(-std::pow((p[0] - 0.75) / 0.08, 2)));
  }
  const SeKernel k;
  const double beta = 30.0;
  const oracle::GpOracle ref{k.signal_variance, k.length_scale, k.noise_variance, x, y};
  auto acquisition = [&](double q) {
    const auto [m, v] = ref.predict({q});
    return m + std::sqrt(beta) * std::sqrt(std::max(v, 0.0));
  };
  double grid_max = -1e9;
  for (int i = 0; i < 10000; ++i) grid_max = std::max(grid_max, acquisition(i / 9999.0));

  const auto gp = GaussianProcess::fit(x, y, k);
  Rng rng(3);
  const auto chosen = ucb_select(gp, full_region(space), space, beta, 4096, rng, 1);
  EXPECT_NEAR(acquisition(chosen.values[0]), grid_max, 1e-3);
}

TEST(UcbSelect, ScalingTargetsKeepsChoiceAtBetaZero) {
  const SceneSpace space({env("X", 0, 1), env("Y", 0, 1)});
  Rng data(4);
  std::vector<std::vector<double>> x(10, std::vector<double>(2));
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x[i] = {data.uniform(), data.uniform()};
    y[i] = data.uniform();
  }
  std::vector<double> y3(y);
  for (auto& v : y3) v *= 3.0;
  Rng r1(5), r2(5);
  EXPECT_EQ(ucb_select(GaussianProcess::fit(x, y, SeKernel{}), full_region(space), space, 0.0, 256, r1, 1),
            ucb_select(GaussianProcess::fit(x, y3, SeKernel{}), full_region(space), space, 0.0, 256, r2, 1));
}

TEST(GboSampler, RandomUntilInitThenConstrained) {
  const auto space = table_space();
  GboParams params;
  params.init_iterations = 5;
  params.candidate_count = 64;
  GboSampler g(space, params, SeKernel{}, 11);
  std::optional<Feedback> last;
  for (int i = 0; i < 40; ++i) {
    const auto scene = *g.next(last);
    ASSERT_TRUE(validate_scene(scene, space).ok());
    EXPECT_EQ(g.training_size(), static_cast<std::size_t>(i));
    if (i <= 5) {
      EXPECT_EQ(g.reference().has_value(), i == 5) << i;
    } else {
      ASSERT_TRUE(g.reference());
      EXPECT_EQ(*g.reference(), last->scene);
      EXPECT_TRUE(within_step_constraints(last->scene, scene, space));
    }
    last = Feedback{scene, scene.values[1] / 100.0};
  }
}

TEST(GboSampler, WarmStartSkipsRandomPhase) {
  const auto space = table_space();
  Rng rng(21);
  std::vector<Feedback> warm;
  for (int i = 0; i < 50; ++i) {
    const auto s = sample_random(rng, space);
    warm.push_back({s, s.values[2] / 90.0});
  }
  const Scene last_warm = warm.back().scene;
  GboParams params;
  params.init_iterations = 10;
  params.candidate_count = 64;
  GboSampler g(space, params, SeKernel{}, 3, warm);
  EXPECT_EQ(g.training_size(), 50u);
  const auto first = *g.next({});
  ASSERT_TRUE(g.reference());
  EXPECT_EQ(*g.reference(), last_warm);
  EXPECT_TRUE(within_step_constraints(last_warm, first, space));

  std::vector<Feedback> bad{{Scene{0, {1, 2}}, 0.1}};
  EXPECT_THROW(GboSampler(space, params, SeKernel{}, 3, bad), std::invalid_argument);
}

TEST(GboSampler, Deterministic) {
  const auto space = table_space();
  SamplerConfig cfg;
  cfg.kind = SamplerKind::kGbo;
  cfg.gbo.candidate_count = 32;
  const auto risk = [](const Scene& s) { return s.values[1] / 100.0 + s.values[5]; };
  auto a = make_sampler(cfg, space, 77, 0.65);
  auto b = make_sampler(cfg, space, 77, 0.65);
  EXPECT_EQ(drive(*a, 40, risk), drive(*b, 40, risk));
  EXPECT_EQ(a->kind(), SamplerKind::kGbo);
}

TEST(MakeSampler, KindsAndValidation) {
  const auto space = table_space();
  for (auto kind : {SamplerKind::kRandom, SamplerKind::kGrid, SamplerKind::kHalton, SamplerKind::kRns,
                    SamplerKind::kGbo}) {
    SamplerConfig cfg;
    cfg.kind = kind;
    EXPECT_EQ(make_sampler(cfg, space, 0, 0.65)->kind(), kind);
  }
  SamplerConfig bad;
  bad.kind = SamplerKind::kGbo;
  bad.gbo.beta = -1;
  EXPECT_THROW(make_sampler(bad, space, 0, 0.65), std::invalid_argument);
}

}  // namespace
}  // namespace riskscene
