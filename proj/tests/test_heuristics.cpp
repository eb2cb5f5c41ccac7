#include "support.hpp"

#include <gtest/gtest.h>

using namespace tentanav;

namespace {

OccupancyBins bins_with_first(std::size_t n, std::optional<std::size_t> first)
{
  OccupancyBins b;
  b.counts.assign(n, 0);
  if (first) b.counts[*first] = 3;
  b.total_weight = 1.0;
  return b;
}

OnlineParams crash_half()
{
  OnlineParams p;
  p.alpha_crash = 2.0;
  return p;
}

HeuristicScores scored(Navigability nav, double clear, double clut, double close, double smo)
{
  HeuristicScores s;
  s.nav = nav;
  s.clear = clear;
  s.clut = clut;
  s.close = close;
  s.smo = smo;
  return s;
}

}  // namespace

TEST(Heuristics, EmptyGridGivesEmptyBins)
{
  OfflineParams p;
  p.grid_counts = {30, 20, 20};
  p.n_yaw = 3;
  p.n_pitch = 1;
  p.tentacle_length = 2.0;
  p.samples_per_tentacle = 8;
  const auto bank = TentacleBank::build(p);
  OccupancyGrid grid(bank.dims());
  const auto bins = bin_occupancy(bank.voxels(0), grid, 8);
  for (auto c : bins.counts) EXPECT_EQ(c, 0u);
  EXPECT_EQ(bins.occupied_weight, 0.0);
  EXPECT_NEAR(bins.total_weight, bank.total_weight(0), 1e-12);
}

TEST(Heuristics, OnePriorityVoxelFillsItsBin)
{
  const GridDims d{{8, 8, 8}, 0.5};
  OccupancyGrid grid(d);
  grid.accumulate(delinearize(100, d), 1.0);
  // Fifth sampling point is index 4.
  const std::vector<ClassifiedVoxel> vox{{100, 4, VoxelClass::priority, 1.0},
                                         {101, 4, VoxelClass::support, 0.2}};
  const auto bins = bin_occupancy(vox, grid, 10);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(bins.counts[k], k == 4 ? 1u : 0u);
  EXPECT_DOUBLE_EQ(bins.occupied_weight, 1.0);
  EXPECT_DOUBLE_EQ(bins.total_weight, 1.2);
}

TEST(Heuristics, SupportVoxelsDoNotFillBins)
{
  const GridDims d{{8, 8, 8}, 0.5};
  OccupancyGrid grid(d);
  grid.accumulate(delinearize(101, d), 1.0);
  const std::vector<ClassifiedVoxel> vox{{101, 2, VoxelClass::support, 0.2}};
  const auto bins = bin_occupancy(vox, grid, 5);
  for (auto c : bins.counts) EXPECT_EQ(c, 0u);
  EXPECT_DOUBLE_EQ(bins.occupied_weight, 0.2);
}

TEST(Heuristics, FullyOccupiedTentacle)
{
  OfflineParams p;
  p.grid_counts = {30, 20, 20};
  p.n_yaw = 1;
  p.n_pitch = 1;
  p.tentacle_length = 2.0;
  p.samples_per_tentacle = 8;
  const auto bank = TentacleBank::build(p);
  OccupancyGrid grid(bank.dims());
  for (const auto& v : bank.voxels(0)) grid.accumulate(delinearize(v.index, bank.dims()), 1.0);
  const auto bins = bin_occupancy(bank.voxels(0), grid, 8);
  EXPECT_NEAR(bins.occupied_weight, bins.total_weight, 1e-9);
  EXPECT_NEAR(clutter(bins), 1.0, 1e-12);
}

TEST(Heuristics, NavigabilityWorkedExamples)
{
  const auto clear = navigability(bins_with_first(30, std::nullopt), crash_half(), 10.0, 30);
  EXPECT_EQ(clear.label, Navigability::navigable);
  EXPECT_DOUBLE_EQ(clear.obstacle_distance, 10.0);

  // k_obs = 2 (1-based) is index 1.
  const auto close = navigability(bins_with_first(30, 1), crash_half(), 10.0, 30);
  EXPECT_EQ(close.label, Navigability::non_navigable);
  EXPECT_NEAR(close.obstacle_distance, 0.667, 1e-3);

  const auto far = navigability(bins_with_first(30, 19), crash_half(), 10.0, 30);
  EXPECT_EQ(far.label, Navigability::temporarily_navigable);
  EXPECT_NEAR(far.obstacle_distance, 6.67, 1e-2);
}

TEST(Heuristics, ObstacleExactlyAtCrashDistanceIsStillDrivable)
{
  // 15 of 30 samples at alpha 2 puts l_obs exactly on l / 2.
  const auto r = navigability(bins_with_first(30, 14), crash_half(), 10.0, 30);
  EXPECT_DOUBLE_EQ(r.obstacle_distance, 5.0);
  EXPECT_EQ(r.label, Navigability::temporarily_navigable);
}

TEST(Heuristics, ObstacleOnLastSampleLeavesFullLength)
{
  const auto r = navigability(bins_with_first(30, 29), crash_half(), 10.0, 30);
  EXPECT_EQ(r.label, Navigability::navigable);
  EXPECT_EQ(r.obstacle_distance, 10.0);
  EXPECT_EQ(r.first_occupied, 29u);
  EXPECT_EQ(clearance(r.obstacle_distance, 10.0), 0.0);
}

TEST(Heuristics, ErrorThresholdIgnoresSparseBins)
{
  OnlineParams p = crash_half();
  p.tau_d_err = 3.0;
  auto b = bins_with_first(30, 1);  // count 3, not above 3
  EXPECT_EQ(navigability(b, p, 10.0, 30).label, Navigability::navigable);
  b.counts[20] = 4;
  EXPECT_EQ(navigability(b, p, 10.0, 30).label, Navigability::temporarily_navigable);
}

TEST(Heuristics, NavigabilityMatchesOracleOnRandomBins)
{
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> n_dist(2, 40), c_dist(0, 3);
  std::uniform_real_distribution<double> a_dist(1.01, 10.0), l_dist(0.5, 20.0);
  std::bernoulli_distribution sparse(0.8);
  for (int i = 0; i < 2000; ++i) {
    const auto n = static_cast<std::size_t>(n_dist(rng));
    OccupancyBins b;
    for (std::size_t k = 0; k < n; ++k) b.counts.push_back(sparse(rng) ? 0 : c_dist(rng));
    OnlineParams p;
    p.alpha_crash = a_dist(rng);
    p.tau_d_err = c_dist(rng) % 2;
    const double l = l_dist(rng);
    const int want = oracle::navigability(b.counts, p.tau_d_err, l, p.alpha_crash);
    EXPECT_EQ(static_cast<int>(navigability(b, p, l, n).label), want);
  }
}

TEST(Heuristics, Clearance)
{
  EXPECT_EQ(clearance(10.0, 10.0), 0.0);
  EXPECT_EQ(clearance(0.0, 10.0), 1.0);
  EXPECT_NEAR(clearance(6.67, 10.0), 0.333, 1e-9);
}

TEST(Heuristics, ClutterFixture)
{
  OccupancyBins b;
  b.total_weight = 4.0;
  EXPECT_EQ(clutter(b), 0.0);
  b.occupied_weight = 4.0;
  EXPECT_EQ(clutter(b), 1.0);

  // Priority carries half of the total weight and is fully occupied.
  const GridDims d{{8, 8, 8}, 0.5};
  OccupancyGrid grid(d);
  grid.accumulate(delinearize(10, d), 1.0);
  grid.accumulate(delinearize(11, d), 1.0);
  const std::vector<ClassifiedVoxel> vox{{10, 0, VoxelClass::priority, 1.0},
                                         {11, 1, VoxelClass::priority, 1.0},
                                         {12, 1, VoxelClass::support, 0.5},
                                         {13, 1, VoxelClass::support, 0.5},
                                         {14, 1, VoxelClass::support, 1.0}};
  EXPECT_DOUBLE_EQ(clutter(bin_occupancy(vox, grid, 2)), 0.5);

  EXPECT_THROW(clutter(OccupancyBins{}), DegenerateBankError);
}

TEST(Heuristics, GoalCloseness)
{
  OfflineParams p;
  p.n_yaw = 1;
  p.n_pitch = 1;
  const Tentacle t = generate_tentacles(p)[0];
  EXPECT_NEAR(goal_closeness(t, Pose::Identity(), {20, 0, 0}, 29), 10.0, 1e-12);
  EXPECT_NEAR(goal_closeness(t, Pose::Identity(), {10, 0, 0}, 29), 0.0, 1e-12);
  // Rotated robot: the endpoint moves to (1, 10, 0).
  const Pose pose = make_pose({1, 0, 0}, std::numbers::pi / 2, 0);
  EXPECT_NEAR(goal_closeness(t, pose, {1, 10, 0}, 29), 0.0, 1e-9);
}

TEST(Heuristics, SmoothnessChord)
{
  const auto ts = generate_tentacles([] {
    OfflineParams p;
    p.n_yaw = 3;
    p.yaw_coverage = deg2rad(60);
    p.n_pitch = 1;
    return p;
  }());
  EXPECT_EQ(smoothness(ts[1], nullptr, 29), 0.0);
  EXPECT_EQ(smoothness(ts[1], &ts[1], 29), 0.0);
  EXPECT_NEAR(smoothness(ts[2], &ts[1], 29), 2 * 10 * std::sin(deg2rad(15)), 1e-9);
  EXPECT_NEAR(smoothness(ts[2], &ts[1], 29), 5.176, 1e-3);
}

TEST(Heuristics, DesignatedSample)
{
  OnlineParams p;
  EXPECT_EQ(designated_index(p, 30), 29u);
  p.designated_sample = 1;
  EXPECT_EQ(designated_index(p, 30), 0u);
  p.designated_sample = 15;
  EXPECT_EQ(designated_index(p, 30), 14u);
}

TEST(Heuristics, NormalizationMapsToUnitRange)
{
  std::vector<HeuristicScores> s(3);
  s[0].close_raw = 2;
  s[1].close_raw = 4;
  s[2].close_raw = 6;
  normalize(s);
  EXPECT_EQ(s[0].close, 0.0);
  EXPECT_EQ(s[1].close, 0.5);
  EXPECT_EQ(s[2].close, 1.0);
  // Smoothness is constant here.
  for (const auto& x : s) EXPECT_EQ(x.smo, 0.0);
}

TEST(Heuristics, SelectSingleNavigable)
{
  OnlineParams p;
  std::vector<HeuristicScores> s{scored(Navigability::non_navigable, 0, 0, 0, 0),
                                 scored(Navigability::temporarily_navigable, 1, 1, 1, 1),
                                 scored(Navigability::non_navigable, 0, 0, 0, 0)};
  EXPECT_EQ(select_best(s, p), 1u);
}

TEST(Heuristics, SelectBlocked)
{
  OnlineParams p;
  std::vector<HeuristicScores> s(4, scored(Navigability::non_navigable, 0, 0, 0, 0));
  EXPECT_FALSE(select_best(s, p));
  EXPECT_FALSE(select_best(std::span<const HeuristicScores>{}, p));
}

TEST(Heuristics, SelectHandComputedMinimum)
{
  OnlineParams p;
  p.lambda_clear = p.lambda_clut = p.lambda_close = p.lambda_smo = 1.0;
  // F = 1.6, 1.1, 1.3
  std::vector<HeuristicScores> s{scored(Navigability::navigable, 0.0, 0.3, 0.9, 0.4),
                                 scored(Navigability::temporarily_navigable, 0.4, 0.2, 0.3, 0.2),
                                 scored(Navigability::navigable, 0.0, 0.1, 0.2, 1.0)};
  EXPECT_EQ(select_best(s, p), 1u);
  for (auto& x : s) x.cost = cost(x, p);
  EXPECT_NEAR(s[0].cost, 1.6, 1e-12);
  EXPECT_NEAR(s[1].cost, 1.1, 1e-12);
  EXPECT_NEAR(s[2].cost, 1.3, 1e-12);
}

TEST(Heuristics, SelectTiesPreferPreviousThenLowestId)
{
  OnlineParams p;
  std::vector<HeuristicScores> s(3, scored(Navigability::navigable, 0.2, 0.2, 0.2, 0.2));
  EXPECT_EQ(select_best(s, p), 0u);
  EXPECT_EQ(select_best(s, p, 2), 2u);
}

TEST(Heuristics, SelectionIsScaleInvariantAndMatchesBruteForce)
{
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0), scale(0.01, 100.0);
  std::uniform_int_distribution<int> nav(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<HeuristicScores> s(12);
    for (auto& x : s) x = scored(static_cast<Navigability>(nav(rng)), u(rng), u(rng), u(rng), u(rng));
    OnlineParams p;
    p.lambda_clear = u(rng);
    p.lambda_clut = u(rng);
    p.lambda_close = u(rng);
    p.lambda_smo = u(rng) + 0.01;

    std::optional<std::size_t> want;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j].nav == Navigability::non_navigable) continue;
      const double f = p.lambda_clear * s[j].clear + p.lambda_clut * s[j].clut +
                       p.lambda_close * s[j].close + p.lambda_smo * s[j].smo;
      const double g = want ? p.lambda_clear * s[*want].clear + p.lambda_clut * s[*want].clut +
                                  p.lambda_close * s[*want].close + p.lambda_smo * s[*want].smo
                            : 0.0;
      if (!want || f < g) want = j;
    }
    const auto got = select_best(s, p);
    ASSERT_EQ(got, want);
    if (got) {
      EXPECT_NE(s[*got].nav, Navigability::non_navigable);
    }

    const double c = scale(rng);
    OnlineParams q = p;
    q.lambda_clear *= c;
    q.lambda_clut *= c;
    q.lambda_close *= c;
    q.lambda_smo *= c;
    EXPECT_EQ(select_best(s, q), got);
  }
}

TEST(Heuristics, PlanarTwoTentacleFixture)
{
  // Two planar tentacles, crash distance at the second sampling point. An
  // obstacle on the first sample of the left tentacle and another on the
  // fifth sample of the right one.
  OfflineParams p;
  p.voxel_dim = 0.1;
  p.grid_counts = {100, 60, 6};
  p.n_yaw = 2;
  p.n_pitch = 1;
  p.yaw_coverage = deg2rad(60);
  p.samples_per_tentacle = 8;
  p.tentacle_length = 4.0;
  p.tau_priority = 0.2;
  p.tau_support = 0.5;
  const auto bank = TentacleBank::build(p);
  const Tentacle& right = bank.tentacle(0);  // yaw -30
  const Tentacle& left = bank.tentacle(1);   // yaw +30
  ASSERT_LT(right.yaw, 0.0);
  ASSERT_GT(left.yaw, 0.0);

  OccupancyGrid grid(bank.dims());
  grid.accumulate(left.samples[0], 1.0);
  grid.accumulate(right.samples[4], 1.0);

  OnlineParams online;
  online.alpha_crash = 4.0;  // 4 m / 4 = 1 m = two samples
  const auto l = navigability(bin_occupancy(bank.voxels(1), grid, 8), online, 4.0, 8);
  const auto r = navigability(bin_occupancy(bank.voxels(0), grid, 8), online, 4.0, 8);
  EXPECT_EQ(l.label, Navigability::non_navigable);
  EXPECT_EQ(r.label, Navigability::temporarily_navigable);
  EXPECT_EQ(l.first_occupied, 0u);
  EXPECT_EQ(r.first_occupied, 4u);
}

TEST(Heuristics, ScorerRangesOnRandomGrids)
{
  OfflineParams p;
  p.voxel_dim = 0.25;
  p.grid_counts = {32, 20, 16};
  p.n_yaw = 5;
  p.n_pitch = 3;
  p.samples_per_tentacle = 12;
  p.tentacle_length = 3.5;
  const auto bank = TentacleBank::build(p);
  TentacleScorer scorer{&bank};
  OnlineParams online;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), belief(0.0, 1.0);
  std::uniform_int_distribution<int> npts(0, 200);
  std::vector<OccupancyBins> bins;
  std::vector<HeuristicScores> scores;
  OccupancyGrid grid(bank.dims());
  for (int g = 0; g < 200; ++g) {
    grid.clear();
    const int n = npts(rng);
    for (int i = 0; i < n; ++i) grid.accumulate({pos(rng), pos(rng), pos(rng) / 2}, belief(rng));
    scorer.occupancy(grid, bins);
    scorer.metrics(bins, online, Pose::Identity(), {pos(rng), pos(rng), 0}, std::nullopt, scores);
    for (const auto& s : scores) {
      EXPECT_GE(s.clear, 0.0);
      EXPECT_LE(s.clear, 1.0);
      EXPECT_GE(s.clut, 0.0);
      EXPECT_LE(s.clut, 1.0);
      EXPECT_EQ(s.nav == Navigability::navigable, s.clear == 0.0);
    }
    if (const auto best = select_best(scores, online)) {
      EXPECT_NE(scores[*best].nav, Navigability::non_navigable);
    }
  }
}
