#include "flapdesign/agents.hpp"
#include "flapdesign/sim.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flapdesign;
using namespace flapdesign::testing;

TEST(Sim, FlapThenIdleVelocityOracle) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 3);
    advance(s, cfg, Action::flap);
    std::vector<int> vel{s.player_vel_y};
    while (!s.terminated) {
        advance(s, cfg, Action::idle);
        vel.push_back(s.player_vel_y);
    }
    ASSERT_GE(vel.size(), 21u);
    for (int k = 0; k < 20; ++k) EXPECT_EQ(vel[static_cast<std::size_t>(k)], -9 + k) << "tick " << k + 1;
    for (std::size_t k = 20; k < vel.size(); ++k) EXPECT_EQ(vel[k], 10) << "tick " << k + 1;
}

TEST(Sim, AlwaysIdleHitsTheGroundScoringZero) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 5);
    while (!s.terminated) advance(s, cfg, Action::idle);
    EXPECT_EQ(*s.terminated, TerminationReason::collision);
    EXPECT_EQ(s.score, 0);
    EXPECT_GE(player_rect(s.player_y, cfg).bottom, ground_y(cfg));
    EXPECT_THROW(advance(s, cfg, Action::idle), AlreadyTerminated);
}

TEST(Sim, CeilingClampsWithoutKilling) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 1);
    for (int i = 0; i < 30; ++i) advance(s, cfg, Action::flap);
    EXPECT_EQ(s.player_y, 0);
    EXPECT_FALSE(s.terminated);
}

TEST(Sim, ResetRejectsInvalidConfig) {
    GameConfig bad = default_config();
    bad.dimensions.pipe.min_gap = 500;
    EXPECT_THROW(reset(bad, 1), InvalidConfig);
}

TEST(Sim, PipesSpawnInsideConfiguredRanges) {
    GameConfig cfg = default_config();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GameState s = reset(cfg, seed);
        for (int t = 0; t < 600 && !s.terminated; ++t) {
            for (const auto& p : s.pipes) {
                EXPECT_GE(p.gap_size, cfg.dimensions.pipe.min_gap);
                EXPECT_LE(p.gap_size, cfg.dimensions.pipe.max_gap);
                EXPECT_GE(p.gap_bottom_y, cfg.dimensions.pipe.min_gap_distance);
                EXPECT_LE(p.gap_bottom_y, cfg.dimensions.pipe.max_gap_distance);
            }
            for (std::size_t i = 1; i < s.pipes.size(); ++i) {
                const int dx = s.pipes[i].x - s.pipes[i - 1].x;
                EXPECT_GE(dx, cfg.dimensions.pipe.min_horizontal_spacing);
                EXPECT_LE(dx, cfg.dimensions.pipe.max_horizontal_spacing);
            }
            advance(s, cfg, heuristic_gap_policy(s, cfg));
        }
    }
}

TEST(Sim, DeterministicTraces) {
    std::mt19937_64 rng(99);
    const std::array<PolicyKind, 3> kinds{PolicyKind::heuristic_gap, PolicyKind::heuristic_lidar,
                                          PolicyKind::always_idle};
    for (int i = 0; i < 20; ++i) {
        GameConfig cfg = default_config();
        cfg.speed.pipe_vel_x = -static_cast<int>(3 + rng() % 8);
        cfg.dimensions.pipe.min_gap = static_cast<int>(70 + rng() % 60);
        cfg.dimensions.pipe.max_gap = cfg.dimensions.pipe.min_gap + static_cast<int>(rng() % 40);
        const PolicyFn policy = make_policy(kinds[rng() % kinds.size()]);
        const std::uint64_t seed = rng();
        const EpisodeTrace a = run_episode(cfg, policy, seed);
        const EpisodeTrace b = run_episode(cfg, policy, seed);
        EXPECT_EQ(a, b);
        EXPECT_EQ(telemetry_to_jsonl(a.telemetry), telemetry_to_jsonl(b.telemetry));
    }
}

TEST(Sim, TerminationReasonsAndCaps) {
    const GameConfig cfg = default_config();
    const EpisodeTrace t = run_episode(cfg, make_policy(PolicyKind::heuristic_gap), 1);
    EXPECT_EQ(t.termination, TerminationReason::max_score_30);
    EXPECT_EQ(t.score, kMaxScore);
    EXPECT_LE(t.ticks, kMaxTicks);
    EXPECT_DOUBLE_EQ(t.duration_s, t.ticks / 30.0);

    GameConfig sparse = default_config();
    sparse.dimensions.pipe.min_horizontal_spacing = 900;
    sparse.dimensions.pipe.max_horizontal_spacing = 1000;
    const EpisodeTrace slow = run_episode(sparse, make_policy(PolicyKind::heuristic_gap), 1);
    EXPECT_EQ(slow.termination, TerminationReason::timeout_120s);
    EXPECT_EQ(slow.ticks, kMaxTicks);
    EXPECT_LT(slow.score, kMaxScore);
}

TEST(Sim, TelemetryAndFrames) {
    const GameConfig cfg = default_config();
    const EpisodeTrace t = run_episode(cfg, make_policy(PolicyKind::heuristic_gap), 4);
    ASSERT_EQ(static_cast<int>(t.telemetry.size()), t.ticks);
    EXPECT_EQ(t.telemetry.front().tick, 1);
    EXPECT_EQ(t.telemetry.back().score, t.score);
    ASSERT_EQ(static_cast<int>(t.frames.size()), kStripFrames);
    for (std::size_t j = 0; j < t.frames.size(); ++j) {
        EXPECT_EQ(t.frames[j].tick, t.ticks - 240 + 10 * static_cast<int>(j));
        EXPECT_EQ(t.frames[j].state.tick, t.frames[j].tick);
    }
    const EpisodeTrace bare = run_episode(cfg, make_policy(PolicyKind::heuristic_gap), 4, {false, false});
    EXPECT_TRUE(bare.telemetry.empty());
    EXPECT_TRUE(bare.frames.empty());
    EXPECT_EQ(bare.score, t.score);
    EXPECT_EQ(bare.ticks, t.ticks);
}

TEST(Sim, ShortEpisodesKeepOnlyExistingFrames) {
    const GameConfig cfg = default_config();
    const EpisodeTrace t = run_episode(cfg, make_policy(PolicyKind::always_idle), 2);
    ASSERT_LT(t.ticks, 240);
    ASSERT_FALSE(t.frames.empty());
    EXPECT_GE(t.frames.front().tick, 0);
    EXPECT_LT(t.frames.front().tick, 10);
    EXPECT_EQ(t.frames.back().tick, t.ticks);
}

TEST(Sim, LidarGeometry) {
    EXPECT_DOUBLE_EQ(lidar_ray_angle_deg(0), -90.0);
    EXPECT_DOUBLE_EQ(lidar_ray_angle_deg(kLidarRays - 1), 90.0);
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 1);
    s.pipes.clear();
    const Observation obs = lidar_scan(s, cfg);
    ASSERT_EQ(obs.lidar_distances.size(), static_cast<std::size_t>(kLidarRays));
    const double centre_y = s.player_y + cfg.dimensions.player.height / 2.0;
    EXPECT_NEAR(obs.lidar_distances.front(), std::min(200.0, centre_y), 1e-9);
    EXPECT_NEAR(obs.lidar_distances.back(), std::min(200.0, ground_y(cfg) - centre_y), 1e-9);
    for (double d : obs.lidar_distances) {
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 200.0);
    }
}

TEST(Sim, LidarSeesAPipeAhead) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 1);
    s.pipes = {Pipe{kPlayerX + cfg.dimensions.player.width + 50, 0, 100, false}};
    // Gap starts at the ground, so the forward ray hits the upper pipe body.
    s.player_y = 100;
    const Observation obs = lidar_scan(s, cfg);
    EXPECT_NEAR(obs.lidar_distances[kLidarRays / 2], 50.0 + cfg.dimensions.player.width / 2.0, 1.0);
}

TEST(Sim, EpisodeRuntimeBudget) {
    GameConfig cfg = default_config();
    cfg.dimensions.pipe.min_horizontal_spacing = 900;
    cfg.dimensions.pipe.max_horizontal_spacing = 1000;
    const auto start = std::chrono::steady_clock::now();
    const EpisodeTrace t = run_episode(cfg, make_policy(PolicyKind::heuristic_lidar), 9);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(secs, 0.1);
    (void)t;
}
