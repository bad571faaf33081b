#include "flapdesign/agents.hpp"
#include "flapdesign/stats.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace flapdesign;
using namespace flapdesign::testing;

namespace {

double batch_iqm(const GameConfig& cfg, PolicyKind kind, int n = 50) {
    std::vector<double> scores;
    for (const auto& t : run_batch(cfg, make_policy(kind), n, 1000, {false, false})) scores.push_back(t.score);
    return iqm(scores);
}

}  // namespace

TEST(Agents, NamesRoundTrip) {
    for (auto k : {PolicyKind::heuristic_gap, PolicyKind::heuristic_lidar, PolicyKind::always_idle,
                   PolicyKind::external}) {
        EXPECT_EQ(policy_kind_from_string(to_string(k)), k);
    }
    EXPECT_FALSE(policy_kind_from_string("dqn"));
}

TEST(Agents, GapPlayerMastersTheDefaultGame) {
    EXPECT_EQ(batch_iqm(default_config(), PolicyKind::heuristic_gap), 30.0);
    EXPECT_GT(batch_iqm(default_config(), PolicyKind::heuristic_lidar), 10.0);
    EXPECT_EQ(batch_iqm(default_config(), PolicyKind::always_idle), 0.0);
}

TEST(Agents, ScenarioDifficultyUnderGapPlayer) {
    EXPECT_LT(batch_iqm(broken_config(Scenario::too_fast), PolicyKind::heuristic_gap), 2.0);
    EXPECT_LT(batch_iqm(broken_config(Scenario::too_tight_1), PolicyKind::heuristic_gap), 2.0);
    EXPECT_LT(batch_iqm(broken_config(Scenario::too_tight_2), PolicyKind::heuristic_gap), 2.0);
    EXPECT_GE(batch_iqm(broken_config(Scenario::too_easy), PolicyKind::heuristic_gap), 25.0);
    const auto easy = run_episode(broken_config(Scenario::too_easy), make_policy(PolicyKind::heuristic_gap), 1);
    EXPECT_EQ(easy.termination, TerminationReason::max_score_30);
    const auto spaced = run_episode(broken_config(Scenario::too_spaced_out), make_policy(PolicyKind::heuristic_gap), 1);
    EXPECT_EQ(spaced.termination, TerminationReason::timeout_120s);
}

TEST(Agents, GapPlayerClimbsWhenNoPipeIsInRange) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 1);
    s.pipes.clear();
    s.player_y = 300;
    EXPECT_EQ(heuristic_gap_policy(s, cfg), Action::flap);
    s.player_y = 5;
    s.player_vel_y = 0;
    EXPECT_EQ(heuristic_gap_policy(s, cfg), Action::flap);
    s.player_vel_y = -8;
    EXPECT_EQ(heuristic_gap_policy(s, cfg), Action::idle);
}

TEST(Agents, LidarPlayerFlapsOnlyWhenCloseBelow) {
    Observation far;
    far.lidar_distances.assign(kLidarRays, 200.0);
    EXPECT_EQ(heuristic_lidar_policy(far), Action::idle);
    Observation near = far;
    for (int i = kLidarRays / 2; i < kLidarRays; ++i) near.lidar_distances[static_cast<std::size_t>(i)] = 5.0;
    EXPECT_EQ(heuristic_lidar_policy(near), Action::flap);
}

TEST(Agents, ObservationLineProtocol) {
    Observation o;
    o.lidar_distances = {1.5, 200.0, 0.0};
    o.player_vel_y = -3;
    const std::string line = observation_to_json_line(o);
    EXPECT_EQ(line.back(), '\n');
    EXPECT_EQ(observation_from_json_line(line), o);
    EXPECT_THROW(observation_from_json_line("{\"lidar\": 3}"), ProtocolError);
    EXPECT_EQ(parse_action_token("flap\r"), Action::flap);
    EXPECT_EQ(parse_action_token(" idle "), Action::idle);
    EXPECT_EQ(parse_action_token("1"), Action::flap);
    EXPECT_EQ(parse_action_token("0"), Action::idle);
    EXPECT_THROW(parse_action_token("jump"), ProtocolError);
}

TEST(Agents, ExternalPolicyProcess) {
    const PolicyFn idle = make_policy(PolicyKind::external, "while read -r line; do echo idle; done");
    const EpisodeTrace ext = run_episode(default_config(), idle, 3);
    const EpisodeTrace ref = run_episode(default_config(), make_policy(PolicyKind::always_idle), 3);
    EXPECT_EQ(ext.ticks, ref.ticks);
    EXPECT_EQ(ext.score, 0);

    const PolicyFn broken = make_policy(PolicyKind::external, "read -r line; echo jump");
    EXPECT_THROW(run_episode(default_config(), broken, 3), ProtocolError);
    const PolicyFn quits = make_policy(PolicyKind::external, "true");
    EXPECT_THROW(run_episode(default_config(), quits, 3), ProtocolError);
    EXPECT_THROW(make_policy(PolicyKind::external, ""), std::invalid_argument);
}

TEST(Agents, BatchIsIndependentOfJobs) {
    const GameConfig cfg = broken_config(Scenario::too_tight_1);
    const PolicyFn p = make_policy(PolicyKind::heuristic_gap);
    const auto one = run_batch(cfg, p, 12, 77, {}, 1);
    const auto four = run_batch(cfg, p, 12, 77, {}, 4);
    EXPECT_EQ(one, four);
    ASSERT_EQ(one.size(), 12u);
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].seed, 77 + i);
    EXPECT_FALSE(policy_is_reentrant(PolicyKind::external));
    EXPECT_TRUE(policy_is_reentrant(PolicyKind::heuristic_gap));
}
