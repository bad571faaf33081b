#pragma once

#include "flapdesign/sim.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flapdesign {

enum class PolicyKind { heuristic_gap, heuristic_lidar, always_idle, external };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> policy_kind_from_string(std::string_view s);

struct PolicyDescriptor {
    std::string name;
    PolicyKind kind = PolicyKind::heuristic_gap;
};

// Frozen tuning constants; scripts/tune_heuristics.cpp reproduces the sweeps.
inline constexpr int kGapPolicyMargin = 20;          // px below gap center before flapping
inline constexpr int kLidarConeMinDeg = 20;          // downward cone starts this far below forward
inline constexpr double kLidarBaseThreshold = 30.0;  // px of vertical clearance
inline constexpr double kLidarSpeedGain = 2.0;       // extra px per px/tick of descent

/// Privileged-state player. Targets the gap center of the next unscored pipe
/// once that pipe is within lidar range (climbing while none is), and flaps
/// iff the player's center one idle tick ahead would sit more than
/// kGapPolicyMargin below the target.
Action heuristic_gap_policy(const GameState& state, const GameConfig& cfg);

/// Flap iff the smallest vertical clearance seen by the downward ray cone is
/// below a threshold that grows with descent speed.
Action heuristic_lidar_policy(const Observation& obs);

Action always_idle_policy(const GameState& state, const GameConfig& cfg);

/// Line protocol for an out-of-process player: one Observation JSON object
/// per line out, one action token ("flap" / "idle") per line back.
std::string observation_to_json_line(const Observation& obs);
Observation observation_from_json_line(std::string_view line);
Action parse_action_token(std::string_view line);

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Drives an external player process over its stdin/stdout.
class ExternalPolicy {
public:
    explicit ExternalPolicy(const std::string& command);
    ~ExternalPolicy();
    ExternalPolicy(const ExternalPolicy&) = delete;
    ExternalPolicy& operator=(const ExternalPolicy&) = delete;

    Action act(const Observation& obs);

private:
    std::string read_line();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

/// Builds a callable policy. `external_command` is required for PolicyKind::external.
PolicyFn make_policy(PolicyKind kind, const std::string& external_command = {});

/// Whether episodes for this kind may be run concurrently.
bool policy_is_reentrant(PolicyKind kind);

/// Seeds seed_base .. seed_base+n-1, in seed order. `jobs` > 1 runs episodes
/// on worker threads; the result is independent of `jobs`.
std::vector<EpisodeTrace> run_batch(const GameConfig& cfg, const PolicyFn& policy, int n,
                                    std::uint64_t seed_base, const EpisodeOptions& opts = {},
                                    int jobs = 1);

std::vector<EpisodeTrace> run_seeds(const GameConfig& cfg, const PolicyFn& policy,
                                    std::span<const std::uint64_t> seeds, const EpisodeOptions& opts = {},
                                    int jobs = 1);

}  // namespace flapdesign
