#pragma once

#include "flapdesign/config.hpp"
#include "flapdesign/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flapdesign {

inline constexpr int kTicksPerSecond = 30;
inline constexpr int kMaxTicks = 120 * kTicksPerSecond;
inline constexpr int kMaxScore = 30;
inline constexpr int kPlayerX = 57;
inline constexpr int kLidarRays = 180;
inline constexpr int kFlapRotation = 45;
inline constexpr int kMinRotation = -90;

enum class Action { idle, flap };
enum class TerminationReason { collision, timeout_120s, max_score_30 };

std::string_view to_string(Action a);
std::string_view to_string(TerminationReason r);
std::optional<Action> action_from_string(std::string_view s);
std::optional<TerminationReason> termination_from_string(std::string_view s);

struct Pipe {
    int x = 0;             // left edge, screen px
    int gap_bottom_y = 0;  // gap's lower edge, px above ground
    int gap_size = 0;
    bool scored = false;
    bool operator==(const Pipe&) const = default;
};

struct Rect {
    int left, top, right, bottom;  // half-open [left, right) x [top, bottom)
    bool intersects(const Rect& o) const {
        return left < o.right && o.left < right && top < o.bottom && o.top < bottom;
    }
};

/// Screen-space rectangles (y grows downward) of the upper and lower pipe bodies.
Rect upper_pipe_rect(const Pipe& p, const GameConfig& cfg);
Rect lower_pipe_rect(const Pipe& p, const GameConfig& cfg);
Rect player_rect(int player_y, const GameConfig& cfg);

/// Screen y of the ground surface; the player dies when its box reaches it.
inline int ground_y(const GameConfig& cfg) { return cfg.playfield_height(); }

struct GameState {
    int tick = 0;
    int player_y = 0;  // top edge of the player box, screen px
    int player_vel_y = 0;
    int player_rot = 0;
    std::vector<Pipe> pipes;  // sorted by x
    int score = 0;
    int min_player_y = 0;  // highest point reached (smallest screen y)
    SplitMix64 rng;
    std::optional<TerminationReason> terminated;
    bool operator==(const GameState&) const = default;
};

class InvalidConfig : public std::runtime_error {
public:
    explicit InvalidConfig(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

class AlreadyTerminated : public std::logic_error {
public:
    AlreadyTerminated() : std::logic_error("step() called on a terminated episode") {}
};

GameState reset(const GameConfig& cfg, std::uint64_t seed);

/// Advance one tick in place. `cfg` must be the config the state was reset with.
void advance(GameState& state, const GameConfig& cfg, Action action);

inline GameState step(GameState state, const GameConfig& cfg, Action action) {
    advance(state, cfg, action);
    return state;
}

struct Observation {
    std::vector<double> lidar_distances;  // kLidarRays entries, ray 0 straight up, last straight down
    int player_vel_y = 0;
    bool operator==(const Observation&) const = default;
};

/// Angle of ray `i` in degrees below horizontal-forward (-90 = up, +90 = down).
double lidar_ray_angle_deg(int i);

Observation lidar_scan(const GameState& state, const GameConfig& cfg);

// ---------------------------------------------------------------------------
// Episodes

using PolicyFn = std::function<Action(const GameState&, const GameConfig&)>;

struct TelemetryRecord {
    int tick = 0;
    int y = 0;
    int vel = 0;
    int score = 0;
    Action action = Action::idle;
    bool operator==(const TelemetryRecord&) const = default;
};

struct FrameSample {
    int tick = 0;
    GameState state;
    bool operator==(const FrameSample&) const = default;
};

inline constexpr int kStripWindowTicks = 8 * kTicksPerSecond;
inline constexpr int kStripStrideTicks = 10;
inline constexpr int kStripFrames = kStripWindowTicks / kStripStrideTicks + 1;

struct EpisodeTrace {
    std::string episode_id;
    std::uint64_t seed = 0;
    int score = 0;
    int ticks = 0;
    double duration_s = 0.0;
    TerminationReason termination = TerminationReason::collision;
    int max_height = 0;  // px above ground of the player's highest top edge
    std::vector<FrameSample> frames;  // states at ticks T-240, T-230, ..., T that exist
    std::vector<TelemetryRecord> telemetry;
    bool operator==(const EpisodeTrace&) const = default;
};

struct EpisodeOptions {
    bool record_telemetry = true;
    bool record_frames = true;
};

EpisodeTrace run_episode(const GameConfig& cfg, const PolicyFn& policy, std::uint64_t seed,
                         const EpisodeOptions& opts = {});

std::string telemetry_to_jsonl(const std::vector<TelemetryRecord>& records);

}  // namespace flapdesign
