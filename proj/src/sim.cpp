#include "flapdesign/sim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flapdesign {

std::string_view to_string(Action a) { return a == Action::flap ? "flap" : "idle"; }

std::string_view to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::collision: return "collision";
        case TerminationReason::timeout_120s: return "timeout_120s";
        case TerminationReason::max_score_30: return "max_score_30";
    }
    return "unknown";
}

std::optional<Action> action_from_string(std::string_view s) {
    if (s == "flap") return Action::flap;
    if (s == "idle") return Action::idle;
    return std::nullopt;
}

std::optional<TerminationReason> termination_from_string(std::string_view s) {
    for (auto r : {TerminationReason::collision, TerminationReason::timeout_120s,
                   TerminationReason::max_score_30}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

InvalidConfig::InvalidConfig(ValidationReport report)
    : std::runtime_error("invalid game config: " + report.to_string()), report_(std::move(report)) {}

Rect upper_pipe_rect(const Pipe& p, const GameConfig& cfg) {
    const auto& pipe = cfg.dimensions.pipe;
    const int gap_top = ground_y(cfg) - p.gap_bottom_y - p.gap_size;
    return {p.x, gap_top - pipe.height, p.x + pipe.width, gap_top};
}

Rect lower_pipe_rect(const Pipe& p, const GameConfig& cfg) {
    const auto& pipe = cfg.dimensions.pipe;
    const int gap_bottom = ground_y(cfg) - p.gap_bottom_y;
    return {p.x, gap_bottom, p.x + pipe.width, gap_bottom + pipe.height};
}

Rect player_rect(int player_y, const GameConfig& cfg) {
    const auto& pl = cfg.dimensions.player;
    return {kPlayerX, player_y, kPlayerX + pl.width, player_y + pl.height};
}

namespace {

Pipe make_pipe(SplitMix64& rng, const GameConfig& cfg, int x) {
    const auto& pipe = cfg.dimensions.pipe;
    Pipe p;
    p.x = x;
    p.gap_size = rng.uniform_int(pipe.min_gap, pipe.max_gap);
    p.gap_bottom_y = rng.uniform_int(pipe.min_gap_distance, pipe.max_gap_distance);
    return p;
}

// Keeps a pipe at or beyond the right screen edge.
void ensure_coverage(GameState& s, const GameConfig& cfg) {
    const auto& pipe = cfg.dimensions.pipe;
    const int right_edge = cfg.dimensions.background.width;
    while (s.pipes.back().x < right_edge) {
        const int spacing = s.rng.uniform_int(pipe.min_horizontal_spacing, pipe.max_horizontal_spacing);
        s.pipes.push_back(make_pipe(s.rng, cfg, s.pipes.back().x + spacing));
    }
}

void require_valid(const GameConfig& cfg) {
    auto report = validate_config(cfg);
    if (!report.valid()) throw InvalidConfig(std::move(report));
}

}  // namespace

GameState reset(const GameConfig& cfg, std::uint64_t seed) {
    require_valid(cfg);
    GameState s;
    s.rng.state = seed;
    s.player_y = (cfg.playfield_height() - cfg.dimensions.player.height) / 2;
    s.min_player_y = s.player_y;
    s.pipes.push_back(make_pipe(s.rng, cfg, cfg.dimensions.background.width));
    ensure_coverage(s, cfg);
    return s;
}

void advance(GameState& s, const GameConfig& cfg, Action action) {
    if (s.terminated) throw AlreadyTerminated();
    const auto& phys = cfg.speed.player;

    if (action == Action::flap) {
        s.player_vel_y = phys.flap_acc;
        s.player_rot = kFlapRotation;
    } else {
        s.player_vel_y = std::clamp(s.player_vel_y + phys.acc_y, phys.min_vel_y, phys.max_vel_y);
        s.player_rot = std::max(s.player_rot - phys.vel_rot, kMinRotation);
    }
    s.player_y += s.player_vel_y;
    if (s.player_y < 0) {
        s.player_y = 0;
        s.player_vel_y = 0;
    }
    s.min_player_y = std::min(s.min_player_y, s.player_y);

    for (auto& p : s.pipes) p.x += cfg.speed.pipe_vel_x;
    const int pipe_w = cfg.dimensions.pipe.width;
    std::erase_if(s.pipes, [&](const Pipe& p) { return p.x + pipe_w < 0 && p.scored; });
    ensure_coverage(s, cfg);

    for (auto& p : s.pipes) {
        if (!p.scored && p.x + pipe_w < kPlayerX) {
            p.scored = true;
            ++s.score;
        }
    }
    ++s.tick;

    const Rect body = player_rect(s.player_y, cfg);
    bool hit = body.bottom > ground_y(cfg);
    for (const auto& p : s.pipes) {
        if (hit) break;
        hit = body.intersects(upper_pipe_rect(p, cfg)) || body.intersects(lower_pipe_rect(p, cfg));
    }
    if (hit) {
        s.terminated = TerminationReason::collision;
    } else if (s.score >= kMaxScore) {
        s.terminated = TerminationReason::max_score_30;
    } else if (s.tick >= kMaxTicks) {
        s.terminated = TerminationReason::timeout_120s;
    }
}

// ---------------------------------------------------------------------------
// Lidar

double lidar_ray_angle_deg(int i) {
    return -90.0 + 180.0 * static_cast<double>(i) / static_cast<double>(kLidarRays - 1);
}

namespace {

// Entry distance of a ray into a rectangle (slab method); infinity on a miss.
double ray_rect(double ox, double oy, double dx, double dy, const Rect& r) {
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    auto slab = [&](double o, double d, double lo, double hi) {
        if (std::abs(d) < 1e-12) return o >= lo && o <= hi;
        double a = (lo - o) / d;
        double b = (hi - o) / d;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
        return t0 <= t1;
    };
    if (!slab(ox, dx, r.left, r.right)) return std::numeric_limits<double>::infinity();
    if (!slab(oy, dy, r.top, r.bottom)) return std::numeric_limits<double>::infinity();
    return t0;
}

}  // namespace

Observation lidar_scan(const GameState& state, const GameConfig& cfg) {
    const double max_d = cfg.dimensions.lidar.max_distance;
    const double ox = kPlayerX + cfg.dimensions.player.width / 2.0;
    const double oy = state.player_y + cfg.dimensions.player.height / 2.0;
    const double floor_y = ground_y(cfg);

    std::vector<Rect> obstacles;
    obstacles.reserve(state.pipes.size() * 2);
    for (const auto& p : state.pipes) {
        // Pipes entirely behind the origin or beyond range cannot be hit.
        if (p.x + cfg.dimensions.pipe.width < ox || p.x > ox + max_d) continue;
        obstacles.push_back(upper_pipe_rect(p, cfg));
        obstacles.push_back(lower_pipe_rect(p, cfg));
    }

    Observation obs;
    obs.player_vel_y = state.player_vel_y;
    obs.lidar_distances.resize(kLidarRays);
    for (int i = 0; i < kLidarRays; ++i) {
        const double a = lidar_ray_angle_deg(i) * std::numbers::pi / 180.0;
        const double dx = std::cos(a);
        const double dy = std::sin(a);
        double best = max_d;
        if (dy < -1e-12) best = std::min(best, oy / -dy);
        if (dy > 1e-12) best = std::min(best, (floor_y - oy) / dy);
        for (const auto& r : obstacles) best = std::min(best, ray_rect(ox, oy, dx, dy, r));
        obs.lidar_distances[static_cast<std::size_t>(i)] = std::clamp(best, 0.0, max_d);
    }
    return obs;
}

// ---------------------------------------------------------------------------
// Episodes

EpisodeTrace run_episode(const GameConfig& cfg, const PolicyFn& policy, std::uint64_t seed,
                         const EpisodeOptions& opts) {
    GameState s = reset(cfg, seed);

    constexpr int kRing = kStripWindowTicks + 1;
    std::vector<GameState> ring;
    if (opts.record_frames) {
        ring.resize(kRing);
        ring[0] = s;
    }

    EpisodeTrace trace;
    trace.seed = seed;
    trace.episode_id = "seed_" + std::to_string(seed);
    if (opts.record_telemetry) trace.telemetry.reserve(1024);

    while (!s.terminated) {
        const Action a = policy(s, cfg);
        advance(s, cfg, a);
        if (opts.record_telemetry) {
            trace.telemetry.push_back({s.tick, s.player_y, s.player_vel_y, s.score, a});
        }
        if (opts.record_frames) ring[static_cast<std::size_t>(s.tick % kRing)] = s;
    }

    trace.score = s.score;
    trace.ticks = s.tick;
    trace.duration_s = static_cast<double>(s.tick) / kTicksPerSecond;
    trace.termination = *s.terminated;
    trace.max_height = ground_y(cfg) - s.min_player_y;
    if (opts.record_frames) {
        for (int t = s.tick - kStripWindowTicks; t <= s.tick; t += kStripStrideTicks) {
            if (t < 0) continue;
            trace.frames.push_back({t, ring[static_cast<std::size_t>(t % kRing)]});
        }
    }
    return trace;
}

std::string telemetry_to_jsonl(const std::vector<TelemetryRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["tick"] = r.tick;
        j["y"] = r.y;
        j["vel"] = r.vel;
        j["score"] = r.score;
        j["action"] = std::string(to_string(r.action));
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace flapdesign
