#include "flapdesign/agents.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace flapdesign {

std::string_view to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::heuristic_gap: return "heuristic_gap";
        case PolicyKind::heuristic_lidar: return "heuristic_lidar";
        case PolicyKind::always_idle: return "always_idle";
        case PolicyKind::external: return "external";
    }
    return "unknown";
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view s) {
    for (auto k : {PolicyKind::heuristic_gap, PolicyKind::heuristic_lidar, PolicyKind::always_idle,
                   PolicyKind::external}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

Action heuristic_gap_policy(const GameState& state, const GameConfig& cfg) {
    const auto& phys = cfg.speed.player;
    const int half_h = cfg.dimensions.player.height / 2;
    const int center = state.player_y + half_h;
    const double sight = kPlayerX + cfg.dimensions.player.width / 2.0 + cfg.dimensions.lidar.max_distance;

    // With no unscored pipe within sensing range, climb: the ceiling is safe.
    int target = center - kGapPolicyMargin;
    for (const auto& p : state.pipes) {
        if (p.scored) continue;
        if (p.x <= sight) target = ground_y(cfg) - p.gap_bottom_y - p.gap_size / 2;
        break;
    }
    const int next_vel = std::clamp(state.player_vel_y + phys.acc_y, phys.min_vel_y, phys.max_vel_y);
    const int projected_center = center + next_vel;
    return projected_center > target + kGapPolicyMargin ? Action::flap : Action::idle;
}

Action heuristic_lidar_policy(const Observation& obs) {
    // Vertical clearance below the player along each ray of the downward cone.
    double clearance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < obs.lidar_distances.size(); ++i) {
        const double deg = lidar_ray_angle_deg(static_cast<int>(i));
        if (deg < kLidarConeMinDeg) continue;
        clearance = std::min(clearance, obs.lidar_distances[i] * std::sin(deg * std::numbers::pi / 180.0));
    }
    const double descent = std::max(0, obs.player_vel_y);
    return clearance < kLidarBaseThreshold + kLidarSpeedGain * descent ? Action::flap : Action::idle;
}

Action always_idle_policy(const GameState&, const GameConfig&) { return Action::idle; }

// ---------------------------------------------------------------------------
// External player protocol

std::string observation_to_json_line(const Observation& obs) {
    nlohmann::ordered_json j;
    j["lidar"] = obs.lidar_distances;
    j["vel_y"] = obs.player_vel_y;
    return j.dump() + "\n";
}

Observation observation_from_json_line(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        Observation obs;
        obs.lidar_distances = j.at("lidar").get<std::vector<double>>();
        obs.player_vel_y = j.at("vel_y").get<int>();
        return obs;
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("bad observation line: ") + e.what());
    }
}

Action parse_action_token(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (auto a = action_from_string(line)) return *a;
    if (line == "1") return Action::flap;
    if (line == "0") return Action::idle;
    throw ProtocolError("unrecognised action token '" + std::string(line) + "'");
}

ExternalPolicy::ExternalPolicy(const std::string& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0) throw ProtocolError("pipe() failed");
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw ProtocolError("pipe() failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw ProtocolError("fork() failed");
    if (pid_ == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    std::signal(SIGPIPE, SIG_IGN);
}

ExternalPolicy::~ExternalPolicy() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
}

std::string ExternalPolicy::read_line() {
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[256];
        const ssize_t got = ::read(from_child_, chunk, sizeof chunk);
        if (got < 0 && errno == EINTR) continue;
        if (got <= 0) throw ProtocolError("external policy closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(got));
    }
}

Action ExternalPolicy::act(const Observation& obs) {
    const std::string line = observation_to_json_line(obs);
    std::size_t off = 0;
    while (off < line.size()) {
        const ssize_t put = ::write(to_child_, line.data() + off, line.size() - off);
        if (put < 0 && errno == EINTR) continue;
        if (put <= 0) throw ProtocolError("external policy closed its input");
        off += static_cast<std::size_t>(put);
    }
    return parse_action_token(read_line());
}

// ---------------------------------------------------------------------------

PolicyFn make_policy(PolicyKind kind, const std::string& external_command) {
    switch (kind) {
        case PolicyKind::heuristic_gap:
            return heuristic_gap_policy;
        case PolicyKind::heuristic_lidar:
            return [](const GameState& s, const GameConfig& c) { return heuristic_lidar_policy(lidar_scan(s, c)); };
        case PolicyKind::always_idle:
            return always_idle_policy;
        case PolicyKind::external: {
            if (external_command.empty()) throw std::invalid_argument("external policy needs a command");
            auto proc = std::make_shared<ExternalPolicy>(external_command);
            return [proc](const GameState& s, const GameConfig& c) { return proc->act(lidar_scan(s, c)); };
        }
    }
    throw std::invalid_argument("unknown policy kind");
}

bool policy_is_reentrant(PolicyKind kind) { return kind != PolicyKind::external; }

std::vector<EpisodeTrace> run_batch(const GameConfig& cfg, const PolicyFn& policy, int n,
                                    std::uint64_t seed_base, const EpisodeOptions& opts, int jobs) {
    if (n < 1) throw std::invalid_argument("run_batch: n must be >= 1");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) seeds[static_cast<std::size_t>(k)] = seed_base + static_cast<std::uint64_t>(k);
    return run_seeds(cfg, policy, seeds, opts, jobs);
}

std::vector<EpisodeTrace> run_seeds(const GameConfig& cfg, const PolicyFn& policy,
                                    std::span<const std::uint64_t> seeds, const EpisodeOptions& opts,
                                    int jobs) {
    auto report = validate_config(cfg);
    if (!report.valid()) throw InvalidConfig(std::move(report));

    std::vector<EpisodeTrace> out(seeds.size());
    const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(seeds.size())));
    if (workers <= 1) {
        for (std::size_t k = 0; k < seeds.size(); ++k) out[k] = run_episode(cfg, policy, seeds[k], opts);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < seeds.size(); k = next++) {
                try {
                    out[k] = run_episode(cfg, policy, seeds[k], opts);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace flapdesign
