// Calibration sweeps behind the frozen constants: scenario difficulty under
// the gap-following player, and the scripted designer's gain.
//
//   tune_heuristics scenarios          difficulty tables (50 episodes each)
//   tune_heuristics gain [k:boost ...]      closed loop on every scenario per setting
//   tune_heuristics trajectory <scenario> [k:boost]  per-iteration view of 5 trials
#include "flapdesign/agents.hpp"
#include "flapdesign/loop.hpp"
#include "flapdesign/stats.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <thread>

using namespace flapdesign;

namespace {

struct ControllerSetting {
    double gain = kScriptedGain;
    double boost = kScriptedSaturationBoost;
};

const int kJobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

// Root seed of the closed-loop runs (TUNE_SEED overrides the acceptance seed).
std::uint64_t root_seed() {
    const char* s = std::getenv("TUNE_SEED");
    return s ? std::strtoull(s, nullptr, 10) : 1;
}

void difficulty_row(const char* name, const GameConfig& cfg, const PolicyFn& policy) {
    const auto traces = run_batch(cfg, policy, 50, 1000, {false, false}, kJobs);
    std::vector<double> scores;
    std::map<std::string, int> ends;
    for (const auto& t : traces) {
        scores.push_back(t.score);
        ++ends[std::string(to_string(t.termination))];
    }
    std::printf("%-26s iqm=%6.2f ", name, iqm(scores));
    for (const auto& [k, v] : ends) std::printf(" %s=%d", k.c_str(), v);
    std::printf("\n");
}

void scenarios() {
    const PolicyFn gap = make_policy(PolicyKind::heuristic_gap);
    const PolicyFn lidar = make_policy(PolicyKind::heuristic_lidar);
    char name[64];
    difficulty_row("default (gap)", default_config(), gap);
    difficulty_row("default (lidar)", default_config(), lidar);
    for (int v = -5; v >= -13; --v) {
        GameConfig c = default_config();
        c.speed.pipe_vel_x = v;
        std::snprintf(name, sizeof name, "pipe_vel_x %d", v);
        difficulty_row(name, c, gap);
    }
    for (int g = 60; g <= 110; g += 5) {
        GameConfig c = default_config();
        c.dimensions.pipe.min_gap = g;
        c.dimensions.pipe.max_gap = g + 20;
        std::snprintf(name, sizeof name, "gap %d-%d", g, g + 20);
        difficulty_row(name, c, gap);
    }
    for (int sp = 300; sp <= 900; sp += 150) {
        GameConfig c = default_config();
        c.dimensions.pipe.min_horizontal_spacing = sp;
        c.dimensions.pipe.max_horizontal_spacing = sp + 150;
        std::snprintf(name, sizeof name, "spacing %d-%d", sp, sp + 150);
        difficulty_row(name, c, gap);
    }
    for (Scenario s : kAllScenarios) {
        std::snprintf(name, sizeof name, "scenario %s", std::string(to_string(s)).c_str());
        difficulty_row(name, broken_config(s), gap);
    }
}

void gain_sweep(const std::vector<ControllerSetting>& settings) {
    const PolicyFn policy = make_policy(PolicyKind::heuristic_gap);
    TrialOptions opts;
    opts.record_telemetry = false;
    opts.render_strips = false;
    opts.jobs = kJobs;
    for (auto [k, boost] : settings) {
        std::printf("gain %.2f boost %.2f\n", k, boost);
        int hits = 0;
        for (Scenario s : kAllScenarios) {
            std::vector<double> pooled;
            std::string finals;
            for (int t = 0; t < 5; ++t) {
                ScriptedDesigner designer(kDefaultTargetScore, k, boost);
                TrialRecord meta;
                meta.seed_base = trial_seed_base(root_seed(), t);
                TrialRecord rec = run_trial(broken_config(s), designer, policy, meta, opts);
                TrialRecord last = rec;
                last.iterations = {rec.iterations.back()};
                const auto scores = reevaluate(last, kReevalEpisodes, policy, kJobs);
                pooled.insert(pooled.end(), scores[0].begin(), scores[0].end());
                const auto& p = rec.iterations.back().config;
                char buf[96];
                std::snprintf(buf, sizeof buf, " [v%d g%d-%d]", p.speed.pipe_vel_x, p.dimensions.pipe.min_gap,
                              p.dimensions.pipe.max_gap);
                finals += buf;
            }
            const double final_iqm = iqm(pooled);
            if (final_iqm >= 8.0 && final_iqm <= 12.0) ++hits;
            std::printf("  %-15s final iqm=%6.2f%s\n", std::string(to_string(s)).c_str(), final_iqm, finals.c_str());
        }
        std::printf("  scenarios in [8,12]: %d/5\n", hits);
    }
}

// "gain[:boost]"
ControllerSetting parse_setting(const std::string& arg) {
    ControllerSetting s;
    std::istringstream in(arg);
    std::string field;
    if (std::getline(in, field, ':')) s.gain = std::stod(field);
    if (std::getline(in, field, ':')) s.boost = std::stod(field);
    return s;
}

void trajectory(Scenario s, ControllerSetting setting) {
    const PolicyFn policy = make_policy(PolicyKind::heuristic_gap);
    TrialOptions opts;
    opts.record_telemetry = false;
    opts.render_strips = false;
    opts.jobs = kJobs;
    for (int t = 0; t < 5; ++t) {
        ScriptedDesigner designer(kDefaultTargetScore, setting.gain, setting.boost);
        TrialRecord meta;
        meta.seed_base = trial_seed_base(root_seed(), t);
        const TrialRecord rec = run_trial(broken_config(s), designer, policy, meta, opts);
        const auto reeval = reevaluate(rec, kReevalEpisodes, policy, kJobs);
        std::printf("trial %d\n", t);
        for (const auto& it : rec.iterations) {
            std::vector<double> shown;
            for (const auto& tr : it.traces) shown.push_back(tr.score);
            const std::vector<double> fresh(reeval[it.index].begin(), reeval[it.index].end());
            const auto& p = it.config.dimensions.pipe;
            std::printf("  iter %d v%d gap %d-%d spacing %d-%d  shown iqm %5.2f  reeval iqm %5.2f\n", it.index,
                        it.config.speed.pipe_vel_x, p.min_gap, p.max_gap, p.min_horizontal_spacing,
                        p.max_horizontal_spacing, iqm(shown), iqm(fresh));
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "scenarios";
    if (mode == "scenarios") {
        scenarios();
    } else if (mode == "gain") {
        std::vector<ControllerSetting> settings;
        for (int i = 2; i < argc; ++i) settings.push_back(parse_setting(argv[i]));
        if (settings.empty()) settings = {ControllerSetting{}};
        gain_sweep(settings);
    } else if (mode == "trajectory" && argc > 2 && scenario_from_string(argv[2])) {
        trajectory(*scenario_from_string(argv[2]),
                   argc > 3 ? parse_setting(argv[3]) : ControllerSetting{});
    } else {
        std::fprintf(stderr, "usage: tune_heuristics scenarios | gain [k:boost ...] |"
                             " trajectory <scenario> [k:boost]\n");
        return 2;
    }
    return 0;
}
