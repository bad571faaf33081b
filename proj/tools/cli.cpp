#include "cli.hpp"

#include "flapdesign/agents.hpp"
#include "flapdesign/config.hpp"
#include "flapdesign/designer.hpp"
#include "flapdesign/loop.hpp"
#include "flapdesign/stats.hpp"
#include "flapdesign/traces.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace flapdesign::cli {

namespace fs = std::filesystem;

namespace {

/// Diagnostic that maps to exit code 1.
class RunFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Diagnostic that maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename T, std::size_t N>
std::vector<std::string> names(const std::array<T, N>& values) {
    std::vector<std::string> out;
    for (T v : values) out.emplace_back(to_string(v));
    return out;
}

/// Inverse of to_string over `values`; options are pre-checked with IsMember.
template <typename T, std::size_t N>
T from_name(const std::array<T, N>& values, const std::string& name) {
    for (T v : values) {
        if (to_string(v) == name) return v;
    }
    throw std::invalid_argument("unknown name " + name);
}

const std::array<PolicyKind, 4> kAllPolicies{PolicyKind::heuristic_gap, PolicyKind::heuristic_lidar,
                                             PolicyKind::always_idle, PolicyKind::external};
const std::array<DesignerKind, 3> kAllDesigners{DesignerKind::identity, DesignerKind::scripted, DesignerKind::llm};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void write_bytes(const fs::path& path, std::string_view data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RunFailure("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw RunFailure("short write to " + path.string());
}

PolicyFn policy_for(PolicyKind kind, const std::string& command) {
    if (kind == PolicyKind::external && command.empty()) {
        throw UsageError("--policy external needs --policy-command");
    }
    return make_policy(kind, command);
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
    std::string designer;
    std::vector<std::string> variants;
    std::vector<std::string> scenarios;
    std::string config_path;
    bool all = false;
    std::string policy = "heuristic_gap";
    std::string policy_command;
    int iterations = kDesignIterations;
    int episodes = kEpisodesPerIteration;
    int trials = 1;
    std::uint64_t seed = 0;
    std::string out = "exp";
    int jobs = 1;
    int target = kDefaultTargetScore;
    int reeval = 0;
    bool no_telemetry = false;
    bool strips = false;
    int image_scale = kDefaultImageScale;
    std::string endpoint = HttpSettings{}.endpoint;
    std::string model = LlmSettings{}.model;
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<int> max_tokens;
    int timeout_s = 120;
    int max_attempts = 3;
};

void add_run(CLI::App& app, RunArgs& a) {
    app.add_option("--designer", a.designer, "Designer: llm, scripted or identity")
        ->required()
        ->check(CLI::IsMember(names(kAllDesigners)));
    app.add_option("--variant", a.variants, "Prompt variant(s); default metrics_text (all four with --all)")
        ->check(CLI::IsMember(names(kAllVariants)));
    auto* scen = app.add_option("--scenario", a.scenarios, "Broken starting scenario(s)")
                     ->check(CLI::IsMember(names(kAllScenarios)));
    auto* cfg = app.add_option("--config", a.config_path, "Starting config YAML instead of a scenario")
                    ->check(CLI::ExistingFile);
    auto* all = app.add_flag("--all", a.all, "Every scenario (and every variant unless --variant is given)");
    scen->excludes(cfg);
    all->excludes(scen)->excludes(cfg);
    app.add_option("--policy", a.policy, "Player: heuristic_gap, heuristic_lidar, always_idle or external")
        ->check(CLI::IsMember(names(kAllPolicies)));
    app.add_option("--policy-command", a.policy_command, "Shell command of the external player");
    app.add_option("--iterations", a.iterations, "Design iterations (configs = iterations + 1)")
        ->check(CLI::Range(0, 1000));
    app.add_option("--episodes", a.episodes, "Episodes per iteration")->check(CLI::Range(1, kRecentEpisodes));
    app.add_option("--trials", a.trials, "Trials per cell")->check(CLI::Range(1, 1000));
    app.add_option("--seed", a.seed, "Root seed");
    app.add_option("--out", a.out, "Experiment root directory");
    app.add_option("--jobs", a.jobs, "Worker threads for episodes")->check(CLI::Range(1, 256));
    app.add_option("--target", a.target, "Target score of the scripted designer")->check(CLI::Range(1, kMaxScore));
    app.add_option("--reeval", a.reeval, "Re-evaluation episodes per config after each trial (0 = none)")
        ->check(CLI::Range(0, 100000));
    app.add_flag("--no-telemetry", a.no_telemetry, "Skip per-tick telemetry files");
    app.add_flag("--strips", a.strips, "Write strips for text variants too");
    app.add_option("--image-scale", a.image_scale, "Integer downscale factor of strip images")
        ->check(CLI::Range(1, 16));
    app.add_option("--endpoint", a.endpoint, "OpenAI-compatible base URL (POST <endpoint>/chat/completions)");
    app.add_option("--model", a.model, "Model name sent to the endpoint");
    app.add_option("--temperature", a.temperature, "Sampling temperature (omitted by default)");
    app.add_option("--top-p", a.top_p, "Nucleus sampling mass (omitted by default)");
    app.add_option("--max-tokens", a.max_tokens, "Completion token limit (omitted by default)");
    app.add_option("--timeout", a.timeout_s, "HTTP timeout in seconds")->check(CLI::Range(1, 3600));
    app.add_option("--max-attempts", a.max_attempts, "Designer attempts per iteration")->check(CLI::Range(1, 10));
}

int cmd_run(RunArgs a, std::ostream& out, std::ostream& err) {
    const DesignerKind designer = from_name(kAllDesigners, a.designer);
    const std::string api_key = designer == DesignerKind::llm ? api_key_from_env() : std::string();
    ExperimentOptions opts;
    opts.root = a.out;
    if (!a.config_path.empty()) {
        opts.custom_start = load_config_file(a.config_path);
        const auto report = validate_config(*opts.custom_start);
        if (!report.valid()) throw RunFailure(a.config_path + " is not a valid config:\n" + report.to_string());
    } else if (a.all) {
        opts.scenarios.assign(kAllScenarios.begin(), kAllScenarios.end());
        if (a.variants.empty()) a.variants = names(kAllVariants);
    } else if (!a.scenarios.empty()) {
        for (const auto& n : a.scenarios) opts.scenarios.push_back(from_name(kAllScenarios, n));
    } else {
        throw UsageError("run needs --scenario, --config or --all");
    }
    if (a.variants.empty()) a.variants = {std::string(to_string(PromptVariant::metrics_text))};
    for (const auto& n : a.variants) opts.variants.push_back(from_name(kAllVariants, n));
    opts.trials = a.trials;
    opts.seed = a.seed;
    opts.policy = from_name(kAllPolicies, a.policy);
    opts.policy_command = a.policy_command;
    opts.target_score = a.target;
    opts.reeval_episodes = a.reeval;
    opts.trial.design_iterations = a.iterations;
    opts.trial.episodes = a.episodes;
    opts.trial.jobs = a.jobs;
    opts.trial.record_telemetry = !a.no_telemetry;
    opts.trial.render_strips = a.strips;
    opts.trial.image_scale = a.image_scale;
    if (opts.policy == PolicyKind::external && a.policy_command.empty()) {
        throw UsageError("--policy external needs --policy-command");
    }

    DesignerFactory factory;
    switch (designer) {
        case DesignerKind::identity:
            factory = [](PromptVariant) { return std::make_unique<IdentityDesigner>(); };
            break;
        case DesignerKind::scripted:
            factory = [target = a.target](PromptVariant) { return std::make_unique<ScriptedDesigner>(target); };
            break;
        case DesignerKind::llm: {
            HttpSettings http;
            http.api_key = api_key;
            http.endpoint = a.endpoint;
            http.timeout = std::chrono::seconds(a.timeout_s);
            LlmSettings llm;
            llm.model = a.model;
            llm.sampling = {a.temperature, a.top_p, a.max_tokens};
            llm.max_attempts = a.max_attempts;
            factory = [http, llm](PromptVariant v) {
                return std::make_unique<LlmDesigner>(std::make_shared<HttpChatTransport>(http), llm, v);
            };
            break;
        }
    }

    out << "experiment root: " << fs::path(a.out).string() << "\n";
    if (designer == DesignerKind::llm) out << "note: llm designer runs are not deterministic\n";
    const auto on_iteration = [&](const TrialRecord& t, const IterationRecord& it) {
        std::vector<double> scores;
        std::string list;
        for (const auto& tr : it.traces) {
            scores.push_back(tr.score);
            list += (list.empty() ? "" : ",") + std::to_string(tr.score);
        }
        out << t.trial_id << " iter " << it.index << ": iqm=" << fmt("%.2f", iqm(scores)) << " scores=[" << list
            << "] changes=" << it.diff.size();
        if (it.exchange && it.exchange->status != ExchangeStatus::ok) {
            out << " designer=" << to_string(it.exchange->status);
        }
        out << "\n" << std::flush;
    };
    const auto rows = run_experiment(opts, factory, on_iteration);
    int failed = 0;
    for (const auto& r : rows) {
        if (r.status != "complete") {
            ++failed;
            err << r.path << ": " << r.status << "\n";
        }
    }
    out << rows.size() - failed << "/" << rows.size() << " trials complete\n";
    return failed ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// reeval / verify

/// Trial directories named by `path`: the path itself if it holds a
/// trial.json, else every trial listed in its manifest.
std::vector<fs::path> trial_dirs(const fs::path& path) {
    if (fs::exists(path / "trial.json")) return {path};
    if (!fs::exists(path / "manifest.json")) {
        throw RunFailure(path.string() + " holds neither trial.json nor manifest.json");
    }
    std::vector<fs::path> dirs;
    for (const auto& row : read_manifest(path)) {
        if (row.status == "complete") dirs.push_back(path / row.path);
    }
    return dirs;
}

struct ReevalArgs {
    std::string path;
    int episodes = kReevalEpisodes;
    std::string policy_command;
    int jobs = 1;
};

int cmd_reeval(const ReevalArgs& a, std::ostream& out) {
    for (const auto& dir : trial_dirs(a.path)) {
        const TrialRecord trial = load_trial(dir);
        const auto kind = policy_kind_from_string(trial.policy);
        if (!kind) throw RunFailure("unknown policy '" + trial.policy + "' in " + (dir / "trial.json").string());
        const PolicyFn policy = policy_for(*kind, a.policy_command);
        const int jobs = policy_is_reentrant(*kind) ? a.jobs : 1;
        const auto scores = reevaluate(trial, a.episodes, policy, jobs);
        write_reeval(dir, trial, scores);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const std::vector<double> s(scores[i].begin(), scores[i].end());
            out << dir.string() << " iter " << trial.iterations[i].index << ": reeval iqm=" << fmt("%.2f", iqm(s))
                << " n=" << s.size() << "\n";
        }
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string path;
    bool replay = false;
    std::string policy_command;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    int bad = 0;
    for (const auto& dir : trial_dirs(a.path)) {
        std::optional<PolicyFn> policy;
        if (a.replay) {
            const TrialRecord trial = load_trial(dir);
            const auto kind = policy_kind_from_string(trial.policy);
            if (!kind) throw RunFailure("unknown policy '" + trial.policy + "' in " + (dir / "trial.json").string());
            policy = policy_for(*kind, a.policy_command);
        }
        const VerifyReport report = verify_trial(dir, policy ? &*policy : nullptr);
        if (report.ok()) {
            out << dir.string() << ": ok\n";
        } else {
            ++bad;
            for (const auto& p : report.problems) err << dir.string() << ": " << p << "\n";
        }
    }
    return bad ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// stats / plot-data

struct StatsArgs {
    std::string root = "exp";
    std::string cell;
    std::string out;
    int n_boot = kDefaultBootstrapSamples;
    std::uint64_t seed = 0;
};

std::pair<std::string, std::string> split_cell(const std::string& cell) {
    const auto slash = cell.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == cell.size() ||
        cell.find('/', slash + 1) != std::string::npos) {
        throw UsageError("--cell expects <variant>/<scenario>, got '" + cell + "'");
    }
    return {cell.substr(0, slash), cell.substr(slash + 1)};
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
    const auto [variant, scenario] = split_cell(a.cell);
    const std::string csv = stats_to_csv(aggregate(a.root, variant, scenario, a.n_boot, a.seed));
    if (a.out.empty()) {
        out << csv;
    } else {
        write_bytes(a.out, csv);
        out << "wrote " << a.out << "\n";
    }
    return kExitOk;
}

struct PlotArgs {
    std::string root = "exp";
    std::string out = "plot-data";
    int n_boot = kDefaultBootstrapSamples;
    std::uint64_t seed = 0;
};

int cmd_plot_data(const PlotArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& row : read_manifest(a.root)) {
        std::pair<std::string, std::string> cell{row.variant, row.scenario};
        if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
    }
    if (cells.empty()) throw RunFailure("no trials listed in " + (fs::path(a.root) / "manifest.json").string());
    int missing = 0;
    for (const auto& [variant, scenario] : cells) {
        try {
            const auto rows = aggregate(a.root, variant, scenario, a.n_boot, a.seed);
            const fs::path file = fs::path(a.out) / (variant + "__" + scenario + ".csv");
            write_bytes(file, stats_to_csv(rows));
            out << "wrote " << file.string() << "\n";
        } catch (const MissingData& e) {
            ++missing;
            err << variant << "/" << scenario << ": " << e.what() << "\n";
        }
    }
    return missing ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// validate / render

int cmd_validate(const std::string& path, std::ostream& out) {
    const GameConfig cfg = load_config_file(path);
    const ValidationReport report = validate_config(cfg);
    out << report.to_string();
    return report.valid() ? kExitOk : kExitFailure;
}

struct RenderArgs {
    std::string scenario;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out = "strip.png";
    std::string policy = "heuristic_gap";
    std::string policy_command;
    int image_scale = 1;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
    GameConfig cfg = default_config();
    if (!a.scenario.empty()) cfg = broken_config(from_name(kAllScenarios, a.scenario));
    if (!a.config_path.empty()) cfg = load_config_file(a.config_path);
    const auto report = validate_config(cfg);
    if (!report.valid()) throw RunFailure("config is not valid:\n" + report.to_string());
    const PolicyFn policy = policy_for(from_name(kAllPolicies, a.policy), a.policy_command);
    const EpisodeTrace trace = run_episode(cfg, policy, a.seed, EpisodeOptions{false, true});
    const EncodedImage img = strip_image(trace, cfg, 1, a.image_scale);
    write_bytes(a.out, std::string_view(reinterpret_cast<const char*>(img.png.data()), img.png.size()));
    out << summary_line(1, trace) << "\n"
        << "wrote " << a.out << " (" << img.width << "x" << img.height << ")\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Automated game-design loop for a headless Flappy Bird simulator", "flapdesign"};
    app.require_subcommand(1);
    app.fallthrough(false);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Play and redesign for one or more trials");
    add_run(*run, run_args);

    ReevalArgs reeval_args;
    auto* reeval = app.add_subcommand("reeval", "Re-evaluate every config of a trial (or experiment) with fresh seeds");
    reeval->add_option("path", reeval_args.path, "Trial directory or experiment root")->required();
    reeval->add_option("--episodes", reeval_args.episodes, "Episodes per config")->check(CLI::Range(1, 100000));
    reeval->add_option("--policy-command", reeval_args.policy_command, "Command of the external player");
    reeval->add_option("--jobs", reeval_args.jobs, "Worker threads")->check(CLI::Range(1, 256));

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "Re-derive the diff and designer chain of stored trials");
    verify->add_option("path", verify_args.path, "Trial directory or experiment root")->required();
    verify->add_flag("--replay", verify_args.replay, "Also replay every episode and compare outcomes");
    verify->add_option("--policy-command", verify_args.policy_command, "Command of the external player");

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Per-iteration IQM and bootstrap CI of one cell as CSV");
    stats->add_option("--root", stats_args.root, "Experiment root");
    stats->add_option("--cell", stats_args.cell, "<variant>/<scenario>")->required();
    stats->add_option("--out", stats_args.out, "CSV file (default: stdout)");
    stats->add_option("--n-boot", stats_args.n_boot, "Bootstrap resamples")->check(CLI::Range(1, 1000000));
    stats->add_option("--seed", stats_args.seed, "Bootstrap seed");

    PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot-data", "One stats CSV per cell of an experiment");
    plot->add_option("--root", plot_args.root, "Experiment root");
    plot->add_option("--out", plot_args.out, "Output directory");
    plot->add_option("--n-boot", plot_args.n_boot, "Bootstrap resamples")->check(CLI::Range(1, 1000000));
    plot->add_option("--seed", plot_args.seed, "Bootstrap seed");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config YAML file");
    validate->add_option("file", validate_path, "Config YAML")->required();

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Play one seeded episode and write its composite strip PNG");
    auto* rscen = render->add_option("--scenario", render_args.scenario, "Broken scenario (default: default config)")
                      ->check(CLI::IsMember(names(kAllScenarios)));
    render->add_option("--config", render_args.config_path, "Config YAML")->check(CLI::ExistingFile)->excludes(rscen);
    render->add_option("--seed", render_args.seed, "Episode seed");
    render->add_option("--out", render_args.out, "PNG path");
    render->add_option("--policy", render_args.policy, "Player")->check(CLI::IsMember(names(kAllPolicies)));
    render->add_option("--policy-command", render_args.policy_command, "Command of the external player");
    render->add_option("--image-scale", render_args.image_scale, "Integer downscale factor")->check(CLI::Range(1, 16));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << "run '" << (subs.empty() ? std::string("flapdesign") : "flapdesign " + subs.front()->get_name())
            << " --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_args, out, err);
        if (*reeval) return cmd_reeval(reeval_args, out);
        if (*verify) return cmd_verify(verify_args, out, err);
        if (*stats) return cmd_stats(stats_args, out);
        if (*plot) return cmd_plot_data(plot_args, out, err);
        if (*validate) return cmd_validate(validate_path, out);
        if (*render) return cmd_render(render_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const AuthError& e) {
        err << "error: authentication: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace flapdesign::cli
