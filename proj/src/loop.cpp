#include "flapdesign/loop.hpp"

#include "flapdesign/rng.hpp"
#include "flapdesign/traces.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace flapdesign {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::uint64_t episode_seed(std::uint64_t seed_base, int iteration, int episode, int episodes_per_iteration) {
    return seed_base + static_cast<std::uint64_t>(iteration) * static_cast<std::uint64_t>(episodes_per_iteration) +
           static_cast<std::uint64_t>(episode);
}

std::uint64_t reeval_seed(std::uint64_t seed_base, int iteration, int episode) {
    const std::uint64_t stream = (static_cast<std::uint64_t>(iteration) << 32) | static_cast<std::uint32_t>(episode);
    return (std::uint64_t{1} << 63) | (mix_seed(seed_base, stream) >> 1);
}

std::uint64_t trial_seed_base(std::uint64_t seed, int trial_index) {
    return seed + static_cast<std::uint64_t>(trial_index) * kTrialSeedStride;
}

namespace {

std::string iter_name(int i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "iter_%02d", i);
    return buf;
}

std::string trial_name(int t) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "trial_%03d", t);
    return buf;
}

void write_file(const fs::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& data) {
    write_file(path, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

/// Write-then-rename so readers never see a half-written file.
void write_atomic(const fs::path& path, std::string_view data) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, data);
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TrialLoadError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ojson value_to_json(const FieldValue& v) {
    return std::visit(
        [](const auto& x) -> ojson {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Rgb>) return ojson::array({x[0], x[1], x[2]});
            else return ojson(x);
        },
        v);
}

ojson diff_to_json(const std::vector<FieldChange>& diff) {
    ojson arr = ojson::array();
    for (const auto& c : diff) {
        arr.push_back({{"path", c.path}, {"old", value_to_json(c.old_value)}, {"new", value_to_json(c.new_value)}});
    }
    return arr;
}

ojson trial_json(const TrialRecord& t, const TrialOptions& opts, const std::string& status) {
    ojson j;
    j["trial_id"] = t.trial_id;
    j["scenario"] = t.scenario;
    j["variant"] = std::string(to_string(t.variant));
    j["designer"] = std::string(to_string(t.designer));
    j["policy"] = t.policy;
    j["seed_base"] = t.seed_base;
    j["target_score"] = t.target_score;
    j["gain"] = t.gain;
    j["saturation_boost"] = t.saturation_boost;
    j["design_iterations"] = opts.design_iterations;
    j["episodes"] = opts.episodes;
    j["strips"] = opts.render_strips || variant_uses_images(t.variant);
    j["image_scale"] = opts.image_scale;
    j["deterministic"] = t.designer != DesignerKind::llm;
    j["status"] = status;
    return j;
}

void persist_iteration(const fs::path& dir, const TrialRecord& trial, const IterationRecord& it,
                       const std::vector<EncodedImage>& strips) {
    const fs::path final_dir = dir / iter_name(it.index);
    const fs::path tmp = dir / ("." + iter_name(it.index) + ".tmp");
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    write_file(tmp / "config.yaml", serialize_config(it.config));
    write_file(tmp / "episodes.jsonl", episodes_to_jsonl(it.traces));
    for (std::size_t k = 0; k < it.traces.size(); ++k) {
        if (!it.traces[k].telemetry.empty()) {
            write_file(tmp / ("telemetry_ep" + std::to_string(k + 1) + ".jsonl"),
                       telemetry_to_jsonl(it.traces[k].telemetry));
        }
    }
    for (const auto& s : strips) write_file(tmp / s.label, s.png);
    if (it.exchange) write_file(tmp / "exchange.json", exchange_to_json(*it.exchange).dump(2) + "\n");

    ojson diff;
    diff["designer"] = it.index == 0 ? std::string("none") : std::string(to_string(trial.designer));
    diff["changes"] = diff_to_json(it.diff);
    ojson viol = ojson::array();
    if (it.exchange) {
        for (const auto& v : it.exchange->violations) viol.push_back({{"path", v.path}, {"message", v.message}});
    }
    diff["violations"] = viol;
    write_file(tmp / "diff.json", diff.dump(2) + "\n");

    fs::remove_all(final_dir);
    fs::rename(tmp, final_dir);
}

}  // namespace

TrialRecord run_trial(const GameConfig& start, Designer& designer, const PolicyFn& policy, TrialRecord meta,
                      const TrialOptions& opts, const std::optional<fs::path>& dir,
                      const IterationCallback& on_iteration) {
    if (opts.episodes < 1) throw std::invalid_argument("episodes per iteration must be >= 1");
    if (opts.design_iterations < 0) throw std::invalid_argument("design iterations must be >= 0");
    if (auto report = validate_config(start); !report.valid()) throw InvalidConfig(std::move(report));

    TrialRecord rec = std::move(meta);
    rec.designer = designer.kind();
    rec.iterations.clear();
    const bool want_strips = opts.render_strips || variant_uses_images(rec.variant);
    if (dir) {
        fs::create_directories(*dir);
        write_atomic(*dir / "trial.json", trial_json(rec, opts, "running").dump(2) + "\n");
    }

    GameConfig cfg = start;
    std::optional<DesignerExchange> exchange;
    std::vector<FieldChange> diff;
    for (int i = 0; i <= opts.design_iterations; ++i) {
        std::vector<std::uint64_t> seeds;
        for (int k = 0; k < opts.episodes; ++k) seeds.push_back(episode_seed(rec.seed_base, i, k, opts.episodes));
        EpisodeOptions ep_opts{opts.record_telemetry, want_strips};
        std::vector<EpisodeTrace> traces = run_seeds(cfg, policy, seeds, ep_opts, opts.jobs);

        std::vector<EncodedImage> strips;
        if (want_strips) {
            for (std::size_t k = 0; k < traces.size(); ++k) {
                strips.push_back(strip_image(traces[k], cfg, static_cast<int>(k) + 1, opts.image_scale));
            }
        }

        IterationRecord it{i, cfg, traces, std::move(exchange), std::move(diff)};
        exchange.reset();
        diff.clear();
        if (dir) persist_iteration(*dir, rec, it, strips);
        rec.iterations.push_back(std::move(it));
        if (on_iteration) on_iteration(rec, rec.iterations.back());

        if (i == opts.design_iterations) break;
        DesignResult next = designer.propose(cfg, traces, strips);
        if (auto report = validate_config(next.config); !report.valid()) {
            throw std::logic_error("designer produced an invalid config:\n" + report.to_string());
        }
        diff = diff_configs(cfg, next.config);
        exchange = std::move(next.exchange);
        cfg = std::move(next.config);
    }

    if (dir) write_atomic(*dir / "trial.json", trial_json(rec, opts, "complete").dump(2) + "\n");
    return rec;
}

std::vector<std::vector<int>> reevaluate(const TrialRecord& trial, int n, const PolicyFn& policy, int jobs) {
    if (n < 1) throw std::invalid_argument("re-evaluation needs n >= 1");
    std::vector<std::vector<int>> out;
    for (const auto& it : trial.iterations) {
        std::vector<std::uint64_t> seeds;
        for (int k = 0; k < n; ++k) seeds.push_back(reeval_seed(trial.seed_base, it.index, k));
        auto traces = run_seeds(it.config, policy, seeds, EpisodeOptions{false, false}, jobs);
        std::vector<int> scores;
        for (const auto& t : traces) scores.push_back(t.score);
        out.push_back(std::move(scores));
    }
    return out;
}

void write_reeval(const fs::path& trial_dir, const TrialRecord& trial, const std::vector<std::vector<int>>& scores) {
    if (scores.size() != trial.iterations.size()) throw std::invalid_argument("one score list per iteration expected");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int index = trial.iterations[i].index;
        std::string lines;
        for (std::size_t k = 0; k < scores[i].size(); ++k) {
            ojson j;
            j["episode"] = k;
            j["seed"] = reeval_seed(trial.seed_base, index, static_cast<int>(k));
            j["score"] = scores[i][k];
            lines += j.dump() + "\n";
        }
        write_atomic(trial_dir / iter_name(index) / "reeval.jsonl", lines);
    }
}

// ---------------------------------------------------------------------------
// Reloading and verification

namespace {

nlohmann::json parse_json_file(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw TrialLoadError("corrupt JSON in " + path.string() + ": " + e.what());
    }
}

std::vector<EpisodeTrace> load_episodes(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<EpisodeTrace> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            EpisodeTrace t;
            t.episode_id = j.at("episode_id").get<std::string>();
            t.seed = j.at("seed").get<std::uint64_t>();
            t.score = j.at("score").get<int>();
            t.ticks = j.at("ticks").get<int>();
            t.duration_s = j.at("duration_s").get<double>();
            auto term = termination_from_string(j.at("termination").get<std::string>());
            if (!term) throw TrialLoadError("unknown termination in " + path.string());
            t.termination = *term;
            t.max_height = j.at("max_height").get<int>();
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw TrialLoadError("corrupt episode record in " + path.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

TrialRecord load_trial(const fs::path& trial_dir) {
    const auto meta = parse_json_file(trial_dir / "trial.json");
    TrialRecord t;
    try {
        t.trial_id = meta.at("trial_id").get<std::string>();
        t.scenario = meta.at("scenario").get<std::string>();
        auto variant = variant_from_string(meta.at("variant").get<std::string>());
        auto designer = designer_kind_from_string(meta.at("designer").get<std::string>());
        if (!variant || !designer) throw TrialLoadError("unknown variant or designer in trial.json");
        t.variant = *variant;
        t.designer = *designer;
        t.policy = meta.at("policy").get<std::string>();
        t.seed_base = meta.at("seed_base").get<std::uint64_t>();
        t.target_score = meta.at("target_score").get<int>();
        t.gain = meta.at("gain").get<double>();
        t.saturation_boost = meta.at("saturation_boost").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw TrialLoadError("corrupt trial.json in " + trial_dir.string() + ": " + e.what());
    }

    for (int i = 0;; ++i) {
        const fs::path it_dir = trial_dir / iter_name(i);
        if (!fs::is_directory(it_dir)) break;
        IterationRecord it;
        it.index = i;
        try {
            it.config = parse_config(read_file(it_dir / "config.yaml"));
        } catch (const ConfigError& e) {
            throw TrialLoadError("bad config in " + (it_dir / "config.yaml").string() + ": " + e.what());
        }
        it.traces = load_episodes(it_dir / "episodes.jsonl");
        if (fs::exists(it_dir / "exchange.json")) {
            try {
                it.exchange = exchange_from_json(parse_json_file(it_dir / "exchange.json"));
            } catch (const std::exception& e) {
                throw TrialLoadError("bad exchange record in " + (it_dir / "exchange.json").string() + ": " + e.what());
            }
        }
        if (i > 0) it.diff = diff_configs(t.iterations.back().config, it.config);
        t.iterations.push_back(std::move(it));
    }
    if (t.iterations.empty()) throw TrialLoadError("no iterations under " + trial_dir.string());
    return t;
}

VerifyReport verify_trial(const fs::path& trial_dir, const PolicyFn* replay_policy) {
    VerifyReport report;
    auto problem = [&](const std::string& msg) { report.problems.push_back(msg); };

    TrialRecord t;
    nlohmann::json meta;
    try {
        t = load_trial(trial_dir);
        meta = parse_json_file(trial_dir / "trial.json");
    } catch (const std::exception& e) {
        problem(e.what());
        return report;
    }
    const int episodes = meta.value("episodes", kEpisodesPerIteration);
    const bool strips = meta.value("strips", false);

    for (std::size_t i = 0; i < t.iterations.size(); ++i) {
        const auto& it = t.iterations[i];
        const fs::path it_dir = trial_dir / iter_name(it.index);
        const std::string where = iter_name(it.index) + ": ";

        if (auto v = validate_config(it.config); !v.valid()) problem(where + "invalid config:\n" + v.to_string());
        if (static_cast<int>(it.traces.size()) != episodes) {
            problem(where + "expected " + std::to_string(episodes) + " episodes, found " +
                    std::to_string(it.traces.size()));
        }
        for (std::size_t k = 0; k < it.traces.size(); ++k) {
            const auto seed = episode_seed(t.seed_base, it.index, static_cast<int>(k), episodes);
            if (it.traces[k].seed != seed) problem(where + "episode " + std::to_string(k + 1) + " has a foreign seed");
            if (strips && !fs::exists(it_dir / ("strip_ep" + std::to_string(k + 1) + ".png"))) {
                problem(where + "missing strip_ep" + std::to_string(k + 1) + ".png");
            }
            if (replay_policy) {
                const auto replay = run_episode(it.config, *replay_policy, seed, EpisodeOptions{false, false});
                if (replay.score != it.traces[k].score || replay.ticks != it.traces[k].ticks ||
                    replay.termination != it.traces[k].termination) {
                    problem(where + "episode " + std::to_string(k + 1) + " does not replay");
                }
            }
        }

        try {
            const auto stored = parse_json_file(it_dir / "diff.json");
            if (stored.at("changes") != nlohmann::json::parse(diff_to_json(it.diff).dump())) {
                problem(where + "diff.json does not match the configs");
            }
        } catch (const std::exception& e) {
            problem(where + e.what());
        }

        if (i == 0) {
            if (it.exchange) problem(where + "the starting config has a designer exchange");
            continue;
        }
        const auto& prev = t.iterations[i - 1];
        switch (t.designer) {
            case DesignerKind::identity:
                if (!(it.config == prev.config)) problem(where + "identity designer changed the config");
                break;
            case DesignerKind::scripted: {
                const GameConfig expect = scripted_designer_propose(prev.config, prev.traces, t.target_score, t.gain,
                                                                    t.saturation_boost);
                if (!(expect == it.config)) problem(where + "config is not the scripted designer's output");
                break;
            }
            case DesignerKind::llm: {
                if (!it.exchange) {
                    problem(where + "missing exchange.json");
                    break;
                }
                GameConfig expect = prev.config;
                if (it.exchange->status == ExchangeStatus::ok) {
                    try {
                        expect = enforce_designer_constraints(prev.config, parse_config(it.exchange->extracted_yaml.value_or("")))
                                     .config;
                    } catch (const ConfigError& e) {
                        problem(where + "stored reply no longer parses: " + e.what());
                        break;
                    }
                }
                if (!(expect == it.config)) problem(where + "config does not follow from the designer reply");
                break;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

void write_manifest(const fs::path& root, const ExperimentOptions& opts, const std::vector<TrialStatus>& rows) {
    ojson j;
    j["seed"] = opts.seed;
    j["trials_per_cell"] = opts.trials;
    ojson arr = ojson::array();
    for (const auto& r : rows) {
        arr.push_back({{"variant", r.variant},
                       {"scenario", r.scenario},
                       {"trial", r.trial},
                       {"path", r.path},
                       {"status", r.status}});
    }
    j["trials"] = arr;
    write_atomic(root / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

std::vector<TrialStatus> read_manifest(const fs::path& root) {
    std::vector<TrialStatus> out;
    if (!fs::exists(root / "manifest.json")) return out;
    const auto j = parse_json_file(root / "manifest.json");
    try {
        for (const auto& r : j.at("trials")) {
            out.push_back({r.at("variant").get<std::string>(), r.at("scenario").get<std::string>(),
                           r.at("trial").get<int>(), r.at("path").get<std::string>(),
                           r.at("status").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw TrialLoadError("corrupt manifest in " + root.string() + ": " + e.what());
    }
    return out;
}

std::vector<TrialStatus> run_experiment(const ExperimentOptions& opts, const DesignerFactory& make_designer,
                                        const IterationCallback& on_iteration) {
    fs::create_directories(opts.root);
    std::vector<TrialStatus> rows = read_manifest(opts.root);
    auto find_row = [&](const std::string& path) -> TrialStatus* {
        for (auto& r : rows) {
            if (r.path == path) return &r;
        }
        return nullptr;
    };

    std::vector<std::pair<std::string, GameConfig>> starts;
    if (opts.custom_start) {
        starts.emplace_back("custom", *opts.custom_start);
    } else {
        for (Scenario s : opts.scenarios) starts.emplace_back(std::string(to_string(s)), broken_config(s));
    }

    std::vector<TrialStatus> result;
    for (PromptVariant variant : opts.variants) {
        for (const auto& [scenario, start] : starts) {
            for (int t = 0; t < opts.trials; ++t) {
                const std::string rel = std::string(to_string(variant)) + "/" + scenario + "/" + trial_name(t);
                const fs::path dir = opts.root / rel;
                TrialStatus* row = find_row(rel);
                if (row && row->status == "complete" && fs::exists(dir / "trial.json")) {
                    result.push_back(*row);
                    continue;
                }
                if (!row) {
                    rows.push_back({std::string(to_string(variant)), scenario, t, rel, "running"});
                    row = &rows.back();
                }
                row->status = "running";
                fs::remove_all(dir);
                write_manifest(opts.root, opts, rows);

                TrialRecord meta;
                meta.trial_id = rel;
                meta.scenario = scenario;
                meta.variant = variant;
                meta.policy = std::string(to_string(opts.policy));
                meta.seed_base = trial_seed_base(opts.seed, t);
                meta.target_score = opts.target_score;
                try {
                    auto designer = make_designer(variant);
                    if (auto* scripted = dynamic_cast<ScriptedDesigner*>(designer.get())) {
                        meta.gain = scripted->gain();
                        meta.saturation_boost = scripted->saturation_boost();
                        meta.target_score = scripted->target();
                    }
                    const PolicyFn policy = make_policy(opts.policy, opts.policy_command);
                    const int jobs = policy_is_reentrant(opts.policy) ? opts.trial.jobs : 1;
                    TrialOptions trial_opts = opts.trial;
                    trial_opts.jobs = jobs;
                    TrialRecord rec = run_trial(start, *designer, policy, meta, trial_opts, dir, on_iteration);
                    if (opts.reeval_episodes > 0) {
                        write_reeval(dir, rec, reevaluate(rec, opts.reeval_episodes, policy, jobs));
                    }
                    row = find_row(rel);
                    row->status = "complete";
                } catch (const AuthError&) {
                    find_row(rel)->status = "failed: authentication";
                    write_manifest(opts.root, opts, rows);
                    throw;
                } catch (const std::exception& e) {
                    find_row(rel)->status = std::string("failed: ") + e.what();
                }
                write_manifest(opts.root, opts, rows);
                result.push_back(*find_row(rel));
            }
        }
    }
    return result;
}

}  // namespace flapdesign
