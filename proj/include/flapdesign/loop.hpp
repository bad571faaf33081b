#pragma once

#include "flapdesign/agents.hpp"
#include "flapdesign/config.hpp"
#include "flapdesign/designer.hpp"
#include "flapdesign/sim.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flapdesign {

inline constexpr int kDesignIterations = 9;
inline constexpr int kEpisodesPerIteration = 5;
inline constexpr int kReevalEpisodes = 50;
inline constexpr std::uint64_t kTrialSeedStride = 1000;

struct IterationRecord {
    int index = 0;
    GameConfig config;
    std::vector<EpisodeTrace> traces;
    /// The exchange that produced this config (none for index 0 and for
    /// offline designers).
    std::optional<DesignerExchange> exchange;
    /// Changes relative to the previous iteration's config.
    std::vector<FieldChange> diff;
};

struct TrialRecord {
    std::string trial_id;
    std::string scenario;  // scenario name, or "custom"
    PromptVariant variant = PromptVariant::metrics_text;
    DesignerKind designer = DesignerKind::scripted;
    std::string policy;  // policy kind name
    std::uint64_t seed_base = 0;
    int target_score = kDefaultTargetScore;
    double gain = kScriptedGain;  // scripted designer only
    double saturation_boost = kScriptedSaturationBoost;
    std::vector<IterationRecord> iterations;
};

struct TrialOptions {
    int design_iterations = kDesignIterations;
    int episodes = kEpisodesPerIteration;
    int jobs = 1;
    bool record_telemetry = true;
    bool render_strips = true;  // always on for image variants
    int image_scale = kDefaultImageScale;
};

/// Seed of episode k of iteration i: seed_base + i * episodes + k.
std::uint64_t episode_seed(std::uint64_t seed_base, int iteration, int episode, int episodes_per_iteration);

/// Re-evaluation seeds have the top bit set; trial seeds never do.
std::uint64_t reeval_seed(std::uint64_t seed_base, int iteration, int episode);

using IterationCallback = std::function<void(const TrialRecord&, const IterationRecord&)>;

/// Plays and redesigns for design_iterations + 1 configs. With `dir` set,
/// each iteration is written to dir/iter_## (atomically, via a temporary
/// directory) before the designer is called again, and dir/trial.json is
/// written at start and completion. AuthError propagates.
TrialRecord run_trial(const GameConfig& start, Designer& designer, const PolicyFn& policy, TrialRecord meta,
                      const TrialOptions& opts = {}, const std::optional<std::filesystem::path>& dir = std::nullopt,
                      const IterationCallback& on_iteration = {});

/// n fresh episodes for each config of the trial; scores[i][k].
std::vector<std::vector<int>> reevaluate(const TrialRecord& trial, int n, const PolicyFn& policy, int jobs = 1);

/// Writes iter_##/reeval.jsonl ({"episode","seed","score"} per line).
void write_reeval(const std::filesystem::path& trial_dir, const TrialRecord& trial,
                  const std::vector<std::vector<int>>& scores);

class TrialLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rebuilds a TrialRecord from disk. Traces carry the per-episode summary
/// fields only (no frames or telemetry).
TrialRecord load_trial(const std::filesystem::path& trial_dir);

struct VerifyReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

/// Re-derives every stored diff and every designer step from the files of
/// one trial. With `replay_policy`, also replays each episode and compares
/// its score and termination.
VerifyReport verify_trial(const std::filesystem::path& trial_dir, const PolicyFn* replay_policy = nullptr);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentOptions {
    std::filesystem::path root;
    std::vector<Scenario> scenarios;
    std::vector<PromptVariant> variants;
    std::optional<GameConfig> custom_start;  // replaces the scenarios with one "custom" cell
    int trials = 1;
    std::uint64_t seed = 0;
    PolicyKind policy = PolicyKind::heuristic_gap;
    std::string policy_command;
    TrialOptions trial;
    int target_score = kDefaultTargetScore;
    int reeval_episodes = 0;  // 0 skips re-evaluation
};

using DesignerFactory = std::function<std::unique_ptr<Designer>(PromptVariant)>;

struct TrialStatus {
    std::string variant;
    std::string scenario;
    int trial = 0;
    std::string path;  // relative to the root
    std::string status;  // "complete", "running" or "failed: <why>"
};

/// Full factorial sweep under opts.root, recorded in root/manifest.json.
/// Trials already marked complete in the manifest are skipped; anything
/// else left over from an interrupted run is deleted and redone.
std::vector<TrialStatus> run_experiment(const ExperimentOptions& opts, const DesignerFactory& make_designer,
                                        const IterationCallback& on_iteration = {});

std::vector<TrialStatus> read_manifest(const std::filesystem::path& root);

/// Trial seed base: seed + trial_index * kTrialSeedStride.
std::uint64_t trial_seed_base(std::uint64_t seed, int trial_index);

}  // namespace flapdesign
