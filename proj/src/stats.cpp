#include "flapdesign/stats.hpp"

#include "flapdesign/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace flapdesign {

namespace {

double trimmed_mean_sorted(std::span<const double> sorted) {
    const std::size_t cut = sorted.size() / 4;
    double sum = 0.0;
    for (std::size_t i = cut; i < sorted.size() - cut; ++i) sum += sorted[i];
    return sum / static_cast<double>(sorted.size() - 2 * cut);
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double percentile_sorted(std::span<const double> sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double iqm(std::span<const double> samples) {
    if (samples.empty()) throw EmptyInput();
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return trimmed_mean_sorted(sorted);
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples, int n_boot, double level,
                                       std::uint64_t seed, int jobs) {
    if (samples.empty()) throw EmptyInput();
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level must lie in (0, 1)");
    if (n_boot < 1) throw std::invalid_argument("bootstrap_ci: n_boot must be >= 1");

    const int n = static_cast<int>(samples.size());
    std::vector<double> stats(static_cast<std::size_t>(n_boot));
    auto run_range = [&](int begin, int end) {
        std::vector<double> resample(samples.size());
        for (int b = begin; b < end; ++b) {
            SplitMix64 rng{mix_seed(seed, static_cast<std::uint64_t>(b))};
            for (auto& x : resample) x = samples[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
            std::sort(resample.begin(), resample.end());
            stats[static_cast<std::size_t>(b)] = trimmed_mean_sorted(resample);
        }
    };

    const int workers = std::clamp(jobs, 1, n_boot);
    if (workers == 1) {
        run_range(0, n_boot);
    } else {
        std::vector<std::jthread> pool;
        const int chunk = (n_boot + workers - 1) / workers;
        for (int begin = 0; begin < n_boot; begin += chunk) {
            pool.emplace_back(run_range, begin, std::min(n_boot, begin + chunk));
        }
    }

    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - level) / 2.0;
    return {percentile_sorted(stats, alpha), percentile_sorted(stats, 1.0 - alpha)};
}

StatSummary summarize(std::span<const double> samples, int n_boot, double level, std::uint64_t seed) {
    StatSummary s;
    s.iqm = iqm(samples);
    auto [lo, hi] = bootstrap_ci(samples, n_boot, level, seed);
    s.ci_low = std::min(lo, s.iqm);
    s.ci_high = std::max(hi, s.iqm);
    s.n = samples.size();
    s.n_boot = n_boot;
    s.level = level;
    return s;
}

std::vector<IterationStats> aggregate(const std::filesystem::path& experiment_root, const std::string& variant,
                                      const std::string& scenario, int n_boot, std::uint64_t seed) {
    namespace fs = std::filesystem;
    const fs::path cell = experiment_root / variant / scenario;
    if (!fs::is_directory(cell)) throw MissingData("no experiment cell at " + cell.string());

    std::map<int, std::vector<double>> pooled;
    for (const auto& trial : fs::directory_iterator(cell)) {
        if (!trial.is_directory() || !trial.path().filename().string().starts_with("trial_")) continue;
        for (const auto& iter : fs::directory_iterator(trial.path())) {
            const std::string name = iter.path().filename().string();
            if (!iter.is_directory() || !name.starts_with("iter_")) continue;
            const int index = std::stoi(name.substr(5));
            std::ifstream in(iter.path() / "reeval.jsonl");
            if (!in) continue;
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                try {
                    pooled[index].push_back(nlohmann::json::parse(line).at("score").get<double>());
                } catch (const nlohmann::json::exception& e) {
                    throw MissingData("corrupt re-evaluation record in " + (iter.path() / "reeval.jsonl").string() +
                                      ": " + e.what());
                }
            }
        }
    }
    if (pooled.empty()) throw MissingData("no re-evaluation data under " + cell.string());

    std::vector<IterationStats> rows;
    for (const auto& [index, scores] : pooled) {
        if (scores.empty()) continue;
        rows.push_back({index, summarize(scores, n_boot, kDefaultCiLevel,
                                         mix_seed(seed, static_cast<std::uint64_t>(index)))});
    }
    return rows;
}

std::string stats_to_csv(const std::vector<IterationStats>& rows) {
    std::ostringstream out;
    out << "iteration,iqm,ci_low,ci_high,n\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%zu\n", r.iteration, r.summary.iqm, r.summary.ci_low,
                      r.summary.ci_high, r.summary.n);
        out << buf;
    }
    return out.str();
}

}  // namespace flapdesign
