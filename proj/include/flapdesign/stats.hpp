#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flapdesign {

class EmptyInput : public std::invalid_argument {
public:
    EmptyInput() : std::invalid_argument("statistic of an empty sample") {}
};

class MissingData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultBootstrapSamples = 5000;
inline constexpr double kDefaultCiLevel = 0.95;

/// Interquartile mean: mean after dropping floor(n/4) values from each end.
double iqm(std::span<const double> samples);

/// Percentile-bootstrap interval of the IQM. Resample b draws from its own
/// generator seeded by (seed, b), so splitting the loop across threads
/// cannot change the result.
std::pair<double, double> bootstrap_ci(std::span<const double> samples, int n_boot = kDefaultBootstrapSamples,
                                       double level = kDefaultCiLevel, std::uint64_t seed = 0, int jobs = 1);

struct StatSummary {
    double iqm = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    int n_boot = kDefaultBootstrapSamples;
    double level = kDefaultCiLevel;
};

/// Point estimate plus interval; the interval is widened if needed so that
/// ci_low <= iqm <= ci_high.
StatSummary summarize(std::span<const double> samples, int n_boot = kDefaultBootstrapSamples,
                      double level = kDefaultCiLevel, std::uint64_t seed = 0);

struct IterationStats {
    int iteration = 0;
    StatSummary summary;
};

/// Pools re-evaluation scores across every trial of one experiment cell
/// (<root>/<variant>/<scenario>/trial_###) and summarizes each iteration.
std::vector<IterationStats> aggregate(const std::filesystem::path& experiment_root, const std::string& variant,
                                      const std::string& scenario, int n_boot = kDefaultBootstrapSamples,
                                      std::uint64_t seed = 0);

/// CSV with header `iteration,iqm,ci_low,ci_high,n`.
std::string stats_to_csv(const std::vector<IterationStats>& rows);

}  // namespace flapdesign
