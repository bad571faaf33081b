#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flapdesign {

using Rgb = std::array<int, 3>;

struct PlayerPhysics {
    int max_vel_y = 10;  // max descend speed, px/tick
    int min_vel_y = -8;  // max ascend speed, px/tick
    int acc_y = 1;
    int vel_rot = 3;
    int flap_acc = -9;
    int rot_thr = 20;
    bool operator==(const PlayerPhysics&) const = default;
};

struct SpeedSection {
    int pipe_vel_x = -4;
    PlayerPhysics player;
    bool operator==(const SpeedSection&) const = default;
};

struct PlayerDims {
    int width = 34;
    int height = 24;
    int private_zone = 100;
    bool operator==(const PlayerDims&) const = default;
};

struct LidarDims {
    int max_distance = 200;
    bool operator==(const LidarDims&) const = default;
};

struct PipeDims {
    int width = 52;
    int height = 320;
    int min_gap = 100;
    int max_gap = 150;
    int min_gap_distance = 50;   // gap bottom above ground
    int max_gap_distance = 150;
    int min_horizontal_spacing = 200;
    int max_horizontal_spacing = 300;
    bool operator==(const PipeDims&) const = default;
};

struct BaseDims {
    int width = 336;
    int height = 112;
    bool operator==(const BaseDims&) const = default;
};

struct BackgroundDims {
    int width = 288;
    int height = 512;
    Rgb fill_color{200, 200, 200};
    bool operator==(const BackgroundDims&) const = default;
};

struct DimensionsSection {
    PlayerDims player;
    LidarDims lidar;
    PipeDims pipe;
    BaseDims base;
    BackgroundDims background;
    bool operator==(const DimensionsSection&) const = default;
};

struct MetricsSection {
    std::string save_path = "metrics";
    bool save_on_reset = true;
    bool operator==(const MetricsSection&) const = default;
};

/// Complete tunable game definition. Default-constructed values are the
/// stock game shipped in fixtures/default.yaml.
struct GameConfig {
    SpeedSection speed;
    DimensionsSection dimensions;
    MetricsSection metrics;

    /// Vertical extent the player can occupy: background minus the ground band.
    int playfield_height() const { return dimensions.background.height - dimensions.base.height; }

    bool operator==(const GameConfig&) const = default;
};

GameConfig default_config();

// ---------------------------------------------------------------------------
// Errors

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed YAML text.
class SyntaxError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Well-formed YAML that does not match the config schema.
class SchemaError : public ConfigError {
public:
    SchemaError(std::string path, const std::string& message);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// Generic field access. Every leaf is addressed by its dotted YAML path
// (e.g. "dimensions.pipe.min_gap") in document order.

using FieldValue = std::variant<int, bool, std::string, Rgb>;

std::string to_string(const FieldValue& v);

struct FieldRef {
    std::string_view path;
    std::variant<int*, bool*, std::string*, Rgb*> target;
};

struct ConstFieldRef {
    std::string_view path;
    std::variant<const int*, const bool*, const std::string*, const Rgb*> target;
    FieldValue value() const;
};

std::vector<FieldRef> fields(GameConfig& cfg);
std::vector<ConstFieldRef> fields(const GameConfig& cfg);

/// Value at a dotted path; std::nullopt for unknown paths.
std::optional<FieldValue> get_field(const GameConfig& cfg, std::string_view path);

// ---------------------------------------------------------------------------
// YAML wire format

GameConfig parse_config(std::string_view yaml_text);
std::string serialize_config(const GameConfig& cfg);

GameConfig load_config_file(const std::string& path);
void save_config_file(const GameConfig& cfg, const std::string& path);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string path;
    std::string message;
    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate_config(const GameConfig& cfg);

// ---------------------------------------------------------------------------
// Diffs and designer constraints

struct FieldChange {
    std::string path;
    FieldValue old_value;
    FieldValue new_value;
    bool operator==(const FieldChange&) const = default;
};

std::vector<FieldChange> diff_configs(const GameConfig& old_cfg, const GameConfig& new_cfg);

/// True for paths the designer may not edit (player physics, lidar,
/// private zone, base/background dimensions, metrics plumbing).
bool is_locked_field(std::string_view path);

struct ConstrainedConfig {
    GameConfig config;
    std::vector<Violation> violations;  // one entry per reverted path
};

ConstrainedConfig enforce_designer_constraints(const GameConfig& prev, const GameConfig& proposed);

// ---------------------------------------------------------------------------
// Broken starting scenarios

enum class Scenario { too_fast, too_easy, too_tight_1, too_tight_2, too_spaced_out };

inline constexpr std::array<Scenario, 5> kAllScenarios{
    Scenario::too_fast, Scenario::too_easy, Scenario::too_tight_1, Scenario::too_tight_2,
    Scenario::too_spaced_out};

std::string_view to_string(Scenario s);
std::optional<Scenario> scenario_from_string(std::string_view name);

GameConfig broken_config(Scenario s);

}  // namespace flapdesign
