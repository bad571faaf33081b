#include "flapdesign/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace flapdesign {

GameConfig default_config() { return GameConfig{}; }

SchemaError::SchemaError(std::string path, const std::string& message)
    : ConfigError(path + ": " + message), path_(std::move(path)) {}

std::string to_string(const FieldValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, int>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "True" : "False";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else {
                return "[" + std::to_string(x[0]) + ", " + std::to_string(x[1]) + ", " +
                       std::to_string(x[2]) + "]";
            }
        },
        v);
}

// ---------------------------------------------------------------------------
// Field table

namespace {

template <typename Cfg, typename Ref>
std::vector<Ref> field_table(Cfg& c) {
    auto& p = c.speed.player;
    auto& d = c.dimensions;
    return {
        {"speed.pipe_vel_x", &c.speed.pipe_vel_x},
        {"speed.player.max_vel_y", &p.max_vel_y},
        {"speed.player.min_vel_y", &p.min_vel_y},
        {"speed.player.acc_y", &p.acc_y},
        {"speed.player.vel_rot", &p.vel_rot},
        {"speed.player.flap_acc", &p.flap_acc},
        {"speed.player.rot_thr", &p.rot_thr},
        {"dimensions.player.width", &d.player.width},
        {"dimensions.player.height", &d.player.height},
        {"dimensions.player.private_zone", &d.player.private_zone},
        {"dimensions.lidar.max_distance", &d.lidar.max_distance},
        {"dimensions.pipe.width", &d.pipe.width},
        {"dimensions.pipe.height", &d.pipe.height},
        {"dimensions.pipe.min_gap", &d.pipe.min_gap},
        {"dimensions.pipe.max_gap", &d.pipe.max_gap},
        {"dimensions.pipe.min_gap_distance", &d.pipe.min_gap_distance},
        {"dimensions.pipe.max_gap_distance", &d.pipe.max_gap_distance},
        {"dimensions.pipe.min_horizontal_spacing", &d.pipe.min_horizontal_spacing},
        {"dimensions.pipe.max_horizontal_spacing", &d.pipe.max_horizontal_spacing},
        {"dimensions.base.width", &d.base.width},
        {"dimensions.base.height", &d.base.height},
        {"dimensions.background.width", &d.background.width},
        {"dimensions.background.height", &d.background.height},
        {"dimensions.background.fill_color", &d.background.fill_color},
        {"metrics.save_path", &c.metrics.save_path},
        {"metrics.save_on_reset", &c.metrics.save_on_reset},
    };
}

}  // namespace

FieldValue ConstFieldRef::value() const {
    return std::visit([](const auto* p) { return FieldValue{*p}; }, target);
}

std::vector<FieldRef> fields(GameConfig& cfg) { return field_table<GameConfig, FieldRef>(cfg); }

std::vector<ConstFieldRef> fields(const GameConfig& cfg) {
    return field_table<const GameConfig, ConstFieldRef>(cfg);
}

std::optional<FieldValue> get_field(const GameConfig& cfg, std::string_view path) {
    for (const auto& f : fields(cfg)) {
        if (f.path == path) return f.value();
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Walks one YAML mapping, tracking which keys the schema consumed.
class MappingReader {
public:
    MappingReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.IsMap()) {
            throw SchemaError(path_.empty() ? "<root>" : path_, "expected a mapping");
        }
    }

    YAML::Node child(const std::string& key) {
        seen_.insert(key);
        YAML::Node n = node_[key];
        if (!n.IsDefined()) throw SchemaError(join_path(path_, key), "missing field");
        return n;
    }

    MappingReader sub(const std::string& key) { return MappingReader(child(key), join_path(path_, key)); }

    int integer(const std::string& key) {
        YAML::Node n = child(key);
        if (!n.IsScalar()) throw SchemaError(join_path(path_, key), "expected an integer");
        try {
            return n.as<int>();
        } catch (const YAML::Exception&) {
            throw SchemaError(join_path(path_, key), "expected an integer, got '" + n.Scalar() + "'");
        }
    }

    bool boolean(const std::string& key) {
        YAML::Node n = child(key);
        if (!n.IsScalar()) throw SchemaError(join_path(path_, key), "expected a boolean");
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            throw SchemaError(join_path(path_, key), "expected a boolean, got '" + n.Scalar() + "'");
        }
    }

    std::string text(const std::string& key) {
        YAML::Node n = child(key);
        if (!n.IsScalar()) throw SchemaError(join_path(path_, key), "expected a string");
        return n.Scalar();
    }

    Rgb rgb(const std::string& key) {
        YAML::Node n = child(key);
        const std::string p = join_path(path_, key);
        if (!n.IsSequence() || n.size() != 3) throw SchemaError(p, "expected a 3-element RGB list");
        Rgb out{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!n[i].IsScalar()) throw SchemaError(p, "expected integer channels");
            try {
                out[i] = n[i].as<int>();
            } catch (const YAML::Exception&) {
                throw SchemaError(p, "expected integer channels, got '" + n[i].Scalar() + "'");
            }
        }
        return out;
    }

    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) throw SchemaError(join_path(path_, key), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

GameConfig parse_config(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::ParserException& e) {
        throw SyntaxError(std::string("malformed YAML: ") + e.what());
    }
    if (!root.IsDefined() || root.IsNull()) throw SchemaError("<root>", "empty document");

    GameConfig cfg;
    MappingReader top(root, "");

    MappingReader speed = top.sub("speed");
    cfg.speed.pipe_vel_x = speed.integer("pipe_vel_x");
    {
        MappingReader pl = speed.sub("player");
        auto& p = cfg.speed.player;
        p.max_vel_y = pl.integer("max_vel_y");
        p.min_vel_y = pl.integer("min_vel_y");
        p.acc_y = pl.integer("acc_y");
        p.vel_rot = pl.integer("vel_rot");
        p.flap_acc = pl.integer("flap_acc");
        p.rot_thr = pl.integer("rot_thr");
        pl.finish();
    }
    speed.finish();

    MappingReader dims = top.sub("dimensions");
    auto& d = cfg.dimensions;
    {
        MappingReader pl = dims.sub("player");
        d.player.width = pl.integer("width");
        d.player.height = pl.integer("height");
        d.player.private_zone = pl.integer("private_zone");
        pl.finish();
    }
    {
        MappingReader li = dims.sub("lidar");
        d.lidar.max_distance = li.integer("max_distance");
        li.finish();
    }
    {
        MappingReader pi = dims.sub("pipe");
        d.pipe.width = pi.integer("width");
        d.pipe.height = pi.integer("height");
        d.pipe.min_gap = pi.integer("min_gap");
        d.pipe.max_gap = pi.integer("max_gap");
        d.pipe.min_gap_distance = pi.integer("min_gap_distance");
        d.pipe.max_gap_distance = pi.integer("max_gap_distance");
        d.pipe.min_horizontal_spacing = pi.integer("min_horizontal_spacing");
        d.pipe.max_horizontal_spacing = pi.integer("max_horizontal_spacing");
        pi.finish();
    }
    {
        MappingReader ba = dims.sub("base");
        d.base.width = ba.integer("width");
        d.base.height = ba.integer("height");
        ba.finish();
    }
    {
        MappingReader bg = dims.sub("background");
        d.background.width = bg.integer("width");
        d.background.height = bg.integer("height");
        d.background.fill_color = bg.rgb("fill_color");
        bg.finish();
    }
    dims.finish();

    MappingReader metrics = top.sub("metrics");
    cfg.metrics.save_path = metrics.text("save_path");
    cfg.metrics.save_on_reset = metrics.boolean("save_on_reset");
    metrics.finish();

    top.finish();
    return cfg;
}

// ---------------------------------------------------------------------------
// Serialization. Layout, comments and comment alignment reproduce the stock
// config file byte-for-byte for default values.

namespace {

class YamlWriter {
public:
    void raw(std::string_view line) {
        out_ << line << '\n';
    }

    // Comments start at `align` columns past the indent, with at least two spaces.
    void field(int indent, std::string_view key, const std::string& value,
               std::string_view comment = {}, std::size_t align = 0) {
        std::string line = std::string(key) + ": " + value;
        out_ << std::string(static_cast<std::size_t>(indent), ' ') << line;
        if (!comment.empty()) {
            const std::size_t pad = line.size() + 2 > align ? 2 : align - line.size();
            out_ << std::string(pad, ' ') << "# " << comment;
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string serialize_config(const GameConfig& cfg) {
    const auto& p = cfg.speed.player;
    const auto& d = cfg.dimensions;
    auto n = [](int v) { return std::to_string(v); };
    constexpr std::size_t kPlayerAlign = 15;

    YamlWriter w;
    w.raw("# Speed and Acceleration");
    w.raw("speed:");
    w.field(2, "pipe_vel_x", n(cfg.speed.pipe_vel_x));
    w.raw("  player:");
    w.field(4, "max_vel_y", n(p.max_vel_y), "max vel along Y, max descend speed", kPlayerAlign);
    w.field(4, "min_vel_y", n(p.min_vel_y), "min vel along Y, max ascend speed", kPlayerAlign);
    w.field(4, "acc_y", n(p.acc_y), "players downward acceleration", kPlayerAlign);
    w.field(4, "vel_rot", n(p.vel_rot), "angular speed", kPlayerAlign);
    w.field(4, "flap_acc", n(p.flap_acc), "players speed on flapping", kPlayerAlign);
    w.field(4, "rot_thr", n(p.rot_thr), "Player's rotation threshold", kPlayerAlign);
    w.raw("");
    w.raw("# Dimensions");
    w.raw("dimensions:");
    w.raw("  player:");
    w.field(4, "width", n(d.player.width));
    w.field(4, "height", n(d.player.height));
    w.field(4, "private_zone", n(d.player.private_zone),
            "Radius of the private zone for LIDAR. DO NOT MODIFY.");
    w.raw("");
    w.raw("  lidar:");
    w.field(4, "max_distance", n(d.lidar.max_distance),
            "Maximum distance for LIDAR rays. DO NOT MODIFY.");
    w.raw("");
    w.raw("  pipe:");
    w.field(4, "width", n(d.pipe.width));
    w.field(4, "height", n(d.pipe.height));
    w.field(4, "min_gap", n(d.pipe.min_gap));
    w.field(4, "max_gap", n(d.pipe.max_gap));
    w.field(4, "min_gap_distance", n(d.pipe.min_gap_distance), "Minimum distance from ground to pipe gap");
    w.field(4, "max_gap_distance", n(d.pipe.max_gap_distance), "Maximum distance from ground to pipe gap");
    w.field(4, "min_horizontal_spacing", n(d.pipe.min_horizontal_spacing),
            "Minimum horizontal spacing between pipes");
    w.field(4, "max_horizontal_spacing", n(d.pipe.max_horizontal_spacing),
            "Maximum horizontal spacing between pipes");
    w.raw("");
    w.raw("  base:");
    w.field(4, "width", n(d.base.width));
    w.field(4, "height", n(d.base.height));
    w.raw("");
    w.raw("  background:");
    w.field(4, "width", n(d.background.width));
    w.field(4, "height", n(d.background.height));
    w.field(4, "fill_color", to_string(FieldValue{d.background.fill_color}), "RGB color tuple");
    w.raw("");
    w.raw("metrics:");
    w.field(2, "save_path", quoted(cfg.metrics.save_path));
    w.field(2, "save_on_reset", cfg.metrics.save_on_reset ? "True" : "False");
    return w.str();
}

GameConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(e.path(), std::string("in ") + path + ": " + e.what());
    } catch (const SyntaxError& e) {
        throw SyntaxError(path + ": " + e.what());
    }
}

void save_config_file(const GameConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << serialize_config(cfg);
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationReport::to_string() const {
    if (valid()) return "valid\n";
    std::ostringstream ss;
    ss << "invalid (" << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << ")\n";
    for (const auto& v : violations) ss << "  " << v.path << ": " << v.message << '\n';
    return ss.str();
}

ValidationReport validate_config(const GameConfig& cfg) {
    ValidationReport r;
    auto fail = [&](std::string path, std::string msg) { r.violations.push_back({std::move(path), std::move(msg)}); };
    const auto& p = cfg.speed.player;
    const auto& d = cfg.dimensions;

    if (cfg.speed.pipe_vel_x >= 0) {
        fail("speed.pipe_vel_x", "must be < 0 (got " + std::to_string(cfg.speed.pipe_vel_x) + ")");
    }
    if (p.acc_y <= 0) fail("speed.player.acc_y", "must be > 0");
    if (p.flap_acc >= 0) fail("speed.player.flap_acc", "must be < 0");
    if (p.min_vel_y >= 0) fail("speed.player.min_vel_y", "must be < 0");
    if (p.max_vel_y <= 0) fail("speed.player.max_vel_y", "must be > 0");

    for (const auto& f : fields(cfg)) {
        if (!f.path.starts_with("dimensions.")) continue;
        if (const auto* v = std::get_if<const int*>(&f.target); v && **v <= 0) {
            fail(std::string(f.path), "must be > 0 (got " + std::to_string(**v) + ")");
        }
    }
    for (int c : d.background.fill_color) {
        if (c < 0 || c > 255) {
            fail("dimensions.background.fill_color", "channels must lie in [0, 255]");
            break;
        }
    }

    auto ordered = [&](const char* lo_path, int lo, const char* hi_name, int hi) {
        if (lo > hi) {
            fail(lo_path, std::string("must be <= ") + hi_name + " (" + std::to_string(lo) + " > " +
                              std::to_string(hi) + ")");
        }
    };
    ordered("dimensions.pipe.min_gap", d.pipe.min_gap, "max_gap", d.pipe.max_gap);
    ordered("dimensions.pipe.min_gap_distance", d.pipe.min_gap_distance, "max_gap_distance",
            d.pipe.max_gap_distance);
    ordered("dimensions.pipe.min_horizontal_spacing", d.pipe.min_horizontal_spacing,
            "max_horizontal_spacing", d.pipe.max_horizontal_spacing);

    const int room = cfg.playfield_height();
    if (d.pipe.max_gap + d.pipe.max_gap_distance > room) {
        fail("dimensions.pipe.max_gap", "max_gap + max_gap_distance must be <= background.height - base.height (" +
                                            std::to_string(d.pipe.max_gap + d.pipe.max_gap_distance) + " > " +
                                            std::to_string(room) + ")");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Diffs and constraints

std::vector<FieldChange> diff_configs(const GameConfig& old_cfg, const GameConfig& new_cfg) {
    std::vector<FieldChange> out;
    const auto a = fields(old_cfg);
    const auto b = fields(new_cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        FieldValue va = a[i].value();
        FieldValue vb = b[i].value();
        if (va != vb) out.push_back({std::string(a[i].path), std::move(va), std::move(vb)});
    }
    return out;
}

bool is_locked_field(std::string_view path) {
    constexpr std::array<std::string_view, 6> kLockedPrefixes{
        "speed.player.", "dimensions.player.", "dimensions.lidar.",
        "dimensions.base.", "dimensions.background.", "metrics."};
    return std::any_of(kLockedPrefixes.begin(), kLockedPrefixes.end(),
                       [&](std::string_view prefix) { return path.starts_with(prefix); });
}

ConstrainedConfig enforce_designer_constraints(const GameConfig& prev, const GameConfig& proposed) {
    ConstrainedConfig out{proposed, {}};
    const auto before = fields(prev);
    auto after = fields(out.config);
    for (std::size_t i = 0; i < after.size(); ++i) {
        if (!is_locked_field(after[i].path)) continue;
        const FieldValue old_v = before[i].value();
        std::visit(
            [&](auto* dst) {
                using T = std::remove_pointer_t<decltype(dst)>;
                const T& src = std::get<T>(old_v);
                if (*dst != src) {
                    out.violations.push_back({std::string(after[i].path),
                                              "locked field changed from " + to_string(old_v) + " to " +
                                                  to_string(FieldValue{*dst}) + "; reverted"});
                    *dst = src;
                }
            },
            after[i].target);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenarios

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::too_fast: return "too_fast";
        case Scenario::too_easy: return "too_easy";
        case Scenario::too_tight_1: return "too_tight_1";
        case Scenario::too_tight_2: return "too_tight_2";
        case Scenario::too_spaced_out: return "too_spaced_out";
    }
    return "unknown";
}

std::optional<Scenario> scenario_from_string(std::string_view name) {
    for (Scenario s : kAllScenarios) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

GameConfig broken_config(Scenario s) {
    GameConfig cfg = default_config();
    auto& pipe = cfg.dimensions.pipe;
    switch (s) {
        case Scenario::too_fast:
            cfg.speed.pipe_vel_x = -12;
            break;
        case Scenario::too_easy:
            pipe.min_gap = 200;
            pipe.max_gap = 250;
            break;
        case Scenario::too_tight_1:
            pipe.min_gap = 60;
            pipe.max_gap = 80;
            break;
        case Scenario::too_tight_2:
            pipe.min_gap = 50;
            pipe.max_gap = 70;
            pipe.min_gap_distance = 150;
            pipe.max_gap_distance = 250;
            break;
        case Scenario::too_spaced_out:
            pipe.min_horizontal_spacing = 450;
            pipe.max_horizontal_spacing = 600;
            break;
    }
    return cfg;
}

}  // namespace flapdesign
