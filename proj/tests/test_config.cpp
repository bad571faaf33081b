#include "flapdesign/config.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flapdesign;
using namespace flapdesign::testing;

namespace {

std::string default_yaml() { return read_text(source_dir() / "fixtures" / "default.yaml"); }

GameConfig random_valid_config(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    GameConfig c;
    c.speed.pipe_vel_x = pick(-12, -1);
    auto& p = c.dimensions.pipe;
    p.min_gap = pick(40, 200);
    p.max_gap = p.min_gap + pick(0, 40);
    p.min_gap_distance = pick(20, 100);
    p.max_gap_distance = p.min_gap_distance + pick(0, 400 - p.max_gap - p.min_gap_distance);
    p.min_horizontal_spacing = pick(100, 500);
    p.max_horizontal_spacing = p.min_horizontal_spacing + pick(0, 300);
    return c;
}

}  // namespace

TEST(Config, ParsesPublishedDefaults) {
    const GameConfig c = parse_config(default_yaml());
    EXPECT_EQ(c.speed.pipe_vel_x, -4);
    EXPECT_EQ(c.speed.player.max_vel_y, 10);
    EXPECT_EQ(c.speed.player.min_vel_y, -8);
    EXPECT_EQ(c.speed.player.acc_y, 1);
    EXPECT_EQ(c.speed.player.vel_rot, 3);
    EXPECT_EQ(c.speed.player.flap_acc, -9);
    EXPECT_EQ(c.speed.player.rot_thr, 20);
    EXPECT_EQ(c.dimensions.player.width, 34);
    EXPECT_EQ(c.dimensions.player.height, 24);
    EXPECT_EQ(c.dimensions.player.private_zone, 100);
    EXPECT_EQ(c.dimensions.lidar.max_distance, 200);
    EXPECT_EQ(c.dimensions.pipe.width, 52);
    EXPECT_EQ(c.dimensions.pipe.height, 320);
    EXPECT_EQ(c.dimensions.pipe.min_gap, 100);
    EXPECT_EQ(c.dimensions.pipe.max_gap, 150);
    EXPECT_EQ(c.dimensions.pipe.min_gap_distance, 50);
    EXPECT_EQ(c.dimensions.pipe.max_gap_distance, 150);
    EXPECT_EQ(c.dimensions.pipe.min_horizontal_spacing, 200);
    EXPECT_EQ(c.dimensions.pipe.max_horizontal_spacing, 300);
    EXPECT_EQ(c.dimensions.base.width, 336);
    EXPECT_EQ(c.dimensions.base.height, 112);
    EXPECT_EQ(c.dimensions.background.width, 288);
    EXPECT_EQ(c.dimensions.background.height, 512);
    EXPECT_EQ(c.dimensions.background.fill_color, (Rgb{200, 200, 200}));
    EXPECT_EQ(c.metrics.save_path, "metrics");
    EXPECT_TRUE(c.metrics.save_on_reset);
    EXPECT_EQ(c, default_config());
}

TEST(Config, SerializeReproducesFixtureBytes) {
    EXPECT_EQ(serialize_config(default_config()), default_yaml());
    EXPECT_EQ(serialize_config(parse_config(default_yaml())), default_yaml());
}

TEST(Config, RoundTripIsIdentityOnRandomConfigs) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const GameConfig c = random_valid_config(rng);
        ASSERT_TRUE(validate_config(c).valid()) << validate_config(c).to_string();
        const std::string text = serialize_config(c);
        const GameConfig back = parse_config(text);
        EXPECT_EQ(back, c);
        EXPECT_EQ(serialize_config(back), text);
    }
}

TEST(Config, DefaultIsValid) { EXPECT_TRUE(validate_config(default_config()).valid()); }

TEST(Config, RejectsUnknownKeys) {
    std::string text = default_yaml();
    text.replace(text.find("  pipe_vel_x: -4"), 16, "  pipe_vel_x: -4\n  pipe_vel_y: 2");
    try {
        parse_config(text);
        FAIL() << "unknown key accepted";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "speed.pipe_vel_y");
    }
}

TEST(Config, RejectsMissingAndMistypedFields) {
    std::string missing = default_yaml();
    missing.erase(missing.find("    min_gap: 100\n"), 17);
    EXPECT_THROW(parse_config(missing), SchemaError);

    std::string mistyped = default_yaml();
    mistyped.replace(mistyped.find("min_gap: 100"), 12, "min_gap: wide");
    try {
        parse_config(mistyped);
        FAIL() << "non-integer accepted";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "dimensions.pipe.min_gap");
    }
    EXPECT_THROW(parse_config("speed: [1, 2"), SyntaxError);
    EXPECT_THROW(parse_config(""), SchemaError);
}

TEST(Config, ValidationNamesOffendingField) {
    GameConfig c = default_config();
    c.dimensions.pipe.min_gap = 200;
    const auto report = validate_config(c);
    ASSERT_FALSE(report.valid());
    EXPECT_EQ(report.violations.front().path, "dimensions.pipe.min_gap");

    GameConfig slow = default_config();
    slow.speed.pipe_vel_x = 0;
    EXPECT_FALSE(validate_config(slow).valid());

    GameConfig tall = default_config();
    tall.dimensions.pipe.max_gap = 260;  // 260 + 150 > 400 px of playfield
    EXPECT_FALSE(validate_config(tall).valid());
}

TEST(Config, DiffListsChangedPathsInDocumentOrder) {
    GameConfig b = default_config();
    b.dimensions.pipe.max_gap = 170;
    b.speed.pipe_vel_x = -5;
    const auto d = diff_configs(default_config(), b);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].path, "speed.pipe_vel_x");
    EXPECT_EQ(d[0].old_value, FieldValue{-4});
    EXPECT_EQ(d[0].new_value, FieldValue{-5});
    EXPECT_EQ(d[1].path, "dimensions.pipe.max_gap");
    EXPECT_TRUE(diff_configs(b, b).empty());
}

TEST(Config, LockedFieldSet) {
    for (const char* p : {"speed.player.flap_acc", "speed.player.max_vel_y", "dimensions.player.private_zone",
                          "dimensions.player.height", "dimensions.lidar.max_distance", "dimensions.base.height",
                          "dimensions.background.fill_color", "metrics.save_path"}) {
        EXPECT_TRUE(is_locked_field(p)) << p;
    }
    for (const char* p : {"speed.pipe_vel_x", "dimensions.pipe.min_gap", "dimensions.pipe.max_horizontal_spacing",
                          "dimensions.pipe.width"}) {
        EXPECT_FALSE(is_locked_field(p)) << p;
    }
}

TEST(Config, EnforceRevertsLockedFields) {
    GameConfig proposed = default_config();
    proposed.dimensions.lidar.max_distance = 300;
    proposed.speed.player.flap_acc = -12;
    proposed.dimensions.pipe.min_gap = 120;
    const auto out = enforce_designer_constraints(default_config(), proposed);
    EXPECT_EQ(out.config.dimensions.lidar.max_distance, 200);
    EXPECT_EQ(out.config.speed.player.flap_acc, -9);
    EXPECT_EQ(out.config.dimensions.pipe.min_gap, 120);
    ASSERT_EQ(out.violations.size(), 2u);
    EXPECT_EQ(out.violations[0].path, "speed.player.flap_acc");
    EXPECT_EQ(out.violations[1].path, "dimensions.lidar.max_distance");

    const auto same = enforce_designer_constraints(default_config(), default_config());
    EXPECT_EQ(same.config, default_config());
    EXPECT_TRUE(same.violations.empty());
}

TEST(Config, EnforceAgreesWithPrevOnEveryLockedPath) {
    std::mt19937_64 rng(11);
    const GameConfig prev = default_config();
    for (int i = 0; i < 300; ++i) {
        GameConfig proposed = prev;
        for (auto& f : fields(proposed)) {
            if (rng() % 3 != 0) continue;
            std::visit(
                [&](auto* p) {
                    using T = std::remove_pointer_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, int>) *p += static_cast<int>(rng() % 21) - 10;
                    if constexpr (std::is_same_v<T, bool>) *p = !*p;
                    if constexpr (std::is_same_v<T, std::string>) *p += "x";
                    if constexpr (std::is_same_v<T, Rgb>) (*p)[0] = static_cast<int>(rng() % 256);
                },
                f.target);
        }
        const auto out = enforce_designer_constraints(prev, proposed);
        for (const auto& f : fields(out.config)) {
            if (is_locked_field(f.path)) EXPECT_EQ(f.value(), *get_field(prev, f.path)) << f.path;
            else EXPECT_EQ(f.value(), *get_field(proposed, f.path)) << f.path;
        }
    }
}

TEST(Config, ScenariosAreValidAndMatchFixtures) {
    for (Scenario s : kAllScenarios) {
        const GameConfig c = broken_config(s);
        EXPECT_TRUE(validate_config(c).valid()) << to_string(s) << "\n" << validate_config(c).to_string();
        EXPECT_NE(c, default_config());
        const auto fixture = source_dir() / "fixtures" / "scenarios" / (std::string(to_string(s)) + ".yaml");
        EXPECT_EQ(read_text(fixture), serialize_config(c)) << fixture;
        EXPECT_EQ(scenario_from_string(to_string(s)), s);
        for (const auto& ch : diff_configs(default_config(), c)) EXPECT_FALSE(is_locked_field(ch.path)) << ch.path;
    }
    EXPECT_FALSE(scenario_from_string("too_slow"));
}

TEST(Config, LoadFileErrorsNameTheFile) {
    TempDir dir("cfg");
    const auto path = dir.path() / "bad.yaml";
    write_text(path, "speed: {pipe_vel_x: -4}\n");
    try {
        load_config_file(path.string());
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.yaml"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_config_file((dir.path() / "missing.yaml").string()), ConfigError);
}
