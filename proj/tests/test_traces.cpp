#include "flapdesign/agents.hpp"
#include "flapdesign/traces.hpp"
#include "png_decode.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace flapdesign;
using namespace flapdesign::testing;

namespace {

EpisodeTrace played(std::uint64_t seed, PolicyKind kind = PolicyKind::heuristic_gap,
                    const GameConfig& cfg = default_config()) {
    return run_episode(cfg, make_policy(kind), seed);
}

}  // namespace

TEST(Traces, SummaryLineFormat) {
    EXPECT_EQ(summary_line(1, make_trace(7, TerminationReason::collision, 22.0333)),
              "Episode 1: score=7, flight_time=22.0s, termination=collision");
    EXPECT_EQ(summary_line(5, make_trace(30, TerminationReason::max_score_30, 62.56)),
              "Episode 5: score=30, flight_time=62.6s, termination=max_score_30");
    const std::vector<EpisodeTrace> two{make_trace(1), make_trace(2, TerminationReason::timeout_120s, 120.0)};
    EXPECT_EQ(summarize_text(two),
              "Episode 1: score=1, flight_time=10.0s, termination=collision\n"
              "Episode 2: score=2, flight_time=120.0s, termination=timeout_120s\n");
}

TEST(Traces, EpisodesJsonlKeys) {
    const std::vector<EpisodeTrace> ts{played(1), played(2, PolicyKind::always_idle)};
    const std::string text = episodes_to_jsonl(ts);
    std::istringstream in(text);
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::ordered_json::parse(line);
        std::vector<std::string> keys;
        for (const auto& [k, v] : j.items()) keys.push_back(k);
        EXPECT_EQ(keys, (std::vector<std::string>{"episode_id", "seed", "score", "ticks", "duration_s", "termination",
                                                  "max_height"}));
        EXPECT_EQ(j["score"], ts[i].score);
        EXPECT_EQ(j["termination"], std::string(to_string(ts[i].termination)));
        ++i;
    }
    EXPECT_EQ(i, ts.size());
}

TEST(Traces, StripTicksForLongEpisodes) {
    const EpisodeTrace t = played(3);
    ASSERT_GT(t.ticks, 240);
    const auto ticks = strip_ticks(t);
    ASSERT_EQ(ticks.size(), 25u);
    for (int j = 0; j < 25; ++j) EXPECT_EQ(ticks[static_cast<std::size_t>(j)], t.ticks - 240 + 10 * j);
}

TEST(Traces, StripTicksPadShortEpisodes) {
    const EpisodeTrace t = played(3, PolicyKind::always_idle);
    ASSERT_LT(t.ticks, 240);
    const auto ticks = strip_ticks(t);
    ASSERT_EQ(ticks.size(), 25u);
    const int first = t.frames.front().tick;
    int padded = 0;
    for (int j = 0; j < 25; ++j) {
        const int want = t.ticks - 240 + 10 * j;
        EXPECT_EQ(ticks[static_cast<std::size_t>(j)], std::max(first, want));
        padded += want < first;
    }
    EXPECT_GT(padded, 0);
    EXPECT_EQ(ticks.back(), t.ticks);
}

TEST(Traces, CompositeLayout) {
    const GameConfig cfg = default_config();
    const EpisodeTrace t = played(5);
    const FrameBuffer strip = composite_strip(t, cfg);
    EXPECT_EQ(strip.width, 5 * 288 + 4 * 2);
    EXPECT_EQ(strip.height, 5 * 512 + 4 * 2);
    // Separators.
    for (int k = 1; k < 5; ++k) {
        const int x = k * 288 + (k - 1) * 2;
        EXPECT_EQ(strip.at(x, 10), kSeparatorColor);
        EXPECT_EQ(strip.at(10, k * 512 + (k - 1) * 2 + 1), kSeparatorColor);
    }
    // Tile j is the render of the j-th sampled frame.
    const auto ticks = strip_ticks(t);
    for (int j : {0, 7, 24}) {
        const int tick = ticks[static_cast<std::size_t>(j)];
        const auto it = std::find_if(t.frames.begin(), t.frames.end(), [&](const auto& f) { return f.tick == tick; });
        ASSERT_NE(it, t.frames.end());
        const FrameBuffer tile = render_frame(it->state, cfg);
        const int ox = (j % 5) * 290;
        const int oy = (j / 5) * 514;
        for (int y = 0; y < 512; y += 37) {
            for (int x = 0; x < 288; x += 23) ASSERT_EQ(strip.at(ox + x, oy + y), tile.at(x, y)) << j;
        }
    }
}

TEST(Traces, RenderFrameColors) {
    const GameConfig cfg = default_config();
    GameState s = reset(cfg, 1);
    s.pipes.clear();
    const FrameBuffer f = render_frame(s, cfg);
    EXPECT_EQ(f.width, 288);
    EXPECT_EQ(f.height, 512);
    EXPECT_EQ(f.at(5, 5), cfg.dimensions.background.fill_color);
    EXPECT_EQ(f.at(5, 450), kGroundColor);
    EXPECT_EQ(f.at(kPlayerX + 3, s.player_y + 3), kPlayerColor);
}

TEST(Traces, MissingFramesAreAnError) {
    EpisodeTrace t = played(5);
    t.frames.clear();
    EXPECT_THROW(composite_strip(t, default_config()), std::exception);
}

TEST(Traces, DownscaleAveragesBlocks) {
    FrameBuffer f(4, 2);
    f.fill_rect(0, 0, 1, 1, {255, 0, 0});
    f.fill_rect(1, 0, 2, 2, {0, 0, 100});
    const FrameBuffer d = downscale(f, 2);
    ASSERT_EQ(d.width, 2);
    ASSERT_EQ(d.height, 1);
    EXPECT_EQ(d.at(0, 0), (Rgb{64, 0, 50}));
    EXPECT_EQ(d.at(1, 0), (Rgb{0, 0, 0}));
    EXPECT_EQ(downscale(f, 1), f);
}

TEST(Traces, PngRoundTripsLosslessly) {
    FrameBuffer f(37, 11);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) f.fill_rect(x, y, x + 1, y + 1, {x * 7 % 256, y * 23 % 256, (x * y) % 256});
    }
    EXPECT_EQ(decode_png(encode_png(f)), f);

    const EpisodeTrace t = played(8);
    const FrameBuffer strip = composite_strip(t, default_config());
    EXPECT_EQ(decode_png(encode_png(strip)), strip);

    const EncodedImage img = strip_image(t, default_config(), 3);
    EXPECT_EQ(img.label, "strip_ep3.png");
    EXPECT_EQ(img.width, strip.width / 2);
    EXPECT_EQ(img.height, strip.height / 2);
    EXPECT_EQ(decode_png(img.png), downscale(strip, 2));
}
