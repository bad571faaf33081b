#pragma once

#include "flapdesign/sim.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flapdesign {

// ---------------------------------------------------------------------------
// Text summaries

/// "Episode <k>: score=<s>, flight_time=<t.t>s, termination=<reason>", k 1-based.
std::string summary_line(int index, const EpisodeTrace& trace);

/// One summary_line per trace, each newline-terminated.
std::string summarize_text(std::span<const EpisodeTrace> traces);

/// One JSON object per line: id, seed, score, duration, termination, max height.
std::string episodes_to_jsonl(std::span<const EpisodeTrace> traces);

// ---------------------------------------------------------------------------
// Images

struct FrameBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB

    FrameBuffer() = default;
    FrameBuffer(int w, int h, Rgb fill = {0, 0, 0});

    Rgb at(int x, int y) const;
    void fill_rect(int left, int top, int right, int bottom, Rgb color);
    bool operator==(const FrameBuffer&) const = default;
};

inline constexpr Rgb kGroundColor{222, 216, 149};
inline constexpr Rgb kPipeColor{84, 184, 72};
inline constexpr Rgb kPlayerColor{230, 60, 40};
inline constexpr Rgb kSeparatorColor{32, 32, 32};
inline constexpr int kStripGrid = 5;
inline constexpr int kStripSeparator = 2;
inline constexpr int kDefaultImageScale = 2;

/// Background-sized image of one state: fill color, pipes, ground band, player box.
FrameBuffer render_frame(const GameState& state, const GameConfig& cfg);

/// Ticks shown by the strip, oldest first: T-240, T-230, ..., T, with ticks
/// before the first recorded frame replaced by that frame's tick.
std::vector<int> strip_ticks(const EpisodeTrace& trace);

/// 5x5 montage of the last 8 s of play, row-major chronological, 2 px separators.
FrameBuffer composite_strip(const EpisodeTrace& trace, const GameConfig& cfg);

/// Box-filter downscale by an integer factor (1 returns the input).
FrameBuffer downscale(const FrameBuffer& frame, int factor);

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit RGB PNG, no interlace.
std::vector<std::uint8_t> encode_png(const FrameBuffer& frame);

struct EncodedImage {
    std::vector<std::uint8_t> png;
    int width = 0;
    int height = 0;
    std::string label;  // e.g. "strip_ep1.png"
};

/// Strip for one episode, downscaled by `scale` and PNG encoded.
EncodedImage strip_image(const EpisodeTrace& trace, const GameConfig& cfg, int episode_index,
                         int scale = kDefaultImageScale);

}  // namespace flapdesign
