#include "flapdesign/traces.hpp"

#include <nlohmann/json.hpp>
#include <zlib.h>

#include <algorithm>
#include <cstdio>

namespace flapdesign {

std::string summary_line(int index, const EpisodeTrace& trace) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "Episode %d: score=%d, flight_time=%.1fs, termination=%s", index, trace.score,
                  trace.duration_s, std::string(to_string(trace.termination)).c_str());
    return buf;
}

std::string summarize_text(std::span<const EpisodeTrace> traces) {
    std::string out;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        out += summary_line(static_cast<int>(i) + 1, traces[i]);
        out += '\n';
    }
    return out;
}

std::string episodes_to_jsonl(std::span<const EpisodeTrace> traces) {
    std::string out;
    for (const auto& t : traces) {
        nlohmann::ordered_json j;
        j["episode_id"] = t.episode_id;
        j["seed"] = t.seed;
        j["score"] = t.score;
        j["ticks"] = t.ticks;
        j["duration_s"] = t.duration_s;
        j["termination"] = std::string(to_string(t.termination));
        j["max_height"] = t.max_height;
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

FrameBuffer::FrameBuffer(int w, int h, Rgb fill) : width(w), height(h) {
    pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = static_cast<std::uint8_t>(fill[0]);
        pixels[i + 1] = static_cast<std::uint8_t>(fill[1]);
        pixels[i + 2] = static_cast<std::uint8_t>(fill[2]);
    }
}

Rgb FrameBuffer::at(int x, int y) const {
    const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {pixels[o], pixels[o + 1], pixels[o + 2]};
}

void FrameBuffer::fill_rect(int left, int top, int right, int bottom, Rgb color) {
    left = std::max(left, 0);
    top = std::max(top, 0);
    right = std::min(right, width);
    bottom = std::min(bottom, height);
    for (int y = top; y < bottom; ++y) {
        std::uint8_t* row = pixels.data() + (static_cast<std::size_t>(y) * static_cast<std::size_t>(width)) * 3;
        for (int x = left; x < right; ++x) {
            row[x * 3] = static_cast<std::uint8_t>(color[0]);
            row[x * 3 + 1] = static_cast<std::uint8_t>(color[1]);
            row[x * 3 + 2] = static_cast<std::uint8_t>(color[2]);
        }
    }
}

FrameBuffer render_frame(const GameState& state, const GameConfig& cfg) {
    const auto& bg = cfg.dimensions.background;
    FrameBuffer fb(bg.width, bg.height, bg.fill_color);
    for (const auto& p : state.pipes) {
        const Rect up = upper_pipe_rect(p, cfg);
        const Rect low = lower_pipe_rect(p, cfg);
        fb.fill_rect(up.left, up.top, up.right, up.bottom, kPipeColor);
        fb.fill_rect(low.left, low.top, low.right, low.bottom, kPipeColor);
    }
    fb.fill_rect(0, ground_y(cfg), bg.width, bg.height, kGroundColor);
    const Rect body = player_rect(state.player_y, cfg);
    fb.fill_rect(body.left, body.top, body.right, body.bottom, kPlayerColor);
    return fb;
}

std::vector<int> strip_ticks(const EpisodeTrace& trace) {
    if (trace.frames.empty()) throw std::invalid_argument("composite strip needs at least one frame");
    const int first = trace.frames.front().tick;
    std::vector<int> ticks;
    ticks.reserve(kStripFrames);
    for (int j = 0; j < kStripFrames; ++j) {
        ticks.push_back(std::max(first, trace.ticks - kStripWindowTicks + j * kStripStrideTicks));
    }
    return ticks;
}

FrameBuffer composite_strip(const EpisodeTrace& trace, const GameConfig& cfg) {
    const std::vector<int> ticks = strip_ticks(trace);
    const int tile_w = cfg.dimensions.background.width;
    const int tile_h = cfg.dimensions.background.height;
    FrameBuffer out(kStripGrid * tile_w + (kStripGrid - 1) * kStripSeparator,
                    kStripGrid * tile_h + (kStripGrid - 1) * kStripSeparator, kSeparatorColor);

    for (std::size_t k = 0; k < ticks.size(); ++k) {
        auto it = std::find_if(trace.frames.begin(), trace.frames.end(),
                               [&](const FrameSample& f) { return f.tick == ticks[k]; });
        if (it == trace.frames.end()) throw std::invalid_argument("trace is missing frame for tick " + std::to_string(ticks[k]));
        const FrameBuffer tile = render_frame(it->state, cfg);
        const int col = static_cast<int>(k) % kStripGrid;
        const int row = static_cast<int>(k) / kStripGrid;
        const int ox = col * (tile_w + kStripSeparator);
        const int oy = row * (tile_h + kStripSeparator);
        for (int y = 0; y < tile_h; ++y) {
            std::copy_n(tile.pixels.begin() + static_cast<std::ptrdiff_t>(y) * tile_w * 3, tile_w * 3,
                        out.pixels.begin() + (static_cast<std::ptrdiff_t>(oy + y) * out.width + ox) * 3);
        }
    }
    return out;
}

FrameBuffer downscale(const FrameBuffer& frame, int factor) {
    if (factor <= 1) return frame;
    const int w = std::max(1, frame.width / factor);
    const int h = std::max(1, frame.height / factor);
    FrameBuffer out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sum[3] = {0, 0, 0};
            int count = 0;
            for (int dy = 0; dy < factor; ++dy) {
                for (int dx = 0; dx < factor; ++dx) {
                    const int sx = x * factor + dx;
                    const int sy = y * factor + dy;
                    if (sx >= frame.width || sy >= frame.height) continue;
                    const Rgb c = frame.at(sx, sy);
                    sum[0] += c[0];
                    sum[1] += c[1];
                    sum[2] += c[2];
                    ++count;
                }
            }
            const std::size_t o = (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) * 3;
            for (int c = 0; c < 3; ++c) out.pixels[o + c] = static_cast<std::uint8_t>((sum[c] + count / 2) / count);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// PNG

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const FrameBuffer& frame) {
    if (frame.width <= 0 || frame.height <= 0) throw EncodeError("PNG needs a non-empty frame");
    const std::size_t stride = static_cast<std::size_t>(frame.width) * 3;
    if (frame.pixels.size() != stride * static_cast<std::size_t>(frame.height)) {
        throw EncodeError("pixel buffer size does not match width x height x 3");
    }

    // Each scanline is prefixed with filter type 0 (None).
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * static_cast<std::size_t>(frame.height));
    for (int y = 0; y < frame.height; ++y) {
        raw.push_back(0);
        const auto row = frame.pixels.begin() + static_cast<std::ptrdiff_t>(stride) * y;
        raw.insert(raw.end(), row, row + static_cast<std::ptrdiff_t>(stride));
    }
    uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_len);
    if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
        throw EncodeError("zlib compression failed");
    }
    packed.resize(packed_len);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(frame.width));
    put_u32(ihdr, static_cast<std::uint32_t>(frame.height));
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // bit depth 8, truecolor, deflate, adaptive filter, no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

EncodedImage strip_image(const EpisodeTrace& trace, const GameConfig& cfg, int episode_index, int scale) {
    const FrameBuffer strip = downscale(composite_strip(trace, cfg), scale);
    return {encode_png(strip), strip.width, strip.height, "strip_ep" + std::to_string(episode_index) + ".png"};
}

}  // namespace flapdesign
