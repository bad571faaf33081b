#pragma once

#include "flapdesign/config.hpp"
#include "flapdesign/sim.hpp"
#include "flapdesign/traces.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

namespace flapdesign {

enum class PromptVariant { config_only, metrics_text, images_only, metrics_and_images };

inline constexpr std::array<PromptVariant, 4> kAllVariants{PromptVariant::config_only, PromptVariant::metrics_text,
                                                           PromptVariant::images_only,
                                                           PromptVariant::metrics_and_images};

std::string_view to_string(PromptVariant v);
std::optional<PromptVariant> variant_from_string(std::string_view s);
bool variant_uses_metrics(PromptVariant v);
bool variant_uses_images(PromptVariant v);

/// Number of recent episodes shown to the designer.
inline constexpr int kRecentEpisodes = 5;
inline constexpr int kDefaultTargetScore = 10;

class ArityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NoBlockFound : public std::runtime_error {
public:
    NoBlockFound() : std::runtime_error("response contains no ```yaml fenced block") {}
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AuthError : public TransportError {
public:
    using TransportError::TransportError;
};

// ---------------------------------------------------------------------------
// Chat messages

struct ContentPart {
    enum class Kind { text, image };
    Kind kind = Kind::text;
    std::string text;    // text parts
    EncodedImage image;  // image parts

    static ContentPart make_text(std::string t);
    static ContentPart make_image(EncodedImage img);
};

struct ChatMessage {
    std::string role;
    std::vector<ContentPart> parts;
};

/// The schema description shipped in fixtures/schema_description.txt.
const std::string& default_schema_description();

std::string system_prompt(PromptVariant v);

/// System + user messages for one design step. `traces` must hold 1..5
/// episodes for the metric variants and must be empty otherwise; `strips`
/// likewise for the image variants. For metrics_and_images the two must
/// have equal length and each metric line is followed by its image.
std::vector<ChatMessage> build_prompt(PromptVariant variant, const GameConfig& cfg,
                                      const std::string& schema_description, std::span<const EpisodeTrace> traces,
                                      std::span<const EncodedImage> strips);

/// Human-readable dump used for golden files; images appear as
/// "<image: label WxH, N bytes PNG>" placeholders.
std::string render_transcript(const std::vector<ChatMessage>& messages);

/// Inner text of the first ```yaml (or ```yml) fenced block, trimmed.
std::string extract_yaml_block(const std::string& response);

/// Prose before the first yaml fence, trimmed (the model's analysis).
std::string extract_analysis(const std::string& response);

// ---------------------------------------------------------------------------
// OpenAI-compatible wire format

struct SamplingParams {
    std::optional<double> temperature;
    std::optional<double> top_p;
    std::optional<int> max_tokens;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Request body for POST /chat/completions. Single-text messages use a
/// string `content`; anything else uses a parts array with image_url
/// parts carrying data:image/png;base64 URLs. Unset sampling fields are
/// omitted.
nlohmann::json chat_request_json(const std::string& model, const std::vector<ChatMessage>& messages,
                                 const SamplingParams& sampling);

/// Assistant text from a chat-completions response body.
std::string parse_chat_response(const std::string& body);

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// Sends one request and returns the assistant message text.
    virtual std::string complete(const nlohmann::json& request) = 0;
};

struct HttpSettings {
    std::string endpoint = "https://api.openai.com/v1";  // POST <endpoint>/chat/completions
    std::string api_key;
    std::chrono::seconds timeout{120};
    int max_retries = 3;  // for 429, 5xx and connection failures
    std::chrono::milliseconds backoff{1000};
};

class HttpChatTransport : public ChatTransport {
public:
    explicit HttpChatTransport(HttpSettings settings, std::stop_token stop = {});
    std::string complete(const nlohmann::json& request) override;

private:
    HttpSettings settings_;
    std::stop_token stop_;
    std::string scheme_host_;
    std::string path_;
};

/// Name of the environment variable holding the API key.
inline constexpr const char* kApiKeyEnv = "OPENAI_API_KEY";

/// Key from the environment; AuthError if unset or empty.
std::string api_key_from_env();

// ---------------------------------------------------------------------------
// Designers

enum class ExchangeStatus { ok, failed, transport_error };
std::string_view to_string(ExchangeStatus s);

struct DesignerExchange {
    PromptVariant variant = PromptVariant::config_only;
    std::string model;
    SamplingParams sampling;
    std::vector<ChatMessage> messages;  // full conversation incl. retries and replies
    std::vector<std::string> responses;  // raw assistant text per attempt
    std::string raw_response;            // last attempt
    std::optional<std::string> extracted_yaml;
    std::string analysis;
    ExchangeStatus status = ExchangeStatus::ok;
    std::string error;
    std::vector<Violation> violations;  // locked-field reverts
};

/// Images are stored by label only (the PNGs live next to the record).
nlohmann::json exchange_to_json(const DesignerExchange& ex);
DesignerExchange exchange_from_json(const nlohmann::json& j);

struct LlmSettings {
    std::string model = "gpt-4.1";
    SamplingParams sampling;
    int max_attempts = 3;
};

struct Proposal {
    GameConfig config;
    DesignerExchange exchange;
};

/// Ask the model for a revised config. Unparseable or invalid replies are
/// retried with the error appended as a user message; after max_attempts
/// the input config is returned and the exchange is marked failed.
/// TransportError/AuthError propagate.
Proposal llm_designer_propose(ChatTransport& transport, const LlmSettings& settings, PromptVariant variant,
                              const GameConfig& cfg, const std::string& schema_description,
                              std::span<const EpisodeTrace> traces, std::span<const EncodedImage> strips);

// Frozen controller constants; scripts/tune_heuristics.cpp reproduces the sweep.
inline constexpr double kScriptedGain = 0.2;            // px of gap per unit of log score error
inline constexpr double kScriptedSaturationBoost = 7.0;  // step multiplier on saturated batches

/// Offline proportional controller on the IQM score s of `traces`: opens
/// the gaps and slows the pipes when the game is too hard, the reverse when
/// it is too easy, and leaves the config alone within one point of target.
/// The gap step is gain * target * ln(target / max(s, 1)) px, rounded and
/// at least 1. A batch scoring 0, or one where most episodes survive to the
/// cap or the timeout, only bounds the error, so its step is multiplied by
/// `saturation_boost` and only such batches move pipe_vel_x.
GameConfig scripted_designer_propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces,
                                     int target_score = kDefaultTargetScore, double gain = kScriptedGain,
                                     double saturation_boost = kScriptedSaturationBoost);

enum class DesignerKind { identity, scripted, llm };
std::string_view to_string(DesignerKind k);
std::optional<DesignerKind> designer_kind_from_string(std::string_view s);

struct DesignResult {
    GameConfig config;
    std::optional<DesignerExchange> exchange;
};

class Designer {
public:
    virtual ~Designer() = default;
    virtual DesignerKind kind() const = 0;
    /// `strips` is empty unless the variant shows images.
    virtual DesignResult propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces,
                                 std::span<const EncodedImage> strips) = 0;
};

class IdentityDesigner : public Designer {
public:
    DesignerKind kind() const override { return DesignerKind::identity; }
    DesignResult propose(const GameConfig& cfg, std::span<const EpisodeTrace>,
                         std::span<const EncodedImage>) override {
        return {cfg, std::nullopt};
    }
};

class ScriptedDesigner : public Designer {
public:
    explicit ScriptedDesigner(int target = kDefaultTargetScore, double gain = kScriptedGain,
                              double saturation_boost = kScriptedSaturationBoost)
        : target_(target), gain_(gain), boost_(saturation_boost) {}
    DesignerKind kind() const override { return DesignerKind::scripted; }
    DesignResult propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces,
                         std::span<const EncodedImage>) override {
        return {scripted_designer_propose(cfg, traces, target_, gain_, boost_), std::nullopt};
    }
    int target() const { return target_; }
    double gain() const { return gain_; }
    double saturation_boost() const { return boost_; }

private:
    int target_;
    double gain_;
    double boost_;
};

class LlmDesigner : public Designer {
public:
    LlmDesigner(std::shared_ptr<ChatTransport> transport, LlmSettings settings, PromptVariant variant,
                std::string schema_description = default_schema_description())
        : transport_(std::move(transport)),
          settings_(std::move(settings)),
          variant_(variant),
          schema_(std::move(schema_description)) {}
    DesignerKind kind() const override { return DesignerKind::llm; }
    DesignResult propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces,
                         std::span<const EncodedImage> strips) override;
    const LlmSettings& settings() const { return settings_; }

private:
    std::shared_ptr<ChatTransport> transport_;
    LlmSettings settings_;
    PromptVariant variant_;
    std::string schema_;
};

}  // namespace flapdesign
