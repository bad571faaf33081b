#include "flapdesign/designer.hpp"

#include "flapdesign/stats.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace flapdesign {

std::string_view to_string(PromptVariant v) {
    switch (v) {
        case PromptVariant::config_only: return "config_only";
        case PromptVariant::metrics_text: return "metrics_text";
        case PromptVariant::images_only: return "images_only";
        case PromptVariant::metrics_and_images: return "metrics_and_images";
    }
    return "unknown";
}

std::optional<PromptVariant> variant_from_string(std::string_view s) {
    for (auto v : kAllVariants) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

bool variant_uses_metrics(PromptVariant v) {
    return v == PromptVariant::metrics_text || v == PromptVariant::metrics_and_images;
}

bool variant_uses_images(PromptVariant v) {
    return v == PromptVariant::images_only || v == PromptVariant::metrics_and_images;
}

ContentPart ContentPart::make_text(std::string t) {
    ContentPart p;
    p.kind = Kind::text;
    p.text = std::move(t);
    return p;
}

ContentPart ContentPart::make_image(EncodedImage img) {
    ContentPart p;
    p.kind = Kind::image;
    p.image = std::move(img);
    return p;
}

// ---------------------------------------------------------------------------
// Prompt templates

namespace {

const std::string kCommonPrefix =
    "You are a game designer tasked with improving the difficulty of a Flappy Bird game. "
    "Your goal is to modify game configuration so the game is challenging but not excessively difficult.\n\n";

const std::string kCommonSuffix =
    "SECOND, provide the *complete* YAML for the new configuration, enclosed in a markdown fenced code block like:\n"
    "```yaml\n<your yaml here>\n```\n"
    "The goal is to arrive at a good configuration with as few attempts as possible.\n"
    "Do not modify the LIDAR parameters."
    "Do not modify the player speed parameters. Only modify the parameters related to the pipes, including "
    "`pipe_vel_x`.";

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string system_prompt(PromptVariant v) {
    switch (v) {
        case PromptVariant::config_only:
            return kCommonPrefix +
                   "Below you will find (1) a *schema* describing every configuration parameter, and (2) the "
                   "*current* configuration.\n\n"
                   "First, ANALYSE the configuration and explain (succinctly) what changes would improve "
                   "gameplay.\n" +
                   kCommonSuffix;
        case PromptVariant::images_only:
            return kCommonPrefix +
                   "Below you will find (1) a *schema* describing every configuration parameter, (2) the "
                   "*current* configuration, and (3) a set of gameplay snapshots from recent sessions.\n\n"
                   "Aim for passing 10 pipes."
                   "First, ANALYSE the configuration and images and explain (succinctly) the current level of "
                   "difficulty and what changes would improve gameplay.\n" +
                   kCommonSuffix;
        case PromptVariant::metrics_text:
            return kCommonPrefix +
                   "Below you will find (1) a *schema* describing every configuration parameter, (2) the "
                   "*current* configuration, and (3) a handful of recent game-session metrics.\n\n"
                   "Aim for a score of 10."
                   "First, ANALYSE the configuration and metrics (paying special attention to the recorded "
                   "scores) and explain (succinctly) the current level of difficulty and what changes would "
                   "improve gameplay.\n" +
                   kCommonSuffix;
        case PromptVariant::metrics_and_images:
            return kCommonPrefix +
                   "Below you will find (1) a *schema* describing every configuration parameter, (2) the "
                   "*current* configuration, and (3) recent game-session metrics together with gameplay "
                   "snapshots.\n\n"
                   "Aim for a score of 10."
                   "First, ANALYSE the configuration and metrics and explain (succinctly) the current level of "
                   "difficulty and what changes would improve gameplay.\n" +
                   kCommonSuffix;
    }
    throw std::invalid_argument("unknown prompt variant");
}

std::vector<ChatMessage> build_prompt(PromptVariant variant, const GameConfig& cfg,
                                      const std::string& schema_description, std::span<const EpisodeTrace> traces,
                                      std::span<const EncodedImage> strips) {
    const bool metrics = variant_uses_metrics(variant);
    const bool images = variant_uses_images(variant);
    auto check = [&](bool wanted, std::size_t got, const char* what) {
        if (!wanted && got != 0) {
            throw ArityError(std::string(to_string(variant)) + " takes no " + what + ", got " + std::to_string(got));
        }
        if (wanted && (got < 1 || got > static_cast<std::size_t>(kRecentEpisodes))) {
            throw ArityError(std::string(to_string(variant)) + " needs 1.." + std::to_string(kRecentEpisodes) + " " +
                             what + ", got " + std::to_string(got));
        }
    };
    check(metrics, traces.size(), "traces");
    check(images, strips.size(), "strips");
    if (metrics && images && traces.size() != strips.size()) {
        throw ArityError("metrics_and_images needs one strip per trace");
    }

    std::string header = "Configuration schema (read-only):\n" + schema_description + "\n\n" +
                         "Base configuration (YAML):\n" + serialize_config(cfg);
    const std::string n_recent = std::to_string(kRecentEpisodes);
    switch (variant) {
        case PromptVariant::config_only:
            break;
        case PromptVariant::metrics_text:
            header += "\n\nBelow you will find up to " + n_recent + " recent session metrics.";
            break;
        case PromptVariant::images_only:
            header += "\n\nBelow you will find up to " + n_recent + " gameplay snapshots from recent sessions.";
            break;
        case PromptVariant::metrics_and_images:
            header += "\n\nBelow you will find up to " + n_recent +
                      " recent session metrics, each followed by a gameplay snapshot.";
            break;
    }

    ChatMessage user{"user", {ContentPart::make_text(std::move(header))}};
    const std::size_t n = std::max(traces.size(), strips.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (metrics) user.parts.push_back(ContentPart::make_text(summary_line(static_cast<int>(k) + 1, traces[k])));
        if (images) user.parts.push_back(ContentPart::make_image(strips[k]));
    }
    return {ChatMessage{"system", {ContentPart::make_text(system_prompt(variant))}}, std::move(user)};
}

std::string render_transcript(const std::vector<ChatMessage>& messages) {
    std::string out;
    for (const auto& m : messages) {
        for (const auto& p : m.parts) {
            if (p.kind == ContentPart::Kind::text) {
                out += "### " + m.role + " (text)\n" + p.text + "\n";
            } else {
                out += "### " + m.role + " (image)\n<image: " + p.image.label + " " + std::to_string(p.image.width) +
                       "x" + std::to_string(p.image.height) + ", " + std::to_string(p.image.png.size()) +
                       " bytes PNG>\n";
            }
        }
    }
    return out;
}

namespace {

struct Fence {
    std::size_t fence_start;
    std::size_t body_start;
    std::size_t body_end;
};

std::optional<Fence> find_yaml_fence(const std::string& text) {
    std::size_t pos = 0;
    while ((pos = text.find("```", pos)) != std::string::npos) {
        const std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) return std::nullopt;
        std::string tag = trim(std::string_view(text).substr(pos + 3, eol - pos - 3));
        std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::tolower(c); });
        const std::size_t close = text.find("```", eol + 1);
        if (tag == "yaml" || tag == "yml") {
            if (close == std::string::npos) return std::nullopt;
            return Fence{pos, eol + 1, close};
        }
        if (close == std::string::npos) return std::nullopt;
        pos = close + 3;  // skip a non-yaml block entirely
    }
    return std::nullopt;
}

}  // namespace

std::string extract_yaml_block(const std::string& response) {
    auto fence = find_yaml_fence(response);
    if (!fence) throw NoBlockFound();
    return trim(std::string_view(response).substr(fence->body_start, fence->body_end - fence->body_start));
}

std::string extract_analysis(const std::string& response) {
    auto fence = find_yaml_fence(response);
    return trim(fence ? std::string_view(response).substr(0, fence->fence_start) : std::string_view(response));
}

// ---------------------------------------------------------------------------
// Wire format

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

nlohmann::json chat_request_json(const std::string& model, const std::vector<ChatMessage>& messages,
                                 const SamplingParams& sampling) {
    nlohmann::ordered_json req;
    req["model"] = model;
    auto& arr = req["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
        nlohmann::ordered_json msg;
        msg["role"] = m.role;
        if (m.parts.size() == 1 && m.parts[0].kind == ContentPart::Kind::text) {
            msg["content"] = m.parts[0].text;
        } else {
            auto& content = msg["content"] = nlohmann::ordered_json::array();
            for (const auto& p : m.parts) {
                if (p.kind == ContentPart::Kind::text) {
                    content.push_back({{"type", "text"}, {"text", p.text}});
                } else {
                    content.push_back(
                        {{"type", "image_url"},
                         {"image_url", {{"url", "data:image/png;base64," + base64_encode(p.image.png)}}}});
                }
            }
        }
        arr.push_back(std::move(msg));
    }
    if (sampling.temperature) req["temperature"] = *sampling.temperature;
    if (sampling.top_p) req["top_p"] = *sampling.top_p;
    if (sampling.max_tokens) req["max_tokens"] = *sampling.max_tokens;
    return nlohmann::json::parse(req.dump());
}

std::string parse_chat_response(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("response is not JSON: ") + e.what());
    }
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            std::string text;
            for (const auto& part : content) {
                if (part.value("type", "") == "text") text += part.value("text", "");
            }
            return text;
        }
        throw TransportError("response message has no text content");
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("unexpected response shape: ") + e.what());
    }
}

HttpChatTransport::HttpChatTransport(HttpSettings settings, std::stop_token stop)
    : settings_(std::move(settings)), stop_(std::move(stop)) {
    const std::string& url = settings_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an http(s) URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? std::string() : url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
}

std::string HttpChatTransport::complete(const nlohmann::json& request) {
    httplib::Client client(scheme_host_);
    const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(settings_.timeout).count();
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);
    const std::string body = request.dump();

    std::stop_callback on_stop(stop_, [&client] { client.stop(); });
    std::string last_error;
    for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
        if (stop_.stop_requested()) throw TransportError("request cancelled");
        if (attempt > 0) {
            const auto deadline = std::chrono::steady_clock::now() + settings_.backoff * (1 << (attempt - 1));
            while (std::chrono::steady_clock::now() < deadline) {
                if (stop_.stop_requested()) throw TransportError("request cancelled");
                std::this_thread::sleep_for(std::chrono::milliseconds(10));
            }
        }
        auto res = client.Post(path_, headers, body, "application/json",
                               [this](std::uint64_t, std::uint64_t) { return !stop_.stop_requested(); });
        if (!res) {
            if (stop_.stop_requested()) throw TransportError("request cancelled");
            last_error = "connection to " + scheme_host_ + " failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return parse_chat_response(res->body);
        const std::string detail = "HTTP " + std::to_string(res->status) + " from " + scheme_host_ + path_ + ": " +
                                   res->body.substr(0, 300);
        if (res->status == 401 || res->status == 403) throw AuthError(detail);
        if (res->status == 429 || res->status >= 500) {
            last_error = detail;
            continue;
        }
        throw TransportError(detail);
    }
    throw TransportError(last_error + " (gave up after " + std::to_string(settings_.max_retries + 1) + " attempts)");
}

std::string api_key_from_env() {
    const char* key = std::getenv(kApiKeyEnv);
    if (key == nullptr || *key == '\0') {
        throw AuthError(std::string("no API key: set the ") + kApiKeyEnv + " environment variable");
    }
    return key;
}

// ---------------------------------------------------------------------------
// Exchange records

std::string_view to_string(ExchangeStatus s) {
    switch (s) {
        case ExchangeStatus::ok: return "ok";
        case ExchangeStatus::failed: return "failed";
        case ExchangeStatus::transport_error: return "transport_error";
    }
    return "unknown";
}

nlohmann::json exchange_to_json(const DesignerExchange& ex) {
    nlohmann::ordered_json j;
    j["variant"] = std::string(to_string(ex.variant));
    j["model"] = ex.model;
    nlohmann::ordered_json sampling = nlohmann::ordered_json::object();
    if (ex.sampling.temperature) sampling["temperature"] = *ex.sampling.temperature;
    if (ex.sampling.top_p) sampling["top_p"] = *ex.sampling.top_p;
    if (ex.sampling.max_tokens) sampling["max_tokens"] = *ex.sampling.max_tokens;
    j["sampling"] = sampling;
    j["status"] = std::string(to_string(ex.status));
    j["error"] = ex.error;
    auto& msgs = j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : ex.messages) {
        nlohmann::ordered_json parts = nlohmann::ordered_json::array();
        for (const auto& p : m.parts) {
            if (p.kind == ContentPart::Kind::text) {
                parts.push_back({{"type", "text"}, {"text", p.text}});
            } else {
                parts.push_back({{"type", "image"},
                                 {"label", p.image.label},
                                 {"width", p.image.width},
                                 {"height", p.image.height}});
            }
        }
        msgs.push_back({{"role", m.role}, {"parts", std::move(parts)}});
    }
    j["responses"] = ex.responses;
    j["raw_response"] = ex.raw_response;
    j["extracted_yaml"] = ex.extracted_yaml ? nlohmann::ordered_json(*ex.extracted_yaml) : nlohmann::ordered_json();
    j["analysis"] = ex.analysis;
    auto& viol = j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : ex.violations) viol.push_back({{"path", v.path}, {"message", v.message}});
    return nlohmann::json::parse(j.dump());
}

DesignerExchange exchange_from_json(const nlohmann::json& j) {
    DesignerExchange ex;
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw std::invalid_argument("unknown variant in exchange record");
    ex.variant = *variant;
    ex.model = j.at("model").get<std::string>();
    const auto& s = j.at("sampling");
    if (s.contains("temperature")) ex.sampling.temperature = s["temperature"].get<double>();
    if (s.contains("top_p")) ex.sampling.top_p = s["top_p"].get<double>();
    if (s.contains("max_tokens")) ex.sampling.max_tokens = s["max_tokens"].get<int>();
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") ex.status = ExchangeStatus::ok;
    else if (status == "failed") ex.status = ExchangeStatus::failed;
    else if (status == "transport_error") ex.status = ExchangeStatus::transport_error;
    else throw std::invalid_argument("unknown exchange status '" + status + "'");
    ex.error = j.at("error").get<std::string>();
    for (const auto& m : j.at("messages")) {
        ChatMessage msg{m.at("role").get<std::string>(), {}};
        for (const auto& p : m.at("parts")) {
            if (p.at("type") == "text") {
                msg.parts.push_back(ContentPart::make_text(p.at("text").get<std::string>()));
            } else {
                EncodedImage img;
                img.label = p.at("label").get<std::string>();
                img.width = p.at("width").get<int>();
                img.height = p.at("height").get<int>();
                msg.parts.push_back(ContentPart::make_image(std::move(img)));
            }
        }
        ex.messages.push_back(std::move(msg));
    }
    ex.responses = j.at("responses").get<std::vector<std::string>>();
    ex.raw_response = j.at("raw_response").get<std::string>();
    if (!j.at("extracted_yaml").is_null()) ex.extracted_yaml = j["extracted_yaml"].get<std::string>();
    ex.analysis = j.at("analysis").get<std::string>();
    for (const auto& v : j.at("violations")) {
        ex.violations.push_back({v.at("path").get<std::string>(), v.at("message").get<std::string>()});
    }
    return ex;
}

// ---------------------------------------------------------------------------
// LLM designer

Proposal llm_designer_propose(ChatTransport& transport, const LlmSettings& settings, PromptVariant variant,
                              const GameConfig& cfg, const std::string& schema_description,
                              std::span<const EpisodeTrace> traces, std::span<const EncodedImage> strips) {
    Proposal out{cfg, {}};
    DesignerExchange& ex = out.exchange;
    ex.variant = variant;
    ex.model = settings.model;
    ex.sampling = settings.sampling;
    ex.messages = build_prompt(variant, cfg, schema_description, traces, strips);

    const int attempts = std::max(1, settings.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        const std::string reply = transport.complete(chat_request_json(settings.model, ex.messages, settings.sampling));
        ex.responses.push_back(reply);
        ex.raw_response = reply;
        ex.analysis = extract_analysis(reply);

        std::string problem;
        try {
            std::string yaml = extract_yaml_block(reply);
            ex.extracted_yaml = yaml;
            ConstrainedConfig constrained = enforce_designer_constraints(cfg, parse_config(yaml));
            const ValidationReport report = validate_config(constrained.config);
            if (report.valid()) {
                out.config = std::move(constrained.config);
                ex.violations = std::move(constrained.violations);
                ex.status = ExchangeStatus::ok;
                ex.error.clear();
                return out;
            }
            problem = "the configuration is invalid:\n" + report.to_string();
        } catch (const NoBlockFound& e) {
            ex.extracted_yaml.reset();
            problem = e.what();
        } catch (const ConfigError& e) {
            problem = std::string("the YAML could not be loaded: ") + e.what();
        }

        ex.status = ExchangeStatus::failed;
        ex.error = problem;
        if (attempt == attempts) break;
        ex.messages.push_back({"assistant", {ContentPart::make_text(reply)}});
        ex.messages.push_back(
            {"user",
             {ContentPart::make_text("Your previous answer could not be used: " + problem +
                                     "\nPlease answer again and provide the *complete* YAML configuration in a "
                                     "```yaml fenced code block.")}});
    }
    out.config = cfg;
    return out;
}

DesignResult LlmDesigner::propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces,
                                  std::span<const EncodedImage> strips) {
    auto shown_traces = variant_uses_metrics(variant_) ? traces.first(std::min<std::size_t>(traces.size(), kRecentEpisodes))
                                                       : std::span<const EpisodeTrace>{};
    auto shown_strips = variant_uses_images(variant_) ? strips.first(std::min<std::size_t>(strips.size(), kRecentEpisodes))
                                                      : std::span<const EncodedImage>{};
    try {
        Proposal p = llm_designer_propose(*transport_, settings_, variant_, cfg, schema_, shown_traces, shown_strips);
        return {std::move(p.config), std::move(p.exchange)};
    } catch (const AuthError&) {
        throw;
    } catch (const TransportError& e) {
        DesignerExchange ex;
        ex.variant = variant_;
        ex.model = settings_.model;
        ex.sampling = settings_.sampling;
        ex.messages = build_prompt(variant_, cfg, schema_, shown_traces, shown_strips);
        ex.status = ExchangeStatus::transport_error;
        ex.error = e.what();
        return {cfg, std::move(ex)};
    }
}

// ---------------------------------------------------------------------------
// Scripted designer

GameConfig scripted_designer_propose(const GameConfig& cfg, std::span<const EpisodeTrace> traces, int target_score,
                                     double gain, double saturation_boost) {
    if (traces.empty()) throw std::invalid_argument("scripted designer needs at least one trace");
    if (target_score <= 0) throw std::invalid_argument("target score must be positive");

    std::vector<double> scores;
    int survived = 0;
    for (const auto& t : traces) {
        scores.push_back(t.score);
        survived += t.termination != TerminationReason::collision;
    }
    const double s = iqm(scores);
    const double e = target_score - s;
    if (std::abs(e) <= 1.0) return cfg;

    // Most episodes reaching the cap or the clock carry no more information
    // than "too easy", like a zero score for "too hard".
    const bool saturated = s <= 0.0 || 2 * survived > static_cast<int>(traces.size());
    const double log_error = target_score * std::log(target_score / std::max(s, 1.0));
    int delta = static_cast<int>(std::lround(gain * log_error * (saturated ? saturation_boost : 1.0)));
    if (delta == 0) delta = e > 0 ? 1 : -1;

    const GameConfig defaults = default_config();
    const auto& def_pipe = defaults.dimensions.pipe;
    GameConfig out = cfg;
    auto& pipe = out.dimensions.pipe;
    const int gap_ceiling = cfg.playfield_height() - pipe.max_gap_distance;
    const int gap_floor = cfg.dimensions.player.height + 2;

    if (e > 0) {
        // Too hard: widen the opening, slow the pipes, pack sparse pipes closer.
        pipe.max_gap = std::max(pipe.max_gap, std::min(pipe.max_gap + delta, gap_ceiling));
        pipe.min_gap = std::min(pipe.min_gap + delta, pipe.max_gap);
        if (saturated && out.speed.pipe_vel_x < defaults.speed.pipe_vel_x) out.speed.pipe_vel_x += 1;
        if (pipe.max_horizontal_spacing > def_pipe.max_horizontal_spacing) {
            pipe.max_horizontal_spacing -= (pipe.max_horizontal_spacing - def_pipe.max_horizontal_spacing + 1) / 2;
        }
        if (pipe.min_horizontal_spacing > def_pipe.min_horizontal_spacing) {
            pipe.min_horizontal_spacing -= (pipe.min_horizontal_spacing - def_pipe.min_horizontal_spacing + 1) / 2;
        }
        pipe.min_horizontal_spacing = std::min(pipe.min_horizontal_spacing, pipe.max_horizontal_spacing);
    } else {
        // Too easy: narrow the opening, speed up stalled pipes, spread packed pipes out.
        pipe.min_gap = std::max(pipe.min_gap + delta, std::min(gap_floor, pipe.min_gap));
        pipe.max_gap = std::max(pipe.max_gap + delta, pipe.min_gap);
        if (saturated && out.speed.pipe_vel_x > defaults.speed.pipe_vel_x) out.speed.pipe_vel_x -= 1;
        if (pipe.min_horizontal_spacing < def_pipe.min_horizontal_spacing) {
            pipe.min_horizontal_spacing += (def_pipe.min_horizontal_spacing - pipe.min_horizontal_spacing + 1) / 2;
        }
        if (pipe.max_horizontal_spacing < def_pipe.max_horizontal_spacing) {
            pipe.max_horizontal_spacing += (def_pipe.max_horizontal_spacing - pipe.max_horizontal_spacing + 1) / 2;
        }
        pipe.max_horizontal_spacing = std::max(pipe.min_horizontal_spacing, pipe.max_horizontal_spacing);
    }
    return out;
}

std::string_view to_string(DesignerKind k) {
    switch (k) {
        case DesignerKind::identity: return "identity";
        case DesignerKind::scripted: return "scripted";
        case DesignerKind::llm: return "llm";
    }
    return "unknown";
}

std::optional<DesignerKind> designer_kind_from_string(std::string_view s) {
    for (auto k : {DesignerKind::identity, DesignerKind::scripted, DesignerKind::llm}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

}  // namespace flapdesign
