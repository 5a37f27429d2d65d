#pragma once

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mentes/bench.hpp"
#include "mentes/prompts.hpp"
#include "mentes/score.hpp"

namespace mentes::eval {

namespace fs = std::filesystem;

inline std::string base64(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

inline std::vector<std::uint8_t> unbase64(const std::string& text) {
    std::vector<std::uint8_t> out(3 * (text.size() / 4) + 3);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) fail(ErrorKind::Malformed, "bad base64 payload");
    std::size_t len = static_cast<std::size_t>(n);
    // DecodeBlock counts padding bytes as output.
    for (std::size_t i = text.size(); i > 0 && text[i - 1] == '='; --i) --len;
    out.resize(len);
    return out;
}

struct RunConfig {
    std::string endpoint;  // full URL of the chat-completions route
    std::string model;
    prompts::Variant variant = prompts::Variant::Standard;
    std::optional<std::string> reasoning_effort;
    int max_attempts = 3;
    double timeout_s = 600;
    int concurrency = 4;
    std::string api_key_env = "MENTES_API_KEY";
    json extra = json::object();  // passed through into the request body (temperature, top_p, ...)
};

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.endpoint = j.at("endpoint").get<std::string>();
        c.model = j.at("model").get<std::string>();
        if (j.contains("variant")) c.variant = prompts::variant_from_string(j["variant"].get<std::string>());
        if (j.contains("reasoning_effort") && !j["reasoning_effort"].is_null()) c.reasoning_effort = j["reasoning_effort"].get<std::string>();
        c.max_attempts = j.value("max_attempts", 3);
        c.timeout_s = j.value("timeout_s", 600.0);
        c.concurrency = j.value("concurrency", 4);
        c.api_key_env = j.value("api_key_env", std::string("MENTES_API_KEY"));
        if (j.contains("params")) c.extra = j["params"];
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("bad run config: ") + e.what());
    }
    if (c.max_attempts < 1 || c.max_attempts > 3) fail(ErrorKind::ConfigError, "max_attempts must be in 1..3");
    if (c.concurrency < 1) fail(ErrorKind::ConfigError, "concurrency must be at least 1");
    if (c.endpoint.rfind("http://", 0) != 0 && c.endpoint.rfind("https://", 0) != 0) fail(ErrorKind::ConfigError, "endpoint must be an http(s) URL");
    if (!c.extra.is_object()) fail(ErrorKind::ConfigError, "params must be an object");
    return c;
}

inline RunConfig load_config(const fs::path& path) { return config_from_json(bench::read_json(path)); }

inline json request_body(const RunConfig& c, const prompts::Message& m) {
    json content = json::array();
    for (const auto& p : m) {
        if (p.kind == prompts::Part::Kind::Text) content.push_back({{"type", "text"}, {"text", p.text}});
        else content.push_back({{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64(p.png)}}}});
    }
    json body = c.extra;
    body["model"] = c.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", content}}});
    if (c.reasoning_effort) body["reasoning_effort"] = *c.reasoning_effort;
    return body;
}

struct Reply {
    std::string text;
    std::vector<std::vector<std::uint8_t>> images;  // inline images returned by the model
    json usage;                                     // null when not reported
};

inline Reply parse_reply(const json& j) {
    Reply r;
    r.usage = j.contains("usage") && j["usage"].is_object() ? j["usage"] : json(nullptr);
    const auto& msg = j.at("choices").at(0).at("message");
    const auto& content = msg.at("content");
    if (content.is_string()) r.text = content.get<std::string>();
    else if (content.is_array()) {
        for (const auto& part : content) {
            const auto type = part.value("type", "");
            if (type == "text") r.text += part.value("text", "");
            else if (type == "image_url") {
                const auto url = part.at("image_url").value("url", "");
                if (const auto comma = url.find(";base64,"); url.rfind("data:", 0) == 0 && comma != std::string::npos)
                    r.images.push_back(unbase64(url.substr(comma + 8)));
            }
        }
    } else if (!content.is_null()) {
        fail(ErrorKind::Malformed, "unexpected message content");
    }
    return r;
}

/// Splits "http://host:port/path" into the client base and the path.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

/// One chat-completion request; throws IoError on transport or HTTP failures.
inline Reply send(const RunConfig& c, const prompts::Message& m) {
    const auto [base, path] = split_url(c.endpoint);
    httplib::Client cli(base);
    const auto secs = static_cast<time_t>(c.timeout_s);
    cli.set_connection_timeout(std::min<time_t>(secs, 30), 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(c.api_key_env.c_str()); key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
    auto res = cli.Post(path, headers, request_body(c, m).dump(), "application/json");
    if (!res) fail(ErrorKind::IoError, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) fail(ErrorKind::IoError, "endpoint returned HTTP " + std::to_string(res->status));
    const auto j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::IoError, "endpoint returned non-JSON body");
    try {
        return parse_reply(j);
    } catch (const json::exception& e) {
        fail(ErrorKind::IoError, std::string("unexpected response shape: ") + e.what());
    }
}

inline fs::path result_path(const fs::path& run_dir, const bench::Entry& e) {
    return run_dir / to_string(e.task) / ("level_" + std::to_string(e.level)) / (std::to_string(e.seed) + ".json");
}

struct RunStats {
    std::size_t done = 0, skipped = 0, omitted = 0;
};

struct RunFilter {
    std::vector<Task> tasks;  // empty: all
    std::vector<int> levels;

    bool keep(const bench::Entry& e) const {
        return (tasks.empty() || std::find(tasks.begin(), tasks.end(), e.task) != tasks.end()) &&
               (levels.empty() || std::find(levels.begin(), levels.end(), e.level) != levels.end());
    }
};

/// Queries every selected instance that has no stored result yet.
inline RunStats run(const bench::Manifest& manifest, const RunConfig& config, const fs::path& run_dir, const RunFilter& filter = {}) {
    std::vector<const bench::Entry*> todo;
    RunStats stats;
    for (const auto& e : manifest.entries) {
        if (!filter.keep(e) || !prompts::supported(e.task, config.variant)) continue;
        if (fs::exists(result_path(run_dir, e))) {
            ++stats.skipped;
            continue;
        }
        todo.push_back(&e);
    }
    std::mutex writer;
    bench::parallel_for(todo.size(), config.concurrency, [&](std::size_t k) {
        const auto& e = *todo[k];
        const Instance inst = manifest.load(e);
        const auto message = prompts::build_prompt(inst, config.variant, manifest.images());
        json doc{{"instance_id", inst.id()}, {"task", to_string(inst.task)}, {"level", inst.level},    {"seed", inst.seed},
                 {"variant", prompts::to_string(config.variant)}, {"model", config.model}, {"raw_text", nullptr}, {"usage", nullptr}};
        int attempts = 0;
        bool ok = false;
        std::vector<std::string> errors;
        std::vector<std::vector<std::uint8_t>> images;
        while (attempts < config.max_attempts && !ok) {
            ++attempts;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                auto reply = send(config, message);
                doc["latency_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                doc["raw_text"] = reply.text;
                doc["usage"] = reply.usage;
                images = std::move(reply.images);
                ok = score::extract_answer(reply.text).has_value();
                if (ok) {
                    try {
                        score::parse(inst.task, reply.text);
                    } catch (const Error&) {
                        ok = false;
                    }
                }
                if (!ok) errors.push_back("no parseable answer");
            } catch (const Error& err) {
                errors.push_back(err.what());
            }
        }
        doc["attempts"] = attempts;
        doc["omitted"] = !ok;
        doc["errors"] = errors;
        const auto path = result_path(run_dir, e);
        std::lock_guard lock(writer);
        for (std::size_t i = 0; i < images.size(); ++i)
            bench::write_atomic(path.parent_path() / (std::to_string(e.seed) + "_img_" + std::to_string(i) + ".png"), images[i].data(), images[i].size());
        bench::write_json(path, doc);
        ++stats.done;
        if (!ok) ++stats.omitted;
    });
    return stats;
}

/// Grades every manifest instance that has a stored result.
inline std::vector<score::ScoreRecord> score_run(const bench::Manifest& manifest, const fs::path& run_dir, const RunFilter& filter = {}) {
    std::vector<score::ScoreRecord> out;
    for (const auto& e : manifest.entries) {
        if (!filter.keep(e)) continue;
        const auto path = result_path(run_dir, e);
        if (!fs::exists(path)) continue;
        const Instance inst = manifest.load(e);
        const auto doc = bench::read_json(path);
        if (doc.value("omitted", false) || !doc.contains("raw_text") || !doc["raw_text"].is_string()) {
            out.push_back(score::omitted_record(inst));
            continue;
        }
        out.push_back(score::grade_text(inst, doc["raw_text"].get<std::string>()));
    }
    return out;
}

}  // namespace mentes::eval
