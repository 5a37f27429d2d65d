#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mentes/bench.hpp"
#include "mentes/evalrunner.hpp"
#include "mentes/score.hpp"

namespace mentes::study {

inline constexpr const char* kRushInstructions = R"(Look at the image:
You are shown the initial configuration of a congested parking lot.
Each colored rectangle with a letter and arrow represents a vehicle. Black rectangles without a letter represent immovable obstacles. The light green area at the border indicates the exit. The goal is to move the red vehicle (marked with an R) to the exit.

Rules:
1. Each vehicle can only move forward or backward along its own axis (indicated in the image as a dashed line) - no rotation is allowed. The arrow on each vehicle indicates the forward direction.
2. A vehicle continues to move in the chosen direction until it touches another vehicle, an immovable object, or the image's boundary (marked with a light black line).
3. Only one vehicle moves per action.
4. The red vehicle must reach the exit on the edge of the grid.

Task:
Plan the minimal sequence of moves needed to free the red vehicle and allow it to exit the parking lot.
Each move should specify which vehicle moves and in which direction (forward or backward).

Output:
Respond by first specifying the label of the vehicle, then specifying whether it should move forwards or backwards, for example:
AF CB RF
to indicate that first A should move forward, then C should move backward, and then the red vehicle should move forward, i.e. each pair specifies the vehicle label and the direction of its move.
Once you are done, press ENTER.
If multiple sequences lead to a valid solution, output any one valid sequence that allows the red car to exit.

Press ENTER to begin the experiment.)";

struct SessionConfig {
    Task task = Task::RushHour;
    int practice = 7;
    int revealed = 2;  // practice trials that show the correct response
    int blocks = 3;
    int per_level = 2;  // trials per level in each block
    int time_limit_ms = 30'000;
};

struct Trial {
    Instance instance;
    bool practice = false;
    int block = -1;
    bool reveal = false;
};

struct Session {
    std::string participant;
    std::uint64_t seed = 0;
    SessionConfig config;
    std::vector<Trial> trials;
};

/// Practice trials come from seeds outside the manifest; each block draws per_level trials of every level.
inline Session create_session(const bench::Manifest& manifest, const std::string& participant, std::uint64_t seed, const SessionConfig& cfg = {}) {
    Session s{participant, seed, cfg, {}};
    Rng rng(splitmix64(seed ^ stable_hash("study-session")));

    std::set<std::uint64_t> taken;
    for (const auto& e : manifest.entries) taken.insert(e.seed);
    std::uint64_t counter = splitmix64(seed ^ stable_hash("practice"));
    for (int i = 0; i < cfg.practice; ++i) {
        const int level = 1 + (i * 5) / std::max(cfg.practice, 1);
        std::uint64_t ps;
        do ps = splitmix64(counter++);
        while (taken.count(ps));
        s.trials.push_back({generate_instance(cfg.task, level, ps), true, -1, i < cfg.revealed});
    }

    std::vector<std::vector<const bench::Entry*>> pools;
    for (int level = 1; level <= 5; ++level) {
        auto pool = manifest.select(cfg.task, level);
        if (static_cast<int>(pool.size()) < cfg.blocks * cfg.per_level)
            fail(ErrorKind::GenerationFailed, "manifest has too few " + std::string(to_string(cfg.task)) + " level " + std::to_string(level) + " instances");
        rng.shuffle(pool);
        pools.push_back(std::move(pool));
    }
    for (int b = 0; b < cfg.blocks; ++b) {
        std::vector<const bench::Entry*> block;
        for (const auto& pool : pools)
            for (int k = 0; k < cfg.per_level; ++k) block.push_back(pool[static_cast<std::size_t>(b * cfg.per_level + k)]);
        rng.shuffle(block);
        for (const auto* e : block) s.trials.push_back({manifest.load(*e), false, b, false});
    }
    return s;
}

/// Grades a keyboard answer through the shared grading path.
inline bool grade_human(const Instance& inst, const std::string& answer) {
    try {
        const auto parsed = inst.task == Task::RushHour ? score::parse_human_rush(answer) : score::parse_body(inst.task, answer);
        return score::grade(inst, parsed).correct;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Malformed) throw;
        return false;
    }
}

inline json to_json(const score::TrialRecord& r) {
    return {{"instance_id", r.instance_id}, {"task", to_string(r.task)}, {"level", r.level},   {"answer", r.answer},
            {"rt_ms", r.rt_ms ? json(*r.rt_ms) : json(nullptr)}, {"server_rt_ms", r.server_rt_ms}, {"correct", r.correct},
            {"timeout", r.timeout}, {"block", r.block}, {"practice", r.practice}};
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string to_csv(const std::vector<score::TrialRecord>& records) {
    std::string out = "participant_trial,instance_id,task,level,practice,block,answer,rt_ms,server_rt_ms,correct,timeout\n";
    char buf[64];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += std::to_string(i) + "," + csv_field(r.instance_id) + "," + to_string(r.task) + "," + std::to_string(r.level) + "," +
               (r.practice ? "1" : "0") + "," + std::to_string(r.block) + "," + csv_field(r.answer) + ",";
        if (r.rt_ms) {
            std::snprintf(buf, sizeof buf, "%.1f", *r.rt_ms);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.1f,", r.server_rt_ms);
        out += buf;
        out += std::string(r.correct ? "1" : "0") + "," + (r.timeout ? "1" : "0") + "\n";
    }
    return out;
}

/// One session per process; handlers are serialized by a mutex.
class StudyServer {
public:
    using Clock = std::chrono::steady_clock;

    StudyServer(Session session, std::optional<std::filesystem::path> ui_dir = std::nullopt)
        : session_(std::move(session)), delivered_(session_.trials.size()), records_(session_.trials.size()) {
        if (ui_dir) server_.set_mount_point("/", ui_dir->string());
        server_.Get("/api/trial/current", [this](const httplib::Request&, httplib::Response& res) { current(res); });
        server_.Post("/api/response", [this](const httplib::Request& req, httplib::Response& res) { respond(req, res); });
        server_.Get("/api/export", [this](const httplib::Request& req, httplib::Response& res) { export_records(req, res); });
    }

    /// Binds to `port` (0 picks a free one) and returns the bound port.
    int bind(const std::string& host = "127.0.0.1", int port = 0) {
        const int p = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (p < 0) fail(ErrorKind::IoError, "cannot bind " + host + ":" + std::to_string(port));
        return p;
    }

    void serve() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

    std::vector<score::TrialRecord> records() const {
        std::lock_guard lock(mu_);
        std::vector<score::TrialRecord> out;
        for (const auto& r : records_)
            if (r) out.push_back(*r);
        return out;
    }

    const Session& session() const { return session_; }

private:
    static void send_json(httplib::Response& res, const json& j, int status = 200) {
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

    void current(httplib::Response& res) {
        std::lock_guard lock(mu_);
        if (index_ >= session_.trials.size()) return send_json(res, {{"done", true}, {"index", index_}, {"total", session_.trials.size()}});
        const auto& t = session_.trials[index_];
        if (!delivered_[index_]) delivered_[index_] = Clock::now();
        const auto png = render::encode_png(render::question_image(t.instance).image);
        const bool new_block = !t.practice && (index_ == 0 || session_.trials[index_ - 1].block != t.block);
        send_json(res, {{"done", false},
                        {"index", index_},
                        {"total", session_.trials.size()},
                        {"practice", t.practice},
                        {"block", t.block},
                        {"break_before", new_block},
                        {"task", to_string(t.instance.task)},
                        {"level", t.instance.level},
                        {"instance_id", t.instance.id()},
                        {"time_limit_ms", session_.config.time_limit_ms},
                        {"instructions", t.instance.task == Task::RushHour ? json(kRushInstructions) : json(nullptr)},
                        {"image_png_base64", eval::base64(png)},
                        {"reveal", t.reveal ? json(human_answer(t.instance)) : json(nullptr)}});
    }

    /// GT in the keyboard format for Rush Hour, the prompt format elsewhere.
    static std::string human_answer(const Instance& inst) {
        if (inst.task != Task::RushHour) return gt_answer(inst);
        std::string out;
        for (const auto& a : inst.as<RushData>().gt_actions) {
            if (!out.empty()) out += ' ';
            out += a.label;
            out += a.direction == rushhour::Direction::Forward ? 'F' : 'B';
        }
        return out;
    }

    void respond(const httplib::Request& req, httplib::Response& res) {
        const auto now = Clock::now();
        std::lock_guard lock(mu_);
        const auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) return send_json(res, {{"error", "Malformed"}, {"message", "body must be a JSON object"}}, 400);
        const std::size_t idx = body.contains("index") && body["index"].is_number_unsigned() ? body["index"].get<std::size_t>() : index_;
        if (idx < session_.trials.size() && records_[idx])
            return send_json(res, {{"error", "Conflict"}, {"message", "trial " + std::to_string(idx) + " already answered"}}, 409);
        if (idx != index_ || idx >= session_.trials.size() || !delivered_[idx])
            return send_json(res, {{"error", "InvalidState"}, {"message", "trial " + std::to_string(idx) + " is not the active trial"}}, 400);

        const auto& t = session_.trials[idx];
        score::TrialRecord r;
        r.instance_id = t.instance.id();
        r.task = t.instance.task;
        r.level = t.instance.level;
        r.practice = t.practice;
        r.block = t.block;
        r.server_rt_ms = std::chrono::duration<double, std::milli>(now - *delivered_[idx]).count();
        if (body.contains("rt_ms") && body["rt_ms"].is_number()) r.rt_ms = body["rt_ms"].get<double>();
        const double limit = session_.config.time_limit_ms;
        r.timeout = body.value("timeout", false) || r.server_rt_ms > limit || (r.rt_ms && *r.rt_ms > limit);
        if (r.timeout) {
            r.answer.clear();
            r.correct = false;
        } else {
            r.answer = body.value("answer", "");
            r.correct = grade_human(t.instance, r.answer);
        }
        records_[idx] = r;
        ++index_;
        send_json(res, {{"correct", r.correct},
                        {"feedback", r.correct ? "correct" : "incorrect"},
                        {"timeout", r.timeout},
                        {"next_index", index_},
                        {"done", index_ >= session_.trials.size()}});
    }

    void export_records(const httplib::Request& req, httplib::Response& res) {
        const auto fmt = req.has_param("format") ? req.get_param_value("format") : "csv";
        const auto recs = records();
        if (fmt == "json") {
            json arr = json::array();
            for (const auto& r : recs) arr.push_back(to_json(r));
            return send_json(res, {{"participant", session_.participant}, {"seed", session_.seed}, {"trials", arr}});
        }
        if (fmt != "csv") return send_json(res, {{"error", "ConfigError"}, {"message", "format must be csv or json"}}, 400);
        res.set_content(to_csv(recs), "text/csv");
    }

    Session session_;
    mutable std::mutex mu_;
    std::size_t index_ = 0;
    std::vector<std::optional<Clock::time_point>> delivered_;
    std::vector<std::optional<score::TrialRecord>> records_;
    httplib::Server server_;
};

}  // namespace mentes::study
