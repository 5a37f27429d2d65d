#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mentes/instance.hpp"

namespace mentes::score {

enum class FailureReason { None, Malformed, InvalidIdentifier, InvalidMove, GoalNotReached, WrongLabel };

inline const char* to_string(FailureReason r) {
    switch (r) {
        case FailureReason::None: return "none";
        case FailureReason::Malformed: return "malformed";
        case FailureReason::InvalidIdentifier: return "invalid_identifier";
        case FailureReason::InvalidMove: return "invalid_move";
        case FailureReason::GoalNotReached: return "goal_not_reached";
        case FailureReason::WrongLabel: return "wrong_label";
    }
    return "?";
}

inline FailureReason reason_from_string(const std::string& s) {
    for (auto r : {FailureReason::None, FailureReason::Malformed, FailureReason::InvalidIdentifier, FailureReason::InvalidMove,
                   FailureReason::GoalNotReached, FailureReason::WrongLabel})
        if (s == to_string(r)) return r;
    fail(ErrorKind::Malformed, "unknown failure reason '" + s + "'");
}

/// Syntactically valid answer; identifiers are checked against the instance when grading.
struct ParsedAnswer {
    Task task = Task::RushHour;
    std::string raw;
    std::vector<char> labels;                 // form board
    std::vector<std::pair<char, int>> hinge;  // hinge folding
    std::vector<rushhour::RushAction> rush;
    std::vector<slidepuzzle::SlideMove> slide;
    char option = 0;  // paper fold

    bool operator==(const ParsedAnswer& o) const {
        return task == o.task && labels == o.labels && hinge == o.hinge && rush == o.rush && slide == o.slide && option == o.option;
    }
};

struct ScoreRecord {
    std::string instance_id;
    Task task = Task::RushHour;
    int level = 0;
    bool parsed = false;
    bool valid = false;
    bool correct = false;
    bool omitted = false;
    FailureReason failure_reason = FailureReason::Malformed;
};

inline constexpr std::size_t kSlideMoveCap = 100;

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

[[noreturn]] inline void malformed(const std::string& why) { fail(ErrorKind::Malformed, why); }

inline char label_of(const std::string& tok) {
    if (tok.size() != 1 || !std::isalpha(static_cast<unsigned char>(tok[0]))) malformed("expected a single letter label, got '" + tok + "'");
    return static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
}

/// End of the balanced {...} starting at `from`, honouring JSON strings.
inline std::optional<std::size_t> match_brace(const std::string& s, std::size_t from) {
    int depth = 0;
    bool in_str = false, esc = false;
    for (std::size_t i = from; i < s.size(); ++i) {
        const char c = s[i];
        if (in_str) {
            if (esc) esc = false;
            else if (c == '\\') esc = true;
            else if (c == '"') in_str = false;
            continue;
        }
        if (c == '"') in_str = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i;
    }
    return std::nullopt;
}

}  // namespace detail

/// Answer string of the last well-formed {"answer": ...} document in `text`.
inline std::optional<std::string> extract_answer(const std::string& text) {
    std::optional<std::string> best;
    std::size_t best_end = 0;
    for (std::size_t i = text.find('{'); i != std::string::npos; i = text.find('{', i + 1)) {
        const auto end = detail::match_brace(text, i);
        if (!end) continue;
        // An enclosing document that ends at the same place wins over its children.
        if (best && *end <= best_end) continue;
        const auto doc = json::parse(text.begin() + static_cast<std::ptrdiff_t>(i), text.begin() + static_cast<std::ptrdiff_t>(*end) + 1, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("answer")) continue;
        const auto& a = doc["answer"];
        if (a.is_string()) best = a.get<std::string>();
        else if (a.is_array() && std::all_of(a.begin(), a.end(), [](const json& x) { return x.is_string(); })) {
            std::string joined;
            for (const auto& x : a) joined += (joined.empty() ? "" : " ") + x.get<std::string>();
            best = joined;
        } else continue;
        best_end = *end;
    }
    return best;
}

/// Parses the bare answer grammar of `task` (no JSON wrapper).
inline ParsedAnswer parse_body(Task task, const std::string& body) {
    using namespace detail;
    ParsedAnswer p;
    p.task = task;
    p.raw = body;
    const std::string text = trim(body);
    if (text.empty()) malformed("empty answer");
    switch (task) {
        case Task::FormBoard: {
            std::string spaced = text;
            std::replace(spaced.begin(), spaced.end(), ',', ' ');
            for (const auto& w : words(spaced)) p.labels.push_back(label_of(w));
            std::sort(p.labels.begin(), p.labels.end());
            p.labels.erase(std::unique(p.labels.begin(), p.labels.end()), p.labels.end());
            break;
        }
        case Task::HingeFolding:
            for (const auto& item : split(text, ',')) {
                auto w = words(item);
                if (w.size() != 2) malformed("hinge items look like 'A 90', got '" + item + "'");
                std::string deg = w[1];
                if (deg.size() >= 2 && deg.compare(deg.size() - 2, 2, "\xc2\xb0") == 0) deg.resize(deg.size() - 2);
                if (deg.empty() || !std::all_of(deg.begin(), deg.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-'; }))
                    malformed("hinge angle must be an integer, got '" + w[1] + "'");
                int angle = 0;
                try {
                    angle = std::stoi(deg);
                } catch (const std::exception&) {
                    malformed("hinge angle out of range: '" + w[1] + "'");
                }
                p.hinge.emplace_back(label_of(w[0]), angle);
            }
            break;
        case Task::RushHour:
            for (const auto& item : split(text, ',')) {
                auto w = words(item);
                if (w.size() != 2) malformed("rush hour items look like 'A forward', got '" + item + "'");
                const std::string d = lower(w[1]);
                rushhour::Direction dir;
                if (d == "forward" || d == "forwards") dir = rushhour::Direction::Forward;
                else if (d == "backward" || d == "backwards") dir = rushhour::Direction::Backward;
                else malformed("direction must be forward or backward, got '" + w[1] + "'");
                p.rush.push_back({label_of(w[0]), dir});
            }
            break;
        case Task::SlidingPuzzle: {
            std::string spaced = text;
            std::replace(spaced.begin(), spaced.end(), ',', ' ');
            for (const auto& w : words(spaced)) {
                auto m = slidepuzzle::move_from_string(lower(w));
                if (!m) malformed("unknown move '" + w + "'");
                p.slide.push_back(*m);
            }
            break;
        }
        case Task::PaperFold: p.option = label_of(text); break;
    }
    return p;
}

/// Model output -> answer; throws Malformed when no answer document parses.
inline ParsedAnswer parse(Task task, const std::string& text) {
    const auto body = extract_answer(text);
    if (!body) fail(ErrorKind::Malformed, "no answer document found");
    auto p = parse_body(task, *body);
    p.raw = text;
    return p;
}

/// Keyboard format of the human study: "AF CB RF" (spaces optional).
inline ParsedAnswer parse_human_rush(const std::string& text) {
    ParsedAnswer p;
    p.task = Task::RushHour;
    p.raw = text;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (s.empty() || s.size() % 2) detail::malformed("human answers are label/direction pairs like 'AF CB RF'");
    for (std::size_t i = 0; i < s.size(); i += 2) {
        if (!std::isalpha(static_cast<unsigned char>(s[i]))) detail::malformed("bad vehicle label");
        if (s[i + 1] != 'F' && s[i + 1] != 'B') detail::malformed("direction must be F or B");
        p.rush.push_back({s[i], s[i + 1] == 'F' ? rushhour::Direction::Forward : rushhour::Direction::Backward});
    }
    return p;
}

/// Canonical answer string for a parsed answer.
inline std::string format_body(const ParsedAnswer& a) {
    switch (a.task) {
        case Task::FormBoard: return format_labels(a.labels);
        case Task::HingeFolding: return format_hinge_answer(a.hinge);
        case Task::RushHour: return rushhour::format_actions(a.rush);
        case Task::SlidingPuzzle: return slidepuzzle::format_moves(a.slide);
        case Task::PaperFold: return std::string(1, a.option);
    }
    return {};
}

inline std::string format(const ParsedAnswer& a) { return json{{"answer", format_body(a)}}.dump(); }

// ---------------------------------------------------------------------------
// Grading

namespace detail {

inline ScoreRecord record(const Instance& inst) {
    ScoreRecord r;
    r.instance_id = inst.id();
    r.task = inst.task;
    r.level = inst.level;
    return r;
}

inline ScoreRecord verdict(ScoreRecord r, FailureReason why) {
    r.parsed = true;
    r.valid = why != FailureReason::InvalidIdentifier && why != FailureReason::InvalidMove;
    r.correct = why == FailureReason::None;
    r.failure_reason = why;
    return r;
}

}  // namespace detail

inline ScoreRecord grade(const Instance& inst, const ParsedAnswer& a) {
    auto r = detail::record(inst);
    if (a.task != inst.task) return detail::verdict(r, FailureReason::Malformed);
    using FR = FailureReason;
    switch (inst.task) {
        case Task::FormBoard: {
            const auto& s = inst.as<FormData>().set;
            for (char l : a.labels)
                if (l < 'A' || l > 'E') return detail::verdict(r, FR::InvalidIdentifier);
            if (a.labels.empty()) return detail::verdict(r, FR::WrongLabel);
            return detail::verdict(r, a.labels == s.answer ? FR::None : FR::WrongLabel);
        }
        case Task::PaperFold: {
            if (a.option < 'A' || a.option > 'E') return detail::verdict(r, FR::InvalidIdentifier);
            return detail::verdict(r, a.option == inst.as<PaperData>().options.answer ? FR::None : FR::WrongLabel);
        }
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            auto chain = d.chain;
            for (const auto& [label, angle] : a.hinge) {
                const auto it = std::find_if(chain.hinges.begin(), chain.hinges.end(), [&](const hingefold::Hinge& h) { return h.label == label; });
                if (it == chain.hinges.end()) return detail::verdict(r, FR::InvalidIdentifier);
                if (!hingefold::valid_angle(angle)) return detail::verdict(r, FR::InvalidMove);
                chain = hingefold::rotate_hinge(chain, static_cast<std::size_t>(it - chain.hinges.begin()), angle);
            }
            return detail::verdict(r, hingefold::matches_target(chain, d.target) ? FR::None : FR::GoalNotReached);
        }
        case Task::RushHour: {
            const auto& lot = inst.as<RushData>().lot;
            for (const auto& act : a.rush)
                if (!lot.find(act.label)) return detail::verdict(r, FR::InvalidIdentifier);
            auto s = rushhour::RushState::initial(lot);
            for (const auto& act : a.rush) s = rushhour::apply(lot, s, act);
            return detail::verdict(r, rushhour::is_solved(lot, s) ? FR::None : FR::GoalNotReached);
        }
        case Task::SlidingPuzzle: {
            if (a.slide.size() > kSlideMoveCap) return detail::verdict(r, FR::InvalidMove);
            auto b = inst.as<SlideData>().board;
            for (auto m : a.slide) {
                if (!slidepuzzle::target_cell(b, m)) return detail::verdict(r, FR::InvalidMove);
                b = slidepuzzle::apply(b, m);
            }
            return detail::verdict(r, b.solved() ? FR::None : FR::GoalNotReached);
        }
    }
    return detail::verdict(r, FR::Malformed);
}

inline ScoreRecord malformed_record(const Instance& inst) {
    auto r = detail::record(inst);
    r.failure_reason = FailureReason::Malformed;
    return r;
}

/// Parse then grade; parse failures become malformed records.
inline ScoreRecord grade_text(const Instance& inst, const std::string& text) {
    try {
        return grade(inst, parse(inst.task, text));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Malformed) throw;
        return malformed_record(inst);
    }
}

inline ScoreRecord omitted_record(const Instance& inst) {
    auto r = malformed_record(inst);
    r.omitted = true;
    return r;
}

inline json to_json(const ScoreRecord& r) {
    return {{"instance_id", r.instance_id}, {"task", mentes::to_string(r.task)}, {"level", r.level}, {"parsed", r.parsed},
            {"valid", r.valid}, {"correct", r.correct}, {"omitted", r.omitted}, {"failure_reason", to_string(r.failure_reason)}};
}

// ---------------------------------------------------------------------------
// Aggregation

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0, hi = 1;
};

inline Interval wilson(std::size_t correct, std::size_t n, double z = kZ95) {
    if (n == 0) return {0, 1};
    const double nn = static_cast<double>(n), p = static_cast<double>(correct) / nn, z2 = z * z;
    const double denom = 1 + z2 / nn;
    const double centre = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct AccuracyRow {
    Task task = Task::RushHour;
    int level = 0;
    std::size_t n = 0;  // graded, omitted excluded
    std::size_t correct = 0;
    std::size_t omitted = 0;
    std::optional<double> accuracy;
    Interval ci;
};

/// One row per (task, level) in task-name then level order.
inline std::vector<AccuracyRow> aggregate(const std::vector<ScoreRecord>& records) {
    if (records.empty()) fail(ErrorKind::EmptyGroup, "no records to aggregate");
    std::map<std::pair<std::string, int>, AccuracyRow> groups;
    for (const auto& r : records) {
        auto& g = groups[{mentes::to_string(r.task), r.level}];
        g.task = r.task;
        g.level = r.level;
        if (r.omitted) {
            ++g.omitted;
            continue;
        }
        ++g.n;
        if (r.correct) ++g.correct;
    }
    std::vector<AccuracyRow> out;
    for (auto& [key, g] : groups) {
        if (g.n) g.accuracy = static_cast<double>(g.correct) / static_cast<double>(g.n);
        g.ci = wilson(g.correct, g.n);
        out.push_back(g);
    }
    return out;
}

inline std::string to_csv(const std::vector<AccuracyRow>& rows) {
    std::string out = "task,level,n,correct,accuracy,ci_low,ci_high,omitted\n";
    char buf[256], acc[32] = "";
    for (const auto& r : rows) {
        acc[0] = 0;
        if (r.accuracy) std::snprintf(acc, sizeof acc, "%.4f", *r.accuracy);
        std::snprintf(buf, sizeof buf, "%s,%d,%zu,%zu,%s,%.4f,%.4f,%zu\n", mentes::to_string(r.task), r.level, r.n, r.correct, acc, r.ci.lo,
                      r.ci.hi, r.omitted);
        out += buf;
    }
    return out;
}

inline json to_json(const std::vector<AccuracyRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"task", mentes::to_string(r.task)},
                       {"level", r.level},
                       {"n", r.n},
                       {"correct", r.correct},
                       {"accuracy", r.accuracy ? json(*r.accuracy) : json(nullptr)},
                       {"ci_low", r.ci.lo},
                       {"ci_high", r.ci.hi},
                       {"omitted", r.omitted}});
    return out;
}

// ---------------------------------------------------------------------------
// Human response times

struct TrialRecord {
    std::string instance_id;
    Task task = Task::RushHour;
    int level = 0;
    std::string answer;
    std::optional<double> rt_ms;  // client measured
    double server_rt_ms = 0;
    bool correct = false;
    bool timeout = false;
    int block = -1;  // -1 for practice
    bool practice = false;
};

/// Accuracy per level counting only correct responses faster than t seconds.
inline std::map<int, double> time_cutoff(const std::vector<TrialRecord>& trials, double t) {
    std::map<int, std::pair<std::size_t, std::size_t>> acc;
    for (const auto& tr : trials) {
        if (tr.practice) continue;
        auto& [hit, n] = acc[tr.level];
        ++n;
        const double rt = tr.rt_ms.value_or(std::numeric_limits<double>::infinity());
        if (tr.correct && rt < t * 1000.0) ++hit;
    }
    std::map<int, double> out;
    for (const auto& [level, hn] : acc) out[level] = static_cast<double>(hn.first) / static_cast<double>(hn.second);
    return out;
}

}  // namespace mentes::score
