#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mentes/error.hpp"
#include "mentes/formboard.hpp"
#include "mentes/hingefold.hpp"
#include "mentes/paperfold.hpp"
#include "mentes/rushhour.hpp"
#include "mentes/slidepuzzle.hpp"

namespace mentes {

using json = nlohmann::json;

enum class Task { RushHour, SlidingPuzzle, HingeFolding, PaperFold, FormBoard };

inline constexpr Task kAllTasks[] = {Task::FormBoard, Task::HingeFolding, Task::PaperFold, Task::RushHour, Task::SlidingPuzzle};

inline const char* to_string(Task t) {
    switch (t) {
        case Task::RushHour: return "rush_hour";
        case Task::SlidingPuzzle: return "sliding_puzzle";
        case Task::HingeFolding: return "hinge_folding";
        case Task::PaperFold: return "paper_fold";
        case Task::FormBoard: return "form_board";
    }
    return "?";
}

inline Task task_from_string(const std::string& s) {
    for (auto t : kAllTasks)
        if (s == to_string(t)) return t;
    fail(ErrorKind::ConfigError, "unknown task '" + s + "'");
}

struct RushData {
    rushhour::Lot lot;
    std::vector<rushhour::RushAction> gt_actions;
};

struct SlideData {
    slidepuzzle::Board board;
    std::vector<slidepuzzle::SlideMove> gt_moves;
    int image_id = 0;
    std::string image_name;  // "synthetic_<id>" or a file stem from the image directory
};

struct HingeData {
    hingefold::HingeChain chain;
    std::vector<int> gt_angles;
    std::vector<geom::Polygon> target;
};

struct PaperData {
    std::vector<paperfold::Fold> folds;
    geom::Point2 punch;
    paperfold::HolePattern holes;
    paperfold::Options options;
};

struct FormData {
    formboard::PieceSet set;
};

struct Instance {
    Task task = Task::RushHour;
    int level = 1;
    std::uint64_t seed = 0;
    std::variant<RushData, SlideData, HingeData, PaperData, FormData> data;

    std::string id() const { return std::string(to_string(task)) + "/level_" + std::to_string(level) + "/" + std::to_string(seed); }

    template <typename T>
    const T& as() const {
        if (const T* p = std::get_if<T>(&data)) return *p;
        fail(ErrorKind::InvalidState, "instance payload does not match its task");
    }
};

// ---------------------------------------------------------------------------
// Sliding puzzle images

struct ImageSource {
    std::optional<std::filesystem::path> directory;  // PNG files; synthetic images when absent

    /// Sorted PNG stems of the directory.
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        if (!directory) return out;
        if (!std::filesystem::is_directory(*directory)) fail(ErrorKind::MissingAsset, "image directory not found: " + directory->string());
        for (const auto& e : std::filesystem::directory_iterator(*directory))
            if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path().stem().string());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::string name_for(int image_id) const {
        if (!directory) return "synthetic_" + std::to_string(image_id);
        const auto all = names();
        if (all.empty()) fail(ErrorKind::MissingAsset, "image directory has no PNG files: " + directory->string());
        if (image_id < 0 || static_cast<std::size_t>(image_id) >= all.size())
            fail(ErrorKind::MissingAsset, "image id " + std::to_string(image_id) + " is out of range for " + directory->string());
        return all[static_cast<std::size_t>(image_id)];
    }
};

// ---------------------------------------------------------------------------
// Generation

struct GenerateOptions {
    ImageSource images;
    int image_id = 0;
    int slide_n = 3;
};

inline Instance generate_instance(Task task, int level, std::uint64_t seed, const GenerateOptions& opt = {}) {
    Instance inst{task, level, seed, RushData{}};
    switch (task) {
        case Task::RushHour: {
            auto g = rushhour::generate(level, seed);
            inst.data = RushData{std::move(g.lot), std::move(g.solution)};
            break;
        }
        case Task::SlidingPuzzle: {
            const std::string name = opt.images.name_for(opt.image_id);
            slidepuzzle::GeneratorParams p;
            p.n = opt.slide_n;
            auto g = slidepuzzle::generate(level, seed, p);
            inst.data = SlideData{std::move(g.board), std::move(g.solution), opt.image_id, name};
            break;
        }
        case Task::HingeFolding: {
            auto g = hingefold::generate(level, seed);
            inst.data = HingeData{std::move(g.chain), std::move(g.angles), std::move(g.target)};
            break;
        }
        case Task::PaperFold: {
            auto g = paperfold::generate(level, seed);
            inst.data = PaperData{std::move(g.folds), g.punch, std::move(g.holes), std::move(g.options)};
            break;
        }
        case Task::FormBoard: {
            auto g = formboard::generate(level, seed);
            inst.data = FormData{std::move(g.set)};
            break;
        }
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Ground truth

inline std::string format_hinge_answer(const std::vector<std::pair<char, int>>& pairs) {
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) out += ", ";
        out += std::string(1, pairs[i].first) + " " + std::to_string(pairs[i].second);
    }
    return out;
}

inline std::string format_labels(const std::vector<char>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ' ';
        out += labels[i];
    }
    return out;
}

/// Canonical answer string the prompts ask for.
inline std::string gt_answer(const Instance& inst) {
    switch (inst.task) {
        case Task::RushHour: return rushhour::format_actions(inst.as<RushData>().gt_actions);
        case Task::SlidingPuzzle: return slidepuzzle::format_moves(inst.as<SlideData>().gt_moves);
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            std::vector<std::pair<char, int>> pairs;
            for (std::size_t i = 0; i < d.gt_angles.size(); ++i) pairs.emplace_back(d.chain.hinges[i].label, d.gt_angles[i]);
            return format_hinge_answer(pairs);
        }
        case Task::PaperFold: return std::string(1, inst.as<PaperData>().options.answer);
        case Task::FormBoard: return format_labels(inst.as<FormData>().set.answer);
    }
    return {};
}

/// One entry per ground-truth step; the visual CoT has one more frame than this.
inline std::vector<std::string> gt_actions(const Instance& inst) {
    std::vector<std::string> out;
    switch (inst.task) {
        case Task::RushHour:
            for (const auto& a : inst.as<RushData>().gt_actions) out.push_back(rushhour::to_string(a));
            break;
        case Task::SlidingPuzzle:
            for (auto m : inst.as<SlideData>().gt_moves) out.push_back(slidepuzzle::to_string(m));
            break;
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            for (std::size_t i = 0; i < d.gt_angles.size(); ++i) out.push_back(std::string(1, d.chain.hinges[i].label) + " " + std::to_string(d.gt_angles[i]));
            break;
        }
        case Task::PaperFold: {
            const auto& d = inst.as<PaperData>();
            for (std::size_t i = d.folds.size(); i-- > 0;) out.push_back(std::string("unfold ") + std::to_string(i + 1));
            break;
        }
        case Task::FormBoard:
            for (char c : inst.as<FormData>().set.answer) out.push_back(std::string("place ") + c);
            break;
    }
    return out;
}

/// Optimal solution length as certified by the task's own solver.
inline std::size_t certified_length(const Instance& inst) {
    switch (inst.task) {
        case Task::RushHour: {
            const auto sol = rushhour::solve_bfs(inst.as<RushData>().lot);
            if (!sol) fail(ErrorKind::Unsolvable, "rush hour instance has no solution");
            return sol->size();
        }
        case Task::SlidingPuzzle: return slidepuzzle::solve(inst.as<SlideData>().board).size();
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            return hingefold::solve(d.chain, d.target).size();
        }
        case Task::PaperFold: return inst.as<PaperData>().folds.size();
        case Task::FormBoard: return inst.as<FormData>().set.answer.size();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// JSON

namespace io {

inline json point(geom::Point2 p) { return json::array({p.x, p.y}); }

inline geom::Point2 point(const json& j) {
    if (!j.is_array() || j.size() != 2) fail(ErrorKind::Malformed, "point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json polygon(const geom::Polygon& p) {
    json out = json::array();
    for (auto v : p.vertices) out.push_back(point(v));
    return out;
}

inline geom::Polygon polygon(const json& j) {
    geom::Polygon p;
    for (const auto& v : j) p.vertices.push_back(point(v));
    return p;
}

inline json lot(const rushhour::Lot& l) {
    json vehicles = json::array();
    for (const auto& v : l.vehicles)
        vehicles.push_back({{"label", std::string(1, v.label)},
                            {"center", point(v.body.center)},
                            {"length", v.body.length},
                            {"width", v.body.width},
                            {"heading", v.body.heading},
                            {"display", rushhour::describe_vehicle(v)}});
    json obstacles = json::array();
    for (const auto& o : l.obstacles) obstacles.push_back(json::array({point(o.lo), point(o.hi)}));
    return {{"width", l.width},
            {"height", l.height},
            {"exit", {{"edge", rushhour::edge_name(l.exit.edge)}, {"from", l.exit.from}, {"to", l.exit.to}}},
            {"vehicles", vehicles},
            {"obstacles", obstacles}};
}

inline rushhour::Lot lot(const json& j) {
    rushhour::Lot l;
    l.width = j.at("width").get<double>();
    l.height = j.at("height").get<double>();
    l.exit = {rushhour::edge_from_name(j.at("exit").at("edge").get<std::string>()), j.at("exit").at("from").get<double>(), j.at("exit").at("to").get<double>()};
    for (const auto& v : j.at("vehicles"))
        l.vehicles.push_back({v.at("label").get<std::string>().at(0),
                              {point(v.at("center")), v.at("length").get<double>(), v.at("width").get<double>(), v.at("heading").get<double>()}});
    for (const auto& o : j.at("obstacles")) l.obstacles.push_back({point(o.at(0)), point(o.at(1))});
    return l;
}

inline json holes(const paperfold::HolePattern& h) {
    json out = json::array();
    for (auto p : h) out.push_back(point(p));
    return out;
}

inline paperfold::HolePattern holes(const json& j) {
    paperfold::HolePattern out;
    for (const auto& p : j) out.push_back(point(p));
    return out;
}

}  // namespace io

inline json to_json(const Instance& inst) {
    json j{{"task", to_string(inst.task)}, {"level", inst.level}, {"seed", inst.seed}};
    switch (inst.task) {
        case Task::RushHour: {
            const auto& d = inst.as<RushData>();
            j["lot"] = io::lot(d.lot);
            json acts = json::array();
            for (const auto& a : d.gt_actions) acts.push_back(rushhour::to_string(a));
            j["gt_actions"] = acts;
            json states = json::array();
            for (const auto& s : rushhour::trajectory(d.lot, d.gt_actions)) states.push_back(s.offsets);
            j["gt_states"] = states;
            break;
        }
        case Task::SlidingPuzzle: {
            const auto& d = inst.as<SlideData>();
            j["n"] = d.board.n;
            j["image_id"] = d.image_id;
            j["image_name"] = d.image_name;
            j["blank_cell"] = d.board.blank;
            j["perm"] = d.board.perm;
            json moves = json::array();
            for (auto m : d.gt_moves) moves.push_back(slidepuzzle::to_string(m));
            j["gt_moves"] = moves;
            break;
        }
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            json shapes = json::array(), hinges = json::array(), target = json::array();
            for (std::size_t i = 0; i < d.chain.shapes.size(); ++i)
                shapes.push_back({{"kind", hingefold::to_string(d.chain.kinds[i])}, {"vertices", io::polygon(d.chain.shapes[i])}});
            for (const auto& h : d.chain.hinges) hinges.push_back({{"label", std::string(1, h.label)}, {"pivot", io::point(h.pivot)}});
            for (const auto& t : d.target) target.push_back(io::polygon(t));
            j["shapes"] = shapes;
            j["hinges"] = hinges;
            j["gt_angles"] = d.gt_angles;
            j["target"] = target;
            break;
        }
        case Task::PaperFold: {
            const auto& d = inst.as<PaperData>();
            json folds = json::array();
            for (const auto& f : d.folds)
                folds.push_back({{"family", paperfold::to_string(f.family)}, {"offset", f.offset}, {"moving_side", f.moving_side}});
            j["folds"] = folds;
            j["punch"] = io::point(d.punch);
            j["holes"] = io::holes(d.holes);
            json options = json::object();
            for (std::size_t k = 0; k < 5; ++k) options[std::string(1, static_cast<char>('A' + k))] = io::holes(d.options.patterns[k]);
            j["options"] = options;
            j["answer_label"] = std::string(1, d.options.answer);
            break;
        }
        case Task::FormBoard: {
            const auto& s = inst.as<FormData>().set;
            j["target"] = io::polygon(s.target);
            json pieces = json::array();
            for (const auto& p : s.pieces) {
                const auto c = formboard::kPieceColors[static_cast<std::size_t>(p.label - 'A')];
                json pj{{"label", std::string(1, p.label)}, {"color", json::array({c.r, c.g, c.b})}, {"vertices", io::polygon(p.shape)}};
                if (p.translation) pj["translation"] = io::point(*p.translation);
                pieces.push_back(pj);
            }
            j["pieces"] = pieces;
            json answer = json::array();
            for (char c : s.answer) answer.push_back(std::string(1, c));
            j["answer"] = answer;
            break;
        }
    }
    return j;
}

inline Instance instance_from_json(const json& j) {
    try {
        Instance inst;
        inst.task = task_from_string(j.at("task").get<std::string>());
        inst.level = j.at("level").get<int>();
        inst.seed = j.at("seed").get<std::uint64_t>();
        switch (inst.task) {
            case Task::RushHour: {
                RushData d;
                d.lot = io::lot(j.at("lot"));
                for (const auto& a : j.at("gt_actions")) {
                    const auto s = a.get<std::string>();
                    d.gt_actions.push_back({s.at(0), s.substr(2) == "forward" ? rushhour::Direction::Forward : rushhour::Direction::Backward});
                }
                inst.data = std::move(d);
                break;
            }
            case Task::SlidingPuzzle: {
                SlideData d;
                d.board.n = j.at("n").get<int>();
                d.board.perm = j.at("perm").get<std::vector<int>>();
                d.board.blank = j.at("blank_cell").get<int>();
                d.image_id = j.at("image_id").get<int>();
                d.image_name = j.value("image_name", "synthetic_" + std::to_string(d.image_id));
                for (const auto& m : j.at("gt_moves")) {
                    auto mv = slidepuzzle::move_from_string(m.get<std::string>());
                    if (!mv) fail(ErrorKind::Malformed, "bad move in gt_moves");
                    d.gt_moves.push_back(*mv);
                }
                slidepuzzle::validate(d.board);
                inst.data = std::move(d);
                break;
            }
            case Task::HingeFolding: {
                HingeData d;
                for (const auto& s : j.at("shapes")) {
                    d.chain.kinds.push_back(hingefold::kind_from_string(s.at("kind").get<std::string>()));
                    d.chain.shapes.push_back(io::polygon(s.at("vertices")));
                }
                for (const auto& h : j.at("hinges")) {
                    d.chain.hinges.push_back({h.at("label").get<std::string>().at(0), io::point(h.at("pivot"))});
                    d.chain.angles.push_back(0);
                }
                d.gt_angles = j.at("gt_angles").get<std::vector<int>>();
                for (const auto& t : j.at("target")) d.target.push_back(io::polygon(t));
                inst.data = std::move(d);
                break;
            }
            case Task::PaperFold: {
                PaperData d;
                for (const auto& f : j.at("folds"))
                    d.folds.push_back({paperfold::family_from_string(f.at("family").get<std::string>()), f.at("offset").get<double>(), f.at("moving_side").get<int>()});
                d.punch = io::point(j.at("punch"));
                d.holes = io::holes(j.at("holes"));
                for (std::size_t k = 0; k < 5; ++k) d.options.patterns[k] = io::holes(j.at("options").at(std::string(1, static_cast<char>('A' + k))));
                d.options.answer = j.at("answer_label").get<std::string>().at(0);
                inst.data = std::move(d);
                break;
            }
            case Task::FormBoard: {
                FormData d;
                d.set.target = io::polygon(j.at("target"));
                const auto& pieces = j.at("pieces");
                if (pieces.size() != 5) fail(ErrorKind::Malformed, "form board needs five pieces");
                for (std::size_t k = 0; k < 5; ++k) {
                    auto& p = d.set.pieces[k];
                    p.label = pieces[k].at("label").get<std::string>().at(0);
                    p.shape = io::polygon(pieces[k].at("vertices"));
                    if (pieces[k].contains("translation")) p.translation = io::point(pieces[k].at("translation"));
                }
                for (const auto& a : j.at("answer")) d.set.answer.push_back(a.get<std::string>().at(0));
                inst.data = std::move(d);
                break;
            }
        }
        return inst;
    } catch (const json::exception& e) {
        fail(ErrorKind::Malformed, std::string("bad instance document: ") + e.what());
    }
}

/// gt.json: answer, action list and a compact per-frame state list.
inline json gt_document(const Instance& inst) {
    json states = json::array();
    switch (inst.task) {
        case Task::RushHour: {
            const auto& d = inst.as<RushData>();
            for (const auto& s : rushhour::trajectory(d.lot, d.gt_actions)) states.push_back(s.offsets);
            break;
        }
        case Task::SlidingPuzzle: {
            const auto& d = inst.as<SlideData>();
            auto b = d.board;
            states.push_back(b.perm);
            for (auto m : d.gt_moves) {
                b = slidepuzzle::apply(b, m);
                states.push_back(b.perm);
            }
            break;
        }
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            auto c = d.chain;
            auto snapshot = [&] {
                json shapes = json::array();
                for (const auto& s : c.shapes) shapes.push_back(io::polygon(s));
                states.push_back(shapes);
            };
            snapshot();
            for (std::size_t i = 0; i < d.gt_angles.size(); ++i) {
                c = hingefold::rotate_hinge(c, i, d.gt_angles[i]);
                snapshot();
            }
            break;
        }
        case Task::PaperFold: {
            const auto& d = inst.as<PaperData>();
            const auto folded = paperfold::fold_states(d.folds);
            states.push_back(io::holes({d.punch}));
            for (const auto& h : paperfold::unfold_trace(folded, d.holes)) states.push_back(io::holes(h));
            break;
        }
        case Task::FormBoard: {
            std::vector<std::string> placed;
            states.push_back(placed);
            for (char c : inst.as<FormData>().set.answer) {
                placed.emplace_back(1, c);
                states.push_back(placed);
            }
            break;
        }
    }
    return {{"instance_id", inst.id()}, {"answer", gt_answer(inst)}, {"gt_actions", gt_actions(inst)}, {"gt_states", states}};
}

}  // namespace mentes
