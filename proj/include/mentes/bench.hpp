#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mentes/instance.hpp"
#include "mentes/render/frames.hpp"
#include "mentes/score.hpp"

namespace mentes::bench {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = "mentes-1.0";
inline constexpr int kPerLevel = 30;

// ---------------------------------------------------------------------------
// Files

/// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const fs::path& path, const void* data, std::size_t size) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::IoError, "cannot write " + tmp.string());
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) fail(ErrorKind::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline void write_text(const fs::path& path, const std::string& text) { write_atomic(path, text.data(), text.size()); }

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::MissingAsset, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline json read_json(const fs::path& path) {
    const auto text = read_text(path);
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Malformed, "not valid JSON: " + path.string());
    return j;
}

inline Instance load_instance(const fs::path& path) { return instance_from_json(read_json(path)); }

/// Writes instance.json, gt.json, the question image, CoT frames and (Rush Hour) transcript.txt.
inline void write_instance(const Instance& inst, const fs::path& dir, const ImageSource& images = {}) {
    write_json(dir / "instance.json", to_json(inst));
    write_json(dir / "gt.json", gt_document(inst));
    const auto q = render::question_image(inst, images);
    const auto png = render::encode_png(q.image);
    write_atomic(dir / render::question_file(inst.task), png.data(), png.size());
    const auto frames = render::cot_frames(inst, images);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto bytes = render::encode_png(frames[i].image);
        write_atomic(dir / render::cot_file(i), bytes.data(), bytes.size());
    }
    if (inst.task == Task::RushHour) write_text(dir / "transcript.txt", rushhour::transcribe(inst.as<RushData>().lot));
}

// ---------------------------------------------------------------------------
// Seeds

/// Counter-based split: root -> task -> level -> index.
inline std::uint64_t derive_seed(std::uint64_t root, Task task, int level, int index) {
    std::uint64_t s = splitmix64(root ^ stable_hash(to_string(task)));
    s = splitmix64(s + static_cast<std::uint64_t>(level));
    return splitmix64(s + static_cast<std::uint64_t>(index));
}

// ---------------------------------------------------------------------------
// Manifest

struct Entry {
    Task task = Task::RushHour;
    int level = 1;
    std::uint64_t seed = 0;
    int image_id = 0;
    std::string dir;  // relative to the manifest root
};

struct Manifest {
    std::string version = kVersion;
    std::uint64_t root_seed = 0;
    int per_level = kPerLevel;
    std::string image_dir;  // empty: synthetic sliding images
    std::vector<Entry> entries;
    fs::path root;  // where the manifest was loaded from

    ImageSource images() const {
        ImageSource s;
        if (!image_dir.empty()) s.directory = fs::path(image_dir);
        return s;
    }

    std::vector<const Entry*> select(Task t, int level) const {
        std::vector<const Entry*> out;
        for (const auto& e : entries)
            if (e.task == t && e.level == level) out.push_back(&e);
        return out;
    }

    Instance load(const Entry& e) const { return load_instance(root / e.dir / "instance.json"); }
};

inline std::string entry_dir(Task t, int level, std::uint64_t seed) {
    return std::string(to_string(t)) + "/level_" + std::to_string(level) + "/" + std::to_string(seed);
}

inline json generator_snapshot() {
    return {{"rush_hour", {{"exit_width", 1.0}, {"inflation", 1.05}, {"state_cap", rushhour::kStateCap}}},
            {"sliding_puzzle", {{"n", 3}}},
            {"hinge_folding", {{"match_iou", hingefold::kMatchIou}, {"near_miss_iou", hingefold::GeneratorParams{}.near_miss_iou}}},
            {"paper_fold", {{"delta", paperfold::kDelta}, {"punch_margin", paperfold::kPunchMargin}}},
            {"form_board", {{"area_epsilon", formboard::kAreaEpsilon}}}};
}

inline json to_json(const Manifest& m) {
    json tasks = json::object();
    for (const auto& e : m.entries) {
        auto& level = tasks[to_string(e.task)]["level_" + std::to_string(e.level)];
        json item{{"seed", e.seed}, {"instance", e.dir + "/instance.json"}, {"gt", e.dir + "/gt.json"}};
        if (e.task == Task::SlidingPuzzle) item["image_id"] = e.image_id;
        level.push_back(item);
    }
    return {{"version", m.version},      {"root_seed", m.root_seed},      {"per_level", m.per_level},
            {"image_dir", m.image_dir},  {"generator", generator_snapshot()}, {"count", m.entries.size()},
            {"tasks", tasks}};
}

inline Manifest load_manifest(const fs::path& path) {
    const auto j = read_json(path);
    Manifest m;
    try {
        m.version = j.at("version").get<std::string>();
        m.root_seed = j.at("root_seed").get<std::uint64_t>();
        m.per_level = j.value("per_level", kPerLevel);
        m.image_dir = j.value("image_dir", "");
        m.root = path.parent_path();
        for (const auto& [task_name, levels] : j.at("tasks").items()) {
            const Task t = task_from_string(task_name);
            for (const auto& [level_name, items] : levels.items()) {
                const int level = std::stoi(level_name.substr(6));
                for (const auto& it : items) {
                    Entry e{t, level, it.at("seed").get<std::uint64_t>(), it.value("image_id", 0), {}};
                    const auto inst_path = it.at("instance").get<std::string>();
                    e.dir = inst_path.substr(0, inst_path.rfind('/'));
                    m.entries.push_back(e);
                }
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Malformed, std::string("bad manifest: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Build

struct BuildOptions {
    std::uint64_t root_seed = 0;
    fs::path out;
    int jobs = 1;
    int per_level = kPerLevel;
    std::vector<Task> tasks{std::begin(kAllTasks), std::end(kAllTasks)};
    std::vector<int> levels{1, 2, 3, 4, 5};
    ImageSource images;
};

/// Runs `work(i)` for i in [0, n) on `jobs` threads; rethrows the first failure.
template <typename F>
inline void parallel_for(std::size_t n, int jobs, F&& work) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!first) first = std::current_exception();
                next = n;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

inline Manifest build(const BuildOptions& opt) {
    Manifest m;
    m.root_seed = opt.root_seed;
    m.per_level = opt.per_level;
    m.root = opt.out;
    if (opt.images.directory) m.image_dir = opt.images.directory->string();
    const std::size_t image_count = opt.images.directory ? opt.images.names().size() : 0;
    for (Task t : opt.tasks)
        for (int level : opt.levels)
            for (int i = 0; i < opt.per_level; ++i) {
                const auto seed = derive_seed(opt.root_seed, t, level, i);
                const int image_id = image_count ? static_cast<int>(static_cast<std::size_t>(i) % image_count) : i;
                m.entries.push_back({t, level, seed, image_id, entry_dir(t, level, seed)});
            }

    parallel_for(m.entries.size(), opt.jobs, [&](std::size_t k) {
        const auto& e = m.entries[k];
        GenerateOptions g;
        g.images = opt.images;
        g.image_id = e.image_id;
        try {
            write_instance(generate_instance(e.task, e.level, e.seed, g), opt.out / e.dir, opt.images);
        } catch (const Error& err) {
            fail(err.kind(), std::string(to_string(e.task)) + " level " + std::to_string(e.level) + " seed " + std::to_string(e.seed) + ": " + err.message());
        }
    });
    write_json(opt.out / "manifest.json", to_json(m));
    return m;
}

// ---------------------------------------------------------------------------
// Audit

struct AuditResult {
    bool length_ok = false;  // certified optimal length equals the level
    bool replay_ok = false;  // replaying the ground truth reaches the goal
    std::size_t certified = 0;
};

inline bool replay_reaches_goal(const Instance& inst) {
    switch (inst.task) {
        case Task::PaperFold: {
            // The answer option must equal the pattern obtained by unfolding the punch.
            const auto& d = inst.as<PaperData>();
            const auto states = paperfold::fold_states(d.folds);
            const auto holes = paperfold::punch(states.back(), d.punch);
            const auto trace = paperfold::unfold_trace(states, d.holes);
            const auto& chosen = d.options.patterns[static_cast<std::size_t>(d.options.answer - 'A')];
            return !paperfold::distinct(holes, d.holes, 1e-6) && !trace.empty() && !paperfold::distinct(trace.back(), d.holes, 1e-6) &&
                   !paperfold::distinct(chosen, d.holes, 1e-6);
        }
        case Task::FormBoard: {
            const auto& s = inst.as<FormData>().set;
            return formboard::verify_tiling(s.target, formboard::placements(s)) && formboard::unique_by_area(s);
        }
        default: return score::grade_text(inst, score::format(score::parse_body(inst.task, gt_answer(inst)))).correct;
    }
}

inline AuditResult audit(const Instance& inst) {
    AuditResult r;
    r.certified = certified_length(inst);
    r.length_ok = r.certified == static_cast<std::size_t>(inst.level);
    r.replay_ok = replay_reaches_goal(inst);
    return r;
}

// ---------------------------------------------------------------------------
// Chance

struct Chance {
    double p = 0;
    std::optional<double> se;  // Monte Carlo branches only
    std::size_t samples = 0;
};

inline constexpr int kRandomSteps = 6;
inline constexpr std::size_t kMonteCarloN = 10'000;

/// Random `steps`-long action sequences; success if the goal holds after any prefix.
inline double monte_carlo_rush(const rushhour::Lot& lot, std::size_t n, std::uint64_t seed, int steps = kRandomSteps) {
    const auto actions = rushhour::all_actions(lot);
    // Transition memo: state key -> successor per action.
    struct Node {
        rushhour::RushState state;
        bool solved;
        std::vector<int> next;  // index into nodes, -1 until computed
    };
    std::vector<Node> nodes;
    std::unordered_map<std::vector<std::int64_t>, int, rushhour::StateKeyHash> index;
    auto intern = [&](const rushhour::RushState& s) {
        auto key = rushhour::state_key(s);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({s, rushhour::is_solved(lot, s), std::vector<int>(actions.size(), -1)});
        index.emplace(std::move(key), id);
        return id;
    };
    const int start = intern(rushhour::RushState::initial(lot));
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        int cur = start;
        for (int step = 0; step < steps; ++step) {
            const std::size_t a = rng.index(actions.size());
            if (nodes[static_cast<std::size_t>(cur)].next[a] < 0) {
                const int nx = intern(rushhour::apply(lot, nodes[static_cast<std::size_t>(cur)].state, actions[a]));
                nodes[static_cast<std::size_t>(cur)].next[a] = nx;
            }
            cur = nodes[static_cast<std::size_t>(cur)].next[a];
            if (nodes[static_cast<std::size_t>(cur)].solved) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

inline double monte_carlo_slide(const slidepuzzle::Board& board, std::size_t n, std::uint64_t seed, int steps = kRandomSteps) {
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) {
        auto b = board;
        for (int step = 0; step < steps; ++step) {
            slidepuzzle::SlideMove legal[4];
            std::size_t count = 0;
            for (auto m : slidepuzzle::kMoveOrder)
                if (slidepuzzle::target_cell(b, m)) legal[count++] = m;
            b = slidepuzzle::apply(b, legal[rng.index(count)]);
            if (b.solved()) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

/// Probability that a uniform guess for this instance is graded correct.
inline double hinge_chance(const HingeData& d) {
    double p = 1;
    for (std::size_t i = 0; i < d.chain.hinges.size(); ++i) p /= static_cast<double>(hingefold::admissible_angles(d.chain, i).size());
    return p;
}

/// Chance accuracy of one (task, level) group, averaged over its instances.
inline Chance chance(const std::vector<Instance>& group, std::size_t n = kMonteCarloN, std::uint64_t mc_seed = 0) {
    if (group.empty()) fail(ErrorKind::EmptyGroup, "no instances for chance computation");
    const Task t = group.front().task;
    Chance c;
    switch (t) {
        case Task::FormBoard: c.p = 1.0 / 31.0; return c;
        case Task::PaperFold: c.p = 1.0 / 5.0; return c;
        case Task::HingeFolding: {
            double sum = 0;
            for (const auto& inst : group) sum += hinge_chance(inst.as<HingeData>());
            c.p = sum / static_cast<double>(group.size());
            return c;
        }
        case Task::RushHour:
        case Task::SlidingPuzzle: {
            double sum = 0;
            for (const auto& inst : group) {
                const std::uint64_t s = splitmix64(mc_seed ^ splitmix64(inst.seed));
                sum += t == Task::RushHour ? monte_carlo_rush(inst.as<RushData>().lot, n, s) : monte_carlo_slide(inst.as<SlideData>().board, n, s);
            }
            c.p = sum / static_cast<double>(group.size());
            c.samples = n * group.size();
            c.se = std::sqrt(c.p * (1 - c.p) / static_cast<double>(c.samples));
            return c;
        }
    }
    return c;
}

}  // namespace mentes::bench
