// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <string>
#include <thread>

#include <httplib.h>

#include "mentes/bench.hpp"
#include "mentes/evalrunner.hpp"
#include "mentes/render/frames.hpp"
#include "mentes/score.hpp"
#include "oracles.hpp"

using namespace mentes;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// Relative path -> contents for every regular file under root.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    return out;
}

std::vector<Instance> load_all(const bench::Manifest& m) {
    std::vector<Instance> out;
    for (const auto& e : m.entries) out.push_back(m.load(e));
    return out;
}

// ---------------------------------------------------------------------------

void manifest_integrity(const bench::Manifest& m, const std::vector<Instance>& all, double build_s, int jobs) {
    std::size_t ok = 0, files_ok = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto a = bench::audit(all[i]);
        ok += a.length_ok && a.replay_ok;
        const auto dir = m.root / m.entries[i].dir;
        const auto frames = render::cot_frames(all[i], m.images()).size();
        bool present = fs::exists(dir / "instance.json") && fs::exists(dir / "gt.json") && fs::exists(dir / render::question_file(all[i].task));
        for (std::size_t k = 0; k < frames; ++k) present = present && fs::exists(dir / render::cot_file(k));
        files_ok += present;
    }
    const auto reloaded = bench::load_manifest(m.root / "manifest.json");
    const bool pass = m.entries.size() == 750 && reloaded.entries.size() == 750 && ok == 750 && files_ok == 750 && build_s < 600;
    report(pass, "manifest_integrity",
           std::to_string(m.entries.size()) + " instances, certified+replayed " + std::to_string(ok) + "/750, files " + std::to_string(files_ok) +
               "/750, build " + fmt("%.1f", build_s) + " s with --jobs " + std::to_string(jobs));
}

void slide_to_contact() {
    Rng rng(20240601);
    std::size_t match = 0, clean = 0;
    double worst = 0;
    const std::size_t n = 1000;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = oracle::random_scene(rng);
        std::vector<geom::Shape> others;
        for (const auto& o : s.obstacles) others.emplace_back(geom::Polygon{o});
        const double got = geom::max_slide(geom::OrientedRect{s.center, s.length, s.width, s.heading}, s.axis, others, geom::AxisRect{{0, 0}, {s.size, s.size}});
        const double want = oracle::slide_by_bisection(s);
        worst = std::max(worst, std::abs(got - want));
        match += std::abs(got - want) <= 1e-4;
        const auto at = oracle::moved(s, got);
        bool ok = oracle::free_at(s, got, 1e-7);
        for (const auto& o : s.obstacles) ok = ok && oracle::penetration(at, o) <= 1e-7;
        clean += ok;
    }
    report(match == n && clean == n, "slide_to_contact",
           std::to_string(match) + "/1000 within 1e-4 (max error " + fmt("%.2e", worst) + "), " + std::to_string(clean) + "/1000 without interpenetration");
}

void bfs_optimality(const std::vector<Instance>& all) {
    std::size_t checked = 0, equal = 0;
    for (const auto& inst : all) {
        std::optional<std::size_t> exhaustive, solver;
        if (inst.task == Task::RushHour) {
            const auto& lot = inst.as<RushData>().lot;
            exhaustive = oracle::rush_exhaustive(lot, 6);
            if (auto s = rushhour::solve_bfs(lot)) solver = s->size();
        } else if (inst.task == Task::SlidingPuzzle) {
            const auto& b = inst.as<SlideData>().board;
            exhaustive = oracle::slide_exhaustive(b, 6);
            solver = slidepuzzle::solve(b).size();
        } else {
            continue;
        }
        if (!exhaustive) continue;  // deeper than the enumeration reaches
        ++checked;
        equal += solver == exhaustive;
    }
    report(checked == 300 && equal == checked, "bfs_optimality",
           std::to_string(equal) + "/" + std::to_string(checked) + " Rush Hour and Sliding Puzzle instances match exhaustive depth-6 minimum");
}

void paper_fold_oracle(const std::vector<Instance>& all) {
    std::size_t n = 0, ok = 0;
    for (const auto& inst : all) {
        if (inst.task != Task::PaperFold) continue;
        ++n;
        const auto& d = inst.as<PaperData>();
        const auto engine = paperfold::punch(paperfold::fold_states(d.folds).back(), d.punch);
        const auto tracked = oracle::tracked_holes(d.folds, d.punch, 100);
        ok += oracle::same_point_set(engine, tracked) && oracle::same_point_set(d.holes, tracked);
    }
    report(n == 150 && ok == n, "paper_fold_oracle", std::to_string(ok) + "/" + std::to_string(n) + " hole patterns equal the 10^4-point tracker within 1e-6");
}

void chance_baselines(const bench::Manifest& m) {
    bool pass = true;
    std::string detail;
    for (int level = 1; level <= 5; ++level) {
        std::map<Task, std::vector<Instance>> g;
        for (Task t : kAllTasks)
            for (const auto* e : m.select(t, level)) g[t].push_back(m.load(*e));

        pass = pass && bench::chance(g[Task::PaperFold]).p == 0.2;
        pass = pass && bench::chance(g[Task::FormBoard]).p == 1.0 / 31.0;

        double closed = 0;
        for (const auto& inst : g[Task::HingeFolding]) {
            const auto& chain = inst.as<HingeData>().chain;
            double p = 1;
            for (std::size_t h = 0; h < chain.hinges.size(); ++h) p /= static_cast<double>(hingefold::admissible_angles(chain, h).size());
            closed += p;
        }
        closed /= static_cast<double>(g[Task::HingeFolding].size());
        pass = pass && std::abs(bench::chance(g[Task::HingeFolding]).p - closed) < 1e-12;

        for (Task t : {Task::RushHour, Task::SlidingPuzzle}) {
            const double a = bench::chance(g[t], bench::kMonteCarloN, 1).p;
            const double b = bench::chance(g[t], bench::kMonteCarloN, 2).p;
            pass = pass && std::abs(a - b) <= 0.02;
            detail += std::string(t == Task::RushHour ? " rush" : " slide") + std::to_string(level) + "=" + fmt("%.4f/%.4f", a, b);
        }
        detail += " hinge" + std::to_string(level) + "=" + fmt("%.6f", closed);
    }
    report(pass, "chance_baselines", "paper_fold 0.2, form_board 1/31, hinge closed form;" + detail);
}

void grading_soundness(const std::vector<Instance>& all) {
    std::vector<score::ScoreRecord> recs;
    for (const auto& inst : all) recs.push_back(score::grade_text(inst, score::format(score::parse_body(inst.task, gt_answer(inst)))));
    bool perfect = true;
    for (const auto& row : score::aggregate(recs)) perfect = perfect && row.accuracy == 1.0 && row.n == 30;

    const Instance* rush = nullptr;
    const Instance* slide = nullptr;
    const Instance* hinge = nullptr;
    for (const auto& inst : all) {
        if (!rush && inst.task == Task::RushHour) rush = &inst;
        if (!slide && inst.task == Task::SlidingPuzzle) slide = &inst;
        if (!hinge && inst.task == Task::HingeFolding) hinge = &inst;
    }
    // A move that drives the blank off the board from the initial state.
    std::string off_board;
    for (auto mv : {slidepuzzle::SlideMove::Up, slidepuzzle::SlideMove::Down, slidepuzzle::SlideMove::Left, slidepuzzle::SlideMove::Right})
        if (!slidepuzzle::target_cell(slide->as<SlideData>().board, mv)) off_board = slidepuzzle::format_moves({mv});
    struct Fixture {
        const Instance* inst;
        std::string text;
        score::FailureReason want;
    };
    const std::vector<Fixture> fixtures{
        {rush, "the answer is probably B forward", score::FailureReason::Malformed},
        {slide, "{\"answer\": \"up, sideways\"}", score::FailureReason::Malformed},
        {rush, "{\"answer\": \"Z forward\"}", score::FailureReason::InvalidIdentifier},
        {hinge, "{\"answer\": \"Z 90\"}", score::FailureReason::InvalidIdentifier},
        {slide, "{\"answer\": \"" + off_board + "\"}", score::FailureReason::InvalidMove},
    };
    std::size_t hit = 0;
    for (const auto& f : fixtures) {
        const auto r = score::grade_text(*f.inst, f.text);
        hit += !r.correct && r.failure_reason == f.want;
    }
    report(perfect && hit == fixtures.size() && !off_board.empty(), "grading_soundness",
           std::string("GT accuracy ") + (perfect ? "1.000" : "<1") + " on all 25 groups; " + std::to_string(hit) + "/" + std::to_string(fixtures.size()) +
               " malformed/invalid_identifier/invalid_move fixtures");
}

// ---------------------------------------------------------------------------

/// Chat-completions stub answering from a table keyed by the question image.
class Stub {
public:
    using Answer = std::function<std::string(const std::string& key)>;

    explicit Stub(Answer answer) : answer_(std::move(answer)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = json::parse(req.body);
            std::string key;
            for (const auto& part : body["messages"][0]["content"])
                if (part["type"] == "image_url") {
                    key = part["image_url"]["url"].get<std::string>();
                    break;
                }
            const json reply{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", answer_(key)}}}}})}};
            res.set_content(reply.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~Stub() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

private:
    Answer answer_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string image_key(const bench::Manifest& m, const bench::Entry& e) {
    const auto bytes = slurp(m.root / e.dir / render::question_file(e.task));
    return "data:image/png;base64," + eval::base64(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

void end_to_end(const bench::Manifest& m, const fs::path& work) {
    std::map<std::string, std::string> gt;
    for (const auto& e : m.entries) gt[image_key(m, e)] = score::format(score::parse_body(e.task, gt_answer(m.load(e))));

    bool gt_pass = false;
    std::string detail;
    {
        Stub stub([&](const std::string& key) {
            auto it = gt.find(key);
            return it == gt.end() ? std::string("no idea") : "Reasoning omitted.\n" + it->second;
        });
        eval::RunConfig cfg;
        cfg.endpoint = stub.endpoint();
        cfg.model = "stub-gt";
        cfg.concurrency = 4;
        const auto stats = eval::run(m, cfg, work / "run_gt");
        const auto rows = score::aggregate(eval::score_run(m, work / "run_gt"));
        gt_pass = rows.size() == 25 && stats.done == 750 && stats.omitted == 0;
        for (const auto& r : rows) gt_pass = gt_pass && r.n == 30 && r.accuracy == 1.0;
        detail = "GT stub accuracy " + std::string(gt_pass ? "1.000" : "<1") + " on " + std::to_string(rows.size()) + " groups";
    }

    // Uniform guesses over the task's answer space.
    bool rand_pass = true;
    std::map<std::string, Task> task_of;
    for (const auto& e : m.entries) task_of[image_key(m, e)] = e.task;
    {
        Stub stub([&](const std::string& key) {
            Rng rng(splitmix64(stable_hash(key) ^ 0x5eedULL));
            const auto it = task_of.find(key);
            if (it == task_of.end()) return std::string("no idea");
            if (it->second == Task::PaperFold) return json{{"answer", std::string(1, static_cast<char>('A' + rng.integer(0, 4)))}}.dump();
            const auto mask = rng.integer(1, 31);
            std::vector<char> labels;
            for (int b = 0; b < 5; ++b)
                if (mask & (1 << b)) labels.push_back(static_cast<char>('A' + b));
            return json{{"answer", format_labels(labels)}}.dump();
        });
        eval::RunConfig cfg;
        cfg.endpoint = stub.endpoint();
        cfg.model = "stub-uniform";
        cfg.concurrency = 4;
        eval::RunFilter only{{Task::FormBoard, Task::PaperFold}, {}};
        eval::run(m, cfg, work / "run_uniform", only);
        const auto recs = eval::score_run(m, work / "run_uniform", only);
        for (Task t : {Task::FormBoard, Task::PaperFold}) {
            std::size_t n = 0, c = 0;
            for (const auto& r : recs)
                if (r.task == t && !r.omitted) {
                    ++n;
                    c += r.correct;
                }
            const auto ci = score::wilson(c, n);
            const double p = t == Task::FormBoard ? 1.0 / 31.0 : 0.2;
            rand_pass = rand_pass && n == 150 && ci.lo <= p && p <= ci.hi;
            detail += std::string("; uniform ") + to_string(t) + " " + std::to_string(c) + "/" + std::to_string(n) + fmt(" CI [%.3f, %.3f] vs chance %.4f", ci.lo, ci.hi, p);
        }
    }
    report(gt_pass && rand_pass, "end_to_end", detail);
}

void determinism(const fs::path& a, const fs::path& b) {
    const auto ta = tree(a), tb = tree(b);
    std::size_t pngs = 0;
    for (const auto& [k, v] : ta) pngs += k.size() > 4 && k.substr(k.size() - 4) == ".png";
    report(!ta.empty() && ta == tb, "determinism",
           std::to_string(ta.size()) + " files (" + std::to_string(pngs) + " PNGs) " + (ta == tb ? "byte-identical" : "differ") + " across two builds");
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "mentes_acceptance";
    const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    fs::remove_all(work);
    fs::create_directories(work);

    try {
        bench::BuildOptions opt;
        opt.root_seed = 42;
        opt.jobs = jobs;
        opt.out = work / "build_a";
        auto t0 = std::chrono::steady_clock::now();
        const auto m = bench::build(opt);
        const double build_s = seconds_since(t0);
        const auto manifest = bench::load_manifest(opt.out / "manifest.json");
        const auto all = load_all(manifest);

        manifest_integrity(manifest, all, build_s, jobs);
        slide_to_contact();
        bfs_optimality(all);
        paper_fold_oracle(all);
        chance_baselines(manifest);
        grading_soundness(all);
        end_to_end(manifest, work);

        opt.out = work / "build_b";
        bench::build(opt);
        determinism(work / "build_a", work / "build_b");
    } catch (const std::exception& e) {
        report(false, "acceptance", std::string("aborted: ") + e.what());
    }
    fs::remove_all(work);
    return failures;
}
