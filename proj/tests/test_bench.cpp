#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include <unistd.h>

#include "mentes/bench.hpp"
#include "mentes/render/frames.hpp"

using namespace mentes;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("mentes_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            out[fs::relative(e.path(), root).generic_string()] = {std::istreambuf_iterator<char>(in), {}};
        }
    return out;
}

bench::BuildOptions small(const fs::path& out) {
    bench::BuildOptions o;
    o.root_seed = 42;
    o.out = out;
    o.per_level = 2;
    o.levels = {1, 2};
    o.jobs = 2;
    return o;
}

}  // namespace

TEST(Seeds, StableAndDistinct) {
    EXPECT_EQ(bench::derive_seed(42, Task::RushHour, 3, 7), bench::derive_seed(42, Task::RushHour, 3, 7));
    std::set<std::uint64_t> seen;
    for (Task t : kAllTasks)
        for (int level = 1; level <= 5; ++level)
            for (int i = 0; i < 30; ++i) seen.insert(bench::derive_seed(42, t, level, i));
    EXPECT_EQ(seen.size(), 750u);
    EXPECT_NE(bench::derive_seed(42, Task::RushHour, 1, 0), bench::derive_seed(43, Task::RushHour, 1, 0));
}

TEST(Build, SmallManifestLayoutAndDeterminism) {
    const auto a = scratch_dir("build_a"), b = scratch_dir("build_b");
    const auto m = bench::build(small(a));
    bench::build(small(b));
    EXPECT_EQ(m.entries.size(), 20u);
    EXPECT_EQ(tree(a), tree(b));

    const auto loaded = bench::load_manifest(a / "manifest.json");
    ASSERT_EQ(loaded.entries.size(), m.entries.size());
    const auto doc = bench::read_json(a / "manifest.json");
    EXPECT_EQ(doc["version"], "mentes-1.0");
    EXPECT_EQ(doc["root_seed"], 42);
    for (const auto& e : loaded.entries) {
        const auto dir = a / e.dir;
        EXPECT_EQ(e.dir, std::string(to_string(e.task)) + "/level_" + std::to_string(e.level) + "/" + std::to_string(e.seed));
        const auto inst = loaded.load(e);
        EXPECT_TRUE(fs::exists(dir / render::question_file(e.task)));
        EXPECT_TRUE(fs::exists(dir / render::cot_file(static_cast<std::size_t>(e.level))));
        EXPECT_FALSE(fs::exists(dir / render::cot_file(static_cast<std::size_t>(e.level) + 1)));
        EXPECT_EQ(fs::exists(dir / "transcript.txt"), e.task == Task::RushHour);
        const auto gt = bench::read_json(dir / "gt.json");
        EXPECT_EQ(gt["answer"], gt_answer(inst));
        EXPECT_EQ(gt["instance_id"], inst.id());
        const auto audit = bench::audit(inst);
        EXPECT_TRUE(audit.length_ok && audit.replay_ok) << inst.id();
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Build, ErrorsCarryInstanceContext) {
    const auto out = scratch_dir("bad_images");
    auto o = small(out);
    o.tasks = {Task::SlidingPuzzle};
    o.images.directory = out / "missing";
    try {
        bench::build(o);
        FAIL() << "expected MissingAsset";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingAsset);
    }
    fs::remove_all(out);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
    std::vector<std::atomic<int>> hits(500);
    bench::parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(bench::parallel_for(100, 3, [](std::size_t i) {
                     if (i == 37) fail(ErrorKind::InvalidState, "boom");
                 }),
                 Error);
}

TEST(Chance, SelectionTasksAreExact) {
    for (int level = 1; level <= 5; ++level) {
        std::vector<Instance> paper, form;
        for (std::uint64_t s = 0; s < 3; ++s) {
            paper.push_back(generate_instance(Task::PaperFold, level, s));
            form.push_back(generate_instance(Task::FormBoard, level, s));
        }
        EXPECT_EQ(bench::chance(paper).p, 0.2);
        EXPECT_EQ(bench::chance(form).p, 1.0 / 31.0);
        EXPECT_FALSE(bench::chance(paper).se.has_value());
    }
}

TEST(Chance, HingeIsProductOfAdmissibleSizes) {
    for (int level = 1; level <= 3; ++level) {
        const auto inst = generate_instance(Task::HingeFolding, level, 55);
        const auto& chain = inst.as<HingeData>().chain;
        double p = 1;
        for (std::size_t h = 0; h < chain.hinges.size(); ++h) p /= chain.kinds[h] == chain.kinds[h + 1] ? 6.0 : 7.0;
        EXPECT_DOUBLE_EQ(bench::chance({inst}).p, p);
    }
}

TEST(Chance, MonteCarloIsSeededAndStable) {
    std::vector<Instance> rush, slide;
    for (std::uint64_t s = 0; s < 3; ++s) {
        rush.push_back(generate_instance(Task::RushHour, 1, s));
        slide.push_back(generate_instance(Task::SlidingPuzzle, 2, s));
    }
    for (const auto* g : {&rush, &slide}) {
        const auto a = bench::chance(*g, 4000, 1), b = bench::chance(*g, 4000, 1), c = bench::chance(*g, 4000, 2);
        EXPECT_EQ(a.p, b.p);
        EXPECT_NEAR(a.p, c.p, 0.03);
        ASSERT_TRUE(a.se.has_value());
        EXPECT_GT(*a.se, 0.0);
    }
}

TEST(Chance, SlidingMonteCarloMatchesExactWalk) {
    // Exact probability that a uniform walk over legal blank moves hits the solved board within six steps.
    auto exact = [](const slidepuzzle::Board& start) {
        std::map<std::vector<int>, double> mass{{[&] {
            auto k = start.perm;
            k.push_back(start.blank);
            return k;
        }(), 1.0}};
        double hit = 0;
        for (int step = 0; step <= bench::kRandomSteps; ++step) {
            std::map<std::vector<int>, double> next;
            for (const auto& [key, p] : mass) {
                std::vector<int> perm(key.begin(), key.end() - 1);
                bool solved = true;
                for (std::size_t i = 0; i < perm.size(); ++i) solved = solved && perm[i] == static_cast<int>(i);
                if (solved) {
                    hit += p;
                    continue;
                }
                if (step == bench::kRandomSteps) continue;
                const int blank = key.back(), r = blank / 3, c = blank % 3;
                std::vector<int> cells;
                if (r > 0) cells.push_back(blank - 3);
                if (r < 2) cells.push_back(blank + 3);
                if (c > 0) cells.push_back(blank - 1);
                if (c < 2) cells.push_back(blank + 1);
                for (int cell : cells) {
                    auto k = perm;
                    std::swap(k[static_cast<std::size_t>(blank)], k[static_cast<std::size_t>(cell)]);
                    k.push_back(cell);
                    next[k] += p / static_cast<double>(cells.size());
                }
            }
            mass = std::move(next);
        }
        return hit;
    };
    for (int level = 1; level <= 3; ++level) {
        const auto b = generate_instance(Task::SlidingPuzzle, level, 12).as<SlideData>().board;
        const double want = exact(b);
        const std::size_t n = 20000;
        const double got = bench::monte_carlo_slide(b, n, 9);
        EXPECT_NEAR(got, want, 4.5 * std::sqrt(want * (1 - want) / n) + 1e-3) << "level " << level;
    }
}

TEST(Files, AtomicWriteReplaces) {
    const auto dir = scratch_dir("files");
    bench::write_text(dir / "a" / "x.txt", "one");
    bench::write_text(dir / "a" / "x.txt", "two");
    EXPECT_EQ(bench::read_text(dir / "a" / "x.txt"), "two");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir / "a"), fs::directory_iterator{}), 1);
    EXPECT_THROW(bench::read_json(dir / "nope.json"), Error);
    fs::remove_all(dir);
}
