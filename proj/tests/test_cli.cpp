#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

#include <sys/wait.h>
#include <unistd.h>

#include "mentes/bench.hpp"
#include "mentes/score.hpp"

using namespace mentes;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Result cli(const std::string& args) {
    const std::string cmd = std::string(MENTES_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    while (auto n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path tmp(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("mentes_cli_" + name + "_" + std::to_string(::getpid()));
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

}  // namespace

TEST(Cli, GenerateSolveSimulate) {
    const auto d = tmp("gen");
    auto r = cli("generate --task rush_hour --level 3 --seed 7 --out " + d.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(d / "instance.json"));
    EXPECT_TRUE(fs::exists(d / "initial_state.png"));
    EXPECT_TRUE(fs::exists(d / "cot_03.png"));
    EXPECT_TRUE(fs::exists(d / "transcript.txt"));

    const auto inst = bench::load_instance(d / "instance.json");
    r = cli("solve --instance " + (d / "instance.json").string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto solved = json::parse(r.out);
    EXPECT_TRUE(score::grade(inst, score::parse_body(Task::RushHour, solved["answer"].get<std::string>())).correct);

    r = cli("simulate --instance " + (d / "instance.json").string() + " --answer 'Z forward'");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(json::parse(r.out)["record"]["failure_reason"], "invalid_identifier");

    r = cli("render --instance " + (d / "instance.json").string() + " --out " + (d / "r").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(bench::read_text(d / "r" / "initial_state.png"), bench::read_text(d / "initial_state.png"));
    fs::remove_all(d);
}

TEST(Cli, BuildTwiceIsIdenticalThenScoreAndChance) {
    const auto a = tmp("build_a"), b = tmp("build_b");
    const std::string common = " --root-seed 42 --per-level 3 --task paper_fold --task form_board --level 1 --level 2 --jobs 2";
    ASSERT_EQ(cli("build --out " + a.string() + common).code, 0);
    ASSERT_EQ(cli("build --out " + b.string() + common).code, 0);
    EXPECT_EQ(tree(a), tree(b));

    // A run directory holding the ground-truth answers.
    const auto m = bench::load_manifest(a / "manifest.json");
    const auto run = tmp("run");
    for (const auto& e : m.entries) {
        const auto inst = m.load(e);
        bench::write_json(run / to_string(e.task) / ("level_" + std::to_string(e.level)) / (std::to_string(e.seed) + ".json"),
                          {{"instance_id", inst.id()}, {"raw_text", json{{"answer", gt_answer(inst)}}.dump()}, {"omitted", false}});
    }
    const auto csv = run / "acc.csv";
    auto r = cli("score --run " + run.string() + " --manifest " + (a / "manifest.json").string() + " --out " + csv.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto table = bench::read_text(csv);
    EXPECT_EQ(table.rfind("task,level,n,correct,accuracy,ci_low,ci_high,omitted\n", 0), 0u);
    EXPECT_NE(table.find("form_board,1,3,3,1.0000"), std::string::npos) << table;
    EXPECT_NE(table.find("paper_fold,2,3,3,1.0000"), std::string::npos) << table;

    r = cli("chance --manifest " + (a / "manifest.json").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("paper_fold,1,0.2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("form_board,1,0.0322"), std::string::npos) << r.out;
    for (const auto& p : {a, b, run}) fs::remove_all(p);
}

TEST(Cli, ExitCodes) {
    auto r = cli("");
    EXPECT_EQ(r.code, 2);
    r = cli("generate --task rush_hour");
    EXPECT_EQ(r.code, 2);
    r = cli("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("serve-study"), std::string::npos);

    const auto d = tmp("bad");
    r = cli("generate --task chess --level 1 --seed 1 --out " + d.string());
    EXPECT_EQ(r.code, 1);
    const auto err = json::parse(r.out.substr(r.out.find('{')));
    EXPECT_EQ(err["error"], "ConfigError");
    EXPECT_EQ(err["message"].get<std::string>().find("ConfigError"), std::string::npos);

    r = cli("solve --instance " + (d / "missing.json").string());
    EXPECT_EQ(r.code, 1);
    r = cli("simulate --instance /dev/null --answer x");
    EXPECT_EQ(r.code, 1);
}
