#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <thread>

#include <unistd.h>

#include "mentes/studyserver.hpp"

using namespace mentes;
namespace fs = std::filesystem;

namespace {

class StudyTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = fs::temp_directory_path() / ("mentes_study_" + std::to_string(::getpid()));
        fs::remove_all(root_);
        bench::BuildOptions o;
        o.root_seed = 9;
        o.out = root_;
        o.per_level = 6;
        o.tasks = {Task::RushHour};
        bench::build(o);
        manifest_ = new bench::Manifest(bench::load_manifest(root_ / "manifest.json"));
    }
    static void TearDownTestSuite() {
        delete manifest_;
        fs::remove_all(root_);
    }

    static fs::path root_;
    static bench::Manifest* manifest_;
};

fs::path StudyTest::root_;
bench::Manifest* StudyTest::manifest_ = nullptr;

/// Runs a server on a free port for the lifetime of the object.
struct Running {
    study::StudyServer server;
    int port;
    std::thread thread;
    httplib::Client client;

    explicit Running(study::Session s) : server(std::move(s)), port(server.bind()), thread([this] { server.serve(); }), client("127.0.0.1", port) {
        server.wait_until_ready();
    }
    ~Running() {
        server.stop();
        thread.join();
    }

    json current() {
        auto res = client.Get("/api/trial/current");
        EXPECT_TRUE(res);
        return json::parse(res->body);
    }

    std::pair<int, json> respond(const json& body) {
        auto res = client.Post("/api/response", body.dump(), "application/json");
        EXPECT_TRUE(res);
        return {res->status, json::parse(res->body)};
    }
};

std::string human(const Instance& inst) {
    std::string out;
    for (const auto& a : inst.as<RushData>().gt_actions) {
        out += a.label;
        out += a.direction == rushhour::Direction::Forward ? "F " : "B ";
    }
    return out;
}

}  // namespace

TEST_F(StudyTest, SessionComposition) {
    const auto s = study::create_session(*manifest_, "p01", 1);
    ASSERT_EQ(s.trials.size(), 7u + 30u);
    std::set<std::uint64_t> manifest_seeds;
    for (const auto& e : manifest_->entries) manifest_seeds.insert(e.seed);
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_TRUE(s.trials[i].practice);
        EXPECT_EQ(s.trials[i].reveal, i < 2);
        EXPECT_FALSE(manifest_seeds.count(s.trials[i].instance.seed));
    }
    std::set<std::string> used;
    for (int b = 0; b < 3; ++b) {
        std::map<int, int> per_level;
        for (std::size_t i = 7 + static_cast<std::size_t>(b) * 10; i < 17 + static_cast<std::size_t>(b) * 10; ++i) {
            const auto& t = s.trials[i];
            EXPECT_FALSE(t.practice);
            EXPECT_EQ(t.block, b);
            ++per_level[t.instance.level];
            EXPECT_TRUE(used.insert(t.instance.id()).second) << "repeated " << t.instance.id();
        }
        for (int level = 1; level <= 5; ++level) EXPECT_EQ(per_level[level], 2) << "block " << b;
    }
}

TEST_F(StudyTest, SeedFixesOrder) {
    auto ids = [&](std::uint64_t seed) {
        std::vector<std::string> out;
        for (const auto& t : study::create_session(*manifest_, "p", seed).trials) out.push_back(t.instance.id());
        return out;
    };
    EXPECT_EQ(ids(3), ids(3));
    EXPECT_NE(ids(3), ids(4));
}

TEST_F(StudyTest, TooFewInstances) {
    study::SessionConfig cfg;
    cfg.blocks = 4;
    try {
        study::create_session(*manifest_, "p", 1, cfg);
        FAIL() << "expected GenerationFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GenerationFailed);
    }
}

TEST_F(StudyTest, HumanAnswerGrading) {
    const auto inst = manifest_->load(*manifest_->select(Task::RushHour, 2).front());
    EXPECT_TRUE(study::grade_human(inst, human(inst)));
    auto lower = human(inst);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    EXPECT_TRUE(study::grade_human(inst, lower));
    EXPECT_FALSE(study::grade_human(inst, "RX"));
    EXPECT_FALSE(study::grade_human(inst, ""));
}

TEST_F(StudyTest, TrialFlowOverHttp) {
    study::SessionConfig cfg;
    cfg.blocks = 1;
    Running r(study::create_session(*manifest_, "p02", 11, cfg));
    const auto& trials = r.server.session().trials;

    auto cur = r.current();
    EXPECT_FALSE(cur["done"].get<bool>());
    EXPECT_EQ(cur["index"], 0);
    EXPECT_EQ(cur["total"], 17);
    EXPECT_TRUE(cur["practice"].get<bool>());
    EXPECT_EQ(cur["time_limit_ms"], 30000);
    EXPECT_NE(cur["instructions"].get<std::string>().find("AF CB RF"), std::string::npos);
    EXPECT_EQ(cur["reveal"], human(trials[0].instance).substr(0, human(trials[0].instance).size() - 1));
    const auto png = eval::unbase64(cur["image_png_base64"].get<std::string>());
    EXPECT_EQ(render::decode_png(png).width, 512);

    auto [status, body] = r.respond({{"index", 0}, {"answer", human(trials[0].instance)}, {"rt_ms", 1234.5}});
    EXPECT_EQ(status, 200);
    EXPECT_TRUE(body["correct"].get<bool>());
    EXPECT_EQ(body["next_index"], 1);

    // The same trial twice is a conflict; a trial that is not active is rejected.
    EXPECT_EQ(r.respond({{"index", 0}, {"answer", "RF"}, {"rt_ms", 10}}).first, 409);
    EXPECT_EQ(r.respond({{"index", 5}, {"answer", "RF"}, {"rt_ms", 10}}).first, 400);

    cur = r.current();
    EXPECT_EQ(cur["index"], 1);
    EXPECT_FALSE(cur["reveal"].is_null());
    auto timed_out = r.respond({{"answer", ""}, {"timeout", true}});
    EXPECT_TRUE(timed_out.second["timeout"].get<bool>());
    EXPECT_FALSE(timed_out.second["correct"].get<bool>());

    cur = r.current();
    EXPECT_TRUE(cur["reveal"].is_null());
    auto slow = r.respond({{"answer", human(trials[2].instance)}, {"rt_ms", 30001}});
    EXPECT_TRUE(slow.second["timeout"].get<bool>());

    for (std::size_t i = 3; i < trials.size(); ++i) {
        cur = r.current();
        if (i == 7) EXPECT_TRUE(cur["break_before"].get<bool>());
        r.respond({{"answer", i % 2 ? human(trials[i].instance) : std::string("RF")}, {"rt_ms", 2000}});
    }
    EXPECT_TRUE(r.current()["done"].get<bool>());

    const auto recs = r.server.records();
    ASSERT_EQ(recs.size(), trials.size());
    EXPECT_TRUE(recs[1].timeout);
    EXPECT_TRUE(recs[1].answer.empty());
    EXPECT_TRUE(recs[2].timeout);

    auto csv = r.client.Get("/api/export?format=csv");
    ASSERT_TRUE(csv);
    EXPECT_EQ(csv->body.rfind("participant_trial,instance_id,task,level,practice,block,answer,rt_ms,server_rt_ms,correct,timeout\n", 0), 0u);
    EXPECT_EQ(std::count(csv->body.begin(), csv->body.end(), '\n'), static_cast<long>(trials.size() + 1));

    auto js = r.client.Get("/api/export?format=json");
    ASSERT_TRUE(js);
    const auto doc = json::parse(js->body);
    EXPECT_EQ(doc["participant"], "p02");
    ASSERT_EQ(doc["trials"].size(), trials.size());
    // Re-grading the export reproduces the feedback given during the session.
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& t = doc["trials"][i];
        const bool regraded = !t["timeout"].get<bool>() && study::grade_human(trials[i].instance, t["answer"].get<std::string>());
        EXPECT_EQ(regraded, t["correct"].get<bool>()) << i;
    }

    EXPECT_EQ(r.client.Get("/api/export?format=xml")->status, 400);
}

TEST_F(StudyTest, ServerSideTimeout) {
    study::SessionConfig cfg;
    cfg.blocks = 1;
    cfg.time_limit_ms = 50;
    Running r(study::create_session(*manifest_, "p03", 2, cfg));
    r.current();
    std::this_thread::sleep_for(std::chrono::milliseconds(120));
    auto [status, body] = r.respond({{"answer", human(r.server.session().trials[0].instance)}, {"rt_ms", 10}});
    EXPECT_EQ(status, 200);
    EXPECT_TRUE(body["timeout"].get<bool>());
    EXPECT_GT(r.server.records()[0].server_rt_ms, 50.0);
}

TEST_F(StudyTest, AnswerBeforeDeliveryRejected) {
    study::SessionConfig cfg;
    cfg.blocks = 1;
    Running r(study::create_session(*manifest_, "p04", 2, cfg));
    EXPECT_EQ(r.respond({{"answer", "RF"}, {"rt_ms", 10}}).first, 400);
    auto res = r.client.Post("/api/response", "not json", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
}
