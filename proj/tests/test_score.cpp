#include <gtest/gtest.h>

#include <limits>

#include "mentes/score.hpp"

using namespace mentes;
using score::FailureReason;

namespace {

score::ParsedAnswer gt_parsed(const Instance& inst) { return score::parse_body(inst.task, gt_answer(inst)); }

}  // namespace

TEST(Parse, SlidingExample) {
    const auto p = score::parse(Task::SlidingPuzzle, R"({"answer": "up right down left up"})");
    using M = slidepuzzle::SlideMove;
    EXPECT_EQ(p.slide, (std::vector{M::Up, M::Right, M::Down, M::Left, M::Up}));
}

TEST(Parse, FormBoardExample) {
    const auto p = score::parse(Task::FormBoard, R"({"answer": "A C E"})");
    EXPECT_EQ(p.labels, (std::vector<char>{'A', 'C', 'E'}));
    EXPECT_EQ(score::parse(Task::FormBoard, R"({"answer": "e, a"})").labels, (std::vector<char>{'A', 'E'}));
}

TEST(Parse, NoAnswerDocument) {
    try {
        score::parse(Task::RushHour, "the answer is probably B forward");
        FAIL() << "expected Malformed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Malformed);
    }
}

TEST(Parse, RushAndHinge) {
    const auto r = score::parse(Task::RushHour, "I think...\n{\"answer\": \"A forward, R backward\"}");
    ASSERT_EQ(r.rush.size(), 2u);
    EXPECT_EQ(r.rush[1], (rushhour::RushAction{'R', rushhour::Direction::Backward}));
    const auto h = score::parse(Task::HingeFolding, "{\"answer\": \"A 90, B 45°\"}");
    EXPECT_EQ(h.hinge, (std::vector<std::pair<char, int>>{{'A', 90}, {'B', 45}}));
    EXPECT_EQ(score::parse(Task::PaperFold, "{\"answer\": \"c\"}").option, 'C');
}

TEST(Parse, LastAnswerDocumentWins) {
    const auto p = score::parse(Task::PaperFold, R"(draft {"answer": "A"} final {"answer": "D"})");
    EXPECT_EQ(p.option, 'D');
    EXPECT_EQ(score::extract_answer(R"({"note": {"x": 1}, "answer": "B"})"), std::optional<std::string>("B"));
    EXPECT_FALSE(score::extract_answer(R"({"result": "B"})").has_value());
}

TEST(Parse, FormatThenParseIsIdentity) {
    for (Task t : kAllTasks)
        for (int level = 1; level <= 5; ++level) {
            const auto inst = generate_instance(t, level, 300 + static_cast<std::uint64_t>(level));
            const auto p = gt_parsed(inst);
            EXPECT_EQ(score::parse(t, score::format(p)), p) << inst.id();
        }
}

TEST(Parse, HumanKeyboardFormat) {
    const auto a = score::parse_human_rush("AF CB RF");
    const auto b = score::parse_human_rush("afcbrf");
    ASSERT_EQ(a.rush.size(), 3u);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rush[1], (rushhour::RushAction{'C', rushhour::Direction::Backward}));
    EXPECT_THROW(score::parse_human_rush("AX"), Error);
    EXPECT_THROW(score::parse_human_rush("A"), Error);
}

TEST(Grade, GroundTruthIsCorrect) {
    for (Task t : kAllTasks)
        for (int level = 1; level <= 5; ++level) {
            const auto inst = generate_instance(t, level, 500 + static_cast<std::uint64_t>(level));
            const auto r = score::grade_text(inst, score::format(gt_parsed(inst)));
            EXPECT_TRUE(r.correct) << inst.id();
            EXPECT_EQ(r.failure_reason, FailureReason::None);
        }
}

TEST(Grade, DroppingAnActionUsuallyFails) {
    for (Task t : {Task::RushHour, Task::SlidingPuzzle, Task::HingeFolding})
        for (int level = 2; level <= 5; ++level) {
            const auto inst = generate_instance(t, level, 900 + static_cast<std::uint64_t>(level));
            auto p = gt_parsed(inst);
            if (t == Task::RushHour) p.rush.pop_back();
            if (t == Task::SlidingPuzzle) p.slide.pop_back();
            if (t == Task::HingeFolding) p.hinge.pop_back();
            // Optimal length is the level, so a shorter plan cannot reach the goal.
            EXPECT_FALSE(score::grade(inst, p).correct) << inst.id();
        }
}

TEST(Grade, FailureReasons) {
    const auto rush = generate_instance(Task::RushHour, 2, 1);
    EXPECT_EQ(score::grade_text(rush, R"({"answer": "Z forward"})").failure_reason, FailureReason::InvalidIdentifier);
    EXPECT_EQ(score::grade_text(rush, "no json").failure_reason, FailureReason::Malformed);
    EXPECT_EQ(score::grade_text(rush, R"({"answer": "R sideways"})").failure_reason, FailureReason::Malformed);

    const auto slide = generate_instance(Task::SlidingPuzzle, 2, 1);
    std::string off;
    for (auto m : {slidepuzzle::SlideMove::Up, slidepuzzle::SlideMove::Down, slidepuzzle::SlideMove::Left, slidepuzzle::SlideMove::Right})
        if (!slidepuzzle::target_cell(slide.as<SlideData>().board, m)) off = slidepuzzle::to_string(m);
    ASSERT_FALSE(off.empty());
    EXPECT_EQ(score::grade_text(slide, "{\"answer\": \"" + off + "\"}").failure_reason, FailureReason::InvalidMove);
    std::string many;
    for (int i = 0; i < 101; ++i) many += i % 2 ? " left" : " right";
    EXPECT_EQ(score::grade_text(slide, "{\"answer\": \"" + many + "\"}").failure_reason, FailureReason::InvalidMove);

    const auto hinge = generate_instance(Task::HingeFolding, 2, 1);
    EXPECT_EQ(score::grade_text(hinge, R"({"answer": "Q 90"})").failure_reason, FailureReason::InvalidIdentifier);
    EXPECT_EQ(score::grade_text(hinge, R"({"answer": "A 0"})").failure_reason, FailureReason::InvalidMove);
    EXPECT_EQ(score::grade_text(hinge, R"({"answer": "A 360"})").failure_reason, FailureReason::InvalidMove);
    EXPECT_EQ(score::grade_text(hinge, R"({"answer": "A 30"})").failure_reason, FailureReason::InvalidMove);

    const auto paper = generate_instance(Task::PaperFold, 2, 1);
    const char wrong = paper.as<PaperData>().options.answer == 'A' ? 'B' : 'A';
    EXPECT_EQ(score::grade_text(paper, R"({"answer": "F"})").failure_reason, FailureReason::InvalidIdentifier);
    EXPECT_EQ(score::grade_text(paper, std::string("{\"answer\": \"") + wrong + "\"}").failure_reason, FailureReason::WrongLabel);

    const auto form = generate_instance(Task::FormBoard, 2, 1);
    EXPECT_EQ(score::grade_text(form, R"({"answer": "A G"})").failure_reason, FailureReason::InvalidIdentifier);
}

TEST(Grade, ReasonNamesRoundTrip) {
    for (auto r : {FailureReason::None, FailureReason::Malformed, FailureReason::InvalidIdentifier, FailureReason::InvalidMove, FailureReason::GoalNotReached,
                   FailureReason::WrongLabel})
        EXPECT_EQ(score::reason_from_string(score::to_string(r)), r);
    EXPECT_STREQ(score::to_string(FailureReason::InvalidIdentifier), "invalid_identifier");
}

TEST(Aggregate, WilsonInterval) {
    const auto half = score::wilson(15, 30);
    EXPECT_NEAR(half.lo, 0.3315, 5e-4);
    EXPECT_NEAR(half.hi, 0.6685, 5e-4);
    const auto all = score::wilson(30, 30);
    EXPECT_DOUBLE_EQ(all.hi, 1.0);
    EXPECT_NEAR(all.lo, 0.8865, 5e-4);
}

TEST(Aggregate, GroupsAndOmissions) {
    std::vector<score::ScoreRecord> recs;
    for (int i = 0; i < 30; ++i) {
        score::ScoreRecord r;
        r.task = Task::PaperFold;
        r.level = 2;
        r.correct = i < 15;
        recs.push_back(r);
    }
    score::ScoreRecord skipped;
    skipped.task = Task::PaperFold;
    skipped.level = 2;
    skipped.omitted = true;
    recs.push_back(skipped);
    const auto rows = score::aggregate(recs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 30u);
    EXPECT_EQ(rows[0].omitted, 1u);
    EXPECT_DOUBLE_EQ(*rows[0].accuracy, 0.5);
    EXPECT_EQ(score::to_csv(rows), "task,level,n,correct,accuracy,ci_low,ci_high,omitted\npaper_fold,2,30,15,0.5000,0.3315,0.6685,1\n");
    EXPECT_THROW(score::aggregate({}), Error);
}

TEST(TimeCutoff, Properties) {
    std::vector<score::TrialRecord> trials;
    Rng rng(4);
    for (int i = 0; i < 60; ++i) {
        score::TrialRecord t;
        t.level = 1 + i % 5;
        t.correct = rng.chance(0.6);
        if (i % 7) t.rt_ms = rng.uniform(1000, 30000);
        trials.push_back(t);
    }
    score::TrialRecord practice;
    practice.level = 1;
    practice.correct = true;
    practice.rt_ms = 10;
    practice.practice = true;
    trials.push_back(practice);

    // Missing response times count as never fast enough, so +inf keeps only timed correct answers.
    const auto uncut = score::time_cutoff(trials, std::numeric_limits<double>::infinity());
    for (const auto& [level, acc] : uncut) {
        std::size_t n = 0, c = 0;
        for (const auto& t : trials)
            if (!t.practice && t.level == level) {
                ++n;
                c += t.correct && t.rt_ms;
            }
        EXPECT_DOUBLE_EQ(acc, static_cast<double>(c) / static_cast<double>(n));
    }
    for (const auto& [level, acc] : score::time_cutoff(trials, 0)) EXPECT_EQ(acc, 0.0);
    std::map<int, double> prev;
    for (double t : {1.0, 5.0, 10.0, 20.0, 30.0}) {
        const auto cur = score::time_cutoff(trials, t);
        for (const auto& [level, acc] : cur) EXPECT_GE(acc, prev[level]);
        prev = cur;
    }
}
