#include <gtest/gtest.h>

#include <set>

#include "mentes/render/frames.hpp"

using namespace mentes;

TEST(Render, SameStateSameBytes) {
    for (Task t : kAllTasks) {
        const auto inst = generate_instance(t, 3, 17);
        EXPECT_EQ(render::encode_png(render::question_image(inst).image), render::encode_png(render::question_image(inst).image)) << to_string(t);
    }
}

TEST(Render, PngRoundTrip) {
    const auto img = render::question_image(generate_instance(Task::RushHour, 2, 5)).image;
    const auto back = render::decode_png(render::encode_png(img));
    EXPECT_EQ(back.width, img.width);
    EXPECT_EQ(back.height, img.height);
    EXPECT_EQ(back.rgb, img.rgb);
}

TEST(Render, FrameCountIsActionsPlusOne) {
    EXPECT_EQ(render::cot_frames(generate_instance(Task::RushHour, 1, 3)).size(), 2u);
    EXPECT_EQ(render::cot_frames(generate_instance(Task::SlidingPuzzle, 5, 3)).size(), 6u);
    for (Task t : kAllTasks)
        for (int level : {1, 4}) {
            const auto inst = generate_instance(t, level, 40);
            EXPECT_EQ(render::cot_frames(inst).size(), gt_actions(inst).size() + 1) << to_string(t) << " " << level;
            EXPECT_EQ(gt_actions(inst).size(), static_cast<std::size_t>(level));
        }
}

TEST(Render, RushLabelsCoverEveryVehicle) {
    const auto inst = generate_instance(Task::RushHour, 4, 12);
    const auto r = render::question_image(inst);
    std::set<char> drawn;
    for (const auto& l : r.labels) drawn.insert(l.label);
    for (const auto& v : inst.as<RushData>().lot.vehicles) EXPECT_TRUE(drawn.count(v.label)) << v.label;
}

TEST(Render, ImagesAreNotBlank) {
    for (Task t : kAllTasks) {
        const auto img = render::question_image(generate_instance(t, 2, 8)).image;
        ASSERT_GT(img.width, 0);
        std::set<std::uint32_t> colours;
        for (std::size_t i = 0; i + 2 < img.rgb.size(); i += 3) colours.insert((img.rgb[i] << 16) | (img.rgb[i + 1] << 8) | img.rgb[i + 2]);
        EXPECT_GT(colours.size(), 3u) << to_string(t);
    }
}

TEST(Render, QuestionFileNames) {
    EXPECT_STREQ(render::question_file(Task::RushHour), "initial_state.png");
    EXPECT_STREQ(render::question_file(Task::SlidingPuzzle), "initial.png");
    EXPECT_STREQ(render::question_file(Task::FormBoard), "combined.png");
    EXPECT_EQ(render::cot_file(3), "cot_03.png");
}

TEST(InstanceJson, RoundTripEveryTask) {
    for (Task t : kAllTasks)
        for (int level = 1; level <= 5; ++level) {
            const auto inst = generate_instance(t, level, 1000 + static_cast<std::uint64_t>(level));
            const auto j = to_json(inst);
            const auto back = instance_from_json(json::parse(j.dump()));
            EXPECT_EQ(to_json(back).dump(), j.dump()) << inst.id();
            EXPECT_EQ(gt_answer(back), gt_answer(inst));
            EXPECT_EQ(back.id(), inst.id());
        }
}

TEST(InstanceJson, MalformedDocument) {
    try {
        instance_from_json(json{{"task", "rush_hour"}});
        FAIL() << "expected Malformed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Malformed);
    }
    EXPECT_THROW(task_from_string("chess"), Error);
}
