#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mentes/bench.hpp"
#include "mentes/render/frames.hpp"

namespace mentes::prompts {

enum class Variant { Standard, Interleaved, GtCot, IclText, IclVisual, ToolUse, Optimized, TextOnly };

inline constexpr Variant kAllVariants[] = {Variant::Standard, Variant::Interleaved, Variant::GtCot,     Variant::IclText,
                                           Variant::IclVisual, Variant::ToolUse,    Variant::Optimized, Variant::TextOnly};

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::Standard: return "standard";
        case Variant::Interleaved: return "interleaved";
        case Variant::GtCot: return "gt_cot";
        case Variant::IclText: return "icl_text";
        case Variant::IclVisual: return "icl_visual";
        case Variant::ToolUse: return "tool_use";
        case Variant::Optimized: return "optimized";
        case Variant::TextOnly: return "text_only";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    for (auto v : kAllVariants)
        if (s == to_string(v)) return v;
    fail(ErrorKind::ConfigError, "unknown prompt variant '" + s + "'");
}

/// A text segment or an attached PNG.
struct Part {
    enum class Kind { Text, Image } kind = Kind::Text;
    std::string text;
    std::vector<std::uint8_t> png;
    std::string name;  // file name the image came from, for logs
};

using Message = std::vector<Part>;

// Templates. "{{image}}" marks where the question image goes, "{{description}}" the
// Rush Hour transcription.
namespace text {

inline constexpr const char* kFormBoard = R"(Look at the image:
It is showing from left to right, a target shape outlined in black and five pieces labeled A through E in various colors:
{{image}}

Rules:
1. The target shape can be assembled using 1 to 5 of the given pieces.
2. Pieces must fit together perfectly with no gaps or overlaps.
3. Some pieces are distractors and are not needed.
4. Pieces are shown in their correct orientation and size (no rotation or scaling needed).

Task:
Determine the subset of pieces from {A, B, C, D, E} necessary to assemble the target shape.

Output: Respond in JSON format as follows:
{"answer": "A C E"}

List only the letter labels of the pieces needed, separated by space.)";

inline constexpr const char* kHinge = R"(Look at the image:
The left side shows several rigid shapes connected by labeled hinges (A, B, C, ...).
On the right side is a target folded configuration:
{{image}}

Rules:
1. Shapes are connected in a kinematic chain; each hinge connects two adjacent shapes.
2. Rotating hinge N causes the shape on the right side of the hinge in the original configuration to rotate anti-clockwise.
  All shapes are connected; all shapes to the right of the rotated shape rotate with it.
  All shapes to the left of the hinge remain fixed.
3. Rotations must be multiples of 45° (i.e., 45°, 90°, 135°, 180°, 225°, 270°, 315°).
4. Shapes maintain their connections throughout all rotations.
5. The goal is to find the sequence of hinge rotations that transforms the initial configuration into the target.

Task:
Determine the rotation angle (in degrees) for each numbered hinge to achieve the target configuration.

Output: Respond in JSON format as follows:
{"answer": "A 90, B 90, C 180"}

Each pair specifies the hinge label and its rotation angle in degrees.
If multiple solutions exist, output any valid sequence that produces the target configuration.)";

inline constexpr const char* kPaperFold = R"(Look at the image:
In the first row, it shows a sequence of folds performed on a square paper. The final image in the sequence shows one or more holes being punched into the folded paper.
The second row shows five unfolded square papers with different hole patterns labeled A through E:
{{image}}

Rules:
1. The paper starts as a flat square.
2. Each step shows the paper being folded along a line (horizontal, vertical, or diagonal).
3. After all folds are complete, one hole is punched through all layers at the marked positions.
4. When the paper is unfolded completely, holes appear at multiple positions due to the layering.
5. One of the five options (A, B, C, D, E) shows the correct hole pattern.

Task:
1. Mentally follow each fold in sequence as shown in the first row.
2. Track where the hole is punched through all folded layers.
3. Mentally unfold the paper with the punched hole step-by-step in reverse order.
4. Determine which unfolded pattern (A, B, C, D, or E) matches your mental result.

Output: Respond in JSON format as follows:
{"answer": "C"})";

inline constexpr const char* kRushHour = R"(Look at the image:
It shows the initial configuration of a congested parking lot. Each colored rectangle with a letter and arrow represents a vehicle. Black rectangles without a letter represent immovable obstacles. The light green area at the border indicates the exit. The goal is to move the red vehicle (marked with an R) to the exit:
{{image}}

Rules:
1. Each vehicle can only move forward or backward along its own axis (indicated in the image as a dashed line) - no rotation is allowed. The arrow on each vehicle indicates the forward direction.
2. A vehicle continues to move in the chosen direction until it touches another vehicle, an immovable object, or the image's boundary (marked with a light black line).
3. Only one vehicle moves per action.
4. The red vehicle must reach the exit on the edge of the grid.

Task:
Plan the minimal sequence of moves needed to free the red car and allow it to exit the parking lot.
Each move should specify which vehicle moves and in which direction (forward or backward).

Output: Respond in JSON format as follows:
{"answer": "A forward, C backward, E forward, R forward"}

Each pair specifies the vehicle label and the direction of its move.
If multiple sequences lead to a valid solution, output any one valid sequence that allows the red car to exit.)";

inline constexpr const char* kSliding = R"(Look at the image:
Below is a scrambled sliding tile puzzle where a natural image has been cut into an n x n grid with one blank (black) tile:
{{image}}

Rules:
1. The puzzle consists of an n x n grid with one blank tile and n^2-1 image tiles.
2. You can move the blank tile in four directions: up, down, left, right.
3. Each action swaps the blank with the adjacent tile in the specified direction.
4. Only valid moves are allowed (the blank cannot move outside the grid boundaries).
5. The goal is to reconstruct the original, coherent image by rearranging the scrambled tiles.

Task:
Determine the shortest sequence of moves needed to solve the puzzle and restore the original image.

Output: Respond in JSON format as follows:
{"answer": "up right down left up"}

Each word specifies a direction to move the blank tile.
You may guess the most plausible move even if uncertain. Small mistakes are acceptable.)";

inline constexpr const char* kFormBoardInterleaved = R"(Look at the image:
It shows, from left to right, a target shape outlined in black and five pieces labeled A through E in various colors:
{{image}}

Rules:
1. The target shape can be assembled using 1 to 5 of the given pieces.
2. Pieces must fit together perfectly with no gaps or overlaps.
3. Some pieces are distractors and are not needed.
4. Pieces are shown in their correct orientation and size (no rotation or scaling needed).

Task:
Move one piece at a time of {A, B, C, D, E} from the right into the outlined target shape on the left. Generate a new image for each move.
If you notice a mistake, you may also return a piece from the outlined target shape back to the candidate shapes. Also generate a new image in this case.
Finally, using your intermediate images, determine the subset of pieces from {A, B, C, D, E} necessary to assemble the target shape.

Output:
First, reason through the moves and generate images with the updated puzzle states. Make sure that these updated images are generated by the rules specified above. Generate one image after each move.
Finally, respond in JSON format as follows:
{"answer": "A C E"}

List only the letter labels of the pieces needed, separated by spaces.)";

inline constexpr const char* kHingeInterleaved = R"(Look at the image:
The left side shows several rigid shapes connected by labeled hinges (A, B, C, ...).
On the right side is a target folded configuration:
{{image}}

Rules:
1. Shapes are connected in a kinematic chain - each hinge connects two adjacent shapes.
2. Rotating hinge N causes the shape on the right side of the hinge in the original configuration to rotate anti-clockwise.
  All shapes are connected; all shapes to the right of the rotated shape rotate with it.
  All shapes to the left of the hinge remain fixed.
3. Rotations must be multiples of 45° (i.e., 45°, 90°, 135°, 180°, 225°, 270°, 315°).
4. Shapes maintain their connections throughout all rotations.
5. The goal is to find the sequence of hinge rotations that transforms the initial configuration into the target.

Task:
Determine the rotation angle (in degrees) for each numbered hinge to achieve the target configuration.
After each move, generate a new image in which you update the left side of the image to reflect your proposed hinge rotation.
Once the outlines of the left and right side of the image match, output your rotation sequence.

Output:
First, reason through the moves and generate images with the updated puzzle states. Make sure that these updated images are generated by following the rules specified above. Generate one image after each rotated hinge.
Respond in JSON format as follows:
{"answer": "A 90, B 90, C 180"}

Each pair specifies the hinge label and its rotation angle in degrees.
If multiple solutions exist, output any valid sequence that produces the target configuration.)";

inline constexpr const char* kPaperFoldInterleaved = R"(Look at the image:
In the first row, it shows a sequence of folds performed on a square paper. The final image in the sequence shows one or more holes being punched into the folded paper.
The second row shows five unfolded square papers with different hole patterns labeled A through E:
{{image}}

Rules:
1. The paper starts as a flat square.
2. Each step shows the paper being folded along a line (horizontal, vertical, or diagonal).
3. After all folds are complete, one hole is punched through all layers at the marked positions.
4. When the paper is unfolded completely, holes appear at multiple positions due to the layering.
5. One of the five options (A, B, C, D, E) shows the correct hole pattern.

Task:
1. Mentally follow each fold in sequence as shown in the first row.
2. Track where holes are punched through all folded layers.
3. Unfold the paper with the punched hole step-by-step in reverse order.
4. After each unfolding move, generate an image of the (partially) unfolded paper with hole(s) in the correct positions.
5. Determine which unfolded pattern (A, B, C, D, or E) matches your generated result.

Output:
First, reason through the moves and generate images with the progressively more unfolded paper sheet. Make sure that these updated images are generated by following the rules specified above. Generate one image after each unfold.
Finally, respond in JSON format as follows:
{"answer": "C"})";

inline constexpr const char* kRushHourInterleaved = R"(Look at the image:
It shows the initial configuration of a congested parking lot. Each colored rectangle with a letter and arrow represents a vehicle. Black rectangles without a letter represent immovable obstacles. The light green area at the border indicates the exit. The goal is to move the red vehicle (marked with an R) to the exit:
{{image}}

Rules:
1. Each vehicle can only move forward or backward along its own axis (indicated in the image as a dashed line) - no rotation is allowed. The arrow on each vehicle indicates the forward direction.
2. A vehicle continues to move in the chosen direction until it touches another vehicle, an immovable object, or the image's boundary (marked with a light black line).
3. Only one vehicle moves per action.
4. The red vehicle must reach the exit on the edge of the grid.

Task:
Plan the minimal sequence of moves needed to free the red car and allow it to exit the parking lot.
Each move should specify which vehicle moves and in which direction (forward or backward).
After each move, generate an image showing the updated puzzle state.

Output:
First, reason through the moves and generate images with the updated puzzle states. Make sure that these updated images are generated by following the rules specified above.
Generate one image after each move.
Finally, respond in JSON format as follows:
{"answer": "A forward, C backward, E forward, R forward"}

Each pair specifies the vehicle label and the direction of its move.
If multiple sequences lead to a valid solution, output any one valid sequence that allows the red car to exit.)";

inline constexpr const char* kSlidingInterleaved = R"(Look at the image:
Below is a scrambled sliding tile puzzle where a natural image has been cut into an n x n grid with one blank (black) tile:
{{image}}

Rules:
1. The puzzle consists of an n x n grid with one blank tile and n^2-1 image tiles.
2. You can move the blank tile in four directions: up, down, left, right.
3. Each action swaps the blank with the adjacent tile in the specified direction.
4. Only valid moves are allowed (the blank cannot move outside the grid boundaries).
5. The goal is to reconstruct the original, coherent image by rearranging the scrambled tiles.

Task:
Determine the shortest sequence of moves needed to solve the puzzle and restore the original image.
After each move, generate an image of how the puzzle state looks, i.e., showing the swap of the blank tile and the adjacent image tile.

Output:
First, reason through the moves and generate images with the updated puzzle states. Make sure that these updated images are generated by following the rules specified above. Generate one image after each proposed move.
Finally, respond in JSON format as follows:
{"answer": "up right down left up"}

Each word specifies a direction to move the blank tile.
You may guess the most plausible move even if uncertain. Small mistakes are acceptable.)";

inline constexpr const char* kOptimized = R"(Look at the image:
You are given an image of a Rush Hour-style sliding block puzzle. Each colored rectangle with a capital letter and an arrow is a movable vehicle. Black rectangles with no letters are fixed obstacles (walls). A light green opening on the border is the exit. The goal is to move the red vehicle labeled "R" so it can slide out through the exit:
{{image}}

Rules:
1. Each vehicle is either horizontal or vertical (shown by its arrow direction). Vehicles never rotate or move diagonally.
2. A vehicle may move only along its own axis:
  - "forward" = exactly in the direction the arrow points,
  - "backward" = exactly opposite that direction.
3. When a vehicle moves, it must slide in the chosen direction until its front edge first touches:
  - another vehicle, or
  - a fixed black obstacle, or
  - the outer boundary of the grid.
  It cannot stop earlier and cannot pass through anything.
4. Only one vehicle moves per action.
5. The puzzle is solved when R can make a single legal slide through the green exit area.

Task:
1. From the image, internally identify every vehicle by:
  - its letter (a single uppercase letter),
  - its arrow direction (which defines forward vs. backward),
  - its orientation (horizontal or vertical).
2. Internally reason step-by-step to find a legal sequence of moves that:
  - clears a path for R to the exit, and then
  - moves R out through the exit in a final legal move.
  Focus first on vehicles directly blocking R, then on vehicles blocking those blockers, and so on. Avoid pointless back-and-forth moves; prefer short, efficient solutions.
3. Check that every planned move obeys the rules: the chosen vehicle moves only along its axis and slides as far as possible in that direction until contact.

Output format:
- Do all visual analysis and reasoning internally. Do NOT display your intermediate reasoning or any text other than the JSON object.
- Respond with a single JSON object and no extra text before or after it.
- Use exactly this format: one string listing the moves in order, separated by commas:
{"answer": "A forward, C backward, E forward, R forward"}

Each item in the string must be:
- a single uppercase vehicle letter from the image,
- a space,
- the word "forward" or "backward".
Return only this JSON object as your final answer.)";

inline constexpr const char* kTextOnly = R"(Read the description:
It specifies the initial configuration of a congested parking lot. Every vehicle is a rectangle given by its label, center, length, width and rotation, and the axis along which it can move forward or backward. Static objects are axis-aligned rectangles given by two opposite corners. The exit is an interval on one edge of the lot. The goal is to move the red vehicle (R) to the exit:

{{description}}
Rules:
1. Each vehicle can only move forward or backward along its own axis (given in the description) - no rotation is allowed.
2. A vehicle continues to move in the chosen direction until it touches another vehicle, a static object, or the boundary of the lot.
3. Only one vehicle moves per action.
4. The red vehicle must reach the exit on the edge of the lot.

Task:
Plan the minimal sequence of moves needed to free the red car and allow it to exit the parking lot.
Each move should specify which vehicle moves and in which direction (forward or backward).

Output: Respond in JSON format as follows:
{"answer": "A forward, C backward, E forward, R forward"}

Each pair specifies the vehicle label and the direction of its move.
If multiple sequences lead to a valid solution, output any one valid sequence that allows the red car to exit.)";

inline constexpr const char* kGtCot = "The following images correspond to intermediate images in the reasoning process.\nYou must use them to obtain your answer:";

inline constexpr const char* kToolUse = "Use your python tool to solve this question.";

}  // namespace text

inline const char* standard_template(Task t) {
    switch (t) {
        case Task::FormBoard: return text::kFormBoard;
        case Task::HingeFolding: return text::kHinge;
        case Task::PaperFold: return text::kPaperFold;
        case Task::RushHour: return text::kRushHour;
        case Task::SlidingPuzzle: return text::kSliding;
    }
    return "";
}

inline const char* interleaved_template(Task t) {
    switch (t) {
        case Task::FormBoard: return text::kFormBoardInterleaved;
        case Task::HingeFolding: return text::kHingeInterleaved;
        case Task::PaperFold: return text::kPaperFoldInterleaved;
        case Task::RushHour: return text::kRushHourInterleaved;
        case Task::SlidingPuzzle: return text::kSlidingInterleaved;
    }
    return "";
}

inline bool supported(Task t, Variant v) {
    switch (v) {
        case Variant::IclText:
        case Variant::IclVisual:
        case Variant::Optimized:
        case Variant::TextOnly: return t == Task::RushHour;
        default: return true;
    }
}

namespace detail {

inline void push_text(Message& m, const std::string& s) {
    if (s.empty()) return;
    if (!m.empty() && m.back().kind == Part::Kind::Text) m.back().text += s;
    else m.push_back({Part::Kind::Text, s, {}, {}});
}

inline void push_image(Message& m, const render::Image& img, const std::string& name) {
    m.push_back({Part::Kind::Image, {}, render::encode_png(img), name});
}

/// Splits a template at "{{image}}" and "{{description}}".
inline void expand(Message& m, const std::string& tpl, const render::Image* image, const std::string& image_name, const std::string& description) {
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const auto a = tpl.find("{{image}}", pos), b = tpl.find("{{description}}", pos);
        const auto next = std::min(a, b);
        push_text(m, tpl.substr(pos, next - pos));
        if (next == std::string::npos) break;
        if (next == a) {
            if (!image) fail(ErrorKind::MissingAsset, "template needs an image");
            push_image(m, *image, image_name);
            pos = a + 9;
        } else {
            push_text(m, description);
            pos = b + 15;
        }
    }
}

}  // namespace detail

/// Fixed Rush Hour examples, one per level, shared by both in-context variants.
inline const std::vector<Instance>& icl_examples() {
    static const std::vector<Instance> examples = [] {
        std::vector<Instance> out;
        for (int level = 1; level <= 5; ++level)
            out.push_back(generate_instance(Task::RushHour, level, splitmix64(stable_hash("icl-examples") + static_cast<std::uint64_t>(level))));
        return out;
    }();
    return examples;
}

inline void append_icl(Message& m, bool visual) {
    detail::push_text(m, "\n\nExamples:\n");
    int k = 0;
    for (const auto& ex : icl_examples()) {
        const auto& d = ex.as<RushData>();
        detail::push_text(m, "\n" + std::to_string(++k) + ". This is the initial parking lot:\n");
        const auto states = rushhour::trajectory(d.lot, d.gt_actions);
        detail::push_image(m, render::render_rush(d.lot, states.front()).image, "icl_level_" + std::to_string(ex.level) + "_initial.png");
        if (visual)
            for (std::size_t i = 0; i < d.gt_actions.size(); ++i) {
                detail::push_text(m, "\nAfter moving " + rushhour::to_string(d.gt_actions[i]) + " the parking lot would look like:\n");
                detail::push_image(m, render::render_rush(d.lot, states[i + 1]).image, "icl_level_" + std::to_string(ex.level) + "_" + render::cot_file(i + 1));
            }
        detail::push_text(m, "\nThe correct solution for this sample would be:\n" + json{{"answer", gt_answer(ex)}}.dump() + "\n");
    }
}

/// Ordered text and image parts of the user message.
inline Message build_prompt(const Instance& inst, Variant v, const ImageSource& images = {}) {
    if (!supported(inst.task, v))
        fail(ErrorKind::UnsupportedVariant, std::string("variant ") + to_string(v) + " is not defined for " + mentes::to_string(inst.task));
    Message m;
    const std::string qname = render::question_file(inst.task);
    if (v == Variant::TextOnly) {
        detail::expand(m, text::kTextOnly, nullptr, {}, rushhour::transcribe(inst.as<RushData>().lot));
        return m;
    }
    const auto question = render::question_image(inst, images).image;
    const char* tpl = v == Variant::Interleaved ? interleaved_template(inst.task) : v == Variant::Optimized ? text::kOptimized : standard_template(inst.task);
    detail::expand(m, tpl, &question, qname, {});
    switch (v) {
        case Variant::GtCot: {
            detail::push_text(m, std::string("\n\n") + text::kGtCot + "\n");
            const auto frames = render::cot_frames(inst, images);
            for (std::size_t i = 0; i < frames.size(); ++i) detail::push_image(m, frames[i].image, render::cot_file(i));
            break;
        }
        case Variant::ToolUse: detail::push_text(m, std::string("\n\n") + text::kToolUse); break;
        case Variant::IclText: append_icl(m, false); break;
        case Variant::IclVisual: append_icl(m, true); break;
        default: break;
    }
    return m;
}

inline std::size_t image_count(const Message& m) {
    std::size_t n = 0;
    for (const auto& p : m) n += p.kind == Part::Kind::Image;
    return n;
}

inline std::string text_of(const Message& m) {
    std::string out;
    for (const auto& p : m) out += p.kind == Part::Kind::Text ? p.text : "<image " + p.name + ">";
    return out;
}

}  // namespace mentes::prompts
