#pragma once

#include <string>
#include <vector>

#include "mentes/instance.hpp"
#include "mentes/render/png.hpp"
#include "mentes/render/scenes.hpp"

namespace mentes::render {

/// Source picture for a sliding puzzle.
inline Image slide_source(const SlideData& d, const ImageSource& images) {
    if (d.image_name.rfind("synthetic_", 0) == 0 || !images.directory) return synthetic_image(d.image_id);
    return read_png(*images.directory / (d.image_name + ".png"));
}

inline const char* question_file(Task t) {
    switch (t) {
        case Task::RushHour: return "initial_state.png";
        case Task::SlidingPuzzle: return "initial.png";
        default: return "combined.png";
    }
}

inline std::string cot_file(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cot_%02zu.png", i);
    return buf;
}

inline Rendered question_image(const Instance& inst, const ImageSource& images = {}, const RenderSpec& spec = {}) {
    switch (inst.task) {
        case Task::RushHour: {
            const auto& d = inst.as<RushData>();
            return render_rush(d.lot, rushhour::RushState::initial(d.lot), spec);
        }
        case Task::SlidingPuzzle: {
            const auto& d = inst.as<SlideData>();
            return render_slide(d.board, slide_source(d, images), spec);
        }
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            std::vector<hingefold::HingeChain> states{d.chain};
            for (std::size_t i = 0; i < d.gt_angles.size(); ++i) states.push_back(hingefold::rotate_hinge(states.back(), i, d.gt_angles[i]));
            return render_hinge(d.chain, d.target, hinge_frame(states, d.target), spec);
        }
        case Task::PaperFold: {
            const auto& d = inst.as<PaperData>();
            return render_paper_combined(d.folds, d.punch, d.options, spec);
        }
        case Task::FormBoard: return render_formboard(inst.as<FormData>().set, {}, spec);
    }
    fail(ErrorKind::InvalidState, "unknown task");
}

/// Ground-truth visual chain of thought: one frame per state, actions + 1 in total.
inline std::vector<Rendered> cot_frames(const Instance& inst, const ImageSource& images = {}, const RenderSpec& spec = {}) {
    std::vector<Rendered> out;
    switch (inst.task) {
        case Task::RushHour: {
            const auto& d = inst.as<RushData>();
            for (const auto& s : rushhour::trajectory(d.lot, d.gt_actions)) out.push_back(render_rush(d.lot, s, spec));
            break;
        }
        case Task::SlidingPuzzle: {
            const auto& d = inst.as<SlideData>();
            const Image src = slide_source(d, images);
            auto b = d.board;
            out.push_back(render_slide(b, src, spec));
            for (auto m : d.gt_moves) {
                b = slidepuzzle::apply(b, m);
                out.push_back(render_slide(b, src, spec));
            }
            break;
        }
        case Task::HingeFolding: {
            const auto& d = inst.as<HingeData>();
            std::vector<hingefold::HingeChain> states{d.chain};
            for (std::size_t i = 0; i < d.gt_angles.size(); ++i) states.push_back(hingefold::rotate_hinge(states.back(), i, d.gt_angles[i]));
            const auto frame = hinge_frame(states, d.target);
            for (const auto& s : states) out.push_back(render_hinge(s, d.target, frame, spec));
            break;
        }
        case Task::PaperFold: {
            // Folded and punched, then one frame per unfold.
            const auto& d = inst.as<PaperData>();
            const auto states = paperfold::fold_states(d.folds);
            const auto trace = paperfold::unfold_trace(states, d.holes);
            out.push_back(render_paper_state(states.back(), {d.punch}, spec));
            for (std::size_t i = 0; i < trace.size(); ++i) {
                out.push_back(render_paper_state(states[states.size() - 2 - i], trace[i], spec));
            }
            break;
        }
        case Task::FormBoard: {
            const auto& s = inst.as<FormData>().set;
            std::vector<char> placed;
            out.push_back(render_formboard(s, placed, spec));
            for (char c : s.answer) {
                placed.push_back(c);
                out.push_back(render_formboard(s, placed, spec));
            }
            break;
        }
    }
    return out;
}

}  // namespace mentes::render
