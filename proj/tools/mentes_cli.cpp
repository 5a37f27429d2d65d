#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "mentes/bench.hpp"
#include "mentes/evalrunner.hpp"
#include "mentes/prompts.hpp"
#include "mentes/score.hpp"
#include "mentes/studyserver.hpp"

using namespace mentes;
namespace fs = std::filesystem;

namespace {

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

std::vector<Task> parse_tasks(const std::vector<std::string>& names) {
    std::vector<Task> out;
    for (const auto& n : names) out.push_back(task_from_string(n));
    return out;
}

ImageSource images_from(const std::string& dir) {
    ImageSource s;
    if (!dir.empty()) s.directory = fs::path(dir);
    return s;
}

score::ParsedAnswer parse_any(Task task, const std::string& text) {
    return text.find('{') != std::string::npos ? score::parse(task, text) : score::parse_body(task, text);
}

json simulate_states(const Instance& inst, const score::ParsedAnswer& a) {
    json states = json::array();
    switch (inst.task) {
        case Task::RushHour: {
            const auto& lot = inst.as<RushData>().lot;
            auto s = rushhour::RushState::initial(lot);
            states.push_back(s.offsets);
            for (const auto& act : a.rush) {
                s = rushhour::apply(lot, s, act);
                states.push_back(s.offsets);
            }
            break;
        }
        case Task::SlidingPuzzle: {
            auto b = inst.as<SlideData>().board;
            states.push_back(b.perm);
            for (auto m : a.slide) {
                b = slidepuzzle::apply(b, m);
                states.push_back(b.perm);
            }
            break;
        }
        case Task::HingeFolding: {
            auto c = inst.as<HingeData>().chain;
            for (const auto& [label, angle] : a.hinge) {
                c = hingefold::rotate_hinge(c, c.hinge_index(label), angle);
                json shapes = json::array();
                for (const auto& p : c.shapes) shapes.push_back(io::polygon(p));
                states.push_back(shapes);
            }
            break;
        }
        default: break;
    }
    return states;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Procedural generator, renderer, grader and evaluation harness for the MenteS puzzle tasks"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate one instance and write its files");
    std::string g_task, g_out, g_images;
    int g_level = 1, g_image_id = 0;
    std::uint64_t g_seed = 0;
    gen->add_option("--task", g_task, "Task name (rush_hour, sliding_puzzle, hinge_folding, paper_fold, form_board)")->required();
    gen->add_option("--level", g_level, "Difficulty level 1-5")->required()->check(CLI::Range(1, 5));
    gen->add_option("--seed", g_seed, "Instance seed")->required();
    gen->add_option("--out", g_out, "Output directory")->required();
    gen->add_option("--image-dir", g_images, "Directory of PNG images for the sliding puzzle (synthetic images when omitted)");
    gen->add_option("--image-id", g_image_id, "Image index for the sliding puzzle");

    // build
    auto* build = app.add_subcommand("build", "Build the full benchmark tree and manifest.json");
    std::uint64_t b_root = 0;
    std::string b_out, b_images;
    int b_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    int b_per_level = bench::kPerLevel;
    std::vector<std::string> b_tasks;
    std::vector<int> b_levels;
    build->add_option("--root-seed", b_root, "Root seed all instance seeds derive from")->required();
    build->add_option("--out", b_out, "Output directory")->required();
    build->add_option("--jobs", b_jobs, "Worker threads")->check(CLI::PositiveNumber);
    build->add_option("--per-level", b_per_level, "Instances per (task, level)")->check(CLI::PositiveNumber);
    build->add_option("--task", b_tasks, "Restrict to these tasks");
    build->add_option("--level", b_levels, "Restrict to these levels")->check(CLI::Range(1, 5));
    build->add_option("--image-dir", b_images, "Directory of PNG images for the sliding puzzle");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve an instance with its task solver");
    std::string s_instance;
    solve->add_option("--instance", s_instance, "Path to instance.json")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Replay an answer on an instance and grade it");
    std::string m_instance, m_answer;
    sim->add_option("--instance", m_instance, "Path to instance.json")->required();
    sim->add_option("--answer", m_answer, "Answer text, bare or as a JSON answer document")->required();

    // render
    auto* rend = app.add_subcommand("render", "Render the question image and chain-of-thought frames");
    std::string r_instance, r_out, r_images;
    rend->add_option("--instance", r_instance, "Path to instance.json")->required();
    rend->add_option("--out", r_out, "Output directory")->required();
    rend->add_option("--image-dir", r_images, "Directory of PNG images for the sliding puzzle");

    // score
    auto* sc = app.add_subcommand("score", "Grade a run directory and emit an accuracy table");
    std::string c_run, c_manifest, c_out, c_json, c_records;
    sc->add_option("--run", c_run, "Run directory")->required();
    sc->add_option("--manifest", c_manifest, "Path to manifest.json")->required();
    sc->add_option("--out", c_out, "CSV accuracy table (stdout when omitted)");
    sc->add_option("--json", c_json, "Also write the table as JSON");
    sc->add_option("--records", c_records, "Write per-instance score records as JSON");

    // chance
    auto* ch = app.add_subcommand("chance", "Chance accuracy per (task, level)");
    std::string h_manifest, h_out;
    std::size_t h_samples = bench::kMonteCarloN;
    std::uint64_t h_seed = 0;
    ch->add_option("--manifest", h_manifest, "Path to manifest.json")->required();
    ch->add_option("--samples", h_samples, "Monte Carlo sequences per instance")->check(CLI::PositiveNumber);
    ch->add_option("--seed", h_seed, "Monte Carlo seed");
    ch->add_option("--out", h_out, "CSV output (stdout when omitted)");

    // run
    auto* run = app.add_subcommand("run", "Query a chat-completion endpoint for every instance");
    std::string u_manifest, u_config, u_run_dir, u_variant;
    std::vector<std::string> u_tasks;
    std::vector<int> u_levels;
    run->add_option("--manifest", u_manifest, "Path to manifest.json")->required();
    run->add_option("--config", u_config, "Run config JSON (endpoint, model, variant, max_attempts, concurrency, api_key_env, params)")->required();
    run->add_option("--run-dir", u_run_dir, "Directory for result documents")->required();
    run->add_option("--variant", u_variant, "Override the prompt variant of the config");
    run->add_option("--task", u_tasks, "Restrict to these tasks");
    run->add_option("--level", u_levels, "Restrict to these levels")->check(CLI::Range(1, 5));

    // serve-study
    auto* serve = app.add_subcommand("serve-study", "Serve one human study session over HTTP");
    std::string v_manifest, v_participant = "anonymous", v_task = "rush_hour", v_ui, v_host = "127.0.0.1";
    int v_port = 8765, v_blocks = 3;
    std::uint64_t v_seed = 0;
    serve->add_option("--manifest", v_manifest, "Path to manifest.json")->required();
    serve->add_option("--participant", v_participant, "Participant id");
    serve->add_option("--seed", v_seed, "Session seed (trial order)");
    serve->add_option("--task", v_task, "Task of the session");
    serve->add_option("--blocks", v_blocks, "Number of 10-trial blocks")->check(CLI::PositiveNumber);
    serve->add_option("--port", v_port, "Port to listen on");
    serve->add_option("--host", v_host, "Address to bind");
    serve->add_option("--ui-dir", v_ui, "Static front-end directory served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*gen) {
            GenerateOptions opt;
            opt.images = images_from(g_images);
            opt.image_id = g_image_id;
            const auto inst = generate_instance(task_from_string(g_task), g_level, g_seed, opt);
            bench::write_instance(inst, g_out, opt.images);
            std::cout << json{{"instance_id", inst.id()}, {"out", g_out}, {"answer", gt_answer(inst)}}.dump() << "\n";
        } else if (*build) {
            bench::BuildOptions opt;
            opt.root_seed = b_root;
            opt.out = b_out;
            opt.jobs = b_jobs;
            opt.per_level = b_per_level;
            if (!b_tasks.empty()) opt.tasks = parse_tasks(b_tasks);
            if (!b_levels.empty()) opt.levels = b_levels;
            opt.images = images_from(b_images);
            const auto m = bench::build(opt);
            std::cout << json{{"instances", m.entries.size()}, {"manifest", (fs::path(b_out) / "manifest.json").string()}}.dump() << "\n";
        } else if (*solve) {
            const auto inst = bench::load_instance(s_instance);
            std::string answer;
            switch (inst.task) {
                case Task::RushHour: {
                    const auto sol = rushhour::solve_bfs(inst.as<RushData>().lot);
                    if (!sol) fail(ErrorKind::Unsolvable, "no solution within the search budget");
                    answer = rushhour::format_actions(*sol);
                    break;
                }
                case Task::SlidingPuzzle: answer = slidepuzzle::format_moves(slidepuzzle::solve(inst.as<SlideData>().board)); break;
                case Task::HingeFolding: {
                    const auto& d = inst.as<HingeData>();
                    const auto angles = hingefold::solve(d.chain, d.target);
                    std::vector<std::pair<char, int>> pairs;
                    for (std::size_t i = 0; i < angles.size(); ++i) pairs.emplace_back(d.chain.hinges[i].label, angles[i]);
                    answer = format_hinge_answer(pairs);
                    break;
                }
                case Task::PaperFold: {
                    // Recompute the punched pattern and pick the option showing it.
                    const auto& d = inst.as<PaperData>();
                    const auto holes = paperfold::punch(paperfold::fold_states(d.folds).back(), d.punch);
                    for (std::size_t k = 0; k < 5; ++k)
                        if (!paperfold::distinct(d.options.patterns[k], holes, 1e-6)) answer = std::string(1, static_cast<char>('A' + k));
                    if (answer.empty()) fail(ErrorKind::Unsolvable, "no option matches the punched pattern");
                    break;
                }
                case Task::FormBoard: {
                    // Smallest-area-error subset of the five pieces.
                    const auto& s = inst.as<FormData>().set;
                    const double t = s.target.area();
                    unsigned best = 0;
                    double best_err = 1e300;
                    for (unsigned mask = 1; mask < 32; ++mask) {
                        double sum = 0;
                        for (std::size_t i = 0; i < 5; ++i)
                            if (mask & (1u << i)) sum += s.pieces[i].shape.area();
                        if (std::abs(sum - t) < best_err) best_err = std::abs(sum - t), best = mask;
                    }
                    std::vector<char> labels;
                    for (std::size_t i = 0; i < 5; ++i)
                        if (best & (1u << i)) labels.push_back(s.pieces[i].label);
                    answer = format_labels(labels);
                    break;
                }
            }
            std::cout << json{{"instance_id", inst.id()}, {"answer", answer}, {"gt", gt_answer(inst)}}.dump() << "\n";
        } else if (*sim) {
            const auto inst = bench::load_instance(m_instance);
            json out{{"instance_id", inst.id()}};
            try {
                const auto parsed = parse_any(inst.task, m_answer);
                const auto rec = score::grade(inst, parsed);
                out["record"] = score::to_json(rec);
                if (rec.valid) out["states"] = simulate_states(inst, parsed);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Malformed) throw;
                out["record"] = score::to_json(score::malformed_record(inst));
            }
            std::cout << out.dump(2) << "\n";
        } else if (*rend) {
            const auto inst = bench::load_instance(r_instance);
            const auto images = images_from(r_images);
            const auto q = render::question_image(inst, images);
            const auto png = render::encode_png(q.image);
            bench::write_atomic(fs::path(r_out) / render::question_file(inst.task), png.data(), png.size());
            const auto frames = render::cot_frames(inst, images);
            for (std::size_t i = 0; i < frames.size(); ++i) {
                const auto bytes = render::encode_png(frames[i].image);
                bench::write_atomic(fs::path(r_out) / render::cot_file(i), bytes.data(), bytes.size());
            }
            std::cout << json{{"instance_id", inst.id()}, {"frames", frames.size()}}.dump() << "\n";
        } else if (*sc) {
            const auto m = bench::load_manifest(c_manifest);
            const auto records = eval::score_run(m, c_run);
            const auto rows = score::aggregate(records);
            const auto csv = score::to_csv(rows);
            if (c_out.empty()) std::cout << csv;
            else bench::write_text(c_out, csv);
            if (!c_json.empty()) bench::write_json(c_json, score::to_json(rows));
            if (!c_records.empty()) {
                json arr = json::array();
                for (const auto& r : records) arr.push_back(score::to_json(r));
                bench::write_json(c_records, arr);
            }
        } else if (*ch) {
            const auto m = bench::load_manifest(h_manifest);
            std::string csv = "task,level,chance,se,samples\n";
            for (Task t : kAllTasks)
                for (int level = 1; level <= 5; ++level) {
                    const auto entries = m.select(t, level);
                    if (entries.empty()) continue;
                    std::vector<Instance> group;
                    for (const auto* e : entries) group.push_back(m.load(*e));
                    const auto c = bench::chance(group, h_samples, h_seed);
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%s,%zu\n", to_string(t), level, c.p, c.se ? std::to_string(*c.se).c_str() : "", c.samples);
                    csv += buf;
                }
            if (h_out.empty()) std::cout << csv;
            else bench::write_text(h_out, csv);
        } else if (*run) {
            const auto m = bench::load_manifest(u_manifest);
            auto cfg = eval::load_config(u_config);
            if (!u_variant.empty()) cfg.variant = prompts::variant_from_string(u_variant);
            eval::RunFilter filter{parse_tasks(u_tasks), u_levels};
            const auto stats = eval::run(m, cfg, u_run_dir, filter);
            std::cout << json{{"queried", stats.done}, {"skipped", stats.skipped}, {"omitted", stats.omitted}}.dump() << "\n";
        } else if (*serve) {
            const auto m = bench::load_manifest(v_manifest);
            study::SessionConfig cfg;
            cfg.task = task_from_string(v_task);
            cfg.blocks = v_blocks;
            std::optional<fs::path> ui;
            if (!v_ui.empty()) ui = fs::path(v_ui);
            study::StudyServer server(study::create_session(m, v_participant, v_seed, cfg), ui);
            const int port = server.bind(v_host, v_port);
            std::cout << json{{"listening", v_host + ":" + std::to_string(port)}, {"trials", server.session().trials.size()}}.dump() << std::endl;
            server.serve();
        }
    } catch (const Error& e) {
        print_error(std::string(to_string(e.kind())), e.message());
        return 1;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
