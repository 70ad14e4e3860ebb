// rdwctx: command-line front end. Exit codes: 0 ok, 2 config error, 3 runtime failure, 4 pipeline check failed.

#include "rdwctx/harness/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>

using namespace rdwctx;
using namespace rdwctx::harness;

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed{1};
    std::string out{"out"};
    bool quick{false};
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config_path, "JSON config patch applied on top of the defaults");
    sub->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_flag("--quick", c.quick, "apply the small smoke-test preset before the config patch");
}

int run(const std::string& name, const Common& c, const std::function<int(const RunContext&, RunReport&)>& body)
{
    std::unique_ptr<OutputDir> out;
    try {
        const auto user = c.config_path.empty() ? json::object() : load_config_file(c.config_path);
        const auto cfg = resolve_config(user, c.quick);
        out = std::make_unique<OutputDir>(c.out);
        RunContext ctx{cfg, Seed{c.seed}, out.get(), name};
        const auto t0 = std::chrono::steady_clock::now();
        RunReport report;
        const int code = body(ctx, report);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_json_file(out->file("config.json"), cfg);
        report.artifacts.push_back("config.json");
        write_json_file(out->file("report.json"), report.to_json());
        write_json_file(out->file("timing.json"), {{"command", name}, {"wall_clock_s", wall}});
        for (const auto& w : report.warnings)
            std::cerr << "warning: " << w << '\n';
        std::cout << report.to_json().at("metrics").dump(2) << '\n';
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        if (out)
            out->remove_all();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (out)
            out->remove_all();
        return 3;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rdwctx: redirected-walking context experiments"};
    app.require_subcommand(1);

    Common c;
    std::function<int()> action;

    auto* sim = app.add_subcommand("simulate", "run a seeded redirected-walking session and write its trace");
    add_common(sim, c);
    SimulateArgs sim_a;
    sim->add_option("--users", sim_a.users, "walkers in the room (1-3)");
    sim->add_option("--path", sim_a.path, "virtual path kind: straight | random");
    sim->add_option("--duration", sim_a.duration, "seconds");
    sim->callback([&] { action = [&] { return run("simulate", c, [&](auto& ctx, auto& r) { r = cmd_simulate(ctx, sim_a); return 0; }); }; });

    LateralArgs lat_a;
    auto* tl = app.add_subcommand("train-lateral", "train a lateral position predictor on trace CSVs");
    add_common(tl, c);
    tl->add_option("--traces", lat_a.traces, "trace CSV files")->required();
    tl->add_option("--variant", lat_a.variant, "baseline | virtual");
    tl->callback([&] { action = [&] { return run("train-lateral", c, [&](auto& ctx, auto& r) { r = cmd_train_lateral(ctx, lat_a); return 0; }); }; });

    auto* el = app.add_subcommand("eval-lateral", "squared-error report of a trained predictor");
    add_common(el, c);
    el->add_option("--model", lat_a.model, "model.json from train-lateral")->required();
    el->add_option("--traces", lat_a.traces, "trace CSV files")->required();
    el->callback([&] { action = [&] { return run("eval-lateral", c, [&](auto& ctx, auto& r) { r = cmd_eval_lateral(ctx, lat_a); return 0; }); }; });

    auto* mr = app.add_subcommand("make-rotations", "write the synthetic head-rotation corpus");
    add_common(mr, c);
    mr->callback([&] { action = [&] { return run("make-rotations", c, [&](auto& ctx, auto& r) { r = cmd_make_rotations(ctx); return 0; }); }; });

    RotationArgs rot_a;
    auto* tg = app.add_subcommand("train-timegan", "train TimeGAN on rotation CSVs and select a checkpoint");
    add_common(tg, c);
    tg->add_option("--rotations", rot_a.rotations, "rotation CSV files")->required();
    tg->callback([&] { action = [&] { return run("train-timegan", c, [&](auto& ctx, auto& r) { r = cmd_train_timegan(ctx, rot_a); return 0; }); }; });

    auto* gen = app.add_subcommand("generate", "sample windows from a trained TimeGAN bundle");
    add_common(gen, c);
    gen->add_option("--model", rot_a.model, "model.json from train-timegan")->required();
    gen->add_option("--count", rot_a.count, "windows to generate (default: multiplier x source windows)");
    gen->callback([&] { action = [&] { return run("generate", c, [&](auto& ctx, auto& r) { r = cmd_generate(ctx, rot_a); return 0; }); }; });

    auto* fft = app.add_subcommand("fft-baseline", "fit the PSD baseline and write resynthesized series");
    add_common(fft, c);
    fft->add_option("--rotations", rot_a.rotations, "rotation CSV files")->required();
    fft->callback([&] { action = [&] { return run("fft-baseline", c, [&](auto& ctx, auto& r) { r = cmd_fft_baseline(ctx, rot_a); return 0; }); }; });

    DistArgs dist_a;
    auto* ed = app.add_subcommand("eval-dist", "histograms and KL divergence of two rotation corpora");
    add_common(ed, c);
    ed->add_option("--target", dist_a.target, "target rotation or window CSVs")->required();
    ed->add_option("--other", dist_a.other, "compared rotation or window CSVs")->required();
    ed->callback([&] { action = [&] { return run("eval-dist", c, [&](auto& ctx, auto& r) { r = cmd_eval_dist(ctx, dist_a); return 0; }); }; });

    BeamArgs beam_a;
    auto* be = app.add_subcommand("beam-eval", "beam coverage of predicted positions");
    add_common(be, c);
    be->add_option("--predictions", beam_a.predictions, "se_samples.csv from eval-lateral")->required();
    be->add_option("--trace", beam_a.trace, "the trace the predictions were made on")->required();
    be->add_option("--beamwidth", beam_a.beamwidth, "degrees");
    be->add_option("--horizon", beam_a.horizon, "prediction horizon in samples");
    be->callback([&] { action = [&] { return run("beam-eval", c, [&](auto& ctx, auto& r) { r = cmd_beam_eval(ctx, beam_a); return 0; }); }; });

    bool check = false;
    auto* pl = app.add_subcommand("pipeline", "seeded end-to-end run writing every artifact and report");
    add_common(pl, c);
    pl->add_flag("--check", check, "exit 4 unless the expected orderings hold");
    pl->callback([&] {
        action = [&] {
            return run("pipeline", c, [&](auto& ctx, auto& r) {
                auto res = cmd_pipeline(ctx, check);
                r = std::move(res.report);
                return check && !res.checks_passed ? 4 : 0;
            });
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return action ? action() : 2;
}
