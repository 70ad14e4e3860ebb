#pragma once
/**
 * @file commands.hpp
 * @brief The CLI subcommands as library functions.
 *
 * Each command reads its inputs, writes artifacts through an OutputDir and
 * returns a RunReport; the caller writes report.json and timing.json and
 * removes the artifacts if anything throws.
 */

#include "rdwctx/harness/config.hpp"
#include "rdwctx/harness/dataset.hpp"
#include "rdwctx/harness/experiments.hpp"
#include "rdwctx/harness/metrics.hpp"
#include "rdwctx/harness/report.hpp"
#include "rdwctx/lateral/evaluation.hpp"
#include "rdwctx/rotation/corpus.hpp"
#include "rdwctx/sim/trace_csv.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rdwctx::harness {

struct RunContext {
    json config; ///< resolved
    Seed seed{1};
    OutputDir* out{nullptr};
    std::string command;

    [[nodiscard]] RunReport report() const
    {
        RunReport r;
        r.command = command;
        r.config_hash = config_hash(config);
        r.seed = seed.value;
        return r;
    }
    fs::path file(RunReport& r, const std::string& rel) const
    {
        r.artifacts.push_back(rel);
        return out->file(rel);
    }
};

inline std::string fixed(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::vector<sim::SessionTrace> read_traces(const std::vector<std::string>& paths)
{
    if (paths.empty())
        throw ConfigError("at least one trace file is required");
    std::vector<sim::SessionTrace> out;
    for (const auto& p : paths)
        out.push_back(sim::read_trace_csv(p));
    return out;
}

inline std::vector<rotation::RotationSeries> read_rotations(const std::vector<std::string>& paths)
{
    if (paths.empty())
        throw ConfigError("at least one rotation file is required");
    std::vector<rotation::RotationSeries> out;
    for (const auto& p : paths)
        out.push_back(rotation::read_rotation_csv(p));
    return out;
}

// simulate

struct SimulateArgs {
    std::optional<int> users;
    std::optional<std::string> path;
    std::optional<double> duration;
};

inline RunReport cmd_simulate(const RunContext& ctx, const SimulateArgs& a)
{
    json sj = ctx.config.at("sim");
    if (a.users)
        sj["env"]["num_users"] = *a.users;
    if (a.path)
        sj["path"] = *a.path;
    if (a.duration)
        sj["duration"] = *a.duration;
    const auto cfg = config_guard([&] { return session_from_json(sj, ctx.seed); });
    const auto trace = sim::run_session(cfg);
    auto r = ctx.report();
    sim::write_trace_csv(ctx.file(r, "trace.csv").string(), trace);
    {
        std::ofstream os(ctx.file(r, "resets.csv"));
        os << "user,time,trigger,target_turn,physical_turn,virtual_turn\n";
        for (const auto& e : trace.resets)
            os << e.user_id << ',' << fixed(e.time, 3) << ',' << (e.trigger == sim::ResetTrigger::boundary ? "boundary" : "user")
               << ',' << fixed(e.target_turn) << ',' << fixed(e.physical_turn) << ',' << fixed(e.virtual_turn) << '\n';
    }
    r.metrics = {{"users", trace.num_users},
                 {"path", sim::to_string(cfg.path)},
                 {"duration_s", cfg.duration},
                 {"rate_hz", trace.rate},
                 {"samples_per_user", trace.length()},
                 {"resets", trace.resets.size()},
                 {"min_user_distance_m", trace.num_users > 1 ? json(trace.stats.min_user_distance) : json(nullptr)},
                 {"min_wall_distance_m", trace.stats.min_wall_distance},
                 {"saturated_forces", trace.stats.saturated_forces}};
    return r;
}

// train-lateral / eval-lateral

struct LateralArgs {
    std::vector<std::string> traces;
    std::optional<std::string> variant;
    std::string model; ///< eval only
};

inline std::vector<lateral::FeatureWindow> windows_of(const std::vector<sim::SessionTrace>& traces,
                                                      lateral::Variant v, const lateral::PredictorHyper& hp,
                                                      std::vector<std::string>& warnings)
{
    std::vector<lateral::FeatureWindow> all;
    for (std::size_t k = 0; k < traces.size(); ++k) {
        std::string warn;
        auto w = lateral::build_windows(traces[k], v, hp.lookback, hp.horizon, &warn);
        if (!warn.empty())
            warnings.push_back("trace " + std::to_string(k) + ": " + warn);
        // Users of different files are distinct walkers.
        for (auto& x : w)
            x.user += static_cast<int>(k) * 3;
        all.insert(all.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
    return all;
}

inline RunReport cmd_train_lateral(const RunContext& ctx, const LateralArgs& a)
{
    const auto hp = predictor_hyper(ctx.config);
    const auto variant = a.variant ? lateral::parse_variant(*a.variant) : lateral_variant(ctx.config);
    const auto traces = read_traces(a.traces);
    auto r = ctx.report();
    const auto windows = windows_of(traces, variant, hp, r.warnings);
    lateral::TrainingLog log;
    auto model = lateral::train_predictor(windows, hp, ctx.seed, &log, traces.front().rate);
    write_json_file(ctx.file(r, "model.json"), lateral::to_json(model));
    write_json_file(ctx.file(r, "training_log.json"),
                    {{"train_loss", log.train_loss}, {"val_se", log.val_se}, {"best_epoch", log.best_epoch}});
    r.metrics = {{"variant", lateral::to_string(variant)},
                 {"windows", windows.size()},
                 {"train_windows", log.train_windows},
                 {"val_windows", log.val_windows},
                 {"best_epoch", log.best_epoch},
                 {"best_val_se_m2", log.best_val_se},
                 {"early_stopped", log.early_stopped}};
    return r;
}

inline RunReport cmd_eval_lateral(const RunContext& ctx, const LateralArgs& a)
{
    const auto model = lateral::predictor_from_json(read_json_file(a.model));
    const auto traces = read_traces(a.traces);
    lateral::PredictorHyper hp;
    hp.lookback = model.lookback;
    hp.horizon = model.horizon;
    auto r = ctx.report();
    const auto windows = windows_of(traces, model.variant, hp, r.warnings);
    const auto& t0 = traces.front();
    const lateral::ScenarioInfo info{t0.num_users, "unknown", ""};
    const auto rep = lateral::eval_se(model, windows, info);
    write_json_file(ctx.file(r, "se_report.json"), lateral::to_json(rep));
    {
        std::ofstream os(ctx.file(r, "se_samples.csv"));
        lateral::write_se_csv(os, rep);
    }
    r.metrics = {{"variant", lateral::to_string(model.variant)},
                 {"mean_se_m2", rep.aggregate.mean},
                 {"median_se_m2", rep.aggregate.median},
                 {"windows", rep.aggregate.count}};
    return r;
}

// make-rotations

inline RunReport cmd_make_rotations(const RunContext& ctx)
{
    const auto p = corpus_params(ctx.config);
    const auto corpus = rotation::generate_corpus(p, ctx.seed);
    auto r = ctx.report();
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "session_%02zu.csv", k);
        rotation::write_rotation_csv(ctx.file(r, name).string(), rotation::wrapped(corpus[k]));
    }
    r.metrics = {{"sessions", corpus.size()}, {"rate_hz", p.rate}, {"samples_per_session", corpus.front().length()}};
    return r;
}

// train-timegan / generate

struct RotationArgs {
    std::vector<std::string> rotations;
    std::string model;
    std::optional<std::size_t> count;
};

inline json timegan_bundle(const TimeGanExperiment& ex, const rotation::TimeGanModel& m, int epoch)
{
    auto mj = const_cast<rotation::TimeGanModel&>(m).to_json();
    return {{"format", "rdwctx.timegan_bundle"},
            {"version", 1},
            {"epoch", epoch},
            {"source_windows", ex.source_windows},
            {"transformer", ex.transformer.to_json()},
            {"model", mj}};
}

inline RunReport cmd_train_timegan(const RunContext& ctx, const RotationArgs& a)
{
    const auto corpus = read_rotations(a.rotations);
    const auto pcfg = preprocess_config(ctx.config);
    const auto hyper = timegan_hyper(ctx.config);
    const auto sel = selection_config(ctx.config);
    const auto& rj = ctx.config.at("rotation");
    const auto ex = run_timegan_experiment(corpus, pcfg, hyper, rj.at("max_train_windows").get<std::size_t>(), sel,
                                           ctx.seed, bucket_width(ctx.config), kl_eps(ctx.config));
    auto r = ctx.report();
    r.warnings = ex.warnings;
    const auto& cps = ex.result.checkpoints;
    for (const auto& cp : cps) {
        char name[64];
        std::snprintf(name, sizeof name, "checkpoints/epoch_%04d.json", cp.epoch);
        write_json_file(ctx.file(r, name), timegan_bundle(ex, cp.model, cp.epoch));
    }
    const int sel_epoch = cps.empty() ? ex.result.model.epoch : cps[ex.selected].epoch;
    write_json_file(ctx.file(r, "model.json"), timegan_bundle(ex, ex.selected_model(), sel_epoch));
    {
        std::ofstream os(ctx.file(r, "selection.csv"));
        os << "epoch,val_yaw_kl,selected\n";
        for (std::size_t k = 0; k < cps.size(); ++k)
            os << cps[k].epoch << ',' << fixed(ex.checkpoint_val_kl[k], 9) << ',' << (k == ex.selected ? 1 : 0) << '\n';
    }
    const auto& lg = ex.result.log;
    write_json_file(ctx.file(r, "training_log.json"),
                    {{"initial_recon_mse", lg.initial_recon_mse},
                     {"recon_mse", lg.recon_mse},
                     {"supervised_mse", lg.supervised_mse},
                     {"g_loss", lg.g_loss},
                     {"e_loss", lg.e_loss},
                     {"d_loss", lg.d_loss},
                     {"d_accuracy", lg.d_accuracy}});
    r.metrics = {{"source_windows", ex.source_windows},
                 {"train_windows", ex.train_windows},
                 {"val_windows", ex.val_windows},
                 {"checkpoints", cps.size()},
                 {"selection_mode", sel.mode},
                 {"selected_epoch", sel_epoch},
                 {"checkpoint_val_yaw_kl", ex.checkpoint_val_kl}};
    return r;
}

struct LoadedBundle {
    rotation::TimeGanModel model;
    rotation::QuantileTransformer transformer;
    std::size_t source_windows{0};
    int epoch{0};
};

inline LoadedBundle load_bundle(const std::string& path)
{
    const auto j = read_json_file(path);
    if (j.value("format", "") != "rdwctx.timegan_bundle" || j.value("version", 0) != 1)
        throw ConfigError("'" + path + "' is not a TimeGAN model bundle");
    return config_guard([&] {
        LoadedBundle b;
        b.model = rotation::TimeGanModel::from_json(j.at("model"));
        b.transformer = rotation::QuantileTransformer::from_json(j.at("transformer"));
        b.source_windows = j.at("source_windows").get<std::size_t>();
        b.epoch = j.at("epoch").get<int>();
        return b;
    });
}

inline RunReport cmd_generate(const RunContext& ctx, const RotationArgs& a)
{
    const auto b = load_bundle(a.model);
    const auto mult = ctx.config.at("rotation").at("generate").at("multiplier").get<std::size_t>();
    const std::size_t n = a.count ? *a.count : mult * b.source_windows;
    if (n == 0)
        throw ConfigError("generate: count must be positive");
    const auto gen = generate_degrees(b.model, b.transformer, n, ctx.seed);
    const double rate = ctx.config.at("rotation").at("preprocess").at("window_rate").get<double>();
    auto r = ctx.report();
    write_windows_csv(ctx.file(r, "generated.csv").string(), gen, rate);
    r.metrics = {{"windows", gen.size()},
                 {"window_length", b.model.seq_len},
                 {"channels", b.model.features},
                 {"source_windows", b.source_windows},
                 {"multiplier", a.count ? json(nullptr) : json(mult)}};
    return r;
}

// fft-baseline

inline RunReport cmd_fft_baseline(const RunContext& ctx, const RotationArgs& a)
{
    const auto corpus = read_rotations(a.rotations);
    const auto& fj = ctx.config.at("rotation").at("fft");
    const auto length = fj.at("length").get<std::size_t>();
    const auto n_series = fj.at("series").get<int>();
    if (length < 2 || n_series < 1)
        throw ConfigError("fft: length must be >= 2 and series >= 1");
    const auto model = rotation::fft_baseline_fit(corpus);
    auto r = ctx.report();
    r.warnings = model.warnings;
    write_json_file(ctx.file(r, "psd_model.json"), model.to_json());
    for (int k = 0; k < n_series; ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "fft_%02d.csv", k);
        const auto s = rotation::fft_baseline_generate(model, length, derive_seed(ctx.seed, static_cast<std::uint64_t>(k)));
        rotation::write_rotation_csv(ctx.file(r, name).string(), s);
    }
    r.metrics = {{"series", n_series}, {"length", length}, {"rate_hz", model.rate}, {"sources", model.sources}};
    return r;
}

// eval-dist

struct DistArgs {
    std::vector<std::string> target, other;
};

inline json compare_samples(const ChannelSamples& target, const ChannelSamples& other, double width, double eps,
                            std::ostream* plot_csv)
{
    static const char* names[] = {"yaw", "pitch", "roll"};
    json kl = json::object();
    if (plot_csv)
        *plot_csv << "channel,center,target,other\n";
    for (std::size_t c = 0; c < target.size(); ++c) {
        if (target[c].empty() || other[c].empty())
            throw ConfigError(std::string("eval-dist: no ") + names[c] + " samples");
        const bool wrap = c == 0;
        const auto [p, q] = align(histogram_pdf(target[c], width, wrap), histogram_pdf(other[c], width, wrap));
        kl[names[c]] = kl_divergence(p, q, eps);
        if (plot_csv)
            for (std::size_t i = 0; i < p.size(); ++i)
                *plot_csv << names[c] << ',' << fixed(p.center(i), 1) << ',' << fixed(p.masses[i], 9) << ','
                          << fixed(q.masses[i], 9) << '\n';
    }
    return kl;
}

inline RunReport cmd_eval_dist(const RunContext& ctx, const DistArgs& a)
{
    if (a.target.empty() || a.other.empty())
        throw ConfigError("eval-dist: --target and --other are required");
    const auto t = read_angle_samples(a.target);
    const auto o = read_angle_samples(a.other);
    auto r = ctx.report();
    std::ofstream plot(ctx.file(r, "histograms.csv"));
    const auto kl = compare_samples(t, o, bucket_width(ctx.config), kl_eps(ctx.config), &plot);
    r.metrics = {{"kl_nats", kl}, {"target_samples", t[0].size()}, {"other_samples", o[0].size()},
                 {"bucket_width_deg", bucket_width(ctx.config)}};
    return r;
}

// beam-eval

struct BeamArgs {
    std::string predictions;
    std::string trace;
    std::optional<double> beamwidth;
    std::optional<int> horizon;
};

inline RunReport cmd_beam_eval(const RunContext& ctx, const BeamArgs& a)
{
    const auto& bj = ctx.config.at("beam");
    const double bw = a.beamwidth ? *a.beamwidth : bj.at("beamwidth").get<double>();
    const auto apv = bj.at("ap").get<std::vector<double>>();
    if (apv.size() != 2)
        throw ConfigError("beam.ap must be [x, y]");
    const Vec2 ap{apv[0], apv[1]};
    const int horizon = a.horizon ? *a.horizon : ctx.config.at("lateral").at("hyper").at("horizon").get<int>();
    const auto trace = sim::read_trace_csv(a.trace);

    std::ifstream in(a.predictions);
    if (!in)
        throw ConfigError("cannot open '" + a.predictions + "'");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != lateral::kSeCsvHeader)
        throw ConfigError("beam-eval: predictions need header '" + std::string(lateral::kSeCsvHeader) + "'");

    std::vector<double> mis;
    std::map<int, std::pair<std::size_t, std::size_t>> per_user; // covered, total
    std::size_t covered = 0, lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> v;
        while (std::getline(ss, f, ','))
            v.push_back(f);
        if (v.size() != 6)
            throw ConfigError("beam-eval: line " + std::to_string(lineno) + " needs 6 fields");
        const int user = std::stoi(v[0]);
        const auto idx = static_cast<std::size_t>(std::stoull(v[1])) + static_cast<std::size_t>(horizon);
        if (user < 0 || user >= trace.num_users || idx >= trace.length())
            throw ConfigError("beam-eval: line " + std::to_string(lineno) + " does not match the trace");
        const Vec2 pred{std::stod(v[2]), std::stod(v[3])};
        const auto c = beam_coverage(pred, trace.users[static_cast<std::size_t>(user)][idx].phys_pos, ap, bw);
        mis.push_back(c.misalignment);
        covered += c.covered ? 1 : 0;
        auto& pu = per_user[user];
        pu.first += c.covered ? 1 : 0;
        ++pu.second;
    }
    if (mis.empty())
        throw ConfigError("beam-eval: no predictions");
    auto r = ctx.report();
    json users = json::object();
    for (const auto& [u, p] : per_user)
        users[std::to_string(u)] = static_cast<double>(p.first) / static_cast<double>(p.second);
    const auto st = lateral::summarize(mis);
    r.metrics = {{"beamwidth_deg", bw},
                 {"ap", apv},
                 {"predictions", mis.size()},
                 {"coverage", static_cast<double>(covered) / static_cast<double>(mis.size())},
                 {"per_user_coverage", users},
                 {"misalignment_deg", lateral::to_json(st)}};
    return r;
}

// pipeline

struct PipelineResult {
    RunReport report;
    bool checks_passed{true};
};

/**
 * Seeded end-to-end run: scenario matrix of lateral experiments, the
 * rotation corpus, TimeGAN with checkpoint selection, FFT baseline and the
 * distribution comparison, plus beam coverage of the virtual predictor.
 * With @p check, the orderings the artifact claims are evaluated.
 */
inline PipelineResult cmd_pipeline(const RunContext& ctx, bool check)
{
    auto r = ctx.report();
    const auto& pj = ctx.config.at("pipeline");
    const auto hp = predictor_hyper(ctx.config);
    const auto base = config_guard([&] { return session_from_json(ctx.config.at("sim"), ctx.seed); });
    json lat = json::array();
    json checks = json::object();
    bool ok = true;

    const auto& bj = ctx.config.at("beam");
    const auto apv = bj.at("ap").get<std::vector<double>>();
    const double bw = bj.at("beamwidth").get<double>();

    std::uint64_t k = 0;
    for (const auto& path_name : pj.at("paths")) {
        for (const auto& uj : pj.at("users")) {
            const LateralScenario sc{uj.get<int>(), sim::parse_path_kind(path_name.get<std::string>())};
            const auto o = run_lateral_scenario(base, sc, hp, derive_seed(ctx.seed, 100 + k++));
            const std::string lbl = sc.label();
            sim::write_trace_csv(ctx.file(r, "traces/" + lbl + "_train.csv").string(), o.train_trace);
            sim::write_trace_csv(ctx.file(r, "traces/" + lbl + "_test.csv").string(), o.test_trace);
            write_json_file(ctx.file(r, "lateral/" + lbl + "_baseline_model.json"),
                            lateral::to_json(const_cast<lateral::PredictorModel&>(o.baseline_model)));
            write_json_file(ctx.file(r, "lateral/" + lbl + "_virtual_model.json"),
                            lateral::to_json(const_cast<lateral::PredictorModel&>(o.virtual_model)));
            write_json_file(ctx.file(r, "lateral/" + lbl + "_baseline_se.json"), lateral::to_json(o.baseline));
            write_json_file(ctx.file(r, "lateral/" + lbl + "_virtual_se.json"), lateral::to_json(o.virtual_context));
            {
                std::ofstream os(ctx.file(r, "lateral/" + lbl + "_virtual_samples.csv"));
                lateral::write_se_csv(os, o.virtual_context);
            }
            std::size_t cov = 0;
            for (const auto& s : o.virtual_context.samples) {
                const auto& truth = o.test_trace.users[static_cast<std::size_t>(s.user)][s.end_index + static_cast<std::size_t>(hp.horizon)];
                cov += beam_coverage(s.pred, truth.phys_pos, {apv[0], apv[1]}, bw).covered ? 1 : 0;
            }
            lat.push_back({{"scenario", lbl},
                           {"users", sc.users},
                           {"path", sim::to_string(sc.path)},
                           {"baseline_mean_se_m2", o.baseline.aggregate.mean},
                           {"virtual_mean_se_m2", o.virtual_context.aggregate.mean},
                           {"improvement", o.improvement()},
                           {"virtual_beam_coverage",
                            static_cast<double>(cov) / static_cast<double>(o.virtual_context.samples.size())}});
            const bool ordered = o.virtual_context.aggregate.mean <= o.baseline.aggregate.mean;
            checks["virtual_le_baseline_" + lbl] = ordered;
            ok = ok && ordered;
        }
    }

    // Rotation generation.
    const auto cp = corpus_params(ctx.config);
    const auto corpus = rotation::generate_corpus(cp, derive_seed(ctx.seed, 200));
    for (std::size_t s = 0; s < corpus.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "rotations/session_%02zu.csv", s);
        rotation::write_rotation_csv(ctx.file(r, name).string(), rotation::wrapped(corpus[s]));
    }
    const auto pcfg = preprocess_config(ctx.config);
    const auto& rj = ctx.config.at("rotation");
    const auto ex = run_timegan_experiment(corpus, pcfg, timegan_hyper(ctx.config),
                                           rj.at("max_train_windows").get<std::size_t>(), selection_config(ctx.config),
                                           derive_seed(ctx.seed, 201), bucket_width(ctx.config), kl_eps(ctx.config));
    for (const auto& w : ex.warnings)
        r.warnings.push_back(w);
    const int sel_epoch = ex.result.checkpoints.empty() ? ex.result.model.epoch : ex.result.checkpoints[ex.selected].epoch;
    write_json_file(ctx.file(r, "timegan/model.json"), timegan_bundle(ex, ex.selected_model(), sel_epoch));
    const auto mult = rj.at("generate").at("multiplier").get<std::size_t>();
    const auto gen = generate_degrees(ex.selected_model(), ex.transformer, mult * ex.source_windows,
                                      derive_seed(ctx.seed, 202));
    const auto psd = rotation::fft_baseline_fit(corpus);
    for (const auto& w : psd.warnings)
        r.warnings.push_back(w);
    const auto fw = fft_windows(psd, rj.at("fft").at("series").get<int>(), rj.at("fft").at("length").get<std::size_t>(),
                                pcfg, derive_seed(ctx.seed, 203));
    const double rate = pcfg.window_rate;
    write_windows_csv(ctx.file(r, "rotations/target_windows.csv").string(), ex.target_windows, rate);
    write_windows_csv(ctx.file(r, "rotations/timegan_windows.csv").string(), gen, rate);
    write_windows_csv(ctx.file(r, "rotations/fft_windows.csv").string(), fw, rate);
    const double width = bucket_width(ctx.config), eps = kl_eps(ctx.config);
    const auto kl_gan = channel_kl_json(ex.target_windows, gen, width, eps);
    const auto kl_fft = channel_kl_json(ex.target_windows, fw, width, eps);
    {
        std::ofstream os(ctx.file(r, "rotations/yaw_histograms.csv"));
        const auto [t1, g1] = align(histogram_pdf(channel_samples(ex.target_windows), width, true),
                                    histogram_pdf(channel_samples(gen), width, true));
        const auto [t2, f2] = align(t1, histogram_pdf(channel_samples(fw), width, true));
        const auto g2 = align(g1, f2).first;
        os << "center,target,timegan,fft\n";
        for (std::size_t i = 0; i < t2.size(); ++i)
            os << fixed(t2.center(i), 1) << ',' << fixed(t2.masses[i], 9) << ',' << fixed(g2.masses[i], 9) << ','
               << fixed(f2.masses[i], 9) << '\n';
    }
    const double gk = kl_gan.at("yaw").get<double>(), fk = kl_fft.at("yaw").get<double>();
    checks["timegan_yaw_kl_below_fft"] = gk < fk;
    ok = ok && gk < fk;

    r.metrics = {{"lateral", lat},
                 {"rotation",
                  {{"source_windows", ex.source_windows},
                   {"train_windows", ex.train_windows},
                   {"generated_windows", gen.size()},
                   {"fft_windows", fw.size()},
                   {"selected_epoch", sel_epoch},
                   {"checkpoint_val_yaw_kl", ex.checkpoint_val_kl},
                   {"kl_timegan_nats", kl_gan},
                   {"kl_fft_nats", kl_fft}}}};
    if (check)
        r.metrics["checks"] = checks;
    return {r, ok};
}

} // namespace rdwctx::harness
