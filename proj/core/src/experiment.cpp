#include "ipmc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "ipmc/csv_io.hpp"
#include "ipmc/error.hpp"

namespace ipmc {

std::uint64_t derive_seed(std::uint64_t global, std::string_view name) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const char c : name) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    std::uint64_t z = global ^ hash;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    for (auto kind : {StimulusKind::Prbs, StimulusKind::Sine, StimulusKind::Chirp, StimulusKind::Pulse}) {
        StimulusSpec s = StimulusSpec::defaults(kind);
        s.seed = 0; // derived from the global seed
        c.stimuli.push_back(s);
    }
    c.plant = PlantSpec{};
    c.circuit.params = c.plant->reference;
    return c;
}

std::vector<std::string> ExperimentConfig::source_names() const {
    std::vector<std::string> names;
    if (plant) {
        for (const auto& s : stimuli) names.push_back(s.display_name());
    } else {
        for (const auto& r : recordings) names.push_back(r.name);
    }
    if (!only.empty()) {
        std::erase_if(names, [this](const std::string& n) { return std::find(only.begin(), only.end(), n) == only.end(); });
    }
    return names;
}

void ExperimentConfig::validate() const {
    if (plant) {
        plant->validate();
        if (stimuli.empty()) throw_domain("experiment needs at least one stimulus");
        for (StimulusSpec s : stimuli) {
            if (s.seed == 0) s.seed = 1; // placeholder for a derived seed
            s.validate();
        }
    } else if (recordings.empty()) {
        throw_domain("experiment needs a plant or at least one recording");
    }
    const auto names = source_names();
    if (names.empty()) throw_domain("the stimulus filter leaves nothing to run");
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t k = i + 1; k < names.size(); ++k) {
            if (names[i] == names[k]) throw_domain("duplicate stimulus name '" + names[i] + "'");
        }
    }
    circuit.params.validate();
    if (circuit.stages < 1) throw_domain("circuit needs at least one stage");
    if (circuit.oversample < 1) throw_domain("circuit oversample must be positive");
    if (circuit.estimate && circuit.estimation_restarts < 1) throw_domain("estimation needs at least one restart");
    window.validate();
    net.lm.validate();
    for (auto h : net.hidden) {
        if (h == 0) throw_domain("hidden layer widths must be positive");
    }
    split.validate();
    if (parallel < 1) throw_domain("parallel must be at least 1");
}

void to_json(Json& j, const ExperimentConfig& c) {
    Json bounds = Json::object();
    for (std::size_t i = 0; i < kFreeParamCount; ++i) {
        bounds[std::string(to_string(static_cast<FreeParam>(i)))] = {c.circuit.bounds[i].lower, c.circuit.bounds[i].upper};
    }
    Json stimuli = Json::array();
    for (const auto& s : c.stimuli) {
        Json sj = s;
        if (s.kind == StimulusKind::Prbs && s.seed == 0) sj.erase("seed");
        stimuli.push_back(sj);
    }
    Json recordings = Json::array();
    for (const auto& r : c.recordings) recordings.push_back({{"name", r.name}, {"path", r.path.string()}});

    j = Json{{"seed", c.seed},
             {"out_dir", c.out_dir.string()},
             {"parallel", c.parallel},
             {"pooled", c.pooled},
             {"only", c.only},
             {"source", c.plant ? "plant" : "recordings"},
             {"stimuli", stimuli},
             {"recordings", recordings},
             {"circuit",
              {{"params", c.circuit.params},
               {"stages", c.circuit.stages},
               {"oversample", c.circuit.oversample},
               {"estimate", c.circuit.estimate},
               {"estimation_restarts", c.circuit.estimation_restarts},
               {"estimate_from", c.circuit.estimate_from},
               {"bounds", bounds}}},
             {"window", c.window},
             {"net",
              {{"hidden", c.net.hidden},
               {"activation", std::string(to_string(c.net.activation))},
               {"lm", c.net.lm}}},
             {"split", c.split}};
    if (c.plant) j["plant"] = *c.plant;
}

void from_json(const Json& j, ExperimentConfig& c) {
    detail::reject_unknown_keys(j,
                                {"seed", "out_dir", "parallel", "pooled", "only", "source", "stimuli", "recordings",
                                 "plant", "circuit", "window", "net", "split"},
                                "experiment config");
    c = ExperimentConfig::defaults();
    detail::read_optional(j, "seed", c.seed);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    detail::read_optional(j, "parallel", c.parallel);
    detail::read_optional(j, "pooled", c.pooled);
    detail::read_optional(j, "only", c.only);

    std::string source = j.contains("recordings") && !j.at("recordings").empty() ? "recordings" : "plant";
    detail::read_optional(j, "source", source);
    if (source == "plant") {
        if (j.contains("plant")) c.plant = j.at("plant").get<PlantSpec>();
        c.circuit.params = c.plant->reference; // known truth unless overridden or estimated
    } else if (source == "recordings") {
        c.plant.reset();
        c.stimuli.clear();
    } else {
        throw_domain("source must be 'plant' or 'recordings'");
    }

    if (j.contains("stimuli")) {
        c.stimuli.clear();
        for (const auto& sj : j.at("stimuli")) {
            Json copy = sj;
            const bool derived_seed = !copy.contains("seed");
            if (derived_seed) copy["seed"] = 1;
            auto s = copy.get<StimulusSpec>();
            if (derived_seed) s.seed = 0;
            c.stimuli.push_back(s);
        }
    }
    if (j.contains("recordings")) {
        for (const auto& rj : j.at("recordings")) {
            detail::reject_unknown_keys(rj, {"name", "path"}, "recording");
            c.recordings.push_back({rj.at("name").get<std::string>(), rj.at("path").get<std::string>()});
        }
    }
    if (j.contains("circuit")) {
        const auto& cj = j.at("circuit");
        detail::reject_unknown_keys(cj,
                                    {"params", "stages", "oversample", "estimate", "estimation_restarts",
                                     "estimate_from", "bounds"},
                                    "circuit");
        detail::read_optional(cj, "params", c.circuit.params);
        detail::read_optional(cj, "stages", c.circuit.stages);
        detail::read_optional(cj, "oversample", c.circuit.oversample);
        detail::read_optional(cj, "estimate", c.circuit.estimate);
        detail::read_optional(cj, "estimation_restarts", c.circuit.estimation_restarts);
        detail::read_optional(cj, "estimate_from", c.circuit.estimate_from);
        if (cj.contains("bounds")) {
            const auto& bj = cj.at("bounds");
            for (const auto& [key, value] : bj.items()) {
                bool matched = false;
                for (std::size_t i = 0; i < kFreeParamCount; ++i) {
                    if (key == to_string(static_cast<FreeParam>(i))) {
                        const auto pair = value.get<std::array<double, 2>>();
                        c.circuit.bounds[i] = {pair[0], pair[1]};
                        matched = true;
                    }
                }
                if (!matched) throw_domain("unknown bounds entry '" + key + "'");
            }
        }
    }
    detail::read_optional(j, "window", c.window);
    if (j.contains("net")) {
        const auto& nj = j.at("net");
        detail::reject_unknown_keys(nj, {"hidden", "activation", "lm"}, "net");
        detail::read_optional(nj, "hidden", c.net.hidden);
        if (nj.contains("activation")) c.net.activation = activation_from_string(nj.at("activation").get<std::string>());
        detail::read_optional(nj, "lm", c.net.lm);
    }
    detail::read_optional(j, "split", c.split);
    c.validate();
}

StimulusSpec resolved_stimulus(const ExperimentConfig& cfg, StimulusSpec spec) {
    if (spec.kind == StimulusKind::Prbs && spec.seed == 0) {
        const std::uint64_t states = (std::uint64_t{1} << spec.lfsr_order) - 1;
        spec.seed = derive_seed(cfg.seed, "stimulus/" + spec.display_name()) % states + 1;
    }
    return spec;
}

PlantSpec plant_for(const ExperimentConfig& cfg, const std::string& name) {
    if (!cfg.plant) throw_domain("the config has no plant section");
    PlantSpec plant = *cfg.plant;
    plant.seed = derive_seed(cfg.seed, "noise/" + name + "/" + std::to_string(cfg.plant->seed));
    return plant;
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct SourceData {
    std::string name;
    std::optional<Signal> v_i;
    std::optional<Signal> w;
    std::string error;
    int error_exit_code = 0;
};

void record_failure(std::string& error, int& code, const std::exception& e) {
    error = e.what();
    if (const auto* ipmc_error = dynamic_cast<const Error*>(&e)) {
        code = exit_code_for(ipmc_error->kind());
    } else {
        code = 4;
    }
}

std::vector<SourceData> obtain_sources(const ExperimentConfig& cfg, ExperimentReport& report) {
    const auto names = cfg.source_names();
    std::vector<SourceData> out;
    for (const auto& name : names) {
        SourceData d;
        d.name = name;
        try {
            if (cfg.plant) {
                const auto it = std::find_if(cfg.stimuli.begin(), cfg.stimuli.end(),
                                             [&](const StimulusSpec& s) { return s.display_name() == name; });
                const StimulusSpec spec = resolved_stimulus(cfg, *it);
                if (spec.kind == StimulusKind::Prbs) report.seeds.emplace_back("stimulus/" + name, spec.seed);
                const PlantSpec plant = plant_for(cfg, name);
                report.seeds.emplace_back("noise/" + name, plant.seed);
                const Signal v = generate_stimulus(spec).with_label("v_in");
                d.w = plant_response(plant, v);
                d.v_i = v;
            } else {
                const auto it = std::find_if(cfg.recordings.begin(), cfg.recordings.end(),
                                             [&](const RecordingSource& r) { return r.name == name; });
                Recording rec = ingest_recording(it->path);
                d.v_i = rec.v_in;
                d.w = rec.displacement;
            }
        } catch (const std::exception& e) {
            record_failure(d.error, d.error_exit_code, e);
        }
        out.push_back(std::move(d));
    }
    return out;
}

struct PreparedData {
    WindowedDataset hybrid;
    WindowedDataset normal;
    AuditResult hybrid_audit;
    AuditResult normal_audit;
};

PreparedData prepare(const ExperimentConfig& cfg, const CascadeModel& cascade, const SourceData& src,
                     std::uint64_t split_seed) {
    const Signal v_o = simulate_cascade(cascade, *src.v_i, cfg.circuit.oversample).with_label("v_o");
    PreparedData p;
    p.hybrid = split_dataset(frame_windows(v_o, *src.w, cfg.window), cfg.split, split_seed);
    p.normal = with_split_of(frame_windows(*src.v_i, *src.w, cfg.window), p.hybrid);
    p.hybrid_audit = audit_non_autoregressive(p.hybrid, v_o, *src.w);
    p.normal_audit = audit_non_autoregressive(p.normal, *src.v_i, *src.w);
    return p;
}

std::vector<std::size_t> layer_sizes(const ExperimentConfig& cfg) {
    std::vector<std::size_t> sizes{cfg.window.tau};
    sizes.insert(sizes.end(), cfg.net.hidden.begin(), cfg.net.hidden.end());
    sizes.push_back(1);
    return sizes;
}

TrainResult train_path(const ExperimentConfig& cfg, const WindowedDataset& d, std::uint64_t init_seed) {
    MlpModel model = init_model(layer_sizes(cfg), cfg.net.activation, init_seed);
    fit_normalization(model, d);
    return train_lm(model, d, cfg.net.lm);
}

EvalReport test_metrics(const WindowedDataset& d, const std::vector<double>& predictions) {
    std::vector<double> w;
    std::vector<double> w_hat;
    for (std::size_t i : d.rows_in(Split::Test)) {
        w.push_back(d.targets(static_cast<Eigen::Index>(i)));
        w_hat.push_back(predictions[i]);
    }
    return evaluate(w, w_hat);
}

std::vector<double> predict_rows(const MlpModel& m, const WindowedDataset& d) {
    const Eigen::VectorXd y = forward_batch(m, d.inputs);
    return {y.data(), y.data() + y.size()};
}

void fill_outcome(StimulusOutcome& o, const PreparedData& p, TrainResult hybrid, TrainResult normal) {
    const auto& d = p.hybrid;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        o.time.push_back(d.target_time(i));
        o.target.push_back(d.targets(static_cast<Eigen::Index>(i)));
    }
    o.split = d.split;

    o.hybrid.predictions = predict_rows(hybrid.model, p.hybrid);
    o.normal.predictions = predict_rows(normal.model, p.normal);
    o.hybrid.test_metrics = test_metrics(p.hybrid, o.hybrid.predictions);
    o.normal.test_metrics = test_metrics(p.normal, o.normal.predictions);
    o.hybrid.training = std::move(hybrid.report);
    o.normal.training = std::move(normal.report);
    o.hybrid.model = std::move(hybrid.model);
    o.normal.model = std::move(normal.model);
    o.hybrid.audit = p.hybrid_audit;
    o.normal.audit = p.normal_audit;
    o.ok = true;
}

template <typename Fn>
void for_each_parallel(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport report;
    report.pooled = cfg.pooled;

    const std::vector<SourceData> sources = obtain_sources(cfg, report);

    PhysicalParams params = cfg.circuit.params;
    if (cfg.circuit.estimate) {
        const std::string from = cfg.circuit.estimate_from.empty() ? sources.front().name : cfg.circuit.estimate_from;
        const auto it = std::find_if(sources.begin(), sources.end(), [&](const SourceData& s) { return s.name == from; });
        if (it == sources.end()) throw_domain("estimate_from names an unknown stimulus '" + from + "'");
        if (!it->v_i) throw_data("cannot estimate from '" + from + "': " + it->error);
        EstimationProblem problem(*it->v_i, *it->w);
        problem.stages = cfg.circuit.stages;
        problem.fixed = cfg.circuit.params;
        problem.bounds = cfg.circuit.bounds;
        problem.oversample = cfg.circuit.oversample;
        const std::uint64_t seed = derive_seed(cfg.seed, "estimation");
        report.seeds.emplace_back("estimation", seed);
        report.estimation = estimate_params(problem, cfg.circuit.estimation_restarts, seed, cfg.parallel);
        params = report.estimation->params;
    }
    report.circuit_params = params;
    const CascadeModel cascade = build_cascade(params, cfg.circuit.stages);

    report.outcomes.resize(sources.size());
    std::vector<std::optional<PreparedData>> prepared(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& src = sources[i];
        report.outcomes[i].name = src.name;
        report.seeds.emplace_back("split/" + src.name, derive_seed(cfg.seed, "split/" + src.name));
        if (!cfg.pooled) report.seeds.emplace_back("init/" + src.name, derive_seed(cfg.seed, "init/" + src.name));
        if (!src.v_i) {
            report.outcomes[i].error = src.error;
            report.outcomes[i].error_exit_code = src.error_exit_code;
        }
    }

    if (!cfg.pooled) {
        for_each_parallel(sources.size(), cfg.parallel, [&](std::size_t i) {
            const auto& src = sources[i];
            auto& out = report.outcomes[i];
            if (!src.v_i) return;
            try {
                const PreparedData p = prepare(cfg, cascade, src, derive_seed(cfg.seed, "split/" + src.name));
                const std::uint64_t init_seed = derive_seed(cfg.seed, "init/" + src.name);
                TrainResult hybrid = train_path(cfg, p.hybrid, init_seed);
                TrainResult normal = train_path(cfg, p.normal, init_seed);
                fill_outcome(out, p, std::move(hybrid), std::move(normal));
            } catch (const std::exception& e) {
                out = StimulusOutcome{};
                out.name = src.name;
                record_failure(out.error, out.error_exit_code, e);
            }
        });
        return report;
    }

    for_each_parallel(sources.size(), cfg.parallel, [&](std::size_t i) {
        const auto& src = sources[i];
        if (!src.v_i) return;
        try {
            prepared[i] = prepare(cfg, cascade, src, derive_seed(cfg.seed, "split/" + src.name));
        } catch (const std::exception& e) {
            record_failure(report.outcomes[i].error, report.outcomes[i].error_exit_code, e);
        }
    });
    std::vector<WindowedDataset> hybrid_parts;
    std::vector<WindowedDataset> normal_parts;
    for (const auto& p : prepared) {
        if (!p) continue;
        hybrid_parts.push_back(p->hybrid);
        normal_parts.push_back(p->normal);
    }
    if (hybrid_parts.empty()) return report;

    const std::uint64_t init_seed = derive_seed(cfg.seed, "init/pooled");
    report.seeds.emplace_back("init/pooled", init_seed);
    TrainResult hybrid;
    TrainResult normal;
    std::thread hybrid_worker;
    if (cfg.parallel > 1) {
        hybrid_worker = std::thread([&] { hybrid = train_path(cfg, concatenate(hybrid_parts), init_seed); });
    } else {
        hybrid = train_path(cfg, concatenate(hybrid_parts), init_seed);
    }
    normal = train_path(cfg, concatenate(normal_parts), init_seed);
    if (hybrid_worker.joinable()) hybrid_worker.join();

    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!prepared[i]) continue;
        try {
            fill_outcome(report.outcomes[i], *prepared[i], hybrid, normal);
        } catch (const std::exception& e) {
            record_failure(report.outcomes[i].error, report.outcomes[i].error_exit_code, e);
        }
    }
    return report;
}

std::vector<SummaryRow> ExperimentReport::summary() const {
    std::vector<SummaryRow> rows;
    for (const auto& o : outcomes) {
        rows.push_back({o.name, o.ok, o.error, o.hybrid.test_metrics, o.normal.test_metrics});
    }
    return rows;
}

bool ExperimentReport::all_audits_passed() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const StimulusOutcome& o) {
        return !o.ok || (o.hybrid.audit.passed && o.normal.audit.passed);
    });
}

SummaryAverage summarize(const std::vector<SummaryRow>& rows) {
    SummaryAverage a;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        a.nmse_hybrid += r.hybrid.nmse;
        a.nmse_normal += r.normal.nmse;
        a.fitting_hybrid += r.hybrid.fitting_percent;
        a.fitting_normal += r.normal.fitting_percent;
        ++a.count;
    }
    if (a.count > 0) {
        const auto n = static_cast<double>(a.count);
        a.nmse_hybrid /= n;
        a.nmse_normal /= n;
        a.fitting_hybrid /= n;
        a.fitting_normal /= n;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Rendering and output files

namespace {

std::string sci4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

std::string percent2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%%%.2f", v);
    return buf;
}

std::string padded(const std::string& s, std::size_t width, bool left) {
    if (s.size() >= width) return s;
    const std::string pad(width - s.size(), ' ');
    return left ? s + pad : pad + s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open '" + path.string() + "' for writing");
    out << text;
}

Json audit_json(const AuditResult& a) { return Json{{"passed", a.passed}, {"message", a.message}}; }

Json training_summary(const TrainingReport& r) {
    return Json{{"stop_reason", to_string(r.stop_reason)},
                {"accepted_steps", r.accepted_steps},
                {"best_epoch", r.best_epoch},
                {"best_validation_sse", r.best_validation_sse}};
}

} // namespace

RenderedReport report_render(const std::vector<SummaryRow>& rows) {
    constexpr std::size_t name_width = 12;
    constexpr std::size_t col = 14;
    std::ostringstream text;
    std::ostringstream csv;
    text << padded("Stimulus", name_width, true) << padded("NMSE (H)", col, false) << padded("NMSE (N)", col, false)
         << padded("Fitting (H)", col, false) << padded("Fitting (N)", col, false) << '\n';
    csv << "stimulus,nmse_hybrid,nmse_normal,fitting_hybrid,fitting_normal,status\n";

    for (const auto& r : rows) {
        text << padded(r.name, name_width, true);
        if (r.ok) {
            text << padded(sci4(r.hybrid.nmse), col, false) << padded(sci4(r.normal.nmse), col, false)
                 << padded(percent2(r.hybrid.fitting_percent), col, false)
                 << padded(percent2(r.normal.fitting_percent), col, false) << '\n';
            csv << r.name << ',' << format_exact(r.hybrid.nmse) << ',' << format_exact(r.normal.nmse) << ','
                << format_exact(r.hybrid.fitting_percent) << ',' << format_exact(r.normal.fitting_percent) << ",ok\n";
        } else {
            text << "  failed: " << r.error << '\n';
            csv << r.name << ",,,,,failed\n";
        }
    }

    const SummaryAverage avg = summarize(rows);
    if (avg.count > 0) {
        text << padded("Average", name_width, true) << padded(sci4(avg.nmse_hybrid), col, false)
             << padded(sci4(avg.nmse_normal), col, false) << padded(percent2(avg.fitting_hybrid), col, false)
             << padded(percent2(avg.fitting_normal), col, false) << '\n';
        csv << "Average," << format_exact(avg.nmse_hybrid) << ',' << format_exact(avg.nmse_normal) << ','
            << format_exact(avg.fitting_hybrid) << ',' << format_exact(avg.fitting_normal) << ",ok\n";
    }
    return {text.str(), csv.str()};
}

void write_experiment_outputs(const ExperimentReport& report, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto rows = report.summary();
    const RenderedReport rendered = report_render(rows);
    write_text(out_dir / "summary.txt", rendered.text);
    write_text(out_dir / "summary.csv", rendered.csv);

    Json stimuli = Json::array();
    for (const auto& o : report.outcomes) {
        Json sj{{"name", o.name}, {"ok", o.ok}};
        if (!o.ok) {
            sj["error"] = o.error;
            sj["exit_code"] = o.error_exit_code;
        } else {
            sj["hybrid"] = {{"test", o.hybrid.test_metrics},
                            {"training", training_summary(o.hybrid.training)},
                            {"audit", audit_json(o.hybrid.audit)}};
            sj["normal"] = {{"test", o.normal.test_metrics},
                            {"training", training_summary(o.normal.training)},
                            {"audit", audit_json(o.normal.audit)}};
        }
        stimuli.push_back(sj);
    }
    const SummaryAverage avg = summarize(rows);
    Json seeds = Json::object();
    for (const auto& [name, seed] : report.seeds) seeds[name] = seed;

    Json j{{"config", cfg},
           {"pooled", report.pooled},
           {"seeds", seeds},
           {"circuit_params", report.circuit_params},
           {"stimuli", stimuli},
           {"average",
            {{"nmse_hybrid", avg.nmse_hybrid},
             {"nmse_normal", avg.nmse_normal},
             {"fitting_hybrid", avg.fitting_hybrid},
             {"fitting_normal", avg.fitting_normal},
             {"count", avg.count}}},
           {"audits_passed", report.all_audits_passed()}};
    if (report.estimation) j["estimation"] = *report.estimation;
    save_json_file(out_dir / "report.json", j);

    bool pooled_models_written = false;
    for (const auto& o : report.outcomes) {
        if (!o.ok) continue;
        std::ostringstream series;
        series << "time_s,target,hybrid,normal\n";
        std::ostringstream tags;
        tags << "time_s,split\n";
        for (std::size_t i = 0; i < o.time.size(); ++i) {
            series << format_exact(o.time[i]) << ',' << format_exact(o.target[i]) << ','
                   << format_exact(o.hybrid.predictions[i]) << ',' << format_exact(o.normal.predictions[i]) << '\n';
            tags << format_exact(o.time[i]) << ',' << to_string(o.split[i]) << '\n';
        }
        write_text(out_dir / (o.name + "_target_hybrid_normal.csv"), series.str());
        write_text(out_dir / (o.name + "_split_tags.csv"), tags.str());

        if (report.pooled) {
            if (pooled_models_written) continue;
            pooled_models_written = true;
        }
        const std::string stem = report.pooled ? "pooled" : o.name;
        save_json_file(out_dir / "models" / (stem + "_hybrid.json"), Json(o.hybrid.model));
        save_json_file(out_dir / "models" / (stem + "_normal.json"), Json(o.normal.model));
        save_json_file(out_dir / "training" / (stem + "_hybrid.json"), Json(o.hybrid.training));
        save_json_file(out_dir / "training" / (stem + "_normal.json"), Json(o.normal.training));
    }
}

std::vector<SummaryRow> summary_from_report_json(const Json& j) {
    std::vector<SummaryRow> rows;
    for (const auto& sj : j.at("stimuli")) {
        SummaryRow r;
        r.name = sj.at("name").get<std::string>();
        r.ok = sj.at("ok").get<bool>();
        if (r.ok) {
            r.hybrid = sj.at("hybrid").at("test").get<EvalReport>();
            r.normal = sj.at("normal").at("test").get<EvalReport>();
        } else {
            r.error = sj.value("error", std::string{});
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace ipmc
