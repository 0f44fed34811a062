// ipmc: command-line front end for the hybrid identification pipeline.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipmc/csv_io.hpp"
#include "ipmc/error.hpp"
#include "ipmc/experiment.hpp"

namespace {

using namespace ipmc;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> parallel;
    std::vector<std::string> stimuli;
    bool pooled = false;
};

ExperimentConfig load_config(const CommonOptions& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig::defaults()
                                                 : load_json_file(o.config_path).get<ExperimentConfig>();
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.parallel) cfg.parallel = *o.parallel;
    if (!o.stimuli.empty()) cfg.only = o.stimuli;
    if (o.pooled) cfg.pooled = true;
    cfg.validate();
    return cfg;
}

std::vector<StimulusSpec> selected_stimuli(const ExperimentConfig& cfg) {
    const auto names = cfg.source_names();
    std::vector<StimulusSpec> out;
    for (const auto& s : cfg.stimuli) {
        if (std::find(names.begin(), names.end(), s.display_name()) != names.end()) {
            out.push_back(resolved_stimulus(cfg, s));
        }
    }
    return out;
}

CascadeModel config_cascade(const ExperimentConfig& cfg, const std::string& params_path) {
    PhysicalParams p = cfg.circuit.params;
    if (!params_path.empty()) {
        const Json j = load_json_file(params_path);
        p = (j.contains("params") ? j.at("params") : j).get<PhysicalParams>();
    }
    return build_cascade(p, cfg.circuit.stages);
}

int cmd_generate(const CommonOptions& o, bool with_plant) {
    const ExperimentConfig cfg = load_config(o);
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& spec : selected_stimuli(cfg)) {
        const Signal v = generate_stimulus(spec).with_label("v_in");
        const std::string name = spec.display_name();
        if (with_plant) {
            const auto path = cfg.out_dir / (name + "_recording.csv");
            write_recording(path, v, plant_response(plant_for(cfg, name), v));
            std::cout << path.string() << '\n';
        } else {
            const auto path = cfg.out_dir / (name + "_stimulus.csv");
            write_signal_csv(path, v);
            std::cout << path.string() << '\n';
        }
    }
    return 0;
}

int cmd_simulate(const CommonOptions& o, const std::string& input, const std::string& output,
                 const std::string& params_path) {
    const ExperimentConfig cfg = load_config(o);
    const Signal v_in = read_signal_csv(input);
    const Signal v_o = simulate_cascade(config_cascade(cfg, params_path), v_in, cfg.circuit.oversample);
    write_signal_csv(output, v_o);
    return 0;
}

int cmd_estimate(const CommonOptions& o, const std::string& recording, const std::string& output) {
    const ExperimentConfig cfg = load_config(o);
    const Recording rec = ingest_recording(recording);
    EstimationProblem problem(rec.v_in, rec.displacement);
    problem.stages = cfg.circuit.stages;
    problem.fixed = cfg.circuit.params;
    problem.bounds = cfg.circuit.bounds;
    problem.oversample = cfg.circuit.oversample;
    const auto result =
        estimate_params(problem, cfg.circuit.estimation_restarts, derive_seed(cfg.seed, "estimation"), cfg.parallel);
    const Json j = result;
    if (output.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        save_json_file(output, j);
    }
    std::fprintf(stderr, "objective %.6e (restart %zu); %s\n", result.objective, result.best_restart,
                 result.identifiability_note.c_str());
    return 0;
}

WindowedDataset path_dataset(const ExperimentConfig& cfg, const Recording& rec, const std::string& path,
                             const std::string& params_path) {
    if (path == "normal") return frame_windows(rec.v_in, rec.displacement, cfg.window);
    if (path != "hybrid") throw_domain("--path must be 'hybrid' or 'normal'");
    const Signal v_o =
        simulate_cascade(config_cascade(cfg, params_path), rec.v_in, cfg.circuit.oversample).with_label("v_o");
    return frame_windows(v_o, rec.displacement, cfg.window);
}

int cmd_train(const CommonOptions& o, const std::string& recording, const std::string& path,
              const std::string& params_path) {
    const ExperimentConfig cfg = load_config(o);
    const Recording rec = ingest_recording(recording);
    const std::string name = std::filesystem::path(recording).stem().string();
    const WindowedDataset d =
        split_dataset(path_dataset(cfg, rec, path, params_path), cfg.split, derive_seed(cfg.seed, "split/" + name));

    std::vector<std::size_t> sizes{cfg.window.tau};
    sizes.insert(sizes.end(), cfg.net.hidden.begin(), cfg.net.hidden.end());
    sizes.push_back(1);
    MlpModel model = init_model(sizes, cfg.net.activation, derive_seed(cfg.seed, "init/" + name));
    fit_normalization(model, d);
    const TrainResult result = train_lm(model, d, cfg.net.lm);

    save_json_file(cfg.out_dir / "models" / (name + "_" + path + ".json"), Json(result.model));
    save_json_file(cfg.out_dir / "training" / (name + "_" + path + ".json"), Json(result.report));
    std::printf("%s %s: %zu accepted steps, stop %s, best validation SSE %.6e\n", name.c_str(), path.c_str(),
                result.report.accepted_steps, std::string(to_string(result.report.stop_reason)).c_str(),
                result.report.best_validation_sse);
    return 0;
}

int cmd_evaluate(const CommonOptions& o, const std::string& target, const std::string& prediction,
                 const std::string& model_path, const std::string& recording, const std::string& path,
                 const std::string& params_path) {
    EvalReport r;
    if (!model_path.empty()) {
        if (recording.empty()) throw_domain("--model needs --recording");
        const ExperimentConfig cfg = load_config(o);
        const MlpModel model = load_json_file(model_path).get<MlpModel>();
        const WindowedDataset d = path_dataset(cfg, ingest_recording(recording), path, params_path);
        const Eigen::VectorXd y = forward_batch(model, d.inputs);
        r = evaluate({d.targets.data(), static_cast<std::size_t>(d.targets.size())},
                     {y.data(), static_cast<std::size_t>(y.size())});
    } else {
        if (target.empty() || prediction.empty()) throw_domain("evaluate needs --target and --prediction, or --model");
        const Signal w = read_signal_csv(target);
        const Signal w_hat = read_signal_csv(prediction);
        r = evaluate(w.samples(), w_hat.samples());
    }
    std::cout << Json(r).dump(2) << '\n';
    return 0;
}

int cmd_run(const CommonOptions& o) {
    const ExperimentConfig cfg = load_config(o);
    const ExperimentReport report = run_experiment(cfg);
    write_experiment_outputs(report, cfg, cfg.out_dir);
    std::cout << report_render(report.summary()).text;
    if (!report.all_audits_passed()) {
        std::fprintf(stderr, "non-autoregressive audit failed\n");
        return 3;
    }
    for (const auto& outcome : report.outcomes) {
        if (!outcome.ok) return outcome.error_exit_code;
    }
    return 0;
}

int cmd_render(const std::string& report_path, const std::string& out_dir) {
    const RenderedReport r = report_render(summary_from_report_json(load_json_file(report_path)));
    std::cout << r.text;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "summary.txt", std::ios::binary) << r.text;
        std::ofstream(std::filesystem::path(out_dir) / "summary.csv", std::ios::binary) << r.csv;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IPMC hybrid identification: circuit cascade plus windowed MLP"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--config", common.config_path, "Experiment config (JSON)");
    app.add_option("--seed", common.seed, "Global seed");
    app.add_option("--out-dir", common.out_dir, "Output directory");
    app.add_option("--parallel", common.parallel, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--stimulus", common.stimuli, "Only run the named stimulus (repeatable)");
    app.add_flag("--pooled", common.pooled, "Train one model per path on all stimuli");

    auto* generate = app.add_subcommand("generate", "Write stimulus signals, or plant recordings with --plant");
    bool with_plant = false;
    generate->add_flag("--plant", with_plant, "Pass each stimulus through the plant oracle");

    std::string input;
    std::string output;
    std::string params_path;
    auto* simulate = app.add_subcommand("simulate", "Run a stimulus CSV through the circuit cascade");
    simulate->add_option("--input", input, "Stimulus signal CSV")->required();
    simulate->add_option("--output", output, "Output V_o CSV")->required();
    simulate->add_option("--params", params_path, "Circuit parameters JSON (else the config's)");

    std::string recording;
    auto* estimate = app.add_subcommand("estimate", "Estimate the free circuit parameters from a recording");
    estimate->add_option("--recording", recording, "Recording CSV")->required();
    estimate->add_option("--output", output, "Result JSON (default: stdout)");

    std::string path = "hybrid";
    auto* train = app.add_subcommand("train", "Train one path on a recording");
    train->add_option("--recording", recording, "Recording CSV")->required();
    train->add_option("--path", path, "hybrid or normal")->check(CLI::IsMember({"hybrid", "normal"}));
    train->add_option("--params", params_path, "Circuit parameters JSON (else the config's)");

    std::string target;
    std::string prediction;
    std::string model_path;
    auto* eval = app.add_subcommand("evaluate", "NMSE and Fitting for a prediction");
    eval->add_option("--target", target, "Target signal CSV");
    eval->add_option("--prediction", prediction, "Predicted signal CSV");
    eval->add_option("--model", model_path, "Model JSON, evaluated on every window of --recording");
    eval->add_option("--recording", recording, "Recording CSV");
    eval->add_option("--path", path, "hybrid or normal")->check(CLI::IsMember({"hybrid", "normal"}));
    eval->add_option("--params", params_path, "Circuit parameters JSON (else the config's)");

    auto* run = app.add_subcommand("run", "Full Hybrid-vs-Normal experiment");

    std::string report_path;
    auto* render = app.add_subcommand("render", "Re-render the summary table from a report.json");
    render->add_option("report", report_path, "report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*generate) return cmd_generate(common, with_plant);
        if (*simulate) return cmd_simulate(common, input, output, params_path);
        if (*estimate) return cmd_estimate(common, recording, output);
        if (*train) return cmd_train(common, recording, path, params_path);
        if (*eval) return cmd_evaluate(common, target, prediction, model_path, recording, path, params_path);
        if (*run) return cmd_run(common);
        if (*render) return cmd_render(report_path, common.out_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
