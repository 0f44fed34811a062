#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipmc/circuit.hpp"
#include "ipmc/dataset.hpp"
#include "ipmc/estimation.hpp"
#include "ipmc/lm_trainer.hpp"
#include "ipmc/metrics.hpp"
#include "ipmc/mlp.hpp"
#include "ipmc/plant.hpp"
#include "ipmc/serialization.hpp"
#include "ipmc/stimulus.hpp"

namespace ipmc {

/// Named sub-seed of a global seed (splitmix64 over the name's FNV-1a hash).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t global, std::string_view name);

struct NetConfig {
    std::vector<std::size_t> hidden = std::vector<std::size_t>(11, 10);
    Activation activation = Activation::Tanh;
    LmConfig lm;
};

struct CircuitConfig {
    PhysicalParams params;
    std::size_t stages = 45;
    int oversample = kDefaultOversample;
    bool estimate = false;
    std::size_t estimation_restarts = 8;
    std::string estimate_from; // stimulus name; empty means the first one
    std::array<ParamBounds, kFreeParamCount> bounds = default_bounds();
};

struct RecordingSource {
    std::string name;
    std::filesystem::path path;
};

/// Everything one `run` needs. With a plant source, each stimulus is
/// generated and passed through the plant; with recordings, each file
/// provides its own stimulus and displacement.
struct ExperimentConfig {
    std::vector<StimulusSpec> stimuli;
    std::optional<PlantSpec> plant;
    std::vector<RecordingSource> recordings;
    CircuitConfig circuit;
    WindowConfig window;
    NetConfig net;
    SplitRatios split;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 42;
    std::size_t parallel = 1;
    bool pooled = false;
    std::vector<std::string> only; // stimulus-name filter; empty keeps all

    /// The four-stimulus protocol against the default plant oracle.
    static ExperimentConfig defaults();

    void validate() const;
    [[nodiscard]] std::vector<std::string> source_names() const;
};

/// The stimulus with its register seed filled in when the config leaves it
/// to the global seed.
[[nodiscard]] StimulusSpec resolved_stimulus(const ExperimentConfig& cfg, StimulusSpec spec);

/// The configured plant with its noise seed derived for stimulus `name`.
[[nodiscard]] PlantSpec plant_for(const ExperimentConfig& cfg, const std::string& name);

void to_json(Json& j, const ExperimentConfig& c);
void from_json(const Json& j, ExperimentConfig& c);

struct PathOutcome {
    EvalReport test_metrics;
    TrainingReport training;
    MlpModel model;
    std::vector<double> predictions; // one per window, full series
    AuditResult audit;
};

/// Hybrid (circuit then network) and Normal (network only) results for one stimulus.
struct StimulusOutcome {
    std::string name;
    bool ok = false;
    std::string error;
    int error_exit_code = 0;
    std::vector<double> time;   // window-end times
    std::vector<double> target;
    std::vector<Split> split;
    PathOutcome hybrid;
    PathOutcome normal;
};

struct SummaryRow {
    std::string name;
    bool ok = false;
    std::string error;
    EvalReport hybrid;
    EvalReport normal;
};

struct SummaryAverage {
    double nmse_hybrid = 0.0;
    double nmse_normal = 0.0;
    double fitting_hybrid = 0.0;
    double fitting_normal = 0.0;
    std::size_t count = 0;
};

/// Means over the successful rows.
[[nodiscard]] SummaryAverage summarize(const std::vector<SummaryRow>& rows);

struct ExperimentReport {
    std::vector<StimulusOutcome> outcomes; // in config order
    std::optional<EstimationResult> estimation;
    PhysicalParams circuit_params;
    std::vector<std::pair<std::string, std::uint64_t>> seeds;
    bool pooled = false;

    [[nodiscard]] std::vector<SummaryRow> summary() const;
    [[nodiscard]] bool all_audits_passed() const;
};

/// Runs the Hybrid-vs-Normal comparison. Per-stimulus failures are recorded
/// in the outcome and do not stop the other stimuli.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct RenderedReport {
    std::string text;
    std::string csv;
};

/// Aligned text table and CSV: one row per stimulus plus an Average row.
/// NMSE uses four decimals in scientific notation, Fitting two decimals.
[[nodiscard]] RenderedReport report_render(const std::vector<SummaryRow>& rows);

/// Writes summary.txt, summary.csv, report.json, the per-stimulus
/// `{name}_target_hybrid_normal.csv` and `{name}_split_tags.csv` series,
/// and trained models plus training reports under models/ and training/.
void write_experiment_outputs(const ExperimentReport& report, const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

/// Summary rows stored in a report.json written by `write_experiment_outputs`.
[[nodiscard]] std::vector<SummaryRow> summary_from_report_json(const Json& j);

} // namespace ipmc
