#include "ipmc/serialization.hpp"

#include <fstream>
#include <string>

#include "ipmc/error.hpp"

namespace ipmc {

namespace detail {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw_domain(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw_domain(std::string("unknown field '") + key + "' in " + what);
    }
}

} // namespace detail

using detail::read_optional;
using detail::reject_unknown_keys;

void to_json(Json& j, const PhysicalParams& p) {
    j = Json{{"L", p.L},           {"W", p.W},           {"h_E", p.h_E},         {"rho_E", p.rho_E},
             {"h_M", p.h_M},       {"sigma_M", p.sigma_M}, {"xi_rho", p.xi_rho}, {"xi_h", p.xi_h},
             {"C_clamp", p.C_clamp}, {"alpha_E", p.alpha_E}, {"alpha_I", p.alpha_I}, {"alpha_C", p.alpha_C}};
}

void from_json(const Json& j, PhysicalParams& p) {
    reject_unknown_keys(j,
                        {"L", "W", "h_E", "rho_E", "h_M", "sigma_M", "xi_rho", "xi_h", "C_clamp", "alpha_E",
                         "alpha_I", "alpha_C"},
                        "physical parameters");
    read_optional(j, "L", p.L);
    read_optional(j, "W", p.W);
    read_optional(j, "h_E", p.h_E);
    read_optional(j, "rho_E", p.rho_E);
    read_optional(j, "h_M", p.h_M);
    read_optional(j, "sigma_M", p.sigma_M);
    read_optional(j, "xi_rho", p.xi_rho);
    read_optional(j, "xi_h", p.xi_h);
    read_optional(j, "C_clamp", p.C_clamp);
    read_optional(j, "alpha_E", p.alpha_E);
    read_optional(j, "alpha_I", p.alpha_I);
    read_optional(j, "alpha_C", p.alpha_C);
    p.validate();
}

void to_json(Json& j, const CascadeModel& m) {
    Json g = Json::array();
    Json z = Json::array();
    Json p = Json::array();
    for (const auto& s : m.stages) {
        g.push_back(s.G);
        z.push_back(s.Z);
        p.push_back(s.P);
    }
    j = Json{{"N", m.stages.size()}, {"G", g}, {"Z", z}, {"P", p}};
}

void from_json(const Json& j, CascadeModel& m) {
    reject_unknown_keys(j, {"N", "G", "Z", "P"}, "cascade model");
    const auto n = j.at("N").get<std::size_t>();
    const auto g = j.at("G").get<std::vector<double>>();
    const auto z = j.at("Z").get<std::vector<double>>();
    const auto p = j.at("P").get<std::vector<double>>();
    if (g.size() != n || z.size() != n || p.size() != n) throw_domain("cascade arrays must all have N entries");
    m.stages.clear();
    for (std::size_t k = 0; k < n; ++k) {
        if (!(g[k] > 0.0 && g[k] <= 1.0) || !(z[k] > 0.0) || !(p[k] > 0.0)) {
            throw_domain("cascade stage " + std::to_string(k + 1) + " violates 0 < G <= 1, Z > 0, P > 0");
        }
        m.stages.push_back({g[k], z[k], p[k]});
    }
}

void to_json(Json& j, const StimulusSpec& s) {
    j = Json{{"kind", std::string(to_string(s.kind))},
             {"name", s.display_name()},
             {"amplitude", s.amplitude},
             {"duration", s.duration},
             {"sample_rate", s.sample_rate}};
    switch (s.kind) {
    case StimulusKind::Sine:
        j["frequency"] = s.frequency;
        break;
    case StimulusKind::Chirp:
        j["f0"] = s.f0;
        j["f1"] = s.f1;
        break;
    case StimulusKind::Pulse:
        j["period"] = s.period;
        j["duty"] = s.duty;
        break;
    case StimulusKind::Prbs:
        j["bit_duration"] = s.bit_duration;
        j["lfsr_order"] = s.lfsr_order;
        j["seed"] = s.seed;
        break;
    }
}

void from_json(const Json& j, StimulusSpec& s) {
    reject_unknown_keys(j,
                        {"kind", "name", "amplitude", "duration", "sample_rate", "frequency", "f0", "f1", "period",
                         "duty", "bit_duration", "lfsr_order", "seed"},
                        "stimulus");
    s = StimulusSpec::defaults(stimulus_kind_from_string(j.at("kind").get<std::string>()));
    read_optional(j, "name", s.name);
    read_optional(j, "amplitude", s.amplitude);
    read_optional(j, "duration", s.duration);
    read_optional(j, "sample_rate", s.sample_rate);
    read_optional(j, "frequency", s.frequency);
    read_optional(j, "f0", s.f0);
    read_optional(j, "f1", s.f1);
    read_optional(j, "period", s.period);
    read_optional(j, "duty", s.duty);
    read_optional(j, "bit_duration", s.bit_duration);
    read_optional(j, "lfsr_order", s.lfsr_order);
    read_optional(j, "seed", s.seed);
    s.validate();
}

void to_json(Json& j, const WindowConfig& c) { j = Json{{"tau", c.tau}, {"stride", c.stride}}; }

void from_json(const Json& j, WindowConfig& c) {
    reject_unknown_keys(j, {"tau", "stride"}, "window");
    read_optional(j, "tau", c.tau);
    read_optional(j, "stride", c.stride);
    c.validate();
}

void to_json(Json& j, const SplitRatios& r) {
    j = Json{{"train", r.train}, {"test", r.test}, {"validation", r.validation}};
}

void from_json(const Json& j, SplitRatios& r) {
    reject_unknown_keys(j, {"train", "test", "validation"}, "split");
    read_optional(j, "train", r.train);
    read_optional(j, "test", r.test);
    read_optional(j, "validation", r.validation);
    r.validate();
}

void to_json(Json& j, const LmConfig& c) {
    j = Json{{"mu0", c.mu0},
             {"mu_increase", c.mu_increase},
             {"mu_decrease", c.mu_decrease},
             {"mu_max", c.mu_max},
             {"max_epochs", c.max_epochs},
             {"min_gradient", c.min_gradient},
             {"patience", c.patience},
             {"seed", c.seed}};
}

void from_json(const Json& j, LmConfig& c) {
    reject_unknown_keys(j, {"mu0", "mu_increase", "mu_decrease", "mu_max", "max_epochs", "min_gradient", "patience",
                            "seed"},
                        "lm");
    read_optional(j, "mu0", c.mu0);
    read_optional(j, "mu_increase", c.mu_increase);
    read_optional(j, "mu_decrease", c.mu_decrease);
    read_optional(j, "mu_max", c.mu_max);
    read_optional(j, "max_epochs", c.max_epochs);
    read_optional(j, "min_gradient", c.min_gradient);
    read_optional(j, "patience", c.patience);
    read_optional(j, "seed", c.seed);
    c.validate();
}

namespace {

Json vector_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json normalizer_json(const AffineNormalizer& n) {
    return Json{{"offset", vector_json(n.offset)}, {"scale", vector_json(n.scale)}};
}

AffineNormalizer normalizer_from(const Json& j) {
    reject_unknown_keys(j, {"offset", "scale"}, "normalizer");
    AffineNormalizer n{vector_from(j.at("offset")), vector_from(j.at("scale"))};
    if (n.offset.size() != n.scale.size()) throw_domain("normalizer offset and scale lengths differ");
    for (Eigen::Index i = 0; i < n.scale.size(); ++i) {
        if (!(n.scale(i) != 0.0) || !std::isfinite(n.scale(i))) throw_domain("normalizer scale must be nonzero");
    }
    return n;
}

} // namespace

void to_json(Json& j, const MlpModel& m) {
    Json layers = Json::array();
    for (const auto& l : m.layers) {
        Json rows = Json::array();
        for (Eigen::Index o = 0; o < l.weights.rows(); ++o) {
            rows.push_back(vector_json(l.weights.row(o).transpose()));
        }
        layers.push_back(Json{{"weights", rows}, {"biases", vector_json(l.biases)}});
    }
    j = Json{{"version", kModelFormatVersion},
             {"layer_sizes", m.layer_sizes()},
             {"activation", std::string(to_string(m.hidden_activation))},
             {"output_activation", "linear"},
             {"parameter_order", "layer-major; weights row-major (out x in) then biases"},
             {"input_norm", normalizer_json(m.input_norm)},
             {"output_norm", normalizer_json(m.output_norm)},
             {"layers", layers}};
}

void from_json(const Json& j, MlpModel& m) {
    reject_unknown_keys(j,
                        {"version", "layer_sizes", "activation", "output_activation", "parameter_order",
                         "input_norm", "output_norm", "layers"},
                        "model");
    if (!j.contains("version")) throw_domain("model file has no version field");
    if (j.at("version").get<int>() != kModelFormatVersion) throw_domain("unsupported model format version");
    const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    m = MlpModel{};
    m.hidden_activation = activation_from_string(j.at("activation").get<std::string>());
    const auto& layers = j.at("layers");
    if (sizes.size() != layers.size() + 1) throw_domain("layer_sizes does not match the number of layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& lj = layers[k];
        reject_unknown_keys(lj, {"weights", "biases"}, "layer");
        const auto rows = lj.at("weights").get<std::vector<std::vector<double>>>();
        const auto n_out = static_cast<Eigen::Index>(sizes[k + 1]);
        const auto n_in = static_cast<Eigen::Index>(sizes[k]);
        if (static_cast<Eigen::Index>(rows.size()) != n_out) throw_domain("weight matrix has the wrong row count");
        DenseLayer l{Eigen::MatrixXd(n_out, n_in), vector_from(lj.at("biases"))};
        for (Eigen::Index o = 0; o < n_out; ++o) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(o)].size()) != n_in) {
                throw_domain("weight matrix has the wrong column count");
            }
            for (Eigen::Index i = 0; i < n_in; ++i) l.weights(o, i) = rows[static_cast<std::size_t>(o)][static_cast<std::size_t>(i)];
        }
        m.layers.push_back(std::move(l));
    }
    m.input_norm = normalizer_from(j.at("input_norm"));
    m.output_norm = normalizer_from(j.at("output_norm"));
    m.validate();
}

void to_json(Json& j, const TrainingReport& r) {
    Json epochs = Json::array();
    for (const auto& e : r.epochs) {
        epochs.push_back(Json{{"epoch", e.epoch},
                              {"train_sse", e.train_sse},
                              {"validation_sse", e.validation_sse},
                              {"mu", e.mu},
                              {"gradient_norm", e.gradient_norm},
                              {"rejected_trials", e.rejected_trials}});
    }
    j = Json{{"stop_reason", to_string(r.stop_reason)},
             {"accepted_steps", r.accepted_steps},
             {"best_epoch", r.best_epoch},
             {"best_validation_sse", r.best_validation_sse},
             {"train_rows", r.train_rows},
             {"validation_rows", r.validation_rows},
             {"epochs", epochs}};
}

void to_json(Json& j, const EvalReport& r) {
    j = Json{{"nmse", r.nmse}, {"fitting_percent", r.fitting_percent}, {"n_samples", r.n_samples},
             {"normalizer", r.normalizer}};
}

void from_json(const Json& j, EvalReport& r) {
    reject_unknown_keys(j, {"nmse", "fitting_percent", "n_samples", "normalizer"}, "evaluation report");
    r.nmse = j.at("nmse").get<double>();
    r.fitting_percent = j.at("fitting_percent").get<double>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    read_optional(j, "normalizer", r.normalizer);
}

void to_json(Json& j, const PlantSpec& s) {
    j = Json{{"reference", s.reference}, {"stages", s.stages},       {"a1", s.a1},
             {"a3", s.a3},               {"filter_pole", s.filter_pole}, {"noise_std", s.noise_std},
             {"seed", s.seed},           {"oversample", s.oversample}};
}

void from_json(const Json& j, PlantSpec& s) {
    reject_unknown_keys(j, {"reference", "stages", "a1", "a3", "filter_pole", "noise_std", "seed", "oversample"},
                        "plant");
    read_optional(j, "reference", s.reference);
    read_optional(j, "stages", s.stages);
    read_optional(j, "a1", s.a1);
    read_optional(j, "a3", s.a3);
    read_optional(j, "filter_pole", s.filter_pole);
    read_optional(j, "noise_std", s.noise_std);
    read_optional(j, "seed", s.seed);
    read_optional(j, "oversample", s.oversample);
    s.validate();
}

void to_json(Json& j, const EstimationResult& r) {
    Json restarts = Json::array();
    for (const auto& t : r.restarts) {
        restarts.push_back(Json{{"start", t.start},
                                {"start_objective", t.start_objective},
                                {"final_objective", t.final_objective},
                                {"final_values", t.final_values},
                                {"iterations", t.best_objective.size()},
                                {"evaluations", t.evaluations},
                                {"converged", t.converged},
                                {"failed", t.failed}});
    }
    j = Json{{"params", r.params},
             {"objective", r.objective},
             {"best_restart", r.best_restart},
             {"interface_ratio", r.interface_ratio},
             {"identifiability_note", r.identifiability_note},
             {"free_parameter_order", {"xi_rho", "xi_h", "C_clamp", "alpha_E", "alpha_I", "alpha_C"}},
             {"restarts", restarts}};
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw_domain("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw_domain(path.string() + ": " + e.what());
    }
}

void save_json_file(const std::filesystem::path& path, const Json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace ipmc
