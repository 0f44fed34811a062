#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "ipmc/circuit.hpp"
#include "ipmc/dataset.hpp"
#include "ipmc/estimation.hpp"
#include "ipmc/lm_trainer.hpp"
#include "ipmc/metrics.hpp"
#include "ipmc/mlp.hpp"
#include "ipmc/plant.hpp"
#include "ipmc/stimulus.hpp"

// JSON forms of the library's value types. Readers start from the type's
// defaults, so omitted fields keep their documented default; unknown keys
// are rejected so that typos in config files surface as errors.

namespace ipmc {

inline constexpr int kModelFormatVersion = 1;

using Json = nlohmann::json;

void to_json(Json& j, const PhysicalParams& p);
void from_json(const Json& j, PhysicalParams& p);

/// Flat form: {"N": n, "G": [...], "Z": [...], "P": [...]}.
void to_json(Json& j, const CascadeModel& m);
void from_json(const Json& j, CascadeModel& m);

void to_json(Json& j, const StimulusSpec& s);
void from_json(const Json& j, StimulusSpec& s);

void to_json(Json& j, const WindowConfig& c);
void from_json(const Json& j, WindowConfig& c);

void to_json(Json& j, const SplitRatios& r);
void from_json(const Json& j, SplitRatios& r);

void to_json(Json& j, const LmConfig& c);
void from_json(const Json& j, LmConfig& c);

/// Versioned model document; weights are nested arrays (one per output unit).
void to_json(Json& j, const MlpModel& m);
void from_json(const Json& j, MlpModel& m);

void to_json(Json& j, const TrainingReport& r);
void to_json(Json& j, const EvalReport& r);
void from_json(const Json& j, EvalReport& r);

void to_json(Json& j, const PlantSpec& s);
void from_json(const Json& j, PlantSpec& s);

void to_json(Json& j, const EstimationResult& r);

/// Parses a JSON file; syntax errors become domain (config) errors.
[[nodiscard]] Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& j);

namespace detail {

/// Throws a domain error if `j` has a key outside `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what);

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) {
        out = it->template get<T>();
    }
}

} // namespace detail

} // namespace ipmc
