#include "ipmc/plant.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "ipmc/csv_io.hpp"
#include "ipmc/error.hpp"

namespace ipmc {

void PlantSpec::validate() const {
    reference.validate();
    if (stages < 1) throw_domain("plant needs at least one circuit stage");
    if (!(filter_pole > 0.0) || !std::isfinite(filter_pole)) throw_domain("plant filter_pole must be positive");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw_domain("plant noise_std must be non-negative");
    if (a1 == 0.0 || !std::isfinite(a1) || !std::isfinite(a3)) throw_domain("plant a1 must be nonzero and finite");
    if (oversample < 1) throw_domain("plant oversample must be positive");
}

Signal plant_response(const PlantSpec& spec, const Signal& v_i) {
    spec.validate();
    // The whole chain runs on the oversampled grid. Holding the cubic's
    // output at the outer rate would delay w by a full sample.
    const auto os = static_cast<std::size_t>(spec.oversample);
    std::vector<double> held(v_i.size() * os);
    for (std::size_t i = 0; i < held.size(); ++i) held[i] = v_i[i / os];
    const double fine_rate = v_i.sample_rate() * static_cast<double>(os);
    const Signal v_o =
        simulate_cascade(build_cascade(spec.reference, spec.stages), Signal(std::move(held), fine_rate), 1);

    std::vector<double> bent(v_o.size());
    std::transform(v_o.values().begin(), v_o.values().end(), bent.begin(),
                   [&spec](double v) { return spec.a1 * v + spec.a3 * v * v * v; });

    // The circuit output jumps with each held input sample, so a strictly
    // causal readout would lag by one outer sample. Integrating the filter
    // exactly with the input linear between fine samples keeps feedthrough.
    const double ph = spec.filter_pole / fine_rate;
    const double decay = std::exp(-ph);
    const double gain = -std::expm1(-ph);
    std::vector<double> filtered(bent.size());
    double y = bent.empty() ? 0.0 : bent.front();
    for (std::size_t k = 0; k < bent.size(); ++k) {
        if (k > 0) {
            const double step = bent[k] - bent[k - 1];
            y = decay * y + gain * bent[k] + step * (decay - gain / ph);
        }
        filtered[k] = y;
    }
    std::vector<double> w(v_i.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = filtered[i * os];

    if (spec.noise_std > 0.0 && !w.empty()) {
        const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        const double sigma = spec.noise_std * (*hi - *lo);
        if (sigma > 0.0) {
            std::mt19937_64 rng(spec.seed);
            std::normal_distribution<double> noise(0.0, sigma);
            for (double& v : w) v += noise(rng);
        }
    }
    return Signal(std::move(w), v_i.sample_rate(), "displacement", v_i.start_time());
}

namespace {

double declared_rate(const detail::CsvTable& t) {
    static constexpr std::string_view key = "sample_rate_hz=";
    for (const auto& c : t.comments) {
        const auto at = c.find(key);
        if (at == std::string::npos) continue;
        const char* first = c.data() + at + key.size();
        double rate = 0.0;
        const auto [ptr, ec] = std::from_chars(first, c.data() + c.size(), rate);
        if (ec != std::errc{} || !(rate > 0.0)) throw_data("recording declares an invalid sample_rate_hz");
        return rate;
    }
    return 0.0;
}

} // namespace

Recording ingest_recording(const std::filesystem::path& path) {
    const auto t = detail::read_numeric_csv(path);
    if (t.header != std::vector<std::string>{"time_s", "v_in", "displacement"}) {
        throw_data(path.string() + ": expected header 'time_s,v_in,displacement'");
    }
    if (t.rows.empty()) throw_data(path.string() + ": recording has no rows");
    const double rate = detail::uniform_rate(t, 0, declared_rate(t), path.string());
    std::vector<double> v;
    std::vector<double> w;
    v.reserve(t.rows.size());
    w.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        v.push_back(r[1]);
        w.push_back(r[2]);
    }
    const double start = t.rows.front()[0];
    return {Signal(std::move(v), rate, "v_in", start), Signal(std::move(w), rate, "displacement", start)};
}

void write_recording(const std::filesystem::path& path, const Signal& v_in, const Signal& displacement) {
    if (v_in.size() != displacement.size() || v_in.sample_rate() != displacement.sample_rate()) {
        throw_data("recording channels must share length and sample rate");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open '" + path.string() + "' for writing");
    out << "# units: time_s=s v_in=V displacement=mm sample_rate_hz=" << format_exact(v_in.sample_rate()) << '\n';
    out << "time_s,v_in,displacement\n";
    for (std::size_t i = 0; i < v_in.size(); ++i) {
        out << format_exact(v_in.time(i)) << ',' << format_exact(v_in[i]) << ',' << format_exact(displacement[i])
            << '\n';
    }
}

} // namespace ipmc
