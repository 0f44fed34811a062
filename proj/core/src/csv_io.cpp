#include "ipmc/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ipmc/error.hpp"

namespace ipmc {

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

namespace detail {

CsvTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open '" + path.string() + "'");

    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty()) continue;
        if (content.front() == '#') {
            t.comments.push_back(trim(content.substr(1)));
            continue;
        }
        auto fields = split_fields(content);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw_data(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string& f = fields[j];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[j]);
            if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(row[j])) {
                throw_data(path.string() + ": line " + std::to_string(line_no) + ": field '" + t.header[j] +
                           "' is not a finite number ('" + f + "')");
            }
        }
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(line_no);
    }
    if (!have_header) throw_data(path.string() + ": missing header line");
    return t;
}

double uniform_rate(const CsvTable& t, std::size_t time_column, double declared_rate, const std::string& source) {
    const std::size_t n = t.rows.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (!(t.rows[i][time_column] > t.rows[i - 1][time_column])) {
            throw_data(source + ": line " + std::to_string(t.line_numbers[i]) + ": time is not strictly increasing");
        }
    }
    if (!(declared_rate > 0.0) && n < 2) throw_data(source + ": cannot infer a sample rate from fewer than two rows");
    // Intervals are checked against the first one so the error names the
    // first offending line. The span then gives a more precise rate.
    const double expected =
        declared_rate > 0.0 ? 1.0 / declared_rate : t.rows[1][time_column] - t.rows[0][time_column];
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = t.rows[i][time_column] - t.rows[i - 1][time_column];
        if (std::abs(dt / expected - 1.0) > 1e-6) {
            throw_data(source + ": line " + std::to_string(t.line_numbers[i]) + ": non-uniform sampling (interval " +
                       format_exact(dt) + " s, expected " + format_exact(expected) + " s)");
        }
    }
    if (declared_rate > 0.0) return declared_rate;
    const double span = t.rows[n - 1][time_column] - t.rows[0][time_column];
    double rate = static_cast<double>(n - 1) / span;
    const double snapped = std::round(rate * 1e6) / 1e6;
    if (std::abs(snapped - rate) <= 1e-9 * rate) rate = snapped;
    return rate;
}

} // namespace detail

void write_signal_csv(const std::filesystem::path& path, const Signal& s) {
    auto out = open_for_write(path);
    out << "time_s,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) out << format_exact(s.time(i)) << ',' << format_exact(s[i]) << '\n';
}

Signal read_signal_csv(const std::filesystem::path& path) {
    const auto t = detail::read_numeric_csv(path);
    if (t.header.size() != 2 || t.header[0] != "time_s") {
        throw_data(path.string() + ": expected header 'time_s,value'");
    }
    const double rate = detail::uniform_rate(t, 0, 0.0, path.string());
    std::vector<double> values;
    values.reserve(t.rows.size());
    for (const auto& r : t.rows) values.push_back(r[1]);
    const double start = t.rows.empty() ? 0.0 : t.rows.front()[0];
    return Signal(std::move(values), rate, path.stem().string(), start);
}

void write_dataset_csv(const std::filesystem::path& path, const WindowedDataset& d) {
    auto out = open_for_write(path);
    for (std::size_t j = 0; j < d.tau(); ++j) out << 'x' << j << ',';
    out << "target,split\n";
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.tau(); ++j) {
            out << format_exact(d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ',';
        }
        out << format_exact(d.targets(static_cast<Eigen::Index>(i))) << ',' << to_string(d.split[i]) << '\n';
    }
}

} // namespace ipmc
