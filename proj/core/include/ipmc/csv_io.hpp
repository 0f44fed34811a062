#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipmc/dataset.hpp"
#include "ipmc/signal.hpp"

namespace ipmc {

/// Two-column `time_s,value` file with a one-line header. The sample rate is
/// inferred from the time column, which must be uniform to 1 part in 1e6.
void write_signal_csv(const std::filesystem::path& path, const Signal& s);
[[nodiscard]] Signal read_signal_csv(const std::filesystem::path& path);

/// Dataset export: x0..x{tau-1}, target, split.
void write_dataset_csv(const std::filesystem::path& path, const WindowedDataset& d);

/// Formats a double so that parsing it back yields the same value.
[[nodiscard]] std::string format_exact(double v);

namespace detail {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row
    std::vector<std::string> comments;     // '#' lines, without the marker
};

/// Reads a numeric CSV: '#' comment lines, one header line, then rows with
/// exactly as many numeric fields as the header.
[[nodiscard]] CsvTable read_numeric_csv(const std::filesystem::path& path);

/// Sample rate implied by a time column, checked for uniform spacing.
/// `declared_rate` (if > 0) is used instead of the inferred value.
[[nodiscard]] double uniform_rate(const CsvTable& t, std::size_t time_column, double declared_rate,
                                  const std::string& source);

} // namespace detail

} // namespace ipmc
