#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qsdcat {

struct TrajectoryResult;
struct WaveletSpectrum;

/// Column-oriented numeric CSV with `#` comment lines before the header row.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Column by header name; throws FormatError if absent.
  const std::vector<double>& column(std::string_view name) const;
  bool operator==(const CsvTable&) const = default;
};

/// Header row of every time-series file.
inline const std::vector<std::string> kTimeSeriesHeader{"t", "p_all_ground", "q_expect", "record",
                                                        "norm_drift"};

/// "%.17g"; parse_double(format_double(x)) == x for finite x.
std::string format_double(double value);

std::string format_csv(const CsvTable& table);

/// Throws FormatError carrying the byte offset of the first offending character.
/// A table without data rows is malformed.
CsvTable parse_csv(std::string_view text);

CsvTable time_series_table(const TrajectoryResult& result, std::vector<std::string> comments);

/// Header row is "t" followed by the scale axis; each row is a time followed by power.
CsvTable spectrum_table(const WaveletSpectrum& spectrum, std::vector<std::string> comments);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and renames, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace qsdcat
