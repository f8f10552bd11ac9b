#include "qsdcat/series_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsdcat/errors.hpp"
#include "qsdcat/qsd.hpp"
#include "qsdcat/wavelet.hpp"

namespace qsdcat {

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }

  // Returns the next line without its terminator and advances past it.
  std::string_view line(std::size_t& start) {
    start = pos;
    const std::size_t end = text.find('\n', pos);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    pos = end == std::string_view::npos ? text.size() : end + 1;
    std::string_view out = text.substr(start, stop - start);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    return out;
  }
};

std::vector<std::pair<std::string_view, std::size_t>> split_fields(std::string_view line,
                                                                   std::size_t offset) {
  std::vector<std::pair<std::string_view, std::size_t>> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    fields.emplace_back(line.substr(begin, end - begin), offset + begin);
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return fields;
}

double parse_field(std::string_view field, std::size_t offset) {
  if (field.empty()) throw FormatError("empty numeric field", offset);
  double value = 0.0;
  const char* first = field.data();
  // from_chars rejects a leading '+'.
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    const auto bad = ec != std::errc{} ? 0 : static_cast<std::size_t>(ptr - field.data());
    throw FormatError("invalid number '" + std::string(field) + "'", offset + bad);
  }
  return value;
}

}  // namespace

const std::vector<double>& CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns.at(i);
  }
  throw FormatError("missing column '" + std::string(name) + "'", 0);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out += (i ? "," : "") + table.header[i];
  }
  out += "\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += ',';
      out += format_double(table.columns[i][r]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  Cursor cur{text};
  std::size_t start = 0;
  bool have_header = false;

  while (!cur.done()) {
    const std::string_view line = cur.line(start);
    if (!have_header) {
      if (!line.empty() && line.front() == '#') {
        std::string_view body = line.substr(1);
        if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        table.comments.emplace_back(body);
        continue;
      }
      if (line.empty()) throw FormatError("expected a header row", start);
      for (const auto& [field, offset] : split_fields(line, start)) {
        if (field.empty()) throw FormatError("empty header field", offset);
        table.header.emplace_back(field);
      }
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (line.empty()) {
      if (cur.done()) break;
      throw FormatError("blank line inside data", start);
    }
    const auto fields = split_fields(line, start);
    if (fields.size() != table.header.size()) {
      throw FormatError("expected " + std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()),
                        start);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      table.columns[i].push_back(parse_field(fields[i].first, fields[i].second));
    }
  }
  if (!have_header) throw FormatError("no header row", text.size());
  if (table.rows() == 0) throw FormatError("no data rows", text.size());
  return table;
}

CsvTable time_series_table(const TrajectoryResult& result, std::vector<std::string> comments) {
  return CsvTable{std::move(comments), kTimeSeriesHeader,
                  {result.times, result.p_all_ground, result.q_expect, result.record,
                   result.norm_drift}};
}

CsvTable spectrum_table(const WaveletSpectrum& spectrum, std::vector<std::string> comments) {
  CsvTable table;
  table.comments = std::move(comments);
  table.header.push_back("t");
  for (double a : spectrum.scales) table.header.push_back(format_double(a));
  table.columns.push_back(spectrum.times);
  for (Eigen::Index s = 0; s < spectrum.power.rows(); ++s) {
    std::vector<double> row(spectrum.power.cols());
    for (Eigen::Index j = 0; j < spectrum.power.cols(); ++j) row[j] = spectrum.power(s, j);
    table.columns.push_back(std::move(row));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qsdcat
