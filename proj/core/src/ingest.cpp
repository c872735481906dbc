#include "capm/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "capm/errors.hpp"

namespace capm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

bool is_label_header(std::string_view h) {
  std::string lower(h);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "date" || lower == "time" || lower == "timestamp" || lower == "round" ||
         lower == "period" || lower == "t";
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ReturnSeries parse_csv(std::istream& in, double dt, const std::string& source) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw IngestError(source, 0, "dt must be positive");
  }
  ReturnSeries series;
  series.dt = dt;
  series.source = source;

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    header_line = line;
    header = split_row(header_line);
    break;
  }
  if (header.empty()) throw IngestError(source, 0, "empty file");

  std::optional<bool> has_label;
  if (is_label_header(header.front())) has_label = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw IngestError(source, line_no,
                        "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    if (!has_label) has_label = !parse_number(cells.front()).has_value();
    const std::size_t first = *has_label ? 1 : 0;
    if (cells.size() <= first) throw IngestError(source, line_no, "row has no return columns");

    std::vector<double> values;
    values.reserve(cells.size() - first);
    for (std::size_t c = first; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw IngestError(source, line_no,
                          "column " + std::to_string(c + 1) + ": '" + std::string(cells[c]) +
                              "' is not a number");
      }
      if (!std::isfinite(*v)) {
        throw IngestError(source, line_no, "column " + std::to_string(c + 1) + " is not finite");
      }
      if (*v <= -1.0) {
        throw IngestError(source, line_no,
                          "column " + std::to_string(c + 1) + ": return " + std::string(cells[c]) +
                              " must exceed -1");
      }
      values.push_back(*v);
    }
    series.rows.emplace_back(std::move(values));
  }
  if (series.rows.empty()) throw IngestError(source, 0, "empty series");

  const std::size_t first = *has_label ? 1 : 0;
  for (std::size_t c = first; c < header.size(); ++c) series.labels.emplace_back(header[c]);
  return series;
}

ReturnSeries load_csv(const std::filesystem::path& path, double dt) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open file");
  return parse_csv(in, dt, path.string());
}

void write_csv(const ReturnSeries& series, std::ostream& out) {
  out << "round";
  for (const auto& l : series.labels) out << ',' << l;
  out << '\n';
  for (std::size_t n = 0; n < series.rows.size(); ++n) {
    out << (n + 1);
    for (double v : series.rows[n].values()) out << ',' << format17(v);
    out << '\n';
  }
}

void save_csv(const ReturnSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError(path.string(), 0, "cannot open file for writing");
  write_csv(series, out);
  if (!out) throw IngestError(path.string(), 0, "write failed");
}

ReturnSeries series_from_history(const History& history, double dt,
                                 std::vector<std::string> labels) {
  ReturnSeries series;
  series.dt = dt;
  series.source = "history";
  if (labels.empty()) {
    labels.emplace_back("index");
    for (std::size_t k = 1; k < history.width(); ++k) labels.push_back("s" + std::to_string(k));
  }
  if (labels.size() != history.width()) throw ConfigError("label count does not match width");
  series.labels = std::move(labels);
  series.rows.reserve(history.size());
  for (std::size_t n = 0; n < history.size(); ++n) {
    const auto x = history.market_move(n);
    series.rows.emplace_back(x);
  }
  return series;
}

MarketModel as_market(const ReturnSeries& series) { return MarketModel::deterministic(series.rows); }

GameConfig game_config(const ReturnSeries& series) {
  if (series.width() < 2) {
    throw ConfigError("series needs an index column and at least one security column");
  }
  return GameConfig(series.width() - 1, series.rounds(), series.dt);
}

}  // namespace capm
