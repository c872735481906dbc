#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "capm/protocol.hpp"
#include "capm/strategies.hpp"
#include "capm/types.hpp"

namespace capm {

// A rectangular table of simple returns, one row per round. Column 0 is the
// market index.
struct ReturnSeries {
  std::vector<std::string> labels;
  std::vector<ReturnVector> rows;
  double dt = 1.0;
  std::string source;

  std::size_t width() const noexcept { return labels.size(); }
  std::size_t rounds() const noexcept { return rows.size(); }
};

// CSV: header row, comma separated, optional leading label column (dates or
// round numbers). The label column is recognised when its header is one of
// date/time/timestamp/round/period/t, or when the first data cell in that
// column is not a number. Throws IngestError with the offending line.
ReturnSeries parse_csv(std::istream& in, double dt, const std::string& source = "<stream>");
ReturnSeries load_csv(const std::filesystem::path& path, double dt);

// Writes "round,<labels...>" with 17 significant digits per value.
void write_csv(const ReturnSeries& series, std::ostream& out);
void save_csv(const ReturnSeries& series, const std::filesystem::path& path);

// The market moves recorded in a finished (or partial) game.
ReturnSeries series_from_history(const History& history, double dt,
                                 std::vector<std::string> labels = {});

// Deterministic market replaying the rows in order.
MarketModel as_market(const ReturnSeries& series);

// K = width - 1, N = rounds. Throws ConfigError for a single-column series.
GameConfig game_config(const ReturnSeries& series);

}  // namespace capm
