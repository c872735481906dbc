#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace capm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters: game configuration, epsilon/alpha ranges, model shapes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A move outside its domain: weights not summing to one, returns <= -1,
// non-finite components, width mismatches.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Round attempted after the last one, or a strategy ran out of moves.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Investor's gross return on a round was <= 0; the play is rejected.
class InvestorBankrupt : public Error {
 public:
  InvestorBankrupt(std::size_t round, double gross)
      : Error("investor bankrupt on round " + std::to_string(round) +
              " (gross return " + std::to_string(gross) + ")"),
        round_(round),
        gross_(gross) {}

  std::size_t round() const noexcept { return round_; }
  double gross() const noexcept { return gross_; }

 private:
  std::size_t round_;
  double gross_;
};

// A speculator strategy produced a negative gross return, so its capital
// would go negative. Raised instead of clamping the ledger.
class WitnessFailure : public Error {
 public:
  WitnessFailure(std::size_t speculator, std::size_t round, double gross)
      : Error("speculator " + std::to_string(speculator) +
              " bankrupt on round " + std::to_string(round) +
              " (gross return " + std::to_string(gross) + ")"),
        speculator_(speculator),
        round_(round),
        gross_(gross) {}

  std::size_t speculator() const noexcept { return speculator_; }
  std::size_t round() const noexcept { return round_; }
  double gross() const noexcept { return gross_; }

 private:
  std::size_t speculator_;
  std::size_t round_;
  double gross_;
};

// Malformed input file. line() is 1-based; 0 means the whole file.
class IngestError : public Error {
 public:
  IngestError(std::string source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string{}) +
              ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace capm
