#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace capm {

// Inline storage for move vectors; games with K + 1 <= 4 never allocate.
using MoveStorage = boost::container::small_vector<double, 4>;

// Absolute tolerance on |sum(weights) - 1| before renormalization.
inline constexpr double kWeightSumTolerance = 1e-12;

// Parameters of one play: K non-index securities, N rounds of length dt.
// The horizon T = N * dt is always derived, never stored.
class GameConfig {
 public:
  GameConfig(std::size_t num_securities, std::size_t num_rounds, double dt);

  std::size_t num_securities() const noexcept { return num_securities_; }
  std::size_t num_rounds() const noexcept { return num_rounds_; }
  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return static_cast<double>(num_rounds_) * dt_; }

  // K + 1: the length of every move vector.
  std::size_t width() const noexcept { return num_securities_ + 1; }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;

 private:
  std::size_t num_securities_;
  std::size_t num_rounds_;
  double dt_;
};

// Market's move for one round: simple returns x^0..x^K, index first.
class ReturnVector {
 public:
  explicit ReturnVector(MoveStorage returns);
  explicit ReturnVector(std::span<const double> returns)
      : ReturnVector(MoveStorage(returns.begin(), returns.end())) {}
  explicit ReturnVector(const std::vector<double>& returns)
      : ReturnVector(std::span<const double>(returns)) {}
  ReturnVector(std::initializer_list<double> returns) : ReturnVector(MoveStorage(returns)) {}

  std::size_t size() const noexcept { return returns_.size(); }
  double operator[](std::size_t k) const { return returns_[k]; }
  double index() const { return returns_.front(); }
  std::span<const double> values() const noexcept { return {returns_.data(), returns_.size()}; }

  friend bool operator==(const ReturnVector& a, const ReturnVector& b) {
    return a.returns_ == b.returns_;
  }

 private:
  MoveStorage returns_;
};

// Capital fractions over the K + 1 securities; negative entries are shorts.
// Construction rejects sums further than kWeightSumTolerance from one and
// divides the remainder by the actual sum.
class Weights {
 public:
  explicit Weights(MoveStorage weights);
  explicit Weights(std::span<const double> weights)
      : Weights(MoveStorage(weights.begin(), weights.end())) {}
  explicit Weights(const std::vector<double>& weights)
      : Weights(std::span<const double>(weights)) {}
  Weights(std::initializer_list<double> weights) : Weights(MoveStorage(weights)) {}

  // All capital in security k.
  static Weights unit(std::size_t width, std::size_t k);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t k) const { return weights_[k]; }
  std::span<const double> values() const noexcept { return {weights_.data(), weights_.size()}; }

  // sum_k w^k x^k
  double simple_return(const ReturnVector& x) const;
  // sum_k w^k (1 + x^k)
  double gross_return(const ReturnVector& x) const;

  friend bool operator==(const Weights& a, const Weights& b) { return a.weights_ == b.weights_; }

 private:
  MoveStorage weights_;
};

}  // namespace capm
