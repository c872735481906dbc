#include "capm/types.hpp"

#include <cmath>
#include <string>

#include "capm/errors.hpp"

namespace capm {

GameConfig::GameConfig(std::size_t num_securities, std::size_t num_rounds, double dt)
    : num_securities_(num_securities), num_rounds_(num_rounds), dt_(dt) {
  if (num_securities_ < 1) {
    throw ConfigError("game needs at least one non-index security (K >= 1)");
  }
  if (num_rounds_ < 1) {
    throw ConfigError("game needs at least one round (N >= 1)");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw ConfigError("round duration dt must be positive and finite");
  }
}

ReturnVector::ReturnVector(MoveStorage returns) : returns_(std::move(returns)) {
  if (returns_.empty()) {
    throw DomainError("return vector is empty");
  }
  for (std::size_t k = 0; k < returns_.size(); ++k) {
    const double x = returns_[k];
    if (!std::isfinite(x)) {
      throw DomainError("return for security " + std::to_string(k) + " is not finite");
    }
    if (x <= -1.0) {
      throw DomainError("return for security " + std::to_string(k) + " is " +
                        std::to_string(x) + ", must exceed -1");
    }
  }
}

Weights::Weights(MoveStorage weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw DomainError("weight vector is empty");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw DomainError("weight is not finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw DomainError("weights sum to " + std::to_string(total) + ", expected 1");
  }
  if (total != 1.0) {
    for (double& w : weights_) w /= total;
  }
}

Weights Weights::unit(std::size_t width, std::size_t k) {
  if (k >= width) {
    throw DomainError("unit weight index out of range");
  }
  MoveStorage w(width, 0.0);
  w[k] = 1.0;
  return Weights(std::move(w));
}

double Weights::simple_return(const ReturnVector& x) const {
  if (x.size() != weights_.size()) {
    throw DomainError("weights and returns have different widths");
  }
  double r = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) r += weights_[k] * x[k];
  return r;
}

double Weights::gross_return(const ReturnVector& x) const {
  if (x.size() != weights_.size()) {
    throw DomainError("weights and returns have different widths");
  }
  double r = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) r += weights_[k] * (1.0 + x[k]);
  return r;
}

}  // namespace capm
