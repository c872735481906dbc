#include "capm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capm/bounds.hpp"
#include "capm/errors.hpp"

namespace capm {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
  add(other.sum_);
  compensation_ += other.compensation_;
}

double cubic_ratio(double x) noexcept {
  const double base = 1.0 + x;
  if (!(base > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(x) / (base * base * base);
}

MomentAccumulator::MomentAccumulator(double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("moment accumulator needs a positive dt");
  }
}

void MomentAccumulator::update(double s, double m) {
  if (!(s > -1.0) || !std::isfinite(s)) {
    throw DomainError("investor return " + std::to_string(s) + " outside (-1, inf)");
  }
  if (!(m > -1.0) || !std::isfinite(m)) {
    throw DomainError("index return " + std::to_string(m) + " outside (-1, inf)");
  }
  const double diff = s - m;
  const double two_m_s = 2.0 * m - s;

  sum_s_.add(s);
  sum_m_.add(m);
  sum_s2_.add(s * s);
  sum_m2_.add(m * m);
  sum_sm_.add(s * m);
  sum_diff2_.add(diff * diff);
  sum_2ms2_.add(two_m_s * two_m_s);
  sum_log_s_.add(std::log1p(s));
  sum_log_m_.add(std::log1p(m));
  sum_gamma_abs_s_.add(std::abs(remainder_lower(s)));
  sum_gamma_abs_m_.add(std::abs(remainder_lower(m)));
  sum_big_gamma_s_.add(remainder_upper(s));
  sum_big_gamma_m_.add(remainder_upper(m));

  max_abs_s_ = std::max(max_abs_s_, std::abs(s));
  max_abs_m_ = std::max(max_abs_m_, std::abs(m));
  max_s_ratio_ = std::max(max_s_ratio_, cubic_ratio(s));
  max_m_ratio_ = std::max(max_m_ratio_, cubic_ratio(m));
  max_2ms_ratio_ = std::max(max_2ms_ratio_, cubic_ratio(two_m_s));
  ++n_;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.dt_ != dt_) {
    throw ConfigError("cannot merge accumulators with different dt");
  }
  n_ += other.n_;
  sum_s_.merge(other.sum_s_);
  sum_m_.merge(other.sum_m_);
  sum_s2_.merge(other.sum_s2_);
  sum_m2_.merge(other.sum_m2_);
  sum_sm_.merge(other.sum_sm_);
  sum_diff2_.merge(other.sum_diff2_);
  sum_2ms2_.merge(other.sum_2ms2_);
  sum_log_s_.merge(other.sum_log_s_);
  sum_log_m_.merge(other.sum_log_m_);
  sum_gamma_abs_s_.merge(other.sum_gamma_abs_s_);
  sum_gamma_abs_m_.merge(other.sum_gamma_abs_m_);
  sum_big_gamma_s_.merge(other.sum_big_gamma_s_);
  sum_big_gamma_m_.merge(other.sum_big_gamma_m_);
  max_abs_s_ = std::max(max_abs_s_, other.max_abs_s_);
  max_abs_m_ = std::max(max_abs_m_, other.max_abs_m_);
  max_s_ratio_ = std::max(max_s_ratio_, other.max_s_ratio_);
  max_m_ratio_ = std::max(max_m_ratio_, other.max_m_ratio_);
  max_2ms_ratio_ = std::max(max_2ms_ratio_, other.max_2ms_ratio_);
}

MomentAccumulator merge(MomentAccumulator a, const MomentAccumulator& b) {
  a.merge(b);
  return a;
}

MomentSummary MomentAccumulator::summarize() const {
  if (n_ == 0) {
    throw ConfigError("cannot summarize an empty accumulator");
  }
  MomentSummary out;
  out.rounds = n_;
  out.horizon = static_cast<double>(n_) * dt_;
  const double t = out.horizon;
  out.mu_s = sum_s() / t;
  out.mu_m = sum_m() / t;
  out.sigma_s_sq = sum_s2() / t;
  out.sigma_m_sq = sum_m2() / t;
  out.sigma_sm = sum_sm() / t;
  out.sigma_diff_sq = sum_diff2() / t;
  out.sigma_2ms_sq = sum_2ms2() / t;
  out.lambda_s = sum_log_s() / t;
  out.lambda_m = sum_log_m() / t;
  out.gamma_abs_s = sum_gamma_abs_s() / t;
  out.gamma_abs_m = sum_gamma_abs_m() / t;
  out.big_gamma_s = sum_big_gamma_s() / t;
  out.big_gamma_m = sum_big_gamma_m() / t;
  out.max_abs_s = max_abs_s_;
  out.max_abs_m = max_abs_m_;
  out.max_s_ratio = max_s_ratio_;
  out.max_m_ratio = max_m_ratio_;
  out.max_2ms_ratio = max_2ms_ratio_;
  return out;
}

double capm_residual(const MomentSummary& sum) noexcept {
  return sum.mu_s - sum.mu_m + sum.sigma_m_sq - sum.sigma_sm;
}

double deficit_residual(const MomentSummary& sum) noexcept {
  return sum.lambda_s - sum.lambda_m + 0.5 * sum.sigma_diff_sq;
}

}  // namespace capm
