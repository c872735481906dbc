#pragma once

#include <cstddef>

namespace capm {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  void merge(const CompensatedSum& other) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Per-unit-time statistics of one play. All second moments are uncentered.
struct MomentSummary {
  std::size_t rounds = 0;
  double horizon = 0.0;  // T = rounds * dt

  double mu_s = 0.0;
  double mu_m = 0.0;
  double sigma_s_sq = 0.0;
  double sigma_m_sq = 0.0;
  double sigma_sm = 0.0;
  double sigma_diff_sq = 0.0;  // (1/T) sum (s - m)^2
  double sigma_2ms_sq = 0.0;   // (1/T) sum (2m - s)^2
  double lambda_s = 0.0;
  double lambda_m = 0.0;

  // (1/T) sums of the cubic remainder envelopes.
  double gamma_abs_s = 0.0;  // |γ(s_n)|
  double gamma_abs_m = 0.0;  // |γ(m_n)|
  double big_gamma_s = 0.0;  // Γ(s_n), signed
  double big_gamma_m = 0.0;  // Γ(m_n), signed

  double max_abs_s = 0.0;
  double max_abs_m = 0.0;
  double max_s_ratio = 0.0;    // max |s| / |1+s|^3
  double max_m_ratio = 0.0;    // max |m| / |1+m|^3
  double max_2ms_ratio = 0.0;  // max |2m-s| / |1+2m-s|^3, +inf once 2m-s <= -1
};

// Streaming sums over (s_n, m_n). Stores raw sums so that merge() is exact
// up to the compensated-sum representation.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(double dt);

  // Throws DomainError if s <= -1 or m <= -1.
  void update(double s, double m);

  // Throws ConfigError on mismatched dt.
  void merge(const MomentAccumulator& other);

  // Throws ConfigError when no round has been recorded.
  MomentSummary summarize() const;

  std::size_t rounds() const noexcept { return n_; }
  double dt() const noexcept { return dt_; }

  double sum_s() const noexcept { return sum_s_.value(); }
  double sum_m() const noexcept { return sum_m_.value(); }
  double sum_s2() const noexcept { return sum_s2_.value(); }
  double sum_m2() const noexcept { return sum_m2_.value(); }
  double sum_sm() const noexcept { return sum_sm_.value(); }
  double sum_diff2() const noexcept { return sum_diff2_.value(); }
  double sum_2ms2() const noexcept { return sum_2ms2_.value(); }
  double sum_log_s() const noexcept { return sum_log_s_.value(); }
  double sum_log_m() const noexcept { return sum_log_m_.value(); }
  double sum_gamma_abs_s() const noexcept { return sum_gamma_abs_s_.value(); }
  double sum_gamma_abs_m() const noexcept { return sum_gamma_abs_m_.value(); }
  double sum_big_gamma_s() const noexcept { return sum_big_gamma_s_.value(); }
  double sum_big_gamma_m() const noexcept { return sum_big_gamma_m_.value(); }
  double max_abs_s() const noexcept { return max_abs_s_; }
  double max_abs_m() const noexcept { return max_abs_m_; }
  double max_s_ratio() const noexcept { return max_s_ratio_; }
  double max_m_ratio() const noexcept { return max_m_ratio_; }
  double max_2ms_ratio() const noexcept { return max_2ms_ratio_; }

 private:
  std::size_t n_ = 0;
  double dt_;
  CompensatedSum sum_s_, sum_m_;
  CompensatedSum sum_s2_, sum_m2_, sum_sm_;
  CompensatedSum sum_diff2_, sum_2ms2_;
  CompensatedSum sum_log_s_, sum_log_m_;
  CompensatedSum sum_gamma_abs_s_, sum_gamma_abs_m_;
  CompensatedSum sum_big_gamma_s_, sum_big_gamma_m_;
  double max_abs_s_ = 0.0;
  double max_abs_m_ = 0.0;
  double max_s_ratio_ = 0.0;
  double max_m_ratio_ = 0.0;
  double max_2ms_ratio_ = 0.0;
};

MomentAccumulator merge(MomentAccumulator a, const MomentAccumulator& b);

// |x| / |1+x|^3, or +inf when 1+x <= 0.
double cubic_ratio(double x) noexcept;

// μ_s − μ_m + σ_m² − σ_sm
double capm_residual(const MomentSummary& sum) noexcept;

// λ_s − λ_m + σ²_{s−m} / 2
double deficit_residual(const MomentSummary& sum) noexcept;

}  // namespace capm
