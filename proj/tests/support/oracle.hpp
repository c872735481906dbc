#pragma once

// Brute-force reference formulas for the path statistics, evaluated in
// long double straight from the definitions. Shares no code with the
// library's streaming accumulator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace capm::testing {

struct OracleStats {
  long double mu_s = 0, mu_m = 0;
  long double sigma_s_sq = 0, sigma_m_sq = 0, sigma_sm = 0, sigma_diff_sq = 0;
  long double sigma_2ms_sq = 0;
  long double lambda_s = 0, lambda_m = 0;
  long double max_abs_s = 0, max_abs_m = 0;
};

inline OracleStats oracle_stats(const std::vector<double>& s, const std::vector<double>& m,
                                double dt) {
  OracleStats o;
  const long double t = static_cast<long double>(s.size()) * dt;
  for (std::size_t n = 0; n < s.size(); ++n) {
    const long double a = s[n];
    const long double b = m[n];
    o.mu_s += a;
    o.mu_m += b;
    o.sigma_s_sq += a * a;
    o.sigma_m_sq += b * b;
    o.sigma_sm += a * b;
    o.sigma_diff_sq += (a - b) * (a - b);
    o.sigma_2ms_sq += (2 * b - a) * (2 * b - a);
    o.lambda_s += std::log1p(a);
    o.lambda_m += std::log1p(b);
    o.max_abs_s = std::max(o.max_abs_s, std::fabs(a));
    o.max_abs_m = std::max(o.max_abs_m, std::fabs(b));
  }
  o.mu_s /= t;
  o.mu_m /= t;
  o.sigma_s_sq /= t;
  o.sigma_m_sq /= t;
  o.sigma_sm /= t;
  o.sigma_diff_sq /= t;
  o.sigma_2ms_sq /= t;
  o.lambda_s /= t;
  o.lambda_m /= t;
  return o;
}

// prod_n sum_k w_n^k (1 + x_n^k)
inline long double capital_product(const std::vector<std::vector<double>>& weights,
                                   const std::vector<std::vector<double>>& returns) {
  long double c = 1;
  for (std::size_t n = 0; n < returns.size(); ++n) {
    long double gross = 0;
    for (std::size_t k = 0; k < returns[n].size(); ++k) {
      gross += static_cast<long double>(weights[n][k]) * (1 + static_cast<long double>(returns[n][k]));
    }
    c *= gross;
  }
  return c;
}

inline bool close_rel(long double a, long double b, long double tol) {
  const long double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= tol * std::max(scale, static_cast<long double>(1e-300));
}

// Random valid allocation of the given width summing to one; entries may be
// negative down to -short_limit.
inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t width,
                                          double short_limit = 0.5) {
  std::uniform_real_distribution<double> u(-short_limit, 1.0);
  std::vector<double> w(width);
  double total = 0;
  for (std::size_t k = 0; k + 1 < width; ++k) {
    w[k] = u(rng);
    total += w[k];
  }
  w[width - 1] = 1.0 - total;
  return w;
}

}  // namespace capm::testing
