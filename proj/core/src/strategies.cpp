#include "capm/strategies.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "capm/errors.hpp"

namespace capm {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_weights(const Weights& w) {
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += ',';
    out += format_number(w[k]);
  }
  return out;
}

class HoldIndexInvestor final : public Investor {
 public:
  Weights move(const GameState& state) override {
    return Weights::unit(state.config().width(), 0);
  }
};

class FixedInvestor final : public Investor {
 public:
  explicit FixedInvestor(Weights w) : w_(std::move(w)) {}
  Weights move(const GameState&) override { return w_; }

 private:
  Weights w_;
};

class BuyAndHoldInvestor final : public Investor {
 public:
  explicit BuyAndHoldInvestor(Weights initial) : initial_(std::move(initial)) {}

  Weights move(const GameState& state) override {
    const History& h = state.history();
    if (h.empty()) return initial_;
    const auto g = h.investor_move(h.size() - 1);
    const auto x = h.market_move(h.size() - 1);
    MoveStorage next(g.size());
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      next[k] = g[k] * (1.0 + x[k]);
      total += next[k];
    }
    for (double& w : next) w /= total;
    return Weights(std::move(next));
  }

 private:
  Weights initial_;
};

class ScheduleInvestor final : public Investor {
 public:
  explicit ScheduleInvestor(std::vector<Weights> moves) : moves_(std::move(moves)) {}

  Weights move(const GameState& state) override {
    if (state.round() >= moves_.size()) {
      throw ProtocolError("investor schedule exhausted at round " +
                          std::to_string(state.round() + 1));
    }
    return moves_[state.round()];
  }

 private:
  std::vector<Weights> moves_;
};

class HoldIndexSpeculator final : public Speculator {
 public:
  Weights move(const GameState& state, const Weights&) override {
    return Weights::unit(state.config().width(), 0);
  }
};

class BlendSpeculator final : public Speculator {
 public:
  explicit BlendSpeculator(double epsilon) : epsilon_(epsilon) {}
  Weights move(const GameState&, const Weights& g) override { return blend_move(epsilon_, g); }

 private:
  double epsilon_;
};

class ShortBlendSpeculator final : public Speculator {
 public:
  explicit ShortBlendSpeculator(double epsilon) : epsilon_(epsilon) {}
  Weights move(const GameState&, const Weights& g) override {
    return short_blend_move(epsilon_, g);
  }

 private:
  double epsilon_;
};

void check_blend_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("blend epsilon must lie in (0, 1), got " + format_number(epsilon));
  }
}

void check_short_blend_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
    throw ConfigError("short-blend epsilon must lie in (0, 1/3), got " + format_number(epsilon));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

InvestorPolicy InvestorPolicy::hold_index() { return {}; }

InvestorPolicy InvestorPolicy::fixed(Weights w) {
  InvestorPolicy p;
  p.kind = Kind::kFixedWeights;
  p.weights.push_back(std::move(w));
  return p;
}

InvestorPolicy InvestorPolicy::buy_and_hold(Weights initial) {
  InvestorPolicy p;
  p.kind = Kind::kBuyAndHold;
  p.weights.push_back(std::move(initial));
  return p;
}

InvestorPolicy InvestorPolicy::schedule(std::vector<Weights> moves) {
  if (moves.empty()) throw ConfigError("investor schedule is empty");
  InvestorPolicy p;
  p.kind = Kind::kCustomSchedule;
  p.weights = std::move(moves);
  return p;
}

std::string InvestorPolicy::label() const {
  switch (kind) {
    case Kind::kHoldIndex:
      return "hold-index";
    case Kind::kFixedWeights:
      return "fixed:" + format_weights(weights.front());
    case Kind::kBuyAndHold:
      return "buy-and-hold:" + format_weights(weights.front());
    case Kind::kCustomSchedule:
      return "schedule[" + std::to_string(weights.size()) + "]";
  }
  return "unknown";
}

std::unique_ptr<Investor> make_investor(const InvestorPolicy& policy) {
  switch (policy.kind) {
    case InvestorPolicy::Kind::kHoldIndex:
      return std::make_unique<HoldIndexInvestor>();
    case InvestorPolicy::Kind::kFixedWeights:
      return std::make_unique<FixedInvestor>(policy.weights.front());
    case InvestorPolicy::Kind::kBuyAndHold:
      return std::make_unique<BuyAndHoldInvestor>(policy.weights.front());
    case InvestorPolicy::Kind::kCustomSchedule:
      return std::make_unique<ScheduleInvestor>(policy.weights);
  }
  throw ConfigError("unknown investor policy");
}

// ---------------------------------------------------------------------------

SpeculatorPolicy SpeculatorPolicy::hold_index() { return {}; }

SpeculatorPolicy SpeculatorPolicy::blend(double epsilon) {
  check_blend_epsilon(epsilon);
  SpeculatorPolicy p;
  p.kind = Kind::kBlend;
  p.epsilon = epsilon;
  return p;
}

SpeculatorPolicy SpeculatorPolicy::short_blend(double epsilon) {
  check_short_blend_epsilon(epsilon);
  SpeculatorPolicy p;
  p.kind = Kind::kShortBlend;
  p.epsilon = epsilon;
  return p;
}

SpeculatorPolicy SpeculatorPolicy::split(std::vector<SplitChild> children) {
  if (children.empty()) throw ConfigError("split needs at least one child");
  double total = 0.0;
  for (const auto& c : children) {
    if (!(c.weight > 0.0)) throw ConfigError("split weights must be positive");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw ConfigError("split weights sum to " + format_number(total) + ", expected 1");
  }
  SpeculatorPolicy p;
  p.kind = Kind::kSplit;
  p.children = std::move(children);
  return p;
}

std::string SpeculatorPolicy::label() const {
  switch (kind) {
    case Kind::kHoldIndex:
      return "hold-index";
    case Kind::kBlend:
      return "blend(" + format_number(epsilon) + ")";
    case Kind::kShortBlend:
      return "short-blend(" + format_number(epsilon) + ")";
    case Kind::kSplit: {
      std::string out = "split[";
      for (std::size_t j = 0; j < children.size(); ++j) {
        if (j) out += ", ";
        out += format_number(children[j].weight) + "*" + children[j].policy.label();
      }
      return out + "]";
    }
  }
  return "unknown";
}

bool operator==(const SpeculatorPolicy& a, const SpeculatorPolicy& b) {
  return a.kind == b.kind && a.epsilon == b.epsilon && a.children == b.children;
}

Weights blend_move(double epsilon, const Weights& g) {
  check_blend_epsilon(epsilon);
  MoveStorage h(g.values().begin(), g.values().end());
  for (double& w : h) w *= epsilon;
  h[0] += 1.0 - epsilon;
  return Weights(std::move(h));
}

Weights short_blend_move(double epsilon, const Weights& g) {
  check_short_blend_epsilon(epsilon);
  MoveStorage h(g.values().begin(), g.values().end());
  for (double& w : h) w *= -epsilon;
  h[0] += 1.0 + epsilon;
  return Weights(std::move(h));
}

SplitSpeculator::SplitSpeculator(const std::vector<SplitChild>& children) {
  children_.reserve(children.size());
  for (const auto& c : children) {
    children_.push_back(make_speculator(c.policy));
    capital_.push_back(c.weight);
  }
  last_moves_.reserve(children.size());
}

Weights SplitSpeculator::move(const GameState& state, const Weights& g) {
  last_moves_.clear();
  const std::size_t width = state.config().width();
  MoveStorage mix(width, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < children_.size(); ++j) {
    last_moves_.push_back(children_[j]->move(state, g));
    total += capital_[j];
  }
  if (total > 0.0) {
    for (std::size_t j = 0; j < children_.size(); ++j) {
      const double share = capital_[j] / total;
      const auto h = last_moves_[j].values();
      for (std::size_t k = 0; k < width; ++k) mix[k] += share * h[k];
    }
  } else {
    mix[0] = 1.0;  // every account is empty; any allocation leaves it at zero
  }
  return Weights(std::move(mix));
}

void SplitSpeculator::settle(const ReturnVector& x) {
  for (std::size_t j = 0; j < children_.size(); ++j) {
    capital_[j] *= last_moves_[j].gross_return(x);
    children_[j]->settle(x);
  }
}

std::unique_ptr<Speculator> make_speculator(const SpeculatorPolicy& policy) {
  switch (policy.kind) {
    case SpeculatorPolicy::Kind::kHoldIndex:
      return std::make_unique<HoldIndexSpeculator>();
    case SpeculatorPolicy::Kind::kBlend:
      return std::make_unique<BlendSpeculator>(policy.epsilon);
    case SpeculatorPolicy::Kind::kShortBlend:
      return std::make_unique<ShortBlendSpeculator>(policy.epsilon);
    case SpeculatorPolicy::Kind::kSplit:
      return std::make_unique<SplitSpeculator>(policy.children);
  }
  throw ConfigError("unknown speculator policy");
}

// ---------------------------------------------------------------------------

GbmParams GbmParams::uniform(std::size_t width, double mu, double sigma) {
  GbmParams p;
  p.mu.assign(width, mu);
  p.sigma.assign(width, sigma);
  p.correlation.assign(width, std::vector<double>(width, 0.0));
  for (std::size_t k = 0; k < width; ++k) p.correlation[k][k] = 1.0;
  return p;
}

MarketModel MarketModel::gbm_model(GbmParams params, std::uint64_t seed) {
  MarketModel m;
  m.kind = Kind::kGbm;
  m.gbm = std::move(params);
  m.seed = seed;
  return m;
}

MarketModel MarketModel::deterministic(std::vector<ReturnVector> path) {
  MarketModel m;
  m.kind = Kind::kDeterministic;
  m.path = std::move(path);
  return m;
}

MarketModel MarketModel::adversarial(AdversarialRule rule, double magnitude) {
  if (!(magnitude >= 0.0 && magnitude < 1.0)) {
    throw ConfigError("adversarial magnitude must lie in [0, 1)");
  }
  MarketModel m;
  m.kind = Kind::kAdversarial;
  m.rule = rule;
  m.magnitude = magnitude;
  return m;
}

std::vector<double> correlation_factor(const std::vector<std::vector<double>>& correlation) {
  const std::size_t n = correlation.size();
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (correlation[i].size() != n) throw ConfigError("correlation matrix is not square");
    for (std::size_t j = 0; j < n; ++j) c(i, j) = correlation[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(c(i, i) - 1.0) > 1e-12) throw ConfigError("correlation diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(c(i, j) - c(j, i)) > 1e-12) throw ConfigError("correlation is not symmetric");
      if (std::abs(c(i, j)) > 1.0) throw ConfigError("correlation entry outside [-1, 1]");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  Eigen::MatrixXd f;
  if (llt.info() == Eigen::Success) {
    f = llt.matrixL();
  } else {
    // Singular but possibly semidefinite: use the eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-10) throw ConfigError("correlation is not positive semidefinite");
    f = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = f(i, j);
  return out;
}

GbmGenerator::GbmGenerator(const GbmParams& params, double dt, std::uint64_t seed)
    : rng_(seed), normal_(0.0, 1.0) {
  const std::size_t n = params.mu.size();
  if (n == 0) throw ConfigError("GBM needs at least one security");
  if (params.sigma.size() != n || params.correlation.size() != n) {
    throw ConfigError("GBM mu, sigma and correlation sizes differ");
  }
  if (!(dt > 0.0)) throw ConfigError("GBM dt must be positive");
  factor_ = correlation_factor(params.correlation);
  mu_dt_.resize(n);
  sigma_sqrt_dt_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(params.sigma[k] >= 0.0)) throw ConfigError("GBM sigma must be nonnegative");
    mu_dt_[k] = params.mu[k] * dt;
    sigma_sqrt_dt_[k] = params.sigma[k] * std::sqrt(dt);
  }
  iid_.resize(n);
}

ReturnVector GbmGenerator::next() {
  for (double& z : iid_) z = normal_(rng_);
  return from_normals(iid_);
}

ReturnVector GbmGenerator::from_normals(std::span<const double> iid) {
  const std::size_t n = mu_dt_.size();
  if (iid.size() != n) throw DomainError("normal vector width mismatch");
  MoveStorage x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += factor_[i * n + j] * iid[j];
    double r = mu_dt_[i] + sigma_sqrt_dt_[i] * z;
    if (r <= kReturnFloor) {
      r = kReturnFloor;
      ++clamps_;
    }
    x[i] = r;
  }
  return ReturnVector(std::move(x));
}

ReturnVector ReplayMarket::move(const GameState& state, const Weights&,
                                std::span<const Weights>) {
  if (next_ >= path_.size()) {
    throw ProtocolError("replay path exhausted at round " + std::to_string(state.round() + 1));
  }
  return path_[next_++];
}

AdversarialMarket::AdversarialMarket(AdversarialRule rule, double magnitude)
    : rule_(rule), magnitude_(magnitude) {
  if (!(magnitude >= 0.0 && magnitude < 1.0)) {
    throw ConfigError("adversarial magnitude must lie in [0, 1)");
  }
}

ReturnVector AdversarialMarket::move(const GameState& state, const Weights&,
                                     std::span<const Weights> h) {
  const std::size_t width = state.config().width();
  const double c = magnitude_;
  const double index = (state.round() % 2 == 0) ? c : -c;
  MoveStorage x(width);
  x[0] = index;
  for (std::size_t k = 1; k < width; ++k) {
    if (rule_ == AdversarialRule::kContrarian && !h.empty()) {
      x[k] = h.front()[k] > 0.0 ? -c : c;
    } else {
      x[k] = (k % 2 == 1) ? -index : index;
    }
  }
  return ReturnVector(std::move(x));
}

std::unique_ptr<Market> make_market(const MarketModel& model, const GameConfig& config) {
  switch (model.kind) {
    case MarketModel::Kind::kGbm:
      if (model.gbm.width() != config.width()) {
        throw ConfigError("GBM model width does not match K + 1");
      }
      return std::make_unique<GbmMarket>(model.gbm, config.dt(), model.seed);
    case MarketModel::Kind::kDeterministic:
      return std::make_unique<ReplayMarket>(model.path);
    case MarketModel::Kind::kAdversarial:
      return std::make_unique<AdversarialMarket>(model.rule, model.magnitude);
  }
  throw ConfigError("unknown market model");
}

std::size_t clamp_count(const Market& market) noexcept {
  if (const auto* gbm = dynamic_cast<const GbmMarket*>(&market)) return gbm->clamp_count();
  return 0;
}

std::vector<std::vector<ReturnVector>> matched_gbm_paths(const GbmParams& params, double horizon,
                                                         const std::vector<double>& dts,
                                                         std::uint64_t seed) {
  if (dts.empty()) throw ConfigError("need at least one dt");
  const double finest = *std::min_element(dts.begin(), dts.end());
  if (!(finest > 0.0)) throw ConfigError("dt values must be positive");
  const auto as_count = [](double ratio, const char* what) {
    const double r = std::round(ratio);
    if (r < 1.0 || std::abs(ratio - r) > 1e-9 * r) {
      throw ConfigError(std::string(what) + " is not an integer multiple");
    }
    return static_cast<std::size_t>(r);
  };
  const std::size_t fine_steps = as_count(horizon / finest, "horizon / finest dt");
  const std::size_t width = params.width();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> fine(fine_steps * width);
  for (double& z : fine) z = normal(rng);

  std::vector<std::vector<ReturnVector>> out;
  out.reserve(dts.size());
  for (double dt : dts) {
    const std::size_t block = as_count(dt / finest, "dt / finest dt");
    if (fine_steps % block != 0) throw ConfigError("dt does not divide the horizon");
    GbmGenerator gen(params, dt, 0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(block));
    std::vector<double> iid(width);
    std::vector<ReturnVector> path;
    path.reserve(fine_steps / block);
    for (std::size_t start = 0; start < fine_steps; start += block) {
      std::fill(iid.begin(), iid.end(), 0.0);
      for (std::size_t b = 0; b < block; ++b)
        for (std::size_t k = 0; k < width; ++k) iid[k] += fine[(start + b) * width + k];
      for (double& z : iid) z *= scale;
      path.push_back(gen.from_normals(iid));
    }
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace capm
