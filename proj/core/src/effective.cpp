#include "hjlab/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjlab/corrector.hpp"
#include "hjlab/errors.hpp"
#include "hjlab/quadrature.hpp"

namespace hjlab {

namespace {

constexpr double kNestTol = 1e-12;

// slope d mu / d p of segment k -> k+1 on one side (p taken as |p|)
double segment_slope(const std::vector<EffectiveLevel>& lv, std::size_t k, Side side) {
  const auto P = [&](std::size_t i) { return side == Side::plus ? lv[i].p_plus : -lv[i].p_minus; };
  const double dp = P(k + 1) - P(k);
  return dp > 0.0 ? (lv[k + 1].mu - lv[k].mu) / dp : std::numeric_limits<double>::infinity();
}

}  // namespace

EffectiveHamiltonian::EffectiveHamiltonian(std::vector<EffectiveLevel> levels, double window,
                                           std::vector<std::uint64_t> seeds)
    : levels_(std::move(levels)), window_(window), seeds_(std::move(seeds)) {
  if (levels_.empty()) throw InvalidArgument("effective Hamiltonian needs at least one level");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const auto& l = levels_[k];
    if (!(l.p_minus <= kNestTol && l.p_plus >= -kNestTol))
      throw InvalidArgument("level interval at mu = " + std::to_string(l.mu) + " does not contain 0");
    if (k == 0) continue;
    const auto& prev = levels_[k - 1];
    if (!(l.mu > prev.mu)) throw InvalidArgument("effective levels must be strictly increasing in mu");
    if (l.p_plus < prev.p_plus - kNestTol || l.p_minus > prev.p_minus + kNestTol)
      throw InvalidArgument("effective level intervals are not nested at mu = " + std::to_string(l.mu) +
                            " (window too short?)");
  }
}

EffectiveHamiltonian EffectiveHamiltonian::absolute_value(double mu_max, int count) {
  std::vector<EffectiveLevel> lv;
  for (int k = 0; k < count; ++k) {
    const double mu = mu_max * k / (count - 1);
    lv.push_back({mu, -mu, mu});
  }
  return EffectiveHamiltonian(std::move(lv));
}

EffectiveHamiltonian EffectiveHamiltonian::from_core(const CoreHamiltonian& core, double scale, double span,
                                                     int count) {
  const double mu0 = scale * core.minimum();
  std::vector<double> mus;
  for (int k = 0; k < count; ++k) mus.push_back(mu0 + span * k / (count - 1));
  // the table is exact when every kink level is stored
  for (double p : core.knots()) {
    const double mu = scale * core(p);
    if (mu > mu0 && mu < mu0 + span) mus.push_back(mu);
  }
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
  std::vector<EffectiveLevel> lv;
  for (double mu : mus) lv.push_back({mu, core.branch(mu / scale, Side::minus), core.branch(mu / scale, Side::plus)});
  return EffectiveHamiltonian(std::move(lv));
}

double EffectiveHamiltonian::evaluate_side(double p, Side side) const {
  const auto& lv = levels_;
  const auto P = [&](std::size_t i) { return side == Side::plus ? lv[i].p_plus : -lv[i].p_minus; };
  const double a = std::abs(p);
  const std::size_t n = lv.size();
  if (a <= P(0)) return lv[0].mu;
  if (a >= P(n - 1)) {
    double s = 1.0;
    if (n >= 2) {
      s = segment_slope(lv, n - 2, side);
      if (!std::isfinite(s)) s = 1.0;
    }
    return lv[n - 1].mu + s * (a - P(n - 1));
  }
  // first level whose interval reaches past a
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (P(mid) <= a)
      lo = mid;
    else
      hi = mid;
  }
  const double t = (a - P(lo)) / (P(hi) - P(lo));
  return lv[lo].mu + t * (lv[hi].mu - lv[lo].mu);
}

double EffectiveHamiltonian::operator()(double p) const {
  return evaluate_side(p, p >= 0.0 ? Side::plus : Side::minus);
}

double EffectiveHamiltonian::level_set(double mu, Side side) const {
  const auto& lv = levels_;
  const auto P = [&](std::size_t i) { return side == Side::plus ? lv[i].p_plus : lv[i].p_minus; };
  const double mu0 = lv.front().mu;
  if (mu < mu0) {
    if (mu < mu0 - 1e-12 * std::max(1.0, std::abs(mu0)))
      throw LevelBelowMinimum("level " + std::to_string(mu) + " below min Hbar = " + std::to_string(mu0));
    return P(0);
  }
  const std::size_t n = lv.size();
  if (n == 1) return P(0) + (side == Side::plus ? 1.0 : -1.0) * (mu - mu0);
  if (mu >= lv[n - 1].mu) {
    double s = segment_slope(lv, n - 2, side);
    if (!std::isfinite(s) || s <= 0.0) s = 1.0;
    return P(n - 1) + (side == Side::plus ? 1.0 : -1.0) * (mu - lv[n - 1].mu) / s;
  }
  const auto it = std::upper_bound(lv.begin(), lv.end(), mu, [](double m, const EffectiveLevel& l) { return m < l.mu; });
  const std::size_t hi = static_cast<std::size_t>(it - lv.begin());
  const std::size_t lo = hi - 1;
  const double t = (mu - lv[lo].mu) / (lv[hi].mu - lv[lo].mu);
  return P(lo) + t * (P(hi) - P(lo));
}

double EffectiveHamiltonian::lipschitz() const {
  double lip = levels_.size() == 1 ? 1.0 : 0.0;
  for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
    for (Side side : {Side::plus, Side::minus}) {
      const double s = segment_slope(levels_, k, side);
      if (std::isfinite(s)) lip = std::max(lip, s);
    }
  }
  return lip;
}

double EffectiveHamiltonian::convexity_defect() const {
  const double lo = levels_.back().p_minus;
  const double hi = levels_.back().p_plus;
  constexpr int kSamples = 400;
  double defect = 0.0;
  const double h = (hi - lo) / kSamples;
  for (int i = 0; i + 2 <= kSamples; ++i) {
    const double a = lo + i * h;
    for (int w = 1; 2 * w + i <= kSamples; w *= 2) {
      const double b = a + 2 * w * h;
      defect = std::max(defect, (*this)(0.5 * (a + b)) - 0.5 * ((*this)(a) + (*this)(b)));
    }
  }
  return defect;
}

// ---------------------------------------------------------------------------

SlopePair homogenized_slopes(const AssembledHamiltonian& h, double mu, double t, const MetricOptions& opts) {
  const double mus[1] = {mu};
  return homogenized_slopes(h, mus, t, opts).front();
}

std::vector<SlopePair> homogenized_slopes(const AssembledHamiltonian& h, std::span<const double> mus, double t,
                                          const MetricOptions& opts) {
  if (!(t > 0.0)) throw InvalidArgument("homogenized slopes need a positive window t");
  const auto right = metric_values(h, mus, 0.0, t, opts);
  const auto left = metric_values(h, mus, 0.0, -t, opts);
  std::vector<SlopePair> out(mus.size());
  for (std::size_t k = 0; k < mus.size(); ++k) out[k] = {right[k] / t, -left[k] / t};
  return out;
}

double window_sup_at_zero(const AssembledHamiltonian& h, double a, double b) {
  const auto f = [&](double y) { return h.at_zero(y); };
  double best = std::max(f(a), f(b));
  double best_y = f(a) >= f(b) ? a : b;
  const auto consider = [&](double y) {
    const double v = f(y);
    if (v > best) {
      best = v;
      best_y = y;
    }
  };
  for (const auto& piece : smooth_pieces(h, a, b)) {
    consider(piece.lo);
    consider(piece.hi);
  }
  for (const auto& n : quadrature_nodes(h, a, b, 0.05)) consider(n.s);

  // golden-section polish around the best sample
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = std::max(a, best_y - 0.01);
  double hi = std::min(b, best_y + 0.01);
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({best, f1, f2});
}

std::vector<double> mu_ladder(double mu_star, double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo && count >= 2)) throw InvalidArgument("mu ladder needs 0 < lo < hi and count >= 2");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(mu_star + lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
  return out;
}

EffectiveHamiltonian build_effective(std::span<const AssembledHamiltonian> pieces,
                                     std::span<const std::uint64_t> seeds, const EffectiveOptions& opts) {
  if (pieces.empty() || pieces.size() != seeds.size())
    throw InvalidArgument("build_effective needs one stationary piece per seed");
  const double w = opts.window;
  std::vector<double> mus = opts.mu_levels;
  if (mus.empty()) {
    double mu_star = -std::numeric_limits<double>::infinity();
    for (const auto& h : pieces) mu_star = std::max(mu_star, window_sup_at_zero(h, -w, w));
    mus.push_back(mu_star + 1e-8);
    for (double mu : mu_ladder(mu_star)) mus.push_back(mu);
  }
  std::vector<double> sum_plus(mus.size(), 0.0), sum_minus(mus.size(), 0.0);
  for (const auto& h : pieces) {
    const auto slopes = homogenized_slopes(h, mus, w, opts.metric);
    for (std::size_t k = 0; k < mus.size(); ++k) {
      sum_plus[k] += slopes[k].p_plus;
      sum_minus[k] += slopes[k].p_minus;
    }
  }
  std::vector<EffectiveLevel> lv;
  const double n = static_cast<double>(pieces.size());
  for (std::size_t k = 0; k < mus.size(); ++k) lv.push_back({mus[k], sum_minus[k] / n, sum_plus[k] / n});
  return EffectiveHamiltonian(std::move(lv), w, std::vector<std::uint64_t>(seeds.begin(), seeds.end()));
}

EffectiveHamiltonian build_effective(const EnvironmentSpec& spec, PieceRole role,
                                     std::span<const std::uint64_t> seeds, const EffectiveOptions& opts) {
  spec.validate();
  std::vector<AssembledHamiltonian> pieces;
  for (std::uint64_t seed : seeds) {
    if (role == PieceRole::middle)
      pieces.push_back(AssembledHamiltonian::stationary(spec.piece(PieceRole::left, seed), spec.middle_scale));
    else
      pieces.push_back(AssembledHamiltonian::stationary(spec.piece(role, seed)));
  }
  return build_effective(pieces, seeds, opts);
}

double mu_star(const AssembledHamiltonian& stationary, MuStarMethod method, const MuStarOptions& opts) {
  if (method == MuStarMethod::sup_window) return window_sup_at_zero(stationary, -opts.window, opts.window);
  CorrectorOptions co;
  co.delta = opts.delta;
  co.half_width = opts.corrector_radius / opts.delta;
  co.dx = opts.corrector_dx;
  const CorrectorResult res = corrector_solve(stationary, co);
  return -opts.delta * res.value_at(0.0);
}

double effective_limiter(JunctionMode regime, double mu_star_left, double mu_star_right, double mu_star_middle) {
  switch (regime) {
    case JunctionMode::none:
      return mu_star_left;
    case JunctionMode::wfl:
      return std::max(mu_star_left, mu_star_right);
    case JunctionMode::eps:
      return mu_star_middle;
    case JunctionMode::fixed_bump:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FluxLimiterSample flux_limiter_sample(const EnvironmentSpec& spec, std::uint64_t seed, double window) {
  const AssembledHamiltonian h = spec.build(seed);
  FluxLimiterSample s{};
  s.a_tilde = window_sup_at_zero(h, -window, window);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  s.mu_star_left = nan;
  s.mu_star_right = nan;
  s.mu_star_middle = nan;
  if (h.mode() == JunctionMode::fixed_bump) return s;
  s.mu_star_left = window_sup_at_zero(h.stationary_piece(PieceRole::left), -window, window);
  s.mu_star_right = window_sup_at_zero(h.stationary_piece(PieceRole::right), -window, window);
  s.mu_star_middle = window_sup_at_zero(h.stationary_piece(PieceRole::middle), -window, window);
  return s;
}

FluxLimiterEstimate flux_limiter(const EnvironmentSpec& spec, double window, std::span<const std::uint64_t> seeds,
                                 double tolerance) {
  FluxLimiterEstimate est{spec.mode, spec.epsilon, window, {seeds.begin(), seeds.end()}, {}, {}, {}, {}, 0.0, 0.0,
                          tolerance};
  double ml = -std::numeric_limits<double>::infinity();
  double mr = ml, mm = ml;
  for (std::uint64_t seed : seeds) {
    const auto s = flux_limiter_sample(spec, seed, window);
    est.empirical.push_back(s.a_tilde);
    est.mu_star_left.push_back(s.mu_star_left);
    est.mu_star_right.push_back(s.mu_star_right);
    est.mu_star_middle.push_back(s.mu_star_middle);
    ml = std::max(ml, s.mu_star_left);
    mr = std::max(mr, s.mu_star_right);
    mm = std::max(mm, s.mu_star_middle);
  }
  est.effective = effective_limiter(spec.mode, ml, mr, mm);
  if (std::isnan(est.effective) || est.empirical.empty()) {
    est.failure_rate = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  std::size_t fails = 0;
  for (double a : est.empirical)
    if (std::abs(a - est.effective) > tolerance * std::abs(est.effective)) ++fails;
  est.failure_rate = static_cast<double>(fails) / static_cast<double>(est.empirical.size());
  return est;
}

}  // namespace hjlab
