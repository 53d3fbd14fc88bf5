#include "hjlab/core_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjlab/errors.hpp"

namespace hjlab {

VelocityCurve::VelocityCurve(std::vector<std::pair<double, double>> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2)
    throw InvalidArgument("velocity curve needs at least two breakpoints");
  if (!(breakpoints_.front().first > 0.0) || breakpoints_.front().second != 0.0)
    throw InvalidArgument("velocity curve must start at (h0, 0) with h0 > 0");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i].first > breakpoints_[i - 1].first))
      throw InvalidArgument("velocity curve headways must be strictly increasing");
    if (breakpoints_[i].second < breakpoints_[i - 1].second)
      throw InvalidArgument("velocity curve must be non-decreasing");
  }
  if (!(vmax() > 0.0)) throw InvalidArgument("velocity curve needs vmax > 0");

  // p V(-1/p) on [-1/h0, 0): grid scan, then polish over the kinks, where the
  // minimum of a piecewise-linear-in-p function is attained
  const auto f = [this](double p) { return p * (*this)(-1.0 / p); };
  const double lo = -1.0 / h0();
  constexpr int kGrid = 4096;
  std::vector<double> grid(kGrid);
  std::vector<double> values(kGrid);
  std::size_t best = 0;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = lo * (1.0 - static_cast<double>(i) / kGrid);
    values[i] = f(grid[i]);
    if (values[i] < values[best]) best = i;
  }
  double p_best = grid[best];
  double f_best = values[best];
  for (const auto& [h, v] : breakpoints_) {
    const double p = -1.0 / h;
    if (f(p) < f_best) {
      f_best = f(p);
      p_best = p;
    }
  }
  p_tilde_ = p_best;

  constexpr double kTol = 1e-12;
  for (int i = 1; i < kGrid; ++i) {
    const bool left = grid[i] <= p_tilde_;
    if (left && values[i] > values[i - 1] + kTol)
      throw InvalidArgument("p V(-1/p) must be non-increasing left of p~");
    if (!left && grid[i - 1] >= p_tilde_ && values[i] < values[i - 1] - kTol)
      throw InvalidArgument("p V(-1/p) must be non-decreasing right of p~");
  }
}

VelocityCurve VelocityCurve::clamped_linear(double h0, double vmax) {
  return VelocityCurve({{h0, 0.0}, {h0 + vmax, vmax}});
}

double VelocityCurve::operator()(double h) const {
  if (h <= breakpoints_.front().first) return 0.0;
  if (h >= breakpoints_.back().first) return breakpoints_.back().second;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), h,
                                   [](double x, const auto& b) { return x < b.first; });
  const auto& [h1, v1] = *it;
  const auto& [h0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (h - h0) / (h1 - h0);
}

CoreHamiltonian CoreHamiltonian::traffic(VelocityCurve velocity) {
  CoreHamiltonian h;
  h.kind_ = Kind::traffic;
  h.p_tilde_ = velocity.p_tilde();
  h.k0_ = 1.0 / velocity.h0();
  h.velocity_ = std::move(velocity);
  h.build_knots();
  return h;
}

CoreHamiltonian CoreHamiltonian::absolute() {
  CoreHamiltonian h;
  h.kind_ = Kind::abs;
  h.build_knots();
  return h;
}

CoreHamiltonian CoreHamiltonian::quadratic(double c) {
  CoreHamiltonian h;
  h.kind_ = Kind::quadratic;
  h.c_ = c;
  return h;
}

void CoreHamiltonian::build_knots() {
  knots_p_.clear();
  knots_h_.clear();
  if (kind_ == Kind::abs) {
    knots_p_ = {0.0};
    knots_h_ = {0.0};
    left_slope_ = -1.0;
    right_slope_ = 1.0;
    return;
  }
  // traffic: kinks at q = -1/h_j and q = 0, where q = p + p~
  std::vector<double> qs;
  for (const auto& [hh, v] : velocity_->breakpoints()) qs.push_back(-1.0 / hh);
  qs.push_back(0.0);
  for (double q : qs) knots_p_.push_back(q - p_tilde_);
  if (std::find(knots_p_.begin(), knots_p_.end(), 0.0) == knots_p_.end()) knots_p_.push_back(0.0);
  std::sort(knots_p_.begin(), knots_p_.end());
  for (double p : knots_p_) knots_h_.push_back((*this)(p));
  left_slope_ = -1.0;
  right_slope_ = 1.0;

  double prev = left_slope_;
  for (std::size_t i = 0; i + 1 < knots_p_.size(); ++i) {
    const double s = (knots_h_[i + 1] - knots_h_[i]) / (knots_p_[i + 1] - knots_p_[i]);
    if (s < prev - 1e-12)
      throw InvalidArgument("traffic Hamiltonian is not convex for this velocity curve (vmax > 1?)");
    prev = s;
  }
  if (right_slope_ < prev - 1e-12)
    throw InvalidArgument("traffic Hamiltonian is not convex for this velocity curve (vmax > 1?)");
}

double CoreHamiltonian::operator()(double p) const {
  switch (kind_) {
    case Kind::abs:
      return std::abs(p);
    case Kind::quadratic:
      return p * p + c_;
    case Kind::traffic: {
      const double q = p + p_tilde_;
      if (q < -k0_) return -q - k0_;
      if (q > 0.0) return q;
      if (q == 0.0) return 0.0;
      return -std::abs(q) * (*velocity_)(-1.0 / q);
    }
  }
  return 0.0;
}

double CoreHamiltonian::branch(double level, Side side) const {
  const double h0 = minimum();
  if (level < h0) {
    if (level < h0 - 1e-13 * std::max(1.0, std::abs(h0)))
      throw LevelBelowMinimum("level " + std::to_string(level) + " below min_p H = " +
                              std::to_string(h0));
    return 0.0;
  }
  const double sign = side == Side::plus ? 1.0 : -1.0;
  if (kind_ == Kind::quadratic) return sign * std::sqrt(level - c_);

  const std::size_t n = knots_p_.size();
  if (side == Side::plus) {
    if (level >= knots_h_[n - 1]) return knots_p_[n - 1] + (level - knots_h_[n - 1]) / right_slope_;
    for (std::size_t i = n - 1; i-- > 0;) {
      if (knots_p_[i + 1] <= 0.0) break;
      if (knots_h_[i] <= level) {
        const double t = (level - knots_h_[i]) / (knots_h_[i + 1] - knots_h_[i]);
        return std::max(0.0, knots_p_[i] + t * (knots_p_[i + 1] - knots_p_[i]));
      }
    }
    return 0.0;
  }
  if (level >= knots_h_[0]) return knots_p_[0] + (level - knots_h_[0]) / left_slope_;
  for (std::size_t i = 1; i < n; ++i) {
    if (knots_p_[i - 1] >= 0.0) break;
    if (knots_h_[i] <= level) {
      const double t = (level - knots_h_[i]) / (knots_h_[i - 1] - knots_h_[i]);
      return std::min(0.0, knots_p_[i] + t * (knots_p_[i - 1] - knots_p_[i]));
    }
  }
  return 0.0;
}

double CoreHamiltonian::lipschitz(double radius) const {
  if (kind_ == Kind::quadratic) return 2.0 * radius;
  double lip = std::max(std::abs(left_slope_), std::abs(right_slope_));
  for (std::size_t i = 0; i + 1 < knots_p_.size(); ++i)
    lip = std::max(lip, std::abs((knots_h_[i + 1] - knots_h_[i]) / (knots_p_[i + 1] - knots_p_[i])));
  return lip;
}

std::optional<GrowthBounds> CoreHamiltonian::growth_bounds() const {
  switch (kind_) {
    case Kind::abs:
      return GrowthBounds{1.0, 1.0, 0.0};
    case Kind::traffic:
      return GrowthBounds{velocity_->vmax(), 1.0, p_tilde_};
    case Kind::quadratic:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace hjlab
