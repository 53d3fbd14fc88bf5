#include "hjlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjlab/errors.hpp"

namespace hjlab {

std::string_view to_string(JunctionMode mode) {
  switch (mode) {
    case JunctionMode::none:
      return "none";
    case JunctionMode::wfl:
      return "wfl";
    case JunctionMode::eps:
      return "eps";
    case JunctionMode::fixed_bump:
      return "fixed_bump";
  }
  return "?";
}

double CutoffProfile::operator()(double y) const {
  if (kind == Kind::wfl_phi) return 1.0 - smoothstep(0.5 * (y + 1.0), degree);
  const double a = 1.0 / std::sqrt(epsilon);
  return smoothstep((y - a) / a, degree);
}

std::pair<double, double> CutoffProfile::transition() const {
  if (kind == Kind::wfl_phi) return {-1.0, 1.0};
  const double a = 1.0 / std::sqrt(epsilon);
  return {a, 2.0 * a};
}

// ---------------------------------------------------------------------------

void LocalHamiltonian::add(double weight, const CoreHamiltonian* core) {
  for (int i = 0; i < count_; ++i) {
    if (terms_[i].core == core) {
      terms_[i].weight += weight;
      return;
    }
  }
  terms_[count_++] = Term{weight, core};
}

double LocalHamiltonian::operator()(double p) const {
  const double q = reversed_ ? -p : p;
  double h = 0.0;
  for (int i = 0; i < count_; ++i) h += terms_[i].weight * (*terms_[i].core)(q);
  return h;
}

double LocalHamiltonian::lipschitz(double radius) const {
  double lip = 0.0;
  for (int i = 0; i < count_; ++i) lip += std::abs(terms_[i].weight) * terms_[i].core->lipschitz(radius);
  return lip;
}

double LocalHamiltonian::branch(double mu, Side side) const {
  if (!convex_) throw InvalidArgument("root branches are undefined for the non-convex fixed_bump Hamiltonian");
  const double h0 = at_zero();
  if (mu < h0 - 1e-13 * std::max(1.0, std::abs(h0)))
    throw LevelBelowMinimum("level mu = " + std::to_string(mu) + " is below H(0, y) = " + std::to_string(h0));

  const Side inner = reversed_ ? (side == Side::plus ? Side::minus : Side::plus) : side;
  const double sign = reversed_ ? -1.0 : 1.0;
  if (count_ == 1 && terms_[0].weight > 0.0) {
    const double level = std::max(mu / terms_[0].weight, terms_[0].core->minimum());
    return sign * terms_[0].core->branch(level, inner);
  }

  // generic: bisection to machine precision on the convex sum
  const double dir = side == Side::plus ? 1.0 : -1.0;
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while ((*this)(dir * hi) <= mu) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1100) throw NonConvergence("root bracket expansion failed (H not coercive?)");
  }
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(dir * mid) <= mu)
      lo = mid;
    else
      hi = mid;
  }
  return dir * lo;
}

// ---------------------------------------------------------------------------

AssembledHamiltonian AssembledHamiltonian::stationary(HamiltonianPiece piece, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("stationary scale must be positive");
  AssembledHamiltonian h;
  h.left_ = std::make_shared<const HamiltonianPiece>(std::move(piece));
  h.right_ = h.left_;
  h.same_core_ = true;
  h.mode_ = JunctionMode::none;
  h.scale_ = scale;
  return h;
}

AssembledHamiltonian AssembledHamiltonian::wfl(HamiltonianPiece left, HamiltonianPiece right, int degree) {
  if (!valid_smoothstep_degree(degree)) throw InvalidArgument("cutoff smoothstep degree must be 3, 5 or 7");
  AssembledHamiltonian h;
  h.same_core_ = left.core == right.core;
  h.left_ = std::make_shared<const HamiltonianPiece>(std::move(left));
  h.right_ = std::make_shared<const HamiltonianPiece>(std::move(right));
  h.mode_ = JunctionMode::wfl;
  h.cutoff_ = CutoffProfile::wfl(degree);
  return h;
}

AssembledHamiltonian AssembledHamiltonian::eps(HamiltonianPiece piece, double epsilon, double middle_scale,
                                               int degree) {
  if (!(epsilon > 0.0)) throw InvalidArgument("eps mode requires epsilon > 0");
  if (!(middle_scale > 0.0 && middle_scale <= 1.0))
    throw InvalidArgument("eps mode requires middle scale C in (0, 1] so that H_0 = C H_L >= H_L");
  if (!valid_smoothstep_degree(degree)) throw InvalidArgument("cutoff smoothstep degree must be 3, 5 or 7");
  AssembledHamiltonian h;
  h.left_ = std::make_shared<const HamiltonianPiece>(std::move(piece));
  h.right_ = h.left_;
  h.same_core_ = true;
  h.mode_ = JunctionMode::eps;
  h.cutoff_ = CutoffProfile::eps(epsilon, degree);
  h.middle_scale_ = middle_scale;

  // H_0 >= max(H_L, H_R) wherever the latter is non-positive
  const double r = 3.0 / std::sqrt(epsilon);
  for (int iy = 0; iy <= 200; ++iy) {
    const double y = -r + 2.0 * r * iy / 200.0;
    const double psi = h.left_->medium.psi(y);
    for (int ip = 0; ip <= 60; ++ip) {
      const double p = -3.0 + 0.1 * ip;
      const double hl = psi * h.left_->core(p);
      const double h0 = middle_scale * hl;
      if (hl <= 0.0 && h0 < hl - 1e-12)
        throw InvalidArgument("H_0 = C H_L must dominate max(H_L, H_R) on the sampled grid");
    }
  }
  return h;
}

AssembledHamiltonian AssembledHamiltonian::fixed_bump(HamiltonianPiece piece, BumpProfile junction_bump) {
  junction_bump.validate();
  AssembledHamiltonian h;
  h.left_ = std::make_shared<const HamiltonianPiece>(std::move(piece));
  h.right_ = h.left_;
  h.same_core_ = true;
  h.mode_ = JunctionMode::fixed_bump;
  h.junction_bump_ = junction_bump;
  return h;
}

LocalHamiltonian AssembledHamiltonian::local(double y) const {
  LocalHamiltonian loc;
  loc.reversed_ = reversed_;
  const CoreHamiltonian* cl = &left_->core;
  const CoreHamiltonian* cr = same_core_ ? cl : &right_->core;
  switch (mode_) {
    case JunctionMode::none:
      loc.add(scale_ * left_->medium.psi(y), cl);
      break;
    case JunctionMode::wfl: {
      const double phi = cutoff_(y);
      if (phi > 0.0) loc.add(phi * left_->medium.psi(y), cl);
      if (phi < 1.0) loc.add((1.0 - phi) * right_->medium.psi(y), cr);
      break;
    }
    case JunctionMode::eps: {
      const double a = cutoff_(-y);
      const double b = cutoff_(y);
      const double psi = left_->medium.psi(y);
      const double wl = a + middle_scale_ * (1.0 - a) * (1.0 - b);
      if (wl > 0.0) loc.add(wl * psi, cl);
      if (b > 0.0) loc.add(b * right_->medium.psi(y), cr);
      break;
    }
    case JunctionMode::fixed_bump: {
      const double w = left_->medium.psi(y) * junction_bump_(y);
      loc.add(w, cl);
      loc.convex_ = w > 0.0;
      break;
    }
  }
  return loc;
}

double AssembledHamiltonian::monotone_part(double p, double y, Side side) const {
  const LocalHamiltonian loc = local(y);
  return side == Side::plus ? loc.plus(p) : loc.minus(p);
}

AssembledHamiltonian AssembledHamiltonian::reversed() const {
  AssembledHamiltonian out = *this;
  out.reversed_ = !reversed_;
  return out;
}

AssembledHamiltonian AssembledHamiltonian::stationary_piece(PieceRole role) const {
  AssembledHamiltonian out;
  out.mode_ = JunctionMode::none;
  out.reversed_ = reversed_;
  out.same_core_ = true;
  switch (role) {
    case PieceRole::left:
      out.left_ = left_;
      out.scale_ = mode_ == JunctionMode::none ? scale_ : 1.0;
      break;
    case PieceRole::right:
      out.left_ = right_;
      out.scale_ = mode_ == JunctionMode::none ? scale_ : 1.0;
      break;
    case PieceRole::middle:
      out.left_ = left_;
      out.scale_ = mode_ == JunctionMode::eps ? middle_scale_ : scale_;
      break;
  }
  out.right_ = out.left_;
  return out;
}

void AssembledHamiltonian::append_breakpoints(double a, double b, std::vector<double>& out) const {
  left_->medium.append_breakpoints(a, b, out);
  if (right_ != left_ && mode_ == JunctionMode::wfl) right_->medium.append_breakpoints(a, b, out);
  const auto push = [&](double p) {
    if (p > a && p < b) out.push_back(p);
  };
  switch (mode_) {
    case JunctionMode::none:
      break;
    case JunctionMode::wfl:
      push(-1.0);
      push(1.0);
      break;
    case JunctionMode::eps: {
      const auto [t0, t1] = cutoff_.transition();
      for (double p : {-t1, -t0, t0, t1}) push(p);
      break;
    }
    case JunctionMode::fixed_bump: {
      const double pl = junction_bump_.plateau_half_width;
      const double sp = junction_bump_.support_half_width;
      for (double p : {-sp, -pl, pl, sp}) push(p);
      break;
    }
  }
}

bool AssembledHamiltonian::constant_on(double a, double b) const {
  if (!left_->medium.constant_on(a, b)) return false;
  if (right_ != left_ && mode_ == JunctionMode::wfl && !right_->medium.constant_on(a, b)) return false;
  switch (mode_) {
    case JunctionMode::none:
      return true;
    case JunctionMode::wfl:
      return b <= -1.0 || a >= 1.0;
    case JunctionMode::eps: {
      const auto [t0, t1] = cutoff_.transition();
      const auto outside = [&](double lo, double hi) { return b <= lo || a >= hi; };
      return outside(t0, t1) && outside(-t1, -t0);
    }
    case JunctionMode::fixed_bump: {
      const double pl = junction_bump_.plateau_half_width;
      const double sp = junction_bump_.support_half_width;
      const double lo = (a <= 0.0 && 0.0 <= b) ? 0.0 : std::min(std::abs(a), std::abs(b));
      const double hi = std::max(std::abs(a), std::abs(b));
      return hi <= pl || lo >= sp;
    }
  }
  return false;
}

double AssembledHamiltonian::lipschitz(double radius) const {
  const double ll = left_->medium.psi_bounds().second * left_->core.lipschitz(radius);
  const double lr = right_->medium.psi_bounds().second * right_->core.lipschitz(radius);
  switch (mode_) {
    case JunctionMode::none:
      return scale_ * ll;
    case JunctionMode::wfl:
      return std::max(ll, lr);
    case JunctionMode::eps:
      return std::max(1.0, middle_scale_) * std::max(ll, lr);
    case JunctionMode::fixed_bump:
      return std::abs(junction_bump_.depth) * ll;
  }
  return ll;
}

std::optional<GrowthBounds> AssembledHamiltonian::growth_bounds() const {
  if (mode_ == JunctionMode::fixed_bump) return std::nullopt;
  const auto gl = left_->core.growth_bounds();
  const auto gr = right_->core.growth_bounds();
  if (!gl || !gr || gl->gamma != gr->gamma) return std::nullopt;
  double wmax = std::max(left_->medium.psi_bounds().second, right_->medium.psi_bounds().second);
  if (mode_ == JunctionMode::none) wmax = scale_ * left_->medium.psi_bounds().second;
  const double gamma = reversed_ ? -gl->gamma : gl->gamma;
  return GrowthBounds{std::max(gl->c0, gr->c0) * wmax, std::max(gl->C0, gr->C0) * wmax, gamma};
}

double AssembledHamiltonian::junction_radius() const {
  switch (mode_) {
    case JunctionMode::none:
      return 0.0;
    case JunctionMode::wfl:
      return 1.0;
    case JunctionMode::eps:
      return cutoff_.transition().second;
    case JunctionMode::fixed_bump:
      return junction_bump_.support_half_width;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

void EnvironmentSpec::validate() const {
  left.medium.validate();
  if (right) right->medium.validate();
  if (!valid_smoothstep_degree(cutoff_degree)) throw InvalidArgument("cutoff smoothstep degree must be 3, 5 or 7");
  if (mode == JunctionMode::eps) {
    if (!(epsilon > 0.0)) throw InvalidArgument("eps mode requires epsilon > 0");
    if (!(middle_scale > 0.0 && middle_scale <= 1.0))
      throw InvalidArgument("eps mode requires middle_scale C in (0, 1]");
    if (right) throw InvalidArgument("eps mode requires H_L = H_R: omit the right piece");
  }
  if (mode == JunctionMode::fixed_bump && junction_bump) junction_bump->validate();
}

HamiltonianPiece EnvironmentSpec::piece(PieceRole role, std::uint64_t seed) const {
  if (role == PieceRole::right && right) return {right->core, RandomMedium(seed, right->medium, 1)};
  return {left.core, RandomMedium(seed, left.medium, 0)};
}

AssembledHamiltonian EnvironmentSpec::build(std::uint64_t seed) const {
  validate();
  switch (mode) {
    case JunctionMode::none:
      return AssembledHamiltonian::stationary(piece(PieceRole::left, seed));
    case JunctionMode::wfl:
      return AssembledHamiltonian::wfl(piece(PieceRole::left, seed), piece(PieceRole::right, seed),
                                       cutoff_degree);
    case JunctionMode::eps:
      return AssembledHamiltonian::eps(piece(PieceRole::left, seed), epsilon, middle_scale, cutoff_degree);
    case JunctionMode::fixed_bump:
      return AssembledHamiltonian::fixed_bump(piece(PieceRole::left, seed),
                                              junction_bump.value_or(left.medium.bump));
  }
  throw InvalidArgument("unknown junction mode");
}

}  // namespace hjlab
