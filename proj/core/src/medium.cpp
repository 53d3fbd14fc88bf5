#include "hjlab/medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjlab/errors.hpp"

namespace hjlab {

bool valid_smoothstep_degree(int degree) { return degree == 3 || degree == 5 || degree == 7; }

double smoothstep(double t, int degree) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t2 = t * t;
  const double t3 = t2 * t;
  switch (degree) {
    case 3:
      return t2 * (3.0 - 2.0 * t);
    case 5:
      return t3 * (10.0 + t * (-15.0 + 6.0 * t));
    case 7:
      return t2 * t2 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
    default:
      throw InvalidArgument("smoothstep degree must be 3, 5 or 7, got " + std::to_string(degree));
  }
}

double smoothstep_derivative(double t, int degree) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  switch (degree) {
    case 3:
      return 6.0 * s;
    case 5:
      return 30.0 * s * s;
    case 7:
      return 140.0 * s * s * s;
    default:
      throw InvalidArgument("smoothstep degree must be 3, 5 or 7, got " + std::to_string(degree));
  }
}

namespace {

double max_smoothstep_slope(int degree) { return smoothstep_derivative(0.5, degree); }

}  // namespace

BumpProfile BumpProfile::wide(double depth) { return BumpProfile{0.5, 0.75, depth, 5}; }

double BumpProfile::operator()(double y) const {
  const double r = std::abs(y);
  if (r <= plateau_half_width) return depth;
  if (r >= support_half_width) return 0.0;
  const double t = (r - plateau_half_width) / (support_half_width - plateau_half_width);
  return depth * (1.0 - smoothstep(t, smoothstep_degree));
}

double BumpProfile::lipschitz() const {
  return std::abs(depth) * max_smoothstep_slope(smoothstep_degree) /
         (support_half_width - plateau_half_width);
}

void BumpProfile::validate() const {
  if (!(depth > -1.0 && depth < 0.0))
    throw InvalidArgument("bump depth psi0 must lie in (-1, 0), got " + std::to_string(depth));
  if (!(plateau_half_width >= 0.0 && plateau_half_width < support_half_width))
    throw InvalidArgument("bump requires 0 <= plateau_half_width < support_half_width");
  if (!valid_smoothstep_degree(smoothstep_degree))
    throw InvalidArgument("bump smoothstep degree must be 3, 5 or 7");
}

double MarkDistribution::sample(double u) const {
  switch (kind) {
    case Kind::deterministic:
      return 0.0;
    case Kind::bernoulli:
      return u < q ? 1.0 : 0.0;
    case Kind::uniform:
      return lo + (hi - lo) * u;
  }
  return 0.0;
}

std::pair<double, double> MarkDistribution::support() const {
  switch (kind) {
    case Kind::deterministic:
      return {0.0, 0.0};
    case Kind::bernoulli:
      if (q <= 0.0) return {0.0, 0.0};
      if (q >= 1.0) return {1.0, 1.0};
      return {0.0, 1.0};
    case Kind::uniform:
      return {lo, hi};
  }
  return {0.0, 0.0};
}

void MarkDistribution::validate() const {
  if (kind == Kind::bernoulli && !(q >= 0.0 && q <= 1.0))
    throw InvalidArgument("bernoulli probability q must lie in [0, 1]");
  if (kind == Kind::uniform && !(lo >= 0.0 && lo <= hi && hi <= 1.0))
    throw InvalidArgument("uniform marks require 0 <= lo <= hi <= 1");
}

void MediumParams::validate() const {
  marks.validate();
  bump.validate();
  if (!(lattice_spacing > 0.0)) throw InvalidArgument("lattice_spacing must be positive");
  if (!(bump.support_half_width < 0.5 * lattice_spacing))
    throw InvalidArgument(
        "bump support_half_width must be < lattice_spacing/2 (support would overlap adjacent cells)");
  if (!(base_level > 0.0)) throw InvalidArgument("base_level must be positive");
  if (!(base_level + bump.depth * marks.support().second > 0.0))
    throw InvalidArgument("psi must stay positive: base_level + depth * max mark <= 0");
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomMedium::RandomMedium(std::uint64_t seed, MediumParams params, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))),
      params_(params) {
  params_.validate();
}

double RandomMedium::mark(std::int64_t k) const {
  if (params_.marks.kind == MarkDistribution::Kind::deterministic) return 0.0;
  const auto idx = static_cast<std::uint64_t>(k + offset_);
  const std::uint64_t h = mix64(key_ + mix64(idx));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return params_.marks.sample(u);
}

std::int64_t RandomMedium::cell_index(double y) const {
  return static_cast<std::int64_t>(std::floor(y / spacing() + 0.5));
}

double RandomMedium::psi(double y) const {
  const std::int64_t k = cell_index(y);
  const double x = mark(k);
  if (x == 0.0) return params_.base_level;
  return params_.bump(y - cell_center(k)) * x + params_.base_level;
}

RandomMedium RandomMedium::shifted(std::int64_t m) const {
  RandomMedium out = *this;
  out.offset_ += m;
  return out;
}

void RandomMedium::append_breakpoints(double a, double b, std::vector<double>& out) const {
  if (params_.marks.kind == MarkDistribution::Kind::deterministic || !(a < b)) return;
  const double pl = params_.bump.plateau_half_width;
  const double sp = params_.bump.support_half_width;
  const std::int64_t k0 = cell_index(a) - 1;
  const std::int64_t k1 = cell_index(b) + 1;
  for (std::int64_t k = k0; k <= k1; ++k) {
    if (mark(k) == 0.0) continue;
    const double c = cell_center(k);
    for (double p : {c - sp, c - pl, c + pl, c + sp}) {
      if (p > a && p < b) out.push_back(p);
    }
  }
}

bool RandomMedium::constant_on(double a, double b) const {
  if (params_.marks.kind == MarkDistribution::Kind::deterministic) return true;
  const double mid = 0.5 * (a + b);
  const std::int64_t k = cell_index(mid);
  if (mark(k) == 0.0) return true;
  const double c = cell_center(k);
  const double ra = std::abs(a - c);
  const double rb = std::abs(b - c);
  const double lo = (a <= c && c <= b) ? 0.0 : std::min(ra, rb);
  const double hi = std::max(ra, rb);
  const double pl = params_.bump.plateau_half_width;
  const double sp = params_.bump.support_half_width;
  return hi <= pl || lo >= sp;
}

std::pair<double, double> RandomMedium::psi_bounds() const {
  // depth < 0 and bump = 0 between supports, so the maximum is always base
  const double mhi = params_.marks.support().second;
  const double base = params_.base_level;
  return {base + params_.bump.depth * mhi, base};
}

double RandomMedium::lipschitz() const {
  return params_.bump.lipschitz() * params_.marks.support().second;
}

}  // namespace hjlab
