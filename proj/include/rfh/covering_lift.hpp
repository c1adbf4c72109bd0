#pragma once

// Lifting sampled loops in the lens space S^{2n-1}/Z_m back to the sphere.
// Quotient points are stored as arbitrary sphere representatives; the lift
// picks, step by step, the phi-image nearest the previous lifted point.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rfh/errors.hpp"
#include "rfh/phase_space.hpp"
#include "rfh/star_shaped.hpp"
#include "rfh/twisted_orbits.hpp"

namespace rfh {

struct DeckElement {
  int exponent = 0;  // phi^exponent
  int modulus = 1;

  DeckElement operator+(const DeckElement& o) const {
    if (o.modulus != modulus) throw ConfigError("deck elements of different groups");
    return {(exponent + o.exponent) % modulus, modulus};
  }
  bool is_identity() const noexcept { return exponent == 0; }
  friend bool operator==(const DeckElement&, const DeckElement&) = default;
};

struct QuotientLoop {
  std::vector<PhasePoint> samples;
  RotationTwist twist;
  bool closed = true;  // the last sample represents the same point as the first
};

struct LiftResult {
  std::vector<PhasePoint> lift;
  std::vector<int> exponents;  // lift[i] = phi^exponents[i](path sample i)
  DeckElement deck;
  double margin = 0.0;      // sep/2 - max step; +inf when m = 1
  double separation = 0.0;  // min_{p, j != 0} |phi^j p - p|
  double max_step = 0.0;
};

struct LiftOptions {
  double unit_tol = 1e-6;
  double closure_tol = 1e-6;
};

namespace detail {

inline double orbit_separation(const PhasePoint& p, const RotationTwist& twist) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j < twist.modulus(); ++j) best = std::min(best, (twist.apply(p, j) - p).norm());
  return best;
}

// Exponent j in [0, m) minimizing |phi^j(p) - target|, with the distance.
inline std::pair<int, double> nearest_representative(const PhasePoint& p, const PhasePoint& target,
                                                     const RotationTwist& twist) {
  int best_j = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < twist.modulus(); ++j) {
    const double dist = (twist.apply(p, j) - target).norm();
    if (dist < best) {
      best = dist;
      best_j = j;
    }
  }
  return {best_j, best};
}

}  // namespace detail

// Path of samples starting at `basepoint`. Closed loops are read cyclically:
// samples 0..N-1 are distinct points and sample N repeats the class of 0.
inline std::vector<PhasePoint> rotate_loop(const QuotientLoop& loop, std::size_t basepoint) {
  const auto& s = loop.samples;
  if (!loop.closed || basepoint == 0) {
    if (basepoint != 0) throw ConfigError("lift_loop: basepoint choice requires a closed loop");
    return s;
  }
  const std::size_t period = s.size() - 1;
  if (basepoint >= period) throw ConfigError("lift_loop: basepoint index out of range");
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i <= period; ++i) out.push_back(s[(basepoint + i) % period]);
  return out;
}

inline LiftResult lift_loop(const QuotientLoop& loop, std::size_t basepoint = 0, const LiftOptions& opts = {}) {
  if (loop.samples.size() < 2) throw ConfigError("lift_loop: need at least two samples");
  const RotationTwist& twist = loop.twist;
  for (std::size_t i = 0; i < loop.samples.size(); ++i) {
    const auto& p = loop.samples[i];
    if (p.size() != twist.dimension()) throw DimensionError("lift_loop: sample dimension differs from the twist");
    if (!(std::abs(p.norm() - 1.0) <= opts.unit_tol))
      throw ConfigError("lift_loop: sample " + std::to_string(i) + " is not on the unit sphere");
  }
  if (loop.closed &&
      !(detail::nearest_representative(loop.samples.back(), loop.samples.front(), twist).second <= opts.closure_tol))
    throw ConfigError("lift_loop: last sample does not represent the first quotient point");

  const std::vector<PhasePoint> path = rotate_loop(loop, basepoint);
  LiftResult r;
  r.separation = std::numeric_limits<double>::infinity();
  for (const auto& p : path) r.separation = std::min(r.separation, detail::orbit_separation(p, twist));

  r.lift.push_back(path.front());
  r.exponents.push_back(0);
  std::size_t worst = 0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto [j, dist] = detail::nearest_representative(path[i], r.lift.back(), twist);
    if (dist > r.max_step) {
      r.max_step = dist;
      worst = i;
    }
    r.lift.push_back(twist.apply(path[i], j));
    r.exponents.push_back(j);
  }
  r.margin = r.separation / 2.0 - r.max_step;
  if (!(r.margin > 0.0)) {
    std::ostringstream os;
    os << "lift_loop: ambiguous step " << worst << " (step " << r.max_step << ", half separation "
       << r.separation / 2.0 << ", margin " << r.margin << ")";
    throw LiftingError(os.str());
  }

  r.deck.modulus = twist.modulus();
  if (loop.closed) {
    const auto [j, dist] = detail::nearest_representative(r.lift.front(), r.lift.back(), twist);
    if (!(dist <= opts.closure_tol)) throw LiftingError("lift_loop: lifted endpoint is not in the starting fibre");
    r.deck.exponent = j;
  }
  return r;
}

// Concatenation of two closed loops based at the same quotient point.
inline QuotientLoop concatenate(const QuotientLoop& a, const QuotientLoop& b) {
  if (!(a.twist == b.twist)) throw ConfigError("concatenate: loops use different twists");
  QuotientLoop out{a.samples, a.twist, true};
  out.samples.insert(out.samples.end(), b.samples.begin() + 1, b.samples.end());
  return out;
}

struct LoopCertificate {
  DeckElement deck;
  bool contractible = true;
  double margin = 0.0;
};

// Projects the twisted orbit to the lens space (normalized to the unit
// sphere, representatives deliberately scrambled by phi^{7i mod m}) and
// lifts it back. A nonzero deck element certifies that the projected Reeb
// orbit is not contractible in Sigma / Z_m.
inline LoopCertificate classify_orbit_loop(const TwistedOrbit& orbit, const RotationTwist& twist,
                                           const StarShapedModel& model, int samples = 0,
                                           const LiftOptions& opts = {}) {
  if (samples <= 0) samples = std::max(64, static_cast<int>(std::ceil(16.0 * std::abs(orbit.tau) * twist.modulus())));
  const auto pts = sample_orbit(orbit, model, samples);
  QuotientLoop loop{{}, twist, true};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PhasePoint unit = normalize_to_sphere(pts[i]).first;
    loop.samples.push_back(twist.apply(unit, static_cast<int>((7 * i) % static_cast<std::size_t>(twist.modulus()))));
  }
  const LiftResult r = lift_loop(loop, 0, opts);
  return {r.deck, r.deck.is_identity(), r.margin};
}

}  // namespace rfh
