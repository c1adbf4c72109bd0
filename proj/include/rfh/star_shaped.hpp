#pragma once

// Star-shaped hypersurfaces Sigma = {q = 1} in C^n, where q is positive and
// homogeneous of degree two along the Liouville flow. The Reeb field of
// lambda|Sigma is the Hamiltonian field of log q, i.e. X = -i grad(log q).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfh/dual.hpp"
#include "rfh/errors.hpp"
#include "rfh/integrator.hpp"
#include "rfh/phase_space.hpp"

namespace rfh {

// Radius profile rho(u) = q(u)^{-1/2} on the unit sphere with
//   q(z) = sum_j a_j |z_j|^2 + sum_j b_j |z_j|^4 / |z|^2.
// Depends on |z_j| only, so every rotation twist preserves it.
struct RadialProfile {
  std::vector<double> quadratic;  // a_j
  std::vector<double> quartic;    // b_j (may be empty)

  static RadialProfile constant(int n, double radius = 1.0) {
    return {std::vector<double>(static_cast<std::size_t>(n), 1.0 / (radius * radius)), {}};
  }

  template <class T>
  T level(std::span<const T> x) const {
    const std::size_t n = x.size() / 2;
    T norm2(0.0);
    std::vector<T> abs2(n);
    for (std::size_t j = 0; j < n; ++j) {
      abs2[j] = x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1];
      norm2 += abs2[j];
    }
    T q(0.0);
    for (std::size_t j = 0; j < n; ++j) q += T(quadratic[j]) * abs2[j];
    if (!quartic.empty()) {
      T quart(0.0);
      for (std::size_t j = 0; j < n; ++j) quart += T(quartic[j]) * abs2[j] * abs2[j];
      q += quart / norm2;
    }
    return q;
  }
};

enum class ModelKind { round_sphere, radial_profile };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::round_sphere ? "round_sphere" : "radial_profile";
}

namespace detail {

template <class F>
RealVector gradient(const F& f, const RealVector& x) {
  using D = Dual<double>;
  const auto dim = static_cast<std::size_t>(x.size());
  std::vector<D> xd(dim);
  RealVector g(x.size());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) xd[j] = D(x[static_cast<Eigen::Index>(j)], i == j ? 1.0 : 0.0);
    g[static_cast<Eigen::Index>(i)] = f(std::span<const D>(xd)).d;
  }
  return g;
}

template <class F>
Eigen::MatrixXd hessian(const F& f, const RealVector& x) {
  using D1 = Dual<double>;
  using D2 = Dual<D1>;
  const auto dim = static_cast<std::size_t>(x.size());
  std::vector<D2> xd(dim);
  Eigen::MatrixXd h(x.size(), x.size());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = i; k < dim; ++k) {
      for (std::size_t j = 0; j < dim; ++j)
        xd[j] = D2(D1(x[static_cast<Eigen::Index>(j)], k == j ? 1.0 : 0.0), D1(i == j ? 1.0 : 0.0, 0.0));
      const double v = f(std::span<const D2>(xd)).d.d;
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
      h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return h;
}

// Standard complex structure on interleaved coordinates: X_F = J grad F,
// with (dx, dy) = (F_y, -F_x), i.e. X_F = -i grad F.
inline Eigen::MatrixXd symplectic_rotation(Eigen::Index dim) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index p = 0; p < dim / 2; ++p) {
    j(2 * p, 2 * p + 1) = 1.0;
    j(2 * p + 1, 2 * p) = -1.0;
  }
  return j;
}

inline RealVector rotate_gradient(const RealVector& g) {
  RealVector v(g.size());
  for (Eigen::Index p = 0; p < g.size() / 2; ++p) {
    v[2 * p] = g[2 * p + 1];
    v[2 * p + 1] = -g[2 * p];
  }
  return v;
}

}  // namespace detail

// Hamiltonian vector field X_F = -i grad F of a scalar function given as a
// generic callable on std::span<const T>; convention i_{X_F} omega = -dF.
template <class F>
RealVector hamiltonian_field(const F& f, const RealVector& x) {
  return detail::rotate_gradient(detail::gradient(f, x));
}

template <class F>
Eigen::MatrixXd hamiltonian_field_jacobian(const F& f, const RealVector& x) {
  return detail::symplectic_rotation(x.size()) * detail::hessian(f, x);
}

struct FlowOptions {
  IntegrationOptions integration{};
  double surface_tol = 1e-9;  // on-hypersurface tolerance
  double drift_tol = 1e-8;    // allowed energy drift along numeric flows
};

class StarShapedModel {
  struct LogLevel {
    const RadialProfile* profile;
    template <class S>
    auto operator()(S x) const {
      using std::log;
      return log(profile->level(x));
    }
  };
  LogLevel log_level() const { return {&profile_}; }

 public:
  static StarShapedModel round_sphere(int n) {
    if (n < 1) throw ConfigError("model dimension must be positive");
    return StarShapedModel(ModelKind::round_sphere, n, RadialProfile::constant(n), true);
  }

  static StarShapedModel radial(RadialProfile profile, bool phi_invariant = true) {
    const int n = static_cast<int>(profile.quadratic.size());
    if (n < 1) throw ConfigError("radial profile needs one quadratic coefficient per coordinate");
    if (!profile.quartic.empty() && profile.quartic.size() != profile.quadratic.size())
      throw ConfigError("radial profile: quartic coefficients must match the dimension");
    StarShapedModel model(ModelKind::radial_profile, n, std::move(profile), phi_invariant);
    model.check_bounds();
    return model;
  }

  ModelKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  const RadialProfile& profile() const noexcept { return profile_; }
  bool phi_invariant() const noexcept { return phi_invariant_; }

  template <class T>
  T level(std::span<const T> x) const {
    return profile_.level(x);
  }
  double level(const RealVector& x) const {
    return level(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  double level(const PhasePoint& z) const { return level(to_real(z)); }

  // Signed distance-like defect log q(z); zero exactly on Sigma.
  double surface_defect(const PhasePoint& z) const { return std::log(level(z)); }

  // rho(u) for u on the unit sphere; Sigma = {rho(u) u}.
  double radius(const PhasePoint& unit) const { return 1.0 / std::sqrt(level(unit)); }

  // Radial projection along the Liouville flow: returns (point on Sigma, time).
  std::pair<PhasePoint, double> project(const PhasePoint& z) const {
    if (!(z.norm() > 0.0)) throw ConfigError("project: zero input");
    const double q = level(z);
    return {z / std::sqrt(q), -std::log(q)};
  }

  RealVector reeb_field_real(const RealVector& x) const {
    if (kind_ == ModelKind::round_sphere) {
      RealVector v(x.size());
      for (Eigen::Index p = 0; p < x.size() / 2; ++p) {
        v[2 * p] = 2.0 * x[2 * p + 1];
        v[2 * p + 1] = -2.0 * x[2 * p];
      }
      return v;
    }
    return hamiltonian_field(log_level(), x);
  }

  Eigen::MatrixXd reeb_field_jacobian(const RealVector& x) const {
    if (kind_ == ModelKind::round_sphere) return 2.0 * detail::symplectic_rotation(x.size());
    return hamiltonian_field_jacobian(log_level(), x);
  }

  // Checks that rho is bounded away from 0 and infinity on sampled unit
  // points, and phi-invariance when the model is flagged invariant.
  void check_invariance(const RotationTwist& twist, int samples = 200, unsigned seed = 7) const {
    if (twist.dimension() != n_) throw ConfigError("twist and model dimensions differ");
    if (!phi_invariant_) return;
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    for (int s = 0; s < samples; ++s) {
      PhasePoint u(n_);
      for (int j = 0; j < n_; ++j) u[j] = Complex(g(rng), g(rng));
      u /= u.norm();
      const double a = radius(u), b = radius(twist.apply(u));
      if (std::abs(a - b) > 1e-12 * std::max(1.0, a))
        throw ConfigError("radial profile is not invariant under the twist");
    }
  }

 private:
  StarShapedModel(ModelKind kind, int n, RadialProfile profile, bool phi_invariant)
      : kind_(kind), n_(n), profile_(std::move(profile)), phi_invariant_(phi_invariant) {}


  void check_bounds() const {
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    for (int s = 0; s < 400; ++s) {
      PhasePoint u(n_);
      for (int j = 0; j < n_; ++j) u[j] = Complex(g(rng), g(rng));
      if (s < n_) u = PhasePoint::Unit(n_, s);  // include the coordinate axes
      u /= u.norm();
      const double q = level(u);
      if (!(q > 1e-6) || !(q < 1e6))
        throw ConfigError("radial profile: radius not bounded away from 0 and infinity");
    }
  }

  ModelKind kind_;
  int n_;
  RadialProfile profile_;
  bool phi_invariant_;
};

inline void require_on_surface(const StarShapedModel& model, const PhasePoint& z, double tol,
                               const char* where) {
  if (z.size() != model.dimension()) throw DimensionError(std::string(where) + ": dimension mismatch");
  const double defect = std::abs(model.surface_defect(z));
  if (!(defect <= tol))
    throw ConfigError(std::string(where) + ": point is off the hypersurface (|log q| = " +
                      std::to_string(defect) + ")");
}

// Liouville normalization to the unit sphere; the model only fixes the
// dimension. delta(phi(x)) = delta(x) since phi is unitary.
inline std::pair<PhasePoint, double> normalize_to_sphere(const PhasePoint& x, const StarShapedModel& model) {
  if (x.size() != model.dimension()) throw DimensionError("normalize_to_sphere: dimension mismatch");
  return normalize_to_sphere(x);
}

// Reeb field R(z). Round sphere: R(z) = -2 i z.
inline PhasePoint reeb_field(const PhasePoint& z, const StarShapedModel& model,
                             double tol = FlowOptions{}.surface_tol) {
  require_on_surface(model, z, tol, "reeb_field");
  return to_complex(model.reeb_field_real(to_real(z)));
}

// Reeb flow for time t. Exact e^{-2it} z on the round sphere; adaptive
// Runge-Kutta otherwise, with the level log q monitored for drift.
inline PhasePoint reeb_flow(const PhasePoint& z, double t, const StarShapedModel& model,
                            const FlowOptions& opts = {}) {
  require_on_surface(model, z, opts.surface_tol, "reeb_flow");
  if (model.kind() == ModelKind::round_sphere) return std::exp(Complex(0.0, -2.0 * t)) * z;

  const RealVector x0 = to_real(z);
  auto rhs = [&model](const State& x, State& dx, double) {
    const RealVector v = model.reeb_field_real(Eigen::Map<const RealVector>(x.data(), static_cast<Eigen::Index>(x.size())));
    dx.assign(v.data(), v.data() + v.size());
  };
  State x(x0.data(), x0.data() + x0.size());
  x = integrate(rhs, std::move(x), 0.0, t, opts.integration);
  const PhasePoint w = to_complex(Eigen::Map<const RealVector>(x.data(), static_cast<Eigen::Index>(x.size())));
  const double drift = std::abs(model.surface_defect(w) - model.surface_defect(z));
  if (!(drift <= opts.drift_tol))
    throw SolverError("reeb_flow: integration-tolerance-exceeded (energy drift " + std::to_string(drift) + ")");
  return w;
}

// Samples of the Reeb trajectory at the given (monotone, starting at 0) times.
inline std::vector<PhasePoint> reeb_trajectory(const PhasePoint& z, const std::vector<double>& times,
                                               const StarShapedModel& model, const FlowOptions& opts = {}) {
  require_on_surface(model, z, opts.surface_tol, "reeb_trajectory");
  std::vector<PhasePoint> out;
  out.reserve(times.size());
  if (model.kind() == ModelKind::round_sphere) {
    for (double t : times) out.push_back(std::exp(Complex(0.0, -2.0 * t)) * z);
    return out;
  }
  const RealVector x0 = to_real(z);
  auto rhs = [&model](const State& x, State& dx, double) {
    const RealVector v = model.reeb_field_real(Eigen::Map<const RealVector>(x.data(), static_cast<Eigen::Index>(x.size())));
    dx.assign(v.data(), v.data() + v.size());
  };
  const auto states = integrate_at(rhs, State(x0.data(), x0.data() + x0.size()), times, opts.integration);
  for (const auto& s : states) {
    PhasePoint w = to_complex(Eigen::Map<const RealVector>(s.data(), static_cast<Eigen::Index>(s.size())));
    if (!(std::abs(model.surface_defect(w) - model.surface_defect(z)) <= opts.drift_tol))
      throw SolverError("reeb_trajectory: integration-tolerance-exceeded (energy drift)");
    out.push_back(std::move(w));
  }
  return out;
}

// Differential of the Reeb flow for time t at z (2n x 2n, interleaved), from
// the variational equation. Exact on the round sphere.
inline Eigen::MatrixXd reeb_flow_differential(const PhasePoint& z, double t, const StarShapedModel& model,
                                              const FlowOptions& opts = {}) {
  require_on_surface(model, z, opts.surface_tol, "reeb_flow_differential");
  const Eigen::Index dim = 2 * z.size();
  if (model.kind() == ModelKind::round_sphere) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
    const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
    for (Eigen::Index p = 0; p < dim / 2; ++p) {
      // multiplication by e^{-2it}
      d(2 * p, 2 * p) = c;
      d(2 * p, 2 * p + 1) = s;
      d(2 * p + 1, 2 * p) = -s;
      d(2 * p + 1, 2 * p + 1) = c;
    }
    return d;
  }
  const auto udim = static_cast<std::size_t>(dim);
  auto rhs = [&model, dim, udim](const State& s, State& ds, double) {
    const Eigen::Map<const RealVector> x(s.data(), dim);
    const Eigen::Map<const Eigen::MatrixXd> v(s.data() + udim, dim, dim);
    ds.resize(s.size());
    Eigen::Map<RealVector>(ds.data(), dim) = model.reeb_field_real(x);
    Eigen::Map<Eigen::MatrixXd>(ds.data() + udim, dim, dim) = model.reeb_field_jacobian(x) * v;
  };
  State s(udim + udim * udim, 0.0);
  const RealVector x0 = to_real(z);
  std::copy(x0.data(), x0.data() + dim, s.begin());
  for (std::size_t i = 0; i < udim; ++i) s[udim + i * udim + i] = 1.0;
  s = integrate(rhs, std::move(s), 0.0, t, opts.integration);
  return Eigen::Map<const Eigen::MatrixXd>(s.data() + udim, dim, dim);
}

}  // namespace rfh
