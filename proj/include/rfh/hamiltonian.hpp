#pragma once

// Defining Hamiltonians H with H^{-1}(0) = Sigma, X_H = R on Sigma and dH
// compactly supported, built from mollified clamp profiles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>

#include "rfh/dual.hpp"
#include "rfh/integrator.hpp"
#include "rfh/phase_space.hpp"
#include "rfh/star_shaped.hpp"

namespace rfh {

// Quintic smoothstep s(x) = 6x^5 - 15x^4 + 10x^3 and its antiderivative.
template <class T>
T smoothstep(T x) {
  return x * x * x * (x * (x * T(6.0) - T(15.0)) + T(10.0));
}
template <class T>
T smoothstep_integral(T x) {
  return x * x * x * x * (x * (x - T(3.0)) + T(2.5));
}

// Piecewise-linear clamp r -> min(max(r, lo), hi) with each corner replaced
// on [corner - eps, corner + eps] by a quintic-smoothstep blend. The result
// is C^3, equals r on [lo + eps, hi - eps] and is constant outside
// [lo - eps, hi + eps].
struct SmoothClamp {
  double lo = 0.5;
  double hi = 1.5;
  double eps = 0.05;

  template <class T>
  T operator()(const T& r) const {
    const double v = primal(r);
    if (v <= lo - eps) return T(lo);
    if (v >= hi + eps) return T(hi);
    if (v < lo + eps) return T(lo) + T(2.0 * eps) * smoothstep_integral((r - T(lo - eps)) / T(2.0 * eps));
    if (v > hi - eps) return T(hi) - T(2.0 * eps) * smoothstep_integral((T(hi + eps) - r) / T(2.0 * eps));
    return r;
  }

  double derivative(double r) const {
    if (r <= lo - eps || r >= hi + eps) return 0.0;
    if (r < lo + eps) return smoothstep((r - (lo - eps)) / (2.0 * eps));
    if (r > hi - eps) return smoothstep(((hi + eps) - r) / (2.0 * eps));
    return 1.0;
  }
};

enum class CollarKind {
  quadratic,  // H = beta(q) - 1, plateaus of beta at 1/2 and 3/2
  liouville,  // H = h(log q), plateaus of h at -delta/2 and delta/2
};

class DefiningHamiltonian {
 public:
  static constexpr double kDefaultMollification = 0.05;

  explicit DefiningHamiltonian(StarShapedModel model, CollarKind kind = CollarKind::quadratic,
                               double eps = kDefaultMollification, double delta = 0.5)
      : model_(std::move(model)), kind_(kind) {
    if (kind == CollarKind::quadratic) {
      if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("mollification width must lie in (0, 1/2)");
      profile_ = SmoothClamp{0.5, 1.5, eps};
    } else {
      if (!(delta > 0.0 && eps > 0.0 && eps < delta / 2.0))
        throw ConfigError("liouville collar needs 0 < eps < delta/2");
      profile_ = SmoothClamp{-delta / 2.0, delta / 2.0, eps};
    }
  }

  const StarShapedModel& model() const noexcept { return model_; }
  CollarKind kind() const noexcept { return kind_; }
  const SmoothClamp& profile() const noexcept { return profile_; }

  // dH vanishes outside this range of q.
  std::pair<double, double> support_levels() const {
    if (kind_ == CollarKind::quadratic) return {profile_.lo - profile_.eps, profile_.hi + profile_.eps};
    return {std::exp(profile_.lo - profile_.eps), std::exp(profile_.hi + profile_.eps)};
  }

  template <class T>
  T value(std::span<const T> x) const {
    const T q = model_.level(x);
    if (kind_ == CollarKind::quadratic) return profile_(q) - T(1.0);
    using std::log;
    return profile_(log(q));
  }

  double operator()(const RealVector& x) const {
    return value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  double operator()(const PhasePoint& z) const { return (*this)(to_real(z)); }

  RealVector vector_field(const RealVector& x) const {
    return hamiltonian_field([this](auto s) { return value(s); }, x);
  }
  Eigen::MatrixXd field_jacobian(const RealVector& x) const {
    return hamiltonian_field_jacobian([this](auto s) { return value(s); }, x);
  }

 private:
  StarShapedModel model_;
  CollarKind kind_;
  SmoothClamp profile_;
};

namespace detail {

inline State to_state(const RealVector& v) { return State(v.data(), v.data() + v.size()); }
inline RealVector from_state(const State& s) {
  return Eigen::Map<const RealVector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace detail

// Autonomous Hamiltonian flow phi^H_t.
inline PhasePoint hamiltonian_flow(const DefiningHamiltonian& h, const PhasePoint& z, double t,
                                   const IntegrationOptions& opts = {}) {
  auto rhs = [&h](const State& x, State& dx, double) {
    dx = detail::to_state(h.vector_field(detail::from_state(x)));
  };
  return to_complex(detail::from_state(integrate(rhs, detail::to_state(to_real(z)), 0.0, t, opts)));
}

// Differential of phi^H_s at z for each s in times (monotone, starting at 0).
inline std::vector<Eigen::MatrixXd> hamiltonian_flow_differentials(const DefiningHamiltonian& h,
                                                                   const PhasePoint& z,
                                                                   const std::vector<double>& times,
                                                                   const IntegrationOptions& opts = {}) {
  const Eigen::Index dim = 2 * z.size();
  const auto udim = static_cast<std::size_t>(dim);
  auto rhs = [&h, dim, udim](const State& s, State& ds, double) {
    const Eigen::Map<const RealVector> x(s.data(), dim);
    const Eigen::Map<const Eigen::MatrixXd> v(s.data() + udim, dim, dim);
    ds.resize(s.size());
    Eigen::Map<RealVector>(ds.data(), dim) = h.vector_field(x);
    Eigen::Map<Eigen::MatrixXd>(ds.data() + udim, dim, dim) = h.field_jacobian(x) * v;
  };
  State s(udim + udim * udim, 0.0);
  const RealVector x0 = to_real(z);
  std::copy(x0.data(), x0.data() + dim, s.begin());
  for (std::size_t i = 0; i < udim; ++i) s[udim + i * udim + i] = 1.0;
  std::vector<Eigen::MatrixXd> out;
  for (const auto& st : integrate_at(rhs, std::move(s), times, opts))
    out.emplace_back(Eigen::Map<const Eigen::MatrixXd>(st.data() + udim, dim, dim));
  return out;
}

// Time weight chi with its primitive tau(t) = int_0^t chi.
struct WeightProfile {
  std::function<double(double)> value;
  std::function<double(double)> primitive;
};

inline WeightProfile constant_weight() {
  return {[](double) { return 1.0; }, [](double t) { return t; }};
}

// chi(t) = 2 s'(2t) on [0, 1/2], zero afterwards; unit mass, C^1.
inline WeightProfile bump_weight() {
  return {[](double t) {
            if (t <= 0.0 || t >= 0.5) return 0.0;
            const double x = 2.0 * t;
            return 60.0 * x * x * (1.0 - x) * (1.0 - x);
          },
          [](double t) { return t <= 0.0 ? 0.0 : (t >= 0.5 ? 1.0 : smoothstep(2.0 * t)); }};
}

// Sup-norm deviation between the flow of the time-dependent field chi X_H
// and the autonomous flow at reparametrized time tau(s), over `checkpoints`
// evenly spaced times in [0, t].
inline double reparametrized_flow_check(const WeightProfile& chi, const DefiningHamiltonian& h,
                                        const PhasePoint& z, double t, int checkpoints = 32,
                                        const IntegrationOptions& opts = {}) {
  if (std::abs(chi.primitive(1.0) - 1.0) > 1e-12) throw ConfigError("weight must have unit mass");
  for (int i = 0; i <= 100; ++i)
    if (chi.value(i / 100.0) < 0.0) throw ConfigError("weight must be non-negative");

  auto weighted = [&h, &chi](const State& x, State& dx, double s) {
    const double w = chi.value(s);
    if (w == 0.0) {
      dx.assign(x.size(), 0.0);
      return;
    }
    dx = detail::to_state(w * h.vector_field(detail::from_state(x)));
  };
  auto autonomous = [&h](const State& x, State& dx, double) {
    dx = detail::to_state(h.vector_field(detail::from_state(x)));
  };

  std::vector<double> times, taus;
  for (int i = 0; i <= checkpoints; ++i) {
    times.push_back(t * i / checkpoints);
    taus.push_back(chi.primitive(times.back()));
  }
  const State x0 = detail::to_state(to_real(z));
  const auto lhs = integrate_at(weighted, x0, times, opts);
  const auto rhs = integrate_at(autonomous, x0, taus, opts);
  double dev = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    for (std::size_t c = 0; c < lhs[i].size(); ++c) dev = std::max(dev, std::abs(lhs[i][c] - rhs[i][c]));
  return dev;
}

struct BlendReport {
  double max_on_surface = 0.0;   // max |H_sigma| on sampled points of Sigma
  double min_off_surface = 0.0;  // min |H_sigma| at points pushed off Sigma
};

// Zero set of (1 - sigma) H0 + sigma H1, sampled on Sigma and on the
// Liouville pushes of Sigma to levels q = 1 +- offset.
inline BlendReport blend_zero_set(const DefiningHamiltonian& h0, const DefiningHamiltonian& h1, double sigma,
                                  int samples = 100, double offset = 0.05, unsigned seed = 3) {
  const StarShapedModel& model = h0.model();
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  BlendReport r{0.0, std::numeric_limits<double>::infinity()};
  for (int s = 0; s < samples; ++s) {
    PhasePoint u(model.dimension());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = Complex(g(rng), g(rng));
    const PhasePoint on = model.project(u).first;
    auto blend = [&](const PhasePoint& p) { return (1.0 - sigma) * h0(p) + sigma * h1(p); };
    r.max_on_surface = std::max(r.max_on_surface, std::abs(blend(on)));
    for (double level : {1.0 - offset, 1.0 + offset})
      r.min_off_surface = std::min(r.min_off_surface, std::abs(blend(std::sqrt(level) * on)));
  }
  return r;
}

}  // namespace rfh
