#pragma once

// Twisted periodic Reeb orbits: pairs (z, tau) with phi^R_tau(z) = phi(z).
// Closed-form spectrum on the round sphere, Gauss-Newton shooting for any
// star-shaped model, and the certification quantities attached to an orbit.

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfh/cz_index.hpp"
#include "rfh/errors.hpp"
#include "rfh/hamiltonian.hpp"
#include "rfh/phase_space.hpp"
#include "rfh/star_shaped.hpp"

namespace rfh {

struct TwistedOrbit {
  PhasePoint z0;
  double tau = 0.0;
  std::vector<int> support;  // 1-based coordinates with z0^j != 0
  double residual = 0.0;     // |phi^R_tau(z0) - phi^power(z0)|
  std::string component_id;
  int twist_power = 1;
};

struct SpectrumEntry {
  double tau = 0.0;
  std::vector<int> support;   // 1-based
  int dim = 0;                // dimension of the critical sphere
  std::optional<long> index;  // full Conley-Zehnder index, when computed
  long l = 0;                 // integer label of the branch

  friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

struct SpectrumTable {
  long l_min = 0;
  long l_max = 0;
  std::vector<SpectrumEntry> entries;

  friend bool operator==(const SpectrumTable&, const SpectrumTable&) = default;
};

namespace detail {

inline std::string support_label(const std::vector<int>& support) {
  std::ostringstream os;
  os << "S{";
  for (std::size_t i = 0; i < support.size(); ++i) os << (i ? "," : "") << support[i];
  os << "}";
  return os.str();
}

inline std::vector<int> support_of(const PhasePoint& z, double tol = 1e-8) {
  std::vector<int> s;
  for (Eigen::Index j = 0; j < z.size(); ++j)
    if (std::abs(z[j]) > tol) s.push_back(static_cast<int>(j) + 1);
  return s;
}

// Index of the linearized flow e^{-2 i tau t} I_n of the round sphere.
inline long sphere_index(double tau, int n) {
  return static_cast<long>(cz_index_unitary(UnitaryPath::rotation(std::vector<double>(static_cast<std::size_t>(n), -2.0 * tau))).value());
}

}  // namespace detail

// Round sphere: coordinates whose exponents agree mod m span one critical
// sphere per branch, with tau = pi (m l - k_S) / m, k_S the exponent of the
// first coordinate in the class.
inline SpectrumTable analytic_spectrum(const RotationTwist& twist, int n, long l_min, long l_max) {
  if (l_max < l_min) throw ConfigError("analytic_spectrum: empty window");
  if (twist.dimension() != n) throw ConfigError("analytic_spectrum: twist has the wrong number of exponents");
  const int m = twist.modulus();

  std::map<int, std::vector<int>> classes;  // residue -> 1-based coordinates
  for (int j = 0; j < n; ++j) classes[twist.residue(j)].push_back(j + 1);

  SpectrumTable table{l_min, l_max, {}};
  for (const auto& [residue, coords] : classes) {
    const int k_s = twist.exponents()[static_cast<std::size_t>(coords.front() - 1)];
    for (long l = l_min; l <= l_max; ++l) {
      const double tau = std::numbers::pi * static_cast<double>(m * l - k_s) / m;
      table.entries.push_back({tau, coords, 2 * static_cast<int>(coords.size()) - 1,
                               detail::sphere_index(tau, n), l});
    }
  }
  std::sort(table.entries.begin(), table.entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    return a.tau < b.tau || (a.tau == b.tau && a.support < b.support);
  });
  return table;
}

inline double twist_residual(const PhasePoint& z, double tau, const RotationTwist& twist,
                             const StarShapedModel& model, int power = 1, const FlowOptions& opts = {}) {
  return (reeb_flow(z, tau, model, opts) - twist.apply(z, power)).norm();
}

// Samples gamma(i/N) = phi^R_{tau i/N}(z0), i = 0..N.
inline std::vector<PhasePoint> sample_orbit(const TwistedOrbit& orbit, const StarShapedModel& model, int samples,
                                            const FlowOptions& opts = {}) {
  if (samples < 1) throw ConfigError("sample_orbit: need at least one interval");
  std::vector<double> times(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) times[static_cast<std::size_t>(i)] = orbit.tau * i / samples;
  return reeb_trajectory(orbit.z0, times, model, opts);
}

// Branch label l from the clockwise winding of the first supported
// coordinate: e^{-i w 2 pi} = e^{2 pi i p k_S / m}  =>  w = l - p k_S / m.
inline long branch_label(const TwistedOrbit& orbit, const RotationTwist& twist, const StarShapedModel& model,
                         const FlowOptions& opts = {}) {
  if (orbit.support.empty()) return 0;
  const auto j = static_cast<Eigen::Index>(orbit.support.front() - 1);
  const int samples = std::max(64, static_cast<int>(std::ceil(8.0 * std::abs(orbit.tau))));
  const auto pts = sample_orbit(orbit, model, samples, opts);
  double swept = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) swept += std::arg(pts[i][j] / pts[i - 1][j]);
  const double winding = -swept / (2.0 * std::numbers::pi);
  const int m = twist.modulus();
  const double k_s = twist.exponents()[static_cast<std::size_t>(j)] * static_cast<double>(orbit.twist_power);
  return std::lround((m * winding + k_s) / m);
}

struct ShootOptions {
  double newton_tol = 1e-11;   // target for the full residual vector
  double certify_tol = 1e-8;   // max twist residual of a returned orbit
  double fd_step = 1e-6;
  int max_iterations = 50;
  int max_halvings = 8;
  double capture_radius = 0.5;  // max |tau - seed tau|
  double seed_tol = 0.1;        // max |log q| of the seed point
  double rank_threshold = 1e-9;
  bool variational_jacobian = false;
  int twist_power = 1;
  FlowOptions flow{};
};

enum class ShootStatus {
  converged,
  max_iterations,
  singular_jacobian,
  stalled,
  left_neighbourhood,
  integration_failure,
};

inline const char* to_string(ShootStatus s) {
  switch (s) {
    case ShootStatus::converged: return "converged";
    case ShootStatus::max_iterations: return "max-iterations";
    case ShootStatus::singular_jacobian: return "singular-jacobian";
    case ShootStatus::stalled: return "stalled";
    case ShootStatus::left_neighbourhood: return "left-seed-neighbourhood";
    case ShootStatus::integration_failure: return "integration-failure";
  }
  return "unknown";
}

struct ShootDiagnostic {
  ShootStatus status = ShootStatus::stalled;
  int iterations = 0;
  double residual = 0.0;
  double tau = 0.0;
  std::string message;
};

struct ShootResult {
  std::optional<TwistedOrbit> orbit;
  ShootDiagnostic diagnostic;

  bool ok() const noexcept { return orbit.has_value(); }
};

namespace detail {

// Residual of the shooting system at u = (x, tau): the twist condition,
// the surface constraint log q = 0 and a section through the seed
// transverse to the Reeb direction.
class ShootingSystem {
 public:
  ShootingSystem(const StarShapedModel& model, const RotationTwist& twist, const RealVector& section_point,
                 const ShootOptions& opts)
      : model_(model), opts_(opts), anchor_(section_point),
        phi_(twist.real_matrix(opts.twist_power)) {
    normal_ = model.reeb_field_real(section_point);
    normal_ /= normal_.norm();
    flow_opts_ = opts.flow;
    flow_opts_.surface_tol = 1.0;  // finite-difference probes leave Sigma slightly
    flow_opts_.drift_tol = 1e-6;
  }

  Eigen::Index dim() const { return anchor_.size(); }

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
    const Eigen::Index d = dim();
    const RealVector x = u.head(d);
    Eigen::VectorXd f(d + 2);
    f.head(d) = to_real(reeb_flow(to_complex(x), u[d], model_, flow_opts_)) - phi_ * x;
    f[d] = std::log(model_.level(x));
    f[d + 1] = normal_.dot(x - anchor_);
    return f;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
    const Eigen::Index d = dim();
    Eigen::MatrixXd j(d + 2, d + 1);
    if (opts_.variational_jacobian) {
      const RealVector x = u.head(d);
      const PhasePoint z = to_complex(x);
      j.block(0, 0, d, d) = reeb_flow_differential(z, u[d], model_, flow_opts_) - phi_;
      j.block(0, d, d, 1) = model_.reeb_field_real(to_real(reeb_flow(z, u[d], model_, flow_opts_)));
      const RealVector g = detail::gradient([this](auto s) {
        using std::log;
        return log(model_.level(s));
      }, x);
      j.block(d, 0, 1, d) = g.transpose();
      j(d, d) = 0.0;
      j.block(d + 1, 0, 1, d) = normal_.transpose();
      j(d + 1, d) = 0.0;
      return j;
    }
    for (Eigen::Index i = 0; i <= d; ++i) {
      Eigen::VectorXd up = u, um = u;
      up[i] += opts_.fd_step;
      um[i] -= opts_.fd_step;
      j.col(i) = (residual(up) - residual(um)) / (2.0 * opts_.fd_step);
    }
    return j;
  }

 private:
  const StarShapedModel& model_;
  const ShootOptions& opts_;
  RealVector anchor_;
  RealVector normal_;
  Eigen::MatrixXd phi_;
  FlowOptions flow_opts_;
};

}  // namespace detail

// Damped Gauss-Newton on (z, tau). Steps are minimum-norm least-squares
// solutions, so directions along a Morse-Bott critical manifold are simply
// not moved. Never fabricates an orbit: failures come back as diagnostics.
inline ShootResult shoot_orbit(const StarShapedModel& model, const RotationTwist& twist, const PhasePoint& seed_z,
                               double seed_tau, const ShootOptions& opts = {}) {
  if (twist.dimension() != model.dimension()) throw ConfigError("shoot_orbit: twist and model dimensions differ");
  if (seed_z.size() != model.dimension()) throw ConfigError("shoot_orbit: seed has the wrong dimension");
  if (!(std::abs(model.surface_defect(seed_z)) <= opts.seed_tol))
    throw ConfigError("shoot_orbit: seed is not near the hypersurface");

  ShootResult result;
  ShootDiagnostic& diag = result.diagnostic;
  const PhasePoint start = model.project(seed_z).first;
  const RealVector x0 = to_real(start);
  const Eigen::Index d = x0.size();

  try {
    detail::ShootingSystem system(model, twist, x0, opts);
    Eigen::VectorXd u(d + 1);
    u.head(d) = x0;
    u[d] = seed_tau;
    Eigen::VectorXd f = system.residual(u);
    diag.residual = f.norm();

    bool done = diag.residual <= opts.newton_tol;
    while (!done) {
      if (diag.iterations == opts.max_iterations) {
        diag.status = ShootStatus::max_iterations;
        break;
      }
      ++diag.iterations;
      const Eigen::MatrixXd jac = system.jacobian(u);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
      cod.setThreshold(opts.rank_threshold);
      if (cod.rank() == 0) {
        diag.status = ShootStatus::singular_jacobian;
        break;
      }
      const Eigen::VectorXd step = cod.solve(f);
      double scale = 1.0;
      bool accepted = false;
      for (int h = 0; h <= opts.max_halvings; ++h, scale *= 0.5) {
        const Eigen::VectorXd trial = u - scale * step;
        Eigen::VectorXd ft;
        try {
          ft = system.residual(trial);
        } catch (const Error&) {
          continue;  // trial left the collar around Sigma
        }
        if (ft.norm() < diag.residual) {
          u = trial;
          f = ft;
          diag.residual = ft.norm();
          accepted = true;
          break;
        }
      }
      if (std::abs(u[d] - seed_tau) > opts.capture_radius) {
        diag.status = ShootStatus::left_neighbourhood;
        break;
      }
      if (!accepted) {
        // Floating-point floor reached; accept if already certifiable.
        done = diag.residual <= opts.certify_tol;
        if (!done) diag.status = ShootStatus::stalled;
        break;
      }
      done = diag.residual <= opts.newton_tol;
    }
    diag.tau = u[d];
    if (done) {
      TwistedOrbit orbit;
      orbit.z0 = model.project(to_complex(u.head(d))).first;
      orbit.tau = u[d];
      orbit.twist_power = opts.twist_power;
      orbit.support = detail::support_of(orbit.z0);
      orbit.residual = twist_residual(orbit.z0, orbit.tau, twist, model, opts.twist_power, opts.flow);
      if (orbit.residual <= opts.certify_tol) {
        const long l = branch_label(orbit, twist, model, opts.flow);
        orbit.component_id = detail::support_label(orbit.support) + "/l=" + std::to_string(l);
        diag.status = ShootStatus::converged;
        diag.residual = orbit.residual;
        result.orbit = std::move(orbit);
      } else {
        diag.status = ShootStatus::stalled;
        diag.residual = orbit.residual;
      }
    }
  } catch (const SolverError& e) {
    diag.status = ShootStatus::integration_failure;
    diag.message = e.what();
  }
  if (diag.message.empty()) {
    std::ostringstream os;
    os << to_string(diag.status) << " after " << diag.iterations << " iterations, residual " << diag.residual
       << ", tau " << diag.tau;
    diag.message = os.str();
  }
  return result;
}

// Integral of gamma^* lambda over the polygon through the orbit samples.
// On each chord lambda is integrated exactly (the trapezoidal rule for a
// form linear in the base point), so the error is O(N^-2).
inline double action(const TwistedOrbit& orbit, const StarShapedModel& model, int samples = 1000,
                     const FlowOptions& opts = {}) {
  const auto pts = sample_orbit(orbit, model, samples, opts);
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const PhasePoint mid = 0.5 * (pts[i] + pts[i - 1]);
    acc += liouville_form_eval(mid, pts[i] - pts[i - 1]);
  }
  return acc;
}

struct MonodromyReport {
  Eigen::MatrixXd matrix;            // D(phi o phi^R_{-tau}) at z, 2n x 2n
  double tangent_defect = 0.0;       // ||(M - I)|_{T Sigma}||_2
  int kernel_dim_tangent = 0;        // dim ker(M - I) on T_z Sigma
  int kernel_dim_xi = 0;             // dim ker(M - I) on xi_z = ker lambda cap T_z Sigma
  Eigen::VectorXd tangent_singular_values;
};

namespace detail {

// Orthonormal basis of the orthogonal complement of the given columns.
inline Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& constraints) {
  const Eigen::Index dim = constraints.rows();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints.transpose(), Eigen::ComputeFullV);
  const Eigen::Index r = svd.rank();
  return svd.matrixV().rightCols(dim - r);
}

inline int count_small(const Eigen::VectorXd& sv, double tol) {
  int c = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= tol) ++c;
  return c;
}

}  // namespace detail

// Linearized return map D(phi^power o phi^R_{-tau}) at z, restricted to
// T_z Sigma and to the contact plane xi_z. Need not be a certified orbit:
// off the spectrum the report measures how far M is from fixing T_z Sigma.
inline MonodromyReport return_map(const PhasePoint& z, double tau, const RotationTwist& twist,
                                  const StarShapedModel& model, int power = 1, double kernel_tol = 1e-6,
                                  const FlowOptions& opts = {}) {
  MonodromyReport rep;
  rep.matrix = twist.real_matrix(power) * reeb_flow_differential(z, -tau, model, opts);
  const Eigen::Index dim = rep.matrix.rows();
  const RealVector x = to_real(z);
  const RealVector normal = detail::gradient([&model](auto s) { return model.level(s); }, x);

  Eigen::MatrixXd c1(dim, 1);
  c1.col(0) = normal;
  const Eigen::MatrixXd tangent = detail::complement_basis(c1);
  Eigen::MatrixXd c2(dim, 2);
  c2.col(0) = normal;
  c2.col(1) = liouville_covector(z);
  const Eigen::MatrixXd xi = detail::complement_basis(c2);

  const Eigen::MatrixXd defect = rep.matrix - Eigen::MatrixXd::Identity(dim, dim);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_t(defect * tangent);
  rep.tangent_singular_values = svd_t.singularValues();
  rep.tangent_defect = rep.tangent_singular_values.size() ? rep.tangent_singular_values[0] : 0.0;
  rep.kernel_dim_tangent = detail::count_small(rep.tangent_singular_values, kernel_tol);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_x(defect * xi);
  rep.kernel_dim_xi = detail::count_small(svd_x.singularValues(), kernel_tol);
  return rep;
}

inline MonodromyReport monodromy(const TwistedOrbit& orbit, const RotationTwist& twist, const StarShapedModel& model,
                                 double kernel_tol = 1e-6, const FlowOptions& opts = {}) {
  return return_map(orbit.z0, orbit.tau, twist, model, orbit.twist_power, kernel_tol, opts);
}

// Discrete L^2 norm of the gradient (J(gamma' - tau X_H(gamma)), -int H(gamma))
// for loop samples gamma_0..gamma_N on [0, 1] with gamma_N = phi(gamma_0).
// Midpoint differences, so the value is O(N^-2) on exact orbits.
inline double gradient_residual(const std::vector<PhasePoint>& loop, double tau, const StarShapedModel& model,
                                const RotationTwist& twist, int power = 1, double boundary_tol = 1e-8) {
  if (loop.size() < 2) throw ConfigError("gradient_residual: need at least two samples");
  const double gap = (loop.back() - twist.apply(loop.front(), power)).norm();
  if (!(gap <= boundary_tol))
    throw ConfigError("gradient_residual: twist-boundary violation (|gamma(1) - phi(gamma(0))| = " +
                      std::to_string(gap) + ")");
  const DefiningHamiltonian h(model);
  const double n = static_cast<double>(loop.size() - 1);
  const double dt = 1.0 / n;
  double loop_part = 0.0, mean_h = 0.0;
  RealVector prev_x = to_real(loop.front());
  RealVector prev_field = h.vector_field(prev_x);
  double prev_h = h(prev_x);
  for (std::size_t i = 1; i < loop.size(); ++i) {
    const RealVector x = to_real(loop[i]);
    const RealVector field = h.vector_field(x);
    const double hv = h(x);
    const RealVector g = (x - prev_x) / dt - tau * 0.5 * (field + prev_field);
    loop_part += g.squaredNorm() * dt;
    mean_h += 0.5 * (hv + prev_h) * dt;
    prev_x = x;
    prev_field = field;
    prev_h = hv;
  }
  return std::sqrt(loop_part + mean_h * mean_h);
}

// Unitary path Psi_t = D phi^H_{tau t}|_{z0} of the defining Hamiltonian.
// Exact on the round sphere; otherwise integrated and required to be
// complex-diagonal unitary in the coordinate frame.
inline UnitaryPath orbit_unitary_path(const TwistedOrbit& orbit, const StarShapedModel& model, int samples = 0,
                                      double unitary_tol = 1e-6) {
  const int n = model.dimension();
  if (model.kind() == ModelKind::round_sphere)
    return UnitaryPath::rotation(std::vector<double>(static_cast<std::size_t>(n), -2.0 * orbit.tau));

  if (samples <= 0) samples = std::max(64, static_cast<int>(std::ceil(8.0 * std::abs(orbit.tau))));
  std::vector<double> times(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) times[static_cast<std::size_t>(i)] = orbit.tau * i / samples;
  const DefiningHamiltonian h(model);
  const auto diffs = hamiltonian_flow_differentials(h, orbit.z0, times);

  std::vector<double> ts(times.size());
  std::vector<std::vector<double>> tracks(static_cast<std::size_t>(n), std::vector<double>(times.size(), 0.0));
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    ts[i] = static_cast<double>(i) / samples;
    const Eigen::MatrixXd& psi = diffs[i];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double block = psi.block(2 * a, 2 * b, 2, 2).norm();
        if (a != b && block > unitary_tol)
          throw DimensionError("orbit_unitary_path: linearized flow is not complex-diagonal");
      }
    for (int a = 0; a < n; ++a) {
      const double re = psi(2 * a, 2 * a), im = psi(2 * a + 1, 2 * a);
      if (std::abs(psi(2 * a + 1, 2 * a + 1) - re) > unitary_tol || std::abs(psi(2 * a, 2 * a + 1) + im) > unitary_tol ||
          std::abs(std::hypot(re, im) - 1.0) > unitary_tol)
        throw DimensionError("orbit_unitary_path: linearized flow is not unitary");
      const double angle = std::atan2(im, re);
      auto& tr = tracks[static_cast<std::size_t>(a)];
      tr[i] = (i == 0) ? angle : tr[i - 1] + std::remainder(angle - tr[i - 1], 2.0 * std::numbers::pi);
    }
  }
  return UnitaryPath(std::move(ts), std::move(tracks));
}

// Spectrum of a general model by shooting from the coordinate circles: the
// seed period uses the local angular speed w of the Reeb flow on that circle.
// Orbits with equal tau (within 1e-6) merge into one component, whose
// dimension is the tangent kernel of the return map.
inline SpectrumTable numeric_spectrum(const StarShapedModel& model, const RotationTwist& twist, long l_min, long l_max,
                                      const ShootOptions& opts = {}) {
  if (l_max < l_min) throw ConfigError("numeric_spectrum: empty window");
  const int n = model.dimension();
  const int m = twist.modulus();

  struct Seed {
    PhasePoint z;
    double tau;
    long l;
  };
  std::vector<Seed> seeds;
  for (int j = 0; j < n; ++j) {
    const PhasePoint axis = model.project(PhasePoint::Unit(n, j).cast<Complex>()).first;
    const double speed = reeb_field(axis, model, 1e-6).norm() / axis.norm();
    for (long l = l_min; l <= l_max; ++l) {
      const double k_j = static_cast<double>(twist.exponents()[static_cast<std::size_t>(j)]) * opts.twist_power;
      seeds.push_back({axis, (2.0 * std::numbers::pi / speed) * (m * l - k_j) / m, l});
    }
  }

  std::vector<std::future<ShootResult>> jobs;
  for (const auto& s : seeds)
    jobs.push_back(std::async(std::launch::async, [&model, &twist, &opts, s] {
      return shoot_orbit(model, twist, s.z, s.tau, opts);
    }));

  SpectrumTable table{l_min, l_max, {}};
  std::vector<TwistedOrbit> reps;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    ShootResult r = jobs[i].get();
    if (!r.ok()) throw SolverError("numeric_spectrum: " + r.diagnostic.message);
    const TwistedOrbit& orbit = *r.orbit;
    auto same = std::find_if(table.entries.begin(), table.entries.end(),
                             [&](const SpectrumEntry& e) { return std::abs(e.tau - orbit.tau) <= 1e-6; });
    if (same != table.entries.end()) {
      std::vector<int> merged;
      std::set_union(same->support.begin(), same->support.end(), orbit.support.begin(), orbit.support.end(),
                     std::back_inserter(merged));
      same->support = merged;
      continue;
    }
    SpectrumEntry e;
    e.tau = orbit.tau;
    e.support = orbit.support;
    e.l = seeds[i].l;
    e.dim = monodromy(orbit, twist, model).kernel_dim_tangent;
    try {
      e.index = static_cast<long>(cz_index_unitary(orbit_unitary_path(orbit, model)).value());
    } catch (const DimensionError&) {
      e.index.reset();
    }
    table.entries.push_back(e);
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.tau < b.tau; });
  return table;
}

}  // namespace rfh
