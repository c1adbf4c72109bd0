#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rfh/twisted_orbits.hpp"

using rfh::Complex;
using rfh::PhasePoint;
using rfh::RotationTwist;
using rfh::StarShapedModel;
using std::numbers::pi;

namespace {

PhasePoint random_unit(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  PhasePoint z(n);
  for (int j = 0; j < n; ++j) z[j] = Complex(g(rng), g(rng));
  return z / z.norm();
}

rfh::TwistedOrbit sphere_orbit(const PhasePoint& z, double tau) {
  rfh::TwistedOrbit o;
  o.z0 = z;
  o.tau = tau;
  o.support = rfh::detail::support_of(z);
  return o;
}

}  // namespace

TEST(AnalyticSpectrum, UniformTwist) {
  const auto t = rfh::analytic_spectrum(RotationTwist::uniform(2, 2), 2, 0, 1);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(t.entries[0].tau, -pi / 2);
  EXPECT_DOUBLE_EQ(t.entries[1].tau, pi / 2);
  for (const auto& e : t.entries) {
    EXPECT_EQ(e.support, (std::vector<int>{1, 2}));
    EXPECT_EQ(e.dim, 3);
  }
  EXPECT_EQ(t.entries[0].index, -2);
  EXPECT_EQ(t.entries[1].index, 2);
}

TEST(AnalyticSpectrum, Untwisted) {
  const auto t = rfh::analytic_spectrum(RotationTwist::uniform(1, 2), 2, 0, 2);
  ASSERT_EQ(t.entries.size(), 3u);
  EXPECT_DOUBLE_EQ(t.entries[0].tau, -pi);
  EXPECT_DOUBLE_EQ(t.entries[1].tau, 0.0);
  EXPECT_DOUBLE_EQ(t.entries[2].tau, pi);
}

TEST(AnalyticSpectrum, ConsecutiveValuesDifferByPi) {
  for (int m : {2, 3, 5}) {
    const auto t = rfh::analytic_spectrum(RotationTwist::uniform(m, 3), 3, -2, 4);
    for (std::size_t i = 1; i < t.entries.size(); ++i) EXPECT_NEAR(t.entries[i].tau - t.entries[i - 1].tau, pi, 1e-12);
  }
}

TEST(AnalyticSpectrum, MixedExponentsAgainstScan) {
  const RotationTwist twist(4, {1, 3});
  const auto t = rfh::analytic_spectrum(twist, 2, -1, 2);
  std::vector<double> ones, twos;
  for (const auto& e : t.entries) {
    ASSERT_EQ(e.support.size(), 1u);  // 1 and 3 are not congruent mod 4
    EXPECT_EQ(e.dim, 1);
    (e.support[0] == 1 ? ones : twos).push_back(e.tau);
  }
  const double lo = t.entries.front().tau - 0.1, hi = t.entries.back().tau + 0.1;
  const auto scan1 = oracle::scan_twist_condition(4, 1, lo, hi);
  const auto scan3 = oracle::scan_twist_condition(4, 3, lo, hi);
  ASSERT_EQ(scan1.size(), ones.size());
  ASSERT_EQ(scan3.size(), twos.size());
  for (std::size_t i = 0; i < ones.size(); ++i) EXPECT_NEAR(ones[i], scan1[i], 1e-9);
  for (std::size_t i = 0; i < twos.size(); ++i) EXPECT_NEAR(twos[i], scan3[i], 1e-9);
}

TEST(AnalyticSpectrum, Errors) {
  EXPECT_THROW(rfh::analytic_spectrum(RotationTwist::uniform(2, 2), 2, 3, 1), rfh::ConfigError);
  EXPECT_THROW(rfh::analytic_spectrum(RotationTwist::uniform(2, 2), 3, 0, 1), rfh::ConfigError);
}

TEST(Shoot, RoundSphereFromNearbySeed) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const auto r = rfh::shoot_orbit(sphere, RotationTwist::uniform(2, 2), rfh::make_point({1.0, 0.0}), 1.5);
  ASSERT_TRUE(r.ok()) << r.diagnostic.message;
  EXPECT_NEAR(r.orbit->tau, pi / 2, 1e-9);
  EXPECT_LE(r.orbit->residual, 1e-8);
  EXPECT_EQ(r.orbit->component_id, "S{1}/l=1");
}

TEST(Shoot, GenericSeedOnTheCriticalSphere) {
  const auto sphere = StarShapedModel::round_sphere(3);
  const RotationTwist twist = RotationTwist::uniform(3, 3);
  std::mt19937 rng(12);
  for (int s = 0; s < 5; ++s) {
    const double tau = oracle::sphere_tau(3, 1, 2);
    const auto r = rfh::shoot_orbit(sphere, twist, random_unit(3, rng), tau - 0.2);
    ASSERT_TRUE(r.ok()) << r.diagnostic.message;
    EXPECT_NEAR(r.orbit->tau, tau, 1e-9);
    EXPECT_EQ(r.orbit->support.size(), 3u);
  }
}

TEST(Shoot, ConstantProfileReproducesAnalyticTau) {
  const auto radial = StarShapedModel::radial(rfh::RadialProfile::constant(2));
  const auto r = rfh::shoot_orbit(radial, RotationTwist::uniform(2, 2), rfh::make_point({0.6, 0.8}), 1.45);
  ASSERT_TRUE(r.ok()) << r.diagnostic.message;
  EXPECT_NEAR(r.orbit->tau, pi / 2, 1e-6);
}

TEST(Shoot, VariationalJacobianAgrees) {
  const auto radial = StarShapedModel::radial({{1.0, 1.7}, {0.3, 0.0}});
  rfh::ShootOptions fd, var;
  var.variational_jacobian = true;
  const PhasePoint seed = radial.project(rfh::make_point({1.0, 0.0})).first;
  const double speed = rfh::reeb_field(seed, radial).norm() / seed.norm();
  const double guess = (2 * pi / speed) * 0.5 + 0.1;
  const auto a = rfh::shoot_orbit(radial, RotationTwist::uniform(2, 2), seed, guess, fd);
  const auto b = rfh::shoot_orbit(radial, RotationTwist::uniform(2, 2), seed, guess, var);
  ASSERT_TRUE(a.ok()) << a.diagnostic.message;
  ASSERT_TRUE(b.ok()) << b.diagnostic.message;
  EXPECT_NEAR(a.orbit->tau, b.orbit->tau, 1e-8);
}

TEST(Shoot, FarSeedGivesDiagnostic) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const auto r = rfh::shoot_orbit(sphere, RotationTwist::uniform(2, 2), rfh::make_point({1.0, 0.0}), 0.1);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.diagnostic.status, rfh::ShootStatus::converged);
  EXPECT_FALSE(r.diagnostic.message.empty());
}

TEST(Shoot, IterationCapReported) {
  const auto sphere = StarShapedModel::round_sphere(2);
  rfh::ShootOptions opts;
  opts.max_iterations = 0;
  const auto r = rfh::shoot_orbit(sphere, RotationTwist::uniform(2, 2), rfh::make_point({1.0, 0.0}), 1.5, opts);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostic.status, rfh::ShootStatus::max_iterations);
}

TEST(Shoot, SeedFarOffSurfaceRejected) {
  const auto sphere = StarShapedModel::round_sphere(2);
  EXPECT_THROW(rfh::shoot_orbit(sphere, RotationTwist::uniform(2, 2), rfh::make_point({3.0, 0.0}), 1.5),
               rfh::ConfigError);
}

TEST(Shoot, EllipsoidAxisOrbits) {
  // q = a1|z1|^2 + a2|z2|^2: on axis j the Reeb flow is e^{-2 i a_j t}.
  const auto model = StarShapedModel::radial({{1.0, 1.7}, {}});
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  for (int j = 0; j < 2; ++j) {
    const double a = j == 0 ? 1.0 : 1.7;
    const PhasePoint seed = model.project(PhasePoint::Unit(2, j).cast<Complex>()).first;
    const double exact = pi / (2.0 * a);
    const auto r = rfh::shoot_orbit(model, twist, seed, exact + 0.15);
    ASSERT_TRUE(r.ok()) << r.diagnostic.message;
    EXPECT_NEAR(r.orbit->tau, exact, 1e-8);
    EXPECT_EQ(r.orbit->support, (std::vector<int>{j + 1}));
  }
}

TEST(Action, EqualsPeriod) {
  const auto sphere = StarShapedModel::round_sphere(2);
  for (double tau : {pi / 2, -pi / 2}) {
    const auto o = sphere_orbit(rfh::make_point({0.6, 0.8}), tau);
    EXPECT_NEAR(rfh::action(o, sphere, 1000), tau, 1e-5);
  }
}

TEST(Action, SecondOrderConvergence) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const auto o = sphere_orbit(rfh::make_point({0.6, 0.8}), 3 * pi / 2);
  std::vector<double> logn, loge;
  for (int n : {250, 500, 1000, 2000}) {
    logn.push_back(std::log(n));
    loge.push_back(std::log(std::abs(rfh::action(o, sphere, n) - o.tau)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sx += logn[i];
    sy += loge[i];
    sxx += logn[i] * logn[i];
    sxy += logn[i] * loge[i];
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  EXPECT_NEAR(-slope, 2.0, 0.05);
}

TEST(Action, NumericModel) {
  const auto model = StarShapedModel::radial({{1.0, 1.7}, {0.2, 0.1}});
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const PhasePoint seed = model.project(rfh::make_point({1.0, 0.0})).first;
  const double speed = rfh::reeb_field(seed, model).norm() / seed.norm();
  const auto r = rfh::shoot_orbit(model, twist, seed, pi / speed + 0.1);
  ASSERT_TRUE(r.ok()) << r.diagnostic.message;
  EXPECT_NEAR(rfh::action(*r.orbit, model, 1000), r.orbit->tau, 1e-5);
}

TEST(Invariance, ReparametrizationAndTwist) {
  const auto model = StarShapedModel::radial({{1.0, 1.4}, {}});
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const PhasePoint seed = model.project(rfh::make_point({1.0, 0.0})).first;
  const auto r = rfh::shoot_orbit(model, twist, seed, pi / 2 + 0.1);
  ASSERT_TRUE(r.ok());
  const auto& o = *r.orbit;
  const PhasePoint shifted = rfh::reeb_flow(o.z0, 0.37, model);
  EXPECT_LE(rfh::twist_residual(shifted, o.tau, twist, model), 1e-8);
  EXPECT_LE(rfh::twist_residual(twist.apply(o.z0), o.tau, twist, model), 1e-8);
}

TEST(Monodromy, IdentityOnCriticalSphere) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto rep = rfh::monodromy(sphere_orbit(rfh::make_point({0.6, 0.8}), pi / 2), twist, sphere);
  EXPECT_LE(rep.tangent_defect, 1e-12);
  EXPECT_EQ(rep.kernel_dim_tangent, 3);
  EXPECT_EQ(rep.kernel_dim_xi, 2);
}

TEST(Monodromy, OffSpectrum) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const auto rep = rfh::return_map(rfh::make_point({0.6, 0.8}), pi / 2 + 0.1, RotationTwist::uniform(2, 2), sphere);
  EXPECT_EQ(rep.kernel_dim_xi, 0);
  EXPECT_GT(rep.tangent_defect, 0.1);
}

TEST(Monodromy, UntwistedFullPeriod) {
  const auto sphere = StarShapedModel::round_sphere(3);
  const auto rep = rfh::return_map(rfh::make_point({0.6, 0.0, 0.8}), pi, RotationTwist::uniform(1, 3), sphere);
  EXPECT_LE((rep.matrix - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
  EXPECT_EQ(rep.kernel_dim_tangent, 5);
}

TEST(Monodromy, EllipsoidCircleIsNondegenerateTransversally) {
  const auto model = StarShapedModel::radial({{1.0, 1.7}, {}});
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto r = rfh::shoot_orbit(model, twist, model.project(rfh::make_point({1.0, 0.0})).first, pi / 2 + 0.1);
  ASSERT_TRUE(r.ok());
  const auto rep = rfh::monodromy(*r.orbit, twist, model);
  EXPECT_EQ(rep.kernel_dim_tangent, 1);  // only the Reeb direction
  EXPECT_EQ(rep.kernel_dim_xi, 0);
}

TEST(GradientResidual, VanishesOnOrbits) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto o = sphere_orbit(rfh::make_point({0.6, 0.8}), pi / 2);
  EXPECT_LE(rfh::gradient_residual(rfh::sample_orbit(o, sphere, 500), o.tau, sphere, twist), 1e-4);
}

TEST(GradientResidual, LinearInTauPerturbation) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto o = sphere_orbit(rfh::make_point({0.6, 0.8}), pi / 2);
  const auto loop = rfh::sample_orbit(o, sphere, 500);
  std::vector<double> r;
  for (double eps : {0.01, 0.02, 0.04}) r.push_back(rfh::gradient_residual(loop, o.tau + eps, sphere, twist));
  EXPECT_NEAR(r[1] / r[0], 2.0, 0.02);
  EXPECT_NEAR(r[2] / r[1], 2.0, 0.02);
}

TEST(GradientResidual, ConstantLoopViolatesBoundary) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const PhasePoint z = rfh::make_point({0.6, 0.8});
  EXPECT_THROW(rfh::gradient_residual(std::vector<PhasePoint>(10, z), 0.0, sphere, RotationTwist::uniform(2, 2)),
               rfh::ConfigError);
}

TEST(NumericSpectrum, ConstantProfileMatchesAnalytic) {
  const auto radial = StarShapedModel::radial(rfh::RadialProfile::constant(2));
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto num = rfh::numeric_spectrum(radial, twist, 0, 1);
  const auto ana = rfh::analytic_spectrum(twist, 2, 0, 1);
  ASSERT_EQ(num.entries.size(), ana.entries.size());
  for (std::size_t i = 0; i < num.entries.size(); ++i) {
    EXPECT_NEAR(num.entries[i].tau, ana.entries[i].tau, 1e-6);
    EXPECT_EQ(num.entries[i].support, ana.entries[i].support);
    EXPECT_EQ(num.entries[i].dim, ana.entries[i].dim);
    EXPECT_EQ(num.entries[i].index, ana.entries[i].index);
  }
}

TEST(NumericSpectrum, EllipsoidCircles) {
  const auto model = StarShapedModel::radial({{1.0, 1.7}, {}});
  const auto t = rfh::numeric_spectrum(model, RotationTwist::uniform(2, 2), 1, 1);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_NEAR(t.entries[0].tau, pi / (2 * 1.7), 1e-8);
  EXPECT_NEAR(t.entries[1].tau, pi / 2, 1e-8);
  for (const auto& e : t.entries) EXPECT_EQ(e.dim, 1);
}

TEST(UnitaryPath, OrbitPathOnEllipsoidAxis) {
  const auto model = StarShapedModel::radial({{1.0, 1.7}, {}});
  const RotationTwist twist = RotationTwist::uniform(2, 2);
  const auto r = rfh::shoot_orbit(model, twist, model.project(rfh::make_point({1.0, 0.0})).first, pi / 2 + 0.1);
  ASSERT_TRUE(r.ok());
  const auto path = rfh::orbit_unitary_path(*r.orbit, model);
  // tracks rotate at -2 a_j
  EXPECT_NEAR(path.end_angle(0), -2.0 * r.orbit->tau, 1e-7);
  EXPECT_NEAR(path.end_angle(1), -2.0 * 1.7 * r.orbit->tau, 1e-7);
}
