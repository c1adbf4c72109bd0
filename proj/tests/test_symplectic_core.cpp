#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rfh/hamiltonian.hpp"
#include "rfh/phase_space.hpp"
#include "rfh/star_shaped.hpp"

using rfh::Complex;
using rfh::PhasePoint;
using rfh::StarShapedModel;
using std::numbers::pi;

namespace {

PhasePoint random_unit(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  PhasePoint z(n);
  for (int j = 0; j < n; ++j) z[j] = Complex(g(rng), g(rng));
  return z / z.norm();
}

const Complex I(0.0, 1.0);

}  // namespace

TEST(Liouville, FormValues) {
  EXPECT_DOUBLE_EQ(rfh::liouville_form_eval(rfh::make_point({1.0, 0.0}), rfh::make_point({I, 0.0})), -0.5);
  std::mt19937 rng(1);
  for (int s = 0; s < 20; ++s) {
    const PhasePoint z = random_unit(3, rng);
    EXPECT_NEAR(rfh::liouville_form_eval(z, z), 0.0, 1e-15);
    EXPECT_NEAR(rfh::liouville_form_eval(z, -2.0 * I * z), 1.0, 1e-14);
    EXPECT_NEAR(rfh::liouville_covector(z).dot(rfh::to_real(-2.0 * I * z)), 1.0, 1e-14);
  }
  EXPECT_THROW(rfh::liouville_form_eval(rfh::make_point({1.0}), rfh::make_point({1.0, 0.0})), rfh::DimensionError);
}

TEST(Reeb, RoundSphereField) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const PhasePoint r = rfh::reeb_field(rfh::make_point({1.0, 0.0}), sphere);
  EXPECT_NEAR(std::abs(r[0] - (-2.0 * I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r[1]), 0.0, 1e-15);
  std::mt19937 rng(2);
  for (int s = 0; s < 20; ++s) {
    const PhasePoint z = random_unit(2, rng);
    const PhasePoint v = rfh::reeb_field(z, sphere);
    EXPECT_NEAR(z.dot(v).real(), 0.0, 1e-14);  // Re<z, R(z)>
    EXPECT_NEAR(rfh::liouville_form_eval(z, v), 1.0, 1e-14);
  }
  EXPECT_THROW(rfh::reeb_field(rfh::make_point({2.0, 0.0}), sphere), rfh::ConfigError);
}

TEST(Reeb, RadialFieldOnConstantProfileMatchesSphere) {
  const auto radial = StarShapedModel::radial(rfh::RadialProfile::constant(3));
  std::mt19937 rng(3);
  for (int s = 0; s < 10; ++s) {
    const PhasePoint z = random_unit(3, rng);
    EXPECT_NEAR((rfh::reeb_field(z, radial) - (-2.0 * I * z)).norm(), 0.0, 1e-14);
  }
}

TEST(Reeb, RadialFieldIsReebOnEllipsoids) {
  // lambda(R) = 1 and R in ker(d lambda|_T Sigma) is checked through
  // omega(R, v) = 0 for tangent v.
  rfh::RadialProfile p{{1.0, 2.5, 0.7}, {0.3, 0.0, 0.4}};
  const auto model = StarShapedModel::radial(p);
  std::mt19937 rng(4);
  for (int s = 0; s < 10; ++s) {
    const PhasePoint z = model.project(random_unit(3, rng)).first;
    const PhasePoint r = rfh::reeb_field(z, model);
    EXPECT_NEAR(rfh::liouville_form_eval(z, r), 1.0, 1e-12);
    const rfh::RealVector grad = rfh::detail::gradient([&model](auto x) { return model.level(x); }, rfh::to_real(z));
    EXPECT_NEAR(grad.dot(rfh::to_real(r)), 0.0, 1e-12);
  }
}

TEST(ReebFlow, RoundSphereClosedForm) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const PhasePoint z = rfh::make_point({1.0, 0.0});
  EXPECT_NEAR((rfh::reeb_flow(z, pi / 2, sphere) - rfh::make_point({-1.0, 0.0})).norm(), 0.0, 1e-15);
  std::mt19937 rng(5);
  const PhasePoint w = random_unit(2, rng);
  EXPECT_NEAR((rfh::reeb_flow(w, pi, sphere) - w).norm(), 0.0, 1e-14);
}

TEST(ReebFlow, NumericMatchesAnalyticOnConstantProfile) {
  const auto sphere = StarShapedModel::round_sphere(2);
  const auto radial = StarShapedModel::radial(rfh::RadialProfile::constant(2));
  std::mt19937 rng(6);
  for (int s = 0; s < 5; ++s) {
    const PhasePoint z = random_unit(2, rng);
    for (double t : {0.3, 1.0, 2.0, pi})
      EXPECT_LE((rfh::reeb_flow(z, t, radial) - rfh::reeb_flow(z, t, sphere)).norm(), 1e-8) << t;
  }
}

TEST(ReebFlow, EquivarianceAndEnergy) {
  rfh::RadialProfile p{{1.0, 1.6}, {0.5, 0.2}};
  const auto model = StarShapedModel::radial(p);
  const rfh::RotationTwist twist(3, {1, 2});
  model.check_invariance(twist);
  std::mt19937 rng(7);
  for (int s = 0; s < 5; ++s) {
    const PhasePoint z = model.project(random_unit(2, rng)).first;
    const PhasePoint a = rfh::reeb_flow(twist.apply(z), 1.3, model);
    const PhasePoint b = twist.apply(rfh::reeb_flow(z, 1.3, model));
    EXPECT_LE((a - b).norm(), 1e-8);
    EXPECT_LE(std::abs(model.surface_defect(rfh::reeb_flow(z, 2.0, model))), 1e-8);
  }
}

TEST(ReebFlow, DifferentialMatchesFiniteDifferences) {
  rfh::RadialProfile p{{1.0, 1.6}, {0.5, 0.2}};
  const auto model = StarShapedModel::radial(p);
  std::mt19937 rng(8);
  const PhasePoint z = model.project(random_unit(2, rng)).first;
  rfh::FlowOptions relaxed;
  relaxed.surface_tol = 1e-3;
  relaxed.drift_tol = 1e-6;
  const Eigen::MatrixXd d = rfh::reeb_flow_differential(z, 0.9, model, relaxed);
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    rfh::RealVector e = rfh::RealVector::Zero(4);
    e[i] = h;
    const rfh::RealVector x = rfh::to_real(z);
    const rfh::RealVector col = (rfh::to_real(rfh::reeb_flow(rfh::to_complex(x + e), 0.9, model, relaxed)) -
                                 rfh::to_real(rfh::reeb_flow(rfh::to_complex(x - e), 0.9, model, relaxed))) /
                                (2 * h);
    EXPECT_LE((col - d.col(i)).norm(), 1e-6);
  }
}

TEST(Normalize, SphereAndEquivariance) {
  auto [u, delta] = rfh::normalize_to_sphere(rfh::make_point({2.0, 0.0}));
  EXPECT_NEAR(delta, -2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR((u - rfh::make_point({1.0, 0.0})).norm(), 0.0, 1e-15);
  EXPECT_NEAR((rfh::liouville_flow(rfh::make_point({2.0, 0.0}), delta) - u).norm(), 0.0, 1e-15);
  const auto [same, zero] = rfh::normalize_to_sphere(rfh::make_point({0.6, 0.8 * I}));
  EXPECT_NEAR(zero, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(same[1] - 0.8 * I), 0.0, 1e-15);
  EXPECT_THROW(rfh::normalize_to_sphere(rfh::make_point({0.0, 0.0})), rfh::ConfigError);

  const rfh::RotationTwist twist(5, {1, 2, 3});
  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  const auto model = StarShapedModel::round_sphere(3);
  for (int s = 0; s < 10; ++s) {
    PhasePoint x = 3.0 * std::abs(g(rng)) * random_unit(3, rng);
    EXPECT_NEAR(rfh::normalize_to_sphere(twist.apply(x), model).second, rfh::normalize_to_sphere(x, model).second,
                1e-14);
    // Liouville flow commutes with the twist
    EXPECT_LE((twist.apply(rfh::liouville_flow(x, 0.7)) - rfh::liouville_flow(twist.apply(x), 0.7)).norm(), 1e-14);
  }
}

TEST(Twist, Basics) {
  EXPECT_THROW(rfh::RotationTwist(4, {1, 2}), rfh::ConfigError);
  EXPECT_THROW(rfh::RotationTwist(0, {1}), rfh::ConfigError);
  const rfh::RotationTwist t(6, {1, 5});
  EXPECT_EQ(t.order(), 6);
  EXPECT_FALSE(t.exponents_congruent());
  const PhasePoint z = rfh::make_point({0.6, 0.8});
  PhasePoint w = z;
  for (int i = 0; i < 6; ++i) w = t.apply(w);
  EXPECT_NEAR((w - z).norm(), 0.0, 1e-14);
  EXPECT_EQ(t.eigenvalue(0, 6), Complex(1.0, 0.0));
  const rfh::RealVector x = rfh::to_real(z);
  EXPECT_NEAR((t.real_matrix(2) * x - rfh::to_real(t.apply(z, 2))).norm(), 0.0, 1e-15);
}

TEST(Model, RejectsBadProfiles) {
  EXPECT_THROW(StarShapedModel::radial({{1.0, 0.0}, {}}), rfh::ConfigError);
  EXPECT_THROW(StarShapedModel::radial({{1.0, 1.0}, {1.0}}), rfh::ConfigError);
  const auto model = StarShapedModel::radial({{1.0, 2.0}, {}});
  EXPECT_THROW(model.check_invariance(rfh::RotationTwist(2, {1})), rfh::ConfigError);
}

TEST(DefiningHamiltonian, ZeroSetFieldAndSupport) {
  for (auto kind : {rfh::CollarKind::quadratic, rfh::CollarKind::liouville}) {
    const rfh::DefiningHamiltonian h(StarShapedModel::radial({{1.0, 1.8}, {0.4, 0.0}}), kind);
    std::mt19937 rng(10);
    for (int s = 0; s < 10; ++s) {
      const PhasePoint z = h.model().project(random_unit(2, rng)).first;
      EXPECT_NEAR(h(z), 0.0, 1e-14);
      const rfh::RealVector xh = h.vector_field(rfh::to_real(z));
      EXPECT_LE((xh - h.model().reeb_field_real(rfh::to_real(z))).norm(), 1e-12);
      const auto [lo, hi] = h.support_levels();
      // outside the collar the field vanishes
      EXPECT_EQ(h.vector_field(rfh::to_real(std::sqrt(hi * 1.01) * z)).norm(), 0.0);
      EXPECT_EQ(h.vector_field(rfh::to_real(std::sqrt(lo * 0.99) * z)).norm(), 0.0);
    }
  }
}

TEST(DefiningHamiltonian, TwistInvariant) {
  const rfh::DefiningHamiltonian h(StarShapedModel::round_sphere(2));
  const rfh::RotationTwist t(3, {1, 1});
  std::mt19937 rng(11);
  for (int s = 0; s < 10; ++s) {
    const PhasePoint z = 1.1 * random_unit(2, rng);
    EXPECT_NEAR(h(t.apply(z)), h(z), 1e-15);
  }
}

TEST(SmoothClamp, ContinuityAndDerivative) {
  const rfh::SmoothClamp c{0.5, 1.5, 0.05};
  for (double r : {0.45, 0.55, 1.45, 1.55}) {
    EXPECT_NEAR(c(r - 1e-12), c(r + 1e-12), 1e-10);
    EXPECT_NEAR(c.derivative(r - 1e-12), c.derivative(r + 1e-12), 1e-9);
  }
  for (double r = 0.3; r < 1.7; r += 0.013) {
    const double fd = (c(r + 1e-7) - c(r - 1e-7)) / 2e-7;
    EXPECT_NEAR(fd, c.derivative(r), 1e-6) << r;
  }
  EXPECT_DOUBLE_EQ(c(1.0), 1.0);
  EXPECT_DOUBLE_EQ(c(0.0), 0.5);
  EXPECT_DOUBLE_EQ(c(2.0), 1.5);
}

TEST(Reparametrization, ConstantWeight) {
  const rfh::DefiningHamiltonian h(StarShapedModel::round_sphere(2));
  EXPECT_LE(rfh::reparametrized_flow_check(rfh::constant_weight(), h, rfh::make_point({0.6, 0.8}), 1.0), 1e-8);
}

TEST(Reparametrization, BumpWeightEndpointAndDeadZone) {
  const rfh::DefiningHamiltonian h(StarShapedModel::radial({{1.0, 1.4}, {}}));
  const PhasePoint z = h.model().project(rfh::make_point({0.6, 0.8 * I})).first;
  EXPECT_LE(rfh::reparametrized_flow_check(rfh::bump_weight(), h, z, 1.0), 1e-6);
  const auto chi = rfh::bump_weight();
  for (double t : {0.5, 0.7, 1.0}) EXPECT_EQ(chi.primitive(t), 1.0);
  EXPECT_NEAR(h.model().level(rfh::hamiltonian_flow(h, z, 1.0)), 1.0, 1e-9);
}

TEST(Blend, ConvexCombinationsKeepTheZeroSet) {
  const auto model = StarShapedModel::radial({{1.0, 1.3}, {0.2, 0.1}});
  const rfh::DefiningHamiltonian h0(model, rfh::CollarKind::quadratic);
  const rfh::DefiningHamiltonian h1(model, rfh::CollarKind::liouville);
  for (double sigma : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto r = rfh::blend_zero_set(h0, h1, sigma);
    EXPECT_LE(r.max_on_surface, 1e-12);
    EXPECT_GT(r.min_off_surface, 1e-3);
  }
}
