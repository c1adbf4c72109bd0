#pragma once

// Points of C^n, the Liouville form lambda = 1/2 sum (y dx - x dy), the
// Liouville flow and the rotation twists phi(z)^j = exp(2 pi i k_j / m) z^j.

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rfh/errors.hpp"

namespace rfh {

using Complex = std::complex<double>;
using PhasePoint = Eigen::VectorXcd;
// Real coordinates are interleaved: (x^1, y^1, x^2, y^2, ...).
using RealVector = Eigen::VectorXd;

inline RealVector to_real(const PhasePoint& z) {
  RealVector x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

inline PhasePoint to_complex(const RealVector& x) {
  if (x.size() % 2 != 0) throw DimensionError("to_complex: odd number of real coordinates");
  PhasePoint z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = Complex(x[2 * j], x[2 * j + 1]);
  return z;
}

inline PhasePoint make_point(std::initializer_list<Complex> coords) {
  PhasePoint z(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index j = 0;
  for (const auto& c : coords) z[j++] = c;
  return z;
}

// lambda_z(v) = 1/2 sum Im(conj(v^j) z^j).
inline double liouville_form_eval(const PhasePoint& z, const PhasePoint& v) {
  if (z.size() != v.size()) throw DimensionError("liouville_form_eval: dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) acc += (std::conj(v[j]) * z[j]).imag();
  return 0.5 * acc;
}

// The real vector L with lambda_z(v) = <L, v> in interleaved coordinates.
inline RealVector liouville_covector(const PhasePoint& z) {
  RealVector l(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    l[2 * j] = 0.5 * z[j].imag();
    l[2 * j + 1] = -0.5 * z[j].real();
  }
  return l;
}

// Flow of X = 1/2 (x d/dx + y d/dy), which scales by exp(t/2).
inline PhasePoint liouville_flow(const PhasePoint& z, double t) { return std::exp(0.5 * t) * z; }

// (z/|z|, delta) with liouville_flow(z, delta) on the unit sphere.
inline std::pair<PhasePoint, double> normalize_to_sphere(const PhasePoint& z) {
  const double r = z.norm();
  if (!(r > 0.0)) throw ConfigError("normalize_to_sphere: zero input");
  return {z / r, -2.0 * std::log(r)};
}

class RotationTwist {
 public:
  RotationTwist() : RotationTwist(1, {1}) {}

  RotationTwist(int m, std::vector<int> k) : m_(m), k_(std::move(k)) {
    if (m_ < 1) throw ConfigError("twist modulus m must be positive");
    if (k_.empty()) throw ConfigError("twist needs at least one exponent");
    for (int kj : k_)
      if (std::gcd(kj, m_) != 1)
        throw ConfigError("twist exponent " + std::to_string(kj) + " is not coprime to m = " +
                          std::to_string(m_));
  }

  static RotationTwist uniform(int m, int n, int k = 1) {
    return RotationTwist(m, std::vector<int>(static_cast<std::size_t>(n), k));
  }

  int modulus() const noexcept { return m_; }
  int dimension() const noexcept { return static_cast<int>(k_.size()); }
  const std::vector<int>& exponents() const noexcept { return k_; }

  // Residue of power * k_j in [0, m).
  int residue(int j, int power = 1) const {
    const long r = (static_cast<long>(k_[static_cast<std::size_t>(j)]) * power) % m_;
    return static_cast<int>(r < 0 ? r + m_ : r);
  }

  Complex eigenvalue(int j, int power = 1) const {
    const int r = residue(j, power);
    if (r == 0) return {1.0, 0.0};
    const double angle = 2.0 * std::numbers::pi * r / m_;
    return {std::cos(angle), std::sin(angle)};
  }

  PhasePoint apply(const PhasePoint& z, int power = 1) const {
    check_dim(z.size());
    PhasePoint w(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) w[j] = eigenvalue(static_cast<int>(j), power) * z[j];
    return w;
  }

  // Real 2n x 2n matrix of phi^power in interleaved coordinates.
  Eigen::MatrixXd real_matrix(int power = 1) const {
    const Eigen::Index n = dimension();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex e = eigenvalue(static_cast<int>(j), power);
      d(2 * j, 2 * j) = e.real();
      d(2 * j, 2 * j + 1) = -e.imag();
      d(2 * j + 1, 2 * j) = e.imag();
      d(2 * j + 1, 2 * j + 1) = e.real();
    }
    return d;
  }

  // Smallest p >= 1 with phi^p = id.
  int order() const {
    int g = m_;
    for (int kj : k_) g = std::gcd(g, kj);
    return m_ / g;
  }

  bool exponents_congruent() const {
    for (int j = 0; j < dimension(); ++j)
      if (residue(j) != residue(0)) return false;
    return true;
  }

  friend bool operator==(const RotationTwist&, const RotationTwist&) = default;

 private:
  void check_dim(Eigen::Index n) const {
    if (n != dimension())
      throw DimensionError("RotationTwist: point has dimension " + std::to_string(n) +
                           ", twist has " + std::to_string(dimension()));
  }

  int m_;
  std::vector<int> k_;
};

}  // namespace rfh
