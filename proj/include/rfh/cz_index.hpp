#pragma once

// Conley-Zehnder indices of unitary paths stored as per-eigenvalue angle
// tracks, and the grading 2kn + ind of the pearl complexes.
//
// Sign convention: a track with eigenvalue e^{i theta(t)} is measured by the
// clockwise winding psi = -theta(1). Off the lattice psi in 2 pi Z it
// contributes 2 floor(psi / 2pi) + 1; at psi = 2 pi l the Robbin-Salamon
// boundary terms give 2l. The path e^{-2 i tau t} I_n therefore has index
// n (2 floor(tau/pi) + 1), which is (2k - 1) n at tau = pi (mk - 1)/m.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "rfh/errors.hpp"

namespace rfh {

// Integer or half-integer, stored as twice its value.
struct HalfInteger {
  long twice = 0;

  static HalfInteger from_int(long v) { return {2 * v}; }
  bool is_integer() const noexcept { return twice % 2 == 0; }
  double value() const noexcept { return static_cast<double>(twice) / 2.0; }

  friend HalfInteger operator+(HalfInteger a, HalfInteger b) { return {a.twice + b.twice}; }
  friend HalfInteger operator-(HalfInteger a, HalfInteger b) { return {a.twice - b.twice}; }
  friend bool operator==(HalfInteger, HalfInteger) = default;
  friend bool operator==(HalfInteger a, long b) { return a.twice == 2 * b; }
  friend std::ostream& operator<<(std::ostream& os, HalfInteger h) {
    if (h.is_integer()) return os << h.twice / 2;
    return os << h.twice << "/2";
  }
};

class UnitaryPath {
 public:
  // Tracks are validated: all start at 0, consecutive samples differ by < pi.
  UnitaryPath(std::vector<double> times, std::vector<std::vector<double>> tracks)
      : times_(std::move(times)), tracks_(std::move(tracks)) {
    if (times_.size() < 2) throw DimensionError("UnitaryPath: need at least two samples");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1])) throw DimensionError("UnitaryPath: times must increase");
    for (std::size_t j = 0; j < tracks_.size(); ++j) {
      const auto& tr = tracks_[j];
      if (tr.size() != times_.size()) throw DimensionError("UnitaryPath: track length mismatch");
      if (std::abs(tr.front()) > 1e-12)
        throw DimensionError("UnitaryPath: track " + std::to_string(j) + " does not start at the identity");
      for (std::size_t i = 1; i < tr.size(); ++i)
        if (!(std::abs(tr[i] - tr[i - 1]) < std::numbers::pi))
          throw DimensionError("UnitaryPath: discontinuous track " + std::to_string(j) + " at sample " +
                               std::to_string(i));
    }
  }

  // Linear tracks theta_j(t) = end_j * t on [0, 1], sampled finely enough
  // to stay continuous.
  static UnitaryPath rotation(const std::vector<double>& end_angles) {
    double widest = 0.0;
    for (double a : end_angles) widest = std::max(widest, std::abs(a));
    const auto steps = static_cast<std::size_t>(std::max(2.0, std::ceil(widest / (std::numbers::pi / 4.0))));
    std::vector<double> times(steps + 1);
    std::vector<std::vector<double>> tracks(end_angles.size(), std::vector<double>(steps + 1));
    for (std::size_t i = 0; i <= steps; ++i) {
      times[i] = static_cast<double>(i) / static_cast<double>(steps);
      for (std::size_t j = 0; j < end_angles.size(); ++j) tracks[j][i] = end_angles[j] * times[i];
    }
    return UnitaryPath(std::move(times), std::move(tracks));
  }

  // Samples t -> eigenvalues (unit complex numbers, one per track, in a
  // fixed frame) on [0, 1] and unwraps them by nearest-branch continuation,
  // bisecting any interval whose angle increment reaches pi/2.
  static UnitaryPath from_sampler(const std::function<std::vector<std::complex<double>>(double)>& eig,
                                  int samples = 64, int max_depth = 30) {
    std::vector<double> times;
    std::vector<std::vector<std::complex<double>>> values;
    const auto first = eig(0.0);
    times.push_back(0.0);
    values.push_back(first);
    for (int i = 1; i <= samples; ++i)
      refine(eig, times.back(), values.back(), static_cast<double>(i) / samples, eig(static_cast<double>(i) / samples),
             times, values, max_depth);

    std::vector<std::vector<double>> tracks(first.size(), std::vector<double>(times.size(), 0.0));
    for (std::size_t j = 0; j < first.size(); ++j) {
      tracks[j][0] = std::arg(values[0][j]);
      for (std::size_t i = 1; i < times.size(); ++i)
        tracks[j][i] = tracks[j][i - 1] + std::arg(values[i][j] / values[i - 1][j]);
      const double start = tracks[j][0];
      if (std::abs(start) > 1e-9)
        throw DimensionError("UnitaryPath::from_sampler: path does not start at the identity");
      for (double& a : tracks[j]) a -= start;
    }
    return UnitaryPath(std::move(times), std::move(tracks));
  }

  std::size_t dimension() const noexcept { return tracks_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<std::vector<double>>& tracks() const noexcept { return tracks_; }
  double end_angle(std::size_t j) const { return tracks_.at(j).back(); }

 private:
  static void refine(const std::function<std::vector<std::complex<double>>(double)>& eig, double t0,
                     std::vector<std::complex<double>> v0, double t1, std::vector<std::complex<double>> v1,
                     std::vector<double>& times, std::vector<std::vector<std::complex<double>>>& values,
                     int depth) {
    bool wide = false;
    for (std::size_t j = 0; j < v0.size(); ++j)
      wide = wide || std::abs(std::arg(v1[j] / v0[j])) >= std::numbers::pi / 2.0;
    if (wide) {
      if (depth == 0) throw DimensionError("UnitaryPath::from_sampler: discontinuous track");
      const double tm = 0.5 * (t0 + t1);
      auto vm = eig(tm);
      refine(eig, t0, std::move(v0), tm, vm, times, values, depth - 1);
      refine(eig, tm, values.back(), t1, std::move(v1), times, values, depth - 1);
      return;
    }
    times.push_back(t1);
    values.push_back(std::move(v1));
  }

  std::vector<double> times_;
  std::vector<std::vector<double>> tracks_;
};

namespace detail {

// Twice the index contribution of one track ending at angle theta.
inline long track_contribution_twice(double theta, double lattice_tol) {
  const double winding = -theta / (2.0 * std::numbers::pi);
  const double nearest = std::round(winding);
  if (std::abs(winding - nearest) <= lattice_tol) return 4 * static_cast<long>(nearest);
  return 2 * (2 * static_cast<long>(std::floor(winding)) + 1);
}

}  // namespace detail

inline HalfInteger cz_index_unitary(const UnitaryPath& p, double lattice_tol = 1e-9) {
  HalfInteger total;
  for (std::size_t j = 0; j < p.dimension(); ++j)
    total.twice += detail::track_contribution_twice(p.end_angle(j), lattice_tol);
  return total;
}

// Path a followed by b, i.e. t -> b(t) a(1); tracks add.
inline UnitaryPath catenate(const UnitaryPath& a, const UnitaryPath& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("catenate: dimension mismatch");
  std::vector<double> times;
  std::vector<std::vector<double>> tracks(a.dimension());
  for (double t : a.times()) times.push_back(0.5 * t);
  for (std::size_t i = 1; i < b.times().size(); ++i) times.push_back(0.5 + 0.5 * b.times()[i]);
  for (std::size_t j = 0; j < a.dimension(); ++j) {
    tracks[j] = a.tracks()[j];
    const double offset = a.end_angle(j);
    for (std::size_t i = 1; i < b.times().size(); ++i) tracks[j].push_back(offset + b.tracks()[j][i]);
  }
  return UnitaryPath(std::move(times), std::move(tracks));
}

inline HalfInteger relative_index(const UnitaryPath& a, const UnitaryPath& b) {
  return cz_index_unitary(a) - cz_index_unitary(b);
}

// Degree of the generator sitting at a critical point of Morse index
// `morse_index` on the k-th critical component: 2kn + ind.
inline long grading(long k, long morse_index, long n) { return 2 * k * n + morse_index; }

}  // namespace rfh
