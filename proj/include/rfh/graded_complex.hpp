#pragma once

// Z-graded chain complexes over GF(2) on a finite degree window, with an
// optional free cyclic group action on generators.

#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfh/errors.hpp"
#include "rfh/f2_matrix.hpp"

namespace rfh {

struct ActionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Action of a cyclic group of the given order, recorded through the
// permutation its generator induces on each degree's generators:
// generator i of degree d is sent to permutation[d - d_min][i].
struct CyclicAction {
  int order = 1;
  std::vector<std::vector<std::size_t>> permutation;

  friend bool operator==(const CyclicAction&, const CyclicAction&) = default;
};

class GradedF2Complex {
 public:
  GradedF2Complex() = default;

  // Boundaries start out as zero maps of the right shape.
  GradedF2Complex(int d_min, int d_max, std::vector<std::vector<std::string>> generators)
      : d_min_(d_min), d_max_(d_max), generators_(std::move(generators)) {
    if (d_max < d_min) throw DimensionError("GradedF2Complex: empty degree window");
    if (generators_.size() != static_cast<std::size_t>(d_max - d_min + 1))
      throw DimensionError("GradedF2Complex: one generator list per degree required");
    boundaries_.reserve(generators_.size());
    for (int d = d_min; d <= d_max; ++d) boundaries_.emplace_back(rank_at(d - 1), rank_at(d));
  }

  int min_degree() const noexcept { return d_min_; }
  int max_degree() const noexcept { return d_max_; }
  bool contains(int d) const noexcept { return d >= d_min_ && d <= d_max_; }

  std::size_t rank_at(int d) const {
    return contains(d) ? generators_[index(d)].size() : 0;
  }
  const std::vector<std::string>& generators(int d) const { return generators_.at(index(d)); }

  // d: C_d -> C_{d-1}. At the bottom of the window this has zero rows.
  const F2Matrix& boundary(int d) const { return boundaries_.at(index(d)); }
  void set_boundary(int d, F2Matrix m) {
    if (!contains(d)) throw DimensionError("set_boundary: degree outside window");
    if (m.rows() != rank_at(d - 1) || m.cols() != rank_at(d))
      throw DimensionError("set_boundary: degree " + std::to_string(d) + " expects " +
                           std::to_string(rank_at(d - 1)) + "x" + std::to_string(rank_at(d)) +
                           ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    boundaries_[index(d)] = std::move(m);
  }

  const std::optional<CyclicAction>& action() const noexcept { return action_; }
  void set_action(CyclicAction a) { action_ = std::move(a); }
  void clear_action() { action_.reset(); }

  long euler_characteristic() const {
    long chi = 0;
    for (int d = d_min_; d <= d_max_; ++d)
      chi += ((d % 2 == 0) ? 1L : -1L) * static_cast<long>(rank_at(d));
    return chi;
  }

  friend bool operator==(const GradedF2Complex&, const GradedF2Complex&) = default;

 private:
  std::size_t index(int d) const { return static_cast<std::size_t>(d - d_min_); }

  int d_min_ = 0;
  int d_max_ = -1;
  std::vector<std::vector<std::string>> generators_;
  std::vector<F2Matrix> boundaries_;
  std::optional<CyclicAction> action_;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  std::optional<int> degree;                                // first offending degree
  std::optional<std::pair<std::size_t, std::size_t>> entry;  // offending (row, col)
};

namespace detail {

inline ValidationReport fail(std::string msg, int d,
                             std::optional<std::pair<std::size_t, std::size_t>> e = {}) {
  return ValidationReport{false, std::move(msg), d, e};
}

inline std::vector<std::size_t> compose(const std::vector<std::size_t>& p,
                                        const std::vector<std::size_t>& q) {
  std::vector<std::size_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[q[i]];
  return out;
}

inline ValidationReport validate_action(const GradedF2Complex& c, const CyclicAction& a) {
  if (a.order < 1) return fail("action order must be positive", c.min_degree());
  if (a.permutation.size() != static_cast<std::size_t>(c.max_degree() - c.min_degree() + 1))
    return fail("action needs one permutation per degree", c.min_degree());

  for (int d = c.min_degree(); d <= c.max_degree(); ++d) {
    const auto& p = a.permutation[static_cast<std::size_t>(d - c.min_degree())];
    const std::size_t size = c.rank_at(d);
    if (p.size() != size) return fail("permutation length differs from generator count", d);
    std::vector<bool> hit(size, false);
    for (std::size_t i = 0; i < size; ++i) {
      if (p[i] >= size || hit[p[i]]) return fail("action is not a permutation", d);
      hit[p[i]] = true;
    }

    // g^order = id and no generator is fixed by a nontrivial power.
    std::vector<std::size_t> power(size);
    std::iota(power.begin(), power.end(), std::size_t{0});
    for (int e = 1; e <= a.order; ++e) {
      power = compose(p, power);
      for (std::size_t i = 0; i < size; ++i) {
        const bool fixed = power[i] == i;
        if (e < a.order && fixed)
          return fail("action is not free: generator '" + c.generators(d)[i] +
                          "' is fixed by g^" + std::to_string(e),
                      d);
        if (e == a.order && !fixed)
          return fail("action generator does not have the declared order", d);
      }
    }

    // Equivariance: boundary(r, j) == boundary(p_{d-1}(r), p_d(j)).
    if (d - 1 >= c.min_degree()) {
      const auto& q = a.permutation[static_cast<std::size_t>(d - 1 - c.min_degree())];
      const F2Matrix& b = c.boundary(d);
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t j = 0; j < b.cols(); ++j)
          if (b.get(r, j) != b.get(q[r], p[j]))
            return fail("boundary does not commute with the action", d, std::pair{r, j});
    }
  }
  return {};
}

}  // namespace detail

inline ValidationReport validate(const GradedF2Complex& c) {
  for (int d = c.min_degree(); d <= c.max_degree(); ++d) {
    const F2Matrix& b = c.boundary(d);
    if (b.rows() != c.rank_at(d - 1) || b.cols() != c.rank_at(d))
      return detail::fail("boundary shape does not match generator counts", d);
  }
  for (int d = c.min_degree() + 1; d <= c.max_degree(); ++d) {
    const F2Matrix composite = matmul_f2(c.boundary(d - 1), c.boundary(d));
    if (!composite.is_zero())
      return detail::fail("boundary squared is nonzero at degree " + std::to_string(d), d,
                          composite.first_nonzero());
  }
  if (c.action()) return detail::validate_action(c, *c.action());
  return {};
}

struct HomologyEntry {
  int degree = 0;
  std::size_t dim = 0;
  bool reliable = false;  // false next to the truncation boundary

  friend bool operator==(const HomologyEntry&, const HomologyEntry&) = default;
};

struct HomologyTable {
  std::vector<HomologyEntry> entries;

  const HomologyEntry* find(int d) const {
    for (const auto& e : entries)
      if (e.degree == d) return &e;
    return nullptr;
  }
  std::vector<HomologyEntry> interior() const {
    std::vector<HomologyEntry> out;
    for (const auto& e : entries)
      if (e.reliable) out.push_back(e);
    return out;
  }
};

// dim H_d = dim ker d_d - rank d_{d+1}. The lowest and highest degrees of the
// window are reported but flagged, since their neighbours were truncated.
inline HomologyTable homology(const GradedF2Complex& c) {
  if (auto report = validate(c); !report.ok)
    throw std::invalid_argument("homology: invalid complex: " + report.message);
  HomologyTable table;
  for (int d = c.min_degree(); d <= c.max_degree(); ++d) {
    const std::size_t kernel = nullspace_dim(c.boundary(d));
    const std::size_t image = c.contains(d + 1) ? rank(c.boundary(d + 1)) : 0;
    table.entries.push_back({d, kernel - image, d > c.min_degree() && d < c.max_degree()});
  }
  return table;
}

// Quotient by a free equivariant action: one generator per orbit, labelled
// by its lowest-index representative, and the class of a boundary is the
// boundary of any representative pushed to orbit classes (mod 2).
inline GradedF2Complex quotient_by_action(const GradedF2Complex& c) {
  if (!c.action()) throw ActionError("quotient_by_action: complex carries no action");
  if (auto report = validate(c); !report.ok)
    throw ActionError("quotient_by_action: " + report.message);
  const CyclicAction& a = *c.action();

  const int lo = c.min_degree();
  const std::size_t span = static_cast<std::size_t>(c.max_degree() - lo + 1);
  std::vector<std::vector<std::size_t>> orbit_of(span);
  std::vector<std::vector<std::size_t>> representatives(span);
  std::vector<std::vector<std::string>> labels(span);

  for (int d = lo; d <= c.max_degree(); ++d) {
    const auto k = static_cast<std::size_t>(d - lo);
    const auto& p = a.permutation[k];
    const std::size_t none = c.rank_at(d);
    orbit_of[k].assign(c.rank_at(d), none);
    for (std::size_t i = 0; i < c.rank_at(d); ++i) {
      if (orbit_of[k][i] != none) continue;
      const std::size_t cls = representatives[k].size();
      representatives[k].push_back(i);
      labels[k].push_back(c.generators(d)[i]);
      for (std::size_t j = i; orbit_of[k][j] == none; j = p[j]) orbit_of[k][j] = cls;
    }
  }

  GradedF2Complex q(lo, c.max_degree(), std::move(labels));
  for (int d = lo + 1; d <= c.max_degree(); ++d) {
    const auto k = static_cast<std::size_t>(d - lo);
    const F2Matrix& b = c.boundary(d);
    F2Matrix qb(q.rank_at(d - 1), q.rank_at(d));
    for (std::size_t cls = 0; cls < representatives[k].size(); ++cls) {
      const std::size_t rep = representatives[k][cls];
      for (std::size_t r = 0; r < b.rows(); ++r)
        if (b.get(r, rep)) qb.flip(orbit_of[k - 1][r], cls);
    }
    q.set_boundary(d, std::move(qb));
  }
  return q;
}

}  // namespace rfh
