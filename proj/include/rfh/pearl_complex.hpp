#pragma once

// String-of-pearls complex for a rotation with congruent exponents on the
// round sphere, its Z_m quotient, and the 2-periodic Tate oracle.
//
// Pearl k is the critical sphere at tau_k. The auxiliary Morse function
// f = sum j |z_j|^2 has critical circles C_1..C_n; on each circle the
// function h(t) = cos(2 pi m t) contributes m minima and m maxima, permuted
// freely by phi. Generator degrees come from grading(k, ind, n) with
//   minimum of C_j -> ind = 2(j-1),   maximum of C_j -> ind = 2j - 1,
// so pearl k fills degrees 2kn .. 2kn + 2n - 1 with m generators each.
// Boundaries alternate A = I + cyclic shift (maximum to minimum on one
// circle) and the all-ones matrix (minimum of C_{j+1} to maximum of C_j,
// and minimum of C_1 in pearl k+1 to maximum of C_n in pearl k).

#include <cstddef>
#include <string>
#include <vector>

#include "rfh/cz_index.hpp"
#include "rfh/errors.hpp"
#include "rfh/f2_matrix.hpp"
#include "rfh/graded_complex.hpp"
#include "rfh/phase_space.hpp"

namespace rfh {

struct PearlComplexSpec {
  int n = 2;
  RotationTwist twist = RotationTwist::uniform(2, 2);
  long k_min = 0;
  long k_max = 3;
};

inline void check_pearl_spec(const PearlComplexSpec& spec) {
  if (spec.n < 1) throw ConfigError("pearl complex: n must be positive");
  if (spec.twist.dimension() != spec.n) throw ConfigError("pearl complex: twist has the wrong number of exponents");
  if (!spec.twist.exponents_congruent())
    throw ConfigError("pearl complex: exponents must all be congruent mod m");
  if (spec.k_max < spec.k_min) throw ConfigError("pearl complex: empty window");
  if (spec.k_max - spec.k_min + 1 < 2) throw ConfigError("pearl complex: window too small (need at least 2 pearls)");
}

inline GradedF2Complex build_pearl_complex(const PearlComplexSpec& spec) {
  check_pearl_spec(spec);
  const int n = spec.n;
  const auto m = static_cast<std::size_t>(spec.twist.modulus());
  const auto shift = static_cast<std::size_t>(spec.twist.residue(0));
  const int d_min = static_cast<int>(grading(spec.k_min, 0, n));
  const int d_max = static_cast<int>(grading(spec.k_max, 2 * n - 1, n));

  std::vector<std::vector<std::string>> labels;
  for (long k = spec.k_min; k <= spec.k_max; ++k)
    for (int ind = 0; ind < 2 * n; ++ind) {
      const int circle = ind / 2 + 1;
      std::vector<std::string> deg;
      for (std::size_t i = 0; i < m; ++i)
        deg.push_back("k" + std::to_string(k) + ":C" + std::to_string(circle) + (ind % 2 ? ":max" : ":min") +
                      std::to_string(i));
      labels.push_back(std::move(deg));
    }

  GradedF2Complex c(d_min, d_max, std::move(labels));
  const F2Matrix within = F2Matrix::identity_plus_shift(m);
  const F2Matrix between = F2Matrix::all_ones(m, m);
  for (int d = d_min + 1; d <= d_max; ++d) c.set_boundary(d, (d % 2 != 0) ? within : between);

  CyclicAction action;
  action.order = static_cast<int>(m);
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = (i + shift) % m;
  action.permutation.assign(static_cast<std::size_t>(d_max - d_min + 1), perm);
  c.set_action(std::move(action));
  return c;
}

// Tate homology of C_m with Z_2 coefficients on the trivial module, from
// the periodic resolution: maps alternate t - 1 (zero) and the norm (m mod 2).
// The window is padded by one degree on each side so every requested
// degree is interior.
inline HomologyTable tate_homology(int m, int d_min, int d_max) {
  if (m < 1) throw ConfigError("tate_homology: m must be positive");
  if (d_max < d_min) throw ConfigError("tate_homology: empty degree window");
  const int lo = d_min - 1, hi = d_max + 1;
  std::vector<std::vector<std::string>> labels;
  for (int d = lo; d <= hi; ++d) labels.push_back({"e" + std::to_string(d)});
  GradedF2Complex c(lo, hi, std::move(labels));
  for (int d = lo + 1; d <= hi; ++d) {
    const bool norm = (d % 2 == 0);
    c.set_boundary(d, norm && m % 2 == 1 ? F2Matrix::identity(1) : F2Matrix::zero(1, 1));
  }
  HomologyTable full = homology(c);
  HomologyTable out;
  for (const auto& e : full.entries)
    if (e.degree >= d_min && e.degree <= d_max) out.entries.push_back({e.degree, e.dim, true});
  return out;
}

struct OracleComparisonEntry {
  int degree = 0;
  std::size_t dim_quotient = 0;
  std::size_t dim_tate = 0;
  bool match = false;
};

struct OracleComparison {
  int m = 1;
  int n = 2;
  long k_min = 0;
  long k_max = 0;
  std::vector<OracleComparisonEntry> degrees;

  bool all_match() const {
    for (const auto& e : degrees)
      if (!e.match) return false;
    return true;
  }
};

// Interior-degree comparison between the homology of the quotient pearl
// complex and Tate homology. Requires a free action, so m >= 2.
inline OracleComparison compare_with_oracle(const PearlComplexSpec& spec) {
  const GradedF2Complex c = build_pearl_complex(spec);
  if (spec.twist.modulus() < 2) throw ConfigError("compare_with_oracle: the quotient needs m >= 2");
  const HomologyTable quotient = homology(quotient_by_action(c));
  const HomologyTable tate = tate_homology(spec.twist.modulus(), c.min_degree(), c.max_degree());
  OracleComparison report{spec.twist.modulus(), spec.n, spec.k_min, spec.k_max, {}};
  for (const auto& e : quotient.interior()) {
    const HomologyEntry* t = tate.find(e.degree);
    const std::size_t dt = t ? t->dim : 0;
    report.degrees.push_back({e.degree, e.dim, dt, t != nullptr && dt == e.dim});
  }
  return report;
}

}  // namespace rfh
