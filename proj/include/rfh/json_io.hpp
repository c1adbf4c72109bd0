#pragma once

// JSON and CSV encodings of the library's value types. Doubles are written
// with a configurable number of significant digits; 17 round-trips exactly.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfh/covering_lift.hpp"
#include "rfh/errors.hpp"
#include "rfh/graded_complex.hpp"
#include "rfh/pearl_complex.hpp"
#include "rfh/phase_space.hpp"
#include "rfh/star_shaped.hpp"
#include "rfh/twisted_orbits.hpp"

namespace rfh::io {

using Json = nlohmann::ordered_json;

inline constexpr int kExactDigits = 17;

// Non-finite values become null.
inline Json number(double v, int digits = kExactDigits) {
  if (!std::isfinite(v)) return nullptr;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

inline double read_number(const Json& j, const char* what) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw ConfigError(std::string(what) + ": expected a number");
  return j.get<double>();
}

inline Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

// ---- twists, models ---------------------------------------------------------

inline Json to_json(const RotationTwist& t) { return Json{{"m", t.modulus()}, {"k", t.exponents()}}; }

inline RotationTwist twist_from_json(const Json& j) {
  try {
    return RotationTwist(j.at("m").get<int>(), j.at("k").get<std::vector<int>>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("twist: ") + e.what());
  }
}

struct ModelFile {
  StarShapedModel model;
  RotationTwist twist;
};

inline Json to_json(const StarShapedModel& model, const RotationTwist& twist) {
  Json j{{"kind", to_string(model.kind())}, {"n", model.dimension()}, {"twist", to_json(twist)}};
  if (model.kind() == ModelKind::radial_profile)
    j["profile"] = Json{{"quadratic", model.profile().quadratic}, {"quartic", model.profile().quartic}};
  return j;
}

inline ModelFile model_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    RotationTwist twist = j.contains("twist") ? twist_from_json(j.at("twist")) : RotationTwist::uniform(1, n);
    if (twist.dimension() != n) throw ConfigError("model: twist needs one exponent per coordinate");
    if (kind == "round_sphere") {
      StarShapedModel m = StarShapedModel::round_sphere(n);
      return {m, twist};
    }
    if (kind != "radial_profile") throw ConfigError("model: unknown kind '" + kind + "'");
    RadialProfile profile = RadialProfile::constant(n);
    if (j.contains("profile")) {
      const Json& p = j.at("profile");
      if (p.contains("quadratic")) profile.quadratic = p.at("quadratic").get<std::vector<double>>();
      if (p.contains("quartic")) profile.quartic = p.at("quartic").get<std::vector<double>>();
    }
    if (static_cast<int>(profile.quadratic.size()) != n) throw ConfigError("model: profile dimension differs from n");
    StarShapedModel m = StarShapedModel::radial(profile, true);
    m.check_invariance(twist);
    return {m, twist};
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

// ---- points ----------------------------------------------------------------

inline Json to_json(const PhasePoint& z, int digits = kExactDigits) {
  Json a = Json::array();
  for (double v : to_real(z)) a.push_back(number(v, digits));
  return a;
}

inline PhasePoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() % 2 != 0 || j.empty())
    throw ConfigError("point: expected an array of 2n real coordinates");
  RealVector x(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) x[static_cast<Eigen::Index>(i)] = read_number(j[i], "point");
  return to_complex(x);
}

// ---- complexes -------------------------------------------------------------

inline Json to_json(const F2Matrix& m) {
  Json rows = Json::array();
  for (const auto& r : m.to_rows()) rows.push_back(r);
  return rows;
}

inline Json to_json(const GradedF2Complex& c) {
  Json gens = Json::array(), bds = Json::array();
  for (int d = c.min_degree(); d <= c.max_degree(); ++d) {
    gens.push_back(c.generators(d));
    bds.push_back(to_json(c.boundary(d)));
  }
  Json j{{"degrees", {c.min_degree(), c.max_degree()}}, {"generators", gens}, {"boundaries", bds}};
  if (c.action()) j["action"] = Json{{"order", c.action()->order}, {"permutations", c.action()->permutation}};
  return j;
}

inline GradedF2Complex complex_from_json(const Json& j) {
  try {
    const auto degrees = j.at("degrees").get<std::vector<int>>();
    if (degrees.size() != 2) throw ConfigError("complex: degrees must be [d_min, d_max]");
    GradedF2Complex c(degrees[0], degrees[1], j.at("generators").get<std::vector<std::vector<std::string>>>());
    const Json& bds = j.at("boundaries");
    if (bds.size() != static_cast<std::size_t>(degrees[1] - degrees[0] + 1))
      throw ConfigError("complex: one boundary per degree required");
    for (int d = degrees[0]; d <= degrees[1]; ++d) {
      const auto rows = bds[static_cast<std::size_t>(d - degrees[0])].get<std::vector<std::vector<int>>>();
      const std::size_t r = c.rank_at(d - 1), cols = c.rank_at(d);
      if (rows.size() != r) throw ConfigError("complex: boundary " + std::to_string(d) + " has the wrong row count");
      for (const auto& row : rows)
        if (row.size() != cols) throw ConfigError("complex: boundary " + std::to_string(d) + " has the wrong width");
      c.set_boundary(d, r == 0 ? F2Matrix(0, cols) : F2Matrix::from_rows(rows, cols));
    }
    if (j.contains("action")) {
      const Json& a = j.at("action");
      c.set_action({a.at("order").get<int>(), a.at("permutations").get<std::vector<std::vector<std::size_t>>>()});
    }
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("complex: ") + e.what());
  }
}

inline Json to_json(const HomologyTable& t) {
  Json a = Json::array();
  for (const auto& e : t.entries) a.push_back(Json{{"d", e.degree}, {"dim", e.dim}, {"reliable", e.reliable}});
  return a;
}

inline Json to_json(const OracleComparison& r) {
  Json degs = Json::array();
  for (const auto& e : r.degrees)
    degs.push_back(Json{{"d", e.degree}, {"dim_quotient", e.dim_quotient}, {"dim_tate", e.dim_tate}, {"match", e.match}});
  return Json{{"m", r.m}, {"n", r.n}, {"window", {r.k_min, r.k_max}}, {"degrees", degs}};
}

// ---- spectra ---------------------------------------------------------------

inline Json to_json(const SpectrumTable& t, int digits = kExactDigits) {
  Json a = Json::array();
  for (const auto& e : t.entries) {
    Json row{{"tau", number(e.tau, digits)}, {"support", e.support}, {"dim", e.dim}};
    row["index"] = e.index ? Json(*e.index) : Json(nullptr);
    row["l"] = e.l;
    a.push_back(row);
  }
  return a;
}

inline SpectrumTable spectrum_from_json(const Json& j, long l_min, long l_max) {
  SpectrumTable t{l_min, l_max, {}};
  try {
    for (const auto& row : j) {
      SpectrumEntry e;
      e.tau = read_number(row.at("tau"), "spectrum tau");
      e.support = row.at("support").get<std::vector<int>>();
      e.dim = row.at("dim").get<int>();
      if (!row.at("index").is_null()) e.index = row.at("index").get<long>();
      e.l = row.value("l", 0L);
      t.entries.push_back(e);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("spectrum: ") + e.what());
  }
  return t;
}

inline std::string to_csv(const SpectrumTable& t, int digits = kExactDigits) {
  std::ostringstream os;
  os << "tau,support,dim,index,l\n";
  for (const auto& e : t.entries) {
    os << number(e.tau, digits).dump() << ",\"";
    for (std::size_t i = 0; i < e.support.size(); ++i) os << (i ? " " : "") << e.support[i];
    os << "\"," << e.dim << ",";
    if (e.index) os << *e.index;
    os << "," << e.l << "\n";
  }
  return os.str();
}

// ---- orbits and loops ------------------------------------------------------

inline Json to_json(const TwistedOrbit& o, int digits = kExactDigits) {
  return Json{{"z0", to_json(o.z0, digits)},       {"tau", number(o.tau, digits)},
              {"support", o.support},               {"residual", number(o.residual, digits)},
              {"component_id", o.component_id},     {"twist_power", o.twist_power}};
}

inline Json to_json(const LoopCertificate& c, int digits = kExactDigits) {
  return Json{{"deck", c.deck.exponent}, {"contractible", c.contractible}, {"margin", number(c.margin, digits)}};
}

// {"twist": {...}, "closed": bool, "samples": [[x1, y1, ...], ...]}; a bare
// array of samples is accepted together with an externally supplied twist.
inline QuotientLoop loop_from_json(const Json& j, const RotationTwist* fallback_twist = nullptr) {
  QuotientLoop loop;
  const Json* samples = &j;
  if (j.is_object()) {
    if (j.contains("twist")) loop.twist = twist_from_json(j.at("twist"));
    else if (fallback_twist) loop.twist = *fallback_twist;
    else throw ConfigError("loop: missing twist");
    loop.closed = j.value("closed", true);
    if (!j.contains("samples")) throw ConfigError("loop: missing samples");
    samples = &j.at("samples");
  } else if (fallback_twist) {
    loop.twist = *fallback_twist;
  } else {
    throw ConfigError("loop: a bare sample array needs --m/--k");
  }
  if (!samples->is_array()) throw ConfigError("loop: samples must be an array");
  for (const auto& s : *samples) loop.samples.push_back(point_from_json(s));
  return loop;
}

inline Json to_json(const QuotientLoop& loop, int digits = kExactDigits) {
  Json s = Json::array();
  for (const auto& p : loop.samples) s.push_back(to_json(p, digits));
  return Json{{"twist", to_json(loop.twist)}, {"closed", loop.closed}, {"samples", s}};
}

}  // namespace rfh::io
