// rfh: twisted Reeb orbits, indices and equivariant pearl homology from the
// command line. Exit codes: 0 ok, 2 config, 3 solver, 4 mismatch, 5 lifting.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfh/covering_lift.hpp"
#include "rfh/cz_index.hpp"
#include "rfh/errors.hpp"
#include "rfh/json_io.hpp"
#include "rfh/pearl_complex.hpp"
#include "rfh/twisted_orbits.hpp"

namespace {

using rfh::io::Json;

constexpr int kOutputDigits = 12;

struct Config {
  std::string config_path;
  std::string model_path;
  int m = 2;
  int n = 2;
  std::string k;          // comma list; defaults to all ones
  std::string window = "0:3";
  std::string degrees;    // for `tate`, d_min:d_max
  std::string format = "json";
  std::string output;
  // orbit selection
  long branch = 1;
  int power = 1;
  std::optional<double> seed_tau;
  std::string seed;       // comma list of 2n reals
  int samples = 1000;
  // tolerances
  double tol = 1e-8;
  double newton_tol = 1e-11;
  double surface_tol = 1e-9;
  double rtol = 1e-10;
  double atol = 1e-12;
  double kernel_tol = 1e-6;
  // complex / homology / lift
  bool quotient = false;
  std::string complex_path;
  std::string loop_path;
  std::size_t basepoint = 0;
  // sweep
  std::vector<std::string> sweep;
  std::string task = "homology";
};

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw rfh::ConfigError(std::string(what) + ": '" + s + "' is not a comma-separated integer list");
    }
  }
  return out;
}

std::pair<long, long> parse_range(const std::string& s, const char* what) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    std::size_t u1 = 0, u2 = 0;
    const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    const long lo = std::stol(a, &u1), hi = std::stol(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(s);
    if (hi < lo) throw rfh::ConfigError(std::string(what) + ": empty window '" + s + "'");
    return {lo, hi};
  } catch (const rfh::ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw rfh::ConfigError(std::string(what) + ": expected lo:hi, got '" + s + "'");
  }
}

void check_tolerances(const Config& c) {
  for (double t : {c.tol, c.newton_tol, c.surface_tol, c.rtol, c.atol, c.kernel_tol})
    if (!(t > 0.0)) throw rfh::ConfigError("tolerances must be positive");
  if (c.samples < 2) throw rfh::ConfigError("--samples must be at least 2");
  if (c.format != "json" && c.format != "csv" && c.format != "table")
    throw rfh::ConfigError("--format must be json, csv or table");
}

rfh::FlowOptions flow_options(const Config& c) {
  rfh::FlowOptions f;
  f.integration.rtol = c.rtol;
  f.integration.atol = c.atol;
  f.surface_tol = c.surface_tol;
  return f;
}

rfh::ShootOptions shoot_options(const Config& c) {
  rfh::ShootOptions s;
  s.certify_tol = c.tol;
  s.newton_tol = c.newton_tol;
  s.twist_power = c.power;
  s.flow = flow_options(c);
  return s;
}

Json metadata(const Config& c, const std::string& command) {
  return Json{{"command", command},
              {"tolerances",
               {{"tol", c.tol},
                {"newton_tol", c.newton_tol},
                {"surface_tol", c.surface_tol},
                {"rtol", c.rtol},
                {"atol", c.atol},
                {"kernel_tol", c.kernel_tol}}},
              {"output_digits", kOutputDigits}};
}

struct Problem {
  rfh::StarShapedModel model;
  rfh::RotationTwist twist;
  bool from_file = false;
};

Problem load_problem(const Config& c) {
  if (!c.model_path.empty()) {
    auto mf = rfh::io::model_from_json(rfh::io::read_file(c.model_path));
    return {mf.model, mf.twist, true};
  }
  if (c.n < 1) throw rfh::ConfigError("--n must be positive");
  std::vector<int> k = c.k.empty() ? std::vector<int>(static_cast<std::size_t>(c.n), 1) : parse_int_list(c.k, "--k");
  if (static_cast<int>(k.size()) != c.n) throw rfh::ConfigError("--k needs exactly n exponents");
  return {rfh::StarShapedModel::round_sphere(c.n), rfh::RotationTwist(c.m, k), false};
}

rfh::PhasePoint seed_point(const Config& c, const Problem& p) {
  const int n = p.model.dimension();
  if (c.seed.empty()) return p.model.project(rfh::PhasePoint::Unit(n, 0)).first;
  std::vector<double> xs;
  std::stringstream ss(c.seed);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      xs.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw rfh::ConfigError("--seed: '" + c.seed + "' is not a list of reals");
    }
  }
  if (static_cast<int>(xs.size()) != 2 * n) throw rfh::ConfigError("--seed needs 2n real coordinates");
  return rfh::to_complex(Eigen::Map<const rfh::RealVector>(xs.data(), 2 * n));
}

// Seed period on the circle through z in the direction of the first
// supported coordinate, branch l.
double branch_seed_tau(const Config& c, const Problem& p, const rfh::PhasePoint& z, long l) {
  const int m = p.twist.modulus();
  const auto support = rfh::detail::support_of(z);
  if (support.empty()) throw rfh::ConfigError("seed point is zero");
  const std::size_t j = static_cast<std::size_t>(support.front() - 1);
  const double speed = rfh::reeb_field(z, p.model, 1e-6).norm() / z.norm();
  const double k_j = static_cast<double>(p.twist.exponents()[j]) * c.power;
  return (2.0 * std::numbers::pi / speed) * (m * l - k_j) / m;
}

rfh::TwistedOrbit find_orbit(const Config& c, const Problem& p, long l) {
  const rfh::PhasePoint z = seed_point(c, p);
  const double tau = c.seed_tau ? *c.seed_tau : branch_seed_tau(c, p, p.model.project(z).first, l);
  const auto result = rfh::shoot_orbit(p.model, p.twist, z, tau, shoot_options(c));
  if (!result.ok()) throw rfh::SolverError("shoot_orbit: " + result.diagnostic.message);
  return *result.orbit;
}

// ---- commands ---------------------------------------------------------------

Json cmd_spectrum(const Config& c) {
  const Problem p = load_problem(c);
  const auto [lo, hi] = parse_range(c.window, "--window");
  rfh::SpectrumTable t;
  if (p.from_file && p.model.kind() == rfh::ModelKind::radial_profile) {
    auto opts = shoot_options(c);
    t = rfh::numeric_spectrum(p.model, p.twist, lo, hi, opts);
  } else {
    t = rfh::analytic_spectrum(p.twist, p.model.dimension(), lo, hi);
  }
  return rfh::io::to_json(t);
}

Json cmd_orbit(const Config& c) {
  const Problem p = load_problem(c);
  const rfh::PhasePoint z = seed_point(c, p);
  const double tau = c.seed_tau ? *c.seed_tau : branch_seed_tau(c, p, p.model.project(z).first, c.branch);
  const auto result = rfh::shoot_orbit(p.model, p.twist, z, tau, shoot_options(c));
  Json diag{{"status", rfh::to_string(result.diagnostic.status)},
            {"iterations", result.diagnostic.iterations},
            {"residual", rfh::io::number(result.diagnostic.residual)},
            {"tau", rfh::io::number(result.diagnostic.tau)},
            {"message", result.diagnostic.message}};
  if (!result.ok()) {
    std::cerr << diag.dump(2) << "\n";
    throw rfh::SolverError("shoot_orbit: " + result.diagnostic.message);
  }
  const auto mono = rfh::monodromy(*result.orbit, p.twist, p.model, c.kernel_tol, flow_options(c));
  return Json{{"orbit", rfh::io::to_json(*result.orbit)},
              {"diagnostic", diag},
              {"monodromy",
               {{"tangent_defect", rfh::io::number(mono.tangent_defect)},
                {"kernel_dim_tangent", mono.kernel_dim_tangent},
                {"kernel_dim_xi", mono.kernel_dim_xi}}}};
}

Json cmd_action(const Config& c) {
  const Problem p = load_problem(c);
  const auto orbit = find_orbit(c, p, c.branch);
  const double a = rfh::action(orbit, p.model, c.samples, flow_options(c));
  return Json{{"tau", rfh::io::number(orbit.tau)},
              {"action", rfh::io::number(a)},
              {"samples", c.samples},
              {"error", rfh::io::number(std::abs(a - orbit.tau))}};
}

Json cmd_cz_index(const Config& c) {
  const Problem p = load_problem(c);
  const auto [lo, hi] = parse_range(c.window, "--window");
  Json rows = Json::array();
  for (long l = lo; l <= hi; ++l) {
    const auto orbit = find_orbit(c, p, l);
    Json row{{"l", l}, {"tau", rfh::io::number(orbit.tau)}};
    try {
      const auto idx = rfh::cz_index_unitary(rfh::orbit_unitary_path(orbit, p.model));
      row["index"] = idx.is_integer() ? Json(idx.twice / 2) : Json(idx.value());
    } catch (const rfh::DimensionError& e) {
      row["index"] = nullptr;
      row["note"] = e.what();
    }
    row["grading_min"] = rfh::grading(l, 0, p.model.dimension());
    rows.push_back(row);
  }
  return rows;
}

rfh::PearlComplexSpec pearl_spec(const Config& c) {
  const Problem p = load_problem(c);
  const auto [lo, hi] = parse_range(c.window, "--window");
  return {p.model.dimension(), p.twist, lo, hi};
}

Json cmd_complex(const Config& c) {
  rfh::GradedF2Complex cx = rfh::build_pearl_complex(pearl_spec(c));
  if (c.quotient) {
    if (c.m < 2) throw rfh::ConfigError("--quotient needs m >= 2 (the trivial group has nothing to divide out)");
    cx = rfh::quotient_by_action(cx);
  }
  return rfh::io::to_json(cx);
}

Json homology_report(const Config& c) {
  const auto spec = pearl_spec(c);
  if (spec.twist.modulus() == 1) {
    const auto table = rfh::homology(rfh::build_pearl_complex(spec));
    Json report{{"m", 1}, {"n", spec.n}, {"window", {spec.k_min, spec.k_max}}, {"degrees", Json::array()}};
    report["note"] = "m = 1: the trivial group acts with no free orbits to divide out, so no quotient is reported; "
                     "the untwisted pearl homology is listed instead";
    report["untwisted"] = rfh::io::to_json(table);
    return report;
  }
  return rfh::io::to_json(rfh::compare_with_oracle(spec));
}

bool report_matches(const Json& report) {
  for (const auto& d : report.at("degrees"))
    if (!d.at("match").get<bool>()) return false;
  return true;
}

Json cmd_homology(const Config& c) {
  if (!c.complex_path.empty()) {
    const auto cx = rfh::io::complex_from_json(rfh::io::read_file(c.complex_path));
    Json out{{"homology", rfh::io::to_json(rfh::homology(cx))}};
    if (cx.action() && cx.action()->order > 1) {
      const auto q = rfh::homology(rfh::quotient_by_action(cx));
      out["quotient_homology"] = rfh::io::to_json(q);
      // stored complexes are checked against the Tate groups of the acting group
      const auto tate = rfh::tate_homology(cx.action()->order, cx.min_degree(), cx.max_degree());
      Json degs = Json::array();
      for (const auto& e : q.interior()) {
        const auto expected = tate.entries[static_cast<std::size_t>(e.degree - cx.min_degree())].dim;
        degs.push_back(Json{{"d", e.degree}, {"dim_quotient", e.dim}, {"dim_tate", expected}, {"match", e.dim == expected}});
      }
      out["degrees"] = degs;
    }
    return out;
  }
  return homology_report(c);
}

Json cmd_tate(const Config& c) {
  const auto [lo, hi] = parse_range(c.degrees.empty() ? "0:7" : c.degrees, "--degrees");
  return rfh::io::to_json(rfh::tate_homology(c.m, static_cast<int>(lo), static_cast<int>(hi)));
}

Json cmd_lift(const Config& c) {
  if (c.loop_path.empty()) throw rfh::ConfigError("lift: --loop is required");
  std::optional<rfh::RotationTwist> fallback;
  if (!c.k.empty() || c.m != 2) fallback = load_problem(c).twist;
  const Json j = rfh::io::read_file(c.loop_path);
  const auto loop = rfh::io::loop_from_json(j, fallback ? &*fallback : nullptr);
  const auto r = rfh::lift_loop(loop, c.basepoint);
  return Json{{"deck", r.deck.exponent},
              {"contractible", r.deck.is_identity()},
              {"margin", rfh::io::number(r.margin)},
              {"separation", rfh::io::number(r.separation)},
              {"max_step", rfh::io::number(r.max_step)},
              {"samples", loop.samples.size()}};
}

Json cmd_certify(const Config& c) {
  const Problem p = load_problem(c);
  const auto orbit = find_orbit(c, p, c.branch);
  const auto flow = flow_options(c);
  const double a = rfh::action(orbit, p.model, c.samples, flow);
  Json index = nullptr;
  try {
    const auto idx = rfh::cz_index_unitary(rfh::orbit_unitary_path(orbit, p.model));
    index = idx.is_integer() ? Json(idx.twice / 2) : Json(idx.value());
  } catch (const rfh::DimensionError&) {
  }
  const auto cert = rfh::classify_orbit_loop(orbit, p.twist, p.model);
  return Json{{"model", rfh::to_string(p.model.kind())},
              {"twist", rfh::io::to_json(p.twist)},
              {"orbit", rfh::io::to_json(orbit)},
              {"action", rfh::io::number(a)},
              {"index", index},
              {"certificate", rfh::io::to_json(cert)},
              {"noncontractible", !cert.contractible}};
}

// --sweep m=2..8 [--sweep n=2..3]; points run concurrently, results are
// emitted in parameter order.
Json cmd_sweep(const Config& c, bool& mismatch) {
  std::map<std::string, std::pair<long, long>> grid{{"m", {c.m, c.m}}, {"n", {c.n, c.n}}};
  for (const auto& s : c.sweep) {
    const auto eq = s.find('='), dots = s.find("..");
    if (eq == std::string::npos || dots == std::string::npos || dots < eq)
      throw rfh::ConfigError("--sweep: expected name=lo..hi, got '" + s + "'");
    const std::string name = s.substr(0, eq);
    if (name != "m" && name != "n") throw rfh::ConfigError("--sweep: only m and n can be swept");
    grid[name] = parse_range(s.substr(eq + 1, dots - eq - 1) + ":" + s.substr(dots + 2), "--sweep");
  }
  if (c.task != "homology" && c.task != "spectrum" && c.task != "certify")
    throw rfh::ConfigError("--task must be homology, spectrum or certify");

  std::vector<std::pair<int, int>> points;
  for (long m = grid["m"].first; m <= grid["m"].second; ++m)
    for (long n = grid["n"].first; n <= grid["n"].second; ++n) points.emplace_back(m, n);

  std::vector<std::future<Json>> jobs;
  for (const auto& [m, n] : points) {
    Config pc = c;
    pc.m = m;
    pc.n = n;
    pc.k.clear();
    pc.model_path.clear();
    jobs.push_back(std::async(std::launch::async, [pc] {
      if (pc.task == "spectrum") return cmd_spectrum(pc);
      if (pc.task == "certify") return cmd_certify(pc);
      return homology_report(pc);
    }));
  }
  Json out = Json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Json r = jobs[i].get();
    if (c.task == "homology" && !report_matches(r)) mismatch = true;
    out.push_back(Json{{"m", points[i].first}, {"n", points[i].second}, {"result", r}});
  }
  return out;
}

// ---- output -----------------------------------------------------------------

Json round_floats(const Json& j) {
  if (j.is_number_float()) return rfh::io::number(j.get<double>(), kOutputDigits);
  if (j.is_array()) {
    Json a = Json::array();
    for (const auto& e : j) a.push_back(round_floats(e));
    return a;
  }
  if (j.is_object()) {
    Json o = Json::object();
    for (const auto& [k, v] : j.items()) o[k] = round_floats(v);
    return o;
  }
  return j;
}

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool is_record_list(const Json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& e : j)
    if (!e.is_object()) return false;
  return true;
}

std::vector<std::string> columns_of(const Json& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

void write_csv(std::ostream& os, const Json& j) {
  if (is_record_list(j)) {
    const auto cols = columns_of(j);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : j) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "");
        if (!r.contains(cols[i])) continue;
        const std::string s = cell(r.at(cols[i]));
        if (s.find_first_of(",\"") != std::string::npos) {
          os << '"';
          for (char ch : s) os << (ch == '"' ? "\"\"" : std::string(1, ch));
          os << '"';
        } else {
          os << s;
        }
      }
      os << "\n";
    }
    return;
  }
  if (j.is_object()) {
    // The longest record list inside wins; scalars go to a key,value table.
    for (const auto& [k, v] : j.items())
      if (is_record_list(v)) return write_csv(os, v);
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) os << k << "," << cell(v) << "\n";
    return;
  }
  os << cell(j) << "\n";
}

void write_table(std::ostream& os, const Json& j, const std::string& indent = "") {
  if (is_record_list(j)) {
    const auto cols = columns_of(j);
    std::vector<std::size_t> width(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      width[i] = cols[i].size();
      for (const auto& r : j)
        if (r.contains(cols[i])) width[i] = std::max(width[i], cell(r.at(cols[i])).size());
    }
    os << indent;
    for (std::size_t i = 0; i < cols.size(); ++i) os << std::left << std::setw(static_cast<int>(width[i]) + 2) << cols[i];
    os << "\n";
    for (const auto& r : j) {
      os << indent;
      for (std::size_t i = 0; i < cols.size(); ++i)
        os << std::left << std::setw(static_cast<int>(width[i]) + 2) << (r.contains(cols[i]) ? cell(r.at(cols[i])) : "");
      os << "\n";
    }
    return;
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || is_record_list(v)) {
        os << indent << k << ":\n";
        write_table(os, v, indent + "  ");
      } else {
        os << indent << k << ": " << cell(v) << "\n";
      }
    }
    return;
  }
  os << indent << cell(j) << "\n";
}

std::string render(const Config& c, const std::string& command, const Json& result) {
  std::ostringstream os;
  const Json rounded = round_floats(result);
  if (c.format == "json") {
    os << round_floats(Json{{"metadata", metadata(c, command)}, {"result", rounded}}).dump(2) << "\n";
  } else if (c.format == "csv") {
    write_csv(os, rounded);
  } else {
    write_table(os, rounded);
  }
  return os.str();
}

void emit(const Config& c, const std::string& command, const std::string& text) {
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv("RFH_OUTPUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (command + "." + c.format)).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
  } else {
    rfh::io::write_file(path, text);
  }
}

// Options left unset on the command line are filled from the JSON config.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
  const Json cfg = rfh::io::read_file(path);
  if (!cfg.is_object()) throw rfh::ConfigError("config: top level must be an object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    CLI::Option* opt = nullptr;
    for (CLI::App* scope : {sub, &app}) {
      if (!scope) continue;
      try {
        opt = scope->get_option("--" + key);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) throw rfh::ConfigError("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    auto as_text = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      std::string joined;
      if (opt->get_expected_max() > 1) {
        for (const auto& v : value) opt->add_result(as_text(v));
      } else {
        for (std::size_t i = 0; i < value.size(); ++i) joined += (i ? "," : "") + as_text(value[i]);
        opt->add_result(joined);
      }
    } else if (value.is_boolean()) {
      opt->add_result(value.get<bool>() ? "true" : "false");
    } else {
      opt->add_result(as_text(value));
    }
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted Reeb orbits, Conley-Zehnder indices and equivariant pearl homology"};
  app.require_subcommand(1);
  Config c;

  auto common = [&c](CLI::App* s) {
    s->add_option("--config", c.config_path, "JSON config; keys mirror long flags, flags win");
    s->add_option("--model", c.model_path, "model description file (JSON)");
    s->add_option("--m", c.m, "twist modulus");
    s->add_option("--n", c.n, "complex dimension");
    s->add_option("--k", c.k, "twist exponents, comma separated (default all 1)");
    s->add_option("--window", c.window, "branch window lo:hi");
    s->add_option("--format", c.format, "json, csv or table");
    s->add_option("--output,-o", c.output, "output file (default stdout or $RFH_OUTPUT_DIR)");
    s->add_option("--tol", c.tol, "orbit certification tolerance");
    s->add_option("--newton-tol", c.newton_tol, "shooting residual target");
    s->add_option("--surface-tol", c.surface_tol, "on-hypersurface tolerance");
    s->add_option("--rtol", c.rtol, "integrator relative tolerance");
    s->add_option("--atol", c.atol, "integrator absolute tolerance");
    s->add_option("--kernel-tol", c.kernel_tol, "singular value threshold for kernels");
  };
  auto orbit_opts = [&c](CLI::App* s) {
    s->add_option("--l", c.branch, "branch label l of tau = pi (m l - k) / m");
    s->add_option("--power", c.power, "twist power p (orbit twisted by phi^p)");
    s->add_option("--seed-tau", c.seed_tau, "seed period (overrides --l)");
    s->add_option("--seed", c.seed, "seed point as 2n comma-separated reals");
    s->add_option("--samples", c.samples, "quadrature samples for the action");
  };

  std::map<std::string, CLI::App*> subs;
  subs["spectrum"] = app.add_subcommand("spectrum", "twisted spectrum with indices");
  subs["orbit"] = app.add_subcommand("orbit", "shoot a twisted Reeb orbit");
  subs["action"] = app.add_subcommand("action", "action of an orbit versus its period");
  subs["cz-index"] = app.add_subcommand("cz-index", "Conley-Zehnder indices over a window of branches");
  subs["complex"] = app.add_subcommand("complex", "string-of-pearls complex as JSON");
  subs["homology"] = app.add_subcommand("homology", "quotient homology against the Tate oracle");
  subs["tate"] = app.add_subcommand("tate", "Tate homology of the cyclic group");
  subs["lift"] = app.add_subcommand("lift", "lift a lens-space loop to the sphere");
  subs["certify"] = app.add_subcommand("certify", "orbit plus noncontractibility certificate");
  subs["sweep"] = app.add_subcommand("sweep", "run a task over a parameter grid");
  for (auto& [name, s] : subs) common(s);
  for (const char* name : {"orbit", "action", "cz-index", "certify"}) orbit_opts(subs[name]);
  subs["sweep"]->add_option("--samples", c.samples, "quadrature samples for the action");
  subs["complex"]->add_flag("--quotient", c.quotient, "divide out the cyclic action");
  subs["homology"]->add_option("--complex", c.complex_path, "homology of a complex file instead of the pearl complex");
  subs["tate"]->add_option("--degrees", c.degrees, "degree window d_min:d_max");
  subs["lift"]->add_option("--loop", c.loop_path, "loop file (JSON)");
  subs["lift"]->add_option("--basepoint", c.basepoint, "sample index to start the lift from");
  subs["sweep"]->add_option("--sweep", c.sweep, "grid axis name=lo..hi (m or n), repeatable");
  subs["sweep"]->add_option("--task", c.task, "homology, spectrum or certify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(rfh::ErrorKind::config);
  }

  std::string command;
  CLI::App* sub = nullptr;
  for (auto& [name, s] : subs)
    if (s->parsed()) {
      command = name;
      sub = s;
    }

  try {
    if (!c.config_path.empty()) apply_config(app, sub, c.config_path);
    check_tolerances(c);
    Json result;
    bool mismatch = false;
    if (command == "spectrum") result = cmd_spectrum(c);
    else if (command == "orbit") result = cmd_orbit(c);
    else if (command == "action") result = cmd_action(c);
    else if (command == "cz-index") result = cmd_cz_index(c);
    else if (command == "complex") result = cmd_complex(c);
    else if (command == "homology") {
      result = cmd_homology(c);
      mismatch = result.contains("degrees") && !report_matches(result);
    } else if (command == "tate") result = cmd_tate(c);
    else if (command == "lift") result = cmd_lift(c);
    else if (command == "certify") result = cmd_certify(c);
    else if (command == "sweep") result = cmd_sweep(c, mismatch);
    emit(c, command, render(c, command, result));
    if (mismatch) throw rfh::MismatchError("homology differs from the Tate oracle in at least one interior degree");
    return 0;
  } catch (const rfh::Error& e) {
    std::cerr << "rfh " << command << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const CLI::Error& e) {
    std::cerr << "rfh " << command << ": config: " << e.what() << "\n";
    return static_cast<int>(rfh::ErrorKind::config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "rfh " << command << ": " << e.what() << "\n";
    return static_cast<int>(rfh::ErrorKind::config);
  }
}
