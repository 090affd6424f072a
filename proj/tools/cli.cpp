#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "cli_args.hpp"
#include "figures.hpp"
#include "uhlmann_lab/analysis.hpp"
#include "uhlmann_lab/errors.hpp"
#include "uhlmann_lab/grid.hpp"
#include "uhlmann_lab/linalg.hpp"
#include "uhlmann_lab/thermal.hpp"

namespace uhl::cli {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Builds one CSV line; every double is printed with 17 significant digits.
class Row {
 public:
  Row& operator<<(double v) { return add(fmt(v)); }
  Row& operator<<(int v) { return add(std::to_string(v)); }
  Row& operator<<(bool v) { return add(v ? "1" : "0"); }
  Row& operator<<(const std::string& v) { return add(v); }
  Row& operator<<(const char* v) { return add(v); }
  std::string str() const { return line_ + "\n"; }

 private:
  Row& add(const std::string& field) {
    if (!first_) line_ += ',';
    line_ += field;
    first_ = false;
    return *this;
  }
  std::string line_;
  bool first_ = true;
};

std::string header(std::initializer_list<const char*> names) {
  Row r;
  for (const char* n : names) r << n;
  return r.str();
}

/// Flags shared by every data-producing subcommand.
struct Common {
  std::string output;
  std::string format;
  std::string config;
  int jobs = 0;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("-o,--output", c.output, "Write data to this file (a JSON sidecar goes next to it)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", c.jobs, "Worker threads for grid kernels (0: UHLMANN_LAB_JOBS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--config", c.config, "JSON file whose keys mirror the flags; flags on the command line win");
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("UHLMANN_LAB_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
    throw Error(ErrorCode::InvalidArgument, std::string("UHLMANN_LAB_JOBS must be a positive integer, got '") + env + "'");
  }
  return 0;
}

/// Destination of a command's data plus the bookkeeping for its sidecar.
struct Result {
  std::string data;
  json spec = json::object();
  json summary;  // optional extra facts (roots, winding, maximum, ...)
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

void emit(const Common& c, const std::string& command, const std::vector<std::string>& args, const Result& r,
          double seconds, std::ostream& out) {
  if (c.output.empty()) {
    out << r.data;
    return;
  }
  write_text_file(c.output, r.data);
  json side;
  side["tool"] = "uhlmann-lab";
  side["version"] = UHLMANN_LAB_VERSION;
  side["command"] = command;
  side["arguments"] = args;
  side["spec"] = r.spec;
  if (!r.summary.is_null()) side["result"] = r.summary;
  side["data_file"] = std::filesystem::path(c.output).filename().string();
  side["format"] = c.format;
  side["wall_time_s"] = seconds;
  write_text_file(c.output + ".json", side.dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------------
// Target selection

enum class Target { Composite, SubsystemA, SubsystemB, Berry };

Target resolve_target(const std::string& target, const std::string& subsystem) {
  if (target == "berry") {
    if (!subsystem.empty() && subsystem != "AB")
      throw Error(ErrorCode::InvalidArgument, "berry maps are defined for the composite system only");
    return Target::Berry;
  }
  if (target == "composite") {
    if (subsystem == "A" || subsystem == "B")
      throw Error(ErrorCode::InvalidArgument, "--target composite conflicts with --subsystem " + subsystem);
    return Target::Composite;
  }
  if (target == "subsystem" && subsystem != "A" && subsystem != "B")
    throw Error(ErrorCode::InvalidArgument, "--target subsystem needs --subsystem A or B");
  // target is "subsystem" or unset: follow --subsystem.
  if (subsystem == "A") return Target::SubsystemA;
  if (subsystem == "B") return Target::SubsystemB;
  return Target::Composite;
}

const char* target_name(Target t) {
  switch (t) {
    case Target::Composite: return "composite";
    case Target::SubsystemA: return "subsystem_A";
    case Target::SubsystemB: return "subsystem_B";
    case Target::Berry: return "berry";
  }
  return "?";
}

Subsystem require_subsystem(const std::string& s) {
  if (s == "A") return Subsystem::A;
  if (s == "B") return Subsystem::B;
  throw Error(ErrorCode::InvalidArgument, "--subsystem must be A or B here");
}

HolonomyMethod parse_method(const std::string& m) {
  return m == "ode" ? HolonomyMethod::PathOrderedODE : HolonomyMethod::ClosedForm;
}

double require_scalar(const std::string& flag, const std::string& text) {
  if (is_range(text)) throw Error(ErrorCode::InvalidArgument, flag + " takes a single value here");
  return parse_scalar(text);
}

// ---------------------------------------------------------------------------------------------
// phase-map

struct PhaseMapOptions {
  Common common;
  std::string target;
  std::string subsystem;
  std::string g = "0:2:200";
  std::string theta = "0:pi:200";
  std::string T = "0.2";
  std::string method = "closed";
  int steps = 2048;
  int berry_state = 2;
  bool compare_berry = false;
};

Result phase_map(const PhaseMapOptions& o) {
  const Target t = resolve_target(o.target, o.subsystem);
  PhaseMapSpec spec;
  switch (t) {
    case Target::Composite: spec.target = MapTarget::Composite; break;
    case Target::SubsystemA: spec.target = MapTarget::SubsystemA; break;
    case Target::SubsystemB: spec.target = MapTarget::SubsystemB; break;
    case Target::Berry: spec.target = MapTarget::Berry; break;
  }
  if (o.compare_berry && t != Target::Composite)
    throw Error(ErrorCode::InvalidArgument, "--compare-berry applies to the composite target only");
  if (o.berry_state < 1 || o.berry_state > 4) throw Error(ErrorCode::InvalidArgument, "--berry-state must be 1..4");
  spec.g = parse_axis(o.g, 200);
  spec.theta = parse_axis(o.theta, 200);
  spec.T = parse_axis(o.T, 200);
  spec.method = parse_method(o.method);
  spec.steps = o.steps;
  spec.berry_state = o.berry_state - 1;

  const int jobs = resolve_jobs(o.common.jobs);
  const auto cells = phase_map_parallel(spec, jobs);
  std::vector<PhaseCell> berry;
  if (o.compare_berry) {
    PhaseMapSpec b = spec;
    b.target = MapTarget::Berry;
    berry = phase_map_parallel(b, jobs);
  }

  Result r;
  r.spec = {{"target", target_name(t)},
            {"g", describe(spec.g)},
            {"theta", describe(spec.theta)},
            {"T", describe(spec.T)},
            {"method", o.method},
            {"steps", spec.steps},
            {"berry_state", o.berry_state},
            {"compare_berry", o.compare_berry},
            {"cells", cells.size()}};

  if (o.common.format == "json") {
    json arr = json::array();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto& c = cells[k];
      json cell = {{"g", c.g},
                   {"theta", c.theta},
                   {"T", c.T},
                   {"phase_over_pi", c.phase / pi},
                   {"z", {c.value.real(), c.value.imag()}},
                   {"trace_near_zero", c.trace_near_zero},
                   {"dense_fallback", c.dense_fallback}};
      if (o.compare_berry) {
        cell["berry_phase_over_pi"] = berry[k].phase / pi;
        cell["distance_to_berry"] = circular_distance(c.phase, berry[k].phase);
      }
      arr.push_back(cell);
    }
    r.data = json{{"spec", r.spec}, {"cells", arr}}.dump(1) + "\n";
    return r;
  }

  std::string& d = r.data;
  d = o.compare_berry ? header({"g", "theta", "T", "phase", "phase_over_pi", "re_z", "im_z", "abs_z",
                                "trace_near_zero", "dense_fallback", "berry_phase_over_pi", "distance_to_berry"})
                      : header({"g", "theta", "T", "phase", "phase_over_pi", "re_z", "im_z", "abs_z",
                                "trace_near_zero", "dense_fallback"});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    Row row;
    row << c.g << c.theta << c.T << c.phase << c.phase / pi << c.value.real() << c.value.imag() << std::abs(c.value)
        << c.trace_near_zero << c.dense_fallback;
    if (o.compare_berry) row << berry[k].phase / pi << circular_distance(c.phase, berry[k].phase);
    d += row.str();
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// transitions

struct TransitionOptions {
  Common common;
  std::string target;
  std::string subsystem;
  std::string g = "0.5";
  std::string theta = "pi/2";
  std::string T = "0.2";
};

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::T: return "T";
    case SweepAxis::g: return "g";
    case SweepAxis::theta: return "theta";
  }
  return "?";
}

Result transitions(const TransitionOptions& o) {
  const Target t = resolve_target(o.target, o.subsystem);
  if (t == Target::Berry) throw Error(ErrorCode::InvalidArgument, "transitions are located for Uhlmann phases only");
  Sweep1D s;
  s.target = t == Target::Composite    ? PhaseTarget::Composite
             : t == Target::SubsystemA ? PhaseTarget::SubsystemA
                                       : PhaseTarget::SubsystemB;
  int ranges = 0;
  auto take = [&](const std::string& text, SweepAxis axis, double& fixed) {
    if (is_range(text)) {
      const Axis a = parse_axis(text, Sweep1D{}.resolution);
      s.axis = axis;
      s.lo = a.min;
      s.hi = a.max;
      s.resolution = a.count;
      ++ranges;
      // Keep the fixed slot meaningful for reporting.
      fixed = a.min;
    } else {
      fixed = parse_scalar(text);
    }
  };
  take(o.g, SweepAxis::g, s.g);
  take(o.theta, SweepAxis::theta, s.theta);
  take(o.T, SweepAxis::T, s.T);
  if (ranges != 1) throw Error(ErrorCode::InvalidArgument, "exactly one of --g, --theta, --T must be a range");
  if (s.axis == SweepAxis::T && s.lo <= 0.0)
    throw Error(ErrorCode::NonpositiveTemperature, "temperature range must be strictly positive");
  if (s.axis != SweepAxis::T && s.T <= 0.0) throw Error(ErrorCode::NonpositiveTemperature, "T must be positive");

  const auto set = transitions_1d(s);

  Result r;
  json fixed = json::object();
  if (s.axis != SweepAxis::g) fixed["g"] = s.g;
  if (s.axis != SweepAxis::theta) fixed["theta"] = s.theta;
  if (s.axis != SweepAxis::T) fixed["T"] = s.T;
  r.spec = {{"target", target_name(t)},
            {"axis", axis_name(s.axis)},
            {"lo", s.lo},
            {"hi", s.hi},
            {"resolution", s.resolution},
            {"fixed", fixed}};
  json roots = json::array();
  for (const auto& root : set.roots)
    roots.push_back({{"value", root.value},
                     {"bracket", {root.bracket_lo, root.bracket_hi}},
                     {"phase_below_over_pi", root.phase_below / pi},
                     {"phase_above_over_pi", root.phase_above / pi}});
  r.summary = {{"roots", roots}, {"gap_widths", set.gap_widths}, {"none_found", set.none_found()}};

  if (o.common.format == "json") {
    r.data = json{{"sweep", r.spec},
                  {"roots", roots},
                  {"gap_widths", set.gap_widths},
                  {"none_found", set.none_found()}}
                 .dump(2) +
             "\n";
    return r;
  }
  r.data = header({"index", "value", "bracket_lo", "bracket_hi", "phase_below_over_pi", "phase_above_over_pi"});
  for (std::size_t k = 0; k < set.roots.size(); ++k) {
    const auto& root = set.roots[k];
    Row row;
    row << static_cast<int>(k) << root.value << root.bracket_lo << root.bracket_hi << root.phase_below / pi
        << root.phase_above / pi;
    r.data += row.str();
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// critical-curve

struct CurveOptions {
  Common common;
  std::string subsystem;
  std::string g = "0.001:2";
  std::string T = "0.01:1.2";
  double step = 0.01;
};

Result critical(const CurveOptions& o) {
  const Subsystem which = require_subsystem(o.subsystem);
  const Axis g = parse_axis(o.g, 2), T = parse_axis(o.T, 2);
  if (g.count == 1 || T.count == 1) throw Error(ErrorCode::InvalidArgument, "--g and --T give the tracing box as ranges");
  if (!(o.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "--step must be positive");
  CurveBox box;
  box.g_lo = g.min;
  box.g_hi = g.max;
  box.T_lo = T.min;
  box.T_hi = T.max;
  box.step = o.step;
  const auto curve = critical_curve(which, box);

  Result r;
  r.spec = {{"subsystem", std::string(to_string(which))},
            {"g_window", {g.min, g.max}},
            {"T_window", {T.min, T.max}},
            {"step", o.step},
            {"theta", pi / 2}};
  std::size_t points = 0;
  for (const auto& b : curve.branches) points += b.size();
  json maximum = nullptr;
  if (curve.maximum) maximum = {{"g", curve.maximum->g}, {"T", curve.maximum->T}};
  r.summary = {{"branches", curve.branches.size()}, {"points", points}, {"maximum", maximum}};

  auto radius = [&](const CurvePoint& p) { return bloch(reduced_state({p.g, pi / 2}, p.T, which), 0.0).equatorial_radius; };
  if (o.common.format == "json") {
    json branches = json::array();
    for (const auto& b : curve.branches) {
      json pts = json::array();
      for (const auto& p : b) pts.push_back({{"g", p.g}, {"T", p.T}, {"radius", radius(p)}});
      branches.push_back(pts);
    }
    r.data = json{{"spec", r.spec}, {"branches", branches}, {"maximum", maximum}}.dump(1) + "\n";
    return r;
  }
  r.data = header({"branch", "index", "g", "T", "radius"});
  for (std::size_t b = 0; b < curve.branches.size(); ++b)
    for (std::size_t k = 0; k < curve.branches[b].size(); ++k) {
      const auto& p = curve.branches[b][k];
      Row row;
      row << static_cast<int>(b) << static_cast<int>(k) << p.g << p.T << radius(p);
      r.data += row.str();
    }
  return r;
}

// ---------------------------------------------------------------------------------------------
// heat-capacity

struct HeatOptions {
  Common common;
  std::string g = "0.1";
  std::string T = "0.002:1:400";
};

Result heat(const HeatOptions& o) {
  const Axis g = parse_axis(o.g, 200), T = parse_axis(o.T, 400);
  if (T.min <= 0.0) throw Error(ErrorCode::NonpositiveTemperature, "temperatures must be positive");
  Result r;
  r.spec = {{"g", describe(g)}, {"T", describe(T)}, {"theta", pi / 2}};
  json rows = json::array();
  if (o.common.format == "csv")
    r.data = header({"g", "T", "C_total", "C12", "C13", "C14", "C23", "C24", "C34", "C24_schottky",
                     "composite_phase_over_pi"});
  for (int i = 0; i < g.count; ++i)
    for (int j = 0; j < T.count; ++j) {
      const double gv = g.at(i), Tv = T.at(j);
      const auto hc = heat_capacity(gv, Tv);
      const double sch = schottky_c24(gv, Tv);
      const double ph = uhlmann_phase_composite({gv, pi / 2}, Tv).phase;
      if (o.common.format == "csv") {
        Row row;
        row << gv << Tv << hc.total;
        for (double c : hc.pairwise) row << c;
        row << sch << ph / pi;
        r.data += row.str();
      } else {
        rows.push_back({{"g", gv},
                        {"T", Tv},
                        {"C_total", hc.total},
                        {"pairwise", hc.pairwise},
                        {"C24_schottky", sch},
                        {"composite_phase_over_pi", ph / pi}});
      }
    }
  if (o.common.format == "json") r.data = json{{"spec", r.spec}, {"rows", rows}}.dump(1) + "\n";
  return r;
}

// ---------------------------------------------------------------------------------------------
// argand

struct ArgandOptions {
  Common common;
  std::string subsystem = "AB";
  std::string g = "0.6";
  std::string T = "0.5";
  int samples = 401;
};

Result argand(const ArgandOptions& o) {
  const double g = require_scalar("--g", o.g), T = require_scalar("--T", o.T);
  if (o.samples < 3) throw Error(ErrorCode::InvalidArgument, "--samples must be at least 3");
  const ArgandCurve curve = o.subsystem == "AB" ? composite_argand_theta(g, T, o.samples)
                                                : subsystem_argand_theta(require_subsystem(o.subsystem), g, T, o.samples);
  json winding = nullptr;
  std::string winding_field;
  try {
    const int w = winding_number(curve);
    winding = w;
    winding_field = std::to_string(w);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OriginOnCurve && e.code() != ErrorCode::CurveNotClosed) throw;
  }
  Result r;
  r.spec = {{"subsystem", o.subsystem}, {"g", g}, {"T", T}, {"samples", o.samples}, {"parameter", "theta"}};
  r.summary = {{"winding", winding}};
  if (o.common.format == "json") {
    json pts = json::array();
    for (std::size_t k = 0; k < curve.z.size(); ++k)
      pts.push_back({{"theta", curve.parameter[k]}, {"z", {curve.z[k].real(), curve.z[k].imag()}}});
    r.data = json{{"spec", r.spec}, {"winding", winding}, {"samples", pts}}.dump(1) + "\n";
    return r;
  }
  r.data = header({"theta", "re_z", "im_z", "abs_z", "phase_over_pi", "winding"});
  for (std::size_t k = 0; k < curve.z.size(); ++k) {
    Row row;
    row << curve.parameter[k] << curve.z[k].real() << curve.z[k].imag() << std::abs(curve.z[k])
        << phase_from_trace(curve.z[k]).phase / pi << winding_field;
    r.data += row.str();
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// bloch

struct BlochOptions {
  Common common;
  std::string subsystem;
  std::string g = "0.6";
  std::string T = "0.2";
  std::string theta = "0:pi:50";
  std::string phi = "0:2*pi:64";
};

Result bloch_surface(const BlochOptions& o) {
  const Subsystem which = require_subsystem(o.subsystem);
  const double g = require_scalar("--g", o.g), T = require_scalar("--T", o.T);
  const Axis theta = parse_axis(o.theta, 50), phi = parse_axis(o.phi, 64);
  if (theta.min < 0.0 || theta.max > pi + 1e-15) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, pi]");
  Result r;
  r.spec = {{"subsystem", std::string(to_string(which))},
            {"g", g},
            {"T", T},
            {"theta", describe(theta)},
            {"phi", describe(phi)}};
  json rows = json::array();
  if (o.common.format == "csv") r.data = header({"theta", "phi", "nx", "ny", "nz", "radius", "norm"});
  for (int i = 0; i < theta.count; ++i) {
    const double th = std::min(theta.at(i), pi);
    const auto q = reduced_state({g, th}, T, which);
    for (int j = 0; j < phi.count; ++j) {
      const auto b = bloch(q, phi.at(j));
      if (o.common.format == "csv") {
        Row row;
        row << th << phi.at(j) << b.vector.x() << b.vector.y() << b.vector.z() << b.equatorial_radius
            << b.vector.norm();
        r.data += row.str();
      } else {
        rows.push_back({{"theta", th},
                        {"phi", phi.at(j)},
                        {"n", {b.vector.x(), b.vector.y(), b.vector.z()}},
                        {"radius", b.equatorial_radius}});
      }
    }
  }
  if (o.common.format == "json") r.data = json{{"spec", r.spec}, {"points", rows}}.dump(1) + "\n";
  return r;
}

// ---------------------------------------------------------------------------------------------
// constants

Result constants(const Common& c) {
  const auto k = critical_constants();
  Result r;
  r.spec = json::object();
  if (c.format == "csv") {
    r.data = header({"name", "value"});
    r.data += (Row() << "T_c" << k.T_c).str();
    r.data += (Row() << "g_c" << k.g_c).str();
    r.data += (Row() << "R_c" << k.R_c).str();
  } else {
    // Strings keep all 17 digits regardless of the JSON printer's shortest-round-trip choice.
    r.data = json{{"T_c", k.T_c},
                  {"g_c", k.g_c},
                  {"R_c", k.R_c},
                  {"T_c_text", fmt(k.T_c)},
                  {"g_c_text", fmt(k.g_c)},
                  {"R_c_text", fmt(k.R_c)}}
                 .dump(2) +
             "\n";
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// selftest: cross-checks between independent routes through the library

struct Check {
  std::string name;
  double value;
  double tolerance;
};

double log_partition(const std::array<double, 4>& e, double beta) {
  double emin = e[0];
  for (double v : e) emin = std::min(emin, v);
  double s = 0.0;
  for (double v : e) s += std::exp(-beta * (v - emin));
  return std::log(s);  // the dropped -beta*emin term is linear in beta
}

std::vector<Check> selftest_checks() {
  std::vector<Check> out;
  {
    const ModelParams p{0.6, pi / 2};
    const MatX closed = holonomy_closed_form(p, 0.5).V;
    const MatX ode = holonomy_ode(composite_connection_function(p, 0.5), 0.0, {4096, true}).V;
    out.push_back({"holonomy closed form vs 4096-step RK4 (operator norm)", linalg::spectral_norm(closed - ode), 1e-8});
  }
  {
    const double g = 0.5, T = 0.4, beta = 1 / T, h = 1e-4 * beta;
    const auto e = equatorial_energies(g);
    const double d2 =
        (log_partition(e, beta + h) - 2 * log_partition(e, beta) + log_partition(e, beta - h)) / (h * h);
    const double fd = beta * beta * d2;
    out.push_back({"heat capacity vs finite-difference d2 lnZ (relative)", std::abs(heat_capacity(g, T).total - fd) / fd,
                   1e-5});
  }
  {
    const ModelParams p{0.6, 0.9, 0.3};
    const auto ens = gibbs_state(p, 0.3);
    double worst = 0.0;
    for (Subsystem s : {Subsystem::A, Subsystem::B}) {
      const Mat2 by_sums = reduce(ens, p, s).matrix(p.phi0);
      worst = std::max(worst, (by_sums - partial_trace(ens.rho, s)).cwiseAbs().maxCoeff());
    }
    out.push_back({"reduced-state coefficient sums vs partial trace (max entry)", worst, 1e-12});
  }
  {
    double worst = 0.0;
    for (Subsystem s : {Subsystem::A, Subsystem::B}) {
      const auto q = reduced_state({0.7, 1.1}, 0.4, s);
      const double analytic = subsystem_phase_analytic(q).phase;
      const double ode = uhlmann_phase(q.matrix(), subsystem_holonomy_ode(q, 0.0, {2048, true}).V).phase;
      worst = std::max(worst, circular_distance(analytic, ode));
    }
    out.push_back({"subsystem analytic phase vs path-ordered holonomy (rad)", worst, 1e-7});
  }
  {
    Sweep1D s;
    s.target = PhaseTarget::Composite;
    s.axis = SweepAxis::T;
    s.lo = 0.05;
    s.hi = 1.2;
    s.g = 0.001;
    const auto set = transitions_1d(s);
    const double dev = set.roots.size() == 1 ? std::abs(set.roots[0].value - critical_constants().T_c) : INFINITY;
    out.push_back({"composite critical temperature at g = 0.001", dev, 1e-3});
  }
  out.push_back({"composed Berry phase identity modulo 2 pi", composed_phase_identity_check({0.7, 1.1}, 0.4).mod_2pi,
                 1e-10});
  return out;
}

int selftest(std::ostream& out) {
  int failed = 0;
  for (const auto& c : selftest_checks()) {
    const bool ok = std::isfinite(c.value) && c.value < c.tolerance;
    if (!ok) ++failed;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e < %.0e", c.value, c.tolerance);
    out << (ok ? "[PASS] " : "[FAIL] ") << c.name << ": " << buf << "\n";
  }
  out << (failed == 0 ? "selftest: all checks passed\n" : "selftest: " + std::to_string(failed) + " check(s) failed\n");
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------------------------
// config-file merging

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return std::nullopt;
}

/// Splices the config file's flags in front of the command-line flags so that the latter win.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  const auto path = find_config(args);
  if (!path) return args;
  std::ifstream f(*path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read config file '" + *path + "'");
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, "config file '" + *path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw Error(ErrorCode::InvalidArgument, "config file must hold a JSON object");

  std::vector<std::string> injected;
  std::string command;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      if (!value.is_string()) throw Error(ErrorCode::InvalidArgument, "config 'command' must be a string");
      command = value.get<std::string>();
      continue;
    }
    const std::string flag = key.rfind("-", 0) == 0 ? key : (key.size() == 1 && key != "g" && key != "T" ? "-" : "--") + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_number_integer()) {
      injected.push_back(flag);
      injected.push_back(std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      injected.push_back(flag);
      injected.push_back(fmt(value.get<double>()));
    } else if (value.is_string()) {
      injected.push_back(flag);
      injected.push_back(value.get<std::string>());
    } else {
      throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be a string, number or boolean");
    }
  }

  std::vector<std::string> merged;
  std::size_t at = 0;
  static const std::vector<std::string> commands{"phase-map", "transitions", "critical-curve", "heat-capacity",
                                                  "argand",    "bloch",       "figure",         "selftest",
                                                  "constants"};
  while (at < args.size() && std::find(commands.begin(), commands.end(), args[at]) == commands.end()) ++at;
  if (at == args.size()) {
    if (command.empty()) throw Error(ErrorCode::InvalidArgument, "no subcommand on the command line or in the config");
    merged.push_back(command);
    merged.insert(merged.end(), injected.begin(), injected.end());
    merged.insert(merged.end(), args.begin(), args.end());
    return merged;
  }
  merged.assign(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(at) + 1);
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + static_cast<std::ptrdiff_t>(at) + 1, args.end());
  return merged;
}

void error_record(std::ostream& err, std::string_view code, const std::string& message, const std::string& command) {
  json rec = {{"error", {{"code", code}, {"message", message}, {"command", command}}}};
  err << rec.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::string command;
  try {
    const std::vector<std::string> args = merge_config(raw_args);

    CLI::App app{"Thermal Uhlmann phases, Berry phases and topological transitions of a driven two-spin system",
                 "uhlmann-lab"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(UHLMANN_LAB_VERSION));
    app.require_subcommand(1);

    PhaseMapOptions pm;
    auto* pm_cmd = app.add_subcommand("phase-map", "Grid of phases over (g, theta, T)");
    add_common(pm_cmd, pm.common, "csv");
    pm_cmd->add_option("--target", pm.target, "Observable")->check(CLI::IsMember({"composite", "subsystem", "berry"}));
    pm_cmd->add_option("--subsystem", pm.subsystem, "A, B, or AB (composite)")->check(CLI::IsMember({"A", "B", "AB"}));
    pm_cmd->add_option("--g", pm.g, "Coupling: value or min:max[:count]")->capture_default_str();
    pm_cmd->add_option("--theta", pm.theta, "Field polar angle: value or min:max[:count]")->capture_default_str();
    pm_cmd->add_option("--T", pm.T, "Temperature: value or min:max[:count]")->capture_default_str();
    pm_cmd->add_option("--method", pm.method, "Holonomy route")->check(CLI::IsMember({"closed", "ode"}));
    pm_cmd->add_option("--steps", pm.steps, "RK4 steps for --method ode")->capture_default_str();
    pm_cmd->add_option("--berry-state", pm.berry_state, "Level 1..4 for --target berry (2 is the ground state)")
        ->capture_default_str();
    pm_cmd->add_flag("--compare-berry", pm.compare_berry, "Add ground-state Berry phase and distance columns");

    TransitionOptions tr;
    auto* tr_cmd = app.add_subcommand("transitions", "Critical points along a 1-D sweep (exactly one range flag)");
    add_common(tr_cmd, tr.common, "json");
    tr_cmd->add_option("--target", tr.target, "Observable")->check(CLI::IsMember({"composite", "subsystem"}));
    tr_cmd->add_option("--subsystem", tr.subsystem, "A, B, or AB (composite)")->check(CLI::IsMember({"A", "B", "AB"}));
    tr_cmd->add_option("--g", tr.g, "Coupling")->capture_default_str();
    tr_cmd->add_option("--theta", tr.theta, "Field polar angle")->capture_default_str();
    tr_cmd->add_option("--T", tr.T, "Temperature")->capture_default_str();

    CurveOptions cc;
    auto* cc_cmd = app.add_subcommand("critical-curve", "Trace a subsystem phase boundary in (g, T) at the equator");
    add_common(cc_cmd, cc.common, "csv");
    cc_cmd->add_option("--subsystem", cc.subsystem, "A or B")->required()->check(CLI::IsMember({"A", "B"}));
    cc_cmd->add_option("--g", cc.g, "Coupling window min:max")->capture_default_str();
    cc_cmd->add_option("--T", cc.T, "Temperature window min:max")->capture_default_str();
    cc_cmd->add_option("--step", cc.step, "Continuation step length")->capture_default_str();

    HeatOptions hc;
    auto* hc_cmd = app.add_subcommand("heat-capacity", "Heat capacity and its two-level parts at the equator");
    add_common(hc_cmd, hc.common, "csv");
    hc_cmd->add_option("--g", hc.g, "Coupling: value or range")->capture_default_str();
    hc_cmd->add_option("--T", hc.T, "Temperature: value or range")->capture_default_str();

    ArgandOptions ar;
    auto* ar_cmd = app.add_subcommand("argand", "Trace z(theta) = Tr[rho V] over theta in [0, pi] and its winding");
    add_common(ar_cmd, ar.common, "csv");
    ar_cmd->add_option("--subsystem", ar.subsystem, "A, B, or AB (composite)")->check(CLI::IsMember({"A", "B", "AB"}));
    ar_cmd->add_option("--g", ar.g, "Coupling")->capture_default_str();
    ar_cmd->add_option("--T", ar.T, "Temperature")->capture_default_str();
    ar_cmd->add_option("--samples", ar.samples, "Number of theta samples")->capture_default_str();

    BlochOptions bl;
    auto* bl_cmd = app.add_subcommand("bloch", "Bloch-vector surface of a reduced state over (theta, phi)");
    add_common(bl_cmd, bl.common, "csv");
    bl_cmd->add_option("--subsystem", bl.subsystem, "A or B")->required()->check(CLI::IsMember({"A", "B"}));
    bl_cmd->add_option("--g", bl.g, "Coupling")->capture_default_str();
    bl_cmd->add_option("--T", bl.T, "Temperature")->capture_default_str();
    bl_cmd->add_option("--theta", bl.theta, "Polar-angle range")->capture_default_str();
    bl_cmd->add_option("--phi", bl.phi, "Azimuth range")->capture_default_str();

    std::string figure_name, figure_dir = ".";
    int figure_resolution = 200, figure_jobs = 0;
    bool figure_list = false;
    std::string figure_config;
    auto* fig_cmd = app.add_subcommand("figure", "Regenerate the data behind a named figure");
    fig_cmd->add_option("name", figure_name, "Recipe name, e.g. fig5 or fig6a");
    fig_cmd->add_flag("--list", figure_list, "List the available recipes");
    fig_cmd->add_option("--output-dir", figure_dir, "Directory for the data files")->capture_default_str();
    fig_cmd->add_option("--resolution", figure_resolution, "Grid points per swept axis")->capture_default_str()
        ->check(CLI::Range(2, 100000));
    fig_cmd->add_option("--jobs", figure_jobs, "Worker threads")->check(CLI::NonNegativeNumber);
    fig_cmd->add_option("--config", figure_config, "JSON config file");

    auto* st_cmd = app.add_subcommand("selftest", "Cross-check independent computation routes");
    std::string st_config;
    st_cmd->add_option("--config", st_config, "JSON config file");

    Common ko;
    auto* k_cmd = app.add_subcommand("constants", "Critical temperature, coupling and radius");
    add_common(k_cmd, ko, "json");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out, err);
        return kExitOk;
      }
      for (auto* sub : app.get_subcommands()) command = sub->get_name();
      error_record(err, "InvalidArgument", e.what(), command);
      return kExitUsage;
    }

    auto* chosen = app.get_subcommands().front();
    command = chosen->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (chosen == st_cmd) return selftest(out);

    if (chosen == fig_cmd) {
      if (figure_list) {
        for (const auto& rcp : figure_recipes()) {
          out << rcp.name << "\t" << rcp.description << "\n";
          for (const auto& step : rcp.steps) out << "    " << step.file << "\n";
        }
        return kExitOk;
      }
      if (figure_name.empty()) {
        error_record(err, "InvalidArgument", "figure needs a recipe name (see figure --list)", command);
        return kExitUsage;
      }
      const auto selected = select_recipes(figure_name);
      if (selected.empty()) {
        error_record(err, "InvalidArgument", "unknown figure recipe '" + figure_name + "'", command);
        return kExitUsage;
      }
      std::filesystem::create_directories(figure_dir);
      for (const FigureRecipe* rcp : selected)
        for (const auto& step : rcp->steps) {
          auto sub_args = expand(step, figure_resolution);
          const std::string path = (std::filesystem::path(figure_dir) / step.file).string();
          sub_args.push_back("-o");
          sub_args.push_back(path);
          if (figure_jobs > 0) {
            sub_args.push_back("--jobs");
            sub_args.push_back(std::to_string(figure_jobs));
          }
          const auto s0 = std::chrono::steady_clock::now();
          const int status = run(sub_args, out, err);
          if (status != kExitOk) return status;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.2f",
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count());
          out << rcp->name << ": wrote " << path << " (" << buf << " s)\n";
        }
      return kExitOk;
    }

    Result result;
    const Common* common = nullptr;
    if (chosen == pm_cmd) {
      result = phase_map(pm);
      common = &pm.common;
    } else if (chosen == tr_cmd) {
      result = transitions(tr);
      common = &tr.common;
    } else if (chosen == cc_cmd) {
      result = critical(cc);
      common = &cc.common;
    } else if (chosen == hc_cmd) {
      result = heat(hc);
      common = &hc.common;
    } else if (chosen == ar_cmd) {
      result = argand(ar);
      common = &ar.common;
    } else if (chosen == bl_cmd) {
      result = bloch_surface(bl);
      common = &bl.common;
    } else {
      result = constants(ko);
      common = &ko;
    }
    emit(*common, command, raw_args, result, seconds(), out);
    return kExitOk;
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::NonpositiveTemperature ||
                       e.code() == ErrorCode::StepCountTooSmall;
    error_record(err, to_string(e.code()), e.what(), command);
    return usage ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    error_record(err, "Internal", e.what(), command);
    return kExitInternal;
  }
}

}  // namespace uhl::cli
