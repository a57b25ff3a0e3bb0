#include "qclab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "qclab/error.hpp"
#include "qclab/functionals.hpp"
#include "qclab/gauge.hpp"
#include "qclab/map_zoo.hpp"
#include "qclab/pompeiu.hpp"
#include "qclab/report.hpp"
#include "qclab/stability_lab.hpp"

namespace qclab::cli {

namespace {

/// A finished experiment: its report plus the exit code it earned.
struct Outcome {
  Report report;
  int code = kExitOk;
  std::string message;
};

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw InvalidInput("cannot parse " + what + " from '" + text + "'");
  }
  return v;
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw InvalidInput("grid must look like RxA, got '" + text + "'");
  const double a = parse_real(text.substr(0, x), "grid");
  const double b = parse_real(text.substr(x + 1), "grid");
  if (!(a >= 1.0 && b >= 1.0) || a != std::floor(a) || b != std::floor(b)) {
    throw InvalidInput("grid sizes must be positive integers");
  }
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

std::vector<double> split_reals(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(parse_real(item, what));
  return out;
}

struct MapSpec {
  std::string name;
  std::optional<double> param;
};

MapSpec parse_map(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, std::nullopt};
  return {text.substr(0, colon), parse_real(text.substr(colon + 1), "map parameter")};
}

double require_param(const MapSpec& m) {
  if (!m.param) throw InvalidInput("map '" + m.name + "' needs a parameter, e.g. " + m.name + ":0.01");
  return *m.param;
}

struct Output {
  std::string path;
  std::string format = "csv";
};

void add_output(CLI::App* app, Output& o) {
  app->add_option("--out", o.path, "output file (default stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Report& report, const Output& o, std::ostream& out) {
  std::ofstream file;
  std::ostream* os = &out;
  if (!o.path.empty()) {
    file.open(o.path, std::ios::binary);
    if (!file) throw InvalidInput("cannot open output file " + o.path);
    os = &file;
  }
  if (o.format == "json") {
    write_json(*os, report);
  } else {
    write_csv(*os, report);
  }
}

// ---------------------------------------------------------------- distortion

struct DistortionArgs {
  std::string map = "gstar";
  double q = 0.5;
  double k = 2.0;
  double theta = 0.0;
  double ell = 1.0;
  double n = 0.0;
  std::string gauge = "linear";
  std::string grid = "512x512";
  std::string density;
  Output output;
};

Report cmd_distortion(const DistortionArgs& a) {
  const MapSpec spec = parse_map(a.map);
  const ConvexGauge gauge = ConvexGauge::parse(a.gauge);
  const auto [n1, n2] = parse_grid(a.grid);
  if (n1 < 2 || n2 < 2) throw InvalidInput("grid needs at least 2 cells per direction");

  bool annulus = true;
  std::optional<MapFamily> map;
  if (spec.name == "gstar") {
    map.emplace(SpiralStretch{a.q, a.k, a.theta, 0});
  } else if (spec.name == "gN") {
    const double N = require_param(spec);
    if (N != std::floor(N)) throw InvalidInput("N must be an integer");
    map.emplace(SpiralStretch{a.q, a.k, a.theta, static_cast<int>(N)});
  } else if (spec.name == "geps") {
    map.emplace(ladder_candidate(a.q, a.k, a.theta, require_param(spec)));
  } else if (spec.name == "fstar") {
    annulus = false;
    map.emplace(LinearStretch{a.k, a.n});
  } else if (spec.name == "feps") {
    annulus = false;
    if (a.n != 0.0) throw InvalidInput("feps is defined for n = 0");
    map.emplace(PiecewiseLinearStretch{a.k, require_param(spec), a.ell});
  } else {
    throw InvalidInput("unknown map '" + spec.name + "' (gstar|gN:N|geps:eps|fstar|feps:eps)");
  }

  const std::string density_name = a.density.empty() ? (annulus ? "invsq" : "uniform") : a.density;
  DensityKind density;
  if (density_name == "invsq") {
    density = DensityKind::inverse_square;
  } else if (density_name == "uniform") {
    density = DensityKind::uniform;
  } else {
    throw InvalidInput("density must be uniform or invsq");
  }

  const BreakSet breaks = break_set(*map);
  auto build = [&](std::size_t a1, std::size_t a2) {
    if (annulus) return build_polar_grid(AnnulusDomain::make(a.q), a1, a2, breaks.circles);
    return build_cartesian_grid(RectangleDomain::make(a.ell), a1, a2, breaks.vertical_lines);
  };
  const MeanDistortion fine = mean_distortion(*map, gauge, density, build(n1, n2));
  const MeanDistortion coarse = mean_distortion(*map, gauge, density, build(n1 / 2, n2 / 2));

  Report r;
  r.param("subcommand", "distortion");
  r.param("map", a.map);
  r.param("family", map->describe());
  r.param("q", a.q);
  r.param("k", a.k);
  r.param("theta", a.theta);
  if (!annulus) {
    r.param("ell", a.ell);
    r.param("n", a.n);
  }
  r.param("gauge", gauge.name());
  r.param("density", density_name);
  r.param("grid", a.grid);
  r.columns = {"map", "gauge", "density", "grid", "value", "coarse_value", "quad_error", "degenerate_cells"};
  r.rows.push_back({a.map, gauge.name(), density_name, a.grid, fine.value, coarse.value,
                    std::abs(fine.value - coarse.value) / 3.0,
                    static_cast<long long>(fine.degenerate_cells)});
  if (fine.warning) r.note("warning", "more than 1% of cells are degenerate");
  return r;
}

// ----------------------------------------------------------------------- fit

struct FitArgs {
  double q = 0.5;
  double k = 2.0;
  double theta = 0.0;
  std::string gauge = "square";
  std::string grid = "512x512";
  std::string eps_list;
  std::string eps_geom = "1e-4:1e-2:5";
  Output output;
};

std::vector<double> geometric_ladder(const std::string& spec) {
  const auto parts = split_reals(spec, ':', "eps-geom");
  if (parts.size() != 3) throw InvalidInput("eps-geom must be lo:hi:count");
  const double lo = parts[0];
  const double hi = parts[1];
  const double count = parts[2];
  if (!(lo > 0.0 && hi > lo) || count < 2 || count != std::floor(count)) {
    throw InvalidInput("eps-geom needs 0 < lo < hi and an integer count >= 2");
  }
  std::vector<double> eps;
  const auto m = static_cast<std::size_t>(count);
  for (std::size_t i = 0; i < m; ++i) {
    eps.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(m - 1)));
  }
  eps.back() = hi;
  return eps;
}

Outcome cmd_fit(const FitArgs& a) {
  LadderConfig config;
  config.q = a.q;
  config.k = a.k;
  config.theta = a.theta;
  config.gauge = a.gauge;
  config.eps = a.eps_list.empty() ? geometric_ladder(a.eps_geom) : split_reals(a.eps_list, ',', "eps-list");
  std::tie(config.n_radial, config.n_angular) = parse_grid(a.grid);
  const FitReport fit = run_ladder(config);

  Report r;
  r.param("subcommand", "fit");
  r.param("q", a.q);
  r.param("k", a.k);
  r.param("theta", a.theta);
  r.param("gauge", ConvexGauge::parse(a.gauge).name());
  r.param("grid", a.grid);
  r.param("eps0", operational_eps0(a.k));
  r.param("inclusion_rule", "deficit > 10 * richardson_error");
  r.columns = {"eps", "deficit", "l1", "dbar_mass"};
  std::string excluded;
  for (const auto& row : fit.rows) {
    r.rows.push_back({row.eps, row.deficit, row.l1, row.dbar_mass});
    if (!row.included) excluded += (excluded.empty() ? "" : ";") + format_double(row.eps);
  }
  if (fit.fitted) {
    r.note("slope", fit.slope);
    r.note("intercept", fit.intercept);
    r.note("max_residual", fit.max_residual);
    r.note("used_rows", static_cast<long long>(fit.used_rows));
    r.note("band_lo", fit.band_lo);
    r.note("band_hi", fit.band_hi);
  }
  if (!excluded.empty()) r.note("excluded_eps", excluded);
  if (!fit.fitted) {
    r.note("diagnostic", fit.diagnostic);
    return {r, kExitDegenerate, fit.diagnostic};
  }
  return {r, kExitOk, {}};
}

// --------------------------------------------------------------------- audit

struct AuditArgs {
  std::string lemma;
  std::string map = "feps:0.01";
  double q = 0.5;
  double k = 2.0;
  double n = 0.0;
  double ell = 1.0;
  double theta = 0.0;
  int N = 1;
  std::string gauge = "square";
  std::optional<double> c;
  std::string grid;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  Output output;
};

MapFamily rectangle_map(const AuditArgs& a) {
  const MapSpec spec = parse_map(a.map);
  if (spec.name == "fstar") return MapFamily{LinearStretch{a.k, a.n}};
  if (spec.name == "feps") {
    if (a.n != 0.0) throw InvalidInput("feps is defined for n = 0");
    return MapFamily{PiecewiseLinearStretch{a.k, require_param(spec), a.ell}};
  }
  throw InvalidInput("audit map must be fstar or feps:eps");
}

QuadratureGrid rectangle_grid(const AuditArgs& a, const MapFamily& f) {
  const auto [nx, ny] = parse_grid(a.grid.empty() ? "256x256" : a.grid);
  return build_cartesian_grid(RectangleDomain::make(a.ell), nx, ny, break_set(f).vertical_lines);
}

Report audit_report(const AuditReport& rep) {
  Report r;
  r.columns = {"lemma", "lhs", "rhs", "ratio", "passed"};
  r.rows.push_back({rep.lemma, rep.lhs, rep.rhs, rep.ratio, rep.passed ? "true" : "false"});
  for (const auto& [name, value] : rep.constants) r.note("const." + name, value);
  if (!rep.notes.empty()) r.note("notes", rep.notes);
  return r;
}

Outcome cmd_audit(const AuditArgs& a) {
  ConvexGauge gauge = ConvexGauge::parse(a.gauge);
  if (a.c) gauge = gauge.with_declared_floor(*a.c);
  Report r;
  std::optional<AuditReport> rep;
  if (a.lemma == "taylor") {
    rep = audit_taylor(gauge, a.samples, a.seed);
  } else if (a.lemma == "theta") {
    rep = audit_theta(a.samples, a.seed);
  } else if (a.lemma == "k-l2" || a.lemma == "k-mean") {
    const MapFamily f = rectangle_map(a);
    const QuadratureGrid grid = rectangle_grid(a, f);
    rep = a.lemma == "k-l2" ? audit_K_L2(f, LinearStretch{a.k, a.n}, gauge, grid)
                            : audit_K_mean(f, LinearStretch{a.k, a.n}, gauge, grid);
  } else if (a.lemma == "gn-gap") {
    const auto [nr, na] = parse_grid(a.grid.empty() ? "256x256" : a.grid);
    rep = audit_gN_gap(a.q, a.k, a.theta, a.N,
                       gauge, build_polar_grid(AnnulusDomain::make(a.q), nr, na));
  } else if (a.lemma == "alignment") {
    const MapFamily f = rectangle_map(a);
    const Alignment al = audit_alignment(f, LinearStretch{a.k, a.n}, rectangle_grid(a, f));
    r.columns = {"lemma", "alpha", "real_part_gap", "imag_part_mass", "absdiff_mass", "eps_reference",
                 "sqrt_eps_reference"};
    r.rows.push_back({"alignment", al.alpha, al.real_part_gap, al.imag_part_mass, al.absdiff_mass,
                      al.eps_reference, al.sqrt_eps_reference});
  } else {
    throw InvalidInput("unknown lemma '" + a.lemma + "' (taylor|k-l2|k-mean|alignment|gn-gap|theta)");
  }
  if (rep) r = audit_report(*rep);
  r.params.insert(r.params.begin(), {{"subcommand", "audit"},
                                     {"lemma", a.lemma},
                                     {"map", a.map},
                                     {"q", a.q},
                                     {"k", a.k},
                                     {"n", a.n},
                                     {"ell", a.ell},
                                     {"theta", a.theta},
                                     {"N", static_cast<long long>(a.N)},
                                     {"gauge", gauge.name()},
                                     {"c", gauge.curvature_floor()},
                                     {"grid", a.grid.empty() ? "256x256" : a.grid},
                                     {"samples", static_cast<long long>(a.samples)},
                                     {"seed", static_cast<long long>(a.seed)}});
  if (rep && !rep->passed) {
    std::ostringstream msg;
    msg << "inequality violated: lhs=" << format_double(rep->lhs) << " rhs=" << format_double(rep->rhs);
    r.note("verdict", "violation");
    return {r, kExitViolation, msg.str()};
  }
  return {r, kExitOk, {}};
}

// --------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string map = "identity";
  double q = 0.5;
  double k = 2.0;
  std::size_t points = 100;
  std::size_t nodes = 1024;
  std::string grid = "512x512";
  double margin = 0.05;
  std::uint64_t seed = 1;
  Output output;
};

Report cmd_reconstruct(const ReconstructArgs& a) {
  const MapSpec spec = parse_map(a.map);
  if (!(a.q > 0.0 && a.q < 1.0)) throw InvalidInput("q must lie in (0, 1)");
  if (!(a.k > 0.0)) throw InvalidInput("k must be > 0");
  const double inner = std::pow(a.q, a.k);
  const auto [nr, na] = parse_grid(a.grid);

  std::optional<MapFamily> map;
  if (spec.name == "phi-eps") {
    const MapFamily g{PiecewiseRadialStretch{a.q, a.k, require_param(spec)}};
    map.emplace(compose(g, MapFamily{InverseSpiralStretch{a.q, a.k, 0.0}}));
  } else if (spec.name == "identity") {
    map.emplace(LinearStretch{1.0, 0.0});
  } else if (spec.name != "conj") {
    throw InvalidInput("unknown map '" + spec.name + "' (identity|conj|phi-eps:eps)");
  }
  const std::vector<double> breaks = map ? break_set(*map).circles : std::vector<double>{};
  auto grid = std::make_shared<const QuadratureGrid>(
      build_polar_grid(AnnulusDomain::make(inner), nr, na, breaks));
  const Reconstructor rec = map ? Reconstructor(*map, grid, a.nodes)
                                : Reconstructor([](Complex w) { return std::conj(w); },
                                                [](Complex) { return Complex{1.0, 0.0}; }, grid,
                                                a.nodes);

  // Targets are cell corners, away from the boundary circles by `margin`.
  const auto r_edges = grid->first_edges();
  const auto a_edges = grid->second_edges();
  std::vector<double> radii;
  for (double r : r_edges) {
    if (r >= inner + a.margin && r <= 1.0 - a.margin) radii.push_back(r);
  }
  if (radii.empty()) throw InvalidInput("margin leaves no admissible target radius");
  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<std::size_t> pick_r(0, radii.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_a(0, a_edges.size() - 2);

  Report r;
  r.param("subcommand", "reconstruct");
  r.param("map", a.map);
  r.param("q", a.q);
  r.param("k", a.k);
  r.param("inner_radius", inner);
  r.param("points", static_cast<long long>(a.points));
  r.param("nodes", static_cast<long long>(a.nodes));
  r.param("grid", a.grid);
  r.param("margin", a.margin);
  r.param("seed", static_cast<long long>(a.seed));
  r.columns = {"w_re", "w_im", "value_re", "value_im", "residual", "reduced_accuracy"};
  std::vector<double> residuals;
  for (std::size_t p = 0; p < a.points; ++p) {
    const double radius = radii[pick_r(rng)];
    const double angle = a_edges[pick_a(rng)];
    const Complex w = std::polar(radius, angle);
    const Reconstruction res = rec(w);
    residuals.push_back(res.residual);
    r.rows.push_back({w.real(), w.imag(), res.value.real(), res.value.imag(), res.residual,
                      res.reduced_accuracy ? "true" : "false"});
  }
  if (!residuals.empty()) {
    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    r.note("median_residual", median);
    r.note("max_residual", sorted.back());
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasiconformal distortion and stability laboratory", "qclab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  DistortionArgs d;
  auto* dist = app.add_subcommand("distortion", "mean distortion of a map family");
  dist->add_option("--map", d.map, "gstar | gN:N | geps:eps | fstar | feps:eps");
  dist->add_option("--q", d.q);
  dist->add_option("--k", d.k);
  dist->add_option("--theta", d.theta);
  dist->add_option("--ell", d.ell, "rectangle width for fstar/feps");
  dist->add_option("--n", d.n, "shear of fstar");
  dist->add_option("--gauge", d.gauge, "linear | square | power:p | flat");
  dist->add_option("--grid", d.grid, "RxA cell counts");
  dist->add_option("--density", d.density, "uniform | invsq");
  add_output(dist, d.output);

  FitArgs f;
  auto* fit = app.add_subcommand("fit", "eps ladder and log-log exponent fit");
  fit->add_option("--q", f.q);
  fit->add_option("--k", f.k);
  fit->add_option("--theta", f.theta);
  fit->add_option("--gauge", f.gauge);
  fit->add_option("--grid", f.grid);
  auto* eps_list = fit->add_option("--eps-list", f.eps_list, "comma-separated eps values");
  auto* eps_geom = fit->add_option("--eps-geom", f.eps_geom, "lo:hi:count");
  eps_list->excludes(eps_geom);
  add_output(fit, f.output);

  AuditArgs au;
  auto* audit = app.add_subcommand("audit", "inequality audits");
  audit->add_option("--lemma", au.lemma, "taylor | k-l2 | k-mean | alignment | gn-gap | theta")->required();
  audit->add_option("--map", au.map, "fstar | feps:eps");
  audit->add_option("--q", au.q);
  audit->add_option("--k", au.k);
  audit->add_option("--n", au.n);
  audit->add_option("--ell", au.ell);
  audit->add_option("--theta", au.theta);
  audit->add_option("--N", au.N);
  audit->add_option("--gauge", au.gauge);
  audit->add_option("--c", au.c, "declared curvature floor");
  audit->add_option("--grid", au.grid);
  audit->add_option("--samples", au.samples);
  audit->add_option("--seed", au.seed);
  add_output(audit, au.output);

  ReconstructArgs re;
  auto* rec = app.add_subcommand("reconstruct", "Cauchy-Pompeiu reconstruction residuals");
  rec->add_option("--map", re.map, "identity | conj | phi-eps:eps");
  rec->add_option("--q", re.q);
  rec->add_option("--k", re.k);
  rec->add_option("--points", re.points);
  rec->add_option("--nodes", re.nodes);
  rec->add_option("--grid", re.grid);
  rec->add_option("--margin", re.margin);
  rec->add_option("--seed", re.seed);
  add_output(rec, re.output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    Outcome result;
    const Output* target = nullptr;
    if (dist->parsed()) {
      result.report = cmd_distortion(d);
      target = &d.output;
    } else if (fit->parsed()) {
      result = cmd_fit(f);
      target = &f.output;
    } else if (audit->parsed()) {
      result = cmd_audit(au);
      target = &au.output;
    } else {
      result.report = cmd_reconstruct(re);
      target = &re.output;
    }
    emit(result.report, *target, out);
    if (result.code != kExitOk) err << "qclab: " << result.message << '\n';
    return result.code;
  } catch (const Error& e) {
    err << "qclab: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace qclab::cli
