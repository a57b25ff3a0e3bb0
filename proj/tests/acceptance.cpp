// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qclab/cli.hpp"
#include "qclab/error.hpp"
#include "qclab/functionals.hpp"
#include "qclab/gauge.hpp"
#include "qclab/pompeiu.hpp"
#include "qclab/stability_lab.hpp"

using namespace qclab;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    s_ << v;
    return *this;
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string cli_output(const std::vector<std::string>& args, int& code) {
  std::ostringstream out;
  std::ostringstream err;
  code = cli::run(args, out, err);
  return out.str();
}

double footer_value(const std::string& csv, const std::string& key) {
  const auto pos = csv.find("# " + key + "=");
  if (pos == std::string::npos) throw std::runtime_error("missing footer " + key);
  return std::stod(csv.substr(pos + key.size() + 3));
}

Verdict mean_distortion_of_spiral() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = build_polar_grid(AnnulusDomain::make(0.5), 512, 512);
  const auto m = mean_distortion(MapFamily{SpiralStretch{0.5, 2.0, 0.0, 0}}, ConvexGauge::linear(),
                                 DensityKind::inverse_square, grid);
  const double secs = seconds_since(t0);
  const double expected = 4.0 * kPi * std::log(2.0);
  const double err = rel(m.value, expected);
  Detail d;
  d << "value=" << m.value << " rel_err=" << err << " time=" << secs << "s";
  return {err < 1e-6 && secs < 2.0, d.str()};
}

Verdict equality_regime() {
  const auto gstar = MapFamily{SpiralStretch{0.5, 2.0, 0.0, 0}};
  double worst = 0.0;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    const MapFamily g{PiecewiseRadialStretch{0.5, 2.0, eps}};
    const auto grid = build_polar_grid(AnnulusDomain::make(0.5), 512, 512, break_set(g).circles);
    worst = std::max(worst, std::abs(deficit(g, gstar, ConvexGauge::linear(), grid).value));
  }
  Detail d;
  d << "max|deficit|=" << worst;
  return {worst < 1e-8, d.str()};
}

Verdict quadratic_regime() {
  const double q = 0.5;
  const double k = 2.0;
  const double eps = 1e-2;
  const MapFamily g{PiecewiseRadialStretch{q, k, eps}};
  const auto grid = build_polar_grid(AnnulusDomain::make(q), 512, 512, break_set(g).circles);
  const auto m = mean_distortion(g, ConvexGauge::square(), DensityKind::inverse_square, grid);
  const double expected = kTwoPi * std::log(1.0 / q) * (k * k + eps);
  const auto dfc = deficit(g, MapFamily{SpiralStretch{q, k, 0.0, 0}}, ConvexGauge::square(), grid);
  const double value_err = rel(m.value, expected);
  const double deficit_err = std::abs(dfc.value - eps / (k * k));
  Detail d;
  d << "mean_rel_err=" << value_err << " deficit=" << dfc.value << " deficit_err=" << deficit_err;
  return {value_err < 1e-6 && deficit_err < 1e-6, d.str()};
}

Verdict psi_mass() {
  const double k = 2.0;
  const LinearStretch fstar{k, 0.0};
  const auto grid = build_parallelogram_grid(stretched_rectangle(fstar, 1.0), 512, 512,
                                             std::vector<double>{0.5});
  bool ok = true;
  Detail d;
  for (double eps : {1e-4, 1e-2, 4e-2}) {
    const double mass = psi_dbar_mass(MapFamily{PiecewiseLinearStretch{k, eps, 1.0}}, fstar, grid);
    const double target = std::sqrt(eps) / 4.0;
    ok = ok && std::abs(mass - target) < 1e-8;
    d << "eps=" << eps << ":mass=" << mass << "/target=" << target << " ";
  }
  return {ok, d.str()};
}

Verdict sharp_exponent() {
  LadderConfig c;
  c.eps = {1e-4, std::pow(10.0, -3.5), 1e-3, std::pow(10.0, -2.5), 1e-2};
  const auto t0 = std::chrono::steady_clock::now();
  const FitReport r = run_ladder(c);
  const double secs = seconds_since(t0);
  const double band = r.band_lo > 0.0 ? r.band_hi / r.band_lo : INFINITY;
  Detail d;
  d << "slope=" << r.slope << " band=[" << r.band_lo << "," << r.band_hi << "] ratio=" << band
    << " rows=" << r.used_rows << " time=" << secs << "s";
  return {r.fitted && std::abs(r.slope - 0.5) <= 0.05 && band < 3.0 && secs < 30.0, d.str()};
}

Verdict lemma_audits() {
  bool ok = true;
  Detail d;
  for (const char* name : {"linear", "square", "power:3", "flat"}) {
    const auto a = audit_taylor(ConvexGauge::parse(name), 10000, 1);
    ok = ok && a.passed;
    d << "taylor[" << name << "]=" << a.lhs << (a.passed ? "" : "(violation)") << " ";
  }

  const double eps = 0.01;
  const LinearStretch fstar{2.0, 0.0};
  const MapFamily feps{PiecewiseLinearStretch{2.0, eps, 1.0}};
  const auto grid = build_cartesian_grid(RectangleDomain::make(1.0), 256, 256, break_set(feps).vertical_lines);
  const auto l2 = audit_K_L2(feps, fstar, ConvexGauge::square(), grid);
  const bool l2_ok = std::abs(l2.lhs - eps) < 1e-12;
  ok = ok && l2_ok;
  d << "k-l2.lhs=" << l2.lhs << " ";

  const auto km = audit_K_mean(feps, fstar, ConvexGauge::square(), grid);
  ok = ok && km.passed;
  d << "k-mean=" << (km.passed ? "pass" : "fail") << " ";

  const auto th = audit_theta(10000, 1);
  ok = ok && th.passed;
  d << "theta.worst=" << th.lhs;
  return {ok, d.str()};
}

Verdict homotopy_gap() {
  struct Case {
    double q, k, theta;
  };
  bool ok = true;
  double smallest = INFINITY;
  for (const Case c : {Case{0.5, 1.0, 0.0}, Case{0.5, 2.0, 0.0}, Case{0.5, 2.0, kPi / 2.0}}) {
    const auto grid = build_polar_grid(AnnulusDomain::make(c.q), 256, 256);
    for (int n : {1, 2}) {
      const auto a = audit_gN_gap(c.q, c.k, c.theta, n, ConvexGauge::square(), grid);
      ok = ok && a.passed;
      smallest = std::min(smallest, a.lhs - a.rhs);
    }
  }
  Detail d;
  d << "smallest gap=" << smallest;
  return {ok, d.str()};
}

Verdict cauchy_pompeiu() {
  int code_id = 0;
  int code_conj = 0;
  const std::string id = cli_output(
      {"reconstruct", "--map", "identity", "--nodes", "1024", "--grid", "512x512", "--points", "100"},
      code_id);
  const std::string cj = cli_output(
      {"reconstruct", "--map", "conj", "--nodes", "1024", "--grid", "512x512", "--points", "100"},
      code_conj);
  const double id_max = footer_value(id, "max_residual");
  const double cj_median = footer_value(cj, "median_residual");

  const double inner = 0.25;
  const double bound = 2.0 * std::sqrt(kPi * kPi * (1.0 - inner * inner));
  const Complex xi = std::polar(0.625, kPi / 2.0);
  double mass_max = 0.0;
  for (std::size_t n : {128, 256, 512}) {
    mass_max = std::max(mass_max, kernel_mass(build_polar_grid(AnnulusDomain::make(inner), n, n), xi));
  }
  Detail d;
  d << "identity.max=" << id_max << " conj.median=" << cj_median << " kernel_mass.max=" << mass_max
    << " bound=" << bound;
  return {code_id == 0 && code_conj == 0 && id_max < 1e-10 && cj_median < 1e-3 && mass_max < bound,
          d.str()};
}

Verdict conformal_transfer() {
  const double q = std::exp(-kTwoPi);
  const double k = 2.0;
  const double ell = strip_width(q);
  const MapFamily gstar{SpiralStretch{q, k, 0.0, 0}};
  const MapFamily fstar{LinearStretch{k, 0.0}};
  const MapFamily geps{PiecewiseRadialStretch{q, k, 0.01}};
  const MapFamily feps = rectangle_transfer(geps, q, k, 0.0);

  bool ok = true;
  Detail d;
  for (const char* gauge : {"linear", "square"}) {
    const auto g = ConvexGauge::parse(gauge);
    const auto a1 = build_polar_grid(AnnulusDomain::make(q), 2048, 256, {}, RadialSpacing::geometric);
    const auto r1 = build_cartesian_grid(RectangleDomain::make(ell), 256, 64);
    const auto t1 = conformal_transfer_check(gstar, fstar, g, a1, r1);
    const auto a2 = build_polar_grid(AnnulusDomain::make(q), 2048, 256, break_set(geps).circles,
                                     RadialSpacing::geometric);
    const auto r2 = build_cartesian_grid(RectangleDomain::make(ell), 256, 64, break_set(feps).vertical_lines);
    const auto t2 = conformal_transfer_check(geps, feps, g, a2, r2);
    ok = ok && t1.relative_gap < 1e-5 && t2.relative_gap < 1e-5;
    d << gauge << ":star=" << t1.relative_gap << ",eps=" << t2.relative_gap << " ";
  }
  return {ok, d.str()};
}

Verdict flat_gauge_failure() {
  const std::vector<double> eps{1e-4, 1e-3, 1e-2, 4e-2};
  bool ok = true;
  double worst_flat = -INFINITY;
  std::size_t compared = 0;
  for (double alpha : {0.3, 0.4, 0.49}) {
    const auto r = run_flat_gauge_ladder(0.5, 2.0, alpha, eps, 256, 64);
    for (const auto& row : r.rows) {
      ok = ok && row.l1_exceeds;
      if (row.square_deficit > 1e-4) {
        ++compared;
        worst_flat = std::max(worst_flat, row.flat_deficit);
        ok = ok && row.flat_deficit < 1e-6;
      }
    }
  }
  Detail d;
  d << "rows_compared=" << compared << " max_flat_deficit=" << worst_flat;
  return {ok && compared > 0, d.str()};
}

std::string run_cli_binary(const std::vector<std::string>& args, int& status) {
  const std::string path = "acceptance_determinism.csv";
  std::string cmd = std::string("\"") + QCLAB_CLI_PATH + "\"";
  for (const auto& a : args) cmd += " " + a;
  cmd += " --out " + path;
  status = std::system(cmd.c_str());
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  std::remove(path.c_str());
  return s.str();
}

Verdict determinism() {
  const std::vector<std::vector<std::string>> runs{
      {"distortion", "--map", "geps:0.01", "--gauge", "square", "--grid", "256x256"},
      {"fit", "--grid", "128x128"},
      {"reconstruct", "--map", "phi-eps:0.01", "--grid", "128x128", "--points", "20", "--seed", "7"},
      {"audit", "--lemma", "taylor", "--gauge", "square", "--samples", "2000"}};
  bool ok = true;
  std::size_t bytes = 0;
  for (const auto& args : runs) {
    int s1 = 0;
    int s2 = 0;
    const std::string a = run_cli_binary(args, s1);
    const std::string b = run_cli_binary(args, s2);
    ok = ok && s1 == 0 && s2 == 0 && !a.empty() && a == b;
    bytes += a.size();
  }
  Detail d;
  d << "runs=" << runs.size() << " bytes=" << bytes;
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, std::function<Verdict()>>, 11> criteria{{
      {"mean distortion of the spiral stretch", mean_distortion_of_spiral},
      {"equality regime under the linear gauge", equality_regime},
      {"quadratic regime under the square gauge", quadratic_regime},
      {"dbar mass of the piecewise linear stretch", psi_mass},
      {"square-root stability exponent", sharp_exponent},
      {"lemma audits", lemma_audits},
      {"winding-number gap", homotopy_gap},
      {"Cauchy-Pompeiu reconstruction", cauchy_pompeiu},
      {"annulus/rectangle transfer", conformal_transfer},
      {"flat gauge loses uniform stability", flat_gauge_failure},
      {"byte-identical CLI output", determinism},
  }};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.passed) ++failures;
    std::cout << (v.passed ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
