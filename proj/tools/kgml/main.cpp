// kgml: spectra, exponents, wavefunctions and parameter blocks for the
// Coulomb Klein-Gordon problem in momentum space, with and without a
// minimal length.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 physics-domain
// error (supercritical coupling, parameter pole, degenerate deformation).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kgml/kgml.hpp"
#include "table.hpp"

namespace {

using namespace kgml;
using cli::Cell;
using cli::Table;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// When only g is known the ordinary equation still needs an energy; the
// exponents at infinity do not depend on it.
constexpr double kDefaultEta = 0.5;

struct Config {
  int Z = 1;
  double alpha = kFineStructure;
  std::optional<double> g, eta, theta, theta_prime;
  std::string n_range = "0..5";
  std::string model;
  double tol = 1e-10;
  int order = fuchsian::kDefaultOrder;
  std::string window = "1e2:1e4";
  std::string format = "csv";
  std::string out;
  double u_min = 0.01, u_max = 100.0;
  int points = 200;
  std::string spacing = "log";
  double xi_max = 0.4;

  double coupling() const { return g ? *g : Z * alpha; }
  double theta_or(double d) const { return theta ? *theta : d; }
  double theta_prime_or(double d) const { return theta_prime ? *theta_prime : d; }
};

std::pair<int, int> parse_n_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || v < 0) throw UsageError("--n: expected k or a..b with integers >= 0, got '" + s + "'");
    return v;
  };
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int k = to_int(s);
    return {k, k};
  }
  const int a = to_int(s.substr(0, dots)), b = to_int(s.substr(dots + 2));
  if (b < a) throw UsageError("--n: empty range '" + s + "'");
  return {a, b};
}

std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  double lo = 0.0, hi = 0.0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument("");
    lo = std::stod(s.substr(0, colon));
    hi = std::stod(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--window: expected lo:hi, got '" + s + "'");
  }
  if (!(lo > 0.0) || !(hi > lo)) throw UsageError("--window: need 0 < lo < hi");
  return {lo, hi};
}

std::string str(double v) { return cli::number(v); }

const char* kUnits = "units: u = p/(m c), eta = E/(m c^2), g = Z alpha (all dimensionless); psi normalized with A = 1";

std::string deformation_note(double theta, double theta_prime) {
  return "theta = " + str(theta) + ", theta' = " + str(theta_prime);
}

Table cmd_spectrum(const Config& c) {
  const auto [n0, n1] = parse_n_range(c.n_range);
  const double g = c.coupling();
  Table t;
  t.command = "spectrum";
  t.notes = {kUnits, "g = " + str(g) + (c.g ? " (from --g)" : ", Z = " + std::to_string(c.Z) + ", alpha = " + str(c.alpha)),
             "eta_closed = N/sqrt(N^2 + g^2), N = n + 1/2 + mu; eta_root solves 1/2 - w + mu + n = 0"};
  t.columns = {"n", "Z", "g", "eta_closed", "eta_root", "rel_diff", "residual", "binding_energy"};
  for (int n = n0; n <= n1; ++n) {
    const auto line = solve_quantization(g, n);
    const double closed = energy_closed_form(g, n);
    t.add({long(n), long(c.g ? 0 : c.Z), g, closed, line.eta, std::abs(line.eta / closed - 1.0), line.residual,
           binding_energy_closed_form(g, n)});
  }
  return t;
}

KgModel exponent_model(const Config& c, std::vector<std::string>& notes) {
  const double g = c.coupling();
  const std::string m = c.model.empty() ? "ordinary" : c.model;
  if (m == "ordinary") {
    const double eta = c.eta.value_or(kDefaultEta);
    notes.push_back("g = " + str(g) + ", eta = " + str(eta));
    return build_ordinary_kg(CoulombSystem::from_coupling(g, eta));
  }
  if (m == "deformed-zero-energy") {
    const DeformationParams d{c.theta_or(0.05), c.theta_prime_or(0.05)};
    notes.push_back("g = " + str(g) + ", eta = 0, " + deformation_note(d.theta, d.theta_prime));
    return build_deformed_zero_energy(g, d);
  }
  if (m == "deformed-first-order") {
    const double eta = c.eta.value_or(kDefaultEta), theta = c.theta_or(0.02);
    notes.push_back("g = " + str(g) + ", eta = " + str(eta) + ", theta = " + str(theta) + " (theta' = 2 theta)");
    return build_deformed_first_order(CoulombSystem::from_coupling(g, eta), theta);
  }
  throw UsageError("--model for exponents: ordinary | deformed-zero-energy | deformed-first-order, got '" + m + "'");
}

Table cmd_exponents(const Config& c) {
  Table t;
  t.command = "exponents";
  t.notes = {kUnits};
  const KgModel model = exponent_model(c, t.notes);
  auto [lo, hi] = parse_window(c.window);
  const auto e = model.psi_exponents_at_infinity();
  const double split = std::abs((e[0] - e[1]).imag());
  if (split > 0.0) {
    // |psi| of a complex pair wobbles with period 2 pi / |Im(rho1 - rho2)| in
    // ln u; the oscillation test needs a few periods to see it.
    const double need = lo * std::exp(3.0 * 2.0 * std::numbers::pi / split);
    if (hi < need) {
      hi = need;
      t.notes.push_back("complex exponents: fit window extended to [" + str(lo) + ", " + str(hi) +
                        "] to cover 3 periods of ln u");
    }
  }
  t.notes.push_back("model " + model.id + ": " + model.description);
  t.notes.push_back("fit window [" + str(lo) + ", " + str(hi) + "], tol " + str(c.tol) + ", series order " +
                    std::to_string(c.order));
  t.notes.push_back("dominant = fastest decay, seeded from the Frobenius series at infinity; subdominant = "
                    "generic data psi(u0) = 1, psi'(u0) = 0 relaxing onto the slower branch");
  t.columns = {"branch", "exponent_re", "exponent_im", "fit", "fit_stderr", "deviation", "status"};
  BranchOptions opts;
  opts.tol = c.tol;
  opts.order = c.order;
  opts.generic_start = std::min(1.0, lo / 2.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i : {1, 0}) {
    const Branch b = i == 1 ? Branch::dominant : Branch::generic;
    std::vector<Cell> row{std::string(i == 1 ? "dominant" : "subdominant"), e[i].real(), e[i].imag()};
    try {
      const auto fit = fit_branch_exponent(model, b, lo, hi, opts);
      row.insert(row.end(), {fit.exponent, fit.standard_error, fit.exponent - e[i].real(), std::string("ok")});
    } catch (const OscillationError&) {
      row.insert(row.end(), {nan, nan, nan, std::string("oscillating")});
    }
    t.add(std::move(row));
  }
  if (split > 0.0) {
    const auto v = classify(c.coupling());
    t.notes.push_back(std::string("verdict: ") + to_string(v.conclusion) + ": " + v.note);
  } else if (model.id == "deformed-zero-energy") {
    const auto v = classify(c.coupling(), DeformationParams{c.theta_or(0.05), c.theta_prime_or(0.05)});
    t.notes.push_back(std::string("verdict: ") + to_string(v.conclusion) + ": " + v.note);
  }
  return t;
}

std::vector<double> grid(const Config& c) {
  if (!(c.u_max > c.u_min)) throw UsageError("--u-max must exceed --u-min");
  std::vector<double> u(c.points);
  for (int i = 0; i < c.points; ++i) {
    const double f = c.points == 1 ? 0.0 : double(i) / (c.points - 1);
    if (c.spacing == "log")
      u[i] = c.u_min * std::pow(c.u_max / c.u_min, f);
    else if (c.spacing == "linear")
      u[i] = c.u_min + (c.u_max - c.u_min) * f;
    else
      throw UsageError("--spacing: log | linear, got '" + c.spacing + "'");
  }
  return u;
}

Table cmd_wavefunction(const Config& c) {
  Table t;
  t.command = "wavefunction";
  t.notes = {kUnits};
  const auto us = grid(c);
  const std::string m = c.model.empty() ? "ordinary" : c.model;
  const double g = c.coupling();
  if (m == "ordinary") {
    const auto [n0, n1] = parse_n_range(c.n_range);
    (void)n1;
    const double eta = c.eta ? *c.eta : energy_closed_form(g, n0);
    const CoulombSystem sys = c.g ? CoulombSystem::from_coupling(g, eta) : CoulombSystem(c.Z, c.alpha, eta);
    t.notes.push_back("ordinary closed form, g = " + str(g) + ", eta = " + str(eta) +
                      (c.eta ? "" : " (bound level n = " + std::to_string(n0) + ")"));
    t.columns = {"u", "re_psi", "im_psi", "abs_psi"};
    for (double u : us) {
      const cplx p = psi_ordinary(sys, u);
      t.add({u, p.real(), p.imag(), std::abs(p)});
    }
    return t;
  }
  if (m == "deformed-zero-energy") {
    const DeformationParams d{c.theta_or(0.05), c.theta_prime_or(0.05)};
    const auto r = to_heun(g, d);
    t.notes.push_back("zero-energy deformed solution regular at u = 0: psi = (1 - xi) Hl(xi), xi = s u^2/(1 + s u^2), g = " +
                      str(g) + ", " + deformation_note(d.theta, d.theta_prime));
    t.columns = {"u", "xi", "re_psi", "im_psi", "abs_psi"};
    for (double u : us) {
      const double xi = r.xi_of_u(u);
      const cplx p = deformed_psi_heun(r, xi);
      t.add({u, xi, p.real(), p.imag(), std::abs(p)});
    }
    return t;
  }
  throw UsageError("--model for wavefunction: ordinary | deformed-zero-energy, got '" + m + "'");
}

void add_param(Table& t, const std::string& name, cplx v) { t.add({name, v.real(), v.imag()}); }

Table cmd_params(const Config& c) {
  Table t;
  t.command = "params";
  t.notes = {kUnits};
  t.columns = {"symbol", "re", "im"};
  const std::string m = c.model.empty() ? "heun" : c.model;
  const double g = c.coupling();
  if (m == "heun") {
    const DeformationParams d{c.theta_or(0.05), c.theta_prime_or(0.05)};
    const auto r = to_heun(g, d);
    t.notes.push_back("Heun block for the zero-energy deformed equation, g = " + str(g) + ", " +
                      deformation_note(d.theta, d.theta_prime));
    t.notes.push_back("f'' + (c/xi + e/(xi-1) + d/(xi-xi0)) f' + (a b xi + q)/(xi (xi-1)(xi-xi0)) f = 0, psi = (1 - xi) f");
    const auto& p = r.params;
    add_param(t, "omega1", r.omega1);
    add_param(t, "omega2", r.omega2);
    add_param(t, "k", r.k);
    add_param(t, "nu", r.nu);
    add_param(t, "q", p.q);
    add_param(t, "xi0", p.xi0);
    add_param(t, "a", p.a);
    add_param(t, "b", p.b);
    add_param(t, "c", p.c);
    add_param(t, "d", p.d);
    add_param(t, "e", p.e);
    add_param(t, "fuchsian_residual", p.fuchsian_residual());
    return t;
  }
  if (m == "generalized-heun") {
    const double eta = c.eta.value_or(kDefaultEta), theta = c.theta_or(0.02);
    const auto red = to_generalized_heun(CoulombSystem::from_coupling(g, eta), theta);
    t.notes.push_back("generalized Heun block for the first-order deformed equation, g = " + str(g) + ", eta = " +
                      str(eta) + ", theta = " + str(theta) + ", x = (1 - i sqrt(6 theta) u)/2");
    for (const auto& w : red.warnings) {
      t.notes.push_back("warning: " + w);
      std::cerr << "kgml: warning: " << w << '\n';
    }
    const auto& p = red.params;
    add_param(t, "a", p.a);
    add_param(t, "b", p.b);
    add_param(t, "rho1", p.rho1);
    add_param(t, "rho2", p.rho2);
    add_param(t, "c", p.c);
    add_param(t, "d", p.d);
    add_param(t, "e", p.e);
    add_param(t, "f", p.f);
    add_param(t, "x1", p.x1);
    add_param(t, "x2", p.x2);
    add_param(t, "fuchsian_residual", p.fuchsian_residual());
    return t;
  }
  throw UsageError("--model for params: heun | generalized-heun, got '" + m + "'");
}

Table cmd_heun_check(const Config& c) {
  const double theta = c.theta_or(0.05);
  if (c.theta_prime && *c.theta_prime != theta)
    throw UsageError("heun-check compares the two forms at theta' = theta; drop --theta-prime or set it equal");
  if (!(c.xi_max > 0.0 && c.xi_max < 1.0)) throw UsageError("--xi-max must lie in (0, 1)");
  const double g = c.coupling();
  const auto r = to_heun(g, {theta, theta});
  Table t;
  t.command = "heun-check";
  t.columns = {"xi", "u", "heun_re", "heun_im", "hyp_re", "hyp_im", "abs_diff"};
  double worst = 0.0;
  const int n = c.points;
  for (int i = 0; i < n; ++i) {
    const double xi = n == 1 ? c.xi_max : c.xi_max * i / (n - 1);
    const cplx a = deformed_psi_heun(r, xi), b = deformed_psi_hypergeometric(r, xi);
    worst = std::max(worst, std::abs(a - b));
    t.add({xi, r.u_of_xi(xi), a.real(), a.imag(), b.real(), b.imag(), std::abs(a - b)});
  }
  t.notes = {kUnits,
             "psi = (1 - xi) Hl(xi) against psi = (1 - xi) 2F1(a, b; 3/2; xi/xi0) at theta = theta' = " + str(theta) +
                 ", g = " + str(g),
             "max abs_diff = " + str(worst)};
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Coulomb Klein-Gordon problem in momentum space, with and without a minimal length", "kgml"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--Z", cfg.Z, "nuclear charge")->check(CLI::PositiveNumber);
  app.add_option("--alpha", cfg.alpha, "fine-structure constant")->check(CLI::PositiveNumber);
  app.add_option("--g", cfg.g, "coupling g = Z alpha (overrides --Z/--alpha)")->check(CLI::PositiveNumber);
  app.add_option("--eta", cfg.eta, "energy E/(m c^2)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--n", cfg.n_range, "radial quantum number k or range a..b");
  app.add_option("--theta", cfg.theta, "dimensionless beta (m c)^2")->check(CLI::NonNegativeNumber);
  app.add_option("--theta-prime", cfg.theta_prime, "dimensionless beta' (m c)^2")->check(CLI::NonNegativeNumber);
  app.add_option("--model", cfg.model, "model selector (depends on the subcommand)");
  app.add_option("--tol", cfg.tol, "integrator tolerance")->check(CLI::PositiveNumber);
  app.add_option("--order", cfg.order, "series truncation order")->check(CLI::PositiveNumber);
  app.add_option("--window", cfg.window, "fit window lo:hi in u");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json", "gnuplot-dat"}));
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--u-min", cfg.u_min, "wavefunction grid start")->check(CLI::PositiveNumber);
  app.add_option("--u-max", cfg.u_max, "wavefunction grid end")->check(CLI::PositiveNumber);
  app.add_option("--points", cfg.points, "number of grid points")->check(CLI::PositiveNumber);
  app.add_option("--spacing", cfg.spacing, "grid spacing")->check(CLI::IsMember({"log", "linear"}));
  app.add_option("--xi-max", cfg.xi_max, "heun-check range end in xi");

  auto* spectrum = app.add_subcommand("spectrum", "bound-state energies from the quantization condition");
  auto* exponents = app.add_subcommand("exponents", "exponents at infinity, analytic and fitted");
  auto* wavefunction = app.add_subcommand("wavefunction", "sampled psi(u)");
  auto* params = app.add_subcommand("params", "Heun / generalized Heun parameter blocks");
  auto* heun_check = app.add_subcommand("heun-check", "Heun vs hypergeometric form at theta = theta'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    Table t;
    if (spectrum->parsed())
      t = cmd_spectrum(cfg);
    else if (exponents->parsed())
      t = cmd_exponents(cfg);
    else if (wavefunction->parsed())
      t = cmd_wavefunction(cfg);
    else if (params->parsed())
      t = cmd_params(cfg);
    else if (heun_check->parsed())
      t = cmd_heun_check(cfg);

    const auto fmt = cfg.format == "json"          ? cli::Format::json
                     : cfg.format == "gnuplot-dat" ? cli::Format::gnuplot
                                                   : cli::Format::csv;
    std::ostringstream os;
    cli::write(os, t, fmt);
    if (cfg.out.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!(f << os.str())) throw UsageError("cannot write " + cfg.out);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "kgml: " << e.what() << '\n';
    return 1;
  } catch (const OutOfDomainError& e) {
    std::cerr << "kgml: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const PhysicsDomainError& e) {
    std::cerr << "kgml: physics-domain error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "kgml: numerical failure: " << e.what() << '\n';
    return 2;
  }
}
