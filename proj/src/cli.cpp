#include "bhlab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "bhlab/certify.hpp"
#include "bhlab/errors.hpp"
#include "bhlab/holder.hpp"
#include "bhlab/spectral.hpp"

namespace bhlab::cli {

namespace fs = std::filesystem;

double parse_real(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double num = parse_real(s.substr(0, slash)), den = parse_real(s.substr(slash + 1));
    if (den == 0.0 || !std::isfinite(num) || !std::isfinite(den)) throw ConfigError("bad fraction: " + s);
    return num / den;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string config_hash(const std::map<std::string, std::string>& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : params) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

using Params = std::map<std::string, std::string>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Context {
  fs::path dir;
  std::ostream& out;
  std::ostream& err;
  std::string command;
  const Params& params;

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    f.precision(12);
    return f;
  }

  void header(std::ostream& os, const std::string& grid, const std::string& tolerances,
              const std::string& verdict) const {
    os << "# bhlab " << kVersion << "\n# command=" << command << "\n# config_hash=" << config_hash(params)
       << "\n# grid=" << grid << "\n# tolerances=" << tolerances << "\n# verdict=" << verdict << "\n";
  }
};

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

std::string grid_desc(const std::string& shape, double h) { return shape + " n=1 h=" + fmt(h); }

// ---- eigen ----------------------------------------------------------------

int cmd_eigen(const Context& c) {
  const auto& P = c.params;
  const std::string q = P.at("quotient"), wname = P.at("weight");
  const double a = parse_real(P.at("a")), eps = parse_real(P.at("eps")), h = parse_real(P.at("h"));
  const double tol = parse_real(P.at("tol"));
  if (wname != "rho" && wname != "omega-inverse") throw ConfigError("weight must be rho or omega-inverse");
  if (eps < 0.0) throw ConfigError("eps must be nonnegative");
  EigenOptions eo;
  const double res_tol = 1e-8;
  const std::string tols = "eigen_tol=" + fmt(eo.tol) + " residual<=" + fmt(res_tol) + " target_tol=" + fmt(tol);
  const std::string grid = PolarMesh(h).describe();

  if (q == "sweep") {
    const std::string form = P.at("form");
    if (form != "rho" && form != "omega") throw ConfigError("form must be rho or omega");
    const auto radii = parse_real_list(P.at("radii"));
    const auto rows = eigen_stability_sweep(a, radii, h, form == "rho" ? SweepForm::rho : SweepForm::omega, eo);
    const double target = form == "rho" ? 1.0 - a : 3.0 - a;
    bool pass = std::fabs(rows.back().lambda - target) <= tol;
    for (const auto& r : rows) pass = pass && r.residual <= res_tol;
    auto f = c.open("eigen.csv");
    c.header(f, grid, tols + " limit=" + fmt(target), verdict(pass));
    f << "form,a,r,lambda,residual\n";
    for (const auto& r : rows) f << form << ',' << fmt(a) << ',' << fmt(r.r) << ',' << fmt(r.lambda) << ',' << fmt(r.residual) << '\n';
    c.out << "eigen sweep: lambda(r=" << fmt(rows.back().r) << ")=" << fmt(rows.back().lambda) << " limit " << fmt(target)
          << " -> " << verdict(pass) << "\n";
    return pass ? kPass : kFail;
  }

  const SpectralWeight w = wname == "rho" ? SpectralWeight::power(a, eps) : SpectralWeight::omega_inverse(a, eps);
  EigenResult r;
  bool pass = true;
  std::string target = "none";
  if (q == "trace") {
    if (wname == "rho") r = trace_eigen(a, eps, h, eo);
    else r = trace_eigen(w, h, eo);
    if (wname == "rho" && eps == 0.0) {
      pass = std::fabs(r.lambda - (1.0 - a)) <= tol;
      target = fmt(1.0 - a);
    }
  } else if (q == "hardy") {
    r = hardy_quotient(w, h, eo);
    if (wname == "rho" && a == 0.0) {
      pass = r.lambda >= 0.25;
      target = ">=0.25";
    }
  } else if (q == "boundary-hardy") {
    r = boundary_hardy_quotient(w, h, eo);
    pass = r.lambda > 0.0;
    target = ">0";
  } else {
    throw ConfigError("quotient must be trace, hardy, boundary-hardy or sweep");
  }
  pass = pass && r.residual <= res_tol;
  auto f = c.open("eigen.csv");
  c.header(f, grid, tols + " target=" + target, verdict(pass));
  const EigenResult rows[] = {r};
  write_eigen_csv(f, rows);
  c.out << "eigen " << r.quotient_id << ": lambda=" << fmt(r.lambda) << " residual=" << fmt(r.residual) << " -> "
        << verdict(pass) << "\n";
  return pass ? kPass : kFail;
}

// ---- sweep ----------------------------------------------------------------

void write_sweep_artifacts(const Context& c, const StabilityReport& r, const std::string& prefix, const std::string& grid,
                           const std::string& verdict_word) {
  const std::string tols = "alpha=" + fmt(r.alpha) + " tau=" + fmt(r.tau) + " slope_tol=" + fmt(r.slope_tol);
  auto f = c.open(prefix + ".csv");
  c.header(f, grid, tols, verdict_word);
  write_sweep_csv(f, r);
  auto p = c.open(prefix + "_plot.dat");
  c.header(p, grid, tols, verdict_word);
  write_sweep_plot(p, r);
  auto v = c.open(prefix + "_verdict.txt");
  write_sweep_verdict(v, r);
}

SweepOptions sweep_options(const Params& P) {
  SweepOptions o;
  o.h = parse_real(P.at("h"));
  o.alpha = parse_real(P.at("alpha"));
  o.tau = parse_real(P.at("tau"));
  o.slope_tol = parse_real(P.at("slope-tol"));
  o.exponents = {parse_real(P.at("p1")), parse_real(P.at("p2")), parse_real(P.at("p3"))};
  return o;
}

int cmd_sweep(const Context& c) {
  const auto& P = c.params;
  const double a = parse_real(P.at("a"));
  const std::string fam_name = P.at("family"), mu = P.at("mu");
  if (mu != "1" && mu != "var") throw ConfigError("mu must be 1 or var");
  SweepFamily fam;
  if (fam_name == "standard") fam = SweepFamily::standard(a, mu == "var");
  else if (fam_name == "fermi") fam = fermi_family(2.0, a);
  else throw ConfigError("family must be standard or fermi");
  const SweepMode mode = parse_sweep_mode(P.at("mode"));
  const auto eps = parse_real_list(P.at("eps"));
  const SweepOptions o = sweep_options(P);
  const std::string grid = grid_desc(to_string(fam.shape), o.h);
  StabilityReport r;
  try {
    r = epsilon_sweep(fam, eps, mode, o);
  } catch (const SweepAbortedError& e) {
    write_sweep_artifacts(c, e.partial(), "sweep", grid, "fail");
    c.err << "sweep aborted: " << e.what() << "\n";
    return kFail;
  }
  write_sweep_artifacts(c, r, "sweep", grid, verdict(r.pass));
  write_sweep_verdict(c.out, r);
  return r.pass ? kPass : kFail;
}

// ---- certify --------------------------------------------------------------

int cmd_certify(const Context& c) {
  const auto& P = c.params;
  const auto phi_a = parse_real_list(P.at("phi-a"));
  const long phi_budget = static_cast<long>(parse_real(P.at("phi-budget")));
  const long v_budget = static_cast<long>(parse_real(P.at("v-budget")));
  const long g_budget = static_cast<long>(parse_real(P.at("gamma-budget")));
  std::vector<CertificationReport> reps = verify_phi_bound(phi_a, phi_budget);
  reps.push_back(verify_v_inequality(v_budget));
  reps.push_back(verify_gamma_rectangle(g_budget));
  bool pass = true;
  for (const auto& r : reps) pass = pass && r.pass;
  const auto extra = verify_gamma_rectangle_exact(g_budget);
  const auto lm = v_landmarks();

  auto f = c.open("certify.txt");
  c.header(f, "none", "phi_budget=" + fmt(phi_budget) + " v_budget=" + fmt(v_budget) + " gamma_budget=" + fmt(g_budget),
           verdict(pass));
  for (const auto& r : reps) f << to_record(r) << '\n';
  f << "# supplementary (not part of the verdict)\n# " << to_record(extra) << '\n';
  f << "# v_landmarks v(5.1)=" << fmt(lm.v_at_5_1) << " v'(5.1)=" << fmt(lm.dv_at_5_1) << " min_v=" << fmt(lm.min_value)
    << " argmin=" << fmt(lm.argmin) << '\n';
  for (const auto& r : reps) c.out << r.target_id << ": " << (r.pass ? "pass" : "FAIL") << " bound=" << fmt(r.certified_infimum_lower_bound) << "\n";
  return pass ? kPass : kFail;
}

// ---- solve ----------------------------------------------------------------

int cmd_solve(const Context& c) {
  const auto& P = c.params;
  const double a = parse_real(P.at("a"));
  if (!(a > -1.0 && a < 1.0)) throw ConfigError("solve needs a in (-1, 1)");
  auto hs = parse_real_list(P.at("h"));
  const double ymin = parse_real(P.at("error-y-min")), min_order = parse_real(P.at("min-order"));
  constexpr double pi = std::numbers::pi;
  ConvergenceProblem p;
  p.u_exact = [a](const XPoint& x, double y) { return std::sin(pi * x[0]) * y * std::pow(std::fabs(y), -a); };
  p.f = [a](const XPoint& x, double y) { return pi * pi * std::sin(pi * x[0]) * y * std::pow(std::fabs(y), -a); };
  p.weight = [a](const XPoint&, double y) { return std::pow(std::fabs(y), a); };
  p.error_y_min = ymin;
  SolverOptions so;
  const auto rows = convergence_study(p, hs, so);
  bool pass = true;
  for (std::size_t i = 1; i < rows.size(); ++i) pass = pass && (rows[i].exact || rows[i].order >= min_order);

  const std::string grid = "half_rectangle n=1 h=" + P.at("h");
  const std::string tols = "solver_tol=" + fmt(so.tol) + " min_order=" + fmt(min_order) + " error_y_min=" + fmt(ymin);
  auto f = c.open("solve_orders.csv");
  c.header(f, grid, tols, verdict(pass));
  f << "h,max_error,order,exact\n";
  for (const auto& r : rows)
    f << fmt(r.h) << ',' << fmt(r.max_error) << ',' << (std::isnan(r.order) ? std::string("nan") : fmt(r.order)) << ','
      << (r.exact ? 1 : 0) << '\n';

  auto g = std::make_shared<const HalfGrid>(build_half_grid(1, p.shape, hs.back(), p.extent));
  const auto mp = manufactured_problem(g, p.u_exact, p.weight, p.spec, p.options, p.mode, p.f, p.F);
  const auto sol = solve_linear(mp.system, mp.rhs, so);
  auto ff = c.open("solve_field.csv");
  c.header(ff, grid_desc("half_rectangle", hs.back()), tols, verdict(pass));
  write_field_csv(ff, sol.field, {"u solution of the manufactured odd problem, a=" + fmt(a)});
  for (const auto& r : rows) c.out << "h=" << fmt(r.h) << " err=" << fmt(r.max_error) << " order=" << fmt(r.order) << "\n";
  return pass ? kPass : kFail;
}

// ---- fermi-demo -----------------------------------------------------------

int cmd_fermi(const Context& c) {
  const auto& P = c.params;
  FermiDemoOptions o;
  o.radius = parse_real(P.at("radius"));
  o.a = parse_real(P.at("a"));
  o.h = parse_real(P.at("h"));
  o.alpha = parse_real(P.at("alpha"));
  o.eps_list = parse_real_list(P.at("eps"));
  o.tau = parse_real(P.at("tau"));
  o.slope_tol = parse_real(P.at("slope-tol"));
  const double jac_tol = parse_real(P.at("jacobian-tol"));
  const auto r = fermi_demo(o);
  const bool jac_ok = r.jacobian_error <= jac_tol;
  const bool pass = jac_ok && r.c0.pass && r.c1_restricted.pass;
  const std::string grid = "fermi (t,y) " + grid_desc("half_rectangle", o.h) + " circle R=" + fmt(o.radius);
  write_sweep_artifacts(c, r.c0, "fermi_c0", grid, verdict(r.c0.pass));
  write_sweep_artifacts(c, r.c1_restricted, "fermi_c1_restricted", grid, verdict(r.c1_restricted.pass));
  // Whether the restriction is needed is open: this table is reported, not judged.
  write_sweep_artifacts(c, r.c1_unrestricted, "fermi_c1_unrestricted", grid, "unjudged");
  auto f = c.open("fermi_verdict.txt");
  c.header(f, grid, "jacobian_tol=" + fmt(jac_tol), verdict(pass));
  f << "jacobian_error=" << fmt(r.jacobian_error) << " " << verdict(jac_ok) << "\n"
    << "c0 uniformity_ratio=" << fmt(r.c0.uniformity_ratio) << " trend_slope=" << fmt(r.c0.trend_slope) << " "
    << verdict(r.c0.pass) << "\n"
    << "c1_restricted uniformity_ratio=" << fmt(r.c1_restricted.uniformity_ratio)
    << " trend_slope=" << fmt(r.c1_restricted.trend_slope) << " " << verdict(r.c1_restricted.pass) << "\n"
    << "c1_unrestricted uniformity_ratio=" << fmt(r.c1_unrestricted.uniformity_ratio)
    << " trend_slope=" << fmt(r.c1_unrestricted.trend_slope) << " unjudged\n";
  c.out << "fermi-demo: jacobian_error=" << fmt(r.jacobian_error) << " c0=" << verdict(r.c0.pass)
        << " c1_restricted=" << verdict(r.c1_restricted.pass) << " -> " << verdict(pass) << "\n";
  return pass ? kPass : kFail;
}

// ---- report ---------------------------------------------------------------

std::string artifact_verdict(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    if (line.rfind("# verdict=", 0) == 0) return line.substr(10);
  }
  return "none";
}

int cmd_report(const Context& c) {
  const auto& P = c.params;
  std::vector<fs::path> inputs;
  if (!P.at("inputs").empty()) {
    std::stringstream ss(P.at("inputs"));
    std::string item;
    while (std::getline(ss, item, ',')) inputs.emplace_back(item);
  } else {
    for (const auto& e : fs::directory_iterator(c.dir)) {
      const auto name = e.path().filename().string();
      if (!e.is_regular_file() || name == "summary.csv") continue;
      if (e.path().extension() == ".csv" || name == "certify.txt" || name == "fermi_verdict.txt") inputs.push_back(e.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());
  int judged = 0, failed = 0;
  std::ostringstream rows;
  for (const auto& p : inputs) {
    const std::string v = fs::exists(p) ? artifact_verdict(p) : "missing";
    if (v == "pass" || v == "fail" || v == "missing") ++judged;
    if (v == "fail" || v == "missing") ++failed;
    rows << p.filename().string() << ',' << v << '\n';
  }
  const bool pass = judged > 0 && failed == 0;
  auto f = c.open("summary.csv");
  c.header(f, "none", "none", verdict(pass));
  f << "artifact,verdict\n" << rows.str();
  f << "# overall=" << verdict(pass) << " judged=" << judged << " failed=" << failed << '\n';
  c.out << "report: " << judged << " judged, " << failed << " failed -> " << verdict(pass) << "\n";
  return pass ? kPass : kFail;
}

// ---- plumbing -------------------------------------------------------------

struct Sub {
  CLI::App* app = nullptr;
  Params params;
  int (*fn)(const Context&) = nullptr;
};

void add(Sub& s, const std::string& name, const std::string& def, const std::string& help) {
  s.params[name] = def;
  s.app->add_option("--" + name, s.params[name], help)->capture_default_str();
}

bool take_flag(std::vector<std::string>& args, const std::string& flag, std::string& value) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag) {
      if (i + 1 >= args.size()) throw ConfigError(flag + " needs a value");
      value = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      return true;
    }
    if (args[i].rfind(flag + "=", 0) == 0) {
      value = args[i].substr(flag.size() + 1);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

}  // namespace

int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = argv_in;
  std::string config_path, out_dir;
  try {
    take_flag(args, "--config", config_path);
    if (!take_flag(args, "--output-dir", out_dir)) {
      const char* env = std::getenv("BHLAB_OUTPUT_DIR");
      out_dir = env && *env ? env : ".";
    }
    if (!config_path.empty() && !args.empty() && args[0].rfind("-", 0) != 0) {
      // File entries go first so explicit flags, parsed later, win.
      std::vector<std::string> injected;
      for (const auto& [k, v] : read_config(config_path)) injected.push_back("--" + k + "=" + v);
      args.insert(args.begin() + 1, injected.begin(), injected.end());
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Numerical verification harness for degenerate and singular weighted elliptic equations", "bhlab"};
  // --h is the mesh size, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer("Global: --config FILE (key=value), --output-dir DIR (default $BHLAB_OUTPUT_DIR or .)");

  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, const std::string& help, int (*fn)(const Context&)) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.fn = fn;
    return s;
  };
  {
    Sub& s = make("eigen", "Trace, Hardy and stability eigenvalue quotients", cmd_eigen);
    add(s, "quotient", "trace", "trace | hardy | boundary-hardy | sweep");
    add(s, "weight", "rho", "rho | omega-inverse");
    add(s, "a", "0", "weight exponent");
    add(s, "eps", "0", "regularization");
    add(s, "h", "1/64", "mesh size");
    add(s, "form", "rho", "sweep form: rho | omega");
    add(s, "radii", "4,16,64", "sweep radii r (eps = 1/r)");
    add(s, "tol", "0.05", "tolerance against the sharp value");
  }
  {
    Sub& s = make("sweep", "Holder seminorm uniformity over eps", cmd_sweep);
    add(s, "family", "standard", "standard | fermi");
    add(s, "a", "0.5", "weight exponent");
    add(s, "mu", "1", "1 | var (1 + 0.1 x^2)");
    add(s, "mode", "ratio_c0", "ratio_c0 | ratio_c1 | odd_direct_c0");
    add(s, "alpha", "0.4", "Holder exponent");
    add(s, "h", "1/64", "mesh size");
    add(s, "eps", "1,0.3,0.1,0.03,0.01,0", "eps values");
    add(s, "tau", "3", "uniformity threshold");
    add(s, "slope-tol", "0.1", "trend threshold");
    add(s, "p1", "inf", "integrability of f");
    add(s, "p2", "inf", "integrability of F");
    add(s, "p3", "inf", "integrability of the third datum");
  }
  {
    Sub& s = make("certify", "Sampled infimum certificates", cmd_certify);
    add(s, "phi-a", "0.9,0.5,0,-1,-3,-10", "a samples for the Phi bound");
    add(s, "phi-budget", "20000", "samples per a");
    add(s, "v-budget", "100000", "samples for the v inequality");
    add(s, "gamma-budget", "2000000", "samples for the gamma rectangle");
  }
  {
    Sub& s = make("solve", "Manufactured odd problem with convergence study", cmd_solve);
    add(s, "a", "0.5", "weight exponent in (-1, 1)");
    add(s, "h", "1/16,1/32,1/64", "decreasing mesh sizes");
    add(s, "error-y-min", "0.1", "error measured for y >= this");
    add(s, "min-order", "1.5", "required observed order");
  }
  {
    Sub& s = make("fermi-demo", "Circle Sigma in Fermi coordinates with the chi ratio", cmd_fermi);
    add(s, "radius", "2", "circle radius");
    add(s, "a", "0.5", "weight exponent in (-1, 1)");
    add(s, "h", "1/64", "mesh size");
    add(s, "alpha", "0.4", "Holder exponent");
    add(s, "eps", "0.1,0.03,0.01,0.003,0.001,0", "eps values");
    add(s, "tau", "3", "uniformity threshold");
    add(s, "slope-tol", "0.1", "trend threshold");
    add(s, "jacobian-tol", "1e-6", "Jacobian oracle tolerance");
  }
  {
    Sub& s = make("report", "Merge artifact verdicts into summary.csv", cmd_report);
    add(s, "inputs", "", "comma-separated files (default: artifacts in the output directory)");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      fs::create_directories(out_dir);
      Context ctx{out_dir, out, err, name, s.params};
      return s.fn(ctx);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kUsage;
    } catch (const std::invalid_argument& e) {
      err << "invalid argument: " << e.what() << "\n";
      return kUsage;
    } catch (const std::exception& e) {
      err << name << " failed: " << e.what() << "\n";
      return kFail;
    }
  }
  return kUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bhlab::cli
