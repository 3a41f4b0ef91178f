// bopp: command-line front end for the phase-space Weyl calculus library.
//
// Configuration is a flat "key = value" file ('#' starts a comment); the
// flags --command, --seed, --out, --only and --tol override it.  Exit codes:
// 0 success, 2 invalid configuration, 3 numerical failure or a failed check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bopp/acceptance.hpp"
#include "bopp/io.hpp"
#include "bopp/modspace.hpp"
#include "bopp/ops.hpp"
#include "bopp/spectral.hpp"
#include "bopp/wavepacket.hpp"
#include "bopp/weyl.hpp"

using namespace bopp;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kCommands = {"transform",  "wigner",         "weyl-matrix", "phase-matrix",
                                         "spectrum",   "transfer-check", "intertwine-check", "modnorm",
                                         "sjostrand-norm", "capacity",   "certify-concentration", "acceptance"};

const std::set<std::string> kKeys = {"command", "seed", "out", "only", "n", "points", "halfwidth", "omega_scale",
                                     "omega_file", "theta", "nmat", "symbol", "symbol_file", "symbol_width",
                                     "symbol_center", "taper", "window_index", "window_width", "field_index",
                                     "count", "s", "q", "M_scale", "M_file", "field_file", "concentration"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double x = 0.0;
    if (!bopp::parse_double(trim(cell), x)) throw ConfigError("key '" + key + "': '" + cell + "' is not a number");
    out.push_back(x);
  }
  return out;
}

class Config {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected key = value");
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void set(const std::string& k, const std::string& v) {
    if (k.rfind("tol.", 0) == 0) {
      tol[k.substr(4)] = number(k, v);
      return;
    }
    if (!kKeys.count(k)) throw ConfigError("unknown config key '" + k + "'");
    kv_[k] = v;
  }

  bool has(const std::string& k) const { return kv_.count(k) > 0; }
  std::string str(const std::string& k, const std::string& def) const { return has(k) ? kv_.at(k) : def; }
  double num(const std::string& k, double def) const { return has(k) ? number(k, kv_.at(k)) : def; }
  int integer(const std::string& k, int def) const {
    const double v = num(k, def);
    if (v != std::floor(v)) throw ConfigError("key '" + k + "' must be an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& k) const { return parse_list(k, kv_.at(k)); }
  std::string path(const std::string& k) const {
    const std::string p = kv_.at(k);
    if (!fs::exists(p)) throw ConfigError("key '" + k + "' references a missing file: " + p);
    return p;
  }

  std::map<std::string, double> tol;

 private:
  static double number(const std::string& k, const std::string& v) {
    const auto l = parse_list(k, v);
    if (l.size() != 1) throw ConfigError("key '" + k + "' expects one number");
    return l[0];
  }
  std::map<std::string, std::string> kv_;
};

RMat real_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) rows.push_back(parse_list(path, line));
  }
  if (rows.empty()) throw ConfigError(path + " holds no matrix");
  RMat M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(path + " is ragged");
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

RMat square(const std::string& key, const std::vector<double>& v) {
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
  if (m * m != static_cast<int>(v.size())) throw ConfigError("key '" + key + "' needs m*m entries");
  RMat M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = v[i * m + j];
  return M;
}

// Everything resolved from the configuration before any computation.
struct Setup {
  int n = 1;
  int points = 64;
  SymplecticForm form;
  GridSpec base;  // grid of R^n
  SymbolSpec symbol;
  int window_index = 0;
  double window_width = 1.0;
  int field_index = 0;
  int count = 3;
  double s = 0.0, q = 2.0;
};

Setup resolve(const Config& c) {
  Setup st;
  st.n = c.integer("n", 1);
  st.points = c.integer("points", 64);
  if (st.n < 1) throw ConfigError("n must be >= 1");
  if (st.points < 2 || st.points % 2) throw ConfigError("points must be even and >= 2");
  if (c.has("omega_file")) {
    st.form = build_form(real_matrix_csv(c.path("omega_file")));
  } else if (c.has("theta")) {
    const RMat theta = square("theta", c.list("theta"));
    const RMat nmat = c.has("nmat") ? square("nmat", c.list("nmat")) : RMat::Zero(theta.rows(), theta.cols());
    st.form = build_form_from_blocks(theta, nmat);
  } else {
    st.form = build_form(c.num("omega_scale", 1.0) * standard_J(st.n));
  }
  if (st.form.n != st.n) throw ConfigError("Omega dimension does not match n");
  st.base = c.has("halfwidth") ? GridSpec::make(st.n, st.points, c.num("halfwidth", 0.0))
                               : GridSpec::self_dual(st.n, st.points);
  const std::string name = c.str("symbol", "harmonic");
  const int d = 2 * st.n;
  if (name == "harmonic") {
    st.symbol = symbol_harmonic(st.n);
  } else if (name == "gaussian") {
    RVec center = RVec::Zero(d);
    if (c.has("symbol_center")) {
      const auto v = c.list("symbol_center");
      if (static_cast<int>(v.size()) != d) throw ConfigError("symbol_center needs 2n entries");
      for (int a = 0; a < d; ++a) center(a) = v[a];
    }
    st.symbol = symbol_gaussian(center, c.num("symbol_width", 1.0));
  } else if (name == "constant") {
    st.symbol = symbol_constant(d, 1.0);
  } else if (name == "linear-x") {
    st.symbol = symbol_linear(d, 0);
  } else if (name == "linear-xi") {
    st.symbol = symbol_linear(d, st.n);
  } else if (name == "file") {
    if (!c.has("symbol_file")) throw ConfigError("symbol = file needs symbol_file");
    const SampledField f = field_from_record(read_pswc(c.path("symbol_file")));
    if (f.grid.dim != d) throw ConfigError("symbol_file must hold a field on R^{2n}");
    st.symbol = symbol_from_field(f);
  } else {
    throw ConfigError("unknown symbol '" + name + "'");
  }
  if (c.has("taper")) st.symbol = symbol_tapered(st.symbol, c.num("taper", 1.0));
  st.window_index = c.integer("window_index", 0);
  st.window_width = c.num("window_width", 1.0);
  st.field_index = c.integer("field_index", 0);
  st.count = c.integer("count", 3);
  st.s = c.num("s", 0.0);
  const std::string qs = c.str("q", "2");
  st.q = (qs == "inf" || qs == "infinity") ? std::numeric_limits<double>::infinity() : c.num("q", 2.0);
  if (st.window_index < 0 || st.field_index < 0 || st.count < 1) throw ConfigError("indices must be >= 0, count >= 1");
  if (!(st.window_width > 0.0)) throw ConfigError("window_width must be positive");
  if (!(st.q >= 1.0) || !(st.s >= 0.0)) throw ConfigError("need q >= 1 and s >= 0");
  return st;
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  void value(const std::string& key, double v) { rows_.push_back({key, fmt_double(v)}); }
  void text(const std::string& key, const std::string& v) { rows_.push_back({key, v}); }
  void line(const std::string& s) {
    report_ += s + "\n";
    std::cout << s << "\n";
  }
  void array(const std::string& name, const ArrayRecord& rec) {
    write_pswc((dir_ / (name + ".pswc")).string(), rec);
    rows_.push_back({"artifact", name + ".pswc"});
  }
  void flush() {
    write_csv((dir_ / "summary.csv").string(), {"key", "value"}, rows_);
    std::ofstream((dir_ / "report.txt").string()) << report_;
  }

 private:
  fs::path dir_;
  std::vector<std::vector<std::string>> rows_;
  std::string report_;
};

double tol_of(const Config& c, const std::string& key) {
  const auto it = c.tol.find(key);
  return it != c.tol.end() ? it->second : default_tolerances().at(key);
}

int cmd_transform(const Setup& st, Output& out, std::mt19937_64& rng) {
  const GridSpec g = adapted_grid(st.form, st.points);
  std::normal_distribution<double> nd;
  RVec center(2 * st.n);
  for (int a = 0; a < 2 * st.n; ++a) center(a) = 0.5 * nd(rng);
  const SampledField A = sample_symbol(symbol_gaussian(center, 1.0), g);
  const SampledField Fw = sympl_fourier_omega(A, st.form);
  out.array("input", to_record(A));
  out.array("F", to_record(fourier(A, -1)));
  out.array("F_omega", to_record(Fw));
  if ((st.form.omega - standard_J(st.n)).cwiseAbs().maxCoeff() == 0.0)
    out.array("F_sigma", to_record(sympl_fourier_sigma(A)));
  const double inv = rel_diff(sympl_fourier_omega(Fw, st.form), A);
  out.value("involution_residual", inv);
  out.value("norm_ratio", Fw.norm() / A.norm());
  out.line("F_omega involution residual " + fmt_double(inv));
  return 0;
}

int cmd_wigner(const Setup& st, Output& out) {
  const SampledField u = hermite_function(st.base, st.field_index);
  const SampledField v = hermite_function(st.base, st.window_index, st.window_width);
  const SampledField W = cross_wigner(u, v);
  out.array("wigner", to_record(W));
  const double moyal = std::abs(inner(W, W) * std::pow(2.0 * kPi, st.n) - u.norm() * u.norm() * v.norm() * v.norm());
  out.value("moyal_residual", moyal);
  out.line("W(h_" + std::to_string(st.field_index) + ", h_" + std::to_string(st.window_index) +
           ") Moyal residual " + fmt_double(moyal));
  return 0;
}

int cmd_weyl_matrix(const Setup& st, Output& out) {
  const OperatorMatrix A = weyl_kernel(st.symbol, st.base);
  out.array("weyl_matrix", to_record(A.entries));
  out.value("hermiticity_residual", A.hermiticity_residual());
  out.line("Weyl matrix " + std::to_string(A.entries.rows()) + "x" + std::to_string(A.entries.cols()) +
           ", hermiticity residual " + fmt_double(A.hermiticity_residual()));
  return 0;
}

int cmd_phase_matrix(const Setup& st, Output& out) {
  const GridSpec g = adapted_grid(st.form, st.points);
  const OperatorMatrix A = phase_weyl_matrix(st.symbol, st.form, g);
  out.array("phase_matrix", to_record(A.entries));
  out.value("hermiticity_residual", A.hermiticity_residual());
  out.line("A~_omega matrix " + std::to_string(A.entries.rows()) + "x" + std::to_string(A.entries.cols()));
  return 0;
}

int cmd_spectrum(const Setup& st, Output& out) {
  const SpectralResult r = eigensolve(weyl_kernel(st.symbol, st.base), st.count);
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    out.value("eigenvalue_" + std::to_string(k), r.eigenvalues[k]);
    out.value("residual_" + std::to_string(k), r.residuals[k]);
    out.array("eigenfield_" + std::to_string(k), to_record(r.eigenfields[k]));
    out.line("lambda_" + std::to_string(k) + " = " + fmt_double(r.eigenvalues[k]));
  }
  return 0;
}

int cmd_transfer(const Setup& st, const Config& c, Output& out) {
  const TransferReport r = spectrum_transfer_check(st.symbol, st.form, st.count, st.points);
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    out.value("eigenvalue_" + std::to_string(k), r.eigenvalues[k]);
    out.line("lambda_" + std::to_string(k) + " = " + fmt_double(r.eigenvalues[k]));
  }
  for (const auto& e : r.entries)
    out.value("residual_" + std::to_string(e.window) + "_" + std::to_string(e.function), e.residual);
  out.value("max_residual", r.max_residual);
  out.value("window_spread", r.window_spread);
  const double t = tol_of(c, "transfer");
  out.line("max residual " + fmt_double(r.max_residual) + " (tolerance " + fmt_double(t) + ")");
  return r.max_residual <= t ? 0 : kExitNumeric;
}

int cmd_intertwine(const Setup& st, const Config& c, Output& out) {
  const DarbouxFactor fac = darboux_factor(st.form);
  const GridSpec Gw = adapted_grid(st.form, st.points);
  const Window phi = Window::hermite(st.base, st.window_index, st.window_width);
  const OperatorMatrix Ah = weyl_kernel(compose_linear(st.symbol, fac.f), st.base);
  const OperatorMatrix At = phase_weyl_matrix(st.symbol, st.form, Gw);
  double worst = 0.0;
  for (int k = 0; k < st.count; ++k) {
    const SampledField u = hermite_function(st.base, k);
    const double r =
        norm(At.apply(wavepacket_f(fac, phi, u, &Gw)) - wavepacket_f(fac, phi, Ah.apply(u), &Gw)) / u.norm();
    out.value("residual_h" + std::to_string(k), r);
    worst = std::max(worst, r);
  }
  const double t = tol_of(c, "intertwining");
  out.value("max_residual", worst);
  out.line("intertwining residual " + fmt_double(worst) + " (tolerance " + fmt_double(t) + ")");
  return worst <= t ? 0 : kExitNumeric;
}

int cmd_modnorm(const Setup& st, Output& out) {
  const ModNormParams p{st.s, st.q, Window::hermite(st.base, st.window_index, st.window_width)};
  const double v = mod_norm(hermite_function(st.base, st.field_index), p);
  out.value("mod_norm", v);
  out.line("mod norm " + fmt_double(v));
  return 0;
}

int cmd_sjostrand(const Setup& st, Output& out) {
  if (st.n != 1) throw ConfigError("sjostrand-norm needs n = 1");
  if (st.points > kSjostrandMaxPoints) throw ConfigError("sjostrand-norm needs points <= 24");
  const GridSpec g = GridSpec::make(2, st.points, 6.0);
  const double v = sjostrand_norm(st.symbol, Window::hermite(g, st.window_index, st.window_width), st.s);
  out.value("sjostrand_norm", v);
  out.line("Sjostrand norm " + fmt_double(v));
  return 0;
}

RMat ellipsoid_matrix(const Config& c, int d) {
  if (c.has("M_file")) return real_matrix_csv(c.path("M_file"));
  return c.num("M_scale", 1.0) * RMat::Identity(d, d);
}

int cmd_capacity(const Setup& st, const Config& c, Output& out) {
  const double cap = symplectic_capacity(make_ellipsoid(ellipsoid_matrix(c, 2 * st.n)));
  out.value("capacity", cap);
  out.line("capacity " + fmt_double(cap));
  return 0;
}

int cmd_certify(const Setup& st, const Config& c, Output& out) {
  SampledField U;
  if (c.has("field_file")) {
    U = field_from_record(read_pswc(c.path("field_file")));
  } else {
    const double k = c.num("concentration", 1.0);
    U = SampledField::sample(phase_space_grid(st.base), [&](const double* z) {
      double r2 = 0.0;
      for (int a = 0; a < 2 * st.n; ++a) r2 += z[a] * z[a];
      return cplx(std::exp(-k * r2));
    });
  }
  const ConcentrationReport r = concentration_certificate(U, make_ellipsoid(ellipsoid_matrix(c, U.grid.dim)));
  out.value("capacity", r.capacity);
  out.value("envelope_C", r.C);
  out.text("verdict", verdict_name(r.verdict));
  out.line(std::string("verdict ") + verdict_name(r.verdict) + " (capacity " + fmt_double(r.capacity) + ")");
  return r.verdict == Verdict::Consistent ? 0 : kExitNumeric;
}

int cmd_acceptance(const Config& c, const std::string& only, std::uint64_t seed, Output& out) {
  AcceptanceOptions opt;
  opt.tol = c.tol;
  opt.only = only;
  opt.seed = seed;
  bool ok = true;
  std::vector<std::vector<std::string>> rows;
  run_acceptance(opt, [&](const CriterionResult& r) {
    out.line(format_result(r));
    for (const auto& n : r.notes) out.line("       " + n);
    std::cout.flush();
    ok = ok && r.pass;
    for (const auto& ch : r.checks)
      rows.push_back({std::to_string(r.id), r.name, ch.key, fmt_double(ch.measured), fmt_double(ch.tol),
                      ch.pass ? "pass" : "fail"});
    out.text("criterion_" + std::to_string(r.id), r.pass ? "pass" : "fail");
  });
  out.line(ok ? "acceptance: all criteria pass" : "acceptance: FAILED");
  out.text("acceptance", ok ? "pass" : "fail");
  return ok ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space Weyl operators: transforms, matrices, spectra and certificates"};
  std::string config_path, command, out_dir, only;
  std::uint64_t seed = 0;
  std::vector<std::string> tols;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--command", command, "command to run");
  app.add_option("--seed", seed, "seed for every random draw");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--only", only, "run a single acceptance criterion (name or number)");
  app.add_option("--tol", tols, "tolerance override KEY=VAL (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  Config cfg;
  Setup st;
  std::unique_ptr<Output> out;
  try {
    if (!config_path.empty()) cfg.load(config_path);
    for (const auto& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("--tol expects KEY=VAL, got '" + t + "'");
      cfg.set("tol." + trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    for (const auto& [k, v] : cfg.tol) {
      if (!default_tolerances().count(k)) throw ConfigError("unknown tolerance key '" + k + "'");
      if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
    }
    if (command.empty()) command = cfg.str("command", "");
    if (command.empty()) throw ConfigError("no command given (use --command or command = ... in the config)");
    if (!kCommands.count(command)) throw ConfigError("unknown command '" + command + "'");
    if (app.count("--seed") == 0) seed = static_cast<std::uint64_t>(cfg.num("seed", 20240617));
    if (out_dir.empty()) out_dir = cfg.str("out", "bopp_out");
    if (only.empty()) only = cfg.str("only", "");
    if (!only.empty()) {
      bool known = false;
      const auto& names = criterion_names();
      for (std::size_t i = 0; i < names.size(); ++i) known = known || names[i] == only || std::to_string(i + 1) == only;
      if (!known) throw ConfigError("unknown criterion '" + only + "'");
    }
    st = resolve(cfg);
    out = std::make_unique<Output>(out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "bopp: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "bopp: invalid configuration: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "bopp: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }

  out->text("command", command);
  out->value("seed", static_cast<double>(seed));
  std::mt19937_64 rng(seed);
  int rc = 0;
  try {
    if (command == "transform") rc = cmd_transform(st, *out, rng);
    else if (command == "wigner") rc = cmd_wigner(st, *out);
    else if (command == "weyl-matrix") rc = cmd_weyl_matrix(st, *out);
    else if (command == "phase-matrix") rc = cmd_phase_matrix(st, *out);
    else if (command == "spectrum") rc = cmd_spectrum(st, *out);
    else if (command == "transfer-check") rc = cmd_transfer(st, cfg, *out);
    else if (command == "intertwine-check") rc = cmd_intertwine(st, cfg, *out);
    else if (command == "modnorm") rc = cmd_modnorm(st, *out);
    else if (command == "sjostrand-norm") rc = cmd_sjostrand(st, *out);
    else if (command == "capacity") rc = cmd_capacity(st, cfg, *out);
    else if (command == "certify-concentration") rc = cmd_certify(st, cfg, *out);
    else rc = cmd_acceptance(cfg, only, seed, *out);
  } catch (const ConfigError& e) {
    std::cerr << "bopp: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    out->text("error", std::string(errc_name(e.code())) + ": " + e.what());
    out->flush();
    std::cerr << "bopp: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == Errc::InvalidArgument || e.code() == Errc::IoError ? kExitConfig : kExitNumeric;
  }
  out->text("exit_code", std::to_string(rc));
  out->flush();
  return rc;
}
