#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "dimlab/acceptance.hpp"
#include "dimlab/construction.hpp"
#include "dimlab/counting.hpp"
#include "dimlab/dimension.hpp"
#include "dimlab/growth.hpp"
#include "dimlab/kernels.hpp"
#include "dimlab/logderiv.hpp"
#include "dimlab/report.hpp"
#include "dimlab/rng.hpp"

namespace {

using namespace dimlab;

constexpr double kPi = 3.141592653589793238462643383279502884;

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-")
    std::fputs(text.c_str(), stdout);
  else
    write_text_file(path, text);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const auto comma = csv.find(',', pos);
    out.push_back(std::stod(
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

TSetParams parse_params(const std::string& csv) {
  const auto v = parse_list(csv);
  if (v.size() != 4) throw CLI::ValidationError("--params expects alpha1,alpha2,q,lambda");
  return {v[0], v[1], v[2], v[3]};
}

LogMFn logM_for(const FunctionModel& m, double rmax) {
  if (m.has_logM_oracle())
    return [m](double r) { return m.logM_oracle(r); };
  auto profile = build_profile(m, 1.0, rmax);
  return [p = std::move(profile)](double r) { return p.logM_at(r); };
}

int run_growth(const std::string& model_spec, double rmin, double rmax, int per_octave,
               const std::string& check, const std::string& csv_path,
               const std::string& out) {
  const auto m = FunctionModel::parse(model_spec);
  const auto profile = build_profile(m, rmin, rmax, per_octave);
  Json cfg;
  cfg["model"] = m.spec_string();
  cfg["rmin"] = rmin;
  cfg["rmax"] = rmax;
  cfg["per_octave"] = per_octave;
  Json rep = report_envelope("growth", cfg);
  rep["profile"] = to_json(profile);
  int status = 0;
  if (!check.empty()) {
    double A = 0, B = 0, C = 0, r0 = 1.0;
    for (const auto& item : CLI::detail::split(check, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--check-regular expects A=..,B=..,C=..[,r0=..]");
      const std::string k = item.substr(0, eq);
      const double v = std::stod(item.substr(eq + 1));
      if (k == "A") A = v;
      else if (k == "B") B = v;
      else if (k == "C") C = v;
      else if (k == "r0") r0 = v;
      else throw CLI::ValidationError("unknown key in --check-regular: " + k);
    }
    const auto cert = regularity_check(profile, A, B, C, r0);
    rep["certificate"] = to_json(cert);
    cfg["check_regular"] = check;
    rep["config"] = cfg;
    if (!cert.violations.empty()) status = 2;
  }
  emit(rep, out);
  if (!csv_path.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < profile.r_grid.size(); ++i)
      rows.push_back({profile.r_grid[i], profile.logM[i]});
    write_text_file(csv_path, csv_table({"r", "logM"}, rows));
  }
  return status;
}

int run_values(const std::string& model_spec, const std::string& a_text, double rmin,
               double rmax, int per_octave, const std::string& window_text,
               const std::string& csv_path, const std::string& out) {
  const auto m = FunctionModel::parse(model_spec);
  const cplx a = parse_complex(a_text);
  LogMFn logM;
  try {
    logM = logM_for(m, 2.0 * rmax);
  } catch (...) {
    logM = {};
  }
  const auto cd = build_counting(m, a, rmin, rmax, per_octave, logM, rmin * 4, rmax / 2);
  Json cfg;
  cfg["model"] = m.spec_string();
  cfg["a"] = a_text;
  cfg["rmin"] = rmin;
  cfg["rmax"] = rmax;
  Json rep = report_envelope("values", cfg);
  rep["counting"] = to_json(cd);
  if (!window_text.empty()) {
    const auto v = parse_list(window_text);
    if (v.size() != 3) throw CLI::ValidationError("--window expects mu,R,grid");
    rep["window"] = to_json(regular_window_measure(cd, v[0], v[1], static_cast<int>(v[2])));
  }
  emit(rep, out);
  if (!csv_path.empty()) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : cd.samples) {
      double T = 0.0;
      try {
        T = characteristic(m, s.r);
      } catch (...) {
        T = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back({s.r, static_cast<double>(s.n), s.N, T});
    }
    write_text_file(csv_path, csv_table({"r", "n", "N", "T"}, rows));
  }
  return 0;
}

int run_density(const std::string& model_spec, double R, const std::string& params_text,
                double samples, std::uint64_t seed, const std::string& method, int grid_nr,
                int grid_ntheta, int workers, const std::string& dump_csv,
                const std::string& out) {
  const auto m = FunctionModel::parse(model_spec);
  const auto params = parse_params(params_text);
  const auto logM = logM_for(m, 4.0 * R * (1.0 + params.lambda));
  auto pred = [&](cplx z) { return tset_member(m, params, z, logM); };
  DensityEstimate d;
  if (method == "grid")
    d = region_density(pred, R, PolarGrid{grid_nr, grid_ntheta, workers});
  else
    d = region_density(pred, R, MonteCarlo{static_cast<long long>(samples), seed, workers});
  if (!dump_csv.empty()) {
    // per-sample debug dump (monte-carlo path)
    std::vector<std::vector<double>> rows;
    const long long n = std::min<long long>(static_cast<long long>(samples), 1000000);
    for (long long i = 0; i < n; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      const double r = R * std::sqrt(1.0 + 3.0 * rng.next_double());
      const double th = 2.0 * kPi * rng.next_double();
      const cplx z = r * cplx(std::cos(th), std::sin(th));
      rows.push_back({z.real(), z.imag(), pred(z) ? 1.0 : 0.0});
    }
    write_text_file(dump_csv, csv_table({"re", "im", "member"}, rows));
  }
  Json cfg;
  cfg["model"] = m.spec_string();
  cfg["R"] = R;
  cfg["params"] = params_text;
  cfg["samples"] = static_cast<long long>(samples);
  cfg["seed"] = seed;
  cfg["method"] = method;
  Json rep = report_envelope("density", cfg);
  rep["density"] = to_json(d);
  emit(rep, out);
  return 0;
}

int run_circle(const std::string& model_spec, double r, double beta, long long theta_grid,
               double mu, const std::string& fourier_text, int workers,
               const std::string& out) {
  const auto m = FunctionModel::parse(model_spec);
  const auto cd = build_counting(m, 0.0, std::max(1.0, r / 64.0), 4.5 * r);
  const long long n_r = cd.n_at(r);
  const double meas =
      circle_lower_measure(m, r, beta, n_r, static_cast<int>(theta_grid), workers);
  Json cfg;
  cfg["model"] = m.spec_string();
  cfg["r"] = r;
  cfg["beta"] = beta;
  cfg["theta_grid"] = theta_grid;
  cfg["mu"] = mu;
  Json rep = report_envelope("circle", cfg);
  rep["n_r"] = n_r;
  rep["measure"] = meas;
  rep["bound_2k"] =
      2.0 * kPi * (1.0 - beta) * (1.0 - beta) / std::pow(beta + 3.0 * kPi * mu, 2.0);
  bool b2 = false, c2 = false;
  window_membership(cd, mu, r, &b2, &c2);
  rep["holds_upper_envelope"] = b2;
  rep["holds_lower_envelope"] = c2;
  if (!fourier_text.empty()) {
    const auto v = parse_list(fourier_text);
    if (v.size() != 3) throw CLI::ValidationError("--fourier expects mlo,mhi,q");
    const auto zeros = m.zeros_in_disk(0.0, r * std::pow(2.0, 20.0 / mu) * 1.01);
    rep["fourier"] = to_json(fourier_coefficients(zeros, r, static_cast<int>(v[0]),
                                                  static_cast<int>(v[1]),
                                                  static_cast<int>(v[2]), mu));
  }
  emit(rep, out);
  return 0;
}

int run_cover(const std::string& points_file, const std::string& fuzz_text, double H,
              int probes, std::uint64_t seed, const std::string& out) {
  std::vector<cplx> pts;
  if (!points_file.empty()) {
    std::ifstream f(points_file);
    if (!f) throw CLI::ValidationError("cannot read " + points_file);
    std::string line;
    std::getline(f, line);  // header
    double x, y;
    char comma;
    while (f >> x >> comma >> y) pts.emplace_back(x, y);
  } else {
    const auto v = parse_list(fuzz_text);
    if (v.size() < 1) throw CLI::ValidationError("--fuzz expects m[,spread]");
    const int m = static_cast<int>(v[0]);
    const double spread = v.size() > 1 ? v[1] : 1.0;
    CounterRng rng(seed, 0);
    for (int i = 0; i < m; ++i)
      pts.emplace_back(spread * rng.uniform(-1, 1), spread * rng.uniform(-1, 1));
  }
  const auto cover = exclusion_cover(pts, H, probes, seed + 1);
  Json cfg;
  cfg["H"] = H;
  cfg["m"] = static_cast<long long>(pts.size());
  cfg["probes"] = probes;
  cfg["seed"] = seed;
  Json rep = report_envelope("cover", cfg);
  rep["cover"] = to_json(cover);
  emit(rep, out);
  return 0;
}

int run_boxdim(const std::string& model_spec, const std::string& window_text, int kmin,
               int kmax, const std::string& predicate, double escape_radius, int max_iter,
               int dust_depth, int workers, const std::string& out) {
  const auto wv = parse_list(window_text);
  if (wv.size() != 3) throw CLI::ValidationError("--window expects x0,y0,side");
  const Window w{wv[0], wv[1], wv[2]};
  std::vector<double> scales;
  for (int k = kmin; k <= kmax; ++k) scales.push_back(std::pow(2.0, -k));

  std::function<bool(cplx)> member;
  std::optional<FunctionModel> model;
  if (predicate == "escape") {
    model = FunctionModel::parse(model_spec);
    member = [&, radius = escape_radius, iters = max_iter](cplx z) {
      return escape_test(*model, z, radius, iters).escaped_for_dimension();
    };
  } else if (predicate == "filled") {
    member = [](cplx) { return true; };
  } else if (predicate == "segment") {
    member = [](cplx z) { return std::abs(z.imag()) <= 1e-12; };
  } else if (predicate == "dust") {
    member = [dust_depth](cplx z) {
      auto in01 = [dust_depth](double x) {
        if (x < 0.0 || x > 1.0) return false;
        for (int i = 0; i < dust_depth; ++i) {
          x *= 3.0;
          int digit = static_cast<int>(std::floor(x));
          if (digit > 2) digit = 2;
          if (digit == 1) return false;
          x -= digit;
        }
        return true;
      };
      return in01(z.real()) && in01(z.imag());
    };
  } else {
    throw CLI::ValidationError("--predicate must be escape|filled|segment|dust");
  }
  const auto res = box_dimension(member, w, scales, workers);
  Json cfg;
  cfg["model"] = predicate == "escape" ? model->spec_string() : "";
  cfg["window"] = window_text;
  cfg["kmin"] = kmin;
  cfg["kmax"] = kmax;
  cfg["predicate"] = predicate;
  cfg["escape_radius"] = escape_radius;
  cfg["max_iter"] = max_iter;
  Json rep = report_envelope("boxdim", cfg);
  rep["boxdim"] = to_json(res);
  emit(rep, out);
  return 0;
}

int run_construct(const std::string& model_spec, double R0, int depth,
                  const std::string& params_text, std::uint64_t seed, long long budget,
                  int max_children, const std::string& report_kind,
                  const std::string& out) {
  const auto m = FunctionModel::parse(model_spec);
  const auto params = parse_params(params_text);
  BuildBudgets budgets;
  budgets.packing_budget = budget;
  budgets.max_children = max_children;
  const auto res = build_levels(m, R0, depth, params, budgets, seed);
  res.collection.validate();
  Json cfg;
  cfg["model"] = m.spec_string();
  cfg["R0"] = R0;
  cfg["depth"] = depth;
  cfg["params"] = params_text;
  cfg["seed"] = seed;
  cfg["budget"] = budget;
  cfg["max_children"] = max_children;
  Json rep = report_envelope("construct", cfg);
  rep["build"] = to_json(res);
  if (report_kind == "dim") {
    rep["mcmullen_estimate"] =
        std::isnan(res.mcmullen_estimate) ? Json(nullptr) : Json(res.mcmullen_estimate);
    rep["mcmullen_vacuous"] = res.mcmullen_vacuous;
  }
  emit(rep, out);
  return 0;
}

int run_verify(std::uint64_t seed, int workers, const std::string& out) {
  AcceptanceOptions opt;
  opt.seed = seed;
  opt.workers = workers;
  const auto results = run_acceptance(opt);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-45s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    all = all && r.pass;
  }
  std::fflush(stdout);
  if (!out.empty()) emit(acceptance_report(results, opt), out);
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimlab: numerical laboratory for dimension estimates of Julia and "
               "escaping sets of regularly growing entire functions"};
  app.require_subcommand(1);

  std::string model = "exp:lambda=1", out, csv_path;
  int workers = 0;

  // growth
  auto* growth = app.add_subcommand("growth", "max-modulus profile and regularity certificate");
  double g_rmin = 1.0, g_rmax = 600.0;
  int g_per_octave = 8;
  std::string g_check;
  growth->add_option("--model", model);
  growth->add_option("--rmin", g_rmin);
  growth->add_option("--rmax", g_rmax);
  growth->add_option("--per-octave", g_per_octave);
  growth->add_option("--check-regular", g_check, "A=..,B=..,C=..[,r0=..]");
  growth->add_option("--csv", csv_path);
  growth->add_option("--out", out);

  // values
  auto* values = app.add_subcommand("values", "counting functions and characteristic");
  std::string v_a = "0";
  double v_rmin = 1.0, v_rmax = 200.0;
  int v_per_octave = 8;
  std::string v_window;
  values->add_option("--model", model);
  values->add_option("--a", v_a);
  values->add_option("--rmin", v_rmin);
  values->add_option("--rmax", v_rmax);
  values->add_option("--per-octave", v_per_octave);
  values->add_option("--window", v_window, "mu,R,grid");
  values->add_option("--csv", csv_path);
  values->add_option("--out", out);

  // density
  auto* density = app.add_subcommand("density", "two-sided set density over an annulus");
  double d_R = 100.0, d_samples = 1e6;
  std::string d_params = "0.9,1.1,8,0", d_method = "mc";
  std::uint64_t d_seed = 42;
  std::string d_dump;
  int d_nr = 2000, d_ntheta = 2000;
  density->add_option("--model", model);
  density->add_option("--R", d_R);
  density->add_option("--params", d_params, "alpha1,alpha2,q,lambda");
  density->add_option("--samples", d_samples);
  density->add_option("--seed", d_seed);
  density->add_option("--method", d_method, "mc|grid");
  density->add_option("--grid-nr", d_nr);
  density->add_option("--grid-ntheta", d_ntheta);
  density->add_option("--workers", workers);
  density->add_option("--dump-csv", d_dump, "per-sample debug dump");
  density->add_option("--out", out);

  // circle
  auto* circle = app.add_subcommand("circle", "circle lower measure and fourier envelopes");
  double c_r = 50.5, c_beta = 0.5, c_mu = 2.0;
  long long c_grid = 1 << 20;
  std::string c_fourier;
  circle->add_option("--model", model);
  circle->add_option("--r", c_r);
  circle->add_option("--beta", c_beta);
  circle->add_option("--theta-grid", c_grid);
  circle->add_option("--mu", c_mu);
  circle->add_option("--fourier", c_fourier, "mlo,mhi,q");
  circle->add_option("--workers", workers);
  circle->add_option("--out", out);

  // cover
  auto* cover = app.add_subcommand("cover", "exclusion cover with probe verification");
  std::string cv_points, cv_fuzz = "100,1.0";
  double cv_H = 1.0;
  int cv_probes = 10000;
  std::uint64_t cv_seed = 1;
  cover->add_option("--points", cv_points, "CSV of x,y");
  cover->add_option("--fuzz", cv_fuzz, "m[,spread]");
  cover->add_option("--H", cv_H);
  cover->add_option("--probes", cv_probes);
  cover->add_option("--seed", cv_seed);
  cover->add_option("--out", out);

  // boxdim
  auto* boxdim = app.add_subcommand("boxdim", "box-counting dimension estimate");
  std::string b_window = "-4,-4,8", b_pred = "escape";
  int b_kmin = 4, b_kmax = 11, b_iters = 50, b_depth = 7;
  double b_radius = 1e10;
  boxdim->add_option("--model", model);
  boxdim->add_option("--window", b_window, "x0,y0,side");
  boxdim->add_option("--kmin", b_kmin);
  boxdim->add_option("--kmax", b_kmax);
  boxdim->add_option("--predicate", b_pred, "escape|filled|segment|dust");
  boxdim->add_option("--escape-radius", b_radius);
  boxdim->add_option("--max-iter", b_iters);
  boxdim->add_option("--dust-depth", b_depth);
  boxdim->add_option("--workers", workers);
  boxdim->add_option("--out", out);

  // construct
  auto* construct = app.add_subcommand("construct", "leveled nested construction");
  double k_R0 = 50.0;
  int k_depth = 1, k_children = 24;
  std::string k_params = "0.9,1.1,8,0", k_report;
  std::uint64_t k_seed = 42;
  long long k_budget = 20000;
  construct->add_option("--model", model);
  construct->add_option("--R0", k_R0);
  construct->add_option("--depth", k_depth);
  construct->add_option("--params", k_params);
  construct->add_option("--seed", k_seed);
  construct->add_option("--budget", k_budget);
  construct->add_option("--max-children", k_children);
  construct->add_option("--report", k_report, "dim");
  construct->add_option("--out", out);

  // verify
  auto* verify = app.add_subcommand("verify", "run the cross-module acceptance table");
  std::uint64_t y_seed = 42;
  verify->add_option("--seed", y_seed);
  verify->add_option("--workers", workers);
  verify->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (growth->parsed())
      return run_growth(model, g_rmin, g_rmax, g_per_octave, g_check, csv_path, out);
    if (values->parsed())
      return run_values(model, v_a, v_rmin, v_rmax, v_per_octave, v_window, csv_path, out);
    if (density->parsed())
      return run_density(model, d_R, d_params, d_samples, d_seed, d_method, d_nr,
                         d_ntheta, workers, d_dump, out);
    if (circle->parsed())
      return run_circle(model, c_r, c_beta, c_grid, c_mu, c_fourier, workers, out);
    if (cover->parsed()) return run_cover(cv_points, cv_fuzz, cv_H, cv_probes, cv_seed, out);
    if (boxdim->parsed())
      return run_boxdim(model, b_window, b_kmin, b_kmax, b_pred, b_radius, b_iters,
                        b_depth, workers, out);
    if (construct->parsed())
      return run_construct(model, k_R0, k_depth, k_params, k_seed, k_budget, k_children,
                           k_report, out);
    if (verify->parsed()) return run_verify(y_seed, workers, out);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "validation failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
