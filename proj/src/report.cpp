#include "dimlab/report.hpp"

#include <cstdio>
#include <fstream>

namespace dimlab {

Json report_envelope(const std::string& command, const Json& config) {
  Json j;
  j["artifact"] = "dimlab";
  j["version"] = kArtifactVersion;
  j["command"] = command;
  j["config"] = config;
  return j;
}

Json to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

Json to_json(const DensityEstimate& d) {
  Json j;
  j["value"] = d.value;
  j["stderr"] = d.stderr_;
  j["samples"] = d.samples;
  j["R"] = d.R;
  j["method"] = d.method;
  j["seed"] = d.seed;
  return j;
}

Json to_json(const RegularityCertificate& c) {
  Json j;
  j["A"] = c.A;
  j["B"] = c.B;
  j["C"] = c.C;
  j["r0"] = c.r0;
  j["doubling_L"] = c.doubling_L;
  j["verified_range"] = Json::array({c.r_lo, c.r_hi});
  j["violations"] = c.violations;
  j["slack_rel"] = c.slack_rel;
  j["rho_hat"] = c.rho_hat;
  j["lambda_hat"] = c.lambda_hat;
  j["order_bounds_ok"] = c.order_bounds_ok;
  return j;
}

Json to_json(const GrowthProfile& p) {
  Json j;
  j["r_grid"] = p.r_grid;
  j["logM"] = p.logM;
  j["rho_hat"] = p.rho_hat;
  j["lambda_hat"] = p.lambda_hat;
  return j;
}

Json to_json(const CountingData& cd) {
  Json j;
  j["a"] = to_json(cd.a);
  j["r_lo"] = cd.r_lo;
  j["r_hi"] = cd.r_hi;
  j["per_octave"] = cd.per_octave;
  Json rows = Json::array();
  for (const auto& s : cd.samples)
    rows.push_back(Json::array({s.r, s.n, s.N}));
  j["samples"] = rows;
  j["K_hat"] = cd.K_hat;
  j["A_N_hat"] = cd.A_N_hat;
  j["B_N_hat"] = cd.B_N_hat;
  j["chain_ok"] = cd.chain_ok;
  j["chain_constant"] = cd.chain_constant;
  return j;
}

Json to_json(const RegularZeroWindow& w) {
  Json j;
  j["mu"] = w.mu;
  j["R"] = w.R;
  j["grid"] = w.grid;
  j["scan_per_octave"] = w.scan_per_octave;
  j["holds_2b"] = w.holds_2b;
  j["holds_2c"] = w.holds_2c;
  j["fraction_2b"] = w.fraction_2b;
  j["fraction_2c"] = w.fraction_2c;
  j["measured_fraction"] = w.measured_fraction;
  j["tail_certified"] = w.tail_certified;
  return j;
}

Json to_json(const FourierReport& f) {
  Json j;
  j["r"] = f.r;
  j["q"] = f.q;
  j["mu"] = f.mu;
  j["n_r"] = f.n_r;
  j["tail_cut"] = f.tail_cut;
  Json rows = Json::array();
  for (const auto& c : f.coeffs) {
    Json row;
    row["m"] = c.m;
    row["b"] = to_json(c.b);
    row["abs"] = std::abs(c.b);
    if (std::isfinite(c.bound)) row["bound"] = c.bound;
    row["within"] = c.within;
    rows.push_back(row);
  }
  j["coefficients"] = rows;
  j["all_within"] = f.all_within;
  return j;
}

Json to_json(const ExclusionCover& c) {
  Json j;
  j["H"] = c.H;
  j["m"] = c.m;
  j["sum_radii_sq"] = c.sum_radii_sq();
  Json disks = Json::array();
  for (std::size_t k = 0; k < c.centers.size(); ++k)
    disks.push_back(Json::array({c.centers[k].real(), c.centers[k].imag(), c.radii[k]}));
  j["disks"] = disks;
  return j;
}

Json to_json(const TwoSidedDensityReport& t) {
  Json j;
  j["R"] = t.R;
  j["d"] = t.d;
  j["gamma"] = t.gamma;
  j["tau"] = t.tau;
  j["sigma"] = t.sigma;
  j["targets_in_disk"] = t.targets_in_disk;
  j["U_tau_plain"] = to_json(t.U_tau_plain);
  Json targets = Json::array();
  for (const auto& tr : t.targets) {
    Json row;
    row["a"] = to_json(tr.a);
    row["V_gamma"] = to_json(tr.V_gamma);
    row["U_tau_shift"] = to_json(tr.U_tau_shift);
    row["C_small"] = to_json(tr.C_small);
    row["W"] = to_json(tr.W);
    row["two_sided_ok"] = tr.two_sided_ok;
    row["w_violations"] = tr.w_violations;
    row["n_growth_ratio"] = tr.n_growth_ratio;
    targets.push_back(row);
  }
  j["targets"] = targets;
  return j;
}

Json to_json(const BoxDimResult& b) {
  Json j;
  j["estimate"] = b.estimate;
  j["scales"] = b.scales;
  j["counts"] = b.counts;
  j["residual"] = b.residual;
  return j;
}

Json to_json(const Region& r) {
  Json j;
  if (const auto* iv = std::get_if<IntervalRegion>(&r)) {
    j["type"] = "interval";
    j["lo"] = iv->lo;
    j["hi"] = iv->hi;
  } else if (const auto* d = std::get_if<DiskRegion>(&r)) {
    j["type"] = "disk";
    j["center"] = to_json(d->center);
    j["radius"] = d->radius;
  } else {
    const auto& p = std::get<PolygonRegion>(r);
    j["type"] = "polygon";
    Json vs = Json::array();
    for (const auto& v : p.vertices) vs.push_back(to_json(v));
    j["vertices"] = vs;
  }
  return j;
}

Json to_json(const NestedCollection& c) {
  Json j;
  j["ambient_dim"] = c.ambient_dim;
  Json levels = Json::array();
  for (const auto& lv : c.levels) {
    Json l;
    l["Delta"] = lv.Delta;
    l["d"] = lv.d;
    Json cells = Json::array();
    for (const auto& cell : lv.cells) {
      Json cj;
      cj["id"] = cell.id;
      cj["parent"] = cell.parent;
      cj["region"] = to_json(cell.region);
      cj["diameter"] = cell.diameter;
      cells.push_back(cj);
    }
    l["cells"] = cells;
    levels.push_back(l);
  }
  j["levels"] = levels;
  return j;
}

Json to_json(const IslandGeometry& i) {
  Json j;
  j["a"] = to_json(i.a);
  j["t"] = i.t;
  j["nu"] = i.nu;
  j["area_V"] = i.area_V;
  j["beta_hat"] = i.beta_hat;
  j["gamma_hat"] = i.gamma_hat;
  j["max_bijectivity_residual"] = i.max_bijectivity_residual;
  j["koebe_ratio"] = i.koebe_ratio;
  j["zero_free_disk"] = i.zero_free_disk;
  Json ub = Json::array(), vb = Json::array();
  for (const auto& d : i.U_boundary) ub.push_back(to_json(d));
  for (const auto& d : i.V_boundary) vb.push_back(to_json(d));
  j["U_boundary_offsets"] = ub;
  j["V_boundary_offsets"] = vb;
  return j;
}

Json to_json(const BuildResult& b) {
  Json j;
  j["q"] = b.q;
  Json levels = Json::array();
  for (const auto& lr : b.levels) {
    Json l;
    l["level"] = lr.level;
    l["cells"] = lr.cells;
    l["log_R"] = lr.log_R;
    l["Delta"] = lr.Delta;
    l["max_diameter"] = lr.max_diameter;
    l["koebe_ratio_max"] = lr.koebe_ratio_max;
    l["forward_residual_max"] = lr.forward_residual_max;
    l["radius_growth_ok"] = lr.radius_growth_ok;
    levels.push_back(l);
  }
  j["levels"] = levels;
  if (std::isnan(b.mcmullen_estimate))
    j["mcmullen_estimate"] = nullptr;
  else
    j["mcmullen_estimate"] = b.mcmullen_estimate;
  j["mcmullen_vacuous"] = b.mcmullen_vacuous;
  j["collection"] = to_json(b.collection);
  return j;
}

NestedCollection collection_from_json(const Json& j) {
  NestedCollection c;
  c.ambient_dim = j.at("ambient_dim").get<int>();
  for (const auto& l : j.at("levels")) {
    LevelInfo lv;
    lv.Delta = l.at("Delta").get<double>();
    lv.d = l.at("d").get<double>();
    for (const auto& cj : l.at("cells")) {
      Cell cell;
      cell.id = cj.at("id").get<long long>();
      cell.parent = cj.at("parent").get<long long>();
      cell.diameter = cj.at("diameter").get<double>();
      const auto& rj = cj.at("region");
      const std::string type = rj.at("type").get<std::string>();
      if (type == "interval") {
        cell.region = IntervalRegion{rj.at("lo").get<double>(), rj.at("hi").get<double>()};
      } else if (type == "disk") {
        cell.region = DiskRegion{cplx(rj.at("center")[0].get<double>(),
                                      rj.at("center")[1].get<double>()),
                                 rj.at("radius").get<double>()};
      } else if (type == "polygon") {
        PolygonRegion p;
        for (const auto& v : rj.at("vertices"))
          p.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
        cell.region = p;
      } else {
        throw ParseError("unknown region type: " + type);
      }
      lv.cells.push_back(std::move(cell));
    }
    c.levels.push_back(std::move(lv));
  }
  return c;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << content;
}

}  // namespace dimlab
