#include "qemit/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qemit/analytic.hpp"
#include "qemit/hom.hpp"
#include "qemit/oracle.hpp"
#include "qemit/units.hpp"

namespace qemit::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  return in;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace

void save_trace(const std::string& path, const CorrelationTrace& trace) {
  trace.validate();
  std::ostringstream os;
  os << "# qemit trace v1\n";
  os << (trace.sigma.empty() ? "# tau_ns\tg2\n" : "# tau_ns\tg2\tsigma\n");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << format_double(trace.tau[i]) << '\t' << format_double(trace.g2[i]);
    if (!trace.sigma.empty()) os << '\t' << format_double(trace.sigma[i]);
    os << '\n';
  }
  write_text(path, os.str());
}

CorrelationTrace load_trace(const std::string& path) {
  auto in = open_in(path);
  CorrelationTrace trace;
  std::string line;
  int lineno = 0;
  int n_cols = 0;  // set by the first data row
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double tau, g2;
    if (!(ls >> tau >> g2))
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed trace row");
    double sigma;
    const bool has_sigma = static_cast<bool>(ls >> sigma);
    if (n_cols == 0) n_cols = has_sigma ? 3 : 2;
    if (has_sigma != (n_cols == 3))
      throw DataError(path + ":" + std::to_string(lineno) + ": inconsistent sigma column");
    trace.tau.push_back(tau);
    trace.g2.push_back(g2);
    if (has_sigma) trace.sigma.push_back(sigma);
  }
  try {
    trace.validate();
  } catch (const std::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return trace;
}

CoincidenceHistogram load_histogram(const std::string& path) {
  auto in = open_in(path);
  CoincidenceHistogram hist;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double tau, counts;
    if (!(ls >> tau >> counts))
      throw DataError(path + ":" + std::to_string(lineno) + ": malformed histogram row");
    if (counts < 0.0)
      throw DataError(path + ":" + std::to_string(lineno) + ": negative count");
    hist.bin_centers.push_back(tau);
    hist.counts.push_back(counts);
  }
  if (hist.size() < 2) throw DataError(path + ": histogram needs at least 2 bins");
  hist.bin_width = hist.bin_centers[1] - hist.bin_centers[0];
  hist.label = fs::path(path).filename().string();
  try {
    hist.validate();
  } catch (const std::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return hist;
}

void save_histogram(const std::string& path, const CoincidenceHistogram& hist) {
  hist.validate();
  std::ostringstream os;
  os << "# qemit histogram v1\n# tau_ns\tcounts\n";
  for (std::size_t i = 0; i < hist.size(); ++i)
    os << format_double(hist.bin_centers[i]) << '\t' << format_double(hist.counts[i]) << '\n';
  write_text(path, os.str());
}

void save_mask(const std::string& path_prefix, const PhaseMask& mask) {
  const auto& g = mask.grid;
  // 8-bit PGM, linear phase-to-gray map over [-pi, pi).
  {
    auto out = open_out(path_prefix + ".pgm");
    out << "P5\n" << g.nx << " " << g.ny << "\n255\n";
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double u = (mask.phase(iy, ix) + M_PI) / (2.0 * M_PI);
        int gray = static_cast<int>(std::lround(u * 255.0));
        gray = std::max(0, std::min(255, gray));
        out.put(static_cast<char>(gray));
      }
  }
  {
    auto out = open_out(path_prefix + ".f64");
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double v = mask.phase(iy, ix);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
  }
  json sidecar;
  sidecar["format"] = "qemit phase mask v1";
  sidecar["nx"] = g.nx;
  sidecar["ny"] = g.ny;
  sidecar["pitch_um"] = g.pitch;
  sidecar["wavelength_um"] = g.wavelength;
  sidecar["f_eff_mm"] = g.f_eff;
  sidecar["carrier_rad_per_um"] = {mask.carrier_kx, mask.carrier_ky};
  sidecar["pgm"] = "gray = round((phase + pi) / (2 pi) * 255), row-major";
  sidecar["f64"] = "raw float64 little-endian, row-major, radians in [-pi, pi)";
  write_text(path_prefix + ".json", sidecar.dump(2) + "\n");
}

PhaseMask load_mask_raw(const std::string& path_prefix) {
  json sidecar;
  {
    auto in = open_in(path_prefix + ".json");
    try {
      in >> sidecar;
    } catch (const std::exception& e) {
      throw DataError(path_prefix + ".json: " + e.what());
    }
  }
  PhaseMask mask;
  mask.grid.nx = sidecar.at("nx").get<int>();
  mask.grid.ny = sidecar.at("ny").get<int>();
  mask.grid.pitch = sidecar.at("pitch_um").get<double>();
  mask.grid.wavelength = sidecar.at("wavelength_um").get<double>();
  mask.grid.f_eff = sidecar.at("f_eff_mm").get<double>();
  mask.carrier_kx = sidecar.at("carrier_rad_per_um")[0].get<double>();
  mask.carrier_ky = sidecar.at("carrier_rad_per_um")[1].get<double>();
  mask.phase.resize(mask.grid.ny, mask.grid.nx);
  auto in = open_in(path_prefix + ".f64");
  for (int iy = 0; iy < mask.grid.ny; ++iy)
    for (int ix = 0; ix < mask.grid.nx; ++ix) {
      double v;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof(double)))
        throw DataError(path_prefix + ".f64: truncated");
      mask.phase(iy, ix) = v;
    }
  return mask;
}

RunConfig load_config(const std::string& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.scenario = doc.at("scenario").get<std::string>();
    cfg.seed = doc.value("seed", 1ULL);
    cfg.output_dir = doc.value("output", std::string("."));
    cfg.params = doc.value("params", json::object());
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

namespace {

std::vector<double> tau_grid_from(const json& params, double def_lo, double def_hi,
                                  std::size_t def_n) {
  const json t = params.value("tau", json::object());
  const double lo = t.value("min", def_lo);
  const double hi = t.value("max", def_hi);
  const auto n = t.value("points", def_n);
  if (!(hi > lo) || n < 2) throw UsageError("tau grid: need max > min and points >= 2");
  return linspace(lo, hi, n);
}

std::vector<EmitterParams> emitters_from(const json& arr) {
  std::vector<EmitterParams> ems;
  for (const auto& e : arr) {
    EmitterParams em;
    em.omega = energy_to_detuning(e.value("energy_uev", 0.0));
    em.gamma = e.value("gamma", 1.0);
    em.gamma_p = e.value("gamma_p", 0.0);
    em.gamma_d = e.value("gamma_d", 0.0);
    ems.push_back(em);
  }
  if (ems.empty()) throw UsageError("emitters: empty list");
  // Rotating frame: only frequency differences are physical.
  double mean = 0.0;
  for (const auto& em : ems) mean += em.omega;
  mean /= static_cast<double>(ems.size());
  for (auto& em : ems) em.omega -= mean;
  return ems;
}

OpticalGrid grid_from(const json& params) {
  OpticalGrid g;
  const json j = params.value("grid", json::object());
  g.nx = j.value("nx", g.nx);
  g.ny = j.value("ny", g.ny);
  g.pitch = j.value("pitch_um", g.pitch);
  g.wavelength = j.value("wavelength_um", g.wavelength);
  g.f_eff = j.value("f_eff_mm", g.f_eff);
  g.validate();
  return g;
}

std::vector<SpotSpec> spots_from(const json& arr) {
  std::vector<SpotSpec> spots;
  for (const auto& s : arr) {
    SpotSpec spot;
    spot.x = s.at("x_um").get<double>();
    spot.y = s.at("y_um").get<double>();
    if (s.contains("weight")) {
      if (s["weight"].is_array())
        spot.weight = {s["weight"][0].get<double>(), s["weight"][1].get<double>()};
      else
        spot.weight = {s["weight"].get<double>(), 0.0};
    }
    spots.push_back(spot);
  }
  if (spots.empty()) throw UsageError("spots: empty list");
  return spots;
}

FitDataset dataset_from(const json& j, double gamma_tot, double irf_fwhm) {
  FitDataset ds;
  const std::string file = j.at("file").get<std::string>();
  const std::string format = j.value("format", std::string("trace"));
  if (format == "histogram") {
    const auto hist = load_histogram(file);
    const json win = j.at("baseline_window");
    ds.data = normalize_histogram(hist, win[0].get<double>(), win[1].get<double>());
  } else if (format == "trace") {
    ds.data = load_trace(file);
  } else {
    throw UsageError("dataset format must be 'trace' or 'histogram'");
  }
  ds.label = j.value("label", file);
  ds.n_emitters = j.value("n", 2);
  ds.gamma_tot = gamma_tot;
  ds.irf_fwhm = irf_fwhm;
  ds.fit_delta = j.value("fit_delta", false);
  ds.delta_init = energy_to_detuning(j.value("delta_uev", 0.0));
  ds.delta_lo = j.value("delta_lo", 0.0);
  ds.delta_hi = j.value("delta_hi", 60.0);
  return ds;
}

json fit_result_to_json(const FitResult& result, const std::vector<FitDataset>& datasets) {
  json out;
  out["converged"] = result.converged;
  out["chi2"] = result.chi2;
  out["reduced_chi2"] = result.reduced_chi2;
  out["n_points"] = result.n_points;
  out["n_free"] = result.n_free;
  out["evaluations"] = result.evaluations;
  out["errors_from_bootstrap"] = result.errors_from_bootstrap;
  if (!result.message.empty()) out["message"] = result.message;
  out["gamma_d"] = {{"value", result.gamma_d.value},
                    {"error", result.gamma_d.error},
                    {"at_bound", result.gamma_d.at_bound}};
  json dsj = json::array();
  for (std::size_t d = 0; d < result.per_dataset.size(); ++d) {
    json entry;
    entry["label"] = datasets[d].label;
    for (const auto& p : result.per_dataset[d]) {
      entry[p.name] = {{"value", p.value}, {"error", p.error}, {"at_bound", p.at_bound}};
      if (p.name == "delta")
        entry["delta_uev"] = {{"value", detuning_to_energy(p.value)},
                              {"error", detuning_to_energy(p.error)}};
    }
    dsj.push_back(entry);
  }
  out["datasets"] = dsj;
  return out;
}

struct Emitted {
  std::vector<std::string> files;
};

void scenario_simulate_g2(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  const int n = p.value("n", 2);
  const double gamma_tot = p.value("gamma_tot", 2.0);
  const double gamma_d = p.value("gamma_d", 0.0);
  const double irf = p.value("irf_fwhm_ps", 0.0) * 1e-3;
  std::vector<double> omegas;
  if (p.contains("deltas_uev"))
    for (const auto& d : p["deltas_uev"]) omegas.push_back(energy_to_detuning(d.get<double>()));
  const auto params = AnalyticG2Params::uniform(n, gamma_tot, gamma_d, omegas);
  const auto taus = tau_grid_from(p, -10.0, 10.0, 4001);
  CorrelationTrace trace = g2_analytic(params, taus, p.value("include_coherent", true));
  if (irf > 0.0) trace = convolve_irf(trace, irf);
  save_trace((dir / "trace.tsv").string(), trace);
  emitted.files.push_back("trace.tsv");
}

void scenario_oracle_g2(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  auto ems = emitters_from(p.at("emitters"));
  EnsembleConfig ens;
  if (!p.contains("weights") || p["weights"] == "equal-brightness") {
    ens = EnsembleConfig::equal_brightness(std::move(ems));
  } else {
    ens.emitters = std::move(ems);
    for (const auto& w : p["weights"])
      ens.weights.emplace_back(w[0].get<double>(), w[1].get<double>());
    ens.validate();
  }
  const auto taus = tau_grid_from(p, 0.0, 10.0, 501);
  CorrelationTrace trace = g2_oracle(ens, taus);
  const double irf = p.value("irf_fwhm_ps", 0.0) * 1e-3;
  if (irf > 0.0) trace = convolve_irf(trace, irf);
  save_trace((dir / "trace.tsv").string(), trace);
  emitted.files.push_back("trace.tsv");
}

void scenario_fit(const RunConfig& cfg, const fs::path& dir, Emitted& emitted,
                  bool single_dot) {
  const json& p = cfg.params;
  const double gamma_tot = p.value("gamma_tot", 2.0);
  const double irf = p.value("irf_fwhm_ps", 0.0) * 1e-3;
  std::vector<FitDataset> datasets;
  for (const auto& j : p.at("datasets")) datasets.push_back(dataset_from(j, gamma_tot, irf));

  JointFitOptions opts;
  opts.seed = static_cast<unsigned>(cfg.seed);
  opts.multistarts = p.value("multistarts", 16);
  if (single_dot) {
    for (auto& ds : datasets) {
      ds.n_emitters = 1;
      ds.fit_delta = false;
      ds.fit_gamma_tot = true;
    }
    opts.fit_gamma_d = false;
    opts.gamma_d_init = 0.0;
  } else if (p.contains("gamma_d")) {
    opts.gamma_d_init = p["gamma_d"].value("init", opts.gamma_d_init);
    opts.gamma_d_lo = p["gamma_d"].value("lo", opts.gamma_d_lo);
    opts.gamma_d_hi = p["gamma_d"].value("hi", opts.gamma_d_hi);
    opts.fit_gamma_d = p["gamma_d"].value("fit", true);
  }
  const FitResult result = joint_fit(datasets, opts);
  json report = fit_result_to_json(result, datasets);
  report["fixed"] = {{"gamma_tot", gamma_tot}, {"irf_fwhm_ns", irf}};
  write_text((dir / "fit_report.json").string(), report.dump(2) + "\n");
  emitted.files.push_back("fit_report.json");

  // Model curves for plotting.
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = datasets[d];
    double gamma_d = result.gamma_d.value;
    double delta = 0.0, gtot = ds.gamma_tot;
    for (const auto& par : result.per_dataset[d]) {
      if (par.name == "delta") delta = par.value;
      if (par.name == "gamma_tot") gtot = par.value;
    }
    double a = 1.0, c = 0.0;
    for (const auto& par : result.per_dataset[d]) {
      if (par.name == "amplitude") a = par.value;
      if (par.name == "offset") c = par.value;
    }
    std::vector<double> omegas;
    if (ds.n_emitters == 2) omegas = {-0.5 * delta, 0.5 * delta};
    const auto mp = AnalyticG2Params::uniform(ds.n_emitters, gtot, gamma_d, omegas);
    CorrelationTrace model = g2_analytic(mp, ds.data.tau);
    if (ds.irf_fwhm > 0.0) model = convolve_irf(model, ds.irf_fwhm);
    for (auto& v : model.g2) v = a * v + c;
    const std::string name = "model_" + std::to_string(d) + ".tsv";
    save_trace((dir / name).string(), model);
    emitted.files.push_back(name);
  }
}

void scenario_hologram(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  const OpticalGrid grid = grid_from(p);
  auto spots = spots_from(p.at("spots"));
  const json carrier = p.value("carrier_rad_per_um", json::array({0.0, 0.0}));

  json report;
  PhaseMask mask;
  if (p.value("balance", true) && spots.size() > 1) {
    BalanceResult bal = balance_spot_weights(spots, grid, p.value("balance_tol", 0.01));
    mask = std::move(bal.mask);
    report["balance"] = {{"iterations", bal.iterations},
                         {"converged", bal.converged},
                         {"max_relative_error", bal.powers.max_relative_error},
                         {"fractions", bal.powers.fraction}};
    spots = bal.spots;
  } else {
    mask = multiplex_hologram(spots, grid, carrier[0].get<double>(), carrier[1].get<double>());
    report["powers"] = measure_spot_powers(spots, mask).fraction;
  }
  if (carrier[0].get<double>() != 0.0 || carrier[1].get<double>() != 0.0) {
    mask = multiplex_hologram(spots, grid, carrier[0].get<double>(), carrier[1].get<double>());
  }

  // Coupling of each routed spot into a matched fiber mode.
  const double waist = p.value("waist_um", 1.0);
  ComplexField uniform;
  uniform.grid = grid;
  uniform.plane = Plane::slm;
  uniform.amp = Eigen::ArrayXXcd::Constant(
      grid.ny, grid.nx, 1.0 / (std::sqrt(static_cast<double>(grid.nx) * grid.ny) * grid.pitch));
  const ComplexField far = propagate_lens(apply_mask(uniform, mask));
  json couplings = json::array();
  for (const auto& s : spots)
    couplings.push_back(coupling_efficiency(far, gaussian_mode(s.x, s.y, waist, grid)));
  report["couplings"] = couplings;

  save_mask((dir / "mask").string(), mask);
  write_text((dir / "hologram_report.json").string(), report.dump(2) + "\n");
  emitted.files.insert(emitted.files.end(),
                       {"mask.pgm", "mask.f64", "mask.json", "hologram_report.json"});
}

void scenario_wavefront_match(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  const OpticalGrid grid = grid_from(p);
  const auto qd_spots = spots_from(p.at("qd_spots"));
  const auto fiber_spots = spots_from(p.at("fiber_spots"));
  if (qd_spots.size() != 2 || fiber_spots.size() != 2)
    throw UsageError("wavefront-match: exactly two qd_spots and two fiber_spots");
  const double waist = p.value("waist_um", 1.0);

  const ComplexField f1 = plane_wave_mode(qd_spots[0], grid);
  const ComplexField f2 = plane_wave_mode(qd_spots[1], grid);
  auto superpose = [&](double sign) {
    ComplexField f = f1;
    f.amp = (f1.amp + sign * f2.amp);
    f.amp /= std::sqrt(f.power());
    return f;
  };
  const std::vector<ComplexField> inputs{superpose(1.0), superpose(-1.0)};
  const ComplexField g1m = gaussian_mode(fiber_spots[0].x, fiber_spots[0].y, waist, grid);
  const ComplexField g2m = gaussian_mode(fiber_spots[1].x, fiber_spots[1].y, waist, grid);
  const std::vector<ComplexField> targets{backpropagate_lens(g1m), backpropagate_lens(g2m)};

  WavefrontMatchResult wm =
      wavefront_match(inputs, targets, p.value("iterations", 60), p.value("tol", 1e-6));
  const TransferMatrix tm = realized_transfer_matrix(wm.mask, {f1, f2}, {g1m, g2m});

  json report;
  report["couplings"] = wm.couplings;
  report["iterations"] = wm.iterations;
  report["stalled"] = wm.stalled;
  json mj = json::array();
  for (int i = 0; i < 2; ++i) {
    json row = json::array();
    for (int j = 0; j < 2; ++j)
      row.push_back({tm.m(i, j).real(), tm.m(i, j).imag()});
    mj.push_back(row);
  }
  report["transfer_matrix"] = mj;
  report["mean_transmission"] = tm.mean_transmission;
  report["unitarity_deviation"] = tm.unitarity_deviation;
  json split = json::array();
  for (int j = 0; j < 2; ++j) {
    const double tot = std::norm(tm.m(0, j)) + std::norm(tm.m(1, j));
    split.push_back(std::norm(tm.m(0, j)) / tot);
  }
  report["splitting_port1_fraction"] = split;

  save_mask((dir / "mask").string(), wm.mask);
  write_text((dir / "wavefront_report.json").string(), report.dump(2) + "\n");
  emitted.files.insert(emitted.files.end(),
                       {"mask.pgm", "mask.f64", "mask.json", "wavefront_report.json"});
}

void scenario_hom(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  HomPairParams pair;
  pair.emitter_a.gamma = p.value("gamma_a", 1.0);
  pair.emitter_b.gamma = p.value("gamma_b", pair.emitter_a.gamma);
  pair.emitter_a.gamma_d = p.value("gamma_d_a", 0.0);
  pair.emitter_b.gamma_d = p.value("gamma_d_b", pair.emitter_a.gamma_d);
  pair.detuning = energy_to_detuning(p.value("detuning_uev", 0.0));
  pair.rep_period = p.value("rep_period_ns", 12.5);
  if (p.contains("transfer")) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        pair.transfer(i, j) = {p["transfer"][i][j][0].get<double>(),
                               p["transfer"][i][j][1].get<double>()};
  }
  const auto taus = tau_grid_from(p, -5.0, 5.0, 1001);
  const HomResult result = hom_run(pair, taus);
  save_trace((dir / "hom_density.tsv").string(), result.density);

  json report;
  report["g2_zero"] = result.g2_zero;
  report["g2_zero_distinguishable"] = hom_g2_zero_distinguishable(pair);
  report["visibility"] = result.visibility;
  report["transfer_unitarity_deviation"] = pair.unitarity_deviation();
  if (pair.unitarity_deviation() > 0.05)
    report["warning"] = "transfer matrix unitarity deviation exceeds 0.05";
  write_text((dir / "hom_report.json").string(), report.dump(2) + "\n");
  emitted.files.insert(emitted.files.end(), {"hom_density.tsv", "hom_report.json"});
}

void scenario_emit_plotdata(const RunConfig& cfg, const fs::path& dir, Emitted& emitted) {
  const json& p = cfg.params;
  for (const auto& panel : p.at("panels")) {
    const std::string out_name = panel.at("out").get<std::string>();
    emit_plotdata(panel.at("data").get<std::string>(),
                  panel.value("model", std::string()), (dir / out_name).string());
    emitted.files.push_back(out_name);
  }
}

}  // namespace

void emit_plotdata(const std::string& data_path, const std::string& model_path,
                   const std::string& out_path) {
  const CorrelationTrace data = load_trace(data_path);
  std::ostringstream os;
  if (model_path.empty()) {
    os << "# tau_ns\tdata\n";
    for (std::size_t i = 0; i < data.size(); ++i)
      os << format_double(data.tau[i]) << '\t' << format_double(data.g2[i]) << '\n';
  } else {
    const CorrelationTrace model = load_trace(model_path);
    if (model.size() != data.size())
      throw DataError("emit_plotdata: data/model grid mismatch");
    for (std::size_t i = 0; i < data.size(); ++i)
      if (std::abs(model.tau[i] - data.tau[i]) > 1e-9)
        throw DataError("emit_plotdata: data/model grid mismatch");
    os << "# tau_ns\tdata\tmodel\tresidual\n";
    for (std::size_t i = 0; i < data.size(); ++i)
      os << format_double(data.tau[i]) << '\t' << format_double(data.g2[i]) << '\t'
         << format_double(model.g2[i]) << '\t' << format_double(data.g2[i] - model.g2[i])
         << '\n';
  }
  write_text(out_path, os.str());
}

void run_scenario(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  Emitted emitted;

  if (cfg.scenario == "simulate-g2") {
    scenario_simulate_g2(cfg, dir, emitted);
  } else if (cfg.scenario == "oracle-g2") {
    scenario_oracle_g2(cfg, dir, emitted);
  } else if (cfg.scenario == "fit") {
    scenario_fit(cfg, dir, emitted, false);
  } else if (cfg.scenario == "single-dot-fit") {
    scenario_fit(cfg, dir, emitted, true);
  } else if (cfg.scenario == "hologram") {
    scenario_hologram(cfg, dir, emitted);
  } else if (cfg.scenario == "wavefront-match") {
    scenario_wavefront_match(cfg, dir, emitted);
  } else if (cfg.scenario == "hom") {
    scenario_hom(cfg, dir, emitted);
  } else if (cfg.scenario == "emit-plotdata") {
    scenario_emit_plotdata(cfg, dir, emitted);
  } else {
    throw UsageError("unknown scenario: " + cfg.scenario);
  }

  const auto t1 = std::chrono::steady_clock::now();
  json bundle;
  bundle["tool"] = "qemit";
  bundle["version"] = "0.1.0";
  bundle["scenario"] = cfg.scenario;
  bundle["seed"] = cfg.seed;
  bundle["config"] = cfg.params;
  bundle["outputs"] = emitted.files;
  bundle["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  write_text((dir / "bundle.json").string(), bundle.dump(2) + "\n");
}

}  // namespace qemit::io
