#include "cqtom/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "cqtom/calibration.hpp"
#include "cqtom/io.hpp"
#include "cqtom/tomography.hpp"

namespace cqtom::cli {

namespace {

using nlohmann::json;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void warn_condition23(const ExperimentConfig& cfg) {
  const double prod = cfg.beta_max * cfg.lambda_tau;
  if (prod >= 0.3)
    std::cerr << "warning: beta_max * lambda_tau = " << prod
              << " violates the small-interaction condition (< 0.3)\n";
}

calib::CalibrationInput calibration_input(const ExperimentConfig& cfg) {
  calib::CalibrationInput in;
  in.lambda_tau = cfg.lambda_tau;
  in.beta_max = cfg.beta_max;
  in.Phi = cfg.Phi;
  in.phi = cfg.phases.at(0);
  in.n = cfg.n;
  in.N = cfg.N;
  in.alpha = cfg.alpha;
  in.gamma_mode = gamma_mode_of(cfg.gamma_mode);
  return in;
}

void write_calibration_json(const std::string& path,
                            const calib::CalibrationResult& r,
                            const ExperimentConfig& cfg, double phi) {
  json j;
  j["mu"] = format_real(r.mu);
  j["nu"] = format_real(r.nu);
  j["p_bar"] = format_real(r.p_bar);
  j["sigma"] = format_real(r.sigma);
  j["sigma_s"] = format_real(r.sigma_s);
  j["ks_statistic"] = format_real(r.ks_statistic);
  j["ks_bound"] = format_real(r.ks_bound);
  j["accepted"] = r.accepted;
  j["n"] = cfg.n;
  j["N"] = cfg.N;
  j["lambda_tau"] = format_real(cfg.lambda_tau);
  j["beta_max"] = format_real(cfg.beta_max);
  j["Phi"] = format_real(cfg.Phi);
  j["phi"] = format_real(phi);
  j["alpha"] = format_real(cfg.alpha);
  j["gamma_mode"] = cfg.gamma_mode;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

struct CalibrationRef {
  double mu, nu, sigma, sigma_s;
  int n;
};

CalibrationRef load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration file: " + path);
  json j = json::parse(in);
  auto real = [&j](const char* k) {
    return std::stod(j.at(k).get<std::string>());
  };
  return {real("mu"), real("nu"), real("sigma"), real("sigma_s"),
          j.at("n").get<int>()};
}

// analytic quadrature density of a configured state (mixture-weighted)
double state_pdf(const StateSpec& spec, double phi, double chi) {
  double v = 0.0;
  for (const auto& c : spec.components) {
    if (c.kind == StateComponent::kCoherent)
      v += c.weight * tomo::coherent_quadrature_pdf(chi, c.beta_abs, c.Phi, phi);
    else
      v += c.weight * tomo::fock_quadrature_pdf(c.k, chi);
  }
  return v;
}

}  // namespace

int cmd_first_click(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  warn_condition23(cfg);
  const int dim = cfg.dim ? *cfg.dim : fock::default_dim(cfg.beta_max);
  RunManifest manifest("first-click", cfg);
  const std::string csv_path = out_path(cfg, "first_click.csv");
  CsvWriter csv(csv_path,
                {"beta_abs", "Phi_minus_phi", "p1_closed_form", "p1_matrix"});
  const double step = 0.05;
  for (double phi : cfg.phases) {
    const meas::InteractionParams params{cfg.lambda_tau, phi, cfg.Phi, dim};
    const auto kp = meas::build_kraus(params);
    for (double b = 0.0; b <= cfg.beta_max + 1e-12; b += step) {
      const fock::Complex beta =
          b * fock::Complex{std::cos(cfg.Phi), std::sin(cfg.Phi)};
      const double closed = meas::first_click_probability(
          beta, params, meas::GammaMode::kSeries);
      const auto rho = fock::density_from_pure(fock::coherent_state(beta, dim));
      const double matrix = meas::detection_probabilities(rho, kp).second;
      csv.row({b, cfg.Phi - phi, closed, matrix});
    }
  }
  manifest.add_output(csv_path);
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "first_click_manifest.json"));
  return 0;
}

int cmd_trajectories(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  warn_condition23(cfg);
  const int dim = resolve_dim(cfg);
  const double phi = cfg.phases.at(0);
  const meas::BandedKraus bk({cfg.lambda_tau, phi, cfg.Phi, dim});
  const auto state = build_state(cfg.state, dim);
  RunManifest manifest("trajectories", cfg);
  const std::string csv_path = out_path(cfg, "trajectories.csv");
  CsvWriter csv(csv_path, {"trajectory_id", "k", "p1"});
  const auto table =
      traj::probability_track(state, bk, cfg.n, cfg.master_seed,
                              cfg.track_count);
  for (const auto& pt : table)
    csv.row({double(pt.trajectory), double(pt.step), pt.p1});
  if (cfg.mu) {
    // reference line: the average click probability for the given mu
    const double gamma = meas::gamma_factor(gamma_mode_of(cfg.gamma_mode),
                                            cfg.beta_max, cfg.lambda_tau);
    const double pbar = calib::p_bar(cfg.beta_max, cfg.Phi, phi,
                                     cfg.lambda_tau, *cfg.mu, gamma);
    for (int k = 1; k <= cfg.n; ++k) csv.row({-1.0, double(k), pbar});
    manifest.resolved("p_bar", pbar);
  }
  manifest.add_output(csv_path);
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "trajectories_manifest.json"));
  return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  warn_condition23(cfg);
  const int dim = cfg.dim ? *cfg.dim : fock::default_dim(cfg.beta_max);
  const double phi = cfg.phases.at(0);
  // the calibration reference is always the coherent state at beta_max
  const fock::Complex beta =
      cfg.beta_max * fock::Complex{std::cos(cfg.Phi), std::sin(cfg.Phi)};
  const auto state =
      traj::InitialState::pure(fock::coherent_state(beta, dim));
  const meas::BandedKraus bk({cfg.lambda_tau, phi, cfg.Phi, dim});
  traj::RunConfig rc{cfg.n, cfg.N, cfg.master_seed, false, cfg.threads};
  const auto ens = traj::run_ensemble(state, bk, rc);
  const double t_sim = elapsed_ms(t0);

  const auto r = calib::fit_mu(ens.clicks, calibration_input(cfg));

  RunManifest manifest("calibrate", cfg);
  const std::string json_path = out_path(cfg, "calibration.json");
  write_calibration_json(json_path, r, cfg, phi);

  const std::string csv_path = out_path(cfg, "calibration_cdf.csv");
  CsvWriter csv(csv_path, {"x", "sample_cdf", "theory_cdf", "ks_bound"});
  const auto pmf = calib::binomial_pmf(cfg.n, r.p_bar);
  std::vector<int> counts(cfg.n + 1, 0);
  for (int m : ens.clicks) counts[m]++;
  double femp = 0.0, ftheo = 0.0;
  for (int x = 0; x <= cfg.n; ++x) {
    femp += double(counts[x]) / cfg.N;
    ftheo += pmf[x];
    csv.row({double(x), femp, ftheo, r.ks_bound});
  }
  manifest.add_output(json_path);
  manifest.add_output(csv_path);
  manifest.resolved("mu", r.mu);
  manifest.resolved("nu", r.nu);
  manifest.resolved("sigma", r.sigma);
  manifest.resolved("sigma_s", r.sigma_s);
  manifest.resolved("ks_statistic", r.ks_statistic);
  manifest.resolved_text("accepted", r.accepted ? "true" : "false");
  manifest.timing_ms("simulation", t_sim);
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "calibrate_manifest.json"));
  if (!r.accepted) {
    std::cerr << "NoAcceptableMu: best mu = " << r.mu
              << " has KS statistic " << r.ks_statistic
              << " above the Kolmogorov bound " << r.ks_bound << "\n";
    return 2;
  }
  return 0;
}

int cmd_tomogram(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.calibration_path.empty())
    throw ConfigError("tomogram requires --calibration pointing at a "
                      "calibration.json");
  const auto cal = load_calibration(cfg.calibration_path);
  const double sigma_s = calib::sigma_s_of(cal.sigma);  // guards sigma <= 1/2
  const int dim = resolve_dim(cfg);
  const auto state = build_state(cfg.state, dim);
  RunManifest manifest("tomogram", cfg);

  // widen the default grid so every component's blurred density fits
  double need = 6.0;
  for (const auto& c : cfg.state.components)
    if (c.kind == StateComponent::kCoherent)
      need = std::max(need, std::numbers::sqrt2 * c.beta_abs + 6.0);
  const double lo = std::min(cfg.grid_lo, -need);
  const double hi = std::max(cfg.grid_hi, need);
  const tomo::Grid grid = tomo::Grid::over(lo, hi, cfg.grid_h);

  const double bound = calib::kolmogorov_bound(cfg.alpha, cfg.N);
  bool all_ok = true;
  for (std::size_t pi = 0; pi < cfg.phases.size(); ++pi) {
    const double phi = cfg.phases[pi];
    const meas::BandedKraus bk({cfg.lambda_tau, phi, cfg.Phi, dim});
    traj::RunConfig rc{cal.n, cfg.N, cfg.master_seed, false, cfg.threads};
    const auto ens = traj::run_ensemble(state, bk, rc);
    const auto tg =
        tomo::tomogram_from_ensemble(ens.clicks, cal.n, cal.nu, phi);
    const std::string tag = "_p" + std::to_string(pi);

    const std::string chi_path = out_path(cfg, "chi" + tag + ".csv");
    CsvWriter chi_csv(chi_path, {"trajectory", "m", "chi"});
    for (std::size_t i = 0; i < tg.chi.size(); ++i)
      chi_csv.row({double(i), double(ens.clicks[i]), tg.chi[i]});

    auto pdf = tomo::tabulate(grid, [&](double x) {
      return state_pdf(cfg.state, phi, x);
    });
    const auto conv = tomo::convolve(pdf, sigma_s);
    const auto conv_cdf = tomo::cdf_on_grid(conv);

    const std::string theory_path = out_path(cfg, "theory_cdf" + tag + ".csv");
    CsvWriter theory_csv(theory_path, {"chi", "conv_pdf", "conv_cdf"});
    for (int i = 0; i < grid.size; ++i)
      theory_csv.row({grid.x(i), conv.values[i], conv_cdf[i]});

    std::vector<double> sorted = tg.chi;
    std::sort(sorted.begin(), sorted.end());
    const std::string ecdf_path = out_path(cfg, "ecdf" + tag + ".csv");
    CsvWriter ecdf_csv(ecdf_path, {"chi", "sample_cdf"});
    for (std::size_t i = 0; i < sorted.size(); ++i)
      ecdf_csv.row({sorted[i], double(i + 1) / sorted.size()});

    const double ks = tomo::ks_vs_continuous_cdf(
        ens.clicks, cal.n, cal.nu,
        [&](double x) { return tomo::interp_cdf(grid, conv_cdf, x); });
    all_ok = all_ok && ks < bound;

    const auto hist = tomo::histogram_density(tg.chi, grid);
    tomo::DeconvDiagnostics diag;
    const auto dec = tomo::deconvolve(hist, sigma_s, cfg.epsilon, &diag);
    const std::string dec_path = out_path(cfg, "deconvolved" + tag + ".csv");
    CsvWriter dec_csv(dec_path, {"chi", "density"});
    for (int i = 0; i < grid.size; ++i) dec_csv.row({grid.x(i), dec.values[i]});

    manifest.add_output(chi_path);
    manifest.add_output(theory_path);
    manifest.add_output(ecdf_path);
    manifest.add_output(dec_path);
    manifest.resolved("ks_phase_" + std::to_string(pi), ks);
  }
  manifest.resolved("nu", cal.nu);
  manifest.resolved("sigma_s", sigma_s);
  manifest.resolved("mu", cal.mu);
  manifest.resolved("ks_bound", bound);
  manifest.resolved_text("within_band", all_ok ? "true" : "false");
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "tomogram_manifest.json"));
  return all_ok ? 0 : 2;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  warn_condition23(cfg);
  const auto rows = calib::sigma_s_vs_n_sweep(
      calibration_input(cfg), cfg.sweep_n, cfg.master_seed,
      cfg.dim ? *cfg.dim : 0, cfg.threads);
  RunManifest manifest("sweep", cfg);
  const std::string csv_path = out_path(cfg, "sigma_s_sweep.csv");
  CsvWriter csv(csv_path,
                {"n", "mu", "sigma", "sigma_s", "instrument_ok", "accepted"});
  for (const auto& r : rows)
    csv.row({double(r.n), r.mu, r.sigma, r.sigma_s,
             r.instrument_ok ? 1.0 : 0.0, r.accepted ? 1.0 : 0.0});
  manifest.add_output(csv_path);
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "sweep_manifest.json"));
  return 0;
}

int cmd_oracle_check(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.n > cfg.enumeration_cap)
    throw SizeError("oracle-check: n exceeds the enumeration cap");
  const int dim = resolve_dim(cfg);
  const double phi = cfg.phases.at(0);
  const meas::InteractionParams params{cfg.lambda_tau, phi, cfg.Phi, dim};
  const auto kp = meas::build_kraus(params);
  const auto state = build_state(cfg.state, dim);
  const auto rho0 = state.density();

  const auto pmf =
      meas::enumerate_integrated_probability(rho0, kp, cfg.n,
                                             cfg.enumeration_cap);
  double pmf_sum = 0.0;
  for (double p : pmf) pmf_sum += p;

  const meas::BandedKraus bk(params);
  traj::RunConfig rc{cfg.n, cfg.N, cfg.master_seed, false, cfg.threads};
  const auto ens = traj::run_ensemble(state, bk, rc);
  std::vector<double> mc(cfg.n + 1, 0.0);
  for (int m : ens.clicks) mc[m] += 1.0 / cfg.N;

  // binomial reference from the initial state's first-click probability
  const double p1 = meas::detection_probabilities(rho0, kp).second;
  const auto binom = calib::binomial_pmf(cfg.n, p1);

  double max_dev = 0.0, max_sigmas = 0.0, binom_sup = 0.0;
  for (int m = 0; m <= cfg.n; ++m) {
    const double se =
        std::sqrt(std::max(pmf[m] * (1.0 - pmf[m]), 1e-12) / cfg.N);
    const double dev = std::abs(mc[m] - pmf[m]);
    max_dev = std::max(max_dev, dev);
    max_sigmas = std::max(max_sigmas, dev / se);
    binom_sup = std::max(binom_sup, std::abs(binom[m] - pmf[m]));
  }
  const bool ok = std::abs(pmf_sum - 1.0) < 1e-9 && max_sigmas < 3.0;

  RunManifest manifest("oracle-check", cfg);
  const std::string csv_path = out_path(cfg, "oracle_check.csv");
  CsvWriter csv(csv_path, {"m", "p_enumeration", "p_monte_carlo", "p_binomial"});
  for (int m = 0; m <= cfg.n; ++m)
    csv.row({double(m), pmf[m], mc[m], binom[m]});

  json report;
  report["pmf_sum"] = format_real(pmf_sum);
  report["max_abs_deviation_mc"] = format_real(max_dev);
  report["max_standard_errors_mc"] = format_real(max_sigmas);
  report["binomial_sup_distance"] = format_real(binom_sup);  // informational
  report["first_click_p1"] = format_real(p1);
  report["ok"] = ok;
  const std::string report_path = out_path(cfg, "oracle_check.json");
  std::ofstream rep(report_path);
  rep << report.dump(2) << "\n";

  manifest.add_output(csv_path);
  manifest.add_output(report_path);
  manifest.timing_ms("total", elapsed_ms(t0));
  manifest.write(out_path(cfg, "oracle_check_manifest.json"));
  return ok ? 0 : 2;
}

int run_command(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "first-click") return cmd_first_click(cfg);
  if (name == "trajectories") return cmd_trajectories(cfg);
  if (name == "calibrate") return cmd_calibrate(cfg);
  if (name == "tomogram") return cmd_tomogram(cfg);
  if (name == "sweep") return cmd_sweep(cfg);
  if (name == "oracle-check") return cmd_oracle_check(cfg);
  throw ConfigError("unknown command: " + name);
}

int rerun_from_manifest(const std::string& manifest_path,
                        const std::string& out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest: " + manifest_path);
  json j = json::parse(in);
  ExperimentConfig cfg = config_from_json(j.at("config"));
  if (!out_override.empty()) cfg.out_dir = out_override;
  return run_command(j.at("command").get<std::string>(), cfg);
}

}  // namespace cqtom::cli
