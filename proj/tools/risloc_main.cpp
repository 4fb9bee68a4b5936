// Command-line front end: spectrum snapshots, metric sweeps and a built-in
// self test, all driven by a plain key-value config file.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "risloc/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::string algorithm;
  std::string m_values;
  long long seed = -1;
  int trials = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "key-value config file");
  if (config_required) opt->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--algorithm", args.algorithm, "batch | sequential")
      ->check(CLI::IsMember({"batch", "sequential"}));
  cmd->add_option("--m", args.m_values, "surface element counts, comma separated");
  cmd->add_option("--trials", args.trials, "trials per sweep point");
  cmd->add_option("--out", args.out, "output CSV path");
}

risloc::ExperimentConfig make_config(const CommonArgs& args) {
  risloc::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = risloc::ExperimentConfig::load(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.algorithm.empty()) cfg.algorithm = risloc::algorithm_from_string(args.algorithm);
  if (args.trials > 0) cfg.trials = args.trials;
  if (!args.m_values.empty()) {
    risloc::KeyValueFile kv;
    kv.set("m", args.m_values);
    cfg.m_list = kv.get_list("m");
    cfg.m = static_cast<int>(cfg.m_list.front());
  }
  if (!args.out.empty()) cfg.output_path = args.out;
  cfg.validate();
  return cfg;
}

int run_spectrum(const CommonArgs& args) {
  using namespace risloc;
  const ExperimentConfig cfg = make_config(args);
  const double snr_db = cfg.snr_db.front();
  const std::uint64_t seed = mix_seed(cfg.seed, 0x73706563ull);

  Rng scene_rng(mix_seed(seed, 0x7363656eull));
  Scene scene = build_trial_scene(cfg, cfg.targets_ris_deg, cfg.targets_pr_deg, scene_rng);
  const PhaseMatrix phases =
      cfg.m > 0 ? build_ris_matrix(cfg.angle_ap_ris_deg, cfg.m, cfg.n_epoch,
                                   mix_seed(seed, 0x70687374ull), cfg.spacing_wavelengths)
                : PhaseMatrix::ones(cfg.n_epoch, 0);
  const Waveform waveform = generate_waveform(cfg.snapshots + scene.max_total_delay(),
                                              cfg.waveform, mix_seed(seed, 0x77666d31ull));
  scene.noise_power = calibrate_noise(scene, waveform, snr_db, phases, cfg.snapshots);
  const DataCube cube = simulate_campaign(scene, phases, waveform, cfg.snapshots, seed);

  BeamformedData data;
  PhaseMatrix estimator_phases;
  if (cfg.m > 0) {
    data = beamform(cube, compute_weights(cfg.angle_ris_pr_deg, cfg.n_pr,
                                          cfg.spacing_wavelengths));
    estimator_phases = phases;
  } else {
    data = stack_epochs(cube);
    estimator_phases = PhaseMatrix::stacked_identity(cfg.n_epoch, cfg.n_pr);
  }

  Spectrum spectrum;
  if (cfg.algorithm == Algorithm::batch) {
    spectrum = batch_spectrum(data, estimator_phases, cfg.nlms);
  } else {
    spectrum = sequential_spectrum(data, estimator_phases, cfg.nlms).back();
  }
  const Spectrum normalized = normalize_spectrum(spectrum);
  normalized.save_csv(cfg.output_path);

  const Detection det = detect_peaks(normalized, cfg.nlms.peak_threshold);
  std::printf("spectrum written to %s (%zu angles, snr %.6g dB, %s)\n",
              cfg.output_path.c_str(), cfg.nlms.grid.size(), snr_db,
              to_string(cfg.algorithm).c_str());
  std::printf("detected %d peak(s):", det.k_hat);
  for (const double a : det.angles_deg) std::printf(" %.6g", a);
  std::printf("\n");
  return 0;
}

int run_sweep_cmd(const CommonArgs& args, risloc::SweepKind kind) {
  using namespace risloc;
  const ExperimentConfig cfg = make_config(args);
  const SweepTable table = run_sweep(cfg, kind);
  table.save_csv(cfg.output_path);
  std::printf("%s sweep written to %s (%zu rows, %d trials/point)\n",
              to_string(kind).c_str(), cfg.output_path.c_str(), table.rows.size(),
              cfg.trials);
  return 0;
}

// Quick invariant pass over the main algebraic properties; a cheap smoke
// check for installs, not a replacement for the test suites.
int run_selftest() {
  using namespace risloc;
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what);
    if (!ok) ++failures;
  };

  {
    Rng rng(1);
    bool ok = true;
    for (int t = 0; t < 25; ++t) {
      const int m = rng.uniform_int(2, 64);
      const double theta = rng.uniform(-90.0, 90.0);
      const auto a = steering_vector(theta, m, 0.5);
      ok = ok && std::abs(a.elements.squaredNorm() - m) < 1e-9;
      const auto p = orthogonal_projector(a);
      ok = ok && (p * a.elements).norm() <= 1e-10 * a.elements.norm();
    }
    check(ok, "steering norms and projector nulls");
  }
  {
    const auto v = build_ris_matrix(-10.0, 16, 50, 7);
    check(v.max_modulus_error() <= 1e-12, "phase matrix feasibility");
    const auto v2 = build_ris_matrix(-10.0, 16, 50, 7);
    check((v.v - v2.v).cwiseAbs().maxCoeff() == 0.0, "phase matrix determinism");
  }
  {
    const auto bw = compute_weights(-40.0, 8);
    const auto a = steering_vector(-40.0, 8, 0.5);
    check(std::abs(bw.w.dot(a.elements) - std::complex<double>(1.0, 0.0)) < 1e-12,
          "distortionless response");
  }
  {
    BeamformedData z;
    z.z = Eigen::MatrixXcd::Zero(4, 8);
    NlmsConfig cfg;
    cfg.grid = AngleGrid(-90.0, 90.0, 5.0);
    const auto v = PhaseMatrix::ones(4, 3);
    check(batch_spectrum(z, v, cfg).p.maxCoeff() == 0.0, "zero data fixed point (batch)");
    check(sequential_spectrum(z, v, cfg).back().p.maxCoeff() == 0.0,
          "zero data fixed point (sequential)");
  }
  {
    ExperimentConfig cfg;
    cfg.m = 32;
    cfg.n_epoch = 40;
    cfg.snapshots = 40;
    cfg.targets_ris_deg = {20.0};
    cfg.targets_pr_deg = {10.0};
    cfg.nlms.grid = AngleGrid(-90.0, 90.0, 0.5);
    const auto r = run_trial(cfg, 300.0, 5);
    check(r.exact_recovery, "noise-free single-target recovery");
  }
  std::printf(failures == 0 ? "selftest passed\n" : "selftest FAILED (%d)\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided passive radar localization toolkit"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, snr_args, targets_args, sep_args;
  auto* spectrum = app.add_subcommand("spectrum", "write one spectrum CSV");
  add_common(spectrum, spectrum_args, true);
  auto* sweep_snr = app.add_subcommand("sweep-snr", "metrics versus operating SNR");
  add_common(sweep_snr, snr_args, false);
  auto* sweep_targets = app.add_subcommand("sweep-targets", "metrics versus target count");
  add_common(sweep_targets, targets_args, false);
  auto* sweep_sep =
      app.add_subcommand("sweep-separation", "metrics versus angular separation");
  add_common(sweep_sep, sep_args, false);
  app.add_subcommand("selftest", "run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) return run_spectrum(spectrum_args);
    if (sweep_snr->parsed()) return run_sweep_cmd(snr_args, risloc::SweepKind::snr);
    if (sweep_targets->parsed())
      return run_sweep_cmd(targets_args, risloc::SweepKind::targets);
    if (sweep_sep->parsed()) return run_sweep_cmd(sep_args, risloc::SweepKind::separation);
    return run_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
