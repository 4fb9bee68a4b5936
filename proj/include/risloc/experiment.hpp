#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "risloc/beamform.hpp"
#include "risloc/kv.hpp"
#include "risloc/metrics.hpp"
#include "risloc/nlms.hpp"
#include "risloc/parallel.hpp"
#include "risloc/ris.hpp"
#include "risloc/scene.hpp"
#include "risloc/simulate.hpp"

namespace risloc {

enum class Algorithm { batch, sequential };

inline std::string to_string(Algorithm a) {
  return a == Algorithm::batch ? "batch" : "sequential";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "batch") return Algorithm::batch;
  if (s == "sequential") return Algorithm::sequential;
  throw std::invalid_argument("unknown algorithm: " + s);
}

/// Everything a Monte-Carlo campaign needs: scene geometry and gain
/// magnitudes (phases and delays are redrawn per trial), campaign sizes,
/// sweep axes and estimator settings.
struct ExperimentConfig {
  // architecture
  int m = 16;                    // active surface element count, 0 = none
  std::vector<double> m_list{16.0, 32.0};
  bool include_baseline = true;  // sweeps add the m = 0 reference
  int n_epoch = 100;
  int n_pr = 8;
  int snapshots = 100;

  // scene geometry (degrees)
  std::vector<double> targets_ris_deg{20.0, 30.0};
  std::vector<double> targets_pr_deg{0.0, 20.0};
  double angle_ap_ris_deg = -10.0;
  double angle_ris_pr_deg = -40.0;
  double angle_ap_pr_deg = -60.0;

  // path gain magnitudes; each trial draws fresh uniform phases
  double gain_target_ris = 0.1;  // transmitter -> target -> surface
  double gain_ap_ris = 0.1;      // transmitter -> surface leak
  double gain_ris_pr = 0.5;      // surface -> radar
  double gain_target_pr = 0.1;   // target -> radar direct bounce
  double gain_ap_pr = 0.0;       // transmitter -> radar direct (blocked)

  int max_delay_samples = 10;  // per-path delays drawn uniformly in [0, this]
  WaveformKind waveform = WaveformKind::qpsk;
  double spacing_wavelengths = 0.5;

  // sweep axes
  std::vector<double> snr_db{-14, -12, -10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10, 12, 14};
  std::vector<double> target_counts{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> separations_deg{1, 1.5, 2, 2.5, 3, 4, 5, 6, 7, 9, 11, 14, 18, 22};
  double k_sweep_snr_db = 0.0;
  double separation_sweep_snr_db = 20.0;
  double k_sweep_spacing_deg = 5.0;

  int trials = 200;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::batch;
  NlmsConfig nlms;
  std::string output_path = "sweep.csv";
  unsigned n_threads = 1;  // trial-level parallelism in sweeps

  void validate() const {
    if (m < 0) throw std::invalid_argument("config: m < 0");
    if (m == 1) throw std::invalid_argument("config: m = 1 is degenerate, use 0 or >= 2");
    if (n_epoch < 1 || n_pr < 1 || snapshots < 1)
      throw std::invalid_argument("config: campaign dimensions must be >= 1");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (targets_ris_deg.size() != targets_pr_deg.size())
      throw std::invalid_argument("config: target angle lists differ in length");
    if (snr_db.empty() || target_counts.empty() || separations_deg.empty())
      throw std::invalid_argument("config: sweep axis lists must be nonempty");
    nlms.validate();
  }

  KeyValueFile to_kv() const {
    KeyValueFile kv;
    kv.set_int("m", m);
    kv.set_list("m_list", m_list);
    kv.set("include_baseline", include_baseline ? "true" : "false");
    kv.set_int("n_epoch", n_epoch);
    kv.set_int("n_pr", n_pr);
    kv.set_int("snapshots", snapshots);
    kv.set_list("targets_ris_deg", targets_ris_deg);
    kv.set_list("targets_pr_deg", targets_pr_deg);
    kv.set_double("angle_ap_ris_deg", angle_ap_ris_deg);
    kv.set_double("angle_ris_pr_deg", angle_ris_pr_deg);
    kv.set_double("angle_ap_pr_deg", angle_ap_pr_deg);
    kv.set_double("gain_target_ris", gain_target_ris);
    kv.set_double("gain_ap_ris", gain_ap_ris);
    kv.set_double("gain_ris_pr", gain_ris_pr);
    kv.set_double("gain_target_pr", gain_target_pr);
    kv.set_double("gain_ap_pr", gain_ap_pr);
    kv.set_int("max_delay_samples", max_delay_samples);
    kv.set("waveform", waveform == WaveformKind::qpsk ? "qpsk" : "gaussian");
    kv.set_double("spacing_wavelengths", spacing_wavelengths);
    kv.set_list("snr_db", snr_db);
    kv.set_list("target_counts", target_counts);
    kv.set_list("separations_deg", separations_deg);
    kv.set_double("k_sweep_snr_db", k_sweep_snr_db);
    kv.set_double("separation_sweep_snr_db", separation_sweep_snr_db);
    kv.set_double("k_sweep_spacing_deg", k_sweep_spacing_deg);
    kv.set_int("trials", trials);
    kv.set_int("seed", static_cast<long long>(seed));
    kv.set("algorithm", to_string(algorithm));
    kv.set_double("grid_start_deg", nlms.grid.start_deg);
    kv.set_double("grid_stop_deg", nlms.grid.stop_deg);
    kv.set_double("grid_step_deg", nlms.grid.step_deg);
    kv.set_double("mu", nlms.mu);
    kv.set_double("peak_threshold", nlms.peak_threshold);
    kv.set_double("epsilon_norm", nlms.epsilon_norm);
    kv.set("out", output_path);
    return kv;
  }

  static ExperimentConfig from_kv(const KeyValueFile& kv) {
    ExperimentConfig c;
    c.m = kv.get_int("m", c.m);
    c.m_list = kv.get_list("m_list", c.m_list);
    c.include_baseline = kv.get_bool("include_baseline", c.include_baseline);
    c.n_epoch = kv.get_int("n_epoch", c.n_epoch);
    c.n_pr = kv.get_int("n_pr", c.n_pr);
    c.snapshots = kv.get_int("snapshots", c.snapshots);
    c.targets_ris_deg = kv.get_list("targets_ris_deg", c.targets_ris_deg);
    c.targets_pr_deg = kv.get_list("targets_pr_deg", c.targets_pr_deg);
    c.angle_ap_ris_deg = kv.get_double("angle_ap_ris_deg", c.angle_ap_ris_deg);
    c.angle_ris_pr_deg = kv.get_double("angle_ris_pr_deg", c.angle_ris_pr_deg);
    c.angle_ap_pr_deg = kv.get_double("angle_ap_pr_deg", c.angle_ap_pr_deg);
    c.gain_target_ris = kv.get_double("gain_target_ris", c.gain_target_ris);
    c.gain_ap_ris = kv.get_double("gain_ap_ris", c.gain_ap_ris);
    c.gain_ris_pr = kv.get_double("gain_ris_pr", c.gain_ris_pr);
    c.gain_target_pr = kv.get_double("gain_target_pr", c.gain_target_pr);
    c.gain_ap_pr = kv.get_double("gain_ap_pr", c.gain_ap_pr);
    c.max_delay_samples = kv.get_int("max_delay_samples", c.max_delay_samples);
    c.waveform = waveform_kind_from_string(kv.get_string("waveform", "qpsk"));
    c.spacing_wavelengths = kv.get_double("spacing_wavelengths", c.spacing_wavelengths);
    c.snr_db = kv.get_list("snr_db", c.snr_db);
    c.target_counts = kv.get_list("target_counts", c.target_counts);
    c.separations_deg = kv.get_list("separations_deg", c.separations_deg);
    c.k_sweep_snr_db = kv.get_double("k_sweep_snr_db", c.k_sweep_snr_db);
    c.separation_sweep_snr_db =
        kv.get_double("separation_sweep_snr_db", c.separation_sweep_snr_db);
    c.k_sweep_spacing_deg = kv.get_double("k_sweep_spacing_deg", c.k_sweep_spacing_deg);
    c.trials = kv.get_int("trials", c.trials);
    c.seed = static_cast<std::uint64_t>(kv.get_double("seed", 1.0));
    c.algorithm = algorithm_from_string(kv.get_string("algorithm", "batch"));
    c.nlms.grid = AngleGrid(kv.get_double("grid_start_deg", -90.0),
                            kv.get_double("grid_stop_deg", 90.0),
                            kv.get_double("grid_step_deg", 0.5));
    c.nlms.mu = kv.get_double("mu", c.nlms.mu);
    c.nlms.peak_threshold = kv.get_double("peak_threshold", c.nlms.peak_threshold);
    c.nlms.epsilon_norm = kv.get_double("epsilon_norm", c.nlms.epsilon_norm);
    c.nlms.spacing_wavelengths = c.spacing_wavelengths;
    c.output_path = kv.get_string("out", c.output_path);
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    return from_kv(KeyValueFile::load(path));
  }

  /// FNV-1a over the canonical serialization; stamped into result tables so
  /// outputs can be traced back to their exact configuration.
  std::string hash() const {
    const std::string text = to_kv().serialize();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char ch : text) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

/// Scene realization for one trial: fixed geometry and gain magnitudes from
/// the config, fresh gain phases and per-path delays from the trial stream.
/// With m = 0 the surface path is removed entirely.
inline Scene build_trial_scene(const ExperimentConfig& cfg,
                               const std::vector<double>& targets_ris,
                               const std::vector<double>& targets_pr, Rng& rng) {
  Scene s;
  s.ris_elements = cfg.m;
  s.pr_antennas = cfg.n_pr;
  s.spacing_wavelengths = cfg.spacing_wavelengths;
  s.angle_ap_ris_deg = cfg.angle_ap_ris_deg;
  s.angle_ris_pr_deg = cfg.angle_ris_pr_deg;
  s.angle_ap_pr_deg = cfg.angle_ap_pr_deg;
  s.delay_ap_ris = rng.uniform_int(0, cfg.max_delay_samples);
  s.delay_ris_pr = rng.uniform_int(0, cfg.max_delay_samples);
  s.delay_ap_pr = rng.uniform_int(0, cfg.max_delay_samples);
  s.gain_ap_ris = cfg.gain_ap_ris * rng.unit_phasor();
  s.gain_ris_pr = cfg.m > 0 ? cfg.gain_ris_pr * rng.unit_phasor()
                            : std::complex<double>(0.0, 0.0);
  s.gain_ap_pr = cfg.gain_ap_pr * rng.unit_phasor();
  s.noise_power = 0.0;
  s.targets.resize(targets_ris.size());
  for (std::size_t k = 0; k < targets_ris.size(); ++k) {
    Target& t = s.targets[k];
    t.angle_ris_deg = targets_ris[k];
    t.angle_pr_deg = targets_pr[k];
    t.delay_ap_target = rng.uniform_int(0, cfg.max_delay_samples);
    t.delay_target_ris = rng.uniform_int(0, cfg.max_delay_samples);
    t.delay_target_pr = rng.uniform_int(0, cfg.max_delay_samples);
    t.gain_via_ris = cfg.gain_target_ris * rng.unit_phasor();
    t.gain_direct = cfg.gain_target_pr * rng.unit_phasor();
  }
  s.validate();
  return s;
}

/// One full pipeline pass at the given operating SNR. With a surface
/// (m > 0): configure phases, simulate, beamform towards the surface and
/// estimate the surface-relative target angles. Without one (m = 0): same
/// data volume and estimator, run on the raw antenna rows against the
/// physical array manifold, estimating the radar-relative angles.
inline TrialResult run_trial(const ExperimentConfig& cfg,
                             const std::vector<double>& targets_ris,
                             const std::vector<double>& targets_pr, double snr_db,
                             std::uint64_t seed) {
  cfg.validate();
  Rng scene_rng(mix_seed(seed, 0x7363656eull));
  Scene scene = build_trial_scene(cfg, targets_ris, targets_pr, scene_rng);

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
  std::vector<double> truth;
  if (cfg.m > 0) {
    const BeamWeights w =
        compute_weights(cfg.angle_ris_pr_deg, cfg.n_pr, cfg.spacing_wavelengths);
    data = beamform(cube, w);
    estimator_phases = phases;
    truth = targets_ris;
  } else {
    data = stack_epochs(cube);
    estimator_phases = PhaseMatrix::stacked_identity(cfg.n_epoch, cfg.n_pr);
    truth = targets_pr;
  }

  Spectrum spectrum;
  if (cfg.algorithm == Algorithm::batch) {
    spectrum = batch_spectrum(data, estimator_phases, cfg.nlms);
  } else {
    spectrum = sequential_spectrum(data, estimator_phases, cfg.nlms).back();
  }

  Detection det;
  if (spectrum.p.maxCoeff() > 0.0)
    det = detect_peaks(normalize_spectrum(spectrum), cfg.nlms.peak_threshold);
  return score_trial(truth, det, cfg.nlms.grid.step_deg);
}

/// Convenience form using the config's own target placement.
inline TrialResult run_trial(const ExperimentConfig& cfg, double snr_db,
                             std::uint64_t seed) {
  return run_trial(cfg, cfg.targets_ris_deg, cfg.targets_pr_deg, snr_db, seed);
}

/// A batch of seeded trials at one operating point; trial i runs on the
/// substream (seed, point_tag, i). Safe to parallelize, identical results
/// either way.
inline std::vector<TrialResult> run_trials(const ExperimentConfig& cfg,
                                           const std::vector<double>& targets_ris,
                                           const std::vector<double>& targets_pr,
                                           double snr_db, std::uint64_t point_tag) {
  std::vector<TrialResult> results(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    results[i] = run_trial(cfg, targets_ris, targets_pr, snr_db,
                           mix_seed(cfg.seed, point_tag, i));
  }, cfg.n_threads);
  return results;
}

enum class SweepKind { snr, targets, separation };

inline std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::snr: return "snr";
    case SweepKind::targets: return "targets";
    default: return "separation";
  }
}

struct SweepRow {
  std::string sweep;
  double sweep_value = 0.0;
  int m = 0;
  std::string algorithm;
  std::string metric;
  double value = 0.0;
  int trials = 0;
  std::string config_hash;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "sweep,sweep_value,m,algorithm,metric,value,trials,config_hash\n";
    char buf[192];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%.6g,%d,%s,%s,%.6g,%d,%s\n", r.sweep.c_str(),
                    r.sweep_value, r.m, r.algorithm.c_str(), r.metric.c_str(), r.value,
                    r.trials, r.config_hash.c_str());
      out << buf;
    }
  }

  /// Value lookup; NaN when the row is absent.
  double value_of(double sweep_value, int m, const std::string& metric) const {
    for (const auto& r : rows)
      if (r.sweep_value == sweep_value && r.m == m && r.metric == metric) return r.value;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

inline void append_point_metrics(SweepTable& table, const std::string& sweep,
                                 double sweep_value, int m, const std::string& algorithm,
                                 const std::vector<TrialResult>& results,
                                 const std::string& hash) {
  const int n = static_cast<int>(results.size());
  auto add = [&](const char* metric, double value) {
    table.rows.push_back({sweep, sweep_value, m, algorithm, metric, value, n, hash});
  };
  add("mse_deg2", mse(results));
  add("pd", detection_probability(results));
  add("srp", success_resolve_percentage(results));
  add("err_p90_deg", error_quantile(results, 0.9));
}

inline std::vector<int> sweep_architectures(const ExperimentConfig& cfg) {
  std::vector<int> archs;
  for (const double m : cfg.m_list) {
    const int mi = static_cast<int>(m);
    bool seen = false;
    for (const int a : archs) seen = seen || a == mi;
    if (!seen) archs.push_back(mi);
  }
  if (cfg.include_baseline) {
    bool seen = false;
    for (const int a : archs) seen = seen || a == 0;
    if (!seen) archs.push_back(0);
  }
  return archs;
}

}  // namespace detail

/// Runs the requested metric sweep: every architecture in the config's m
/// list (plus the m = 0 reference unless disabled) at every sweep point,
/// with the configured trial count per point. Rows carry MSE, detection
/// probability, resolve percentage and the 0.9 error quantile.
inline SweepTable run_sweep(const ExperimentConfig& cfg, SweepKind kind) {
  cfg.validate();
  const std::string hash = cfg.hash();
  const std::vector<int> archs = detail::sweep_architectures(cfg);
  SweepTable table;

  const auto sweep_name = to_string(kind);
  std::vector<double> points;
  switch (kind) {
    case SweepKind::snr: points = cfg.snr_db; break;
    case SweepKind::targets: points = cfg.target_counts; break;
    case SweepKind::separation: points = cfg.separations_deg; break;
  }

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    for (std::size_t ai = 0; ai < archs.size(); ++ai) {
      ExperimentConfig point_cfg = cfg;
      point_cfg.m = archs[ai];

      std::vector<double> t_ris = cfg.targets_ris_deg;
      std::vector<double> t_pr = cfg.targets_pr_deg;
      double snr = 0.0;
      switch (kind) {
        case SweepKind::snr:
          snr = points[pi];
          break;
        case SweepKind::targets: {
          const auto k = static_cast<std::size_t>(points[pi]);
          t_ris.assign(k, 0.0);
          t_pr.assign(k, 0.0);
          for (std::size_t i = 0; i < k; ++i) {
            t_ris[i] = cfg.targets_ris_deg.front() +
                       cfg.k_sweep_spacing_deg * static_cast<double>(i);
            t_pr[i] = cfg.targets_pr_deg.front() +
                      cfg.k_sweep_spacing_deg * static_cast<double>(i);
          }
          snr = cfg.k_sweep_snr_db;
          break;
        }
        case SweepKind::separation:
          t_ris = {cfg.targets_ris_deg.front(), cfg.targets_ris_deg.front() + points[pi]};
          t_pr = {cfg.targets_pr_deg.front(), cfg.targets_pr_deg.front() + points[pi]};
          snr = cfg.separation_sweep_snr_db;
          break;
      }

      const std::uint64_t point_tag =
          mix_seed(static_cast<std::uint64_t>(kind) + 1, pi, ai);
      const auto results = run_trials(point_cfg, t_ris, t_pr, snr, point_tag);
      detail::append_point_metrics(table, sweep_name, points[pi], point_cfg.m,
                                   to_string(cfg.algorithm), results, hash);
    }
  }
  return table;
}

}  // namespace risloc
