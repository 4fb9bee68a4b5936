#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "risloc/kv.hpp"
#include "risloc/rng.hpp"

namespace risloc {

/// One point scatterer: the transmit signal bounces off it both towards the
/// reflecting surface and directly towards the radar array.
struct Target {
  double angle_ris_deg = 0.0;  // direction seen from the surface
  double angle_pr_deg = 0.0;   // direction seen from the radar
  int delay_ap_target = 0;     // transmitter -> target, samples
  int delay_target_ris = 0;    // target -> surface, samples
  int delay_target_pr = 0;     // target -> radar, samples
  std::complex<double> gain_via_ris{1.0, 0.0};  // transmitter->target->surface
  std::complex<double> gain_direct{1.0, 0.0};   // target->radar bounce
};

/// Full ground-truth geometry of one synthetic acquisition: element counts,
/// angles, per-path integer sample delays, complex path gains and the noise
/// level at the radar.
struct Scene {
  int ris_elements = 16;  // 0 disables the surface path entirely
  int pr_antennas = 8;
  double spacing_wavelengths = 0.5;

  std::vector<Target> targets;

  double angle_ap_ris_deg = -10.0;
  double angle_ris_pr_deg = -40.0;
  double angle_ap_pr_deg = -60.0;

  int delay_ap_ris = 0;
  int delay_ris_pr = 0;
  int delay_ap_pr = 0;

  std::complex<double> gain_ap_ris{1.0, 0.0};  // transmitter -> surface leak
  std::complex<double> gain_ris_pr{1.0, 0.0};  // surface -> radar reflection
  std::complex<double> gain_ap_pr{1.0, 0.0};   // transmitter -> radar direct

  double noise_power = 0.0;  // variance of each complex noise entry

  int target_count() const { return static_cast<int>(targets.size()); }

  /// Longest end-to-end delay of any modeled path; the waveform must carry
  /// this much lead-in before the first usable sample.
  int max_total_delay() const {
    int d = delay_ap_pr;
    int ris_feed = delay_ap_ris;  // longest path into the surface
    for (const auto& t : targets) {
      d = std::max(d, t.delay_ap_target + t.delay_target_pr);
      ris_feed = std::max(ris_feed, t.delay_ap_target + t.delay_target_ris);
    }
    if (ris_elements > 0) d = std::max(d, ris_feed + delay_ris_pr);
    return d;
  }

  void validate() const {
    if (ris_elements < 0) throw std::invalid_argument("scene: ris_elements < 0");
    if (pr_antennas < 1) throw std::invalid_argument("scene: need at least one radar antenna");
    if (noise_power < 0.0) throw std::invalid_argument("scene: negative noise power");
    auto check_angle = [](double a, const char* what) {
      if (!(a >= -90.0 && a <= 90.0))
        throw std::invalid_argument(std::string("scene: ") + what + " outside [-90, 90]");
    };
    check_angle(angle_ap_ris_deg, "transmitter/surface angle");
    check_angle(angle_ris_pr_deg, "surface/radar angle");
    check_angle(angle_ap_pr_deg, "transmitter/radar angle");
    auto check_delay = [](int d, const char* what) {
      if (d < 0) throw std::invalid_argument(std::string("scene: negative delay ") + what);
    };
    check_delay(delay_ap_ris, "ap-ris");
    check_delay(delay_ris_pr, "ris-pr");
    check_delay(delay_ap_pr, "ap-pr");
    for (const auto& t : targets) {
      check_angle(t.angle_ris_deg, "target/surface angle");
      check_angle(t.angle_pr_deg, "target/radar angle");
      check_delay(t.delay_ap_target, "ap-target");
      check_delay(t.delay_target_ris, "target-ris");
      check_delay(t.delay_target_pr, "target-pr");
    }
  }

  /// Serializes to the documented key-value schema (angles in degrees, gains
  /// as magnitude/phase pairs, delays in samples).
  KeyValueFile to_kv() const {
    KeyValueFile kv;
    kv.set_int("ris_elements", ris_elements);
    kv.set_int("pr_antennas", pr_antennas);
    kv.set_double("spacing_wavelengths", spacing_wavelengths);
    kv.set_double("angle_ap_ris_deg", angle_ap_ris_deg);
    kv.set_double("angle_ris_pr_deg", angle_ris_pr_deg);
    kv.set_double("angle_ap_pr_deg", angle_ap_pr_deg);
    kv.set_int("delay_ap_ris", delay_ap_ris);
    kv.set_int("delay_ris_pr", delay_ris_pr);
    kv.set_int("delay_ap_pr", delay_ap_pr);
    kv.set_double("gain_ap_ris_mag", std::abs(gain_ap_ris));
    kv.set_double("gain_ap_ris_phase", std::arg(gain_ap_ris));
    kv.set_double("gain_ris_pr_mag", std::abs(gain_ris_pr));
    kv.set_double("gain_ris_pr_phase", std::arg(gain_ris_pr));
    kv.set_double("gain_ap_pr_mag", std::abs(gain_ap_pr));
    kv.set_double("gain_ap_pr_phase", std::arg(gain_ap_pr));
    kv.set_double("noise_power", noise_power);
    kv.set_int("target_count", target_count());
    auto list = [this](auto&& get) {
      std::vector<double> v;
      v.reserve(targets.size());
      for (const auto& t : targets) v.push_back(get(t));
      return v;
    };
    kv.set_list("target_angle_ris_deg", list([](const Target& t) { return t.angle_ris_deg; }));
    kv.set_list("target_angle_pr_deg", list([](const Target& t) { return t.angle_pr_deg; }));
    kv.set_list("target_delay_ap_target",
                list([](const Target& t) { return double(t.delay_ap_target); }));
    kv.set_list("target_delay_target_ris",
                list([](const Target& t) { return double(t.delay_target_ris); }));
    kv.set_list("target_delay_target_pr",
                list([](const Target& t) { return double(t.delay_target_pr); }));
    kv.set_list("target_gain_via_ris_mag",
                list([](const Target& t) { return std::abs(t.gain_via_ris); }));
    kv.set_list("target_gain_via_ris_phase",
                list([](const Target& t) { return std::arg(t.gain_via_ris); }));
    kv.set_list("target_gain_direct_mag",
                list([](const Target& t) { return std::abs(t.gain_direct); }));
    kv.set_list("target_gain_direct_phase",
                list([](const Target& t) { return std::arg(t.gain_direct); }));
    return kv;
  }

  static Scene from_kv(const KeyValueFile& kv) {
    Scene s;
    s.ris_elements = kv.get_int("ris_elements");
    s.pr_antennas = kv.get_int("pr_antennas");
    s.spacing_wavelengths = kv.get_double("spacing_wavelengths", 0.5);
    s.angle_ap_ris_deg = kv.get_double("angle_ap_ris_deg");
    s.angle_ris_pr_deg = kv.get_double("angle_ris_pr_deg");
    s.angle_ap_pr_deg = kv.get_double("angle_ap_pr_deg");
    s.delay_ap_ris = kv.get_int("delay_ap_ris", 0);
    s.delay_ris_pr = kv.get_int("delay_ris_pr", 0);
    s.delay_ap_pr = kv.get_int("delay_ap_pr", 0);
    s.gain_ap_ris = std::polar(kv.get_double("gain_ap_ris_mag", 1.0),
                               kv.get_double("gain_ap_ris_phase", 0.0));
    s.gain_ris_pr = std::polar(kv.get_double("gain_ris_pr_mag", 1.0),
                               kv.get_double("gain_ris_pr_phase", 0.0));
    s.gain_ap_pr = std::polar(kv.get_double("gain_ap_pr_mag", 1.0),
                              kv.get_double("gain_ap_pr_phase", 0.0));
    s.noise_power = kv.get_double("noise_power", 0.0);
    const int k = kv.get_int("target_count");
    auto need = [&](const char* key) {
      auto v = kv.get_list(key);
      if (static_cast<int>(v.size()) != k)
        throw std::runtime_error(std::string("scene: key ") + key +
                                 " must list one value per target");
      return v;
    };
    if (k > 0) {
      const auto a_ris = need("target_angle_ris_deg");
      const auto a_pr = need("target_angle_pr_deg");
      const auto d1 = need("target_delay_ap_target");
      const auto d2 = need("target_delay_target_ris");
      const auto d3 = need("target_delay_target_pr");
      const auto g1m = need("target_gain_via_ris_mag");
      const auto g1p = need("target_gain_via_ris_phase");
      const auto g2m = need("target_gain_direct_mag");
      const auto g2p = need("target_gain_direct_phase");
      s.targets.resize(k);
      for (int i = 0; i < k; ++i) {
        Target& t = s.targets[i];
        t.angle_ris_deg = a_ris[i];
        t.angle_pr_deg = a_pr[i];
        t.delay_ap_target = static_cast<int>(d1[i]);
        t.delay_target_ris = static_cast<int>(d2[i]);
        t.delay_target_pr = static_cast<int>(d3[i]);
        t.gain_via_ris = std::polar(g1m[i], g1p[i]);
        t.gain_direct = std::polar(g2m[i], g2p[i]);
      }
    }
    s.validate();
    return s;
  }
};

}  // namespace risloc
