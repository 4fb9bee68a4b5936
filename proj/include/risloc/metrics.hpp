#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "risloc/nlms.hpp"

namespace risloc {

/// One true/estimated angle pair produced by the association step.
struct MatchedPair {
  double true_deg = 0.0;
  double estimated_deg = 0.0;
  double abs_error_deg = 0.0;
};

/// Greedy nearest-angle association between truth and estimates: repeatedly
/// take the unused pair with the smallest absolute difference, ties broken
/// toward the smaller true angle, then the smaller estimate. Leftover truths
/// stay unmatched when there are fewer estimates.
inline std::vector<MatchedPair> match_angles(std::vector<double> truth,
                                             std::vector<double> estimates) {
  std::sort(truth.begin(), truth.end());
  std::sort(estimates.begin(), estimates.end());
  struct Cand {
    double err;
    double t;
    double e;
    std::size_t ti, ei;
  };
  std::vector<Cand> cands;
  cands.reserve(truth.size() * estimates.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t j = 0; j < estimates.size(); ++j)
      cands.push_back({std::abs(truth[i] - estimates[j]), truth[i], estimates[j], i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return std::tie(a.err, a.t, a.e) < std::tie(b.err, b.t, b.e);
  });
  std::vector<bool> t_used(truth.size(), false), e_used(estimates.size(), false);
  std::vector<MatchedPair> out;
  for (const auto& c : cands) {
    if (t_used[c.ti] || e_used[c.ei]) continue;
    t_used[c.ti] = true;
    e_used[c.ei] = true;
    out.push_back({c.t, c.e, c.err});
  }
  std::sort(out.begin(), out.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.true_deg < b.true_deg; });
  return out;
}

/// Scoring record of one Monte-Carlo run.
struct TrialResult {
  std::vector<double> true_angles_deg;
  Detection detected;
  std::vector<MatchedPair> matches;
  std::vector<double> squared_errors_deg2;  // one per matched pair
  bool correct_enumeration = false;         // k_hat == K
  bool exact_recovery = false;              // and every error within half a grid step
};

/// Builds the full record from truth and a detection, at the given grid
/// resolution (equality on the continuous axis is read at grid precision).
inline TrialResult score_trial(const std::vector<double>& truth, const Detection& det,
                               double grid_step_deg) {
  TrialResult r;
  r.true_angles_deg = truth;
  std::sort(r.true_angles_deg.begin(), r.true_angles_deg.end());
  r.detected = det;
  r.matches = match_angles(r.true_angles_deg, det.angles_deg);
  for (const auto& m : r.matches)
    r.squared_errors_deg2.push_back(m.abs_error_deg * m.abs_error_deg);
  r.correct_enumeration = det.k_hat == static_cast<int>(truth.size());
  r.exact_recovery = r.correct_enumeration;
  const double tol = grid_step_deg / 2.0 + 1e-9;
  for (const auto& m : r.matches)
    if (m.abs_error_deg > tol) r.exact_recovery = false;
  return r;
}

/// Mean squared angle error in deg^2 over trials with correct enumeration.
/// NaN when no trial enumerated correctly (the value is then undefined and
/// flagged as such in output tables).
inline double mse(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("mse: no trials");
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& r : results) {
    if (!r.correct_enumeration) continue;
    for (const double e2 : r.squared_errors_deg2) {
      acc += e2;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : acc / static_cast<double>(count);
}

/// Fraction of trials whose peak count equals the true target count.
inline double detection_probability(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("detection_probability: no trials");
  std::size_t hits = 0;
  for (const auto& r : results) hits += r.correct_enumeration ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

/// Fraction of trials with correct enumeration and every angle recovered at
/// grid resolution.
inline double success_resolve_percentage(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("srp: no trials");
  std::size_t hits = 0;
  for (const auto& r : results) hits += r.exact_recovery ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

/// Collects per-target absolute errors across trials; true targets that were
/// never matched contribute +infinity.
inline std::vector<double> per_target_errors(const std::vector<TrialResult>& results) {
  std::vector<double> errors;
  for (const auto& r : results) {
    for (const auto& m : r.matches) errors.push_back(m.abs_error_deg);
    const std::size_t unmatched = r.true_angles_deg.size() - r.matches.size();
    for (std::size_t i = 0; i < unmatched; ++i)
      errors.push_back(std::numeric_limits<double>::infinity());
  }
  return errors;
}

/// Empirical Pr(|error| < e) evaluated at each requested threshold.
inline std::vector<double> error_cdf(const std::vector<TrialResult>& results,
                                     const std::vector<double>& error_grid_deg) {
  const std::vector<double> errors = per_target_errors(results);
  std::vector<double> cdf(error_grid_deg.size(), 0.0);
  if (errors.empty()) return cdf;
  for (std::size_t i = 0; i < error_grid_deg.size(); ++i) {
    std::size_t below = 0;
    for (const double e : errors) below += (e < error_grid_deg[i]) ? 1 : 0;
    cdf[i] = static_cast<double>(below) / static_cast<double>(errors.size());
  }
  return cdf;
}

/// Quantile of the per-target absolute error distribution (inf-aware); the
/// scalar summary of the error CDF carried in sweep tables.
inline double error_quantile(const std::vector<TrialResult>& results, double q) {
  std::vector<double> errors = per_target_errors(results);
  if (errors.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(errors.begin(), errors.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(errors.size())) - 1.0);
  return errors[std::min(idx, errors.size() - 1)];
}

}  // namespace risloc
