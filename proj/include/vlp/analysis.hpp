#pragma once

// Positioning error statistics: planar errors, mean / P90 / max / RMS, the
// empirical CDF and a fixed-width histogram.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlp/calibration.hpp"
#include "vlp/error.hpp"
#include "vlp/positioning.hpp"

namespace vlp {

struct CdfPoint {
  double error = 0.0;     // cm
  double fraction = 0.0;  // cumulative
};

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 edges
  std::vector<std::size_t> counts;
};

struct ErrorReport {
  std::vector<double> per_trial_errors;  // cm, x-y plane, input order
  std::vector<double> per_trial_errors_3d;
  double mean = 0.0;
  double max = 0.0;
  double p90 = 0.0;
  double rms = 0.0;
  std::vector<CdfPoint> cdf;
  Histogram histogram;
  std::optional<DispersionSummary> dispersion;
};

inline constexpr double kHistogramBinCm = 0.25;

/// ceil(q * n)-th smallest value (1-based), q in (0, 1].
inline double nearest_rank(std::vector<double> sorted_values, double q) {
  const auto n = sorted_values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted_values[rank - 1];
}

inline ErrorReport error_stats(std::span<const WorldPoint> fixes,
                               std::span<const WorldPoint> ground_truths) {
  if (fixes.size() != ground_truths.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(fixes.size()) + " fixes vs " +
                                               std::to_string(ground_truths.size()) +
                                               " ground truths");
  if (fixes.empty()) throw Error(ErrorCode::EmptyInput, "no fixes");

  ErrorReport r;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t n = 0; n < fixes.size(); ++n) {
    const WorldPoint d = fixes[n] - ground_truths[n];
    const double e = std::hypot(d.x, d.y);
    r.per_trial_errors.push_back(e);
    r.per_trial_errors_3d.push_back(std::hypot(d.x, d.y, d.z));
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(fixes.size());
  std::vector<double> sorted = r.per_trial_errors;
  std::sort(sorted.begin(), sorted.end());
  r.mean = sum / n;
  r.rms = std::sqrt(sum_sq / n);
  r.max = sorted.back();
  r.p90 = nearest_rank(sorted, 0.9);
  // The summed mean can exceed the max by an ulp when all errors are equal.
  r.mean = std::min(r.mean, r.max);

  for (std::size_t k = 0; k < sorted.size(); ++k)
    r.cdf.push_back({sorted[k], static_cast<double>(k + 1) / n});

  const double upper = std::max(std::ceil(r.max), kHistogramBinCm);
  const auto bins = static_cast<std::size_t>(std::ceil(upper / kHistogramBinCm));
  for (std::size_t b = 0; b <= bins; ++b) r.histogram.edges.push_back(b * kHistogramBinCm);
  r.histogram.counts.assign(bins, 0);
  for (double e : sorted) {
    auto b = static_cast<std::size_t>(std::floor(e / kHistogramBinCm));
    ++r.histogram.counts[std::min(b, bins - 1)];
  }
  return r;
}

inline ErrorReport error_stats(std::span<const PositionFix> fixes,
                               std::span<const WorldPoint> ground_truths) {
  std::vector<WorldPoint> pos;
  pos.reserve(fixes.size());
  for (const auto& f : fixes) pos.push_back(f.position);
  return error_stats(std::span<const WorldPoint>(pos), ground_truths);
}

struct ReportComparison {
  double mean_ratio = 1.0;  // b / a
  double p90_ratio = 1.0;
  double max_ratio = 1.0;
  double mean_diff = 0.0;  // b - a, cm
  double p90_diff = 0.0;
  double max_diff = 0.0;
};

namespace detail {
inline double ratio(double b, double a) {
  if (a == b) return 1.0;
  return b / a;
}
}  // namespace detail

inline ReportComparison compare_reports(const ErrorReport& a, const ErrorReport& b) {
  if (a.per_trial_errors.empty() || b.per_trial_errors.empty())
    throw Error(ErrorCode::EmptyInput, "cannot compare an empty report");
  return {detail::ratio(b.mean, a.mean), detail::ratio(b.p90, a.p90),
          detail::ratio(b.max, a.max),   b.mean - a.mean,
          b.p90 - a.p90,                 b.max - a.max};
}

/// One-line summary, e.g.
/// "average positioning error is 0.82cm, maximum 1.93cm, 90% within 1.42cm".
inline std::string headline(const ErrorReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "average positioning error is %.2fcm, maximum %.2fcm, 90%% within %.2fcm",
                r.mean, r.max, r.p90);
  return buf;
}

}  // namespace vlp
