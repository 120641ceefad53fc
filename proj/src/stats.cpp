#include "csrpe/stats.hpp"

#include "csrpe/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace csrpe {

MeanSte mean_ste(std::span<const double> values) {
  if (values.empty()) throw Error("mean_ste of an empty series");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  MeanSte r;
  r.mean = sum / n;
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.ste = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::win:
      return "win";
    case Verdict::loss:
      return "loss";
    default:
      return "tie";
  }
}

double t_critical_05(int df) {
  static constexpr std::array<double, 30> table{
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) throw Error("t-test needs at least one degree of freedom");
  return table[static_cast<std::size_t>(std::min(df, 30) - 1)];
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                          Better direction, double alpha) {
  if (a.size() != b.size()) throw DimensionError("paired_t_test: series lengths differ");
  if (a.size() < 2) throw Error("paired_t_test needs at least 2 paired runs");
  if (alpha != 0.05) throw Error("paired_t_test: only alpha = 0.05 is tabulated");

  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = direction == Better::higher ? a[i] - b[i] : b[i] - a[i];
  }
  const MeanSte ms = mean_ste(d);
  TTestResult r;
  r.df = static_cast<int>(n) - 1;
  if (ms.ste == 0.0) {
    r.verdict = ms.mean == 0.0 ? Verdict::tie : (ms.mean > 0.0 ? Verdict::win : Verdict::loss);
    return r;
  }
  r.t = ms.mean / ms.ste;
  if (std::abs(r.t) <= t_critical_05(r.df)) {
    r.verdict = Verdict::tie;
  } else {
    r.verdict = ms.mean > 0.0 ? Verdict::win : Verdict::loss;
  }
  return r;
}

double curve_auc(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw Error("curve_auc needs at least 2 points");
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dt = points[i].first - points[i - 1].first;
    if (!(dt > 0.0)) throw Error("curve_auc: t must be strictly increasing");
    area += 0.5 * dt * (points[i].second + points[i - 1].second);
  }
  return area / (points.back().first - points.front().first);
}

}  // namespace csrpe
