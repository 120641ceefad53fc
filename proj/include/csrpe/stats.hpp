#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csrpe {

/// Per-run values of one criterion for one algorithm.
struct RunSeries {
  std::string algorithm;
  std::string criterion;
  std::vector<double> values;
};

struct MeanSte {
  double mean = 0.0;
  double ste = 0.0;  // sample sd / sqrt(n); 0 for a single value
};

MeanSte mean_ste(std::span<const double> values);
inline MeanSte mean_ste(const RunSeries& s) { return mean_ste(s.values); }

enum class Better { higher, lower };
enum class Verdict { win, tie, loss };

std::string to_string(Verdict v);

/// Two-sided critical value of Student's t at alpha = 0.05; df above 30 uses
/// the df = 30 entry.
double t_critical_05(int df);

struct TTestResult {
  Verdict verdict = Verdict::tie;
  double t = 0.0;  // 0 when the differences have zero variance
  int df = 0;
};

/// Paired two-sided t-test of a against b, verdict from a's point of view.
/// Only alpha = 0.05 is tabulated.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                          Better direction, double alpha = 0.05);

/// Trapezoidal area under (t, value) points divided by the t range.
double curve_auc(std::span<const std::pair<double, double>> points);

}  // namespace csrpe
