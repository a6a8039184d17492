#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lumen/mapper.hpp"
#include "lumen/records.hpp"

namespace lumen::eval {

struct LedError {
  std::string led;
  double planar{0.0};  // meters
  double height{0.0};  // |H_hat - H|, meters
  double error_3d{0.0};

  bool operator==(const LedError&) const = default;
};

struct PercentileRow {
  double percent{0.0};
  double error_m{0.0};

  bool operator==(const PercentileRow&) const = default;
};

struct CdfPoint {
  double error_m{0.0};
  double cdf{0.0};

  bool operator==(const CdfPoint&) const = default;
};

struct EvaluationReport {
  std::vector<LedError> per_led;
  double mean_planar{0.0};
  double mean_height{0.0};
  double mean_3d{0.0};
  std::vector<PercentileRow> percentiles;
  std::vector<CdfPoint> cdf;  // one point per entry, ascending
  // Ground-truth LEDs that have no map entry.
  std::vector<std::string> unmapped;

  bool operator==(const EvaluationReport&) const = default;
};

/// Nearest-rank percentile over ascending `sorted` values (percent in (0, 100]).
double percentile(std::span<const double> sorted, double percent);

/// Empirical CDF of the 3-D errors: the i-th smallest error maps to i / n.
std::vector<CdfPoint> empirical_cdf(std::vector<double> errors);

/// Aggregates a set of per-LED errors (possibly pooled across runs).
EvaluationReport summarize(std::vector<LedError> errors);

/// Compares map entries against ground truth. Throws std::invalid_argument when
/// the map is empty or an entry has no ground-truth counterpart.
EvaluationReport evaluate(std::span<const LedMapEntry> map,
                          std::span<const GroundTruthLed> truth);

void write_report(std::ostream& out, const EvaluationReport& report);
EvaluationReport read_report(std::istream& in);

/// Two-column CSV `error_m,cdf`, ascending.
void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf);

}  // namespace lumen::eval
