#include "lumen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "lumen/io.hpp"

namespace lumen::eval {

using json = nlohmann::ordered_json;

namespace {

constexpr double kReportedPercentiles[] = {50.0, 90.0, 95.0, 100.0};

double mean_of(const std::vector<LedError>& errors, double LedError::*field) {
  double sum = 0.0;
  for (const auto& e : errors) {
    sum += e.*field;
  }
  return sum / static_cast<double>(errors.size());
}

}  // namespace

double percentile(std::span<const double> sorted, double percent) {
  if (sorted.empty()) {
    throw std::invalid_argument("percentile of an empty set");
  }
  if (!(percent > 0.0) || percent > 100.0) {
    throw std::invalid_argument("percentile must be in (0, 100]");
  }
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  std::vector<CdfPoint> out;
  out.reserve(errors.size());
  const auto n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out.push_back({errors[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

EvaluationReport summarize(std::vector<LedError> errors) {
  if (errors.empty()) {
    throw std::invalid_argument("nothing to evaluate: no map entries");
  }
  EvaluationReport report;
  report.mean_planar = mean_of(errors, &LedError::planar);
  report.mean_height = mean_of(errors, &LedError::height);
  report.mean_3d = mean_of(errors, &LedError::error_3d);

  std::vector<double> e3;
  e3.reserve(errors.size());
  for (const auto& e : errors) {
    e3.push_back(e.error_3d);
  }
  report.cdf = empirical_cdf(e3);
  std::sort(e3.begin(), e3.end());
  for (double p : kReportedPercentiles) {
    report.percentiles.push_back({p, percentile(e3, p)});
  }
  report.per_led = std::move(errors);
  return report;
}

EvaluationReport evaluate(std::span<const LedMapEntry> map,
                          std::span<const GroundTruthLed> truth) {
  std::map<std::string, const GroundTruthLed*> by_key;
  for (const auto& t : truth) {
    by_key.emplace(t.led, &t);
  }
  std::vector<LedError> errors;
  std::map<std::string, bool> mapped;
  for (const auto& entry : map) {
    const auto it = by_key.find(entry.led);
    if (it == by_key.end()) {
      throw std::invalid_argument("map LED '" + entry.led + "' is missing from ground truth");
    }
    const GroundTruthLed& t = *it->second;
    LedError e;
    e.led = entry.led;
    e.planar = std::hypot(entry.x_hat - t.x, entry.y_hat - t.y);
    e.height = std::abs(entry.height - t.h);
    e.error_3d = std::hypot(e.planar, e.height);
    errors.push_back(std::move(e));
    mapped[entry.led] = true;
  }
  EvaluationReport report = summarize(std::move(errors));
  for (const auto& [key, led] : by_key) {
    if (!mapped.contains(key)) {
      report.unmapped.push_back(key);
    }
  }
  return report;
}

void write_report(std::ostream& out, const EvaluationReport& report) {
  json leds = json::array();
  for (const auto& e : report.per_led) {
    leds.push_back(json{{"led", e.led},
                        {"planar_error_m", e.planar},
                        {"height_error_m", e.height},
                        {"error_3d_m", e.error_3d}});
  }
  json pct = json::array();
  for (const auto& p : report.percentiles) {
    pct.push_back(json{{"percent", p.percent}, {"error_m", p.error_m}});
  }
  json cdf = json::array();
  for (const auto& c : report.cdf) {
    cdf.push_back(json{{"error_m", c.error_m}, {"cdf", c.cdf}});
  }
  const json j{{"leds", leds},
               {"mean_planar_error_m", report.mean_planar},
               {"mean_height_error_m", report.mean_height},
               {"mean_3d_error_m", report.mean_3d},
               {"percentiles", pct},
               {"cdf", cdf},
               {"unmapped", report.unmapped}};
  out << j.dump(2) << '\n';
}

EvaluationReport read_report(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
    EvaluationReport r;
    for (const auto& e : j.at("leds")) {
      r.per_led.push_back({e.at("led").get<std::string>(), e.at("planar_error_m").get<double>(),
                           e.at("height_error_m").get<double>(),
                           e.at("error_3d_m").get<double>()});
    }
    r.mean_planar = j.at("mean_planar_error_m").get<double>();
    r.mean_height = j.at("mean_height_error_m").get<double>();
    r.mean_3d = j.at("mean_3d_error_m").get<double>();
    for (const auto& p : j.at("percentiles")) {
      r.percentiles.push_back({p.at("percent").get<double>(), p.at("error_m").get<double>()});
    }
    for (const auto& c : j.at("cdf")) {
      r.cdf.push_back({c.at("error_m").get<double>(), c.at("cdf").get<double>()});
    }
    r.unmapped = j.value("unmapped", std::vector<std::string>{});
    return r;
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("malformed evaluation report: ") + e.what());
  }
}

void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf) {
  out << "error_m,cdf\n";
  for (const auto& c : cdf) {
    out << json(c.error_m).dump() << ',' << json(c.cdf).dump() << '\n';
  }
}

}  // namespace lumen::eval
