#include "lumen/pauta.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lumen {

namespace {

double mean_of(std::span<const double> s) {
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

}  // namespace

PautaResult pauta_filter(std::span<const double> samples, std::size_t min_samples) {
  if (samples.empty()) {
    throw std::invalid_argument("pauta_filter: empty sample set");
  }
  PautaResult result;
  const double mean = mean_of(samples);
  if (samples.size() < min_samples) {
    result.kept.assign(samples.begin(), samples.end());
    result.mean = mean;
    return result;
  }

  double sq = 0.0;
  for (double s : samples) {
    sq += (s - mean) * (s - mean);
  }
  const double bound = 3.0 * std::sqrt(sq / static_cast<double>(samples.size()));

  for (double s : samples) {
    if (std::abs(s - mean) <= bound) {
      result.kept.push_back(s);
    }
  }
  if (result.kept.empty()) {
    result.kept.assign(samples.begin(), samples.end());
    result.kept_all_fallback = true;
    result.mean = mean;
    return result;
  }
  result.removed = samples.size() - result.kept.size();
  result.mean = result.removed == 0 ? mean : mean_of(result.kept);
  return result;
}

}  // namespace lumen
