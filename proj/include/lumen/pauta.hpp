#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lumen {

struct PautaResult {
  std::vector<double> kept;
  double mean{0.0};
  std::size_t removed{0};
  // The 3-sigma pass would have discarded everything; all samples were kept.
  bool kept_all_fallback{false};
};

/// One pass of the 3-sigma (Pauta) rule using the population standard
/// deviation of the whole input. Inputs shorter than `min_samples` pass
/// through untouched. Throws std::invalid_argument on empty input.
PautaResult pauta_filter(std::span<const double> samples, std::size_t min_samples = 3);

}  // namespace lumen
