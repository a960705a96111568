#include <cmath>

#include <fmt/format.h>

#include "gammabench/errors.hpp"
#include "gammabench/model/gamma.hpp"

namespace gammabench::model {

std::size_t usage_bin(double sample, double bin_width) {
  return static_cast<std::size_t>(std::floor(sample / bin_width + 1e-9));
}

UsageHistogram analyze_usage_histogram(const std::vector<double>& samples, double bin_width) {
  if (samples.empty()) throw NoDataError("no usage samples to analyse");
  if (!(bin_width > 0.0) || bin_width > 1.0) {
    throw OutOfRangeError(fmt::format("bin width {} outside (0, 1]", bin_width));
  }
  UsageHistogram h;
  h.bin_width = bin_width;
  h.counts.assign(usage_bin(1.0, bin_width) + 1, 0);
  double sum = 0.0;
  for (double s : samples) {
    if (!(s >= 0.0) || s > 1.0) throw OutOfRangeError(fmt::format("usage sample {} outside [0, 1]", s));
    ++h.counts[usage_bin(s, bin_width)];
    sum += s;
  }
  h.mean = sum / static_cast<double>(samples.size());
  h.gamma = h.mean >= 1.0 ? kSaturated : h.mean / (1.0 - h.mean);
  return h;
}

}  // namespace gammabench::model
