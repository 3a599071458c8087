#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/stats.hpp"

namespace coe::stats {

MeanCi mean_ci(std::span<const double> values, double confidence) {
  if (values.size() < 2) throw InputError("mean_ci needs at least two values");
  if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("confidence must be in (0,1)");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
  const double half = t * sd / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

std::string format_mean_ci(const MeanCi& ci, double confidence) {
  return fmt::format("{:.2f} ({:g}% CI: {:.2f}\u2014{:.2f})", ci.mean, confidence * 100.0, ci.lower,
                     ci.upper);
}

}  // namespace coe::stats
