#include "scalebreak/series.hpp"

#include <algorithm>
#include <cmath>

#include "scalebreak/errors.hpp"

namespace scalebreak {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("non-finite observation at index " + std::to_string(i));
    }
  }
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > values_.size()) {
    throw InvalidInput("slice out of range");
  }
  return TimeSeries(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        values_.begin() + static_cast<std::ptrdiff_t>(end)));
}

double median(std::span<const double> xs) {
  if (xs.empty()) {
    throw InvalidInput("median of an empty series");
  }
  std::vector<double> work(xs.begin(), xs.end());
  const std::size_t n = work.size();
  const auto mid = work.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(work.begin(), mid, work.end());
  const double upper = *mid;
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(work.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

double median(const TimeSeries& series) { return median(series.values()); }

namespace {

template <typename Term>
std::vector<double> accumulate(std::span<const double> xs, Term term) {
  std::vector<double> out(xs.size());
  long double sum = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += static_cast<long double>(term(xs[i]));
    out[i] = static_cast<double>(sum);
  }
  return out;
}

}  // namespace

CumulativeStat v_statistics(const TimeSeries& series) {
  if (series.empty()) {
    throw InvalidInput("V statistic of an empty series");
  }
  const double center = median(series);
  return {StatKind::V,
          accumulate(series.values(), [center](double x) { return std::fabs(x - center); }),
          center};
}

CumulativeStat c_statistics(const TimeSeries& series) {
  if (series.empty()) {
    throw InvalidInput("C statistic of an empty series");
  }
  return {StatKind::C, accumulate(series.values(), [](double x) { return x * x; }), 0.0};
}

}  // namespace scalebreak
