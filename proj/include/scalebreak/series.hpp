#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scalebreak {

/// Ordered sequence of finite observations.
///
/// Construction rejects NaN and infinities. An empty series is representable
/// (samplers return one for n = 0) but every statistic below rejects it.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Observations [begin, end) as a new series (0-based, half open).
  TimeSeries slice(std::size_t begin, std::size_t end) const;

  const std::vector<double>& data() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

enum class StatKind { V, C };

/// Running sum of per-observation terms. `values[j]` holds the sum over the
/// first j + 1 observations.
struct CumulativeStat {
  StatKind kind = StatKind::V;
  std::vector<double> values;
  double center = 0.0;  // median for V, 0 for C
};

double median(std::span<const double> xs);
double median(const TimeSeries& series);

/// V_j = sum_{i<=j} |X_i - median(X)| with the median taken over the whole series.
CumulativeStat v_statistics(const TimeSeries& series);

/// C_j = sum_{i<=j} X_i^2.
CumulativeStat c_statistics(const TimeSeries& series);

}  // namespace scalebreak
