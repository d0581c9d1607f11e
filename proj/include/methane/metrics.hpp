#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "methane/types.hpp"

namespace methane {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct SegmentationScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ConfusionCounts confusion(const PlumeMask& pred, const PlumeMask& gt);

// Zero-denominator conventions: precision 0 without predictions, recall 0
// without positives, f1 0 when both are 0.
SegmentationScores scores(const ConfusionCounts& counts);
SegmentationScores segmentation_metrics(const PlumeMask& pred, const PlumeMask& gt);

// (recall, precision) at every distinct map value used as an inclusive
// threshold, from the highest value down; recall is nondecreasing.
struct PrCurve {
  std::vector<std::pair<double, double>> points;
};

PrCurve pr_curve(const EnhancementMap& map, const PlumeMask& gt);

// Average precision: sum over curve points of (R_i - R_{i-1}) * P_i, R_0 = 0.
// Throws UndefinedMetricError when gt has no positives.
double auprc(const EnhancementMap& map, const PlumeMask& gt);

enum class PlumeStratum { kEmpty, kWeak, kStrong };
std::string_view to_string(PlumeStratum s);

inline constexpr std::size_t kDefaultMinStrongPixels = 1000;

PlumeStratum stratify(const PlumeMask& gt, std::size_t min_strong_pixels = kDefaultMinStrongPixels);

// Pearson correlation of two equally sized value arrays; 0 if either is constant.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace methane
