#include "methane/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "methane/error.hpp"

namespace methane {
namespace {

void require_same_shape(std::size_t h1, std::size_t w1, std::size_t h2, std::size_t w2) {
  if (h1 != h2 || w1 != w2) throw ValidationError("prediction and ground truth shapes differ");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionCounts confusion(const PlumeMask& pred, const PlumeMask& gt) {
  require_same_shape(pred.height, pred.width, gt.height, gt.width);
  ConfusionCounts c;
  for (std::size_t i = 0; i < gt.values.size(); ++i) {
    const bool p = pred.values[i] != 0;
    const bool g = gt.values[i] != 0;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

SegmentationScores scores(const ConfusionCounts& c) {
  SegmentationScores s;
  s.precision = ratio(c.tp, c.tp + c.fp);
  s.recall = ratio(c.tp, c.tp + c.fn);
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

SegmentationScores segmentation_metrics(const PlumeMask& pred, const PlumeMask& gt) {
  return scores(confusion(pred, gt));
}

PrCurve pr_curve(const EnhancementMap& map, const PlumeMask& gt) {
  require_same_shape(map.height, map.width, gt.height, gt.width);
  const std::size_t n = gt.values.size();
  const std::size_t positives = gt.count();
  if (positives == 0) throw UndefinedMetricError("precision-recall is undefined without positive pixels");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return map.values[a] > map.values[b]; });
  PrCurve curve;
  std::size_t tp = 0;
  std::size_t taken = 0;
  for (std::size_t i = 0; i < n;) {
    const double v = map.values[order[i]];
    // Consume every pixel tied at this threshold.
    while (i < n && map.values[order[i]] == v) {
      tp += gt.values[order[i]] != 0 ? 1 : 0;
      ++taken;
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(tp) / static_cast<double>(positives),
                              static_cast<double>(tp) / static_cast<double>(taken));
  }
  return curve;
}

double auprc(const EnhancementMap& map, const PlumeMask& gt) {
  const auto curve = pr_curve(map, gt);
  double area = 0.0;
  double prev_recall = 0.0;
  for (const auto& [recall, precision] : curve.points) {
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

std::string_view to_string(PlumeStratum s) {
  switch (s) {
    case PlumeStratum::kEmpty: return "empty";
    case PlumeStratum::kWeak: return "weak";
    case PlumeStratum::kStrong: return "strong";
  }
  return "";
}

PlumeStratum stratify(const PlumeMask& gt, std::size_t min_strong_pixels) {
  const std::size_t n = gt.count();
  if (n == 0) return PlumeStratum::kEmpty;
  return n >= min_strong_pixels ? PlumeStratum::kStrong : PlumeStratum::kWeak;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw ValidationError("correlation needs two equally sized, non-empty arrays");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace methane
