#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qboost/io.hpp"

namespace qboost {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

// Positive class is +1.
ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);

struct PrecisionRecall {
  std::optional<double> precision;  // absent when tp + fp = 0
  std::optional<double> recall;     // absent when tp + fn = 0
};

PrecisionRecall precision_recall(const ConfusionCounts& c);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // ascending recall, one point per recall
};

inline constexpr double kDefaultRecallTarget = 0.83;

// Thresholds spaced evenly from the smallest to the largest margin; a sample
// is predicted positive when margin >= threshold.
PrCurve pr_curve(std::span<const double> margins, std::span<const int> labels, std::size_t n_thresholds);

// Linear interpolation of precision between the points whose recalls bracket
// r_target.
double precision_at_recall(const PrCurve& curve, double r_target = kDefaultRecallTarget);

CsvTable pr_curve_csv(const PrCurve& curve);

}  // namespace qboost
