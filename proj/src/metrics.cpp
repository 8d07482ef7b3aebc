#include "qboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace qboost {

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                                std::to_string(labels.size()) + " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] > 0;
    const bool pos = labels[i] > 0;
    if (pred && pos) ++c.tp;
    else if (pred) ++c.fp;
    else if (pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PrecisionRecall precision_recall(const ConfusionCounts& c) {
  PrecisionRecall pr;
  if (c.tp + c.fp > 0) pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return pr;
}

PrCurve pr_curve(std::span<const double> margins, std::span<const int> labels, std::size_t n_thresholds) {
  if (margins.size() != labels.size()) throw std::invalid_argument("pr_curve: margins and labels differ in length");
  if (n_thresholds < 2) throw std::invalid_argument("pr_curve: need at least two thresholds");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y > 0;
  if (n_pos == 0 || n_pos == labels.size()) throw std::invalid_argument("pr_curve: labels contain a single class");

  // Sort once; each threshold then becomes a binary search.
  std::vector<std::pair<double, int>> order;
  order.reserve(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) order.emplace_back(margins[i], labels[i] > 0 ? 1 : 0);
  std::sort(order.begin(), order.end());
  // suffix_pos[k] = positives among order[k..]
  std::vector<std::size_t> suffix_pos(order.size() + 1, 0);
  for (std::size_t k = order.size(); k-- > 0;) suffix_pos[k] = suffix_pos[k + 1] + order[k].second;

  const double lo = order.front().first;
  const double hi = order.back().first;
  std::map<double, PrPoint> by_recall;
  for (std::size_t t = 0; t < n_thresholds; ++t) {
    const double f = static_cast<double>(t) / static_cast<double>(n_thresholds - 1);
    const double thr = t + 1 == n_thresholds ? hi : lo + (hi - lo) * f;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(order.begin(), order.end(), std::make_pair(thr, 0)) - order.begin());
    const std::size_t predicted = order.size() - first;
    if (predicted == 0) continue;  // precision undefined
    const std::size_t tp = suffix_pos[first];
    PrPoint p{thr, static_cast<double>(tp) / static_cast<double>(predicted),
              static_cast<double>(tp) / static_cast<double>(n_pos)};
    auto [it, inserted] = by_recall.emplace(p.recall, p);
    if (!inserted && p.precision > it->second.precision) it->second = p;
  }
  PrCurve curve;
  for (const auto& [r, p] : by_recall) curve.points.push_back(p);
  return curve;
}

double precision_at_recall(const PrCurve& curve, double r_target) {
  const auto& pts = curve.points;
  if (pts.empty()) throw std::invalid_argument("precision_at_recall: empty curve");
  if (r_target < pts.front().recall || r_target > pts.back().recall) {
    throw std::out_of_range("precision_at_recall: recall " + format_double(r_target) + " outside the curve span [" +
                            format_double(pts.front().recall) + ", " + format_double(pts.back().recall) + "]");
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].recall == r_target) return pts[k].precision;
    if (pts[k].recall > r_target) {
      const auto& a = pts[k - 1];
      const auto& b = pts[k];
      const double f = (r_target - a.recall) / (b.recall - a.recall);
      return a.precision + f * (b.precision - a.precision);
    }
  }
  return pts.back().precision;
}

CsvTable pr_curve_csv(const PrCurve& curve) {
  CsvTable t;
  t.header = {"threshold", "precision", "recall"};
  for (const auto& p : curve.points) {
    t.rows.push_back({format_double(p.threshold), format_double(p.precision), format_double(p.recall)});
  }
  return t;
}

}  // namespace qboost
