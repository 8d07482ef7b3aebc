#include "qboost/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qboost {

GapSeries gap_convergence(std::span<const SolveTrace> traces, std::span<const double> reference_costs) {
  if (traces.empty()) throw std::invalid_argument("gap_convergence: no traces");
  if (traces.size() != reference_costs.size()) {
    throw std::invalid_argument("gap_convergence: one reference cost per trace required");
  }
  std::size_t len = traces.front().size();
  GapSeries s;
  for (const auto& t : traces) {
    if (t.size() != len) s.truncated = true;
    len = std::min(len, t.size());
  }
  const double inf = std::numeric_limits<double>::infinity();
  const auto k = static_cast<double>(traces.size());
  s.mean.assign(len, 0.0);
  s.stddev.assign(len, 0.0);
  std::vector<std::vector<double>> gaps(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto best = traces[i].best_costs();
    gaps[i].resize(len);
    for (std::size_t c = 0; c < len; ++c) gaps[i][c] = best[c] ? gap_from_costs(*best[c], reference_costs[i]) : inf;
  }
  for (std::size_t c = 0; c < len; ++c) {
    double m = 0.0;
    for (const auto& g : gaps) m += g[c];
    m /= k;
    s.mean[c] = m;
    if (traces.size() > 1 && std::isfinite(m)) {
      double v = 0.0;
      for (const auto& g : gaps) v += (g[c] - m) * (g[c] - m);
      s.stddev[c] = std::sqrt(v / (k - 1.0));
    } else if (!std::isfinite(m)) {
      s.stddev[c] = inf;
    }
  }
  return s;
}

std::optional<std::size_t> cycles_to_gap(std::span<const double> best_gaps, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("cycles_to_gap: threshold must be positive");
  for (std::size_t c = 0; c < best_gaps.size(); ++c) {
    if (best_gaps[c] < threshold) return c + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> cycles_to_gap(const SolveTrace& trace, double reference_cost, double threshold) {
  std::vector<double> g;
  g.reserve(trace.size());
  for (const auto& b : trace.best_costs()) {
    g.push_back(b ? gap_from_costs(*b, reference_cost) : std::numeric_limits<double>::infinity());
  }
  return cycles_to_gap(g, threshold);
}

std::string to_string(ScalingModel m) { return m == ScalingModel::power_law ? "power_law" : "exponential"; }

namespace {

struct Line {
  double intercept;
  double slope;
  double r2;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_scaling: all N values are equal");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + slope * (x[i] - mx));
    ss_res += r * r;
  }
  const double r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return {my - slope * mx, slope, r2};
}

}  // namespace

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_scaling: at least three points required");
  std::vector<std::pair<double, double>> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  std::vector<double> logn, n, logc;
  for (const auto& [x, c] : pts) {
    if (!(x > 0.0) || !(c > 0.0) || !std::isfinite(x) || !std::isfinite(c)) {
      throw std::invalid_argument("fit_scaling: N and cycles must be positive and finite");
    }
    logn.push_back(std::log(x));
    n.push_back(x);
    logc.push_back(std::log(c));
  }
  const auto pw = least_squares(logn, logc);
  const auto ex = least_squares(n, logc);
  ScalingFit f;
  f.points = pts;
  if (pw.r2 >= ex.r2) {
    f.model = ScalingModel::power_law;
    f.a = std::exp(pw.intercept);
    f.b = pw.slope;
    f.r_squared = pw.r2;
    f.other_r_squared = ex.r2;
  } else {
    f.model = ScalingModel::exponential;
    f.a = std::exp(ex.intercept);
    f.b = ex.slope;
    f.r_squared = ex.r2;
    f.other_r_squared = pw.r2;
  }
  return f;
}

namespace {

// Depth-first count of bitstrings with cost below `limit`, fixing variables in
// index order. A subtree is pruned when a lower bound on its best completion
// reaches the limit: each free variable contributes at least
// min(0, field_i + sum of its negative couplings to other free variables).
struct NearOptimalCounter {
  const QuboMatrix& q;
  double limit;
  std::size_t n;
  std::vector<std::vector<double>> neg_tail;  // neg_tail[d][i]: sum_{j>=d, j!=i} min(0, Q_ij)
  std::uint64_t hits = 0;
  double seen_min = std::numeric_limits<double>::infinity();

  NearOptimalCounter(const QuboMatrix& qm, double lim) : q(qm), limit(lim), n(qm.size()) {
    neg_tail.assign(n + 1, std::vector<double>(n, 0.0));
    for (std::size_t d = n; d-- > 0;) {
      for (std::size_t i = 0; i < n; ++i) {
        neg_tail[d][i] = neg_tail[d + 1][i] + (d != i ? std::min(0.0, q(i, d)) : 0.0);
      }
    }
  }

  // field[i] = Q_ii + 2 sum_{j fixed to 1} Q_ij for the free variables i >= depth.
  void visit(std::size_t depth, double partial, std::vector<double>& field) {
    if (depth == n) {
      if (partial < limit) ++hits;
      seen_min = std::min(seen_min, partial);
      return;
    }
    double bound = partial;
    for (std::size_t i = depth; i < n; ++i) bound += std::min(0.0, field[i] + neg_tail[depth][i]);
    if (bound >= limit) return;

    visit(depth + 1, partial, field);
    const double fd = field[depth];
    for (std::size_t i = depth + 1; i < n; ++i) field[i] += 2.0 * q(depth, i);
    visit(depth + 1, partial + fd, field);
    for (std::size_t i = depth + 1; i < n; ++i) field[i] -= 2.0 * q(depth, i);
  }
};

}  // namespace

double uniform_expected_cycles(const QuboMatrix& q, double reference_cost, double threshold, std::size_t cap) {
  if (reference_cost == 0.0) throw std::invalid_argument("uniform_expected_cycles: reference cost is zero");
  if (q.size() == 0 || q.size() > cap || q.size() > 62) {
    throw std::invalid_argument("uniform_expected_cycles: N must lie in [1, " + std::to_string(std::min<std::size_t>(cap, 62)) +
                                "]");
  }
  NearOptimalCounter counter(q, reference_cost + threshold * std::abs(reference_cost));
  std::vector<double> field(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) field[i] = q(i, i);
  counter.visit(0, 0.0, field);
  if (counter.seen_min < reference_cost - 1e-9 * std::abs(reference_cost)) {
    // The reference was not optimal: recount against the true minimum.
    return uniform_expected_cycles(q, counter.seen_min, threshold, cap);
  }
  const double total = std::ldexp(1.0, static_cast<int>(q.size()));
  return total / static_cast<double>(counter.hits);
}

std::vector<double> rank_fractions(const QuboMatrix& q, std::span<const double> costs) {
  std::vector<double> all;
  all.reserve(std::size_t{1} << q.size());
  for_each_cost(q, kBruteForceCap, [&](std::uint64_t, double c) { all.push_back(c); });
  std::sort(all.begin(), all.end());
  const double tol = 1e-9 * (1.0 + q.max_abs_entry());
  std::vector<double> out;
  for (double c : costs) {
    const auto below = std::lower_bound(all.begin(), all.end(), c - tol) - all.begin();
    out.push_back(static_cast<double>(below) / static_cast<double>(all.size()));
  }
  return out;
}

CsvTable gap_series_csv(const GapSeries& s) {
  CsvTable t;
  t.header = {"cycle", "mean_gap", "std_gap"};
  for (std::size_t c = 0; c < s.mean.size(); ++c) {
    t.rows.push_back({std::to_string(c + 1), format_double(s.mean[c]), format_double(s.stddev[c])});
  }
  return t;
}

void to_json(Json& j, const ScalingFit& f) {
  Json pts = Json::array();
  for (const auto& [n, c] : f.points) pts.push_back({n, c});
  j = Json{{"model", to_string(f.model)}, {"a", f.a}, {"b", f.b}, {"r_squared", f.r_squared},
           {"other_r_squared", f.other_r_squared}, {"points", pts}};
}

}  // namespace qboost
