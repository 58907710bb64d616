#include "jumprate/price_result.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jumprate {

namespace {

struct Level {
  double time;
  const Eigen::VectorXd* values;
};

std::vector<Level> levels(const PriceResult& r) {
  std::vector<Level> out;
  bool has_zero = false;
  for (const Snapshot& s : r.snapshots) {
    out.push_back({s.time, &s.values});
    if (std::abs(s.time) < 1e-9) has_zero = true;
  }
  if (!has_zero) out.push_back({0.0, &r.values});
  return out;
}

void accumulate(ErrorSummary& e, double t, const Eigen::VectorXd& v, const Eigen::VectorXd& ref,
                const std::vector<Eigen::Index>& idx) {
  double sa = 0.0;
  double sr = 0.0;
  for (Eigen::Index i : idx) {
    const double d = std::abs(v[i] - ref[i]);
    sa += d;
    sr += ref[i] != 0.0 ? d / std::abs(ref[i]) : (d == 0.0 ? 0.0 : INFINITY);
  }
  const double n = static_cast<double>(idx.size());
  if (sa / n > e.abs) {
    e.abs = sa / n;
    e.worst_time = t;
  }
  e.rel = std::max(e.rel, sr / n);
  ++e.snapshots;
}

void require_same_grid(const PriceResult& a, const PriceResult& b) {
  if (a.xs.size() != b.xs.size() || (a.xs - b.xs).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("error metric: results are on different grids");
  }
}

std::vector<Eigen::Index> nonempty_region(const Eigen::VectorXd& xs, double lo, double hi) {
  auto idx = region_indices(xs, lo, hi);
  if (idx.empty()) throw std::invalid_argument("error metric: no grid node inside the region");
  return idx;
}

}  // namespace

std::vector<Eigen::Index> region_indices(const Eigen::VectorXd& xs, double lo, double hi) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (xs[i] >= lo - 1e-9 && xs[i] <= hi + 1e-9) idx.push_back(i);
  }
  return idx;
}

ErrorSummary max_mean_error(const PriceResult& result, const ReferenceSurface& reference,
                            double lo, double hi) {
  const auto idx = nonempty_region(result.xs, lo, hi);
  ErrorSummary e;
  for (const Level& l : levels(result)) {
    accumulate(e, l.time, *l.values, reference(l.time, result.xs), idx);
  }
  return e;
}

ErrorSummary max_mean_error(const PriceResult& result, const PriceResult& reference, double lo,
                            double hi) {
  require_same_grid(result, reference);
  const auto idx = nonempty_region(result.xs, lo, hi);
  const auto ref_levels = levels(reference);
  ErrorSummary e;
  for (const Level& l : levels(result)) {
    for (const Level& r : ref_levels) {
      if (std::abs(r.time - l.time) < 1e-9) {
        accumulate(e, l.time, *l.values, *r.values, idx);
        break;
      }
    }
  }
  if (e.snapshots == 0) throw std::invalid_argument("error metric: no common snapshot times");
  return e;
}

ErrorSummary initial_error(const PriceResult& result, const PriceResult& reference, double lo,
                           double hi) {
  require_same_grid(result, reference);
  ErrorSummary e;
  accumulate(e, 0.0, result.values, reference.values, nonempty_region(result.xs, lo, hi));
  return e;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two matching points");
  }
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::VectorXd lx(n);
  Eigen::VectorXd ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(h[i] > 0.0 && err[i] > 0.0)) throw std::invalid_argument("loglog_slope: non-positive input");
    lx[i] = std::log(h[i]);
    ly[i] = std::log(err[i]);
  }
  const Eigen::VectorXd cx = lx.array() - lx.mean();
  const Eigen::VectorXd cy = ly.array() - ly.mean();
  return cx.dot(cy) / cx.squaredNorm();
}

}  // namespace jumprate
