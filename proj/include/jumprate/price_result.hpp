#pragma once

#include "jumprate/localization.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace jumprate {

using Payoff = std::function<double(double)>;

/// Grid values at one time level of a backward sweep. At a relevant date the
/// snapshot holds the value at the date, before the jump condition is applied.
struct Snapshot {
  double time = 0.0;
  Eigen::VectorXd values;
};

struct PriceResult {
  std::string method;
  Eigen::VectorXd xs;
  Eigen::VectorXd values;  // at t = 0
  std::vector<Snapshot> snapshots;
  DomainCertificate domain;
  double dx = 0.0;
  double dt = 0.0;
  double theta = 0.0;
  long time_steps = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Reference values on a grid at a given time.
using ReferenceSurface = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& xs)>;

struct ErrorSummary {
  double abs = 0.0;  // max over snapshots of mean |v - ref| over the region
  double rel = 0.0;  // max over snapshots of mean |v - ref| / |ref| over the region
  double worst_time = 0.0;
  long snapshots = 0;
};

/// Indices of xs inside [lo, hi], with a 1e-9 tolerance at the ends.
std::vector<Eigen::Index> region_indices(const Eigen::VectorXd& xs, double lo, double hi);

/// The max-in-time mean-in-x error of every stored snapshot (and of the t = 0
/// values when no snapshot is stored at t = 0) against a reference surface.
ErrorSummary max_mean_error(const PriceResult& result, const ReferenceSurface& reference,
                            double lo, double hi);

/// Same metric between two results on a common grid; snapshots are matched by
/// time within 1e-9. Throws when the grids differ.
ErrorSummary max_mean_error(const PriceResult& result, const PriceResult& reference, double lo,
                            double hi);

/// Error of the t = 0 values only.
ErrorSummary initial_error(const PriceResult& result, const PriceResult& reference, double lo,
                           double hi);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace jumprate
