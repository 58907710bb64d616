#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace jumprate {

/// Raised when an input violates a documented precondition.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using TimeFunction = std::function<double(double)>;
using StateFunction = std::function<double(double, double)>;

/// Vasicek dynamics d rho = (alpha + beta rho) dt + sigma dW with constant coefficients.
struct ConstantVasicek {
  double alpha = 0.0;
  double beta = -1.0;
  double sigma = 0.0;
};

/// Affine dynamics d rho = (alpha(t) + beta(t) rho) dt + sqrt(gamma(t) + delta(t) rho) dW.
struct TimeDependentAffine {
  TimeFunction alpha;
  TimeFunction beta;
  TimeFunction gamma;
  TimeFunction delta;
};

/// Arbitrary drift mu(t, x) and volatility sigma(t, x).
struct GeneralSde {
  StateFunction drift;
  StateFunction volatility;
};

/// Short-rate dynamics between jump dates.
///
/// The affine kinds expose alpha/beta/gamma/delta; `drift`, `variance` and
/// `volatility` are available for every kind. Volatility evaluation checks
/// gamma(t) + delta(t) x >= 0 and throws outside the admissible region.
class ModelSpec {
 public:
  using Kind = std::variant<ConstantVasicek, TimeDependentAffine, GeneralSde>;

  static ModelSpec vasicek(double alpha, double beta, double sigma);
  static ModelSpec affine(TimeFunction alpha, TimeFunction beta, TimeFunction gamma,
                          TimeFunction delta);
  static ModelSpec general(StateFunction drift, StateFunction volatility);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_affine() const noexcept;
  [[nodiscard]] const ConstantVasicek* as_vasicek() const noexcept;
  /// Throws unless the model is ConstantVasicek.
  [[nodiscard]] const ConstantVasicek& require_vasicek(const char* who) const;

  [[nodiscard]] double alpha(double t) const;
  [[nodiscard]] double beta(double t) const;
  [[nodiscard]] double gamma(double t) const;
  [[nodiscard]] double delta(double t) const;

  [[nodiscard]] double drift(double t, double x) const;
  [[nodiscard]] double variance(double t, double x) const;
  [[nodiscard]] double volatility(double t, double x) const;

 private:
  explicit ModelSpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

struct GaussianJump {
  double mean = 0.0;
  double stdev = 0.0;
};

/// Takes +size with probability prob_up and -size otherwise.
struct TwoPointJump {
  double size = 0.0;
  double prob_up = 0.5;
};

using JumpDistribution = std::variant<GaussianJump, TwoPointJump>;

JumpDistribution gaussian_jump(double mean, double stdev);
JumpDistribution two_point_jump(double size, double prob_up);

/// log E[exp(-xi b)] for the jump size xi. Finite for finite inputs.
double log_mgf_neg(const JumpDistribution& law, double b);

/// Probability mass of xi outside [lo - x, hi - x], maximised over x in [x_min, x_max].
/// Zero for two-point laws whose support lies inside; one when it does not.
double jump_mass_outside(const JumpDistribution& law, double lo, double hi, double x_min,
                         double x_max);

struct RateJump {
  double time = 0.0;
  JumpDistribution law;
};

enum class DateKind { RolloverOnly, RateJumpOnly, Both };

struct RelevantDate {
  double time = 0.0;
  DateKind kind = DateKind::RolloverOnly;
  std::optional<JumpDistribution> law;  // set for RateJumpOnly and Both
};

/// Expected rate-jump dates and roll-over dates merged up to a maturity.
class Timeline {
 public:
  Timeline() = default;

  [[nodiscard]] const std::vector<RateJump>& rate_jumps() const noexcept { return jumps_; }
  [[nodiscard]] const std::vector<double>& rollovers() const noexcept { return rollovers_; }
  [[nodiscard]] double maturity() const noexcept { return maturity_; }
  [[nodiscard]] const std::vector<RelevantDate>& relevant() const noexcept { return relevant_; }

  /// 0 = r_0 < r_1 < ... <= T; consecutive interval endpoints including 0 and T.
  [[nodiscard]] std::vector<double> breakpoints() const;
  [[nodiscard]] double longest_interval() const;
  [[nodiscard]] bool has_common_dates() const;

 private:
  friend Timeline merge_relevant_dates(std::vector<RateJump>, std::vector<double>, double);
  std::vector<RateJump> jumps_;
  std::vector<double> rollovers_;
  double maturity_ = 0.0;
  std::vector<RelevantDate> relevant_;
};

/// Builds the relevant-date list (S union T) within (0, maturity]. Dates after
/// maturity are dropped; a date equal to maturity is retained.
Timeline merge_relevant_dates(std::vector<RateJump> rate_jumps, std::vector<double> rollovers,
                              double maturity);

/// Nodal values of a price function at one time level.
class GridFunction {
 public:
  GridFunction(Eigen::VectorXd xs, Eigen::VectorXd vals);

  [[nodiscard]] const Eigen::VectorXd& xs() const noexcept { return xs_; }
  [[nodiscard]] const Eigen::VectorXd& vals() const noexcept { return vals_; }
  [[nodiscard]] Eigen::VectorXd& vals() noexcept { return vals_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return xs_.size(); }
  [[nodiscard]] bool uniform() const noexcept { return uniform_; }
  /// Spacing; only meaningful when uniform().
  [[nodiscard]] double dx() const noexcept { return dx_; }
  [[nodiscard]] GridFunction with_values(Eigen::VectorXd vals) const;

 private:
  Eigen::VectorXd xs_;
  Eigen::VectorXd vals_;
  double dx_ = 0.0;
  bool uniform_ = false;
};

/// Uniform grid with spacing dx on the lattice dx * Z, covering [lo, hi].
/// Any lattice point inside [lo, hi] (region endpoints in particular) is a node.
Eigen::VectorXd uniform_nodes(double lo, double hi, double dx);

/// Value of the price function just before a relevant date, given its value at the date.
GridFunction apply_jump_condition(const GridFunction& f_after, DateKind kind,
                                  const std::optional<JumpDistribution>& law);

inline GridFunction apply_jump_condition(const GridFunction& f_after, const RelevantDate& date) {
  return apply_jump_condition(f_after, date.kind, date.law);
}

}  // namespace jumprate
