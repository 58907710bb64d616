#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace jumprate {

/// sub[i] multiplies x[i-1], sup[i] multiplies x[i+1]; sub[0] and sup[n-1] are unused.
template <typename Scalar>
struct TridiagonalSystem {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector sub;
  Vector diag;
  Vector sup;
  Vector rhs;

  explicit TridiagonalSystem(Eigen::Index n = 0)
      : sub(Vector::Zero(n)), diag(Vector::Zero(n)), sup(Vector::Zero(n)), rhs(Vector::Zero(n)) {}

  [[nodiscard]] Eigen::Index size() const noexcept { return diag.size(); }

  /// A * x for the assembled matrix.
  [[nodiscard]] Vector apply(const Vector& x) const {
    const Eigen::Index n = size();
    Vector y = diag.cwiseProduct(x);
    if (n > 1) {
      y.tail(n - 1) += sub.tail(n - 1).cwiseProduct(x.head(n - 1));
      y.head(n - 1) += sup.head(n - 1).cwiseProduct(x.tail(n - 1));
    }
    return y;
  }
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Forward elimination and back substitution without pivoting.
template <typename Scalar>
typename TridiagonalSystem<Scalar>::Vector solve_tridiagonal(const TridiagonalSystem<Scalar>& sys) {
  using Vector = typename TridiagonalSystem<Scalar>::Vector;
  const Eigen::Index n = sys.size();
  if (sys.sub.size() != n || sys.sup.size() != n || sys.rhs.size() != n) {
    throw std::invalid_argument("tridiagonal: inconsistent lengths");
  }
  if (n == 0) return Vector();

  Vector c(n);
  Vector d(n);
  Scalar pivot = sys.diag[0];
  if (pivot == Scalar(0)) throw SingularSystemError("tridiagonal: zero pivot at row 0");
  c[0] = sys.sup[0] / pivot;
  d[0] = sys.rhs[0] / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = sys.diag[i] - sys.sub[i] * c[i - 1];
    if (pivot == Scalar(0)) {
      throw SingularSystemError("tridiagonal: zero pivot at row " + std::to_string(i));
    }
    c[i] = (i + 1 < n) ? sys.sup[i] / pivot : Scalar(0);
    d[i] = (sys.rhs[i] - sys.sub[i] * d[i - 1]) / pivot;
  }
  Vector x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace jumprate
