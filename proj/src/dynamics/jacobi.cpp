#include "nds/dynamics/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nds/common/error.hpp"

namespace nds::dynamics {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& A) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j) s += A(i, j) * A(i, j);
  return std::sqrt(s);
}

}  // namespace

GeneralizedEigen eig_sym_positive(const Eigen::VectorXd& mass_diag, const Eigen::MatrixXd& K,
                                  int max_sweeps) {
  const Eigen::Index n = mass_diag.size();
  if (K.rows() != n || K.cols() != n) throw ShapeError("eig_sym_positive: K must be n x n");
  if ((mass_diag.array() <= 0.0).any())
    throw InvalidArgument("eig_sym_positive: mass must be positive");

  const Eigen::VectorXd inv_sqrt_m = mass_diag.array().sqrt().inverse();
  Eigen::MatrixXd A = inv_sqrt_m.asDiagonal() * K * inv_sqrt_m.asDiagonal();
  A = 0.5 * (A + A.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);

  const double tol = 1e-12 * A.norm();
  int sweep = 0;
  while (off_diagonal_norm(A) > tol) {
    if (sweep++ >= max_sweeps)
      throw ConvergenceError("eig_sym_positive: Jacobi sweeps exhausted", sweep);
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing A(p, q), in the stable small-angle form.
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });

  GeneralizedEigen out;
  out.natural_freqs.resize(n);
  out.shapes.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    const double lambda = A(src, src);
    if (lambda < 0.0) throw InvalidArgument("eig_sym_positive: K is not positive semidefinite");
    out.natural_freqs(i) = std::sqrt(lambda);
    Eigen::VectorXd phi = inv_sqrt_m.asDiagonal() * V.col(src);
    phi /= std::sqrt(phi.dot(mass_diag.asDiagonal() * phi));
    Eigen::Index imax = 0;
    phi.cwiseAbs().maxCoeff(&imax);
    if (phi(imax) < 0.0) phi = -phi;
    out.shapes.col(i) = phi;
  }
  return out;
}

}  // namespace nds::dynamics
