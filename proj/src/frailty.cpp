#include "mfrail/frailty.hpp"

#include <sstream>

#include "mfrail/error.hpp"

namespace mfrail {

namespace {
constexpr double kPsdTolerance = 1e-10;
}

GaussianFactor gaussian_factor(const Eigen::MatrixXd& R) {
  if (R.rows() != R.cols() || R.rows() == 0)
    throw ParameterError("invalid correlation structure: matrix must be square");
  if ((R.array() < 0.0).any())
    throw ParameterError("invalid correlation structure: negative frailty correlation");

  GaussianFactor f;
  f.C = R.array().sqrt().matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.C);
  f.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (f.min_eigenvalue < -kPsdTolerance) {
    std::ostringstream os;
    os << "invalid correlation structure: element-wise square root is not PSD "
          "(smallest eigenvalue "
       << f.min_eigenvalue << ")";
    throw ParameterError(os.str());
  }

  Eigen::LLT<Eigen::MatrixXd> llt(f.C);
  if (llt.info() == Eigen::Success && f.min_eigenvalue > kPsdTolerance) {
    f.chol = llt.matrixL();
    return f;
  }
  // Singular or numerically borderline: clip the spectrum and factor with a
  // tiny ridge so the lower-triangular form stays available.
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd C = eig.eigenvectors() * clipped.asDiagonal() *
                            eig.eigenvectors().transpose();
  Eigen::MatrixXd ridge = C;
  ridge.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::MatrixXd> llt2(ridge);
  if (llt2.info() != Eigen::Success)
    throw ParameterError("invalid correlation structure: factorization failed");
  f.chol = llt2.matrixL();
  return f;
}

FrailtyVector sample_frailties(const GaussianFactor& factor, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = factor.chol.rows();
  Eigen::VectorXd e1(n), e2(n);
  for (Eigen::Index j = 0; j < n; ++j) e1(j) = normal(rng);
  for (Eigen::Index j = 0; j < n; ++j) e2(j) = normal(rng);
  const Eigen::VectorXd v1 = factor.chol.triangularView<Eigen::Lower>() * e1;
  const Eigen::VectorXd v2 = factor.chol.triangularView<Eigen::Lower>() * e2;
  FrailtyVector out;
  out.w = 0.5 * (v1.array().square() + v2.array().square()).matrix();
  return out;
}

}  // namespace mfrail
