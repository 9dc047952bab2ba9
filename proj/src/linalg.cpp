#include "cnma/linalg.hpp"

#include <algorithm>
#include <limits>

namespace cnma {

double rank_tolerance(const Eigen::MatrixXd& a, double sigma_max) {
  const double dim = static_cast<double>(std::max(a.rows(), a.cols()));
  return dim * std::numeric_limits<double>::epsilon() * sigma_max;
}

int numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = rank_tolerance(a, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  const double tol = rank_tolerance(a, sv(0));
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

bool in_row_space(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, double rel_tol) {
  const double norm = v.norm();
  if (norm == 0.0) return true;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return false;
  const double tol = rank_tolerance(a, sv(0));
  // Projection of v onto the span of the right singular vectors with
  // above-threshold singular values.
  Eigen::VectorXd coeffs = svd.matrixV().transpose() * v;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol) coeffs(i) = 0.0;
  const Eigen::VectorXd projected = svd.matrixV() * coeffs;
  return (v - projected).norm() <= rel_tol * norm;
}

}  // namespace cnma
