#pragma once

#include <Eigen/Dense>

namespace cnma {

/// Singular values below max(rows, cols) * eps * sigma_max count as zero.
double rank_tolerance(const Eigen::MatrixXd& a, double sigma_max);

int numerical_rank(const Eigen::MatrixXd& a);

/// Moore-Penrose pseudoinverse via SVD with the rank_tolerance cutoff.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a);

/// Whether v lies in the row space of a (within rel_tol of its norm);
/// the zero vector is always a member.
bool in_row_space(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, double rel_tol = 1e-8);

}  // namespace cnma
