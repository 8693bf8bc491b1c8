#pragma once

// Baseline two-sample statistics calibrated on the same permutation engine
// as sLED: a Frobenius-type plug-in and the normalized max-entry statistic.

#include "sled/matrix.hpp"

namespace sled {

/// sum_ij D_ij^2. This is the naive plug-in, not a bias-corrected U-statistic;
/// permutation calibration absorbs the bias.
double frobenius_statistic(const SymmetricMatrix& d);

/// max_ij (s1_ij - s2_ij)^2 / (theta1_ij / n + theta2_ij / m) with
/// 1/n-normalized, group-centered covariances s_g and theta_g the empirical
/// variance of the centered cross-products (x_ki - xbar_i)(x_kj - xbar_j).
/// Throws DegenerateVariance when a denominator vanishes.
double max_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);
double max_statistic(const DataMatrix& x, const DataMatrix& y);

}  // namespace sled
