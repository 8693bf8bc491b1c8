#include "sled/competitors.hpp"

#include "sled/errors.hpp"

#include <algorithm>

namespace sled {

double frobenius_statistic(const SymmetricMatrix& d) { return d.mat().squaredNorm(); }

namespace {

struct EntrywiseMoments {
    Eigen::MatrixXd cov;    // s_ij
    Eigen::MatrixXd theta;  // variance of the centered cross-products
};

EntrywiseMoments entrywise_moments(const Eigen::MatrixXd& x) {
    const Index n = x.rows();
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd squared = centered.array().square().matrix();
    EntrywiseMoments out;
    out.cov = centered.transpose() * centered / static_cast<double>(n);
    // (1/n) sum_k (c_ki c_kj)^2 - s_ij^2
    out.theta = squared.transpose() * squared / static_cast<double>(n);
    out.theta -= out.cov.cwiseProduct(out.cov);
    out.theta = out.theta.cwiseMax(0.0);
    return out;
}

}  // namespace

double max_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.cols() != y.cols()) {
        throw DimensionMismatch(static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(y.cols()));
    }
    if (x.rows() < 2 || y.rows() < 2) throw InvalidArgument("max_statistic: each group needs at least 2 samples");
    const EntrywiseMoments mx = entrywise_moments(x);
    const EntrywiseMoments my = entrywise_moments(y);
    const double n = static_cast<double>(x.rows());
    const double m = static_cast<double>(y.rows());
    double best = 0.0;
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index i = 0; i <= j; ++i) {
            const double diff = mx.cov(i, j) - my.cov(i, j);
            const double denom = mx.theta(i, j) / n + my.theta(i, j) / m;
            if (denom == 0.0) throw DegenerateVariance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            best = std::max(best, diff * diff / denom);
        }
    }
    return best;
}

double max_statistic(const DataMatrix& x, const DataMatrix& y) { return max_statistic(x.values(), y.values()); }

}  // namespace sled
