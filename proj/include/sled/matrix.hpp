#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace sled {

using Index = Eigen::Index;

/// A p x p real symmetric matrix with finite entries.
///
/// Construction symmetrizes the input as (M + M^T) / 2, which leaves an
/// already-symmetric matrix bit-for-bit unchanged, so entries(i, j) ==
/// entries(j, i) holds exactly afterwards.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(const Eigen::MatrixXd& m);

    static SymmetricMatrix zero(Index p);
    static SymmetricMatrix identity(Index p);
    static SymmetricMatrix diagonal(const Eigen::VectorXd& d);

    Index dim() const noexcept { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }
    const Eigen::MatrixXd& mat() const noexcept { return m_; }

    /// Largest absolute entry.
    double max_abs() const;

    SymmetricMatrix operator-() const;
    SymmetricMatrix shifted(double t) const;  // this + t I
    SymmetricMatrix scaled(double s) const;

    friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b);
    friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b);

private:
    struct Trusted {};
    SymmetricMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}

    Eigen::MatrixXd m_;
};

/// n x p sample-by-feature measurements.
class DataMatrix {
public:
    DataMatrix() = default;
    explicit DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names = {});

    Index n() const noexcept { return values_.rows(); }
    Index p() const noexcept { return values_.cols(); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    bool has_names() const noexcept { return !names_.empty(); }

    /// Name of feature j, or its zero-based index when unnamed.
    std::string feature_label(Index j) const;

    DataMatrix select_features(const std::vector<Index>& columns) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

}  // namespace sled
