#include "sled/matrix.hpp"

#include "sled/errors.hpp"

#include <unordered_set>

namespace sled {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("SymmetricMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected square");
    }
    if (!m.allFinite()) throw InvalidArgument("SymmetricMatrix: non-finite entry");
    m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::zero(Index p) { return {Eigen::MatrixXd::Zero(p, p), Trusted{}}; }

SymmetricMatrix SymmetricMatrix::identity(Index p) { return {Eigen::MatrixXd::Identity(p, p), Trusted{}}; }

SymmetricMatrix SymmetricMatrix::diagonal(const Eigen::VectorXd& d) {
    if (!d.allFinite()) throw InvalidArgument("SymmetricMatrix: non-finite entry");
    return {Eigen::MatrixXd(d.asDiagonal()), Trusted{}};
}

double SymmetricMatrix::max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

SymmetricMatrix SymmetricMatrix::operator-() const { return {-m_, Trusted{}}; }

SymmetricMatrix SymmetricMatrix::shifted(double t) const {
    Eigen::MatrixXd out = m_;
    out.diagonal().array() += t;
    return SymmetricMatrix(out);
}

SymmetricMatrix SymmetricMatrix::scaled(double s) const { return SymmetricMatrix(Eigen::MatrixXd(s * m_)); }

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    return SymmetricMatrix(Eigen::MatrixXd(a.m_ + b.m_));
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    // Entrywise subtraction of two symmetric matrices is exactly symmetric.
    return {a.m_ - b.m_, SymmetricMatrix::Trusted{}};
}

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names)
    : values_(std::move(values)), names_(std::move(feature_names)) {
    if (!values_.allFinite()) throw DataError("DataMatrix: non-finite value");
    if (!names_.empty()) {
        if (static_cast<Index>(names_.size()) != values_.cols()) {
            throw InvalidArgument("DataMatrix: " + std::to_string(names_.size()) + " feature names for " +
                                  std::to_string(values_.cols()) + " columns");
        }
        std::unordered_set<std::string> seen;
        for (const auto& name : names_) {
            if (!seen.insert(name).second) throw DataError("DataMatrix: duplicate feature name '" + name + "'");
        }
    }
}

std::string DataMatrix::feature_label(Index j) const {
    return names_.empty() ? std::to_string(j) : names_[static_cast<std::size_t>(j)];
}

DataMatrix DataMatrix::select_features(const std::vector<Index>& columns) const {
    Eigen::MatrixXd out(n(), static_cast<Index>(columns.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        out.col(static_cast<Index>(k)) = values_.col(columns[k]);
        if (!names_.empty()) names.push_back(names_[static_cast<std::size_t>(columns[k])]);
    }
    return DataMatrix(std::move(out), std::move(names));
}

}  // namespace sled
