#pragma once

#include "sled/matrix.hpp"
#include "sled/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <filesystem>
#include <string>

namespace sled::testing {

inline Eigen::MatrixXd gaussian(Index rows, Index cols, Philox4x32& rng, double scale = 1.0) {
    boost::random::normal_distribution<double> z;
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = scale * z(rng);
    return m;
}

inline SymmetricMatrix random_symmetric(Index p, Philox4x32& rng, double scale = 1.0) {
    const Eigen::MatrixXd g = gaussian(p, p, rng, scale);
    return SymmetricMatrix(Eigen::MatrixXd(g + g.transpose()));
}

inline SymmetricMatrix random_psd(Index p, Philox4x32& rng) {
    const Eigen::MatrixXd g = gaussian(p, p, rng);
    return SymmetricMatrix(Eigen::MatrixXd(g * g.transpose()));
}

inline double uniform(Philox4x32& rng, double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::path(SLED_TEST_TMPDIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace sled::testing
