#pragma once

#include <numeric>
#include <random>

#include "antigone/dataset.hpp"

namespace fixture {

inline antigone::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                      double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    antigone::Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = n(rng);
    }
    return m;
}

inline antigone::Labels random_labels(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution b(0.5);
    antigone::Labels y(n);
    for (auto& v : y) v = b(rng) ? 1 : 0;
    return y;
}

/// Row ids 0..n-1, train split.
inline antigone::TabularDataset make(antigone::Matrix x, antigone::Labels y,
                                     std::optional<antigone::Labels> a = std::nullopt,
                                     antigone::Split split = antigone::Split::train) {
    std::vector<std::int64_t> ids(y.size());
    std::iota(ids.begin(), ids.end(), 0);
    return {std::move(x), std::move(y), std::move(a), std::move(ids), split};
}

}  // namespace fixture
