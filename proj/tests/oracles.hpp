// Independent reference implementations used only by the tests. They share
// no code with the library beyond plain data types.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "antigone/learner.hpp"

namespace oracle {

using antigone::Label;
using antigone::Labels;

inline std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

/// Fraction of rows with prediction 1 among rows where keep(i) holds.
inline std::optional<double> positive_rate(const Labels& pred, const std::function<bool(std::size_t)>& keep) {
    std::size_t n = 0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!keep(i)) continue;
        ++n;
        if (pred[i] == 1) ++pos;
    }
    return ratio(pos, n);
}

inline double dp_gap(const Labels& pred, const Labels& a) {
    auto p1 = positive_rate(pred, [&](std::size_t i) { return a[i] == 1; });
    auto p0 = positive_rate(pred, [&](std::size_t i) { return a[i] == 0; });
    return std::fabs(p1.value() - p0.value());
}

inline double eo_gap(const Labels& pred, const Labels& y, const Labels& a) {
    auto p1 = positive_rate(pred, [&](std::size_t i) { return y[i] == 1 && a[i] == 1; });
    auto p0 = positive_rate(pred, [&](std::size_t i) { return y[i] == 1 && a[i] == 0; });
    return std::fabs(p1.value() - p0.value());
}

inline double wga(const Labels& pred, const Labels& y, const Labels& a) {
    double worst = 1.0;
    for (Label yy : {0, 1}) {
        for (Label aa : {0, 1}) {
            std::size_t n = 0;
            std::size_t hit = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (y[i] != yy || a[i] != aa) continue;
                ++n;
                if (pred[i] == y[i]) ++hit;
            }
            worst = std::min(worst, ratio(hit, n).value());
        }
    }
    return worst;
}

struct Quality {
    // Indexed [y][a].
    std::optional<double> precision[2][2];
    std::optional<double> recall[2][2];
    double f1[2][2] = {};
    double accuracy = 0.0;
};

/// Per (y, a): precision over rows the pseudo labels put in a, recall over
/// rows truly in a.
inline Quality pseudo_quality(const Labels& pseudo, const Labels& truth, const Labels& y) {
    Quality q;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pseudo.size(); ++i) agree += pseudo[i] == truth[i];
    q.accuracy = static_cast<double>(agree) / static_cast<double>(pseudo.size());
    for (Label yy : {0, 1}) {
        for (Label aa : {0, 1}) {
            std::size_t claimed = 0;
            std::size_t actual = 0;
            std::size_t both = 0;
            for (std::size_t i = 0; i < pseudo.size(); ++i) {
                if (y[i] != yy) continue;
                const bool p = pseudo[i] == aa;
                const bool t = truth[i] == aa;
                claimed += p;
                actual += t;
                both += p && t;
            }
            q.precision[yy][aa] = ratio(both, claimed);
            q.recall[yy][aa] = ratio(both, actual);
            if (q.precision[yy][aa] && q.recall[yy][aa]) {
                const double p = *q.precision[yy][aa];
                const double r = *q.recall[yy][aa];
                q.f1[yy][aa] = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
            }
        }
    }
    return q;
}

/// Forward pass with explicit loops in long double.
inline long double logit(const antigone::ModelParams& m, const antigone::Matrix& x, Eigen::Index row) {
    std::vector<long double> act(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) act[static_cast<std::size_t>(j)] = x(row, j);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        std::vector<long double> next(static_cast<std::size_t>(layer.weight.rows()));
        for (Eigen::Index o = 0; o < layer.weight.rows(); ++o) {
            long double s = layer.bias(o);
            for (Eigen::Index i = 0; i < layer.weight.cols(); ++i) s += layer.weight(o, i) * act[static_cast<std::size_t>(i)];
            const bool hidden = l + 1 < m.layers.size();
            next[static_cast<std::size_t>(o)] = hidden && s < 0 ? 0.0L : s;
        }
        act = std::move(next);
    }
    return act.at(0);
}

/// Weighted mean cross-entropy plus wd * sum of squared weights.
inline double loss(const antigone::ModelParams& m, const antigone::Matrix& x, const Labels& y, double wd,
                   const std::vector<double>& weights = {}) {
    long double total = 0.0L;
    long double weight_sum = 0.0L;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const long double z = logit(m, x, r);
        const long double w = weights.empty() ? 1.0L : weights[static_cast<std::size_t>(r)];
        // -log sigmoid(z) for y = 1, -log(1 - sigmoid(z)) for y = 0.
        const long double nll = y[static_cast<std::size_t>(r)] == 1 ? std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        total += w * nll;
        weight_sum += w;
    }
    long double reg = 0.0L;
    for (const auto& layer : m.layers) reg += layer.weight.squaredNorm();
    return static_cast<double>(total / weight_sum + wd * reg);
}

/// Central differences of f around p, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> p, double h) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double keep = p[i];
        p[i] = keep + h;
        const double up = f(p);
        p[i] = keep - h;
        const double down = f(p);
        p[i] = keep;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
    double diff = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

/// Means of the rows of x where keep(i) holds.
inline std::vector<double> mean_rows(const antigone::Matrix& x, const std::function<bool(std::size_t)>& keep) {
    std::vector<double> mean(static_cast<std::size_t>(x.cols()), 0.0);
    std::size_t n = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        if (!keep(static_cast<std::size_t>(r))) continue;
        ++n;
        for (Eigen::Index c = 0; c < x.cols(); ++c) mean[static_cast<std::size_t>(c)] += x(r, c);
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    return mean;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace oracle
