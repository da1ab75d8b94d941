#pragma once

// Shared helpers for the test binaries.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "corpus.hpp"
#include "negbin.hpp"

#ifndef LIKETALLY_FIXTURE_DIR
#define LIKETALLY_FIXTURE_DIR "tests/fixtures"
#endif

namespace testsupport {

inline std::string fixture(const std::string& name) {
    return std::string(LIKETALLY_FIXTURE_DIR) + "/" + name;
}

inline liketally::Tweet tweet(const std::string& id, const std::string& candidate,
                              std::int64_t at, const std::string& text, long long likes,
                              bool retweet = false) {
    return liketally::Tweet{id, candidate, at, text, likes, retweet};
}

// Central finite differences of nb_loglik over (beta, ln alpha) — the
// independent check of the analytic score.
inline Eigen::VectorXd fd_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& beta, double alpha) {
    const Eigen::Index k = X.cols();
    Eigen::VectorXd theta(k + 1);
    theta.head(k) = beta;
    theta(k) = std::log(alpha);
    Eigen::VectorXd grad(k + 1);
    for (Eigen::Index j = 0; j <= k; ++j) {
        const double h = 1e-6 * (1.0 + std::fabs(theta(j)));
        Eigen::VectorXd up = theta, down = theta;
        up(j) += h;
        down(j) -= h;
        double f_up = liketally::nb_loglik(y, X, up.head(k), std::exp(up(k)));
        double f_down = liketally::nb_loglik(y, X, down.head(k), std::exp(down(k)));
        grad(j) = (f_up - f_down) / (2.0 * h);
    }
    return grad;
}

// Synthetic regression data with a deterministic test-only generator
// (std::mt19937, independent of the library's sampler).
struct TestData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

inline TestData make_nb_data(std::uint32_t seed, int n, const std::vector<double>& beta,
                             double alpha) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);

    const int k = static_cast<int>(beta.size());
    TestData data;
    data.X.resize(n, k);
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
        data.X(i, 0) = 1.0;
        if (k > 1) data.X(i, 1) = std::exp(0.3 * norm(rng));  // positive, mildly skewed
        if (k > 2) data.X(i, 2) = std::floor(unif(rng) * 20.0) + 4.0;
        for (int j = 3; j < k; ++j) data.X(i, j) = unif(rng) < 0.3 ? 1.0 : 0.0;

        double eta = 0.0;
        for (int j = 0; j < k; ++j) eta += data.X(i, j) * beta[static_cast<std::size_t>(j)];
        double mu = std::exp(eta);
        double lambda = mu;
        if (alpha > 0.0) {
            std::gamma_distribution<double> gamma(1.0 / alpha, alpha);
            lambda = mu * gamma(rng);
        }
        std::poisson_distribution<long long> poisson(lambda);
        data.y(i) = static_cast<double>(poisson(rng));
    }
    return data;
}

}  // namespace testsupport
