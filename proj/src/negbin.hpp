#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liketally {

struct DesignMatrix;

struct FitOptions {
    double tol = 1e-8;  // gradient criterion scale, see fit_negbin
    int max_iter = 200;
};

struct PoissonFit {
    std::vector<std::string> columns;
    Eigen::VectorXd coefficients;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    Eigen::Index n = 0;
};

struct FitResult {
    std::string candidate;
    std::vector<std::string> columns;
    Eigen::VectorXd beta;
    double alpha = 0.0;
    double log_alpha_se = 0.0;  // SE of ln(alpha); NaN when alpha sits on the boundary
    double alpha_se = 0.0;      // delta-method SE on the alpha scale
    Eigen::VectorXd se;
    Eigen::VectorXd z;
    Eigen::VectorXd p;
    double loglik = 0.0;
    double aic = 0.0;
    Eigen::Index n = 0;
    int iterations = 0;
    bool converged = false;
    double gradient_norm_at_opt = 0.0;
    bool alpha_at_boundary = false;
    Eigen::MatrixXd cov;  // (k+1)x(k+1) over (beta, ln alpha); beta block first

    Eigen::Index coef_index(const std::string& column) const;
};

// NB2 log-likelihood: mu = exp(X beta), m = 1/alpha, p = 1/(1+alpha*mu),
// lnL = sum lnG(m+y) - lnG(y+1) - lnG(m) + m ln p + y ln(1-p).
// Linear predictors are clipped to +-30 before exponentiation.
double nb_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                 double alpha);

// Analytic gradient of the log-likelihood over (beta, ln alpha); the beta
// block is X' [(y-mu)/(1+alpha*mu)].
Eigen::VectorXd nb_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& beta, double alpha);

// Poisson MLE with log link via IRLS; loglik keeps the -lnGamma(y+1) term
// so likelihood-ratio statistics against the NB fit are comparable.
PoissonFit fit_poisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const FitOptions& options = {});

// Maximizes the NB2 log-likelihood over (beta, ln alpha) by BFGS with a
// strong-Wolfe line search, initialized from the Poisson fit and ln(alpha)=0.
// Converged when ||grad||_inf < tol * max(1, |lnL|). Standard errors come
// from the observed information (finite differences of the analytic score).
FitResult fit_negbin(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     const FitOptions& options = {});
FitResult fit_negbin(const DesignMatrix& design, const FitOptions& options = {});

PoissonFit fit_poisson(const DesignMatrix& design, const FitOptions& options = {});

struct LrTest {
    double statistic = 0.0;  // 2 (lnL_NB - lnL_Poisson), clamped at 0
    double p_value = 1.0;    // boundary mixture: half the chi2(1) tail
};

LrTest lr_overdispersion(const FitResult& nb, const PoissonFit& pois);

// Alpha values below this are reported as sitting on the lower boundary
// (the Poisson limit); their curvature in ln alpha is numerically zero.
inline constexpr double kAlphaBoundary = 1e-7;

}  // namespace liketally
