#include "negbin.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "features.hpp"
#include "log.hpp"
#include "mathutil.hpp"

namespace liketally {

namespace {

constexpr const char* kModule = "negbin";
constexpr double kEtaClip = 30.0;

void check_inputs(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
    if (y.size() != X.rows())
        raise(errc::invalid_argument, kModule, "y and X row counts disagree");
    if (y.size() == 0) raise(errc::invalid_argument, kModule, "empty data");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double v = y(i);
        if (!(v >= 0.0) || std::floor(v) != v)
            raise(errc::domain, kModule,
                  "y must hold non-negative integer counts (row " + std::to_string(i) + ")");
    }
}

// Shared state for repeated likelihood/score evaluations at fixed (y, X).
class NbObjective {
public:
    NbObjective(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) : y_(y), X_(X) {
        lgamma_y1_.resize(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i)
            lgamma_y1_(i) = std::lgamma(y(i) + 1.0);
    }

    Eigen::Index n() const { return y_.size(); }
    Eigen::Index k() const { return X_.cols(); }
    long long clip_count() const { return clip_count_; }

    // theta = (beta, t) with t = ln alpha. Returns lnL; fills grad (size
    // k+1) when non-null.
    double eval(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
        const Eigen::VectorXd beta = theta.head(k());
        const double t = theta(k());
        const double alpha = std::exp(t);
        const double m = 1.0 / alpha;

        Eigen::VectorXd eta = X_ * beta;
        double loglik = 0.0;
        Eigen::VectorXd resid;
        double gt = 0.0;
        if (grad) resid.resize(n());

        for (Eigen::Index i = 0; i < n(); ++i) {
            double e = eta(i);
            if (!std::isfinite(e))
                raise(errc::overflow, kModule,
                      "non-finite linear predictor at row " + std::to_string(i));
            if (e > kEtaClip || e < -kEtaClip) {
                e = std::clamp(e, -kEtaClip, kEtaClip);
                ++clip_count_;
            }
            const double mu = std::exp(e);
            const double u = alpha * mu;
            const double ln1pu = std::log1p(u);
            const long long yi = static_cast<long long>(y_(i));

            loglik += lgamma_ratio(m, yi) - lgamma_y1_(i) - m * ln1pu +
                      y_(i) * (t + e - ln1pu);
            if (grad) {
                const double r = (y_(i) - mu) / (1.0 + u);
                resid(i) = r;
                gt += m * (ln1pu - digamma_diff(m, yi)) + r;
            }
        }
        if (grad) {
            grad->resize(k() + 1);
            grad->head(k()) = X_.transpose() * resid;
            (*grad)(k()) = gt;
        }
        return loglik;
    }

private:
    const Eigen::VectorXd& y_;
    const Eigen::MatrixXd& X_;
    Eigen::VectorXd lgamma_y1_;
    long long clip_count_ = 0;
};

// Strong-Wolfe line search on phi(a) = -loglik(theta + a d); returns the
// accepted step or 0 when no acceptable step exists.
class LineSearch {
public:
    LineSearch(NbObjective& objective, const Eigen::VectorXd& theta, const Eigen::VectorXd& dir)
        : objective_(objective), theta_(theta), dir_(dir) {}

    double phi0 = 0.0, dphi0 = 0.0;          // value/slope at a = 0
    double phi_acc = 0.0;                    // value at accepted step
    Eigen::VectorXd grad_acc;                // gradient at accepted step

    double run(double f0, const Eigen::VectorXd& g0) {
        constexpr double c1 = 1e-4, c2 = 0.9;
        phi0 = f0;
        dphi0 = g0.dot(dir_);
        if (dphi0 >= 0.0) return 0.0;  // not a descent direction

        double a_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
        double a = 1.0;
        for (int iter = 0; iter < 30; ++iter) {
            double phi, dphi;
            if (!value_at(a, phi, dphi)) {
                // Non-finite trial value: shrink hard.
                a = 0.5 * (a_prev + a);
                continue;
            }
            if (phi > phi0 + c1 * a * dphi0 || (iter > 0 && phi >= phi_prev))
                return zoom(a_prev, phi_prev, dphi_prev, a, phi, c1, c2);
            if (std::fabs(dphi) <= -c2 * dphi0) {
                accept(phi);
                return a;
            }
            if (dphi >= 0.0) return zoom(a, phi, dphi, a_prev, phi_prev, c1, c2);
            a_prev = a;
            phi_prev = phi;
            dphi_prev = dphi;
            a *= 2.0;
        }
        return 0.0;
    }

private:
    bool value_at(double a, double& phi, double& dphi) {
        trial_theta_ = theta_ + a * dir_;
        double ll = objective_.eval(trial_theta_, &trial_grad_);
        if (!std::isfinite(ll)) return false;
        phi = -ll;
        dphi = -trial_grad_.dot(dir_);
        return true;
    }

    void accept(double phi) {
        phi_acc = phi;
        grad_acc = -trial_grad_;  // gradient of phi-space; negated back by caller
    }

    double zoom(double a_lo, double phi_lo, double dphi_lo, double a_hi, double phi_hi, double c1,
                double c2) {
        for (int iter = 0; iter < 40; ++iter) {
            // Cubic-ish: bisection with a quadratic fallback keeps this simple
            // and robust to flat regions.
            double a = 0.5 * (a_lo + a_hi);
            if (dphi_lo != 0.0) {
                double denom = 2.0 * (phi_hi - phi_lo - dphi_lo * (a_hi - a_lo));
                if (std::fabs(denom) > 1e-300) {
                    double quad = a_lo - dphi_lo * (a_hi - a_lo) * (a_hi - a_lo) / denom;
                    double lo = std::min(a_lo, a_hi), hi = std::max(a_lo, a_hi);
                    double margin = 0.1 * (hi - lo);
                    if (quad > lo + margin && quad < hi - margin) a = quad;
                }
            }
            double phi, dphi;
            if (!value_at(a, phi, dphi)) {
                a_hi = a;
                phi_hi = phi0;  // treat as bad side
                continue;
            }
            if (phi > phi0 + c1 * a * dphi0 || phi >= phi_lo) {
                a_hi = a;
                phi_hi = phi;
            } else {
                if (std::fabs(dphi) <= -c2 * dphi0) {
                    accept(phi);
                    return a;
                }
                if (dphi * (a_hi - a_lo) >= 0.0) {
                    a_hi = a_lo;
                    phi_hi = phi_lo;
                }
                a_lo = a;
                phi_lo = phi;
                dphi_lo = dphi;
            }
            if (std::fabs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::fabs(a_lo))) {
                if (phi_lo < phi0) {
                    double pd;
                    if (value_at(a_lo, phi, pd)) {
                        accept(phi);
                        return a_lo;
                    }
                }
                return 0.0;
            }
        }
        return 0.0;
    }

    NbObjective& objective_;
    const Eigen::VectorXd& theta_;
    const Eigen::VectorXd& dir_;
    Eigen::VectorXd trial_theta_;
    Eigen::VectorXd trial_grad_;
};

void require_full_rank(const Eigen::MatrixXd& X) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols())
        raise(errc::singular_design, kModule,
              "design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                  std::to_string(X.cols()) + " columns)");
}

double poisson_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = (X * beta).cwiseMin(kEtaClip).cwiseMax(-kEtaClip);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        ll += y(i) * eta(i) - std::exp(eta(i)) - std::lgamma(y(i) + 1.0);
    return ll;
}

// Observed information via central differences of the analytic score.
Eigen::MatrixXd fd_hessian(NbObjective& objective, const Eigen::VectorXd& theta) {
    const Eigen::Index p = theta.size();
    Eigen::MatrixXd H(p, p);
    Eigen::VectorXd gp(p), gm(p), probe = theta;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double h = 1e-5 * (1.0 + std::fabs(theta(j)));
        probe(j) = theta(j) + h;
        objective.eval(probe, &gp);
        probe(j) = theta(j) - h;
        objective.eval(probe, &gm);
        probe(j) = theta(j);
        H.col(j) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

}  // namespace

Eigen::Index FitResult::coef_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column) return static_cast<Eigen::Index>(i);
    raise(errc::unknown_topic, kModule, "fit has no column named '" + column + "'");
}

double nb_loglik(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                 double alpha) {
    check_inputs(y, X);
    if (!(alpha > 0.0)) raise(errc::domain, kModule, "alpha must be positive");
    if (beta.size() != X.cols())
        raise(errc::invalid_argument, kModule, "beta and X column counts disagree");
    NbObjective objective(y, X);
    Eigen::VectorXd theta(X.cols() + 1);
    theta.head(X.cols()) = beta;
    theta(X.cols()) = std::log(alpha);
    return objective.eval(theta, nullptr);
}

Eigen::VectorXd nb_score(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& beta, double alpha) {
    check_inputs(y, X);
    if (!(alpha > 0.0)) raise(errc::domain, kModule, "alpha must be positive");
    if (beta.size() != X.cols())
        raise(errc::invalid_argument, kModule, "beta and X column counts disagree");
    NbObjective objective(y, X);
    Eigen::VectorXd theta(X.cols() + 1);
    theta.head(X.cols()) = beta;
    theta(X.cols()) = std::log(alpha);
    Eigen::VectorXd grad;
    objective.eval(theta, &grad);
    return grad;
}

PoissonFit fit_poisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const FitOptions& options) {
    check_inputs(y, X);
    require_full_rank(X);

    const Eigen::Index k = X.cols();
    PoissonFit fit;
    fit.n = y.size();
    fit.coefficients = Eigen::VectorXd::Zero(k);

    // Start from eta = ln(y + 0.5) via one weighted solve against the data.
    Eigen::VectorXd eta(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) eta(i) = std::log(y(i) + 0.5);
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(eta);

    const int max_iter = std::max(options.max_iter, 25);
    double previous_deviance = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= max_iter; ++iter) {
        fit.iterations = iter;
        eta = (X * beta).cwiseMin(kEtaClip).cwiseMax(-kEtaClip);
        Eigen::VectorXd mu = eta.array().exp();
        Eigen::VectorXd w = mu.array().sqrt();
        Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(mu);
        Eigen::MatrixXd Xw = w.asDiagonal() * X;
        Eigen::VectorXd zw = w.asDiagonal() * z;
        Eigen::VectorXd next = Xw.colPivHouseholderQr().solve(zw);

        double deviance = -2.0 * poisson_loglik(y, X, next);
        double step = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (step < 1e-10 || std::fabs(previous_deviance - deviance) <
                                1e-12 * (std::fabs(deviance) + 1.0)) {
            fit.converged = true;
            break;
        }
        previous_deviance = deviance;
    }
    if (!fit.converged)
        log::warn("fit_poisson did not converge in " + std::to_string(fit.iterations) +
                  " iterations");
    fit.coefficients = beta;
    fit.loglik = poisson_loglik(y, X, beta);
    return fit;
}

PoissonFit fit_poisson(const DesignMatrix& design, const FitOptions& options) {
    PoissonFit fit = fit_poisson(design.y, design.X, options);
    fit.columns = design.column_names;
    return fit;
}

FitResult fit_negbin(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                     const FitOptions& options) {
    check_inputs(y, X);
    require_full_rank(X);
    const Eigen::Index k = X.cols();
    if (y.size() <= k + 1)
        raise(errc::validation, kModule,
              "need n > k+1 observations (n=" + std::to_string(y.size()) +
                  ", k=" + std::to_string(k) + ")");

    PoissonFit pois = fit_poisson(y, X, options);

    NbObjective objective(y, X);
    Eigen::VectorXd theta(k + 1);
    theta.head(k) = pois.coefficients;
    theta(k) = 0.0;  // alpha = 1

    Eigen::VectorXd grad(k + 1);
    double loglik = objective.eval(theta, &grad);

    FitResult fit;
    fit.n = y.size();
    const double tol = options.tol > 0 ? options.tol : 1e-8;
    auto converged_at = [&](double ll, const Eigen::VectorXd& g) {
        return g.cwiseAbs().maxCoeff() < tol * std::max(1.0, std::fabs(ll));
    };

    Eigen::MatrixXd Binv = Eigen::MatrixXd::Identity(k + 1, k + 1);  // inverse Hessian approx
    bool is_identity = true;
    bool first_update = true;
    fit.converged = converged_at(loglik, grad);
    int iter = 0;
    while (!fit.converged && iter < options.max_iter) {
        ++iter;
        Eigen::VectorXd g_min = -grad;  // minimize -lnL
        Eigen::VectorXd dir = -(Binv * g_min);
        LineSearch search(objective, theta, dir);
        double step = search.run(-loglik, g_min);
        if (step <= 0.0) {
            // Restart once from steepest ascent before giving up.
            if (!is_identity) {
                Binv.setIdentity();
                is_identity = true;
                first_update = true;
                continue;
            }
            break;
        }
        Eigen::VectorXd theta_new = theta + step * dir;
        const Eigen::VectorXd& g_min_new = search.grad_acc;  // gradient of -lnL at new point
        double loglik_new = -search.phi_acc;

        Eigen::VectorXd s = theta_new - theta;
        Eigen::VectorXd yv = g_min_new - g_min;
        double sy = s.dot(yv);
        if (sy > 1e-12) {
            if (first_update) {
                Binv *= sy / yv.squaredNorm();
                first_update = false;
            }
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k + 1, k + 1);
            Eigen::MatrixXd V = I - (s * yv.transpose()) / sy;
            Binv = V * Binv * V.transpose() + (s * s.transpose()) / sy;
            is_identity = false;
        }
        theta = theta_new;
        grad = -g_min_new;
        loglik = loglik_new;
        fit.converged = converged_at(loglik, grad);
    }
    // Newton polish on the observed information. BFGS alone crawls once the
    // ln-alpha curvature collapses toward the Poisson boundary; Newton steps
    // push the gradient to the tolerance at quadratic rate.
    for (int polish = 0; polish < 12 && !fit.converged && iter < options.max_iter + 12;
         ++polish) {
        ++iter;
        const double tol_scaled = tol * std::max(1.0, std::fabs(loglik));

        // At the boundary d lnL / d ln(alpha) decays like alpha itself, so a
        // single analytic jump in t lands it under the tolerance.
        bool at_boundary = theta(k) < std::log(kAlphaBoundary);
        if (at_boundary && grad(k) < 0.0 && std::fabs(grad(k)) > 0.5 * tol_scaled) {
            theta(k) += std::log(0.25 * tol_scaled / std::fabs(grad(k)));
            loglik = objective.eval(theta, &grad);
            fit.converged = converged_at(loglik, grad);
            continue;
        }

        Eigen::MatrixXd H = fd_hessian(objective, theta);
        Eigen::Index active = at_boundary ? k : k + 1;  // t row is ~0 there
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-H.topLeftCorner(active, active));
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
        Eigen::VectorXd step_dir = ldlt.solve(grad.head(active));
        if (!step_dir.allFinite()) break;

        double scale = 1.0;
        bool moved = false;
        for (int backtrack = 0; backtrack < 30; ++backtrack) {
            Eigen::VectorXd trial = theta;
            trial.head(active) += scale * step_dir;
            Eigen::VectorXd trial_grad(k + 1);
            double trial_ll = objective.eval(trial, &trial_grad);
            bool better_ll = std::isfinite(trial_ll) && trial_ll >= loglik;
            bool smaller_grad = std::isfinite(trial_ll) &&
                                trial_grad.cwiseAbs().maxCoeff() < grad.cwiseAbs().maxCoeff();
            if (better_ll || (smaller_grad && trial_ll > loglik - 1e-9 * std::fabs(loglik))) {
                theta = trial;
                grad = trial_grad;
                loglik = trial_ll;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        fit.converged = converged_at(loglik, grad);
        if (!moved) break;
    }

    fit.iterations = iter;
    fit.gradient_norm_at_opt = grad.cwiseAbs().maxCoeff();
    if (!fit.converged)
        log::warn("fit_negbin: not converged after " + std::to_string(iter) +
                  " iterations (|grad|=" + std::to_string(fit.gradient_norm_at_opt) + ")");
    if (objective.clip_count() > 0)
        log::debug("fit_negbin: clipped " + std::to_string(objective.clip_count()) +
                   " linear predictors during optimization");

    fit.beta = theta.head(k);
    fit.alpha = std::exp(theta(k));
    fit.loglik = loglik;
    const double n_params = static_cast<double>(k) + 1.0;  // dispersion counts
    fit.aic = 2.0 * n_params - 2.0 * loglik;
    fit.alpha_at_boundary = fit.alpha < kAlphaBoundary;

    // Observed information. On the alpha boundary the ln-alpha curvature
    // vanishes, so the dispersion row is excluded there and its SE reported
    // as NaN.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd H = fd_hessian(objective, theta);
    fit.cov = Eigen::MatrixXd::Constant(k + 1, k + 1, nan);
    Eigen::Index active = fit.alpha_at_boundary ? k : k + 1;
    Eigen::MatrixXd Hb = H.topLeftCorner(active, active);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(-Hb);
    if (eigensolver.info() != Eigen::Success ||
        eigensolver.eigenvalues().minCoeff() <= 0.0) {
        if (fit.converged)
            raise(errc::nonconcave_at_optimum, kModule,
                  "observed information is not positive definite at the reported optimum");
        // A flagged non-converged fit still reports NaN standard errors.
        fit.se = Eigen::VectorXd::Constant(k, nan);
        fit.z = Eigen::VectorXd::Constant(k, nan);
        fit.p = Eigen::VectorXd::Constant(k, nan);
        fit.log_alpha_se = nan;
        fit.alpha_se = nan;
        return fit;
    }
    fit.cov.topLeftCorner(active, active) =
        eigensolver.eigenvectors() *
        eigensolver.eigenvalues().cwiseInverse().asDiagonal() *
        eigensolver.eigenvectors().transpose();

    fit.se.resize(k);
    fit.z.resize(k);
    fit.p.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.se(j) = std::sqrt(fit.cov(j, j));
        fit.z(j) = fit.beta(j) / fit.se(j);
        fit.p(j) = normal_two_sided_p(fit.z(j));
    }
    if (fit.alpha_at_boundary) {
        fit.log_alpha_se = nan;
        fit.alpha_se = nan;
    } else {
        fit.log_alpha_se = std::sqrt(fit.cov(k, k));
        fit.alpha_se = fit.alpha * fit.log_alpha_se;  // delta method
    }
    return fit;
}

FitResult fit_negbin(const DesignMatrix& design, const FitOptions& options) {
    FitResult fit = fit_negbin(design.y, design.X, options);
    fit.candidate = design.candidate;
    fit.columns = design.column_names;
    return fit;
}

LrTest lr_overdispersion(const FitResult& nb, const PoissonFit& pois) {
    if (nb.n != pois.n || (!pois.columns.empty() && nb.columns != pois.columns))
        raise(errc::incompatible_fits, kModule,
              "NB and Poisson fits are not on the same (y, X)");
    if (!nb.converged || !pois.converged)
        raise(errc::incompatible_fits, kModule,
              "over-dispersion test requires both fits to have converged");
    LrTest test;
    test.statistic = std::max(0.0, 2.0 * (nb.loglik - pois.loglik));
    // alpha = 0 sits on the parameter boundary: the null distribution is the
    // mixture (chi2_0 + chi2_1)/2, so the p-value is half the chi2_1 tail
    // (0.5 exactly when the statistic is 0).
    test.p_value = 0.5 * chi2_1_sf(test.statistic);
    return test;
}

}  // namespace liketally
