// Independent reference implementations used by the test suites. These
// deliberately avoid the library's computational paths: the likelihood
// oracle prices the data under the dense multivariate-Gaussian density,
// and the chi-square oracle integrates the density numerically.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// psi-weight expansion of the ARMA(p, q) transfer function, theta in the
// plus convention (1 + theta_1 B + ...).
inline std::vector<double> psi_weights(const std::vector<double>& phi,
                                       const std::vector<double>& theta, int count) {
    std::vector<double> psi(static_cast<std::size_t>(count), 0.0);
    psi[0] = 1.0;
    for (int j = 1; j < count; ++j) {
        double acc = j <= static_cast<int>(theta.size()) ? theta[static_cast<std::size_t>(j - 1)]
                                                         : 0.0;
        for (int i = 1; i <= std::min<int>(j, static_cast<int>(phi.size())); ++i) {
            acc += phi[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(j - i)];
        }
        psi[static_cast<std::size_t>(j)] = acc;
    }
    return psi;
}

// Stationary autocovariances gamma_0..gamma_{max_lag} by psi truncation.
inline std::vector<double> arma_autocovariances(const std::vector<double>& phi,
                                                const std::vector<double>& theta, double sigma2,
                                                int max_lag, int truncation = 8192) {
    const auto psi = psi_weights(phi, theta, truncation + max_lag + 1);
    std::vector<double> gamma(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (int j = 0; j < truncation; ++j) {
            acc += psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j + k)];
        }
        gamma[static_cast<std::size_t>(k)] = sigma2 * acc;
    }
    return gamma;
}

// Log-density of w under N(0, Sigma) with Sigma the ARMA Toeplitz
// covariance, evaluated through a dense Cholesky factorization.
inline double dense_gaussian_loglik(const std::vector<double>& phi,
                                    const std::vector<double>& theta, double sigma2,
                                    const std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    const auto gamma = arma_autocovariances(phi, theta, sigma2, n - 1);
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cov(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("oracle covariance is not positive definite");
    }
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
        z(i) = w[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd L = llt.matrixL();
    double log_det_half = 0.0;
    for (int i = 0; i < n; ++i) {
        log_det_half += std::log(L(i, i));
    }
    const Eigen::VectorXd solved = llt.solve(z);
    return -0.5 * n * std::log(2.0 * std::numbers::pi) - log_det_half - 0.5 * z.dot(solved);
}

// Recursive adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Upper-tail chi-square probability by numerical integration of the
// density from x outward.
inline double chi_square_sf_quadrature(double x, int df) {
    if (x <= 0.0) {
        return 1.0;
    }
    const double a = static_cast<double>(df) / 2.0;
    const auto density = [a](double t) {
        return std::exp((a - 1.0) * std::log(t) - t / 2.0 - std::lgamma(a) -
                        a * std::log(2.0));
    };
    const double upper = x + 80.0 * std::sqrt(2.0 * df) + 400.0;
    return integrate(density, x, upper, 1e-13);
}

inline std::vector<double> normal_draws(std::uint64_t seed, int n, double mean = 0.0,
                                        double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(mean, sd);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) {
        x = normal(rng);
    }
    return out;
}

}  // namespace oracles
