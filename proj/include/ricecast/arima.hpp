#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ricecast/calendar.hpp"
#include "ricecast/errors.hpp"

namespace ricecast {

/// Model order (p, d, q). Engine bounds: p <= 12, d <= 2, q <= 12.
struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;
    bool include_constant = true;
};

/// Parameters of the model
///
///   (x_t - mean) = sum phi_i (x_{t-i} - mean) + eps_t + sum theta_j eps_{t-j}
///
/// on the d-times differenced scale. `mean` is the process mean of the
/// differenced series; with p = 0 it coincides with the intercept, so the
/// constants of the fitted price models map onto it directly.
struct ArimaParams {
    double mean = 0.0;
    std::vector<double> ar;      ///< phi_1..phi_p
    std::vector<double> ma;      ///< theta_1..theta_q
    double sigma2 = 1.0;         ///< innovation variance
};

struct InformationCriteria {
    double aic = 0.0;
    double aicc = 0.0;
    double bic = 0.0;
};

/// A fitted model: parameters at the likelihood optimum plus everything
/// forecasting and diagnostics need afterwards. `residuals` are the
/// one-step prediction errors over the differenced sample; `tail` keeps
/// the last p + d in-sample observations (original scale) so forecasts
/// can recurse without the full series.
struct ArimaFit {
    ArimaOrder order;
    ArimaParams params;
    double loglik = 0.0;
    int nobs = 0;  ///< observations after differencing
    InformationCriteria criteria;
    std::vector<double> residuals;
    std::vector<double> tail;
};

struct FitOptions {
    bool enforce_invertibility = true;
    int max_iterations = 2000;
    double relative_tolerance = 1e-8;
};

/// Fit estimation stopped at the iteration cap before the simplex
/// collapsed. Carries the best point found so callers can still use it.
struct NoConvergence : Error {
    ArimaFit best;
    NoConvergence(const std::string& message, ArimaFit best_fit)
        : Error(message), best(std::move(best_fit)) {}
};

/// Point forecasts for horizons 1..h ahead of `origin`, with standard
/// errors from the psi-weight expansion of the integrated process.
struct ForecastResult {
    Date origin{};
    std::vector<double> points;
    std::vector<double> std_errors;

    /// Presentation values (half-away-from-zero integer rupiah).
    std::vector<long long> rounded() const;
    /// origin + 1 .. origin + h.
    std::vector<Date> dates() const;
};

/// Applies d passes of first differencing. Output is shorter by d.
std::vector<double> difference(const std::vector<double>& values, int d);

/// Exact Gaussian log-likelihood of the differenced, mean-adjusted data
/// under the stationary ARMA(p, q), via a state-space innovations
/// recursion started from the exact stationary state covariance.
double log_likelihood(const ArimaOrder& order, const ArimaParams& params,
                      const std::vector<double>& values);

/// Conditional sum of squares: squared recursive innovations with
/// pre-sample innovations zero and pre-sample observations at the mean.
double css(const ArimaOrder& order, const ArimaParams& params,
           const std::vector<double>& values);

/// Maximum-likelihood fit. Start values come from a Hannan-Rissanen
/// regression; the exact log-likelihood is then maximized by Nelder-Mead
/// over a partial-autocorrelation reparameterization that keeps the AR
/// polynomial stationary (and the MA polynomial invertible unless the
/// option is off). The innovation variance is profiled out.
ArimaFit fit(const std::vector<double>& values, const ArimaOrder& order,
             const FitOptions& options = {});

/// Deterministic simulation: ARMA on the differenced scale with a burn-in
/// of max(p, q) + 100 draws, integrated d times. Same seed, same output.
std::vector<double> simulate(const ArimaOrder& order, const ArimaParams& params,
                             int n, std::uint64_t seed);

/// Conditional-expectation forecasts. AR terms recurse on the observation
/// tail (absent history counts as the mean), MA terms use in-sample
/// residuals while the lag reaches back into the sample and zero beyond.
/// For a pure MA model every horizon past q equals the mean exactly.
ForecastResult forecast(const ArimaFit& fit, int h, Date origin = Date{});

/// JSON fit document with stable field names: order{p,d,q,constant},
/// mean, ar[], ma[], sigma2, loglik, nobs, criteria{aic,aicc,bic}, plus
/// optional residuals[] and tail[] when present. Full precision on write.
std::string serialize_fit(const ArimaFit& fit);
ArimaFit parse_fit(const std::string& text);

}  // namespace ricecast
