#pragma once

#include <string>
#include <vector>

#include "ricecast/errors.hpp"

namespace ricecast {

struct LjungBoxResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

/// Residual-testing summary: sample ACF, portmanteau test, moments and a
/// fixed 20-bin histogram, ready for plotting.
struct DiagnosticsReport {
    std::vector<double> acf_values;  ///< lags 0..max_lag
    LjungBoxResult ljung_box;
    double residual_mean = 0.0;
    double residual_sd = 0.0;
    std::vector<double> histogram_edges;  ///< 21 edges over [min, max]
    std::vector<long long> histogram_counts;
};

/// Sample autocorrelations r_0..r_max_lag with the biased normalization
/// sum_{t<=n-k} (x_t - xbar)(x_{t+k} - xbar) / sum (x_t - xbar)^2.
std::vector<double> acf(const std::vector<double>& values, int max_lag);

/// Ljung-Box portmanteau: Q = n(n+2) sum_{k=1..lags} r_k^2 / (n-k),
/// tested against chi-square with lags - fitdf degrees of freedom.
LjungBoxResult ljung_box(const std::vector<double>& residuals, int lags, int fitdf);

/// Upper-tail chi-square probability via the regularized upper incomplete
/// gamma Q(df/2, x/2).
double chi_square_sf(double x, int df);

/// min(10, n/5) lags, never fewer than fitdf + 1.
int default_ljung_box_lags(int n, int fitdf);

/// Assembles the full report for a residual series; fitdf is the number
/// of fitted ARMA coefficients (p + q).
DiagnosticsReport diagnose_residuals(const std::vector<double>& residuals, int fitdf);
DiagnosticsReport diagnose_residuals(const std::vector<double>& residuals, int fitdf, int lags);

std::string diagnostics_to_json(const DiagnosticsReport& report);
std::string acf_csv(const DiagnosticsReport& report);
std::string histogram_csv(const DiagnosticsReport& report);

}  // namespace ricecast
