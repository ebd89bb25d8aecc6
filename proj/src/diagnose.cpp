#include "ricecast/diagnose.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ricecast {

namespace {

// Regularized incomplete gamma functions, Cephes style: the lower series
// when x < a + 1, otherwise the upper continued fraction (modified Lentz).
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

double lower_gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEpsilon) {
            break;
        }
    }
    const double log_scale = a * std::log(x) - x - std::lgamma(a);
    return sum * std::exp(log_scale);
}

double upper_gamma_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEpsilon) {
            break;
        }
    }
    const double log_scale = a * std::log(x) - x - std::lgamma(a);
    return h * std::exp(log_scale);
}

double regularized_gamma_q(double a, double x) {
    if (x <= 0.0) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return 1.0 - lower_gamma_series(a, x);
    }
    return upper_gamma_fraction(a, x);
}

}  // namespace

std::vector<double> acf(const std::vector<double>& values, int max_lag) {
    const int n = static_cast<int>(values.size());
    if (max_lag < 0 || n <= max_lag) {
        throw std::invalid_argument("acf needs length(values) > max_lag >= 0");
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (const double x : values) {
        denom += (x - mean) * (x - mean);
    }
    if (denom == 0.0) {
        throw DegenerateVariance("acf of a zero-variance series");
    }
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    r[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (int t = 0; t + k < n; ++t) {
            num += (values[static_cast<std::size_t>(t)] - mean) *
                   (values[static_cast<std::size_t>(t + k)] - mean);
        }
        r[static_cast<std::size_t>(k)] = num / denom;
    }
    return r;
}

LjungBoxResult ljung_box(const std::vector<double>& residuals, int lags, int fitdf) {
    if (fitdf < 0 || lags <= fitdf) {
        throw DegreesOfFreedom("ljung_box needs lags > fitdf >= 0");
    }
    const auto r = acf(residuals, lags);
    const double n = static_cast<double>(residuals.size());
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        const double rk = r[static_cast<std::size_t>(k)];
        q += rk * rk / (n - static_cast<double>(k));
    }
    q *= n * (n + 2.0);

    LjungBoxResult result;
    result.statistic = q;
    result.df = lags - fitdf;
    result.p_value = chi_square_sf(q, result.df);
    return result;
}

double chi_square_sf(double x, int df) {
    if (x < 0.0 || df < 1) {
        throw std::invalid_argument("chi_square_sf needs x >= 0 and df >= 1");
    }
    return regularized_gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

int default_ljung_box_lags(int n, int fitdf) {
    return std::max(std::min(10, n / 5), fitdf + 1);
}

DiagnosticsReport diagnose_residuals(const std::vector<double>& residuals, int fitdf) {
    return diagnose_residuals(residuals, fitdf,
                              default_ljung_box_lags(static_cast<int>(residuals.size()), fitdf));
}

DiagnosticsReport diagnose_residuals(const std::vector<double>& residuals, int fitdf, int lags) {
    const int n = static_cast<int>(residuals.size());
    if (n <= lags) {
        throw std::invalid_argument("need more residuals than tested lags");
    }

    DiagnosticsReport report;
    report.acf_values = acf(residuals, lags);
    report.ljung_box = ljung_box(residuals, lags, fitdf);

    report.residual_mean =
        std::accumulate(residuals.begin(), residuals.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (const double x : residuals) {
        ss += (x - report.residual_mean) * (x - report.residual_mean);
    }
    report.residual_sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    const auto [lo_it, hi_it] = std::minmax_element(residuals.begin(), residuals.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    constexpr int kBins = 20;
    const double width = (hi - lo) / kBins;
    report.histogram_edges.resize(kBins + 1);
    for (int i = 0; i <= kBins; ++i) {
        report.histogram_edges[static_cast<std::size_t>(i)] = lo + width * i;
    }
    report.histogram_edges.back() = hi;
    report.histogram_counts.assign(kBins, 0);
    for (const double x : residuals) {
        int bin = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
        bin = std::clamp(bin, 0, kBins - 1);
        ++report.histogram_counts[static_cast<std::size_t>(bin)];
    }
    return report;
}

std::string diagnostics_to_json(const DiagnosticsReport& report) {
    nlohmann::json doc;
    doc["acf"] = report.acf_values;
    doc["ljung_box"] = {{"statistic", report.ljung_box.statistic},
                        {"df", report.ljung_box.df},
                        {"p_value", report.ljung_box.p_value}};
    doc["residual_mean"] = report.residual_mean;
    doc["residual_sd"] = report.residual_sd;
    doc["histogram"] = {{"edges", report.histogram_edges},
                        {"counts", report.histogram_counts}};
    return doc.dump(2) + "\n";
}

std::string acf_csv(const DiagnosticsReport& report) {
    std::string out = "lag,acf\n";
    for (std::size_t k = 0; k < report.acf_values.size(); ++k) {
        char buffer[48];
        const int n = std::snprintf(buffer, sizeof(buffer), "%zu,%.10g\n", k,
                                    report.acf_values[k]);
        out.append(buffer, static_cast<std::size_t>(n));
    }
    return out;
}

std::string histogram_csv(const DiagnosticsReport& report) {
    std::string out = "bin_center,count\n";
    for (std::size_t i = 0; i < report.histogram_counts.size(); ++i) {
        const double center =
            0.5 * (report.histogram_edges[i] + report.histogram_edges[i + 1]);
        char buffer[48];
        const int n = std::snprintf(buffer, sizeof(buffer), "%.10g,%lld\n", center,
                                    report.histogram_counts[i]);
        out.append(buffer, static_cast<std::size_t>(n));
    }
    return out;
}

}  // namespace ricecast
