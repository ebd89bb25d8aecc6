#include "ricecast/arima.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "ricecast/csv.hpp"
#include "ricecast/select.hpp"

namespace ricecast {

namespace {

constexpr int kMaxP = 12;
constexpr int kMaxD = 2;
constexpr int kMaxQ = 12;

void validate_order(const ArimaOrder& order) {
    if (order.p < 0 || order.d < 0 || order.q < 0) {
        throw std::invalid_argument("ARIMA order must be non-negative");
    }
    if (order.p > kMaxP || order.d > kMaxD || order.q > kMaxQ) {
        throw std::invalid_argument("ARIMA order exceeds engine bounds (p <= 12, d <= 2, q <= 12)");
    }
}

void validate_params(const ArimaOrder& order, const ArimaParams& params) {
    if (static_cast<int>(params.ar.size()) != order.p ||
        static_cast<int>(params.ma.size()) != order.q) {
        throw std::invalid_argument("parameter vectors do not match the order");
    }
    if (!(params.sigma2 >= 0.0) || !std::isfinite(params.mean)) {
        throw std::invalid_argument("sigma2 must be non-negative and mean finite");
    }
}

void require_finite(const std::vector<double>& values) {
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("values must be complete and finite");
        }
    }
}

double sample_mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    const double mean = sample_mean(values);
    double acc = 0.0;
    for (const double v : values) {
        acc += (v - mean) * (v - mean);
    }
    return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

// Roots of 1 - c_1 z - ... - c_m z^m strictly outside the unit circle,
// checked through the eigenvalues of the companion matrix (which are the
// reciprocal roots).
bool polynomial_stable(const std::vector<double>& coeffs) {
    std::size_t m = coeffs.size();
    while (m > 0 && coeffs[m - 1] == 0.0) {
        --m;
    }
    if (m == 0) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<int>(m), static_cast<int>(m));
    for (std::size_t i = 0; i < m; ++i) {
        companion(0, static_cast<int>(i)) = coeffs[i];
    }
    for (std::size_t i = 1; i < m; ++i) {
        companion(static_cast<int>(i), static_cast<int>(i - 1)) = 1.0;
    }
    const Eigen::VectorXcd eigenvalues = companion.eigenvalues();
    for (int i = 0; i < eigenvalues.size(); ++i) {
        if (std::abs(eigenvalues(i)) >= 1.0) {
            return false;
        }
    }
    return true;
}

void require_stationary(const std::vector<double>& ar) {
    if (!polynomial_stable(ar)) {
        throw NonStationary("AR polynomial has a root on or inside the unit circle");
    }
}

// ---- partial-autocorrelation reparameterization (Monahan) ----

// Durbin-Levinson: partial autocorrelations in (-1, 1) to coefficients of
// a stable 1 - sum a_i z^i.
std::vector<double> pacf_to_coeffs(const std::vector<double>& pacf) {
    std::vector<double> a(pacf);
    std::vector<double> prev(a.size());
    for (std::size_t j = 1; j < a.size(); ++j) {
        std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(j), prev.begin());
        for (std::size_t k = 0; k < j; ++k) {
            a[k] = prev[k] - a[j] * prev[j - 1 - k];
        }
    }
    return a;
}

// Inverse recursion; empty when the coefficients are not stable.
std::optional<std::vector<double>> coeffs_to_pacf(const std::vector<double>& coeffs) {
    std::vector<double> a(coeffs);
    for (std::size_t j = a.size(); j-- > 1;) {
        const double rj = a[j];
        if (!(std::abs(rj) < 1.0)) return std::nullopt;
        const double denom = 1.0 - rj * rj;
        std::vector<double> prev(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(j));
        for (std::size_t k = 0; k < j; ++k) {
            a[k] = (prev[k] + rj * prev[j - 1 - k]) / denom;
        }
    }
    for (const double r : a) {
        if (!(std::abs(r) < 1.0)) return std::nullopt;
    }
    return a;
}

std::vector<double> unconstrained_to_coeffs(const double* u, int m) {
    std::vector<double> pacf(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        pacf[static_cast<std::size_t>(i)] = std::tanh(u[i]);
    }
    return pacf_to_coeffs(pacf);
}

std::vector<double> coeffs_to_unconstrained(const std::vector<double>& coeffs) {
    auto pacf = coeffs_to_pacf(coeffs);
    if (!pacf) {
        return std::vector<double>(coeffs.size(), 0.0);
    }
    std::vector<double> u(pacf->size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = std::clamp((*pacf)[i], -0.999999, 0.999999);
        u[i] = std::atanh(r);
    }
    return u;
}

// Scales coefficients until the polynomial is stable; multiplying c_i by
// s^i pushes every root outward by 1/s.
void shrink_into_stable_region(std::vector<double>& coeffs) {
    for (int attempt = 0; attempt < 400 && !polynomial_stable(coeffs); ++attempt) {
        double scale = 0.95;
        for (auto& c : coeffs) {
            c *= scale;
            scale *= 0.95;
        }
    }
    if (!polynomial_stable(coeffs)) {
        std::fill(coeffs.begin(), coeffs.end(), 0.0);
    }
}

// ---- exact likelihood via the innovations form of the state space ----
//
// State dimension r = max(p, q + 1); transition has phi down the first
// column and an identity superdiagonal; the disturbance loading is
// (1, theta_1, ..., theta_{r-1}). The observation is the first state
// component. Run with unit innovation variance so sigma2 can be profiled.

struct UnitFilterResult {
    std::vector<double> innovations;   // v_t
    std::vector<double> scales;        // F_t under unit innovation variance
    double sum_log_scale = 0.0;
    double sum_scaled_sq = 0.0;        // sum v_t^2 / F_t
};

Eigen::MatrixXd solve_stationary_covariance(const Eigen::MatrixXd& T, const Eigen::MatrixXd& Q) {
    const int r = static_cast<int>(T.rows());
    const int r2 = r * r;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(r2, r2);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            for (int k = 0; k < r; ++k) {
                for (int l = 0; l < r; ++l) {
                    M(i + j * r, k + l * r) -= T(i, k) * T(j, l);
                }
            }
        }
    }
    Eigen::VectorXd q(r2);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            q(i + j * r) = Q(i, j);
        }
    }
    const Eigen::VectorXd vec = M.partialPivLu().solve(q);
    Eigen::MatrixXd P(r, r);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            P(i, j) = vec(i + j * r);
        }
    }
    return 0.5 * (P + P.transpose());
}

UnitFilterResult kalman_unit_filter(const std::vector<double>& phi,
                                    const std::vector<double>& theta,
                                    const std::vector<double>& w) {
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    const int r = std::max(p, q + 1);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < p; ++i) {
        T(i, 0) = phi[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i + 1 < r; ++i) {
        T(i, i + 1) = 1.0;
    }
    Eigen::VectorXd R = Eigen::VectorXd::Zero(r);
    R(0) = 1.0;
    for (int j = 0; j < q; ++j) {
        R(j + 1) = theta[static_cast<std::size_t>(j)];
    }
    const Eigen::MatrixXd RRt = R * R.transpose();

    Eigen::MatrixXd P = solve_stationary_covariance(T, RRt);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(r);

    UnitFilterResult out;
    out.innovations.reserve(w.size());
    out.scales.reserve(w.size());

    bool steady = false;
    double F = 1.0;
    Eigen::VectorXd gain = Eigen::VectorXd::Zero(r);
    for (const double x : w) {
        if (!steady) {
            F = P(0, 0);
            gain = P.col(0) / F;
        }
        const double v = x - a(0);
        out.innovations.push_back(v);
        out.scales.push_back(F);
        out.sum_log_scale += std::log(F);
        out.sum_scaled_sq += v * v / F;

        a = T * (a + gain * v);
        if (!steady) {
            Eigen::MatrixXd filtered = P - (P.col(0) * P.row(0)) / F;
            Eigen::MatrixXd next = T * filtered * T.transpose() + RRt;
            next = 0.5 * (next + next.transpose());
            if ((next - P).cwiseAbs().maxCoeff() < 1e-13) {
                steady = true;
            }
            P = std::move(next);
        }
    }
    return out;
}

std::vector<double> demeaned_difference(const std::vector<double>& values, int d, double mean) {
    std::vector<double> w = difference(values, d);
    for (double& x : w) {
        x -= mean;
    }
    return w;
}

// Concentrated negative log-likelihood given a unit-variance filter pass.
double concentrated_negloglik(const UnitFilterResult& f, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double s2 = f.sum_scaled_sq / nn;
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
        return std::numeric_limits<double>::infinity();
    }
    return 0.5 * (nn * std::log(2.0 * std::numbers::pi) + nn + nn * std::log(s2) +
                  f.sum_log_scale);
}

// ---- Nelder-Mead simplex ----

struct SimplexResult {
    Eigen::VectorXd x;
    double fx = std::numeric_limits<double>::infinity();
    bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                          int max_iterations, double relative_tolerance) {
    const int dim = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> vertex(static_cast<std::size_t>(dim) + 1, x0);
    std::vector<double> value(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i < dim; ++i) {
        vertex[static_cast<std::size_t>(i) + 1](i) += step(i);
    }
    for (std::size_t i = 0; i < vertex.size(); ++i) {
        value[i] = f(vertex[i]);
    }

    const auto order_vertices = [&] {
        std::vector<std::size_t> idx(vertex.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        std::vector<Eigen::VectorXd> v2;
        std::vector<double> f2;
        v2.reserve(vertex.size());
        f2.reserve(vertex.size());
        for (const auto i : idx) {
            v2.push_back(vertex[i]);
            f2.push_back(value[i]);
        }
        vertex = std::move(v2);
        value = std::move(f2);
    };

    const auto diameter = [&] {
        double dia = 0.0;
        for (std::size_t i = 1; i < vertex.size(); ++i) {
            dia = std::max(dia, (vertex[i] - vertex[0]).cwiseAbs().maxCoeff());
        }
        return dia;
    };

    SimplexResult result;
    for (int iter = 0; iter < max_iterations; ++iter) {
        order_vertices();
        if (diameter() <= relative_tolerance * (1.0 + vertex[0].cwiseAbs().maxCoeff())) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i + 1 < vertex.size(); ++i) {
            centroid += vertex[i];
        }
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd& worst = vertex.back();
        const Eigen::VectorXd reflected = centroid + (centroid - worst);
        const double f_reflected = f(reflected);

        if (f_reflected < value[0]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                vertex.back() = expanded;
                value.back() = f_expanded;
            } else {
                vertex.back() = reflected;
                value.back() = f_reflected;
            }
        } else if (f_reflected < value[value.size() - 2]) {
            vertex.back() = reflected;
            value.back() = f_reflected;
        } else {
            const bool outside = f_reflected < value.back();
            const Eigen::VectorXd contracted =
                outside ? centroid + 0.5 * (reflected - centroid)
                        : centroid + 0.5 * (worst - centroid);
            const double f_contracted = f(contracted);
            if (f_contracted < std::min(f_reflected, value.back())) {
                vertex.back() = contracted;
                value.back() = f_contracted;
            } else {
                for (std::size_t i = 1; i < vertex.size(); ++i) {
                    vertex[i] = vertex[0] + 0.5 * (vertex[i] - vertex[0]);
                    value[i] = f(vertex[i]);
                }
            }
        }
    }
    order_vertices();
    result.x = vertex[0];
    result.fx = value[0];
    return result;
}

// ---- Hannan-Rissanen start values ----

Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    return design.colPivHouseholderQr().solve(target);
}

struct StartValues {
    std::vector<double> ar;
    std::vector<double> ma;
    double mean = 0.0;
};

StartValues hannan_rissanen(const std::vector<double>& w, const ArimaOrder& order,
                            bool enforce_invertibility) {
    const int m = static_cast<int>(w.size());
    const int p = order.p;
    const int q = order.q;

    StartValues start;
    start.mean = order.include_constant ? sample_mean(w) : 0.0;
    start.ar.assign(static_cast<std::size_t>(p), 0.0);
    start.ma.assign(static_cast<std::size_t>(q), 0.0);

    std::vector<double> z(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        z[i] = w[i] - start.mean;
    }

    const auto fill_from = [&](const Eigen::VectorXd& beta) {
        for (int i = 0; i < p; ++i) {
            start.ar[static_cast<std::size_t>(i)] = beta(i);
        }
        for (int j = 0; j < q; ++j) {
            start.ma[static_cast<std::size_t>(j)] = beta(p + j);
        }
    };

    if (q == 0) {
        if (p > 0 && m > 2 * p + 1) {
            Eigen::MatrixXd design(m - p, p);
            Eigen::VectorXd target(m - p);
            for (int t = p; t < m; ++t) {
                target(t - p) = z[static_cast<std::size_t>(t)];
                for (int i = 0; i < p; ++i) {
                    design(t - p, i) = z[static_cast<std::size_t>(t - 1 - i)];
                }
            }
            fill_from(least_squares(design, target));
        }
    } else {
        // Long autoregression for innovation estimates, then the joint
        // regression on lagged values and lagged innovations.
        int h = static_cast<int>(std::lround(10.0 * std::log10(std::max(m, 10))));
        h = std::max(h, p + q);
        h = std::min(h, m / 2 - 1);
        if (h >= 1 && m - h - q > p + q + 1) {
            Eigen::MatrixXd design(m - h, h);
            Eigen::VectorXd target(m - h);
            for (int t = h; t < m; ++t) {
                target(t - h) = z[static_cast<std::size_t>(t)];
                for (int i = 0; i < h; ++i) {
                    design(t - h, i) = z[static_cast<std::size_t>(t - 1 - i)];
                }
            }
            const Eigen::VectorXd alpha = least_squares(design, target);
            std::vector<double> eps(w.size(), 0.0);
            for (int t = h; t < m; ++t) {
                double pred = 0.0;
                for (int i = 0; i < h; ++i) {
                    pred += alpha(i) * z[static_cast<std::size_t>(t - 1 - i)];
                }
                eps[static_cast<std::size_t>(t)] = z[static_cast<std::size_t>(t)] - pred;
            }
            const int t0 = h + q;
            Eigen::MatrixXd joint(m - t0, p + q);
            Eigen::VectorXd jt(m - t0);
            for (int t = t0; t < m; ++t) {
                jt(t - t0) = z[static_cast<std::size_t>(t)];
                for (int i = 0; i < p; ++i) {
                    joint(t - t0, i) = z[static_cast<std::size_t>(t - 1 - i)];
                }
                for (int j = 0; j < q; ++j) {
                    joint(t - t0, p + j) = eps[static_cast<std::size_t>(t - 1 - j)];
                }
            }
            fill_from(least_squares(joint, jt));
        }
    }

    for (double& c : start.ar) {
        if (!std::isfinite(c)) c = 0.0;
    }
    for (double& c : start.ma) {
        if (!std::isfinite(c)) c = 0.0;
    }
    shrink_into_stable_region(start.ar);
    if (enforce_invertibility) {
        std::vector<double> negated(start.ma.size());
        for (std::size_t j = 0; j < start.ma.size(); ++j) {
            negated[j] = -start.ma[j];
        }
        shrink_into_stable_region(negated);
        for (std::size_t j = 0; j < start.ma.size(); ++j) {
            start.ma[j] = -negated[j];
        }
    }
    return start;
}

// ---- parameter packing for the optimizer ----

struct ParamCoding {
    int p = 0;
    int q = 0;
    bool constant = false;
    bool invertible = false;

    int dim() const { return p + q + (constant ? 1 : 0); }

    ArimaParams decode(const Eigen::VectorXd& u) const {
        ArimaParams params;
        params.ar = p > 0 ? unconstrained_to_coeffs(u.data(), p) : std::vector<double>{};
        if (q > 0) {
            if (invertible) {
                std::vector<double> a = unconstrained_to_coeffs(u.data() + p, q);
                params.ma.resize(static_cast<std::size_t>(q));
                for (int j = 0; j < q; ++j) {
                    params.ma[static_cast<std::size_t>(j)] = -a[static_cast<std::size_t>(j)];
                }
            } else {
                params.ma.assign(u.data() + p, u.data() + p + q);
            }
        }
        params.mean = constant ? u(p + q) : 0.0;
        return params;
    }

    Eigen::VectorXd encode(const StartValues& start) const {
        Eigen::VectorXd u(dim());
        const auto u_ar = coeffs_to_unconstrained(start.ar);
        for (int i = 0; i < p; ++i) {
            u(i) = u_ar[static_cast<std::size_t>(i)];
        }
        if (invertible) {
            std::vector<double> negated(start.ma.size());
            for (std::size_t j = 0; j < start.ma.size(); ++j) {
                negated[j] = -start.ma[j];
            }
            const auto u_ma = coeffs_to_unconstrained(negated);
            for (int j = 0; j < q; ++j) {
                u(p + j) = u_ma[static_cast<std::size_t>(j)];
            }
        } else {
            for (int j = 0; j < q; ++j) {
                u(p + j) = start.ma[static_cast<std::size_t>(j)];
            }
        }
        if (constant) {
            u(p + q) = start.mean;
        }
        return u;
    }
};

std::vector<double> series_tail(const std::vector<double>& values, int count) {
    const int n = static_cast<int>(values.size());
    const int keep = std::min(count, n);
    return std::vector<double>(values.end() - keep, values.end());
}

// ---- deterministic normal draws (Box-Muller over mt19937_64 bits) ----

class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Coefficients c_i of phi(B) * (1 - B)^d written as 1 - sum c_i B^i.
std::vector<double> integrated_ar_coeffs(const std::vector<double>& ar, int d) {
    // Work with the full polynomial A(z) = 1 - sum phi_i z^i, multiply by
    // (1 - z)^d, then flip signs back.
    std::vector<double> poly(ar.size() + 1, 0.0);
    poly[0] = 1.0;
    for (std::size_t i = 0; i < ar.size(); ++i) {
        poly[i + 1] = -ar[i];
    }
    for (int pass = 0; pass < d; ++pass) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i];
        }
        poly = std::move(next);
    }
    std::vector<double> coeffs(poly.size() - 1);
    for (std::size_t i = 1; i < poly.size(); ++i) {
        coeffs[i - 1] = -poly[i];
    }
    return coeffs;
}

}  // namespace

std::vector<double> difference(const std::vector<double>& values, int d) {
    if (d < 0) {
        throw std::invalid_argument("differencing degree must be non-negative");
    }
    if (static_cast<int>(values.size()) <= d) {
        throw TooShort("need more than d observations to difference");
    }
    std::vector<double> out = values;
    for (int pass = 0; pass < d; ++pass) {
        for (std::size_t i = out.size() - 1; i > 0; --i) {
            out[i] -= out[i - 1];
        }
        out.erase(out.begin());
    }
    return out;
}

double log_likelihood(const ArimaOrder& order, const ArimaParams& params,
                      const std::vector<double>& values) {
    validate_order(order);
    validate_params(order, params);
    require_finite(values);
    const int m = static_cast<int>(values.size()) - order.d;
    if (static_cast<int>(values.size()) <= order.d ||
        m < std::max(order.p, order.q) + 1) {
        throw TooShort("series too short for the requested order");
    }
    require_stationary(params.ar);

    const std::vector<double> w = demeaned_difference(values, order.d, params.mean);
    const UnitFilterResult f = kalman_unit_filter(params.ar, params.ma, w);
    if (params.sigma2 == 0.0) {
        if (f.sum_scaled_sq > 0.0) {
            throw DegenerateVariance("sigma2 is zero but the residuals are not");
        }
        return std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(w.size());
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * params.sigma2) + f.sum_log_scale +
                   f.sum_scaled_sq / params.sigma2);
}

double css(const ArimaOrder& order, const ArimaParams& params,
           const std::vector<double>& values) {
    validate_order(order);
    validate_params(order, params);
    require_finite(values);
    const int m = static_cast<int>(values.size()) - order.d;
    if (static_cast<int>(values.size()) <= order.d ||
        m < std::max(order.p, order.q) + 1) {
        throw TooShort("series too short for the requested order");
    }
    require_stationary(params.ar);

    const std::vector<double> w = demeaned_difference(values, order.d, params.mean);
    std::vector<double> eps(w.size(), 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        double e = w[t];
        for (int i = 1; i <= order.p; ++i) {
            if (t >= static_cast<std::size_t>(i)) {
                e -= params.ar[static_cast<std::size_t>(i - 1)] * w[t - static_cast<std::size_t>(i)];
            }
        }
        for (int j = 1; j <= order.q; ++j) {
            if (t >= static_cast<std::size_t>(j)) {
                e -= params.ma[static_cast<std::size_t>(j - 1)] * eps[t - static_cast<std::size_t>(j)];
            }
        }
        eps[t] = e;
        acc += e * e;
    }
    return acc;
}

ArimaFit fit(const std::vector<double>& values, const ArimaOrder& order,
             const FitOptions& options) {
    validate_order(order);
    require_finite(values);
    if (options.max_iterations < 1 || !(options.relative_tolerance > 0.0)) {
        throw std::invalid_argument("fit options out of range");
    }

    const int k = param_count(order);
    const int m = static_cast<int>(values.size()) - order.d;
    if (static_cast<int>(values.size()) <= order.d || m < k + 2) {
        throw TooShort("need at least k + 2 observations after differencing");
    }

    const std::vector<double> w = difference(values, order.d);
    if (sample_variance(w) == 0.0) {
        throw DegenerateVariance("zero-variance input");
    }

    ArimaFit result;
    result.order = order;
    result.nobs = m;
    result.tail = series_tail(values, order.p + order.d);

    bool converged = true;
    if (order.p + order.q == 0) {
        result.params.mean = order.include_constant ? sample_mean(w) : 0.0;
        result.residuals.resize(w.size());
        double ssq = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            result.residuals[i] = w[i] - result.params.mean;
            ssq += result.residuals[i] * result.residuals[i];
        }
        result.params.sigma2 = ssq / static_cast<double>(m);
        if (result.params.sigma2 == 0.0) {
            throw DegenerateVariance("residual variance is zero");
        }
        result.loglik = -0.5 * static_cast<double>(m) *
                        (std::log(2.0 * std::numbers::pi * result.params.sigma2) + 1.0);
    } else {
        const ParamCoding coding{order.p, order.q, order.include_constant,
                                 options.enforce_invertibility};
        const StartValues start = hannan_rissanen(w, order, options.enforce_invertibility);
        const Eigen::VectorXd u0 = coding.encode(start);

        std::vector<double> scratch(w.size());
        const auto objective = [&](const Eigen::VectorXd& u) -> double {
            const ArimaParams trial = coding.decode(u);
            for (std::size_t i = 0; i < w.size(); ++i) {
                scratch[i] = w[i] - trial.mean;
            }
            const UnitFilterResult f = kalman_unit_filter(trial.ar, trial.ma, scratch);
            const double nll = concentrated_negloglik(f, w.size());
            return std::isfinite(nll) ? nll : std::numeric_limits<double>::max();
        };

        Eigen::VectorXd step(coding.dim());
        for (int i = 0; i < order.p + order.q; ++i) {
            step(i) = 0.1;
        }
        if (order.include_constant) {
            const double scale = std::sqrt(sample_variance(w));
            step(order.p + order.q) = 0.1 * (scale > 0.0 ? scale : 1.0);
        }

        const SimplexResult best = nelder_mead(objective, u0, step, options.max_iterations,
                                               options.relative_tolerance);
        converged = best.converged;

        result.params = coding.decode(best.x);
        for (std::size_t i = 0; i < w.size(); ++i) {
            scratch[i] = w[i] - result.params.mean;
        }
        const UnitFilterResult f = kalman_unit_filter(result.params.ar, result.params.ma, scratch);
        result.params.sigma2 = f.sum_scaled_sq / static_cast<double>(m);
        if (result.params.sigma2 == 0.0) {
            throw DegenerateVariance("residual variance is zero");
        }
        result.residuals = f.innovations;
        result.loglik = -0.5 * (static_cast<double>(m) *
                                    (std::log(2.0 * std::numbers::pi * result.params.sigma2) + 1.0) +
                                f.sum_log_scale);
    }

    result.criteria.aic = aic(result.loglik, k);
    result.criteria.aicc = aicc(result.criteria.aic, k, m);
    result.criteria.bic = bic(result.loglik, k, m);

    if (!converged) {
        throw NoConvergence("simplex did not collapse within the iteration cap", result);
    }
    return result;
}

std::vector<double> simulate(const ArimaOrder& order, const ArimaParams& params, int n,
                             std::uint64_t seed) {
    validate_order(order);
    validate_params(order, params);
    if (n <= order.d) {
        throw std::invalid_argument("simulate needs n > d");
    }
    require_stationary(params.ar);

    const int m = n - order.d;
    const int burn = std::max(order.p, order.q) + 100;
    const double sd = std::sqrt(params.sigma2);

    NormalSampler normal(seed);
    std::vector<double> dev(static_cast<std::size_t>(burn + m), 0.0);
    std::vector<double> eps(static_cast<std::size_t>(burn + m), 0.0);
    for (int t = 0; t < burn + m; ++t) {
        double e = sd * normal();
        double x = e;
        for (int i = 1; i <= order.p; ++i) {
            if (t - i >= 0) {
                x += params.ar[static_cast<std::size_t>(i - 1)] * dev[static_cast<std::size_t>(t - i)];
            }
        }
        for (int j = 1; j <= order.q; ++j) {
            if (t - j >= 0) {
                x += params.ma[static_cast<std::size_t>(j - 1)] * eps[static_cast<std::size_t>(t - j)];
            }
        }
        dev[static_cast<std::size_t>(t)] = x;
        eps[static_cast<std::size_t>(t)] = e;
    }

    std::vector<double> out(dev.end() - m, dev.end());
    for (double& x : out) {
        x += params.mean;
    }
    for (int pass = 0; pass < order.d; ++pass) {
        std::vector<double> integrated(out.size() + 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            integrated[i + 1] = integrated[i] + out[i];
        }
        out = std::move(integrated);
    }
    return out;
}

ForecastResult forecast(const ArimaFit& fit, int h, Date origin) {
    validate_order(fit.order);
    validate_params(fit.order, fit.params);
    if (h < 1) {
        throw std::invalid_argument("forecast horizon must be at least 1");
    }
    const int p = fit.order.p;
    const int q = fit.order.q;
    const int d = fit.order.d;
    const double mean = fit.params.mean;

    // Differenced-scale history as deviations from the mean; absent tail
    // entries count as the mean (deviation zero).
    std::vector<double> dev_history(static_cast<std::size_t>(p), 0.0);
    if (p > 0 && static_cast<int>(fit.tail.size()) > d) {
        const std::vector<double> diffed = difference(fit.tail, d);
        const int have = std::min<int>(p, static_cast<int>(diffed.size()));
        for (int i = 0; i < have; ++i) {
            dev_history[static_cast<std::size_t>(p - 1 - i)] =
                diffed[diffed.size() - 1 - static_cast<std::size_t>(i)] - mean;
        }
    }
    // Most recent q residuals, most recent last; short histories left-pad
    // with zero.
    std::vector<double> eps_history(static_cast<std::size_t>(q), 0.0);
    const int have_eps = std::min<int>(q, static_cast<int>(fit.residuals.size()));
    for (int i = 0; i < have_eps; ++i) {
        eps_history[static_cast<std::size_t>(q - 1 - i)] =
            fit.residuals[fit.residuals.size() - 1 - static_cast<std::size_t>(i)];
    }

    std::vector<double> forecast_dev(static_cast<std::size_t>(h), 0.0);
    std::vector<double> points_diff(static_cast<std::size_t>(h), 0.0);
    for (int j = 1; j <= h; ++j) {
        double acc = 0.0;
        for (int i = 1; i <= p; ++i) {
            const int t = j - i;  // horizon index of the lagged value
            const double dev = t >= 1 ? forecast_dev[static_cast<std::size_t>(t - 1)]
                                      : dev_history[static_cast<std::size_t>(p - 1 + t)];
            acc += fit.params.ar[static_cast<std::size_t>(i - 1)] * dev;
        }
        for (int f = 1; f <= q; ++f) {
            const int t = j - f;
            if (t < 1) {  // lag reaches into the sample
                acc += fit.params.ma[static_cast<std::size_t>(f - 1)] *
                       eps_history[static_cast<std::size_t>(q - 1 + t)];
            }
        }
        forecast_dev[static_cast<std::size_t>(j - 1)] = acc;
        points_diff[static_cast<std::size_t>(j - 1)] = mean + acc;
    }

    ForecastResult result;
    result.origin = origin;
    if (d == 0) {
        result.points = std::move(points_diff);
    } else {
        // Seed the integration with the last value at every differencing
        // level below d, then cascade each step back up to the level scale.
        std::vector<double> last(static_cast<std::size_t>(d), 0.0);
        if (static_cast<int>(fit.tail.size()) >= d) {
            std::vector<double> level = fit.tail;
            for (int l = 0; l < d; ++l) {
                last[static_cast<std::size_t>(l)] = level.back();
                if (l + 1 < d) {
                    level = difference(level, 1);
                }
            }
        }
        result.points.resize(static_cast<std::size_t>(h));
        for (int j = 0; j < h; ++j) {
            double x = points_diff[static_cast<std::size_t>(j)];
            for (int l = d - 1; l >= 0; --l) {
                x += last[static_cast<std::size_t>(l)];
                last[static_cast<std::size_t>(l)] = x;
            }
            result.points[static_cast<std::size_t>(j)] = x;
        }
    }

    // psi weights of the integrated process drive the forecast-error
    // variance: var(h) = sigma2 * sum_{j<h} psi_j^2.
    const std::vector<double> ar_star = integrated_ar_coeffs(fit.params.ar, d);
    std::vector<double> psi(static_cast<std::size_t>(h), 0.0);
    psi[0] = 1.0;
    for (int j = 1; j < h; ++j) {
        double acc = j <= q ? fit.params.ma[static_cast<std::size_t>(j - 1)] : 0.0;
        const int top = std::min<int>(j, static_cast<int>(ar_star.size()));
        for (int i = 1; i <= top; ++i) {
            acc += ar_star[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(j - i)];
        }
        psi[static_cast<std::size_t>(j)] = acc;
    }
    result.std_errors.resize(static_cast<std::size_t>(h));
    double cumulative = 0.0;
    for (int j = 0; j < h; ++j) {
        cumulative += psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j)];
        result.std_errors[static_cast<std::size_t>(j)] = std::sqrt(fit.params.sigma2 * cumulative);
    }
    return result;
}

std::vector<long long> ForecastResult::rounded() const {
    std::vector<long long> out;
    out.reserve(points.size());
    for (const double point : points) {
        out.push_back(round_half_away_from_zero(point));
    }
    return out;
}

std::vector<Date> ForecastResult::dates() const {
    std::vector<Date> out;
    out.reserve(points.size());
    Date day = origin;
    for (std::size_t i = 0; i < points.size(); ++i) {
        day += std::chrono::days{1};
        out.push_back(day);
    }
    return out;
}

std::string serialize_fit(const ArimaFit& fit) {
    nlohmann::json doc;
    doc["order"] = {{"p", fit.order.p},
                    {"d", fit.order.d},
                    {"q", fit.order.q},
                    {"constant", fit.order.include_constant}};
    doc["mean"] = fit.params.mean;
    doc["ar"] = fit.params.ar;
    doc["ma"] = fit.params.ma;
    doc["sigma2"] = fit.params.sigma2;
    doc["loglik"] = fit.loglik;
    doc["nobs"] = fit.nobs;
    doc["criteria"] = {{"aic", fit.criteria.aic},
                       {"aicc", fit.criteria.aicc},
                       {"bic", fit.criteria.bic}};
    if (!fit.residuals.empty()) {
        doc["residuals"] = fit.residuals;
    }
    if (!fit.tail.empty()) {
        doc["tail"] = fit.tail;
    }
    return doc.dump(2) + "\n";
}

ArimaFit parse_fit(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid fit document: ") + e.what());
    }
    try {
        ArimaFit fit;
        const auto& order = doc.at("order");
        fit.order.p = order.at("p").get<int>();
        fit.order.d = order.at("d").get<int>();
        fit.order.q = order.at("q").get<int>();
        fit.order.include_constant = order.at("constant").get<bool>();
        fit.params.mean = doc.at("mean").get<double>();
        fit.params.ar = doc.at("ar").get<std::vector<double>>();
        fit.params.ma = doc.at("ma").get<std::vector<double>>();
        fit.params.sigma2 = doc.at("sigma2").get<double>();
        fit.loglik = doc.at("loglik").get<double>();
        fit.nobs = doc.at("nobs").get<int>();
        const auto& criteria = doc.at("criteria");
        fit.criteria.aic = criteria.at("aic").get<double>();
        fit.criteria.aicc = criteria.at("aicc").get<double>();
        fit.criteria.bic = criteria.at("bic").get<double>();
        if (doc.contains("residuals")) {
            fit.residuals = doc.at("residuals").get<std::vector<double>>();
        }
        if (doc.contains("tail")) {
            fit.tail = doc.at("tail").get<std::vector<double>>();
        }
        validate_order(fit.order);
        validate_params(fit.order, fit.params);
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid fit document: ") + e.what());
    }
}

}  // namespace ricecast
