#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ricecast/arima.hpp"

namespace ricecast {

enum class Criterion { aic, aicc, bic };

Criterion criterion_from_string(std::string_view text);
const char* to_string(Criterion criterion);

/// When to estimate the constant during the order search.
enum class ConstantPolicy {
    level_only,  ///< include the constant iff d == 0 (default)
    always,
    never,
};

struct SearchConfig {
    int max_p = 5;
    int max_d = 2;
    int max_q = 5;
    Criterion criterion = Criterion::aicc;
    ConstantPolicy constant_policy = ConstantPolicy::level_only;
    FitOptions fit_options{};
};

enum class CandidateStatus {
    ok,
    no_convergence,
    too_short,
    degenerate_variance,
    non_stationary,
    failed,
};

const char* to_string(CandidateStatus status);

/// One grid cell of the search. Criteria are NaN unless the fit produced
/// a usable likelihood (status ok or no_convergence).
struct CandidateRecord {
    ArimaOrder order;
    int k = 0;
    int nobs = 0;
    double loglik = 0.0;
    InformationCriteria criteria;
    CandidateStatus status = CandidateStatus::failed;
};

/// Every candidate of the grid, converged ones first in criterion order,
/// plus the winning fit.
struct SearchReport {
    Criterion criterion = Criterion::aicc;
    std::vector<CandidateRecord> ranked;
    ArimaFit winner;
};

/// Number of estimated parameters: p + q + constant + innovation variance.
int param_count(const ArimaOrder& order);

/// 2k - 2 ln(L).
double aic(double loglik, int k);

/// AIC + (2k^2 + 2k) / (n - k - 1); requires n - k - 1 > 0.
double aicc(double aic_value, int k, int n);

/// k ln(n) - 2 ln(L).
double bic(double loglik, int k, int n);

double criterion_value(const InformationCriteria& criteria, Criterion criterion);

/// Total order used to rank candidates: converged before failed, then by
/// criterion value, then smaller k, then lexicographic (p, d, q).
bool rank_less(const CandidateRecord& a, const CandidateRecord& b, Criterion criterion);

/// Exhaustive search over 0..max_p x 0..max_d x 0..max_q under the
/// constant policy. Candidates that fail to fit are recorded with their
/// status and excluded from the ranking. Deterministic.
SearchReport auto_arima(const std::vector<double>& values, const SearchConfig& config = {});

std::string search_report_to_json(const SearchReport& report);

/// Ranking table: p,d,q,aic,aicc,bic,status (one row per candidate).
std::string ranking_csv(const SearchReport& report);

}  // namespace ricecast
