#include "ricecast/select.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace ricecast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool include_constant_for(ConstantPolicy policy, int d) {
    switch (policy) {
        case ConstantPolicy::level_only:
            return d == 0;
        case ConstantPolicy::always:
            return true;
        case ConstantPolicy::never:
            return false;
    }
    return d == 0;
}

void append_number(std::string& out, double value) {
    if (std::isnan(value)) {
        out += "NA";
        return;
    }
    char buffer[32];
    const int n = std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    out.append(buffer, static_cast<std::size_t>(n));
}

}  // namespace

Criterion criterion_from_string(std::string_view text) {
    if (text == "aic") return Criterion::aic;
    if (text == "aicc") return Criterion::aicc;
    if (text == "bic") return Criterion::bic;
    throw std::invalid_argument("unknown criterion '" + std::string(text) +
                                "' (expected aic, aicc or bic)");
}

const char* to_string(Criterion criterion) {
    switch (criterion) {
        case Criterion::aic:
            return "aic";
        case Criterion::aicc:
            return "aicc";
        case Criterion::bic:
            return "bic";
    }
    return "aicc";
}

const char* to_string(CandidateStatus status) {
    switch (status) {
        case CandidateStatus::ok:
            return "ok";
        case CandidateStatus::no_convergence:
            return "no_convergence";
        case CandidateStatus::too_short:
            return "too_short";
        case CandidateStatus::degenerate_variance:
            return "degenerate_variance";
        case CandidateStatus::non_stationary:
            return "non_stationary";
        case CandidateStatus::failed:
            return "failed";
    }
    return "failed";
}

int param_count(const ArimaOrder& order) {
    if (order.p < 0 || order.q < 0 || order.d < 0) {
        throw std::invalid_argument("ARIMA order must be non-negative");
    }
    return order.p + order.q + (order.include_constant ? 1 : 0) + 1;
}

double aic(double loglik, int k) {
    if (k < 0) {
        throw std::invalid_argument("k must be non-negative");
    }
    return 2.0 * static_cast<double>(k) - 2.0 * loglik;
}

double aicc(double aic_value, int k, int n) {
    if (k < 0) {
        throw std::invalid_argument("k must be non-negative");
    }
    if (n - k - 1 <= 0) {
        throw SampleTooSmall("aicc needs n - k - 1 > 0 (n = " + std::to_string(n) +
                             ", k = " + std::to_string(k) + ")");
    }
    const double kk = static_cast<double>(k);
    return aic_value + (2.0 * kk * kk + 2.0 * kk) / static_cast<double>(n - k - 1);
}

double bic(double loglik, int k, int n) {
    if (k < 0 || n < 1) {
        throw std::invalid_argument("bic needs k >= 0 and n >= 1");
    }
    return static_cast<double>(k) * std::log(static_cast<double>(n)) - 2.0 * loglik;
}

double criterion_value(const InformationCriteria& criteria, Criterion criterion) {
    switch (criterion) {
        case Criterion::aic:
            return criteria.aic;
        case Criterion::aicc:
            return criteria.aicc;
        case Criterion::bic:
            return criteria.bic;
    }
    return criteria.aicc;
}

bool rank_less(const CandidateRecord& a, const CandidateRecord& b, Criterion criterion) {
    const bool a_ok = a.status == CandidateStatus::ok;
    const bool b_ok = b.status == CandidateStatus::ok;
    if (a_ok != b_ok) {
        return a_ok;
    }
    if (a_ok && b_ok) {
        const double va = criterion_value(a.criteria, criterion);
        const double vb = criterion_value(b.criteria, criterion);
        if (va != vb) return va < vb;
        if (a.k != b.k) return a.k < b.k;
    }
    if (a.order.p != b.order.p) return a.order.p < b.order.p;
    if (a.order.d != b.order.d) return a.order.d < b.order.d;
    return a.order.q < b.order.q;
}

SearchReport auto_arima(const std::vector<double>& values, const SearchConfig& config) {
    if (config.max_p < 0 || config.max_p > 12 || config.max_d < 0 || config.max_d > 2 ||
        config.max_q < 0 || config.max_q > 12) {
        throw std::invalid_argument("search bounds exceed engine limits");
    }

    SearchReport report;
    report.criterion = config.criterion;
    report.ranked.reserve(static_cast<std::size_t>((config.max_p + 1) * (config.max_d + 1) *
                                                   (config.max_q + 1)));

    std::optional<ArimaFit> best;
    std::optional<CandidateRecord> best_record;

    for (int d = 0; d <= config.max_d; ++d) {
        for (int p = 0; p <= config.max_p; ++p) {
            for (int q = 0; q <= config.max_q; ++q) {
                const ArimaOrder order{p, d, q, include_constant_for(config.constant_policy, d)};
                CandidateRecord record;
                record.order = order;
                record.k = param_count(order);
                record.loglik = kNaN;
                record.criteria = {kNaN, kNaN, kNaN};

                const auto note = [&](const ArimaFit& candidate, CandidateStatus status) {
                    record.nobs = candidate.nobs;
                    record.loglik = candidate.loglik;
                    record.criteria = candidate.criteria;
                    record.status = status;
                };

                try {
                    const ArimaFit candidate = fit(values, order, config.fit_options);
                    note(candidate, CandidateStatus::ok);
                    if (!best_record || rank_less(record, *best_record, config.criterion)) {
                        best = candidate;
                        best_record = record;
                    }
                } catch (const NoConvergence& e) {
                    note(e.best, CandidateStatus::no_convergence);
                } catch (const TooShort&) {
                    record.status = CandidateStatus::too_short;
                } catch (const DegenerateVariance&) {
                    record.status = CandidateStatus::degenerate_variance;
                } catch (const NonStationary&) {
                    record.status = CandidateStatus::non_stationary;
                } catch (const Error&) {
                    record.status = CandidateStatus::failed;
                }
                report.ranked.push_back(record);
            }
        }
    }

    if (!best) {
        throw NoViableModel("no candidate in the search grid produced a converged fit");
    }
    std::stable_sort(report.ranked.begin(), report.ranked.end(),
                     [&](const CandidateRecord& a, const CandidateRecord& b) {
                         return rank_less(a, b, config.criterion);
                     });
    report.winner = std::move(*best);
    return report;
}

std::string search_report_to_json(const SearchReport& report) {
    nlohmann::json doc;
    doc["criterion"] = to_string(report.criterion);
    doc["winner"] = nlohmann::json::parse(serialize_fit(report.winner));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& record : report.ranked) {
        nlohmann::json row;
        row["order"] = {{"p", record.order.p},
                        {"d", record.order.d},
                        {"q", record.order.q},
                        {"constant", record.order.include_constant}};
        row["k"] = record.k;
        row["status"] = to_string(record.status);
        if (record.status == CandidateStatus::ok ||
            record.status == CandidateStatus::no_convergence) {
            row["nobs"] = record.nobs;
            row["loglik"] = record.loglik;
            row["criteria"] = {{"aic", record.criteria.aic},
                               {"aicc", record.criteria.aicc},
                               {"bic", record.criteria.bic}};
        }
        rows.push_back(std::move(row));
    }
    doc["candidates"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string ranking_csv(const SearchReport& report) {
    std::string out = "p,d,q,aic,aicc,bic,status\n";
    for (const auto& record : report.ranked) {
        out += std::to_string(record.order.p);
        out += ',';
        out += std::to_string(record.order.d);
        out += ',';
        out += std::to_string(record.order.q);
        out += ',';
        append_number(out, record.criteria.aic);
        out += ',';
        append_number(out, record.criteria.aicc);
        out += ',';
        append_number(out, record.criteria.bic);
        out += ',';
        out += to_string(record.status);
        out += '\n';
    }
    return out;
}

}  // namespace ricecast
