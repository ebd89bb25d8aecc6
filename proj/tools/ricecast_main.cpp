// ricecast: impute daily price series, fit and select ARIMA models, test
// residuals and emit multi-horizon forecast tables.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ricecast/arima.hpp"
#include "ricecast/csv.hpp"
#include "ricecast/diagnose.hpp"
#include "ricecast/impute.hpp"
#include "ricecast/select.hpp"

namespace {

using namespace ricecast;

constexpr int kExitParse = 1;
constexpr int kExitImpute = 2;
constexpr int kExitNoModel = 3;
constexpr int kExitOther = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << content;
}

void emit(const std::string& output_path, const std::string& content) {
    if (output_path.empty() || output_path == "-") {
        std::cout << content;
    } else {
        write_file(output_path, content);
    }
}

PriceFrame load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return read_price_csv(in);
}

Date parse_date_flag(const std::string& text) {
    const auto day = parse_date(text);
    if (!day) {
        throw Error("invalid date '" + text + "' (expected YYYY-MM-DD)");
    }
    return *day;
}

std::string render_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

std::string forecast_csv(const ForecastResult& result) {
    std::string out = "date,point,std_error,rounded\n";
    const auto dates = result.dates();
    const auto rounded = result.rounded();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        out += format_date(dates[i]);
        out += ',';
        out += render_double(result.points[i]);
        out += ',';
        out += render_double(result.std_errors[i]);
        out += ',';
        out += std::to_string(rounded[i]);
        out += '\n';
    }
    return out;
}

const CalendarSeries& pick_column(const PriceFrame& frame, const std::string& name) {
    if (frame.width() == 0) {
        throw Error("input frame has no value columns");
    }
    if (name.empty()) {
        return frame.columns().front();
    }
    return frame.column(name);
}

std::vector<double> column_values(const PriceFrame& frame, const std::string& name,
                                  bool allow_nocb) {
    const auto imputed = impute_frame(frame, ImputeOptions{allow_nocb});
    return pick_column(imputed, name).dense_values();
}

struct CommonSearchFlags {
    int max_p = 5;
    int max_d = 2;
    int max_q = 5;
    std::string criterion = "aicc";
    bool no_invertibility = false;

    SearchConfig to_config() const {
        SearchConfig config;
        config.max_p = max_p;
        config.max_d = max_d;
        config.max_q = max_q;
        config.criterion = criterion_from_string(criterion);
        config.fit_options.enforce_invertibility = !no_invertibility;
        return config;
    }

    void attach(CLI::App* app) {
        app->add_option("--max-p", max_p, "largest AR order in the grid")
            ->capture_default_str();
        app->add_option("--max-d", max_d, "largest differencing degree")
            ->capture_default_str();
        app->add_option("--max-q", max_q, "largest MA order in the grid")
            ->capture_default_str();
        app->add_option("--criterion", criterion, "ranking criterion: aic, aicc or bic")
            ->capture_default_str();
        app->add_flag("--no-invertibility", no_invertibility,
                      "do not constrain MA coefficients to the invertible region");
    }
};

std::filesystem::path resolve_outdir(const std::string& flag_value) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("RICECAST_OUTDIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

int run(int argc, char** argv) {
    CLI::App app{
        "ricecast: daily price imputation, ARIMA model selection and forecasting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ricecast 0.1.0");

    std::uint64_t seed = 1;
    app.add_option("--seed", seed,
                   "seed for stochastic subcommands (the pipeline itself is deterministic)")
        ->capture_default_str();
    app.fallthrough();

    // ---- impute ----
    auto* impute_cmd = app.add_subcommand(
        "impute", "complete the calendar and carry the last observation forward");
    std::string impute_input;
    std::string impute_output;
    bool impute_nocb = false;
    impute_cmd->add_option("--input", impute_input, "price CSV")->required();
    impute_cmd->add_option("--output", impute_output, "output CSV (default stdout)");
    impute_cmd->add_flag("--allow-nocb", impute_nocb,
                         "backward-fill a leading gap from the first observation");
    impute_cmd->callback([&] {
        const auto frame = load_frame(impute_input);
        const auto imputed = impute_frame(frame, ImputeOptions{impute_nocb});
        emit(impute_output, write_table(imputed));
    });

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "estimate one ARIMA(p,d,q) by exact likelihood");
    std::string fit_input;
    std::string fit_column;
    std::string fit_output;
    int fit_p = 0;
    int fit_d = 0;
    int fit_q = 0;
    bool fit_no_constant = false;
    bool fit_constant = false;
    bool fit_no_invert = false;
    bool fit_nocb = false;
    fit_cmd->add_option("--input", fit_input, "price CSV")->required();
    fit_cmd->add_option("--column", fit_column, "column name (default: first column)");
    fit_cmd->add_option("-p,--p", fit_p, "AR order")->capture_default_str();
    fit_cmd->add_option("-d,--d", fit_d, "differencing degree")->capture_default_str();
    fit_cmd->add_option("-q,--q", fit_q, "MA order")->capture_default_str();
    fit_cmd->add_flag("--constant", fit_constant, "force the constant on");
    fit_cmd->add_flag("--no-constant", fit_no_constant, "force the constant off");
    fit_cmd->add_flag("--no-invertibility", fit_no_invert,
                      "do not constrain MA coefficients to the invertible region");
    fit_cmd->add_flag("--allow-nocb", fit_nocb, "backward-fill a leading gap before fitting");
    fit_cmd->add_option("--output", fit_output, "fit document path (default stdout)");
    fit_cmd->callback([&] {
        const auto frame = load_frame(fit_input);
        const auto values = column_values(frame, fit_column, fit_nocb);
        ArimaOrder order{fit_p, fit_d, fit_q, fit_d == 0};
        if (fit_constant) order.include_constant = true;
        if (fit_no_constant) order.include_constant = false;
        FitOptions options;
        options.enforce_invertibility = !fit_no_invert;
        const auto fitted = fit(values, order, options);
        emit(fit_output, serialize_fit(fitted));
    });

    // ---- autofit ----
    auto* autofit_cmd =
        app.add_subcommand("autofit", "search the order grid and keep the best fit");
    std::string autofit_input;
    std::string autofit_column;
    std::string autofit_output;
    std::string autofit_ranking;
    std::string autofit_report;
    bool autofit_nocb = false;
    CommonSearchFlags autofit_flags;
    autofit_cmd->add_option("--input", autofit_input, "price CSV")->required();
    autofit_cmd->add_option("--column", autofit_column, "column name (default: first column)");
    autofit_flags.attach(autofit_cmd);
    autofit_cmd->add_flag("--allow-nocb", autofit_nocb,
                          "backward-fill a leading gap before fitting");
    autofit_cmd->add_option("--output", autofit_output,
                            "winner fit document path (default stdout)");
    autofit_cmd->add_option("--ranking", autofit_ranking, "ranking CSV path");
    autofit_cmd->add_option("--report", autofit_report, "full search report JSON path");
    autofit_cmd->callback([&] {
        const auto frame = load_frame(autofit_input);
        const auto values = column_values(frame, autofit_column, autofit_nocb);
        const auto report = auto_arima(values, autofit_flags.to_config());
        emit(autofit_output, serialize_fit(report.winner));
        if (!autofit_ranking.empty()) {
            write_file(autofit_ranking, ranking_csv(report));
        }
        if (!autofit_report.empty()) {
            write_file(autofit_report, search_report_to_json(report));
        }
    });

    // ---- forecast ----
    auto* forecast_cmd =
        app.add_subcommand("forecast", "multi-horizon forecast from a fit document");
    std::string forecast_fit;
    std::string forecast_output;
    std::string forecast_origin = "2023-08-31";
    int forecast_horizon = 122;
    forecast_cmd->add_option("--fit", forecast_fit, "fit document")->required();
    forecast_cmd->add_option("--horizon", forecast_horizon, "days ahead")
        ->capture_default_str();
    forecast_cmd->add_option("--origin", forecast_origin, "last in-sample date")
        ->capture_default_str();
    forecast_cmd->add_option("--output", forecast_output, "output CSV (default stdout)");
    forecast_cmd->callback([&] {
        const auto fitted = parse_fit(read_file(forecast_fit));
        const auto result =
            forecast(fitted, forecast_horizon, parse_date_flag(forecast_origin));
        emit(forecast_output, forecast_csv(result));
    });

    // ---- diagnose ----
    auto* diagnose_cmd =
        app.add_subcommand("diagnose", "residual tests from a fit document");
    std::string diagnose_fit;
    std::string diagnose_output;
    std::string diagnose_acf;
    std::string diagnose_hist;
    int diagnose_lags = 0;
    diagnose_cmd->add_option("--fit", diagnose_fit, "fit document with residuals")->required();
    diagnose_cmd->add_option("--lags", diagnose_lags,
                             "tested lags (default min(10, n/5), at least fitdf + 1)");
    diagnose_cmd->add_option("--output", diagnose_output, "report JSON (default stdout)");
    diagnose_cmd->add_option("--acf-csv", diagnose_acf, "two-column ACF table path");
    diagnose_cmd->add_option("--hist-csv", diagnose_hist, "two-column histogram table path");
    diagnose_cmd->callback([&] {
        const auto fitted = parse_fit(read_file(diagnose_fit));
        if (fitted.residuals.empty()) {
            throw Error("fit document carries no residuals; run fit or autofit first");
        }
        const int fitdf = fitted.order.p + fitted.order.q;
        const auto report =
            diagnose_lags > 0 ? diagnose_residuals(fitted.residuals, fitdf, diagnose_lags)
                              : diagnose_residuals(fitted.residuals, fitdf);
        emit(diagnose_output, diagnostics_to_json(report));
        if (!diagnose_acf.empty()) {
            write_file(diagnose_acf, acf_csv(report));
        }
        if (!diagnose_hist.empty()) {
            write_file(diagnose_hist, histogram_csv(report));
        }
    });

    // ---- report ----
    auto* report_cmd = app.add_subcommand(
        "report", "full pipeline: impute, select per column, diagnose, forecast");
    std::string report_input;
    std::string report_outdir;
    int report_horizon = 122;
    bool report_nocb = false;
    CommonSearchFlags report_flags;
    report_cmd->add_option("--input", report_input, "price CSV")->required();
    report_cmd->add_option("--outdir", report_outdir,
                           "output directory (falls back to $RICECAST_OUTDIR, then .)");
    report_cmd->add_option("--horizon", report_horizon, "forecast days")
        ->capture_default_str();
    report_flags.attach(report_cmd);
    report_cmd->add_flag("--allow-nocb", report_nocb,
                         "backward-fill leading gaps before imputation");
    report_cmd->callback([&] {
        const auto outdir = resolve_outdir(report_outdir);
        std::filesystem::create_directories(outdir);

        const auto frame = load_frame(report_input);
        const auto imputed = impute_frame(frame, ImputeOptions{report_nocb});
        write_file(outdir / "imputed.csv", write_table(imputed));

        const SearchConfig config = report_flags.to_config();
        const Date origin = imputed.calendar().back();

        std::vector<CalendarSeries> forecast_columns;
        std::vector<Date> forecast_calendar;
        for (const auto& column : imputed.columns()) {
            const auto report = auto_arima(column.dense_values(), config);
            write_file(outdir / ("fit_" + column.name() + ".json"),
                       serialize_fit(report.winner));
            write_file(outdir / ("search_" + column.name() + ".csv"), ranking_csv(report));

            const int fitdf = report.winner.order.p + report.winner.order.q;
            const auto diagnostics = diagnose_residuals(report.winner.residuals, fitdf);
            write_file(outdir / ("diagnostics_" + column.name() + ".json"),
                       diagnostics_to_json(diagnostics));
            write_file(outdir / ("acf_" + column.name() + ".csv"), acf_csv(diagnostics));
            write_file(outdir / ("hist_" + column.name() + ".csv"),
                       histogram_csv(diagnostics));

            const auto fc = forecast(report.winner, report_horizon, origin);
            if (forecast_calendar.empty()) {
                forecast_calendar = fc.dates();
            }
            std::vector<std::optional<double>> points(fc.points.begin(), fc.points.end());
            forecast_columns.emplace_back(column.name(), forecast_calendar,
                                          std::move(points));
        }
        const PriceFrame forecast_frame(forecast_calendar, std::move(forecast_columns));
        write_file(outdir / "forecast.csv", write_table(forecast_frame));
        std::cout << "wrote " << (2 + 5 * imputed.width()) << " artifacts to " << outdir.string()
                  << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "ricecast: parse failure: " << e.what() << "\n";
        return kExitParse;
    } catch (const DuplicateDate& e) {
        std::cerr << "ricecast: parse failure: " << e.what() << "\n";
        return kExitParse;
    } catch (const UnsortedInput& e) {
        std::cerr << "ricecast: parse failure: " << e.what() << "\n";
        return kExitParse;
    } catch (const LeadingMissing& e) {
        std::cerr << "ricecast: imputation failure: " << e.what() << "\n";
        return kExitImpute;
    } catch (const NoViableModel& e) {
        std::cerr << "ricecast: " << e.what() << "\n";
        return kExitNoModel;
    } catch (const std::exception& e) {
        std::cerr << "ricecast: " << e.what() << "\n";
        return kExitOther;
    }
}
