#include "convml/report.hpp"

#include <sstream>

#include <json.hpp>

#include "textutil.hpp"

namespace convml {

namespace {

using detail::format_fixed2;
using detail::format_value;

std::string percent(const std::optional<double>& v) {
    return v ? format_fixed2(*v * 100.0) : "n/a";
}

std::string fraction(const std::optional<double>& v) {
    return v ? format_value(*v) : "n/a";
}

double shown_time(double measured, const ReportOptions& options) {
    return options.measured_timing ? measured : 0.0;
}

std::string row(const std::vector<std::string>& cells, const std::vector<size_t>& widths) {
    std::string line;
    size_t target = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        target += widths[i];
        line += cells[i];
        if (i + 1 < cells.size()) {
            if (line.size() >= target) {
                line += ' ';
            } else {
                line.append(target - line.size(), ' ');
            }
        }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    line += '\n';
    return line;
}

const std::vector<size_t> kMetricWidths = {22, 10, 10, 12, 10, 14, 16};
const std::vector<std::string> kMetricHeader = {"Classifier", "TPR (%)",    "FPR (%)",
                                                "Precision",  "Recall",     "F-measure",
                                                ""};

std::string metric_cells_row(const std::string& name, const MetricsReport& m,
                             const std::string& extra = "") {
    return row({name, percent(m.tpr), percent(m.fpr), percent(m.precision), percent(m.recall),
                percent(m.f_measure), extra},
               kMetricWidths);
}

std::string weighted_cells_row(const std::string& name, const MetricsReport& m,
                               const std::string& extra = "") {
    return row({name, percent(m.weighted_tpr), percent(m.weighted_fpr),
                percent(m.weighted_precision), percent(m.weighted_recall),
                percent(m.weighted_f_measure), extra},
               kMetricWidths);
}

std::string mode_title(FeatureMode mode) {
    return mode == FeatureMode::Full ? "without feature selection (10 attributes)"
                                     : "with feature selection (8 attributes)";
}

std::string protocol_title(EvalProtocol protocol) {
    return protocol == EvalProtocol::CrossValidation ? "10-fold cross-validation"
                                                     : "holdout test set";
}

nlohmann::json metric_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

nlohmann::json metrics_to_json(const MetricsReport& m, const ReportOptions& options) {
    nlohmann::json j;
    j["tpr"] = metric_or_null(m.tpr);
    j["fpr"] = metric_or_null(m.fpr);
    j["precision"] = metric_or_null(m.precision);
    j["recall"] = metric_or_null(m.recall);
    j["f_measure"] = metric_or_null(m.f_measure);
    j["weighted_tpr"] = metric_or_null(m.weighted_tpr);
    j["weighted_fpr"] = metric_or_null(m.weighted_fpr);
    j["weighted_precision"] = metric_or_null(m.weighted_precision);
    j["weighted_recall"] = metric_or_null(m.weighted_recall);
    j["weighted_f_measure"] = metric_or_null(m.weighted_f_measure);
    j["build_time_s"] = shown_time(m.build_time_s, options);
    j["confusion"] = {{"tp", m.matrix.tp}, {"fp", m.matrix.fp},
                      {"tn", m.matrix.tn}, {"fn", m.matrix.fn}};
    return j;
}

}  // namespace

std::string render_experiment_text(const ExperimentReport& report, const ReportOptions& options) {
    std::ostringstream out;

    // Build-time comparison, one row per classifier, both modes side by side.
    out << "Model build time (seconds)\n";
    out << row({"Classifier", "Full (10 attrs)", "Reduced (8 attrs)"}, {22, 18, 18});
    for (ClassifierKind kind : report.classifiers) {
        const auto* full = report.find(kind, FeatureMode::Full, EvalProtocol::Holdout);
        const auto* reduced = report.find(kind, FeatureMode::Reduced, EvalProtocol::Holdout);
        out << row({display_name(kind),
                    full ? format_fixed2(shown_time(full->metrics.build_time_s, options)) : "n/a",
                    reduced ? format_fixed2(shown_time(reduced->metrics.build_time_s, options))
                            : "n/a"},
                   {22, 18, 18});
    }
    out << "\n";

    // Per-phase metric tables: malware-positive headline plus the weighted
    // averages, for every protocol and mode.
    for (EvalProtocol protocol : {EvalProtocol::CrossValidation, EvalProtocol::Holdout}) {
        for (FeatureMode mode : {FeatureMode::Full, FeatureMode::Reduced}) {
            out << "Results, " << protocol_title(protocol) << ", " << mode_title(mode) << "\n";
            out << "(malware as positive class)\n";
            out << row(kMetricHeader, kMetricWidths);
            for (ClassifierKind kind : report.classifiers) {
                if (const auto* e = report.find(kind, mode, protocol)) {
                    out << metric_cells_row(display_name(kind), e->metrics);
                }
            }
            out << "(weighted average over classes)\n";
            out << row(kMetricHeader, kMetricWidths);
            for (ClassifierKind kind : report.classifiers) {
                if (const auto* e = report.find(kind, mode, protocol)) {
                    out << weighted_cells_row(display_name(kind), e->metrics);
                }
            }
            out << "\n";
        }
    }

    // Best configuration per classifier, chosen on cross-validation TPR.
    out << "Best result per classifier (by cross-validation TPR, malware positive)\n";
    auto header = kMetricHeader;
    header.back() = "Feature selection";
    out << row(header, kMetricWidths);
    for (const BestChoice& choice : report.best_per_classifier()) {
        out << metric_cells_row(display_name(choice.classifier), choice.metrics,
                                choice.feature_selection);
    }
    return std::move(out).str();
}

std::string render_experiment_csv(const ExperimentReport& report, const ReportOptions& options) {
    std::ostringstream out;
    out << "classifier,mode,protocol,tpr,fpr,precision,recall,f_measure,"
           "weighted_tpr,weighted_fpr,weighted_precision,weighted_recall,weighted_f_measure,"
           "build_time_s\n";
    for (const auto& e : report.entries) {
        const MetricsReport& m = e.metrics;
        out << to_string(e.classifier) << ',' << to_string(e.mode) << ',' << to_string(e.protocol)
            << ',' << fraction(m.tpr) << ',' << fraction(m.fpr) << ',' << fraction(m.precision)
            << ',' << fraction(m.recall) << ',' << fraction(m.f_measure) << ','
            << fraction(m.weighted_tpr) << ',' << fraction(m.weighted_fpr) << ','
            << fraction(m.weighted_precision) << ',' << fraction(m.weighted_recall) << ','
            << fraction(m.weighted_f_measure) << ','
            << format_value(shown_time(m.build_time_s, options)) << "\n";
    }
    return std::move(out).str();
}

std::string render_experiment_json(const ExperimentReport& report, const ReportOptions& options) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json j = metrics_to_json(e.metrics, options);
        j["classifier"] = to_string(e.classifier);
        j["mode"] = to_string(e.mode);
        j["protocol"] = to_string(e.protocol);
        entries.push_back(std::move(j));
    }
    nlohmann::json best = nlohmann::json::array();
    for (const BestChoice& choice : report.best_per_classifier()) {
        nlohmann::json j = metrics_to_json(choice.metrics, options);
        j["classifier"] = to_string(choice.classifier);
        j["feature_selection"] = choice.feature_selection;
        best.push_back(std::move(j));
    }
    nlohmann::json doc;
    doc["results"] = std::move(entries);
    doc["best_per_classifier"] = std::move(best);
    return doc.dump(2) + "\n";
}

std::string render_metrics_text(const MetricsReport& report, const std::string& title,
                                const ReportOptions& options) {
    std::ostringstream out;
    out << title << "\n";
    out << "Confusion matrix (malware positive): tp=" << report.matrix.tp
        << " fp=" << report.matrix.fp << " tn=" << report.matrix.tn << " fn=" << report.matrix.fn
        << "\n";
    out << row(kMetricHeader, kMetricWidths);
    out << metric_cells_row("malware-positive", report);
    out << weighted_cells_row("weighted-average", report);
    out << "Build time (s): " << format_fixed2(shown_time(report.build_time_s, options)) << "\n";
    if (!report.folds.empty()) {
        out << "Per-fold confusion matrices:\n";
        for (size_t f = 0; f < report.folds.size(); ++f) {
            const auto& m = report.folds[f];
            const MetricsReport fm = compute_metrics(m);
            out << "  fold " << f << ": tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn
                << " fn=" << m.fn << " tpr=" << percent(fm.tpr) << " fpr=" << percent(fm.fpr)
                << "\n";
        }
        // Macro view: unweighted mean of the defined per-fold values.
        double tpr_sum = 0.0, fpr_sum = 0.0;
        size_t tpr_n = 0, fpr_n = 0;
        for (const auto& m : report.folds) {
            const MetricsReport fm = compute_metrics(m);
            if (fm.tpr) {
                tpr_sum += *fm.tpr;
                ++tpr_n;
            }
            if (fm.fpr) {
                fpr_sum += *fm.fpr;
                ++fpr_n;
            }
        }
        out << "Macro average over folds: tpr="
            << (tpr_n ? format_fixed2(tpr_sum / static_cast<double>(tpr_n) * 100.0) : "n/a")
            << " fpr="
            << (fpr_n ? format_fixed2(fpr_sum / static_cast<double>(fpr_n) * 100.0) : "n/a")
            << "\n";
    }
    return std::move(out).str();
}

std::string render_metrics_csv(const MetricsReport& report, const ReportOptions& options) {
    std::ostringstream out;
    out << "tpr,fpr,precision,recall,f_measure,weighted_tpr,weighted_fpr,weighted_precision,"
           "weighted_recall,weighted_f_measure,build_time_s,tp,fp,tn,fn\n";
    out << fraction(report.tpr) << ',' << fraction(report.fpr) << ',' << fraction(report.precision)
        << ',' << fraction(report.recall) << ',' << fraction(report.f_measure) << ','
        << fraction(report.weighted_tpr) << ',' << fraction(report.weighted_fpr) << ','
        << fraction(report.weighted_precision) << ',' << fraction(report.weighted_recall) << ','
        << fraction(report.weighted_f_measure) << ','
        << format_value(shown_time(report.build_time_s, options)) << ',' << report.matrix.tp
        << ',' << report.matrix.fp << ',' << report.matrix.tn << ',' << report.matrix.fn << "\n";
    return std::move(out).str();
}

std::string render_metrics_json(const MetricsReport& report, const ReportOptions& options) {
    nlohmann::json j = metrics_to_json(report, options);
    if (!report.folds.empty()) {
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& m : report.folds) {
            folds.push_back({{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}});
        }
        j["folds"] = std::move(folds);
    }
    return j.dump(2) + "\n";
}

}  // namespace convml
