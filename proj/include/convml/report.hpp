#pragma once

#include <string>

#include "convml/evaluation.hpp"

namespace convml {

/// Rendering options shared by every report writer. Reports are byte-stable
/// functions of their inputs; because wall-clock build times are not
/// reproducible, they are rendered as 0.00 unless measured_timing is set.
struct ReportOptions {
    bool measured_timing = false;
};

// Experiment reports: a build-time comparison (full vs reduced), per-phase
// metric tables for every protocol and mode, and the best-choice summary
// with its With/Without feature-selection column.
std::string render_experiment_text(const ExperimentReport& report,
                                   const ReportOptions& options = {});
std::string render_experiment_csv(const ExperimentReport& report,
                                  const ReportOptions& options = {});
/// One object per classifier x mode x protocol with fields
/// classifier, mode, protocol, tpr, fpr, precision, recall, f_measure,
/// build_time_s plus the weighted_* variants. Metric values are fractions;
/// undefined metrics are null.
std::string render_experiment_json(const ExperimentReport& report,
                                   const ReportOptions& options = {});

// Single-evaluation reports (holdout or cross-validation).
std::string render_metrics_text(const MetricsReport& report, const std::string& title,
                                const ReportOptions& options = {});
std::string render_metrics_csv(const MetricsReport& report, const ReportOptions& options = {});
std::string render_metrics_json(const MetricsReport& report, const ReportOptions& options = {});

}  // namespace convml
