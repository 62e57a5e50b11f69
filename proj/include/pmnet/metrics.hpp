#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pmnet/samples.hpp"

namespace pmnet {

struct ExamplePR {
    double precision = 0.0;
    double recall = 0.0;
};

/// Precision/recall from the TP/FP/FN counts of one example. Degenerate
/// convention: precision is 0 when nothing was predicted; when the truth has
/// no positives at all, both values are 0 and the example still counts.
ExamplePR example_prf(const std::vector<int>& pred, const std::vector<int>& truth);

/// F_beta = (1 + beta^2) * p * r / (beta^2 * p + r); 0 when p = r = 0.
/// Evaluated with beta <= 1 so the (p,r,beta) <-> (r,p,1/beta) symmetry and
/// the equal-argument identity hold exactly.
double f_beta(double precision, double recall, double beta);

struct LabelStats {
    std::string scene;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t support = 0;  // truth positives over the whole set
};

struct LabelPrfResult {
    std::vector<double> precision;  // per label
    std::vector<double> recall;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

/// Per-label precision/recall with counts aggregated over the whole set,
/// then averaged over labels.
LabelPrfResult label_prf(const std::vector<std::vector<int>>& preds,
                         const std::vector<std::vector<int>>& truths);

/// The six headline means plus the per-label breakdown.
struct MetricsReport {
    double mean_f1 = 0.0;
    double mean_f2 = 0.0;
    double mean_example_precision = 0.0;
    double mean_example_recall = 0.0;
    double mean_label_precision = 0.0;
    double mean_label_recall = 0.0;
    std::vector<LabelStats> per_label;
};

/// Report from already-thresholded predictions.
MetricsReport compute_report(const std::vector<std::vector<int>>& preds,
                             const std::vector<std::vector<int>>& truths,
                             const std::vector<std::string>& scene_names);

using Predictor = std::function<std::vector<double>(const std::vector<double>&)>;

/// Runs the predictor over the dataset, thresholds the probabilities and
/// computes the full report. threshold must lie in (0, 1).
MetricsReport evaluate(const Predictor& predictor, const std::vector<MultiSceneSample>& dataset,
                       double threshold, const std::vector<std::string>& scene_names);

std::vector<int> threshold_probs(const std::vector<double>& probs, double threshold);

/// CSV with one `metric,value,percent` row per mean.
std::string report_csv(const MetricsReport& report);

/// CSV of the per-label breakdown: `label,precision,recall,support`.
std::string report_per_label_csv(const MetricsReport& report);

/// Aligned text table: m.F1, m.F2, m.p_e, m.r_e, m.p_l, m.r_l.
std::string report_table(const MetricsReport& report, double threshold);

}  // namespace pmnet
