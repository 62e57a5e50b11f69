#include "pmnet/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "pmnet/error.hpp"

namespace pmnet {

ExamplePR example_prf(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) {
        throw ShapeError("example_prf: prediction and truth lengths differ");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++tp;
        if (p && !t) ++fp;
        if (!p && t) ++fn;
    }
    ExamplePR out;
    if (tp + fn == 0) return out;  // no positives exist: everything 0 by convention
    out.precision = (tp + fp == 0) ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return out;
}

double f_beta(double precision, double recall, double beta) {
    if (!(beta > 0.0)) throw ArgumentError("f_beta: beta must be positive");
    if (precision <= 0.0 && recall <= 0.0) return 0.0;
    if (beta > 1.0) return f_beta(recall, precision, 1.0 / beta);
    if (precision == recall) return precision;
    const double b2 = beta * beta;
    return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

LabelPrfResult label_prf(const std::vector<std::vector<int>>& preds,
                         const std::vector<std::vector<int>>& truths) {
    if (preds.size() != truths.size()) {
        throw ShapeError("label_prf: prediction and truth counts differ");
    }
    if (preds.empty()) throw ArgumentError("label_prf: empty input");
    const std::size_t width = truths.front().size();
    std::vector<std::size_t> tp(width, 0), fp(width, 0), fn(width, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].size() != width || truths[i].size() != width) {
            throw ShapeError("label_prf: ragged label vectors");
        }
        for (std::size_t j = 0; j < width; ++j) {
            const bool p = preds[i][j] != 0;
            const bool t = truths[i][j] != 0;
            if (p && t) ++tp[j];
            if (p && !t) ++fp[j];
            if (!p && t) ++fn[j];
        }
    }
    LabelPrfResult out;
    out.precision.resize(width);
    out.recall.resize(width);
    for (std::size_t j = 0; j < width; ++j) {
        out.precision[j] =
            (tp[j] + fp[j] == 0) ? 0.0 : static_cast<double>(tp[j]) / static_cast<double>(tp[j] + fp[j]);
        out.recall[j] =
            (tp[j] + fn[j] == 0) ? 0.0 : static_cast<double>(tp[j]) / static_cast<double>(tp[j] + fn[j]);
        out.mean_precision += out.precision[j];
        out.mean_recall += out.recall[j];
    }
    out.mean_precision /= static_cast<double>(width);
    out.mean_recall /= static_cast<double>(width);
    return out;
}

MetricsReport compute_report(const std::vector<std::vector<int>>& preds,
                             const std::vector<std::vector<int>>& truths,
                             const std::vector<std::string>& scene_names) {
    if (preds.empty()) throw ArgumentError("compute_report: empty dataset");
    MetricsReport report;
    // Per-example scores first, then the mean over examples.
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const ExamplePR pr = example_prf(preds[i], truths[i]);
        report.mean_example_precision += pr.precision;
        report.mean_example_recall += pr.recall;
        report.mean_f1 += f_beta(pr.precision, pr.recall, 1.0);
        report.mean_f2 += f_beta(pr.precision, pr.recall, 2.0);
    }
    const double n = static_cast<double>(preds.size());
    report.mean_example_precision /= n;
    report.mean_example_recall /= n;
    report.mean_f1 /= n;
    report.mean_f2 /= n;

    const LabelPrfResult labels = label_prf(preds, truths);
    report.mean_label_precision = labels.mean_precision;
    report.mean_label_recall = labels.mean_recall;

    const std::size_t width = labels.precision.size();
    if (!scene_names.empty() && scene_names.size() != width) {
        throw ShapeError("compute_report: scene name count does not match label width");
    }
    report.per_label.resize(width);
    for (std::size_t j = 0; j < width; ++j) {
        LabelStats& stats = report.per_label[j];
        stats.scene = scene_names.empty() ? "label_" + std::to_string(j) : scene_names[j];
        stats.precision = labels.precision[j];
        stats.recall = labels.recall[j];
        for (const auto& truth : truths) stats.support += truth[j] != 0 ? 1u : 0u;
    }
    return report;
}

std::vector<int> threshold_probs(const std::vector<double>& probs, double threshold) {
    std::vector<int> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] >= threshold ? 1 : 0;
    return out;
}

MetricsReport evaluate(const Predictor& predictor, const std::vector<MultiSceneSample>& dataset,
                       double threshold, const std::vector<std::string>& scene_names) {
    if (dataset.empty()) throw ArgumentError("evaluate: empty dataset");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ArgumentError("evaluate: threshold must lie in (0, 1)");
    }
    std::vector<std::vector<int>> preds;
    std::vector<std::vector<int>> truths;
    preds.reserve(dataset.size());
    truths.reserve(dataset.size());
    for (const auto& sample : dataset) {
        preds.push_back(threshold_probs(predictor(sample.features), threshold));
        truths.push_back(sample.labels);
    }
    return compute_report(preds, truths, scene_names);
}

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f,%.2f", v, 100.0 * v);
    return buf;
}

}  // namespace

std::string report_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "metric,value,percent\n";
    out << "mean_f1," << format_value(report.mean_f1) << "\n";
    out << "mean_f2," << format_value(report.mean_f2) << "\n";
    out << "mean_example_precision," << format_value(report.mean_example_precision) << "\n";
    out << "mean_example_recall," << format_value(report.mean_example_recall) << "\n";
    out << "mean_label_precision," << format_value(report.mean_label_precision) << "\n";
    out << "mean_label_recall," << format_value(report.mean_label_recall) << "\n";
    return out.str();
}

std::string report_per_label_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "label,precision,recall,support\n";
    for (const auto& stats : report.per_label) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f", stats.precision, stats.recall);
        out << stats.scene << "," << buf << "," << stats.support << "\n";
    }
    return out.str();
}

std::string report_table(const MetricsReport& report, double threshold) {
    char line[256];
    std::ostringstream out;
    std::snprintf(line, sizeof(line), "decision threshold = %.4f\n", threshold);
    out << line;
    out << "  m.F1    m.F2    m.p_e   m.r_e   m.p_l   m.r_l\n";
    std::snprintf(line, sizeof(line), "  %.4f  %.4f  %.4f  %.4f  %.4f  %.4f\n", report.mean_f1,
                  report.mean_f2, report.mean_example_precision, report.mean_example_recall,
                  report.mean_label_precision, report.mean_label_recall);
    out << line;
    std::snprintf(line, sizeof(line), "  %5.2f%%  %5.2f%%  %5.2f%%  %5.2f%%  %5.2f%%  %5.2f%%\n",
                  100.0 * report.mean_f1, 100.0 * report.mean_f2,
                  100.0 * report.mean_example_precision, 100.0 * report.mean_example_recall,
                  100.0 * report.mean_label_precision, 100.0 * report.mean_label_recall);
    out << line;
    return out.str();
}

}  // namespace pmnet
