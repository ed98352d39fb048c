#include "rffi/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rffi::harness {

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw MetricError("roc: scores and labels must be nonempty and equal length");
    std::size_t pos = 0, neg = 0;
    for (int l : labels) {
        if (l != 0) ++pos;
        else ++neg;
    }
    if (pos == 0 || neg == 0)
        throw MetricError("roc: need at least one positive and one negative label");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // consume the whole tie group before emitting a point
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]] != 0) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
        curve.thresholds.push_back(threshold);
    }
    return curve;
}

double auc(const RocCurve& curve) {
    require(curve.points.size() >= 2, "auc: degenerate curve");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return area;
}

double binary_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    return auc(roc(scores, labels));
}

RocCurve micro_average_roc(const classifier::PosteriorMatrix& posteriors,
                           const std::vector<std::string>& true_labels) {
    if (true_labels.size() != posteriors.probs.rows())
        throw MetricError("micro_average_roc: label count must match observations");
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(posteriors.probs.size());
    labels.reserve(posteriors.probs.size());
    for (std::size_t o = 0; o < posteriors.probs.rows(); ++o) {
        for (std::size_t c = 0; c < posteriors.probs.cols(); ++c) {
            scores.push_back(posteriors.probs(o, c));
            labels.push_back(true_labels[o] == posteriors.col_classes[c] ? 1 : 0);
        }
    }
    return roc(scores, labels);
}

std::vector<std::string> predict_labels(const classifier::PosteriorMatrix& posteriors) {
    std::vector<std::string> out;
    out.reserve(posteriors.probs.rows());
    for (std::size_t o = 0; o < posteriors.probs.rows(); ++o) {
        std::size_t arg = 0;
        double best = posteriors.probs(o, 0);
        for (std::size_t c = 1; c < posteriors.probs.cols(); ++c) {
            if (posteriors.probs(o, c) > best) {
                best = posteriors.probs(o, c);
                arg = c;
            }
        }
        out.push_back(posteriors.col_classes[arg]);
    }
    return out;
}

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& true_labels) {
    if (predictions.empty() || predictions.size() != true_labels.size())
        throw MetricError("accuracy: empty or mismatched inputs");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == true_labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

}  // namespace rffi::harness
