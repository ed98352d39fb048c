#ifndef RFFI_HARNESS_METRICS_HPP
#define RFFI_HARNESS_METRICS_HPP

#include <string>
#include <vector>

#include "rffi/classifier/network.hpp"

namespace rffi::harness {

// Receiver operating characteristic over all distinct score thresholds.
struct RocCurve {
    struct Point {
        double fpr = 0.0;
        double tpr = 0.0;
    };
    std::vector<Point> points;       // from (0,0) to (1,1), monotone
    std::vector<double> thresholds;  // descending, one per point beyond the origin
};

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

double auc(const RocCurve& curve);

// Convenience: AUC of the binary problem (scores, labels).
double binary_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Pools every (observation, class) pair of a posterior matrix into one
// binary problem: score = P(c|o), positive iff the observation's true label
// is c. Labels outside the class set contribute only negatives.
RocCurve micro_average_roc(const classifier::PosteriorMatrix& posteriors,
                           const std::vector<std::string>& true_labels);

std::vector<std::string> predict_labels(const classifier::PosteriorMatrix& posteriors);

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& true_labels);

}  // namespace rffi::harness

#endif
