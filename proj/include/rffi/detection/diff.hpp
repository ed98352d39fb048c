#ifndef RFFI_DETECTION_DIFF_HPP
#define RFFI_DETECTION_DIFF_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rffi/classifier/network.hpp"
#include "rffi/matrix.hpp"

namespace rffi::detection {

// Normalized difference of two posterior matrices over the same test
// observations: transfer-learning output minus from-scratch output, divided
// by its maximum absolute entry (sign- and zero-preserving).
struct DiffMatrix {
    enum class Label { unknown, normal, anomaly };
    RealMatrix values;  // O x C, entries in [-1, 1]
    std::vector<std::string> row_observations;
    std::vector<std::string> col_classes;
    std::string scenario_meta;
    Label label = Label::unknown;

    void validate() const;
};

DiffMatrix posterior_difference(const classifier::PosteriorMatrix& m_transfer,
                                const classifier::PosteriorMatrix& m_deep);

// Per-class mean of d[o, c] over observations labeled c: the statistic whose
// sign flips under contamination. Classes with no observations are absent
// from the result rather than reported as zero.
std::map<std::string, double> true_positive_margin(const DiffMatrix& d,
                                                   const std::vector<std::string>& labels);

// <stem>.json metadata + <stem>.f32 row-major little-endian values.
void save_diff_matrix(const std::filesystem::path& stem, const DiffMatrix& d);
DiffMatrix load_diff_matrix(const std::filesystem::path& stem);

}  // namespace rffi::detection

#endif
