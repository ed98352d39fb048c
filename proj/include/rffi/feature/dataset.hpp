#ifndef RFFI_FEATURE_DATASET_HPP
#define RFFI_FEATURE_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rffi/feature/raster.hpp"

namespace rffi::feature {

// One observation: a rasterized feature, the identity it claims, and the
// ground-truth transmitter. The two differ only for attack-injected items.
struct LabeledItem {
    FeatureImage image;
    std::string claimed;
    std::string true_id;
    std::uint64_t capture_seed = 0;
};

// Extraction settings frozen alongside a dataset so train/test splits and
// later enrollments stay comparable.
struct FeatureSetMeta {
    FeatureSource source = FeatureSource::quotient;
    std::size_t image_size = 64;
    int depth = 8;
    ClipRange clip;
    double theta = 0.05;
    double rho_ref = 1.0;
    std::size_t stft_window = 0;
    std::size_t stft_hop = 0;
};

struct LabeledFeatureSet {
    std::vector<LabeledItem> items;
    std::string split;  // "train" or "test"
    FeatureSetMeta meta;

    std::size_t size() const { return items.size(); }
    std::vector<std::string> distinct_claimed_labels() const;
    std::vector<feature::FeatureImage> images() const;
    std::vector<std::string> claimed_labels() const;
    std::vector<std::string> true_labels() const;
};

// Feature dataset files: <stem>.json manifest + <stem>.u8 pixel blob.
void save_feature_set(const std::filesystem::path& stem, const LabeledFeatureSet& set);
LabeledFeatureSet load_feature_set(const std::filesystem::path& stem);

}  // namespace rffi::feature

#endif
