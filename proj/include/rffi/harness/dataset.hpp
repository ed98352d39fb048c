#ifndef RFFI_HARNESS_DATASET_HPP
#define RFFI_HARNESS_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/feature/dataset.hpp"
#include "rffi/feature/quotient.hpp"
#include "rffi/harness/config.hpp"
#include "rffi/signal/capture.hpp"

namespace rffi::harness {

struct DevicePopulation {
    std::vector<signal::DeviceProfile> legit;
    std::vector<signal::DeviceProfile> rogue;

    std::vector<std::string> legit_labels() const;
    std::vector<std::string> rogue_labels() const;
};

DevicePopulation sample_population(const ExperimentConfig& cfg, std::uint64_t seed);

// Extraction settings frozen once per experiment: the chamber-measured
// reference correlation for the distortion filter and the dB clip ranges
// taken from the base training corpus.
struct FeatureExtractor {
    feature::StftConfig stft;
    std::size_t image_size = 64;
    int depth = 8;
    double theta = 0.05;
    double rho_ref = 1.0;
    feature::ClipRange clip_quotient;
    feature::ClipRange clip_spectrogram;
};

// Quotient and spectrogram features extracted from the same captures.
struct FeatureSetPair {
    feature::LabeledFeatureSet quotient;
    feature::LabeledFeatureSet spectrogram;
};

class DatasetBuilder {
public:
    explicit DatasetBuilder(const ExperimentConfig& cfg) : cfg_(cfg) {}

    // Mean peak-sequence correlation over chamber pairs (Algorithm 1's rho_c).
    double measure_rho_ref(const DevicePopulation& pop, std::uint64_t seed) const;

    // Measures rho_ref, then scans the would-be base training corpus once to
    // freeze the dB clip ranges for both feature types.
    FeatureExtractor calibrate(const DevicePopulation& pop, std::uint64_t seed) const;

    // per_device accepted captures per device through env, rasterized with
    // the frozen extractor. Deterministic in (cfg, tag, seed).
    FeatureSetPair build_sets(const std::vector<signal::DeviceProfile>& devices,
                              signal::Environment env, std::size_t per_device,
                              const std::string& split, const FeatureExtractor& ex,
                              std::uint64_t seed, const std::string& tag) const;

    // One capture's raw (pre-raster) feature matrices, or rejection.
    struct RawCapture {
        bool accepted = false;
        double rho_d = 0.0;
        feature::QuotientFingerprint quotient;
        RealMatrix spectrogram_db;
    };
    RawCapture extract_raw(const signal::DeviceProfile& dev, signal::Environment env,
                           std::uint64_t capture_seed, double rho_ref) const;

    const ExperimentConfig& config() const { return cfg_; }

private:
    ExperimentConfig cfg_;
};

// No capture seed may appear in both splits.
void check_split_hygiene(const feature::LabeledFeatureSet& train,
                         const feature::LabeledFeatureSet& test);

}  // namespace rffi::harness

#endif
