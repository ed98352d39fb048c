#ifndef RFFI_HARNESS_EXPERIMENT_HPP
#define RFFI_HARNESS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rffi/classifier/train.hpp"
#include "rffi/detection/ocsvm.hpp"
#include "rffi/harness/dataset.hpp"
#include "rffi/harness/metrics.hpp"

namespace rffi::harness {

struct ScenarioMetric {
    std::string scenario;
    std::string metric;
    double value = 0.0;
};

// Every metric is traceable to a scenario id. The canonical serialization
// (JSON/CSV) is deterministic under fixed seeds; wall-clock runtime goes to
// a sidecar log so reports stay byte-comparable.
struct Report {
    std::string kind;
    std::vector<ScenarioMetric> metrics;
    std::map<std::string, std::string> config_echo;
    std::vector<std::pair<std::string, std::uint64_t>> seed_manifest;
    double runtime_seconds = 0.0;

    void add(const std::string& scenario, const std::string& metric, double value);
    double get(const std::string& scenario, const std::string& metric) const;
    bool has(const std::string& scenario, const std::string& metric) const;

    std::string to_json() const;  // canonical, no runtime
    std::string to_csv() const;
    std::string to_text() const;  // human-readable, includes runtime
};

// Writes report.json, report.csv and report.log under dir.
void write_report(const std::filesystem::path& dir, const Report& report);
Report read_report_json(const std::filesystem::path& path);

// Per-seed shared artifacts: population, frozen extractor, base datasets and
// the two base (chamber) models.
struct SeedArtifacts {
    std::uint64_t seed = 0;
    DevicePopulation pop;
    FeatureExtractor extractor;
    FeatureSetPair base_train;
    FeatureSetPair base_test;
    classifier::TrainedModel base_quotient;
    classifier::TrainedModel base_spectrogram;
};

SeedArtifacts build_seed_artifacts(const ExperimentConfig& cfg, std::size_t seed_index);

// Figs. 7-8 analogue: accuracy of {quotient, spectrogram} x {transfer,
// scratch} against deployment-environment test sets over the sample sweep.
Report run_classification_experiment(const ExperimentConfig& cfg);

// Authentication attack analogue: pooled one-versus-all AUC per combination.
Report run_impersonation_experiment(const ExperimentConfig& cfg);

// Enrollment attack analogue: contaminated-classifier AUC, posterior
// difference sign statistics and one-class detection rates per sample count.
Report run_contamination_experiment(const ExperimentConfig& cfg);

}  // namespace rffi::harness

#endif
