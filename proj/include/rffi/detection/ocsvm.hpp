#ifndef RFFI_DETECTION_OCSVM_HPP
#define RFFI_DETECTION_OCSVM_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rffi/detection/embedder.hpp"

namespace rffi::detection {

// One-class support vector machine with an RBF kernel, trained by pairwise
// coordinate optimization of the standard dual:
//   min 1/2 a' K a   s.t.  0 <= a_i <= 1/(nu n),  sum a = 1.
// Decision value f(x) = sum_i a_i k(x_i, x) - rho; negative means outlier.
class OneClassSvm {
public:
    struct Config {
        double nu = 0.1;
        double gamma = 0.0;  // 0 -> 1/dim at fit time
        double tol = 1e-6;
        std::size_t max_passes = 200000;
    };

    OneClassSvm() = default;

    void fit(const std::vector<std::vector<double>>& points, const Config& cfg);
    double decision(const std::vector<double>& x) const;
    bool fitted() const { return !support_.empty(); }

    double nu() const { return cfg_.nu; }
    double gamma() const { return gamma_; }
    double rho() const { return rho_; }
    const std::vector<std::vector<double>>& support_vectors() const { return support_; }
    const std::vector<double>& alphas() const { return alpha_; }

    // serialization hooks
    void restore(std::vector<std::vector<double>> support, std::vector<double> alpha, double rho,
                 double gamma, Config cfg);

private:
    Config cfg_;
    double gamma_ = 0.0;
    double rho_ = 0.0;
    std::vector<std::vector<double>> support_;
    std::vector<double> alpha_;
};

struct DetectionResult {
    bool anomaly = false;
    double score = 0.0;  // signed distance to the boundary minus the offset
};

// Trained extractor plus the boundary over its embeddings.
struct OneClassDetector {
    DiffEmbedder extractor;
    OneClassSvm boundary;
    double threshold = 0.0;  // decision offset; flag anomaly when score < 0
};

OneClassSvm fit_boundary(const std::vector<std::vector<double>>& embeddings, double nu,
                         double gamma = 0.0);

DetectionResult detect(OneClassDetector& det, const DiffMatrix& d);

struct EmbeddingRow {
    std::vector<double> embedding;
    std::string label;
    std::string scenario;
};

std::vector<EmbeddingRow> export_embeddings(const std::vector<DiffMatrix>& matrices,
                                            OneClassDetector& det);
std::string embeddings_csv(const std::vector<EmbeddingRow>& rows);

// JSON header + little-endian float32 blob, same convention as models.
void save_detector(const OneClassDetector& det, const std::filesystem::path& path);
OneClassDetector load_detector(const std::filesystem::path& path);

}  // namespace rffi::detection

#endif
