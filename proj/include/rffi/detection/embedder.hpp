#ifndef RFFI_DETECTION_EMBEDDER_HPP
#define RFFI_DETECTION_EMBEDDER_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "rffi/classifier/layers.hpp"
#include "rffi/detection/diff.hpp"
#include "rffi/feature/raster.hpp"

namespace rffi::detection {

// Small convolutional embedder over rasterized DiffMatrix images, built from
// the classifier layer kit: three conv/batch-norm/ReLU blocks (pooling after
// the first two), global average pooling to a fixed-length embedding. It is
// trained on normal matrices with a proxy objective (classify the generating
// seed batch) and the head is dropped afterwards.
struct EmbedderConfig {
    std::size_t image_size = 64;
    int depth = 8;
    std::vector<std::size_t> conv_filters = {8, 16, 64};  // back() = embedding dim
    std::size_t proxy_groups = 10;
    int epochs = 10;
    std::size_t batch_size = 32;
    double learning_rate = 0.005;
};

class DiffEmbedder {
public:
    DiffEmbedder() = default;
    DiffEmbedder(const EmbedderConfig& cfg, std::uint64_t seed);
    DiffEmbedder(const DiffEmbedder& other);
    DiffEmbedder& operator=(const DiffEmbedder& other);
    DiffEmbedder(DiffEmbedder&&) noexcept = default;
    DiffEmbedder& operator=(DiffEmbedder&&) noexcept = default;

    const EmbedderConfig& config() const { return cfg_; }
    std::size_t embed_dim() const { return cfg_.conv_filters.back(); }

    feature::ClipRange clip() const { return clip_; }
    void set_clip(const feature::ClipRange& clip) { clip_ = clip; }

    feature::FeatureImage rasterize_diff(const DiffMatrix& d) const;

    std::vector<double> embed(const DiffMatrix& d);
    std::vector<std::vector<double>> embed_all(const std::vector<DiffMatrix>& ds);

    // persistent weights in fixed order, for serialization
    std::vector<classifier::Tensor<float>*> state_tensors();

    friend DiffEmbedder train_extractor(const std::vector<DiffMatrix>& normals, std::uint64_t seed,
                                        const EmbedderConfig& cfg);

private:
    classifier::Tensor<float> forward_backbone(const classifier::Tensor<float>& x, bool training);

    EmbedderConfig cfg_;
    feature::ClipRange clip_{-1.0, 1.0};
    std::vector<std::unique_ptr<classifier::Layer<float>>> backbone_;
    std::unique_ptr<classifier::Linear<float>> head_;  // proxy task head, unused after training
};

// Trains the embedder on >= 50 normal DiffMatrices; deterministic in seed.
DiffEmbedder train_extractor(const std::vector<DiffMatrix>& normals, std::uint64_t seed,
                             const EmbedderConfig& cfg = EmbedderConfig{});

}  // namespace rffi::detection

#endif
