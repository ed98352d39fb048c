#include "rffi/detection/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rffi/classifier/train.hpp"

namespace rffi::detection {

using classifier::BatchNorm2d;
using classifier::Conv2d;
using classifier::GlobalAvgPool;
using classifier::Layer;
using classifier::Linear;
using classifier::MaxPool2d;
using classifier::Param;
using classifier::ReLU;
using classifier::Tensor;

DiffEmbedder::DiffEmbedder(const EmbedderConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    require_config(!cfg.conv_filters.empty(), "embedder needs at least one conv block");
    std::mt19937_64 rng(derive_seed(seed, "embedder-init"));
    std::size_t in_ch = 1;
    for (std::size_t b = 0; b < cfg.conv_filters.size(); ++b) {
        auto conv = std::make_unique<Conv2d<float>>(in_ch, cfg.conv_filters[b]);
        conv->init_he(rng);
        backbone_.push_back(std::move(conv));
        backbone_.push_back(std::make_unique<BatchNorm2d<float>>(cfg.conv_filters[b]));
        backbone_.push_back(std::make_unique<ReLU<float>>());
        if (b < 2) backbone_.push_back(std::make_unique<MaxPool2d<float>>());
        in_ch = cfg.conv_filters[b];
    }
    backbone_.push_back(std::make_unique<GlobalAvgPool<float>>());
    head_ = std::make_unique<Linear<float>>(cfg.conv_filters.back(), cfg.proxy_groups);
    head_->init_he(rng);
}

DiffEmbedder::DiffEmbedder(const DiffEmbedder& other) : DiffEmbedder(other.cfg_, 0) {
    clip_ = other.clip_;
    auto dst = state_tensors();
    auto src = const_cast<DiffEmbedder&>(other).state_tensors();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->v = src[i]->v;
}

DiffEmbedder& DiffEmbedder::operator=(const DiffEmbedder& other) {
    if (this != &other) {
        DiffEmbedder tmp(other);
        *this = std::move(tmp);
    }
    return *this;
}

feature::FeatureImage DiffEmbedder::rasterize_diff(const DiffMatrix& d) const {
    return feature::rasterize(d.values, cfg_.image_size, cfg_.depth, clip_);
}

Tensor<float> DiffEmbedder::forward_backbone(const Tensor<float>& x, bool training) {
    Tensor<float> cur = x;
    for (auto& layer : backbone_) cur = layer->forward(cur, training);
    return cur;
}

std::vector<double> DiffEmbedder::embed(const DiffMatrix& d) {
    const feature::FeatureImage img = rasterize_diff(d);
    const Tensor<float> x = classifier::images_to_tensor({img}, cfg_.image_size);
    const Tensor<float> e = forward_backbone(x, /*training=*/false);
    std::vector<double> out(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = static_cast<double>(e.v[i]);
    return out;
}

std::vector<std::vector<double>> DiffEmbedder::embed_all(const std::vector<DiffMatrix>& ds) {
    std::vector<std::vector<double>> out;
    out.reserve(ds.size());
    for (const DiffMatrix& d : ds) out.push_back(embed(d));
    return out;
}

std::vector<Tensor<float>*> DiffEmbedder::state_tensors() {
    std::vector<Tensor<float>*> ts;
    for (auto& layer : backbone_) {
        for (Param<float>* p : layer->params()) ts.push_back(&p->value);
        for (Tensor<float>* b : layer->buffers()) ts.push_back(b);
    }
    for (Param<float>* p : head_->params()) ts.push_back(&p->value);
    return ts;
}

DiffEmbedder train_extractor(const std::vector<DiffMatrix>& normals, std::uint64_t seed,
                             const EmbedderConfig& cfg) {
    require(normals.size() >= 50, "extractor training needs at least 50 normal matrices");
    require(normals.size() >= cfg.proxy_groups, "fewer normals than proxy groups");

    DiffEmbedder emb(cfg, seed);

    // freeze the raster clip range from the normal corpus
    feature::CorpusPercentiles pct;
    for (const DiffMatrix& d : normals) pct.add(d.values);
    feature::ClipRange clip = pct.range();
    if (!(clip.hi > clip.lo)) clip = {-1.0, 1.0};
    emb.set_clip(clip);

    // proxy labels: contiguous generation batches
    const std::size_t n = normals.size();
    std::vector<feature::FeatureImage> images;
    std::vector<std::size_t> labels(n);
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        images.push_back(emb.rasterize_diff(normals[i]));
        labels[i] = std::min(cfg.proxy_groups - 1, i * cfg.proxy_groups / n);
    }

    std::vector<Param<float>*> params;
    for (auto& layer : emb.backbone_) {
        for (Param<float>* p : layer->params()) params.push_back(p);
    }
    for (Param<float>* p : emb.head_->params()) params.push_back(p);

    classifier::TrainHyper hyper;
    hyper.learning_rate = cfg.learning_rate;
    hyper.batch_size = cfg.batch_size;
    hyper.epochs = cfg.epochs;
    hyper.seed = seed;
    classifier::Adam<float> opt(params, hyper);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(derive_seed(seed, "embedder-shuffle", {static_cast<std::uint64_t>(epoch)}));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            std::vector<feature::FeatureImage> batch;
            std::vector<std::size_t> targets;
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(images[order[i]]);
                targets.push_back(labels[order[i]]);
            }
            Tensor<float> x = classifier::images_to_tensor(batch, cfg.image_size);
            Tensor<float> feat = emb.forward_backbone(x, /*training=*/true);
            Tensor<float> logits = emb.head_->forward(feat, true);
            Tensor<float> dlogits;
            classifier::softmax_cross_entropy(logits, targets, &dlogits);
            for (Param<float>* p : params) p->grad.zero();
            Tensor<float> dfeat = emb.head_->backward(dlogits);
            for (auto it = emb.backbone_.rbegin(); it != emb.backbone_.rend(); ++it) {
                dfeat = (*it)->backward(dfeat);
            }
            opt.step();
        }
    }
    return emb;
}

}  // namespace rffi::detection
