#ifndef RFFI_CLASSIFIER_NETWORK_HPP
#define RFFI_CLASSIFIER_NETWORK_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rffi/classifier/layers.hpp"
#include "rffi/feature/raster.hpp"
#include "rffi/matrix.hpp"

namespace rffi::classifier {

// Stack description: [conv 3x3 + batch-norm + ReLU] per entry of
// conv_filters, with 2x2/stride-2 max pooling after the first two blocks,
// then one fully connected layer into softmax. Convolutions are unpadded;
// that choice is what makes the fully connected fan-in 115200 (= 32*60*60)
// at 256x256 input and 20 classes.
struct ArchSpec {
    std::size_t input_size = 256;
    std::vector<std::size_t> conv_filters = {8, 16, 32};
    std::size_t num_classes = 20;

    void validate() const;
    bool pooled_after(std::size_t block) const { return block < 2; }
    std::size_t spatial_after_convs() const;
    std::size_t flattened_size() const;
    std::vector<std::size_t> per_layer_param_counts() const;  // conv0, bn0, conv1, ... , fc
    std::size_t param_count() const;
    bool operator==(const ArchSpec& other) const = default;
};

template <typename T>
class Network {
public:
    Network() = default;
    explicit Network(const ArchSpec& arch) : arch_(arch) { build_layers(); }

    Network(const Network& other) : arch_(other.arch_) {
        if (!other.layers_.empty()) {
            build_layers();
            copy_state_from(other);
        }
    }
    Network& operator=(const Network& other) {
        if (this != &other) {
            Network tmp(other);
            *this = std::move(tmp);
        }
        return *this;
    }
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    const ArchSpec& arch() const { return arch_; }

    void init_weights(std::uint64_t seed) {
        std::mt19937_64 rng(derive_seed(seed, "init"));
        for (Conv2d<T>* conv : conv_layers_) conv->init_he(rng);
        fc_->init_he(rng);
    }

    void reinit_head(std::uint64_t seed) {
        std::mt19937_64 rng(derive_seed(seed, "head"));
        fc_->init_he(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool training = false) {
        Tensor<T> cur = x;
        for (auto& layer : layers_) cur = layer->forward(cur, training);
        return cur;
    }

    Tensor<T> backward(const Tensor<T>& dlogits) {
        Tensor<T> cur = dlogits;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
        return cur;
    }

    std::vector<Param<T>*> params() {
        std::vector<Param<T>*> ps;
        for (auto& layer : layers_) {
            for (Param<T>* p : layer->params()) ps.push_back(p);
        }
        return ps;
    }

    std::vector<Tensor<T>*> buffers() {
        std::vector<Tensor<T>*> bs;
        for (auto& layer : layers_) {
            for (Tensor<T>* b : layer->buffers()) bs.push_back(b);
        }
        return bs;
    }

    // params followed by buffers: the full persistent state in fixed order
    std::vector<Tensor<T>*> state_tensors() {
        std::vector<Tensor<T>*> ts;
        for (Param<T>* p : params()) ts.push_back(&p->value);
        for (Tensor<T>* b : buffers()) ts.push_back(b);
        return ts;
    }

    void zero_grad() {
        for (Param<T>* p : params()) p->grad.zero();
    }

    std::size_t param_count() {
        std::size_t total = 0;
        for (Param<T>* p : params()) total += p->value.size();
        return total;
    }

    Linear<T>* fc() { return fc_; }
    const std::vector<Conv2d<T>*>& conv_layers() { return conv_layers_; }
    const std::vector<BatchNorm2d<T>*>& bn_layers() { return bn_layers_; }

    void set_head_lr_factor(double factor) {
        fc_->weight().lr_factor = factor;
        fc_->bias().lr_factor = factor;
    }

    void set_update_running_stats(bool update) {
        for (BatchNorm2d<T>* bn : bn_layers_) bn->set_update_running_stats(update);
    }

    void copy_state_from(const Network& other) {
        require(arch_ == other.arch_, "network state copy: architecture mismatch");
        auto& self = *this;
        auto& o = const_cast<Network&>(other);
        auto dst = self.state_tensors();
        auto src = o.state_tensors();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->v = src[i]->v;
    }

    // copies convolution and batch-norm state only; the head stays as-is
    void copy_backbone_from(Network& base) {
        require(arch_.conv_filters == base.arch_.conv_filters &&
                    arch_.input_size == base.arch_.input_size,
                "backbone copy: incompatible architectures");
        for (std::size_t i = 0; i < conv_layers_.size(); ++i) {
            conv_layers_[i]->weight().value.v = base.conv_layers_[i]->weight().value.v;
            conv_layers_[i]->bias().value.v = base.conv_layers_[i]->bias().value.v;
        }
        auto dstb = buffers();
        auto srcb = base.buffers();
        for (std::size_t i = 0; i < dstb.size(); ++i) dstb[i]->v = srcb[i]->v;
        for (std::size_t i = 0; i < bn_layers_.size(); ++i) {
            auto dp = bn_layers_[i]->params();
            auto sp = base.bn_layers_[i]->params();
            for (std::size_t j = 0; j < dp.size(); ++j) dp[j]->value.v = sp[j]->value.v;
        }
    }

private:
    void build_layers() {
        arch_.validate();
        std::size_t in_ch = 1;
        for (std::size_t b = 0; b < arch_.conv_filters.size(); ++b) {
            auto conv = std::make_unique<Conv2d<T>>(in_ch, arch_.conv_filters[b]);
            conv_layers_.push_back(conv.get());
            layers_.push_back(std::move(conv));
            auto bn = std::make_unique<BatchNorm2d<T>>(arch_.conv_filters[b]);
            bn_layers_.push_back(bn.get());
            layers_.push_back(std::move(bn));
            layers_.push_back(std::make_unique<ReLU<T>>());
            if (arch_.pooled_after(b)) layers_.push_back(std::make_unique<MaxPool2d<T>>());
            in_ch = arch_.conv_filters[b];
        }
        auto fc = std::make_unique<Linear<T>>(arch_.flattened_size(), arch_.num_classes);
        fc_ = fc.get();
        layers_.push_back(std::move(fc));
    }

    ArchSpec arch_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<Conv2d<T>*> conv_layers_;
    std::vector<BatchNorm2d<T>*> bn_layers_;
    Linear<T>* fc_ = nullptr;
};

// Softmax head output for a batch of observations.
struct PosteriorMatrix {
    RealMatrix probs;  // O x C
    std::vector<std::string> row_observations;
    std::vector<std::string> col_classes;

    std::size_t observations() const { return probs.rows(); }
    std::size_t classes() const { return probs.cols(); }
    void validate() const;
};

struct TrainedModel {
    ArchSpec arch;
    std::vector<std::string> class_labels;
    std::string provenance = "scratch";  // "scratch" or "transfer:<base_id>"
    std::string model_id;
    Network<float> net;
};

// He-initialized model with fresh batch-norm state; deterministic in seed.
TrainedModel build(const ArchSpec& arch, const std::vector<std::string>& class_labels,
                   std::uint64_t seed);

// Tensor conversion: pixel values scaled to [0, 1].
Tensor<float> images_to_tensor(const std::vector<feature::FeatureImage>& images,
                               std::size_t expected_size);

// Inference-mode posteriors; rows sum to 1.
PosteriorMatrix forward(TrainedModel& model, const std::vector<feature::FeatureImage>& batch);

// Row-wise stable softmax of a logits tensor (N x C).
RealMatrix softmax_rows(const Tensor<float>& logits);

}  // namespace rffi::classifier

#endif
