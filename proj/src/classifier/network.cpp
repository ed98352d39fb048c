#include "rffi/classifier/network.hpp"

#include <cmath>

namespace rffi::classifier {

void ArchSpec::validate() const {
    require_config(input_size >= 1, "input size must be >= 1");
    require_config(num_classes >= 2, "need at least two classes");
    std::size_t s = input_size;
    for (std::size_t b = 0; b < conv_filters.size(); ++b) {
        require_config(conv_filters[b] >= 1, "conv block must have at least one filter");
        require_config(s >= 3, "input too small for the conv stack");
        s -= 2;
        if (pooled_after(b)) {
            require_config(s >= 2, "input too small for pooling");
            s = (s - 2) / 2 + 1;
        }
    }
    require_config(s >= 1, "conv stack consumed the whole input");
}

std::size_t ArchSpec::spatial_after_convs() const {
    std::size_t s = input_size;
    for (std::size_t b = 0; b < conv_filters.size(); ++b) {
        s -= 2;
        if (pooled_after(b)) s = (s - 2) / 2 + 1;
    }
    return s;
}

std::size_t ArchSpec::flattened_size() const {
    const std::size_t s = spatial_after_convs();
    const std::size_t ch = conv_filters.empty() ? 1 : conv_filters.back();
    return ch * s * s;
}

std::vector<std::size_t> ArchSpec::per_layer_param_counts() const {
    std::vector<std::size_t> counts;
    std::size_t in_ch = 1;
    for (std::size_t f : conv_filters) {
        counts.push_back(f * in_ch * 9 + f);  // conv weights + bias
        counts.push_back(2 * f);              // batch-norm gamma + beta
        in_ch = f;
    }
    counts.push_back(flattened_size() * num_classes + num_classes);
    return counts;
}

std::size_t ArchSpec::param_count() const {
    std::size_t total = 0;
    for (std::size_t c : per_layer_param_counts()) total += c;
    return total;
}

void PosteriorMatrix::validate() const {
    require(probs.rows() == row_observations.size(), "posterior rows mismatch");
    require(probs.cols() == col_classes.size(), "posterior cols mismatch");
    for (std::size_t o = 0; o < probs.rows(); ++o) {
        double sum = 0.0;
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            const double p = probs(o, c);
            require(p >= 0.0 && p <= 1.0, "posterior entries must lie in [0, 1]");
            sum += p;
        }
        require(std::abs(sum - 1.0) < 1e-6, "posterior rows must sum to 1");
    }
}

TrainedModel build(const ArchSpec& arch, const std::vector<std::string>& class_labels,
                   std::uint64_t seed) {
    arch.validate();
    require(class_labels.size() == arch.num_classes, "class label count must match the architecture");
    for (std::size_t i = 0; i < class_labels.size(); ++i) {
        for (std::size_t j = i + 1; j < class_labels.size(); ++j) {
            require(class_labels[i] != class_labels[j], "class labels must be distinct");
        }
    }
    TrainedModel model;
    model.arch = arch;
    model.class_labels = class_labels;
    model.provenance = "scratch";
    char id[32];
    std::snprintf(id, sizeof(id), "model-%016llx",
                  static_cast<unsigned long long>(derive_seed(seed, "model-id")));
    model.model_id = id;
    model.net = Network<float>(arch);
    model.net.init_weights(seed);
    return model;
}

Tensor<float> images_to_tensor(const std::vector<feature::FeatureImage>& images,
                               std::size_t expected_size) {
    require(!images.empty(), "empty image batch");
    Tensor<float> x(images.size(), 1, expected_size, expected_size);
    for (std::size_t n = 0; n < images.size(); ++n) {
        const feature::FeatureImage& img = images[n];
        require(img.size == expected_size, "image size does not match the architecture input");
        const float scale = 1.0f / static_cast<float>((1 << img.depth) - 1);
        float* dst = x.chan(n, 0);
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            dst[i] = static_cast<float>(img.pixels[i]) * scale;
        }
    }
    return x;
}

RealMatrix softmax_rows(const Tensor<float>& logits) {
    RealMatrix probs(logits.n, logits.c);
    for (std::size_t o = 0; o < logits.n; ++o) {
        const float* row = logits.data() + o * logits.c;
        double mx = row[0];
        for (std::size_t c = 1; c < logits.c; ++c) mx = std::max(mx, static_cast<double>(row[c]));
        double denom = 0.0;
        for (std::size_t c = 0; c < logits.c; ++c) denom += std::exp(static_cast<double>(row[c]) - mx);
        for (std::size_t c = 0; c < logits.c; ++c) {
            probs(o, c) = std::exp(static_cast<double>(row[c]) - mx) / denom;
        }
    }
    return probs;
}

PosteriorMatrix forward(TrainedModel& model, const std::vector<feature::FeatureImage>& batch) {
    Tensor<float> x = images_to_tensor(batch, model.arch.input_size);
    const Tensor<float> logits = model.net.forward(x, /*training=*/false);
    PosteriorMatrix pm;
    pm.probs = softmax_rows(logits);
    pm.col_classes = model.class_labels;
    pm.row_observations.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        pm.row_observations[i] = "obs" + std::to_string(i);
    }
    pm.validate();
    return pm;
}

}  // namespace rffi::classifier
