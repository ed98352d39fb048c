#ifndef RFFI_CLASSIFIER_TRAIN_HPP
#define RFFI_CLASSIFIER_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/classifier/network.hpp"
#include "rffi/feature/dataset.hpp"

namespace rffi::classifier {

struct TrainHyper {
    double learning_rate = 0.005;
    double new_layer_lr_factor = 1.0;  // applied to the replaced head in transfer mode
    std::size_t batch_size = 32;
    int epochs = 30;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    // stop after `plateau_epochs` consecutive epochs with |delta loss| < plateau_delta
    double plateau_delta = 1e-4;
    int plateau_epochs = 3;

    static TrainHyper scratch_defaults(std::uint64_t seed = 0) {
        TrainHyper h;
        h.learning_rate = 0.005;
        h.epochs = 30;
        h.seed = seed;
        return h;
    }
    static TrainHyper transfer_defaults(std::uint64_t seed = 0) {
        TrainHyper h;
        h.learning_rate = 0.0001;
        h.new_layer_lr_factor = 20.0;
        h.epochs = 15;
        h.seed = seed;
        return h;
    }
};

struct EpochStats {
    int epoch = 0;
    double loss = 0.0;
    double accuracy = 0.0;
};

using TrainLog = std::vector<EpochStats>;

std::string train_log_csv(const TrainLog& log);

// Adam with bias correction; per-parameter-group learning-rate factors.
template <typename T>
class Adam {
public:
    Adam(std::vector<Param<T>*> params, const TrainHyper& hyper)
        : params_(std::move(params)), hyper_(hyper) {
        for (Param<T>* p : params_) {
            m_.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
            v_.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
        }
    }

    void step() {
        ++t_;
        const double bc1 = 1.0 - std::pow(hyper_.adam_beta1, t_);
        const double bc2 = 1.0 - std::pow(hyper_.adam_beta2, t_);
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Param<T>& p = *params_[i];
            const double lr = hyper_.learning_rate * p.lr_factor;
            for (std::size_t j = 0; j < p.value.size(); ++j) {
                const double g = static_cast<double>(p.grad.v[j]);
                const double mn = hyper_.adam_beta1 * static_cast<double>(m_[i].v[j]) +
                                  (1.0 - hyper_.adam_beta1) * g;
                const double vn = hyper_.adam_beta2 * static_cast<double>(v_[i].v[j]) +
                                  (1.0 - hyper_.adam_beta2) * g * g;
                m_[i].v[j] = static_cast<T>(mn);
                v_[i].v[j] = static_cast<T>(vn);
                const double mhat = mn / bc1;
                const double vhat = vn / bc2;
                p.value.v[j] -= static_cast<T>(lr * mhat / (std::sqrt(vhat) + hyper_.adam_eps));
            }
        }
    }

private:
    std::vector<Param<T>*> params_;
    TrainHyper hyper_;
    std::vector<Tensor<T>> m_, v_;
    long t_ = 0;
};

// Mean cross-entropy of softmax(logits) against integer class targets.
// Fills dlogits (scaled by 1/batch) when non-null. Returns (loss, correct).
template <typename T>
std::pair<double, std::size_t> softmax_cross_entropy(const Tensor<T>& logits,
                                                     const std::vector<std::size_t>& targets,
                                                     Tensor<T>* dlogits);

// Train from scratch on the claimed labels of `data`. The model keeps its
// class label set; every claimed label in `data` must be in it.
TrainedModel train_scratch(TrainedModel model, const feature::LabeledFeatureSet& data,
                           const TrainHyper& hyper, TrainLog* log = nullptr);

// Fresh model whose backbone (conv + batch-norm state) is copied from a
// trained base and whose head is re-initialized for `class_labels`.
TrainedModel transfer_setup(const TrainedModel& base, const std::vector<std::string>& class_labels,
                            std::uint64_t seed);

// Fine-tune: backbone at hyper.learning_rate, head scaled by
// hyper.new_layer_lr_factor.
TrainedModel transfer(const TrainedModel& base, const feature::LabeledFeatureSet& data,
                      const TrainHyper& hyper, TrainLog* log = nullptr);

// Analytic vs central finite-difference gradients of the cross-entropy loss
// in double precision, on every parameter. Intended for <= 5000-parameter
// configurations.
double gradient_check(const ArchSpec& arch, std::uint64_t seed,
                      const std::vector<feature::FeatureImage>& samples,
                      const std::vector<std::size_t>& targets, double fd_step = 1e-5);

}  // namespace rffi::classifier

#endif
