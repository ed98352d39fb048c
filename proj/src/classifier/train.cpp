#include "rffi/classifier/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace rffi::classifier {

std::string train_log_csv(const TrainLog& log) {
    std::ostringstream os;
    os << "epoch,loss,train_accuracy\n";
    for (const EpochStats& e : log) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.8f,%.6f\n", e.epoch, e.loss, e.accuracy);
        os << buf;
    }
    return os.str();
}

template <typename T>
std::pair<double, std::size_t> softmax_cross_entropy(const Tensor<T>& logits,
                                                     const std::vector<std::size_t>& targets,
                                                     Tensor<T>* dlogits) {
    require(logits.n == targets.size(), "loss: batch size mismatch");
    const std::size_t classes = logits.c;
    if (dlogits) *dlogits = Tensor<T>(logits.n, classes, 1, 1);
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t o = 0; o < logits.n; ++o) {
        const T* row = logits.data() + o * classes;
        double mx = static_cast<double>(row[0]);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < classes; ++c) {
            if (static_cast<double>(row[c]) > mx) {
                mx = static_cast<double>(row[c]);
                arg = c;
            }
        }
        double denom = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            denom += std::exp(static_cast<double>(row[c]) - mx);
        }
        const std::size_t t = targets[o];
        require(t < classes, "loss: target out of range");
        const double logp = static_cast<double>(row[t]) - mx - std::log(denom);
        loss -= logp;
        if (arg == t) ++correct;
        if (dlogits) {
            T* drow = dlogits->data() + o * classes;
            const double inv_batch = 1.0 / static_cast<double>(logits.n);
            for (std::size_t c = 0; c < classes; ++c) {
                const double p = std::exp(static_cast<double>(row[c]) - mx) / denom;
                drow[c] = static_cast<T>((p - (c == t ? 1.0 : 0.0)) * inv_batch);
            }
        }
    }
    return {loss / static_cast<double>(logits.n), correct};
}

template std::pair<double, std::size_t> softmax_cross_entropy<float>(
    const Tensor<float>&, const std::vector<std::size_t>&, Tensor<float>*);
template std::pair<double, std::size_t> softmax_cross_entropy<double>(
    const Tensor<double>&, const std::vector<std::size_t>&, Tensor<double>*);

namespace {

std::vector<std::size_t> targets_for(const feature::LabeledFeatureSet& data,
                                     const std::vector<std::string>& class_labels) {
    std::vector<std::size_t> targets(data.items.size());
    for (std::size_t i = 0; i < data.items.size(); ++i) {
        const auto it = std::find(class_labels.begin(), class_labels.end(), data.items[i].claimed);
        require(it != class_labels.end(),
                "dataset label not in model classes: " + data.items[i].claimed);
        targets[i] = static_cast<std::size_t>(it - class_labels.begin());
    }
    return targets;
}

TrainedModel run_training(TrainedModel model, const feature::LabeledFeatureSet& data,
                          const TrainHyper& hyper, TrainLog* log) {
    require(!data.items.empty(), "training dataset is empty");
    require(hyper.learning_rate >= 0.0, "learning rate must be nonnegative");
    require(hyper.batch_size >= 1, "batch size must be >= 1");
    const std::vector<std::size_t> targets = targets_for(data, model.class_labels);

    Adam<float> opt(model.net.params(), hyper);
    std::vector<std::size_t> order(data.items.size());
    std::iota(order.begin(), order.end(), 0);

    double prev_loss = 0.0;
    int plateau = 0;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(derive_seed(hyper.seed, "shuffle", {static_cast<std::uint64_t>(epoch)}));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
            const std::size_t end = std::min(order.size(), start + hyper.batch_size);
            std::vector<feature::FeatureImage> batch_images;
            std::vector<std::size_t> batch_targets;
            batch_images.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch_images.push_back(data.items[order[i]].image);
                batch_targets.push_back(targets[order[i]]);
            }
            Tensor<float> x = images_to_tensor(batch_images, model.arch.input_size);
            Tensor<float> logits = model.net.forward(x, /*training=*/true);
            Tensor<float> dlogits;
            const auto [loss, correct] = softmax_cross_entropy(logits, batch_targets, &dlogits);
            epoch_loss += loss * static_cast<double>(end - start);
            epoch_correct += correct;

            model.net.zero_grad();
            model.net.backward(dlogits);
            opt.step();
        }
        epoch_loss /= static_cast<double>(order.size());
        const double acc = static_cast<double>(epoch_correct) / static_cast<double>(order.size());
        if (log) log->push_back({epoch + 1, epoch_loss, acc});

        if (epoch > 0 && std::abs(epoch_loss - prev_loss) < hyper.plateau_delta) {
            if (++plateau >= hyper.plateau_epochs) break;
        } else {
            plateau = 0;
        }
        prev_loss = epoch_loss;
    }
    return model;
}

}  // namespace

TrainedModel train_scratch(TrainedModel model, const feature::LabeledFeatureSet& data,
                           const TrainHyper& hyper, TrainLog* log) {
    model.provenance = "scratch";
    return run_training(std::move(model), data, hyper, log);
}

TrainedModel transfer_setup(const TrainedModel& base, const std::vector<std::string>& class_labels,
                            std::uint64_t seed) {
    ArchSpec arch = base.arch;
    arch.num_classes = class_labels.size();
    TrainedModel model = build(arch, class_labels, seed);
    model.net.copy_backbone_from(const_cast<TrainedModel&>(base).net);
    model.net.reinit_head(seed);
    model.provenance = "transfer:" + base.model_id;
    return model;
}

TrainedModel transfer(const TrainedModel& base, const feature::LabeledFeatureSet& data,
                      const TrainHyper& hyper, TrainLog* log) {
    require(!data.items.empty(), "transfer dataset is empty");
    std::vector<std::string> labels = data.distinct_claimed_labels();
    TrainedModel model = transfer_setup(base, labels, hyper.seed);
    model.net.set_head_lr_factor(hyper.new_layer_lr_factor);
    if (hyper.epochs <= 0) return model;
    return run_training(std::move(model), data, hyper, log);
}

double gradient_check(const ArchSpec& arch, std::uint64_t seed,
                      const std::vector<feature::FeatureImage>& samples,
                      const std::vector<std::size_t>& targets, double fd_step) {
    require(!samples.empty() && samples.size() == targets.size(), "gradient check: bad inputs");
    arch.validate();
    require(arch.param_count() <= 5000, "gradient check: configuration too large");

    Network<double> net(arch);
    net.init_weights(seed);
    net.set_update_running_stats(false);

    Tensor<float> xf = images_to_tensor(samples, arch.input_size);
    Tensor<double> x = xf.cast<double>();

    // analytic gradients
    Tensor<double> logits = net.forward(x, /*training=*/true);
    Tensor<double> dlogits;
    softmax_cross_entropy(logits, targets, &dlogits);
    net.zero_grad();
    net.backward(dlogits);

    auto loss_at = [&]() {
        Tensor<double> l = net.forward(x, /*training=*/true);
        return softmax_cross_entropy<double>(l, targets, nullptr).first;
    };

    double max_rel = 0.0;
    for (Param<double>* p : net.params()) {
        for (std::size_t j = 0; j < p->value.size(); ++j) {
            const double orig = p->value.v[j];
            p->value.v[j] = orig + fd_step;
            const double lp = loss_at();
            p->value.v[j] = orig - fd_step;
            const double lm = loss_at();
            p->value.v[j] = orig;
            const double numeric = (lp - lm) / (2.0 * fd_step);
            const double analytic = p->grad.v[j];
            const double rel = std::abs(analytic - numeric) /
                               std::max(1e-6, std::abs(analytic) + std::abs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace rffi::classifier
