#ifndef RFFI_CLASSIFIER_LAYERS_HPP
#define RFFI_CLASSIFIER_LAYERS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rffi/classifier/tensor.hpp"

namespace rffi::classifier {

// One learnable tensor plus its gradient accumulator and the learning-rate
// factor the optimizer applies on top of the global rate (transfer learning
// boosts replaced layers by this factor).
template <typename T>
struct Param {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    double lr_factor = 1.0;
};

template <typename T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual const char* kind() const = 0;
    // training=true uses batch statistics where applicable
    virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
    virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
    virtual std::vector<Param<T>*> params() { return {}; }
    // persistent non-learnable state (batch-norm running statistics)
    virtual std::vector<Tensor<T>*> buffers() { return {}; }
};

// 3x3 valid (unpadded) convolution, stride 1.
template <typename T>
class Conv2d : public Layer<T> {
public:
    Conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t ksize = 3)
        : in_ch_(in_ch), out_ch_(out_ch), k_(ksize) {
        weight_.name = "conv.weight";
        weight_.value = Tensor<T>(out_ch, in_ch, k_, k_);
        weight_.grad = Tensor<T>(out_ch, in_ch, k_, k_);
        bias_.name = "conv.bias";
        bias_.value = Tensor<T>::vec(out_ch);
        bias_.grad = Tensor<T>::vec(out_ch);
    }

    const char* kind() const override { return "conv"; }

    void init_he(std::mt19937_64& rng) {
        const double stddev = std::sqrt(2.0 / static_cast<double>(in_ch_ * k_ * k_));
        std::normal_distribution<double> dist(0.0, stddev);
        for (T& v : weight_.value.v) v = static_cast<T>(dist(rng));
        bias_.value.zero();
    }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        require(x.c == in_ch_ && x.h >= k_ && x.w >= k_, "conv: bad input shape");
        x_ = x;
        const std::size_t oh = x.h - k_ + 1, ow = x.w - k_ + 1;
        Tensor<T> y(x.n, out_ch_, oh, ow);
        for (std::size_t n = 0; n < x.n; ++n) {
            for (std::size_t oc = 0; oc < out_ch_; ++oc) {
                T* yp = y.chan(n, oc);
                const T b = bias_.value.v[oc];
                for (std::size_t i = 0; i < oh * ow; ++i) yp[i] = b;
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    const T* xp = x.chan(n, ic);
                    const T* wp = weight_.value.chan(oc, ic);
                    for (std::size_t ky = 0; ky < k_; ++ky) {
                        for (std::size_t kx = 0; kx < k_; ++kx) {
                            const T wv = wp[ky * k_ + kx];
                            for (std::size_t oy = 0; oy < oh; ++oy) {
                                const T* xrow = xp + (oy + ky) * x.w + kx;
                                T* yrow = yp + oy * ow;
                                for (std::size_t ox = 0; ox < ow; ++ox) yrow[ox] += wv * xrow[ox];
                            }
                        }
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        const std::size_t oh = x_.h - k_ + 1, ow = x_.w - k_ + 1;
        require(dy.n == x_.n && dy.c == out_ch_ && dy.h == oh && dy.w == ow,
                "conv backward: bad gradient shape");
        Tensor<T> dx(x_.n, in_ch_, x_.h, x_.w);
        for (std::size_t n = 0; n < x_.n; ++n) {
            for (std::size_t oc = 0; oc < out_ch_; ++oc) {
                const T* dyp = dy.chan(n, oc);
                T dbsum = T{};
                for (std::size_t i = 0; i < oh * ow; ++i) dbsum += dyp[i];
                bias_.grad.v[oc] += dbsum;
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    const T* xp = x_.chan(n, ic);
                    T* dxp = dx.chan(n, ic);
                    const T* wp = weight_.value.chan(oc, ic);
                    T* gwp = weight_.grad.chan(oc, ic);
                    for (std::size_t ky = 0; ky < k_; ++ky) {
                        for (std::size_t kx = 0; kx < k_; ++kx) {
                            const T wv = wp[ky * k_ + kx];
                            T gw = T{};
                            for (std::size_t oy = 0; oy < oh; ++oy) {
                                const T* xrow = xp + (oy + ky) * x_.w + kx;
                                T* dxrow = dxp + (oy + ky) * x_.w + kx;
                                const T* dyrow = dyp + oy * ow;
                                for (std::size_t ox = 0; ox < ow; ++ox) {
                                    gw += xrow[ox] * dyrow[ox];
                                    dxrow[ox] += wv * dyrow[ox];
                                }
                            }
                            gwp[ky * k_ + kx] += gw;
                        }
                    }
                }
            }
        }
        return dx;
    }

    std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

    std::size_t in_channels() const { return in_ch_; }
    std::size_t out_channels() const { return out_ch_; }
    Param<T>& weight() { return weight_; }
    Param<T>& bias() { return bias_; }

private:
    std::size_t in_ch_, out_ch_, k_;
    Param<T> weight_;
    Param<T> bias_;
    Tensor<T> x_;
};

template <typename T>
class BatchNorm2d : public Layer<T> {
public:
    explicit BatchNorm2d(std::size_t channels, double momentum = 0.9, double eps = 1e-5)
        : ch_(channels), momentum_(momentum), eps_(eps) {
        gamma_.name = "bn.gamma";
        gamma_.value = Tensor<T>::vec(channels, T{1});
        gamma_.grad = Tensor<T>::vec(channels);
        beta_.name = "bn.beta";
        beta_.value = Tensor<T>::vec(channels);
        beta_.grad = Tensor<T>::vec(channels);
        running_mean_ = Tensor<T>::vec(channels, T{0});
        running_var_ = Tensor<T>::vec(channels, T{1});
    }

    const char* kind() const override { return "batchnorm"; }

    // gradient checking re-evaluates the loss many times; freezing the
    // running statistics keeps those evaluations side-effect free
    void set_update_running_stats(bool update) { update_running_ = update; }

    Tensor<T> forward(const Tensor<T>& x, bool training) override {
        require(x.c == ch_, "batchnorm: channel mismatch");
        const std::size_t count = x.n * x.plane();
        Tensor<T> y(x.n, x.c, x.h, x.w);
        if (training) {
            xhat_ = Tensor<T>(x.n, x.c, x.h, x.w);
            invstd_ = Tensor<T>::vec(ch_);
            count_ = count;
            for (std::size_t c = 0; c < ch_; ++c) {
                T mean = T{};
                for (std::size_t n = 0; n < x.n; ++n) {
                    const T* xp = x.chan(n, c);
                    for (std::size_t i = 0; i < x.plane(); ++i) mean += xp[i];
                }
                mean /= static_cast<T>(count);
                T var = T{};
                for (std::size_t n = 0; n < x.n; ++n) {
                    const T* xp = x.chan(n, c);
                    for (std::size_t i = 0; i < x.plane(); ++i) {
                        const T d = xp[i] - mean;
                        var += d * d;
                    }
                }
                var /= static_cast<T>(count);
                const T inv = T{1} / std::sqrt(var + static_cast<T>(eps_));
                invstd_.v[c] = inv;
                const T g = gamma_.value.v[c], b = beta_.value.v[c];
                for (std::size_t n = 0; n < x.n; ++n) {
                    const T* xp = x.chan(n, c);
                    T* hp = xhat_.chan(n, c);
                    T* yp = y.chan(n, c);
                    for (std::size_t i = 0; i < x.plane(); ++i) {
                        const T h = (xp[i] - mean) * inv;
                        hp[i] = h;
                        yp[i] = g * h + b;
                    }
                }
                if (update_running_) {
                    running_mean_.v[c] = static_cast<T>(momentum_) * running_mean_.v[c] +
                                         static_cast<T>(1.0 - momentum_) * mean;
                    running_var_.v[c] = static_cast<T>(momentum_) * running_var_.v[c] +
                                        static_cast<T>(1.0 - momentum_) * var;
                }
            }
        } else {
            for (std::size_t c = 0; c < ch_; ++c) {
                const T inv = T{1} / std::sqrt(running_var_.v[c] + static_cast<T>(eps_));
                const T mean = running_mean_.v[c];
                const T g = gamma_.value.v[c], b = beta_.value.v[c];
                for (std::size_t n = 0; n < x.n; ++n) {
                    const T* xp = x.chan(n, c);
                    T* yp = y.chan(n, c);
                    for (std::size_t i = 0; i < x.plane(); ++i) {
                        yp[i] = g * (xp[i] - mean) * inv + b;
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        require(dy.c == ch_ && dy.size() == xhat_.size(), "batchnorm backward: bad gradient shape");
        Tensor<T> dx(dy.n, dy.c, dy.h, dy.w);
        const T cnt = static_cast<T>(count_);
        for (std::size_t c = 0; c < ch_; ++c) {
            T sum_dy = T{}, sum_dy_xhat = T{};
            for (std::size_t n = 0; n < dy.n; ++n) {
                const T* dp = dy.chan(n, c);
                const T* hp = xhat_.chan(n, c);
                for (std::size_t i = 0; i < dy.plane(); ++i) {
                    sum_dy += dp[i];
                    sum_dy_xhat += dp[i] * hp[i];
                }
            }
            gamma_.grad.v[c] += sum_dy_xhat;
            beta_.grad.v[c] += sum_dy;
            const T scale = gamma_.value.v[c] * invstd_.v[c] / cnt;
            for (std::size_t n = 0; n < dy.n; ++n) {
                const T* dp = dy.chan(n, c);
                const T* hp = xhat_.chan(n, c);
                T* xp = dx.chan(n, c);
                for (std::size_t i = 0; i < dy.plane(); ++i) {
                    xp[i] = scale * (cnt * dp[i] - sum_dy - hp[i] * sum_dy_xhat);
                }
            }
        }
        return dx;
    }

    std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
    std::vector<Tensor<T>*> buffers() override { return {&running_mean_, &running_var_}; }

private:
    std::size_t ch_;
    double momentum_, eps_;
    bool update_running_ = true;
    Param<T> gamma_, beta_;
    Tensor<T> running_mean_, running_var_;
    Tensor<T> xhat_, invstd_;
    std::size_t count_ = 0;
};

template <typename T>
class ReLU : public Layer<T> {
public:
    const char* kind() const override { return "relu"; }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        mask_.assign(x.size(), 0);
        Tensor<T> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y.v[i] > T{}) {
                mask_[i] = 1;
            } else {
                y.v[i] = T{};
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        require(dy.size() == mask_.size(), "relu backward: bad gradient shape");
        Tensor<T> dx = dy;
        for (std::size_t i = 0; i < dx.size(); ++i) {
            if (!mask_[i]) dx.v[i] = T{};
        }
        return dx;
    }

private:
    std::vector<std::uint8_t> mask_;
};

// 2x2 max pooling with stride 2, windows fully inside the input.
template <typename T>
class MaxPool2d : public Layer<T> {
public:
    const char* kind() const override { return "maxpool"; }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        require(x.h >= 2 && x.w >= 2, "maxpool: input too small");
        in_shape_ = {x.n, x.c, x.h, x.w};
        const std::size_t oh = (x.h - 2) / 2 + 1, ow = (x.w - 2) / 2 + 1;
        Tensor<T> y(x.n, x.c, oh, ow);
        argmax_.assign(y.size(), 0);
        std::size_t out_idx = 0;
        for (std::size_t n = 0; n < x.n; ++n) {
            for (std::size_t c = 0; c < x.c; ++c) {
                const T* xp = x.chan(n, c);
                T* yp = y.chan(n, c);
                for (std::size_t oy = 0; oy < oh; ++oy) {
                    for (std::size_t ox = 0; ox < ow; ++ox) {
                        const std::size_t base = (2 * oy) * x.w + 2 * ox;
                        std::size_t best = base;
                        T bv = xp[base];
                        const std::size_t cands[3] = {base + 1, base + x.w, base + x.w + 1};
                        for (std::size_t cand : cands) {
                            if (xp[cand] > bv) {
                                bv = xp[cand];
                                best = cand;
                            }
                        }
                        yp[oy * ow + ox] = bv;
                        argmax_[out_idx++] = (n * x.c + c) * x.plane() + best;
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        require(dy.size() == argmax_.size(), "maxpool backward: bad gradient shape");
        Tensor<T> dx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
        for (std::size_t i = 0; i < dy.size(); ++i) {
            dx.v[argmax_[i]] += dy.v[i];
        }
        return dx;
    }

private:
    std::array<std::size_t, 4> in_shape_{};
    std::vector<std::size_t> argmax_;
};

// Spatial mean per channel: (N, C, H, W) -> (N, C, 1, 1).
template <typename T>
class GlobalAvgPool : public Layer<T> {
public:
    const char* kind() const override { return "gap"; }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        in_shape_ = {x.n, x.c, x.h, x.w};
        Tensor<T> y(x.n, x.c, 1, 1);
        const T inv = T{1} / static_cast<T>(x.plane());
        for (std::size_t n = 0; n < x.n; ++n) {
            for (std::size_t c = 0; c < x.c; ++c) {
                const T* xp = x.chan(n, c);
                T acc = T{};
                for (std::size_t i = 0; i < x.plane(); ++i) acc += xp[i];
                y.at(n, c, 0, 0) = acc * inv;
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        Tensor<T> dx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
        const T inv = T{1} / static_cast<T>(dx.plane());
        for (std::size_t n = 0; n < dx.n; ++n) {
            for (std::size_t c = 0; c < dx.c; ++c) {
                const T g = dy.at(n, c, 0, 0) * inv;
                T* xp = dx.chan(n, c);
                for (std::size_t i = 0; i < dx.plane(); ++i) xp[i] = g;
            }
        }
        return dx;
    }

private:
    std::array<std::size_t, 4> in_shape_{};
};

// Fully connected layer over the flattened input.
template <typename T>
class Linear : public Layer<T> {
public:
    Linear(std::size_t in_features, std::size_t out_features)
        : in_(in_features), out_(out_features) {
        weight_.name = "fc.weight";
        weight_.value = Tensor<T>(out_features, in_features, 1, 1);
        weight_.grad = Tensor<T>(out_features, in_features, 1, 1);
        bias_.name = "fc.bias";
        bias_.value = Tensor<T>::vec(out_features);
        bias_.grad = Tensor<T>::vec(out_features);
    }

    const char* kind() const override { return "linear"; }

    void init_he(std::mt19937_64& rng) {
        const double stddev = std::sqrt(2.0 / static_cast<double>(in_));
        std::normal_distribution<double> dist(0.0, stddev);
        for (T& v : weight_.value.v) v = static_cast<T>(dist(rng));
        bias_.value.zero();
    }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        require(x.c * x.h * x.w == in_, "linear: flattened input size mismatch");
        x_ = x;
        Tensor<T> y(x.n, out_, 1, 1);
        for (std::size_t n = 0; n < x.n; ++n) {
            const T* xp = x.data() + n * in_;
            T* yp = y.data() + n * out_;
            for (std::size_t o = 0; o < out_; ++o) {
                const T* wp = weight_.value.data() + o * in_;
                T acc = bias_.value.v[o];
                for (std::size_t i = 0; i < in_; ++i) acc += wp[i] * xp[i];
                yp[o] = acc;
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        require(dy.n == x_.n && dy.c == out_ && dy.h == 1 && dy.w == 1,
                "linear backward: bad gradient shape");
        Tensor<T> dx(x_.n, x_.c, x_.h, x_.w);
        for (std::size_t n = 0; n < x_.n; ++n) {
            const T* xp = x_.data() + n * in_;
            const T* dyp = dy.data() + n * out_;
            T* dxp = dx.data() + n * in_;
            for (std::size_t o = 0; o < out_; ++o) {
                const T g = dyp[o];
                bias_.grad.v[o] += g;
                T* gwp = weight_.grad.data() + o * in_;
                const T* wp = weight_.value.data() + o * in_;
                for (std::size_t i = 0; i < in_; ++i) {
                    gwp[i] += g * xp[i];
                    dxp[i] += g * wp[i];
                }
            }
        }
        return dx;
    }

    std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }
    Param<T>& weight() { return weight_; }
    Param<T>& bias() { return bias_; }

private:
    std::size_t in_, out_;
    Param<T> weight_, bias_;
    Tensor<T> x_;
};

}  // namespace rffi::classifier

#endif
