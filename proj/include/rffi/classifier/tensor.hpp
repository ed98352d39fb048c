#ifndef RFFI_CLASSIFIER_TENSOR_HPP
#define RFFI_CLASSIFIER_TENSOR_HPP

#include <cstddef>
#include <vector>

#include "rffi/common.hpp"

namespace rffi::classifier {

// Dense NCHW tensor with flat contiguous storage. Parameter tensors reuse
// the same container with their own shape conventions (conv: OC x IC x KH x KW,
// linear: OUT x IN x 1 x 1, per-channel vectors: C x 1 x 1 x 1).
template <typename T>
struct Tensor {
    std::size_t n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(std::size_t n_, std::size_t c_, std::size_t h_, std::size_t w_, T fill = T{})
        : n(n_), c(c_), h(h_), w(w_), v(n_ * c_ * h_ * w_, fill) {}

    static Tensor vec(std::size_t len, T fill = T{}) { return Tensor(len, 1, 1, 1, fill); }

    std::size_t size() const { return v.size(); }
    std::size_t plane() const { return h * w; }

    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T* chan(std::size_t in, std::size_t ic) { return v.data() + (in * c + ic) * plane(); }
    const T* chan(std::size_t in, std::size_t ic) const { return v.data() + (in * c + ic) * plane(); }

    T& at(std::size_t in, std::size_t ic, std::size_t ih, std::size_t iw) {
        return v[((in * c + ic) * h + ih) * w + iw];
    }
    const T& at(std::size_t in, std::size_t ic, std::size_t ih, std::size_t iw) const {
        return v[((in * c + ic) * h + ih) * w + iw];
    }

    void zero() { std::fill(v.begin(), v.end(), T{}); }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(n, c, h, w);
        for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
        return out;
    }
};

}  // namespace rffi::classifier

#endif
