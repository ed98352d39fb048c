#ifndef RFFI_MATRIX_HPP
#define RFFI_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "rffi/common.hpp"

namespace rffi {

// Dense row-count x col-count matrix, column-major in the STFT sense:
// one contiguous block per time frame (column) so frames can be written
// independently. Indexed as (row, col).
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    T* col_data(std::size_t c) { return data_.data() + c * rows_; }
    const T* col_data(std::size_t c) const { return data_.data() + c * rows_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

}  // namespace rffi

#endif
