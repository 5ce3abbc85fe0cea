#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "astsum/errors.hpp"

namespace astsum {

/// Dense row-major array of 64-bit floats. Rank 1 or 2 is all the model needs.
class Tensor {
public:
    Tensor() = default;
    Tensor(int rows, int cols) : shape_{rows, cols}, data_(static_cast<size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw ShapeError("negative tensor dimension");
    }
    explicit Tensor(int n) : shape_{n}, data_(static_cast<size_t>(n), 0.0) {
        if (n < 0) throw ShapeError("negative tensor dimension");
    }

    static Tensor row_vector(std::initializer_list<double> xs) {
        Tensor t(1, static_cast<int>(xs.size()));
        int j = 0;
        for (double x : xs) t.at(0, j++) = x;
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int rows() const { return shape_.empty() ? 0 : shape_[0]; }
    int cols() const { return rank() == 2 ? shape_[1] : (rank() == 1 ? shape_[0] : 0); }
    size_t numel() const { return data_.size(); }
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    double& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    double at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
    double& at(int i) { return data_[static_cast<size_t>(i)]; }
    double at(int i) const { return data_[static_cast<size_t>(i)]; }

    std::span<double> row(int i) { return {data_.data() + static_cast<size_t>(i) * shape_[1], static_cast<size_t>(shape_[1])}; }
    std::span<const double> row(int i) const { return {data_.data() + static_cast<size_t>(i) * shape_[1], static_cast<size_t>(shape_[1])}; }

    std::span<double> flat() { return {data_.data(), data_.size()}; }
    std::span<const double> flat() const { return {data_.data(), data_.size()}; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

/// n x m boolean mask, stored as bytes.
struct BoolMatrix {
    BoolMatrix() = default;
    BoolMatrix(int rows, int cols, bool init = false)
        : rows(rows), cols(cols), data(static_cast<size_t>(rows) * cols, init ? 1 : 0) {}

    bool at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j] != 0; }
    void set(int i, int j, bool v) { data[static_cast<size_t>(i) * cols + j] = v ? 1 : 0; }

    int rows = 0, cols = 0;
    std::vector<uint8_t> data;
};

/// n x m integer matrix.
struct IntMatrix {
    IntMatrix() = default;
    IntMatrix(int rows, int cols, int init = 0)
        : rows(rows), cols(cols), data(static_cast<size_t>(rows) * cols, init) {}

    int& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    int at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    int rows = 0, cols = 0;
    std::vector<int> data;
};

}  // namespace astsum
