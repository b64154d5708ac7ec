#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <vector>

namespace goodie {

// Dense row-major 2-D array of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }

    bool same_shape(const Matrix& o) const {
        return rows == o.rows && cols == o.cols;
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// C = A * B, OpenMP over rows of A.
Matrix matmul_dense(const Matrix& a, const Matrix& b);

// Serial reference, kept for testing and benchmarking.
Matrix matmul_dense_serial(const Matrix& a, const Matrix& b);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace goodie
