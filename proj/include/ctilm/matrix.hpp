#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ctilm {

// Dense row-major matrix of doubles. Covariate matrices are stored with one
// column per individual (p x n); pairwise matrices are n x n.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool square() const { return rows_ == cols_; }

    bool symmetric(double tol = 0.0) const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    bool zero_diagonal() const {
        if (!square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            if ((*this)(i, i) != 0.0) return false;
        return true;
    }

    bool nonnegative() const {
        for (double v : data_)
            if (!(v >= 0.0)) return false;
        return true;
    }

    bool binary() const {
        for (double v : data_)
            if (v != 0.0 && v != 1.0) return false;
        return true;
    }

    bool finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace ctilm
