#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "pmnet/error.hpp"
#include "pmnet/rng.hpp"

namespace pmnet {

/// Dense row-major matrix of 64-bit reals. The single numeric substrate for
/// parameters, batches, embeddings and the prototype memory; rows index
/// samples or prototypes.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix row_vector(const std::vector<double>& values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::vector<double> row_copy(std::size_t i) const;
    void set_row(std::size_t i, const std::vector<double>& values);

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const;
    void fill(double value);

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// c = a * b. Throws ShapeError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// c = a * b^T (avoids materializing the transpose).
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// c = a^T * b.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

void add_inplace(Matrix& a, const Matrix& b);
void sub_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double factor);

/// a += factor * b
void axpy(double factor, const Matrix& b, Matrix& a);

/// Adds a 1xC row vector to every row of m.
void add_row_broadcast(Matrix& m, const Matrix& row);

/// 1xC matrix of column sums.
Matrix col_sums(const Matrix& m);

/// Numerically stable softmax of one vector (max-subtraction). Output is
/// positive and sums to 1. Throws ArgumentError on empty input.
std::vector<double> softmax_row(const std::vector<double>& logits);

/// Applies softmax_row to every row in place.
void softmax_rows_inplace(Matrix& m);

double sigmoid(double x);

/// Element-wise logistic sigmoid; every output lies in (0, 1).
std::vector<double> sigmoid(const std::vector<double>& values);

void sigmoid_inplace(Matrix& m);

void relu_inplace(Matrix& m);

/// grad ⊙ 1[pre > 0], the rectifier Jacobian applied to an upstream gradient.
void relu_backward_inplace(Matrix& grad, const Matrix& pre_activation);

/// FNV-1a over the raw bytes; used to assert immutability of frozen tensors.
std::uint64_t matrix_hash(const Matrix& m);

/// Glorot-uniform fill: entries uniform in ±sqrt(6 / (fan_in + fan_out)).
void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace pmnet
