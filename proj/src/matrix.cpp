#include "pmnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

namespace pmnet {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()) + ")");
    }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != m.cols_) throw ShapeError("from_rows: ragged rows");
        std::copy(r.begin(), r.end(), m.row(i));
        ++i;
    }
    return m;
}

Matrix Matrix::row_vector(const std::vector<double>& values) {
    Matrix m(1, values.size());
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
}

std::vector<double> Matrix::row_copy(std::size_t i) const {
    return std::vector<double>(row(i), row(i) + cols_);
}

void Matrix::set_row(std::size_t i, const std::vector<double>& values) {
    if (values.size() != cols_) throw ShapeError("set_row: width mismatch");
    std::copy(values.begin(), values.end(), row(i));
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Matrix::fill(double value) {
    std::fill(data_.begin(), data_.end(), value);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ShapeError("matmul_nt: inner dimensions differ");
    }
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            crow[j] = acc;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("matmul_tn: inner dimensions differ");
    }
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row(k);
        const double* brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            t(j, i) = m(i, j);
        }
    }
    return t;
}

void add_inplace(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
}

void sub_inplace(Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "sub");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] -= b.data()[i];
}

void scale_inplace(Matrix& a, double factor) {
    for (double& v : a.data()) v *= factor;
}

void axpy(double factor, const Matrix& b, Matrix& a) {
    require_same_shape(a, b, "axpy");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += factor * b.data()[i];
}

void add_row_broadcast(Matrix& m, const Matrix& row) {
    if (row.rows() != 1 || row.cols() != m.cols()) {
        throw ShapeError("add_row_broadcast: expected 1x" + std::to_string(m.cols()));
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* mrow = m.row(i);
        const double* r = row.row(0);
        for (std::size_t j = 0; j < m.cols(); ++j) mrow[j] += r[j];
    }
}

Matrix col_sums(const Matrix& m) {
    Matrix s(1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* mrow = m.row(i);
        double* srow = s.row(0);
        for (std::size_t j = 0; j < m.cols(); ++j) srow[j] += mrow[j];
    }
    return s;
}

std::vector<double> softmax_row(const std::vector<double>& logits) {
    if (logits.empty()) throw ArgumentError("softmax_row: empty input");
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

void softmax_rows_inplace(Matrix& m) {
    if (m.cols() == 0) throw ArgumentError("softmax_rows: empty rows");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row(i);
        const double peak = *std::max_element(row, row + m.cols());
        double total = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row[j] = std::exp(row[j] - peak);
            total += row[j];
        }
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] /= total;
    }
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> sigmoid(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = sigmoid(values[i]);
    return out;
}

void sigmoid_inplace(Matrix& m) {
    for (double& v : m.data()) v = sigmoid(v);
}

void relu_inplace(Matrix& m) {
    for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(Matrix& grad, const Matrix& pre_activation) {
    require_same_shape(grad, pre_activation, "relu_backward");
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (pre_activation.data()[i] <= 0.0) grad.data()[i] = 0.0;
    }
}

std::uint64_t matrix_hash(const Matrix& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (word >> (8 * byte)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    mix(m.rows());
    mix(m.cols());
    for (double v : m.data()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    }
    return h;
}

void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : m.data()) v = rng.uniform(-limit, limit);
}

}  // namespace pmnet
