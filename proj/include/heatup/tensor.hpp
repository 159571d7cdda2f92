#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace heatup {

// Row-major dense matrix of 64-bit floats. The single numeric carrier for
// features, weights, logits and gradients.
class Tensor2D {
public:
    Tensor2D() = default;
    Tensor2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Tensor2D from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor2D identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    std::span<const double> row_span(std::size_t r) const { return {row(r), cols_}; }
    std::span<double> row_span(std::size_t r) { return {row(r), cols_}; }

    bool same_shape(const Tensor2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    std::string shape_str() const;
    bool all_finite() const;

    void fill(double v) { data_.assign(data_.size(), v); }

    bool operator==(const Tensor2D& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a (n x k) times b (k x m). Every output element accumulates over k in
// ascending order, so results are bit-identical regardless of tiling or
// thread count.
Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);

// a^T * b for a (n x k), b (n x m): result k x m, accumulation over n ascending.
Tensor2D matmul_at_b(const Tensor2D& a, const Tensor2D& b);

// a * b^T for a (n x k), b (m x k): result n x m, accumulation over k ascending.
Tensor2D matmul_a_bt(const Tensor2D& a, const Tensor2D& b);

Tensor2D transpose(const Tensor2D& a);

// y += alpha * x (same shape).
void axpy(double alpha, const Tensor2D& x, Tensor2D& y);
void scale(Tensor2D& x, double alpha);

std::vector<double> col_sums(const Tensor2D& a);
// a[r, :] += v for every row r.
void add_row_vector(Tensor2D& a, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace heatup
