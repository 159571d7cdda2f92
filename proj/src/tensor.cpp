#include "heatup/tensor.hpp"

#include <cmath>

#include "heatup/errors.hpp"
#include "heatup/threads.hpp"

namespace heatup {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor2D& a, const Tensor2D& b) {
    throw ArgumentError(std::string(op) + ": shape mismatch " + a.shape_str() +
                        " vs " + b.shape_str());
}

}  // namespace

Tensor2D Tensor2D::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Tensor2D out(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw ArgumentError("from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : row) out(i, j++) = v;
        ++i;
    }
    return out;
}

Tensor2D Tensor2D::identity(std::size_t n) {
    Tensor2D out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

std::string Tensor2D::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Tensor2D::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols() != b.rows()) shape_error("matmul", a, b);
    Tensor2D out(a.rows(), b.cols());
    const std::size_t k_dim = a.cols(), n_cols = b.cols();
    std::size_t flops_per_row = k_dim * n_cols;
    std::size_t min_rows = flops_per_row > 0 ? std::max<std::size_t>(1, 65536 / flops_per_row) : a.rows();
    parallel_for(a.rows(), min_rows, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            const double* ai = a.row(i);
            double* oi = out.row(i);
            for (std::size_t k = 0; k < k_dim; ++k) {
                const double aik = ai[k];
                const double* bk = b.row(k);
                for (std::size_t j = 0; j < n_cols; ++j) oi[j] += aik * bk[j];
            }
        }
    });
    return out;
}

Tensor2D matmul_at_b(const Tensor2D& a, const Tensor2D& b) {
    if (a.rows() != b.rows()) shape_error("matmul_at_b", a, b);
    Tensor2D out(a.cols(), b.cols());
    const std::size_t n = a.rows(), m = b.cols();
    std::size_t flops_per_row = n * m;
    std::size_t min_rows = flops_per_row > 0 ? std::max<std::size_t>(1, 65536 / flops_per_row) : a.cols();
    parallel_for(a.cols(), min_rows, [&](std::size_t k0, std::size_t k1) {
        for (std::size_t k = k0; k < k1; ++k) {
            double* ok = out.row(k);
            for (std::size_t i = 0; i < n; ++i) {
                const double aik = a(i, k);
                const double* bi = b.row(i);
                for (std::size_t j = 0; j < m; ++j) ok[j] += aik * bi[j];
            }
        }
    });
    return out;
}

Tensor2D matmul_a_bt(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols() != b.cols()) shape_error("matmul_a_bt", a, b);
    Tensor2D out(a.rows(), b.rows());
    const std::size_t k_dim = a.cols(), m = b.rows();
    std::size_t flops_per_row = k_dim * m;
    std::size_t min_rows = flops_per_row > 0 ? std::max<std::size_t>(1, 65536 / flops_per_row) : a.rows();
    parallel_for(a.rows(), min_rows, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            const double* ai = a.row(i);
            double* oi = out.row(i);
            for (std::size_t j = 0; j < m; ++j) {
                const double* bj = b.row(j);
                double s = 0.0;
                for (std::size_t k = 0; k < k_dim; ++k) s += ai[k] * bj[k];
                oi[j] = s;
            }
        }
    });
    return out;
}

Tensor2D transpose(const Tensor2D& a) {
    Tensor2D out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

void axpy(double alpha, const Tensor2D& x, Tensor2D& y) {
    if (!x.same_shape(y)) shape_error("axpy", x, y);
    const double* xs = x.data();
    double* ys = y.data();
    for (std::size_t i = 0; i < x.size(); ++i) ys[i] += alpha * xs[i];
}

void scale(Tensor2D& x, double alpha) {
    double* xs = x.data();
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] *= alpha;
}

std::vector<double> col_sums(const Tensor2D& a) {
    std::vector<double> out(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += ai[j];
    }
    return out;
}

void add_row_vector(Tensor2D& a, std::span<const double> v) {
    if (v.size() != a.cols())
        throw ArgumentError("add_row_vector: vector length " + std::to_string(v.size()) +
                            " vs " + a.shape_str());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ai = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) ai[j] += v[j];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

}  // namespace heatup
