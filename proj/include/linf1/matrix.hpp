#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linf1 {

/// Dense row-major real matrix. When used as the projection input, each row
/// is one group.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("Matrix: data size " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows_) + "x" +
                                        std::to_string(cols_));
        }
    }

    Matrix(std::initializer_list<std::initializer_list<double>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : init) {
            if (r.size() != cols_) {
                throw std::invalid_argument("Matrix: ragged initializer");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept
    {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// The projection operates on matrices whose rows are the groups.
using GroupMatrix = Matrix;

inline double l1_norm(std::span<const double> v) noexcept
{
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double linf_norm(std::span<const double> v) noexcept
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Sum over rows of each row's largest magnitude.
inline double norm_linf1(const Matrix& A) noexcept
{
    double s = 0.0;
    for (std::size_t m = 0; m < A.rows(); ++m) s += linf_norm(A.row(m));
    return s;
}

/// Largest magnitude over all entries.
inline double norm_max(const Matrix& A) noexcept { return linf_norm(A.data()); }

/// Largest row l1 norm.
inline double norm_l1inf(const Matrix& A) noexcept
{
    double s = 0.0;
    for (std::size_t m = 0; m < A.rows(); ++m) s = std::max(s, l1_norm(A.row(m)));
    return s;
}

inline double frobenius_norm(const Matrix& A) noexcept
{
    double s = 0.0;
    for (double x : A.data()) s += x * x;
    return std::sqrt(s);
}

inline double frobenius_distance(const Matrix& A, const Matrix& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    }
    double s = 0.0;
    const auto a = A.data();
    const auto b = B.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> v) noexcept
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void require_finite(const Matrix& A, const char* what)
{
    if (!all_finite(A.data())) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

}  // namespace linf1
