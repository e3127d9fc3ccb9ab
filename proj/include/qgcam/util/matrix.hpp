#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qgcam {

using cdouble = std::complex<double>;

// Dense row-major complex matrix. Sized for circuit-scale work (dim <= 256);
// nothing here is tuned beyond that.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          v_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

    static CMatrix identity(int dim) {
        CMatrix m(dim, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cdouble& operator()(int r, int c) {
        return v_[static_cast<std::size_t>(r) * cols_ + c];
    }
    const cdouble& operator()(int r, int c) const {
        return v_[static_cast<std::size_t>(r) * cols_ + c];
    }

    CMatrix operator*(const CMatrix& rhs) const {
        if (cols_ != rhs.rows_)
            throw std::invalid_argument("CMatrix multiply: shape mismatch");
        CMatrix out(rows_, rhs.cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int k = 0; k < cols_; ++k) {
                const cdouble a = (*this)(i, k);
                if (a == cdouble{}) continue;
                for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        }
        return out;
    }

    CMatrix operator+(const CMatrix& rhs) const {
        check_same_shape(rhs);
        CMatrix out = *this;
        for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] += rhs.v_[i];
        return out;
    }

    CMatrix operator-(const CMatrix& rhs) const {
        check_same_shape(rhs);
        CMatrix out = *this;
        for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] -= rhs.v_[i];
        return out;
    }

    CMatrix operator*(cdouble s) const {
        CMatrix out = *this;
        for (auto& x : out.v_) x *= s;
        return out;
    }

    CMatrix adjoint() const {
        CMatrix out(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    cdouble trace() const {
        cdouble t{};
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    const std::vector<cdouble>& data() const { return v_; }
    std::vector<cdouble>& data() { return v_; }

private:
    void check_same_shape(const CMatrix& rhs) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("CMatrix: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cdouble> v_;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cdouble s = a(i, j);
            if (s == cdouble{}) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
        }
    return out;
}

// tr(a * b) without forming the product.
inline cdouble trace_product(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw std::invalid_argument("trace_product: shape mismatch");
    cdouble t{};
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
    return t;
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j <= i; ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

inline bool is_unitary(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs_diff(m.adjoint() * m, CMatrix::identity(m.rows())) <= tol;
}

// Dense row-major real matrix, used for gradients and linear layers.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          v_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) {
        return v_[static_cast<std::size_t>(r) * cols_ + c];
    }
    const double& operator()(int r, int c) const {
        return v_[static_cast<std::size_t>(r) * cols_ + c];
    }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

}  // namespace qgcam
