#pragma once

// Independent reference implementations used only by tests. Everything here
// deliberately takes the slow, obvious route (dense Kronecker products,
// naive loops, O(N^2) transforms) so it shares no code path with the library
// implementations it checks.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qgcam/quantum/pauli.hpp"
#include "qgcam/quantum/state.hpp"
#include "qgcam/util/matrix.hpp"
#include "qgcam/util/rng.hpp"

namespace qgcam::oracle {

// Full-register matrix for a single-qubit gate at position q (1-based,
// qubit 1 = most significant bit), built with explicit Kronecker products.
inline CMatrix embed_single_qubit(const CMatrix& gate, int n, int q) {
    CMatrix m = CMatrix::identity(1);
    for (int r = 1; r <= n; ++r)
        m = kron(m, r == q ? gate : CMatrix::identity(2));
    return m;
}

// Dense CNOT matrix from its action on basis states.
inline CMatrix cnot_matrix(int n, int control, int target) {
    const int dim = 1 << n;
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const int cbit = (i >> (n - control)) & 1;
        const int j = cbit ? (i ^ (1 << (n - target))) : i;
        m(j, i) = 1.0;
    }
    return m;
}

inline std::vector<cdouble> matrix_vector(const CMatrix& m,
                                          const std::vector<cdouble>& v) {
    std::vector<cdouble> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        cdouble acc{};
        for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

// Central finite differences of a vector-valued function.
inline std::vector<std::vector<double>> finite_difference(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h) {
    std::vector<std::vector<double>> jac;  // [coord][output]
    for (std::size_t q = 0; q < x.size(); ++q) {
        std::vector<double> xp = x, xm = x;
        xp[q] += h;
        xm[q] -= h;
        const auto fp = f(xp);
        const auto fm = f(xm);
        std::vector<double> col(fp.size());
        for (std::size_t i = 0; i < fp.size(); ++i)
            col[i] = (fp[i] - fm[i]) / (2.0 * h);
        jac.push_back(std::move(col));
    }
    return jac;
}

inline double fd_scalar(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// |a - b| / max(|a| + |b|, 1): relative error for O(1)-and-larger values,
// degrading to absolute error near zero where relative error is undefined
// and finite differences are pure roundoff.
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1.0);
}

inline CMatrix random_unitary(int dim, Rng& rng) {
    // Gram-Schmidt on a random complex matrix.
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = cdouble{rng.gaussian(), rng.gaussian()};
    for (int c = 0; c < dim; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            cdouble proj{};
            for (int r = 0; r < dim; ++r) proj += std::conj(m(r, prev)) * m(r, c);
            for (int r = 0; r < dim; ++r) m(r, c) -= proj * m(r, prev);
        }
        double norm = 0.0;
        for (int r = 0; r < dim; ++r) norm += std::norm(m(r, c));
        norm = std::sqrt(norm);
        for (int r = 0; r < dim; ++r) m(r, c) /= norm;
    }
    return m;
}

inline qgcam::quantum::StateVector random_state(int n, Rng& rng) {
    qgcam::quantum::StateVector psi(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        psi[i] = cdouble{rng.gaussian(), rng.gaussian()};
        norm += std::norm(psi[i]);
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < psi.dim(); ++i) psi[i] /= norm;
    return psi;
}

inline CMatrix random_hermitian_trace_one(int dim, Rng& rng) {
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cdouble{rng.gaussian(), rng.gaussian()};
    CMatrix h = (g + g.adjoint()) * cdouble{0.5, 0.0};
    const cdouble tr = h.trace();
    // Shift the diagonal so the trace lands exactly on 1.
    const cdouble shift = (cdouble{1.0, 0.0} - tr) / static_cast<double>(dim);
    for (int i = 0; i < dim; ++i) h(i, i) += shift;
    return h;
}

}  // namespace qgcam::oracle
