#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgcam/quantum/observable.hpp"
#include "qgcam/quantum/pauli.hpp"
#include "qgcam/quantum/state.hpp"
#include "qgcam/util/matrix.hpp"

namespace qgcam::quantum {

// 2^n x 2^n Hermitian trace-one operator, same qubit ordering as StateVector.
struct DensityMatrix {
    int n = 0;
    CMatrix m;
};

// rho = |psi><psi| (rank one, trace one).
inline DensityMatrix density_from_state(const StateVector& psi) {
    const int dim = static_cast<int>(psi.dim());
    DensityMatrix rho{psi.qubits(), CMatrix(dim, dim)};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            rho.m(i, j) = psi[i] * std::conj(psi[j]);
    return rho;
}

struct PauliTerm {
    PauliString string;
    cdouble coeff;
};

// Expansion rho = sum C_{i1..in} sigma_{i1} (x) ... (x) sigma_{in} with
// C = 2^{-n} tr(rho sigma_{i1} (x) ... (x) sigma_{in}).
struct PauliExpansion {
    int n = 0;
    std::vector<PauliTerm> terms;
};

namespace detail {

// Entry sigma_string(row, col) and the column index with a nonzero entry for
// a given row: col = row XOR flip(X/Y bits).
inline std::size_t pauli_string_flip_mask(const PauliString& s, int n) {
    std::size_t flip = 0;
    for (int q = 1; q <= n; ++q) {
        const Pauli p = s[q - 1];
        if (p == Pauli::X || p == Pauli::Y)
            flip |= std::size_t{1} << (n - q);
    }
    return flip;
}

inline cdouble pauli_string_entry(const PauliString& s, int n, std::size_t row,
                                  std::size_t col) {
    cdouble v{1.0, 0.0};
    for (int q = 1; q <= n; ++q) {
        const std::size_t mask = std::size_t{1} << (n - q);
        const int r = (row & mask) ? 1 : 0;
        const int c = (col & mask) ? 1 : 0;
        const CMatrix& sigma = pauli_matrix(s[q - 1]);
        const cdouble e = sigma(r, c);
        if (e == cdouble{}) return {};
        v *= e;
    }
    return v;
}

// Reduced single-qubit factor of rho obtained by tracing out all other qubits.
inline CMatrix single_qubit_factor(const DensityMatrix& rho, int q) {
    const int n = rho.n;
    const int p = n - q;
    const std::size_t low_mask = (std::size_t{1} << p) - 1;
    CMatrix f(2, 2);
    const std::size_t rest_count = std::size_t{1} << (n - 1);
    for (int rb = 0; rb < 2; ++rb)
        for (int cb = 0; cb < 2; ++cb) {
            cdouble sum{};
            for (std::size_t rest = 0; rest < rest_count; ++rest) {
                const std::size_t high = rest >> p;
                const std::size_t low = rest & low_mask;
                const std::size_t row =
                    (high << (p + 1)) | (static_cast<std::size_t>(rb) << p) | low;
                const std::size_t col =
                    (high << (p + 1)) | (static_cast<std::size_t>(cb) << p) | low;
                sum += rho.m(static_cast<int>(row), static_cast<int>(col));
            }
            f(rb, cb) = sum;
        }
    return f;
}

}  // namespace detail

// When rho factors into single-qubit states the coefficients are products of
// per-qubit traces of 2x2 blocks and exact zeros drop out; otherwise every
// one of the 4^n strings is evaluated with the general trace formula.
inline PauliExpansion pauli_expand(const DensityMatrix& rho) {
    const int n = rho.n;
    const int dim = 1 << n;
    if (rho.m.rows() != dim || rho.m.cols() != dim)
        throw std::invalid_argument("pauli_expand: matrix size != 2^n x 2^n");

    PauliExpansion ex;
    ex.n = n;

    // rho (x)-factorization attempt: reduced factors, then an entrywise check
    // that their tensor product reproduces rho.
    std::vector<CMatrix> factors;
    factors.reserve(n);
    for (int q = 1; q <= n; ++q)
        factors.push_back(detail::single_qubit_factor(rho, q));
    CMatrix product = CMatrix::identity(1);
    for (const auto& f : factors) product = kron(product, f);
    const bool is_product = max_abs_diff(product, rho.m) <= 1e-13;

    if (is_product) {
        // Per-qubit coefficients c_i = tr(f sigma_i)/2.
        std::vector<std::array<cdouble, 4>> c(n);
        for (int q = 0; q < n; ++q) {
            const CMatrix& f = factors[q];
            c[q][0] = (f(0, 0) + f(1, 1)) * 0.5;
            c[q][1] = (f(0, 1) + f(1, 0)) * 0.5;
            c[q][2] = (f(0, 1) - f(1, 0)) * cdouble{0.0, 1.0} * 0.5;
            c[q][3] = (f(0, 0) - f(1, 1)) * 0.5;
        }
        PauliString s(n, Pauli::I);
        const std::size_t total = std::size_t{1} << (2 * n);
        for (std::size_t code = 0; code < total; ++code) {
            cdouble coeff{1.0, 0.0};
            std::size_t rem = code;
            for (int q = n - 1; q >= 0; --q) {
                const int axis = static_cast<int>(rem & 3);
                rem >>= 2;
                s[q] = static_cast<Pauli>(axis);
                coeff *= c[q][axis];
                if (coeff == cdouble{}) break;
            }
            if (coeff == cdouble{}) continue;
            ex.terms.push_back({s, coeff});
        }
        return ex;
    }

    const double scale = 1.0 / static_cast<double>(dim);
    PauliString s(n, Pauli::I);
    const std::size_t total = std::size_t{1} << (2 * n);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rem = code;
        for (int q = n - 1; q >= 0; --q) {
            s[q] = static_cast<Pauli>(rem & 3);
            rem >>= 2;
        }
        const std::size_t flip = detail::pauli_string_flip_mask(s, n);
        cdouble tr{};
        for (std::size_t b = 0; b < static_cast<std::size_t>(dim); ++b) {
            const std::size_t a = b ^ flip;
            tr += rho.m(static_cast<int>(b), static_cast<int>(a)) *
                  detail::pauli_string_entry(s, n, a, b);
        }
        ex.terms.push_back({s, tr * scale});
    }
    return ex;
}

// sum C sigma_{i1} (x) ... (x) sigma_{in}; inverse of pauli_expand.
inline CMatrix pauli_reconstruct(const PauliExpansion& ex) {
    const int dim = 1 << ex.n;
    CMatrix out(dim, dim);
    for (const auto& term : ex.terms) {
        const std::size_t flip = detail::pauli_string_flip_mask(term.string, ex.n);
        for (std::size_t b = 0; b < static_cast<std::size_t>(dim); ++b) {
            const std::size_t a = b ^ flip;
            out(static_cast<int>(a), static_cast<int>(b)) +=
                term.coeff * detail::pauli_string_entry(term.string, ex.n, a, b);
        }
    }
    return out;
}

// tr(Q U rho U^dagger). Matches the statevector expectation for pure rho.
inline double expectation_density(const DensityMatrix& rho, const CMatrix& u,
                                  const Observable& obs) {
    const int dim = 1 << rho.n;
    if (u.rows() != dim || u.cols() != dim || static_cast<int>(obs.dim()) != dim)
        throw std::invalid_argument("expectation_density: dimension mismatch");
    const CMatrix evolved = u * rho.m * u.adjoint();
    const cdouble t = trace_product(obs.matrix(), evolved);
    if (std::abs(t.imag()) >= 1e-10)
        throw std::runtime_error("expectation_density: non-real trace");
    return t.real();
}

}  // namespace qgcam::quantum
