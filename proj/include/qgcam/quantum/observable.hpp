#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qgcam/quantum/pauli.hpp"
#include "qgcam/quantum/state.hpp"
#include "qgcam/util/matrix.hpp"

namespace qgcam::quantum {

// Hermitian measurement operator. Either a full dense matrix or, when the
// operator is a single Pauli tensor string, a structured form with an O(2^n)
// expectation path.
class Observable {
public:
    static Observable dense(CMatrix m) {
        if (m.rows() != m.cols())
            throw std::invalid_argument("Observable: matrix must be square");
        if (!is_hermitian(m, 1e-12))
            throw std::invalid_argument("Observable: matrix must be Hermitian");
        Observable o;
        o.dense_ = std::move(m);
        o.qubits_ = bit_width_of(o.dense_.rows());
        return o;
    }

    static Observable pauli(PauliString s) {
        if (s.empty()) throw std::invalid_argument("Observable: empty Pauli string");
        Observable o;
        o.qubits_ = static_cast<int>(s.size());
        o.string_ = std::move(s);
        o.is_pauli_ = true;
        return o;
    }

    // Z on a single qubit of an n-qubit register.
    static Observable pauli_z(int n, int qubit) {
        if (qubit < 1 || qubit > n)
            throw std::out_of_range("Observable::pauli_z: qubit out of range");
        PauliString s(n, Pauli::I);
        s[qubit - 1] = Pauli::Z;
        return pauli(std::move(s));
    }

    bool is_pauli() const { return is_pauli_; }
    int qubits() const { return qubits_; }
    std::size_t dim() const { return std::size_t{1} << qubits_; }

    const PauliString& string() const {
        if (!is_pauli_) throw std::logic_error("Observable: not in Pauli form");
        return string_;
    }

    // Dense form; materialized per call for Pauli strings.
    CMatrix matrix() const {
        if (!is_pauli_) return dense_;
        CMatrix m = CMatrix::identity(1);
        for (Pauli p : string_) m = kron(m, pauli_matrix(p));
        return m;
    }

private:
    static int bit_width_of(int dim) {
        int n = 0;
        while ((1 << n) < dim) ++n;
        if ((1 << n) != dim)
            throw std::invalid_argument("Observable: dimension must be a power of two");
        return n == 0 ? 1 : n;
    }

    bool is_pauli_ = false;
    PauliString string_;
    CMatrix dense_;
    int qubits_ = 0;
};

// <psi| Q |psi>. The quadratic form of a Hermitian operator is real; the
// imaginary residue is asserted below 1e-10 and discarded.
inline double expectation(const StateVector& psi, const Observable& obs) {
    if (obs.dim() != psi.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    cdouble acc{};
    if (obs.is_pauli()) {
        const StateVector phi = apply_pauli_string(psi, obs.string());
        for (std::size_t i = 0; i < psi.dim(); ++i)
            acc += std::conj(psi[i]) * phi[i];
    } else {
        const CMatrix& q = obs.matrix();
        const int dim = static_cast<int>(psi.dim());
        for (int r = 0; r < dim; ++r) {
            cdouble row{};
            for (int c = 0; c < dim; ++c) row += q(r, c) * psi[c];
            acc += std::conj(psi[r]) * row;
        }
    }
    if (std::abs(acc.imag()) >= 1e-10)
        throw std::runtime_error("expectation: non-real quadratic form");
    return acc.real();
}

}  // namespace qgcam::quantum
