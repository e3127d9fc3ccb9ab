#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgcam/quantum/pauli.hpp"
#include "qgcam/util/matrix.hpp"

namespace qgcam::quantum {

// Pure state of n qubits as 2^n complex amplitudes.
//
// Qubits are numbered 1..n, big-endian: qubit 1 is the most significant bit
// of the basis index, so the basis reads |00...0>, |00...1>, ..., |11...1>.
class StateVector {
public:
    // |00...0>
    explicit StateVector(int n) : n_(check_qubits(n)), amp_(std::size_t{1} << n) {
        amp_[0] = 1.0;
    }

    static StateVector basis(int n, std::size_t index) {
        StateVector s(n);
        if (index >= s.dim()) throw std::out_of_range("basis index out of range");
        s.amp_[0] = 0.0;
        s.amp_[index] = 1.0;
        return s;
    }

    int qubits() const { return n_; }
    std::size_t dim() const { return amp_.size(); }

    cdouble& operator[](std::size_t i) { return amp_[i]; }
    const cdouble& operator[](std::size_t i) const { return amp_[i]; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        return s;
    }

    // Bit mask selecting qubit q in a basis index.
    std::size_t qubit_mask(int q) const {
        if (q < 1 || q > n_) throw std::out_of_range("qubit index out of range");
        return std::size_t{1} << (n_ - q);
    }

    const std::vector<cdouble>& amplitudes() const { return amp_; }
    std::vector<cdouble>& amplitudes() { return amp_; }

private:
    static int check_qubits(int n) {
        if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
        return n;
    }

    int n_;
    std::vector<cdouble> amp_;
};

// In-place single-qubit gate at qubit q, i.e. I (x) ... (x) gate (x) ... (x) I
// applied over amplitude pairs that differ only in qubit q's bit.
inline void apply_single_qubit_gate(StateVector& psi, const CMatrix& gate, int q) {
    if (gate.rows() != 2 || gate.cols() != 2)
        throw std::invalid_argument("apply_single_qubit_gate: gate must be 2x2");
    const std::size_t mask = psi.qubit_mask(q);
    const cdouble g00 = gate(0, 0), g01 = gate(0, 1);
    const cdouble g10 = gate(1, 0), g11 = gate(1, 1);
    const std::size_t dim = psi.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const std::size_t j = i | mask;
        const cdouble a0 = psi[i];
        const cdouble a1 = psi[j];
        psi[i] = g00 * a0 + g01 * a1;
        psi[j] = g10 * a0 + g11 * a1;
    }
}

// Flips the target bit on every basis state whose control bit is 1.
inline void apply_cnot(StateVector& psi, int control, int target) {
    if (control == target)
        throw std::invalid_argument("apply_cnot: control and target must differ");
    const std::size_t cmask = psi.qubit_mask(control);
    const std::size_t tmask = psi.qubit_mask(target);
    const std::size_t dim = psi.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) std::swap(psi[i], psi[i | tmask]);
    }
}

// phi = (sigma_{i1} (x) ... (x) sigma_{in}) psi. Each tensor factor permutes
// or phases basis states, so the action costs O(2^n).
inline StateVector apply_pauli_string(const StateVector& psi, const PauliString& s) {
    if (static_cast<int>(s.size()) != psi.qubits())
        throw std::invalid_argument("apply_pauli_string: string length != qubit count");
    const int n = psi.qubits();
    std::size_t flip = 0;
    for (int q = 1; q <= n; ++q) {
        const Pauli p = s[q - 1];
        if (p == Pauli::X || p == Pauli::Y) flip |= psi.qubit_mask(q);
    }
    StateVector out = psi;
    const std::size_t dim = psi.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        cdouble phase{1.0, 0.0};
        for (int q = 1; q <= n; ++q) {
            const Pauli p = s[q - 1];
            const bool bit = (i & psi.qubit_mask(q)) != 0;
            if (p == Pauli::Y) phase *= bit ? cdouble{0, -1} : cdouble{0, 1};
            else if (p == Pauli::Z && bit) phase = -phase;
        }
        out[i ^ flip] = phase * psi[i];
    }
    return out;
}

}  // namespace qgcam::quantum
