#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qgcam/quantum/density.hpp"
#include "qgcam/quantum/observable.hpp"
#include "qgcam/quantum/pauli.hpp"
#include "qgcam/quantum/state.hpp"
#include "qgcam/util/matrix.hpp"
#include "qgcam/vqc/circuit.hpp"

namespace qgcam::vqc {

using quantum::DensityMatrix;
using quantum::PauliExpansion;

namespace detail {

inline double arctan_jacobian(double raw) { return 1.0 / (1.0 + raw * raw); }

// d<Q_i>/d(angle_q) by evaluating the circuit at angle_q +- shift. Exposed
// with an explicit shift so negative-control checks can corrupt it; the
// production entry point below always passes pi/2.
inline RealMatrix grad_input_shift_impl(const std::vector<double>& x,
                                        const VqcParams& params,
                                        const CircuitSpec& circuit, double shift) {
    circuit.validate();
    const int n = circuit.qubits();
    const int m = circuit.outputs();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("grad_input_shift: input length != qubit count");
    const std::vector<double> angles = scaled_angles(x, circuit.encoding);
    RealMatrix grad(m, n);
    for (int q = 1; q <= n; ++q) {
        if (circuit.encoding.axes[q - 1] == quantum::Pauli::I) continue;  // input never enters
        std::vector<double> shifted = angles;
        shifted[q - 1] = angles[q - 1] + shift;
        const std::vector<double> plus = run_angles(shifted, params, circuit);
        shifted[q - 1] = angles[q - 1] - shift;
        const std::vector<double> minus = run_angles(shifted, params, circuit);
        const double chain = circuit.encoding.arctan_scaling
                                 ? arctan_jacobian(x[q - 1])
                                 : 1.0;
        for (int i = 0; i < m; ++i)
            grad(i, q - 1) = 0.5 * (plus[i] - minus[i]) * chain;
    }
    return grad;
}

// U(theta) as a dense matrix, built column by column through the statevector
// kernel.
inline CMatrix ansatz_matrix(const AnsatzSpec& spec, const VqcParams& params) {
    const int dim = 1 << spec.n;
    CMatrix u(dim, dim);
    for (int col = 0; col < dim; ++col) {
        StateVector psi = StateVector::basis(spec.n, static_cast<std::size_t>(col));
        apply_ansatz(psi, spec, params);
        for (int row = 0; row < dim; ++row) u(row, col) = psi[row];
    }
    return u;
}

}  // namespace detail

// Gradient of every <Q_i> with respect to every input coordinate via the
// exact +-pi/2 shift rule: entry (i,q) = [<Q_i>(x + (pi/2)e_q) -
// <Q_i>(x - (pi/2)e_q)] / 2. Columns for identity-axis coordinates are zero.
// With arctan scaling on, entries are gradients w.r.t. the raw features.
inline RealMatrix grad_input_shift(const std::vector<double>& x,
                                   const VqcParams& params,
                                   const CircuitSpec& circuit) {
    return detail::grad_input_shift_impl(x, params, circuit, std::numbers::pi / 2.0);
}

// d<Q_i>/d(theta) via the same rule applied to each ansatz rotation angle.
inline RealMatrix grad_params_shift(const std::vector<double>& x,
                                    const VqcParams& params,
                                    const CircuitSpec& circuit) {
    circuit.validate();
    const int m = circuit.outputs();
    const int count = static_cast<int>(params.theta.size());
    const std::vector<double> angles = scaled_angles(x, circuit.encoding);
    const double shift = std::numbers::pi / 2.0;
    RealMatrix grad(m, count);
    for (int j = 0; j < count; ++j) {
        VqcParams shifted = params;
        shifted.theta[j] = params.theta[j] + shift;
        const std::vector<double> plus = detail::run_angles(angles, shifted, circuit);
        shifted.theta[j] = params.theta[j] - shift;
        const std::vector<double> minus = detail::run_angles(angles, shifted, circuit);
        for (int i = 0; i < m; ++i) grad(i, j) = 0.5 * (plus[i] - minus[i]);
    }
    return grad;
}

// Max entrywise deviation between the two sides of
//   [sigma_k, V_k(x) sigma_i V_k^dag(x)]
//     = i (V_k(x+pi/2) sigma_i V_k^dag(x+pi/2) - V_k(x-pi/2) sigma_i V_k^dag(x-pi/2))
// where V_k(x) = rotation_k(x) * pre_gate.
inline double lie_bracket_check(quantum::Pauli k, quantum::Pauli i, double angle,
                                PreGate pre_gate) {
    if (k == quantum::Pauli::I)
        throw std::invalid_argument("lie_bracket_check: k must be a rotation axis");
    const CMatrix pre = pre_gate_matrix(pre_gate);
    const CMatrix sigma_k = quantum::pauli_matrix(k);
    const CMatrix sigma_i = quantum::pauli_matrix(i);
    const double half_pi = std::numbers::pi / 2.0;

    const auto conjugated = [&](double a) {
        const CMatrix v = quantum::rotation_gate(k, a) * pre;
        return v * sigma_i * v.adjoint();
    };
    const CMatrix mid = conjugated(angle);
    const CMatrix lhs = sigma_k * mid - mid * sigma_k;
    const CMatrix rhs =
        (conjugated(angle + half_pi) - conjugated(angle - half_pi)) * cdouble{0.0, 1.0};
    return max_abs_diff(lhs, rhs);
}

// Closed-form input gradient from the Pauli expansion of rho_0:
//
//   d<Q>/dx_q = -i/2 sum_{i1..in} C_{i1..in}
//       tr{ U^dag Q U  (V_1 s_{i1} V_1^dag) (x) ... (x)
//           [sigma_{k_q}, V_q s_{iq} V_q^dag] (x) ... (x) (V_n s_{in} V_n^dag) }
//
// with the bracket evaluated through the +-pi/2 shift identity. Cost grows
// with 2^n per term and the number of nonzero terms, so the path is gated to
// n <= 8; the shift rule above is the cheap production path and this one
// exists to cross-validate it.
inline RealMatrix grad_input_analytic(const std::vector<double>& x,
                                      const VqcParams& params,
                                      const CircuitSpec& circuit) {
    circuit.validate();
    const int n = circuit.qubits();
    const int m = circuit.outputs();
    if (n > 8)
        throw std::invalid_argument("grad_input_analytic: gated to n <= 8");
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("grad_input_analytic: input length != qubit count");

    const std::vector<double> angles = scaled_angles(x, circuit.encoding);
    const double half_pi = std::numbers::pi / 2.0;
    const int dim = 1 << n;

    // rho_0 = |0...0><0...0| expanded over the Pauli tensor basis.
    const PauliExpansion rho_terms =
        quantum::pauli_expand(quantum::density_from_state(StateVector(n)));

    // Conjugation tables: conj[q][i] = V_q s_i V_q^dag at the evaluation
    // angle, bracket[q][i] the shift-identity bracket at qubit q.
    std::vector<std::array<CMatrix, 4>> conj(n), bracket(n);
    for (int q = 1; q <= n; ++q) {
        const CMatrix v = encoding_factor(circuit.encoding, q, angles[q - 1]);
        const bool rotates = circuit.encoding.axes[q - 1] != quantum::Pauli::I;
        const CMatrix vp = rotates
                               ? encoding_factor(circuit.encoding, q, angles[q - 1] + half_pi)
                               : v;
        const CMatrix vm = rotates
                               ? encoding_factor(circuit.encoding, q, angles[q - 1] - half_pi)
                               : v;
        for (int i = 0; i < 4; ++i) {
            const CMatrix& sigma = quantum::pauli_matrix(static_cast<quantum::Pauli>(i));
            conj[q - 1][i] = v * sigma * v.adjoint();
            bracket[q - 1][i] =
                (vp * sigma * vp.adjoint() - vm * sigma * vm.adjoint()) * cdouble{0.0, 1.0};
        }
    }

    const CMatrix u = detail::ansatz_matrix(circuit.ansatz, params);
    const CMatrix u_dag = u.adjoint();
    std::vector<CMatrix> conjugated_obs;
    conjugated_obs.reserve(m);
    for (const auto& obs : circuit.observables.observables)
        conjugated_obs.push_back(u_dag * obs.matrix() * u);

    RealMatrix grad(m, n);
    for (int q = 1; q <= n; ++q) {
        if (circuit.encoding.axes[q - 1] == quantum::Pauli::I) continue;
        // S_q = sum over terms of C * (tensor product with the bracket at q).
        CMatrix s_q(dim, dim);
        for (const auto& term : rho_terms.terms) {
            CMatrix t = CMatrix::identity(1);
            for (int r = 1; r <= n; ++r) {
                const int axis = static_cast<int>(term.string[r - 1]);
                t = kron(t, r == q ? bracket[r - 1][axis] : conj[r - 1][axis]);
            }
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) s_q(a, b) += term.coeff * t(a, b);
        }
        const double chain = circuit.encoding.arctan_scaling
                                 ? detail::arctan_jacobian(x[q - 1])
                                 : 1.0;
        for (int i = 0; i < m; ++i) {
            const cdouble val =
                trace_product(conjugated_obs[i], s_q) * cdouble{0.0, -0.5};
            if (std::abs(val.imag()) >= 1e-10)
                throw std::runtime_error("grad_input_analytic: non-real gradient");
            grad(i, q - 1) = val.real() * chain;
        }
    }
    return grad;
}

}  // namespace qgcam::vqc
