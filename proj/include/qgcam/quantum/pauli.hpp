#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgcam/util/matrix.hpp"

namespace qgcam::quantum {

// Pauli axes indexed 0..3 as {I, sigma_x, sigma_y, sigma_z}.
enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

inline const CMatrix& pauli_matrix(Pauli p) {
    static const CMatrix tables[4] = {
        CMatrix::identity(2),
        [] {
            CMatrix m(2, 2);
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            return m;
        }(),
        [] {
            CMatrix m(2, 2);
            m(0, 1) = cdouble{0.0, -1.0};
            m(1, 0) = cdouble{0.0, 1.0};
            return m;
        }(),
        [] {
            CMatrix m(2, 2);
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            return m;
        }(),
    };
    return tables[static_cast<int>(p)];
}

inline char pauli_letter(Pauli p) {
    constexpr char letters[4] = {'I', 'X', 'Y', 'Z'};
    return letters[static_cast<int>(p)];
}

inline Pauli pauli_from_letter(char c) {
    switch (c) {
        case 'I': return Pauli::I;
        case 'X': return Pauli::X;
        case 'Y': return Pauli::Y;
        case 'Z': return Pauli::Z;
        default: throw std::invalid_argument(std::string("unknown Pauli axis: ") + c);
    }
}

// One axis per qubit; index 0 is qubit 1.
using PauliString = std::vector<Pauli>;

// exp(-i*angle*sigma/2) = cos(angle/2) I - i sin(angle/2) sigma.
// Rotation about the identity has no generator and is rejected.
inline CMatrix rotation_gate(Pauli axis, double angle) {
    if (axis == Pauli::I)
        throw std::invalid_argument("rotation_gate: axis must be X, Y or Z");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const CMatrix& sigma = pauli_matrix(axis);
    CMatrix g = CMatrix::identity(2) * cdouble{c, 0.0};
    return g - sigma * cdouble{0.0, s};
}

inline CMatrix hadamard_gate() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix h(2, 2);
    h(0, 0) = s;
    h(0, 1) = s;
    h(1, 0) = s;
    h(1, 1) = -s;
    return h;
}

}  // namespace qgcam::quantum
