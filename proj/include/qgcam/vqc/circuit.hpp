#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qgcam/quantum/observable.hpp"
#include "qgcam/quantum/pauli.hpp"
#include "qgcam/quantum/state.hpp"

namespace qgcam::vqc {

using quantum::Observable;
using quantum::Pauli;
using quantum::StateVector;

enum class PreGate { Identity, Hadamard };

// Data-dependent part of the circuit: per qubit, a fixed pre-gate followed by
// a rotation about a chosen axis by the input angle. An identity axis means
// the input on that qubit never enters the circuit. With arctan_scaling on,
// raw features are squashed through arctan before use as angles.
struct EncodingSpec {
    int n = 0;
    std::vector<Pauli> axes;
    std::vector<PreGate> pre;
    bool arctan_scaling = false;

    void validate() const {
        if (n < 1) throw std::invalid_argument("EncodingSpec: n must be >= 1");
        if (static_cast<int>(axes.size()) != n || static_cast<int>(pre.size()) != n)
            throw std::invalid_argument("EncodingSpec: axis/pre-gate lists must have length n");
    }
};

inline EncodingSpec default_encoding(int n, bool arctan_scaling = false) {
    EncodingSpec e;
    e.n = n;
    e.axes.assign(n, Pauli::Y);
    e.pre.assign(n, PreGate::Hadamard);
    e.arctan_scaling = arctan_scaling;
    return e;
}

// Trainable part: L blocks, each a non-parameterized entangler followed by a
// per-qubit rotation about a fixed axis by the block's parameter.
struct AnsatzSpec {
    int n = 0;
    int blocks = 0;
    std::vector<std::vector<Pauli>> axes;                    // [block][qubit]
    std::vector<std::vector<std::pair<int, int>>> entanglers;  // [block] -> CNOT (control, target) list

    void validate() const {
        if (n < 1) throw std::invalid_argument("AnsatzSpec: n must be >= 1");
        if (blocks < 0) throw std::invalid_argument("AnsatzSpec: blocks must be >= 0");
        if (static_cast<int>(axes.size()) != blocks ||
            static_cast<int>(entanglers.size()) != blocks)
            throw std::invalid_argument("AnsatzSpec: per-block lists must have length L");
        for (const auto& block : axes)
            if (static_cast<int>(block.size()) != n)
                throw std::invalid_argument("AnsatzSpec: rotation axis list must have length n");
        for (const auto& block : entanglers)
            for (const auto& [c, t] : block)
                if (c < 1 || c > n || t < 1 || t > n || c == t)
                    throw std::invalid_argument("AnsatzSpec: invalid CNOT pair");
    }
};

// Ring entangler 1->2, 2->3, ..., n->1 with Y rotations on every qubit.
inline AnsatzSpec ring_ansatz(int n, int blocks) {
    AnsatzSpec a;
    a.n = n;
    a.blocks = blocks;
    std::vector<std::pair<int, int>> ring;
    if (n > 1)
        for (int q = 1; q <= n; ++q) ring.emplace_back(q, q % n + 1);
    a.axes.assign(blocks, std::vector<Pauli>(n, Pauli::Y));
    a.entanglers.assign(blocks, ring);
    return a;
}

// theta indexed (block, qubit), both 1-based, flattened block-major.
struct VqcParams {
    std::vector<double> theta;

    static VqcParams zeros(const AnsatzSpec& spec) {
        VqcParams p;
        p.theta.assign(static_cast<std::size_t>(spec.n) * spec.blocks, 0.0);
        return p;
    }

    double& at(const AnsatzSpec& spec, int block, int qubit) {
        return theta[static_cast<std::size_t>(block - 1) * spec.n + (qubit - 1)];
    }
    double at(const AnsatzSpec& spec, int block, int qubit) const {
        return theta[static_cast<std::size_t>(block - 1) * spec.n + (qubit - 1)];
    }
};

struct ObservableSet {
    std::vector<Observable> observables;

    int size() const { return static_cast<int>(observables.size()); }
};

// Z on qubits 1..m.
inline ObservableSet pauli_z_set(int n, int m) {
    if (m > n)
        throw std::invalid_argument("pauli_z_set: more observables than qubits");
    ObservableSet s;
    for (int q = 1; q <= m; ++q) s.observables.push_back(Observable::pauli_z(n, q));
    return s;
}

struct CircuitSpec {
    EncodingSpec encoding;
    AnsatzSpec ansatz;
    ObservableSet observables;

    int qubits() const { return encoding.n; }
    int outputs() const { return observables.size(); }

    void validate() const {
        encoding.validate();
        ansatz.validate();
        if (ansatz.n != encoding.n)
            throw std::invalid_argument("CircuitSpec: encoding/ansatz qubit counts differ");
        for (const auto& o : observables.observables)
            if (static_cast<int>(o.dim()) != (1 << encoding.n))
                throw std::invalid_argument("CircuitSpec: observable dimension mismatch");
    }
};

inline CircuitSpec default_circuit(int n, int blocks, int outputs,
                                   bool arctan_scaling = false) {
    CircuitSpec c;
    c.encoding = default_encoding(n, arctan_scaling);
    c.ansatz = ring_ansatz(n, blocks);
    c.observables = pauli_z_set(n, outputs);
    return c;
}

inline double scale_feature(double x, bool arctan_scaling) {
    return arctan_scaling ? std::atan(x) : x;
}

inline std::vector<double> scaled_angles(const std::vector<double>& x,
                                         const EncodingSpec& spec) {
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        a[i] = scale_feature(x[i], spec.arctan_scaling);
    return a;
}

inline CMatrix pre_gate_matrix(PreGate g) {
    return g == PreGate::Hadamard ? quantum::hadamard_gate() : CMatrix::identity(2);
}

// The per-qubit encoding factor: rotation(angle) * pre-gate.
inline CMatrix encoding_factor(const EncodingSpec& spec, int qubit, double angle) {
    const CMatrix pre = pre_gate_matrix(spec.pre[qubit - 1]);
    const Pauli axis = spec.axes[qubit - 1];
    if (axis == Pauli::I) return pre;
    return quantum::rotation_gate(axis, angle) * pre;
}

namespace detail {

// Encoding applied to |0...0> with angles already scaled.
inline StateVector encode_angles(const std::vector<double>& angles,
                                 const EncodingSpec& spec) {
    spec.validate();
    if (static_cast<int>(angles.size()) != spec.n)
        throw std::invalid_argument("encode: input length != qubit count");
    StateVector psi(spec.n);
    for (int q = 1; q <= spec.n; ++q) {
        if (spec.pre[q - 1] == PreGate::Hadamard)
            apply_single_qubit_gate(psi, quantum::hadamard_gate(), q);
        const Pauli axis = spec.axes[q - 1];
        if (axis != Pauli::I)
            apply_single_qubit_gate(psi, quantum::rotation_gate(axis, angles[q - 1]), q);
    }
    return psi;
}

}  // namespace detail

// V(x)|0...0>.
inline StateVector encode(const std::vector<double>& x, const EncodingSpec& spec) {
    return detail::encode_angles(scaled_angles(x, spec), spec);
}

// U(theta): per block, entangler CNOTs in listed order, then the per-qubit
// rotations. Blocks apply in ascending order.
inline void apply_ansatz(StateVector& psi, const AnsatzSpec& spec,
                         const VqcParams& params) {
    spec.validate();
    if (params.theta.size() != static_cast<std::size_t>(spec.n) * spec.blocks)
        throw std::invalid_argument("apply_ansatz: parameter count mismatch");
    for (int block = 1; block <= spec.blocks; ++block) {
        for (const auto& [c, t] : spec.entanglers[block - 1]) apply_cnot(psi, c, t);
        for (int q = 1; q <= spec.n; ++q) {
            const Pauli axis = spec.axes[block - 1][q - 1];
            if (axis == Pauli::I) continue;
            apply_single_qubit_gate(
                psi, quantum::rotation_gate(axis, params.at(spec, block, q)), q);
        }
    }
}

namespace detail {

inline std::vector<double> run_angles(const std::vector<double>& angles,
                                      const VqcParams& params,
                                      const CircuitSpec& circuit) {
    StateVector psi = encode_angles(angles, circuit.encoding);
    apply_ansatz(psi, circuit.ansatz, params);
    std::vector<double> out(circuit.outputs());
    for (int i = 0; i < circuit.outputs(); ++i)
        out[i] = quantum::expectation(psi, circuit.observables.observables[i]);
    return out;
}

}  // namespace detail

// f_VQC(x): encode, deform, measure. Component i is <Q_i>.
inline std::vector<double> run(const std::vector<double>& x, const VqcParams& params,
                               const CircuitSpec& circuit) {
    return detail::run_angles(scaled_angles(x, circuit.encoding), params, circuit);
}

// ---- JSON form used by the checkpoint container ----

inline nlohmann::json circuit_to_json(const CircuitSpec& c) {
    nlohmann::json j;
    j["qubits"] = c.encoding.n;
    j["blocks"] = c.ansatz.blocks;
    std::string enc_axes, pre;
    for (Pauli p : c.encoding.axes) enc_axes += quantum::pauli_letter(p);
    for (PreGate g : c.encoding.pre) pre += g == PreGate::Hadamard ? 'H' : 'I';
    j["encoding"] = {{"axes", enc_axes}, {"pre", pre}, {"arctan", c.encoding.arctan_scaling}};
    std::vector<std::string> block_axes;
    for (const auto& block : c.ansatz.axes) {
        std::string s;
        for (Pauli p : block) s += quantum::pauli_letter(p);
        block_axes.push_back(s);
    }
    j["ansatz"] = {{"axes", block_axes}, {"entanglers", c.ansatz.entanglers}};
    std::vector<nlohmann::json> obs;
    for (const auto& o : c.observables.observables) {
        if (!o.is_pauli())
            throw std::invalid_argument("circuit_to_json: dense observables are not serializable");
        std::string s;
        for (Pauli p : o.string()) s += quantum::pauli_letter(p);
        obs.push_back({{"pauli", s}});
    }
    j["observables"] = obs;
    return j;
}

inline CircuitSpec circuit_from_json(const nlohmann::json& j) {
    CircuitSpec c;
    c.encoding.n = j.at("qubits").get<int>();
    c.ansatz.n = c.encoding.n;
    c.ansatz.blocks = j.at("blocks").get<int>();
    const auto& enc = j.at("encoding");
    for (char ch : enc.at("axes").get<std::string>())
        c.encoding.axes.push_back(quantum::pauli_from_letter(ch));
    for (char ch : enc.at("pre").get<std::string>())
        c.encoding.pre.push_back(ch == 'H' ? PreGate::Hadamard : PreGate::Identity);
    c.encoding.arctan_scaling = enc.at("arctan").get<bool>();
    const auto& ans = j.at("ansatz");
    for (const auto& s : ans.at("axes").get<std::vector<std::string>>()) {
        std::vector<Pauli> block;
        for (char ch : s) block.push_back(quantum::pauli_from_letter(ch));
        c.ansatz.axes.push_back(std::move(block));
    }
    c.ansatz.entanglers =
        ans.at("entanglers").get<std::vector<std::vector<std::pair<int, int>>>>();
    for (const auto& o : j.at("observables")) {
        quantum::PauliString s;
        for (char ch : o.at("pauli").get<std::string>())
            s.push_back(quantum::pauli_from_letter(ch));
        c.observables.observables.push_back(Observable::pauli(std::move(s)));
    }
    c.validate();
    return c;
}

}  // namespace qgcam::vqc
