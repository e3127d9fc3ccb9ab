#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qgcam/vqc/circuit.hpp"
#include "qgcam/vqc/gradients.hpp"

using namespace qgcam;
using namespace qgcam::vqc;
using quantum::Pauli;
using std::numbers::pi;

namespace {

// Random circuit with Y-dominant axes and the ring entangler, the family the
// trained models use.
CircuitSpec random_circuit(int n, int blocks, int outputs, Rng& rng,
                           bool arctan_scaling = false) {
    CircuitSpec c = default_circuit(n, blocks, outputs, arctan_scaling);
    for (auto& axis : c.encoding.axes)
        axis = static_cast<Pauli>(rng.uniform_int(1, 3));
    for (auto& block : c.ansatz.axes)
        for (auto& axis : block) axis = static_cast<Pauli>(rng.uniform_int(1, 3));
    return c;
}

std::vector<double> random_vector(int n, Rng& rng, double lo = -pi, double hi = pi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

VqcParams random_params(const AnsatzSpec& spec, Rng& rng) {
    VqcParams p = VqcParams::zeros(spec);
    for (auto& t : p.theta) t = rng.uniform(-pi, pi);
    return p;
}

// Dense matrix of the full ansatz, built from explicit Kronecker factors.
CMatrix dense_ansatz_oracle(const AnsatzSpec& spec, const VqcParams& params) {
    const int dim = 1 << spec.n;
    CMatrix u = CMatrix::identity(dim);
    for (int block = 1; block <= spec.blocks; ++block) {
        for (const auto& [c, t] : spec.entanglers[block - 1])
            u = oracle::cnot_matrix(spec.n, c, t) * u;
        for (int q = 1; q <= spec.n; ++q) {
            const Pauli axis = spec.axes[block - 1][q - 1];
            if (axis == Pauli::I) continue;
            const CMatrix rot = quantum::rotation_gate(axis, params.at(spec, block, q));
            u = oracle::embed_single_qubit(rot, spec.n, q) * u;
        }
    }
    return u;
}

}  // namespace

TEST(Encode, ZeroInputWithHadamardGivesUniformSuperposition) {
    const EncodingSpec spec = default_encoding(3);
    const quantum::StateVector psi = encode({0.0, 0.0, 0.0}, spec);
    const double amp = 1.0 / std::sqrt(8.0);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        EXPECT_NEAR(psi[i].real(), amp, 1e-14);
        EXPECT_NEAR(psi[i].imag(), 0.0, 1e-14);
    }
}

TEST(Encode, SingleQubitHalfPiLandsOnOne) {
    // R_y(pi/2) H |0> = |1>
    const EncodingSpec spec = default_encoding(1);
    const quantum::StateVector psi = encode({pi / 2.0}, spec);
    EXPECT_NEAR(std::abs(psi[0]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-14);
}

TEST(Encode, ArctanScalingMapsUnitFeatureToQuarterPi) {
    EncodingSpec spec = default_encoding(1, /*arctan_scaling=*/true);
    spec.pre[0] = PreGate::Identity;
    // R_y(pi/4)|0> = cos(pi/8)|0> + sin(pi/8)|1>
    const quantum::StateVector psi = encode({1.0}, spec);
    EXPECT_NEAR(psi[0].real(), std::cos(pi / 8.0), 1e-14);
    EXPECT_NEAR(psi[1].real(), std::sin(pi / 8.0), 1e-14);
}

TEST(Encode, LengthMismatchRejected) {
    EXPECT_THROW(encode({0.0, 0.0}, default_encoding(3)), std::invalid_argument);
}

TEST(Ansatz, ZeroBlocksIsIdentity) {
    Rng rng(3);
    const AnsatzSpec spec = ring_ansatz(3, 0);
    const quantum::StateVector psi = oracle::random_state(3, rng);
    quantum::StateVector out = psi;
    apply_ansatz(out, spec, VqcParams::zeros(spec));
    for (std::size_t i = 0; i < psi.dim(); ++i) EXPECT_EQ(out[i], psi[i]);
}

TEST(Ansatz, ZeroAnglesReduceToEntangler) {
    AnsatzSpec spec;
    spec.n = 2;
    spec.blocks = 1;
    spec.axes = {{Pauli::Y, Pauli::Y}};
    spec.entanglers = {{{1, 2}}};

    quantum::StateVector psi = quantum::StateVector::basis(2, 2);  // |10>
    apply_ansatz(psi, spec, VqcParams::zeros(spec));
    EXPECT_NEAR(std::abs(psi[3]), 1.0, 1e-14);  // CNOT(1,2)|10> = |11>
}

TEST(Ansatz, MatchesDenseMatrixOracle) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        CircuitSpec c = random_circuit(3, 2, 1, rng);
        const VqcParams params = random_params(c.ansatz, rng);
        const quantum::StateVector psi = oracle::random_state(3, rng);

        quantum::StateVector fast = psi;
        apply_ansatz(fast, c.ansatz, params);
        const auto expected = oracle::matrix_vector(dense_ansatz_oracle(c.ansatz, params),
                                                    psi.amplitudes());
        for (std::size_t i = 0; i < psi.dim(); ++i)
            EXPECT_NEAR(std::abs(fast[i] - expected[i]), 0.0, 1e-12);
    }
}

TEST(Run, SingleQubitCosineClosedForm) {
    CircuitSpec c = default_circuit(1, 0, 1);
    c.encoding.pre[0] = PreGate::Identity;
    for (double x : {-2.0, -0.7, 0.0, 0.3, 1.9}) {
        const auto out = run({x}, VqcParams::zeros(c.ansatz), c);
        ASSERT_EQ(out.size(), 1u);
        EXPECT_NEAR(out[0], std::cos(x), 1e-14) << "x=" << x;
    }
}

TEST(Run, AllZeroInputsGiveUnitExpectations) {
    CircuitSpec c = default_circuit(4, 2, 4);
    for (auto& g : c.encoding.pre) g = PreGate::Identity;
    const auto out = run({0, 0, 0, 0}, VqcParams::zeros(c.ansatz), c);
    for (double e : out) EXPECT_NEAR(e, 1.0, 1e-12);
}

TEST(Run, MatchesDensityMatrixOracle) {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        CircuitSpec c = random_circuit(4, 4, 2, rng);
        const VqcParams params = random_params(c.ansatz, rng);
        const auto x = random_vector(4, rng);

        const auto fast = run(x, params, c);

        // Density path: rho0 = |0..0><0..0| evolved by the dense V then U.
        const quantum::DensityMatrix rho0 =
            quantum::density_from_state(quantum::StateVector(4));
        CMatrix v = CMatrix::identity(1);
        for (int q = 1; q <= 4; ++q)
            v = kron(v, encoding_factor(c.encoding, q, x[q - 1]));
        const CMatrix full = dense_ansatz_oracle(c.ansatz, params) * v;
        for (int i = 0; i < 2; ++i) {
            const double dens = quantum::expectation_density(
                rho0, full, c.observables.observables[i]);
            EXPECT_NEAR(fast[i], dens, 1e-12);
        }
    }
}

TEST(Run, PauliExpectationsStayInUnitInterval) {
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        CircuitSpec c = random_circuit(3, 2, 3, rng);
        const auto out = run(random_vector(3, rng), random_params(c.ansatz, rng), c);
        for (double e : out) {
            EXPECT_GE(e, -1.0 - 1e-12);
            EXPECT_LE(e, 1.0 + 1e-12);
        }
    }
}

TEST(GradInputShift, SingleQubitCosineGradient) {
    CircuitSpec c = default_circuit(1, 0, 1);
    c.encoding.pre[0] = PreGate::Identity;
    for (double x : {-1.2, 0.0, 0.8}) {
        const RealMatrix g = grad_input_shift({x}, VqcParams::zeros(c.ansatz), c);
        EXPECT_NEAR(g(0, 0), -std::sin(x), 1e-13) << "x=" << x;
    }
}

TEST(GradInputShift, IdentityAxisColumnIsZero) {
    Rng rng(31);
    CircuitSpec c = default_circuit(3, 2, 2);
    c.encoding.axes[1] = Pauli::I;
    const RealMatrix g =
        grad_input_shift(random_vector(3, rng), random_params(c.ansatz, rng), c);
    for (int i = 0; i < 2; ++i) EXPECT_EQ(g(i, 1), 0.0);
}

TEST(GradInputShift, MatchesFiniteDifferences) {
    Rng rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        CircuitSpec c = random_circuit(4, 4, 2, rng);
        const VqcParams params = random_params(c.ansatz, rng);
        const auto x = random_vector(4, rng);

        const RealMatrix g = grad_input_shift(x, params, c);
        const auto fd = oracle::finite_difference(
            [&](const std::vector<double>& xs) { return run(xs, params, c); }, x, 1e-5);
        for (int q = 0; q < 4; ++q)
            for (int i = 0; i < 2; ++i)
                EXPECT_LE(oracle::rel_err(g(i, q), fd[q][i]), 1e-6)
                    << "trial=" << trial << " q=" << q << " i=" << i;
    }
}

TEST(GradParamsShift, SingleQubitClosedForm) {
    CircuitSpec c = default_circuit(1, 1, 1);
    c.encoding.pre[0] = PreGate::Identity;
    c.ansatz.entanglers[0].clear();
    VqcParams params = VqcParams::zeros(c.ansatz);
    for (double theta : {-0.9, 0.4, 2.2}) {
        params.theta[0] = theta;
        const RealMatrix g = grad_params_shift({0.0}, params, c);
        EXPECT_NEAR(g(0, 0), -std::sin(theta), 1e-13);
    }
    // Stationary point.
    params.theta[0] = 0.0;
    EXPECT_NEAR(grad_params_shift({0.0}, params, c)(0, 0), 0.0, 1e-14);
}

TEST(GradParamsShift, MatchesFiniteDifferences) {
    Rng rng(41);
    CircuitSpec c = random_circuit(3, 2, 2, rng);
    const auto x = random_vector(3, rng);
    const VqcParams params = random_params(c.ansatz, rng);

    const RealMatrix g = grad_params_shift(x, params, c);
    std::vector<double> theta = params.theta;
    const auto fd = oracle::finite_difference(
        [&](const std::vector<double>& t) {
            VqcParams p;
            p.theta = t;
            return run(x, p, c);
        },
        theta, 1e-5);
    for (std::size_t j = 0; j < theta.size(); ++j)
        for (int i = 0; i < 2; ++i)
            EXPECT_LE(oracle::rel_err(g(i, static_cast<int>(j)), fd[j][i]), 1e-6);
}

TEST(LieBracket, CommutingPairsVanish) {
    for (double a : {-2.0, 0.0, 1.3}) {
        EXPECT_LE(lie_bracket_check(Pauli::Z, Pauli::Z, a, PreGate::Identity), 1e-14);
        EXPECT_LE(lie_bracket_check(Pauli::Y, Pauli::Y, a, PreGate::Identity), 1e-14);
    }
}

TEST(LieBracket, IdentityHoldsForAllAxisPairs) {
    Rng rng(43);
    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i <= 3; ++i)
            for (PreGate pre : {PreGate::Identity, PreGate::Hadamard})
                for (int t = 0; t < 20; ++t) {
                    const double angle = rng.uniform(-2.0 * pi, 2.0 * pi);
                    EXPECT_LE(lie_bracket_check(static_cast<Pauli>(k),
                                                static_cast<Pauli>(i), angle, pre),
                              1e-12)
                        << "k=" << k << " i=" << i << " angle=" << angle;
                }
}

TEST(GradInputAnalytic, SingleQubitCosineGradient) {
    CircuitSpec c = default_circuit(1, 0, 1);
    c.encoding.pre[0] = PreGate::Identity;
    for (double x : {-1.2, 0.0, 0.8}) {
        const RealMatrix g = grad_input_analytic({x}, VqcParams::zeros(c.ansatz), c);
        EXPECT_NEAR(g(0, 0), -std::sin(x), 1e-12) << "x=" << x;
    }
}

TEST(GradInputAnalytic, IdentityAxisColumnIsZero) {
    Rng rng(47);
    CircuitSpec c = default_circuit(2, 1, 1);
    c.encoding.axes[0] = Pauli::I;
    const RealMatrix g =
        grad_input_analytic(random_vector(2, rng), random_params(c.ansatz, rng), c);
    EXPECT_EQ(g(0, 0), 0.0);
}

TEST(GradInputAnalytic, AgreesWithShiftPath) {
    Rng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 3));
        const int blocks = static_cast<int>(rng.uniform_int(0, 4));
        const int m = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        CircuitSpec c = random_circuit(n, blocks, m, rng);
        const auto x = random_vector(n, rng);
        const VqcParams params = random_params(c.ansatz, rng);

        const RealMatrix analytic = grad_input_analytic(x, params, c);
        const RealMatrix shift = grad_input_shift(x, params, c);
        for (int i = 0; i < m; ++i)
            for (int q = 0; q < n; ++q)
                EXPECT_NEAR(analytic(i, q), shift(i, q), 1e-10)
                    << "trial=" << trial << " n=" << n << " L=" << blocks;
    }
}

TEST(GradInputAnalytic, HandlesHadamardPreGatesAndScaling) {
    Rng rng(59);
    CircuitSpec c = random_circuit(3, 2, 2, rng, /*arctan_scaling=*/true);
    const auto x = random_vector(3, rng, -2.0, 2.0);
    const VqcParams params = random_params(c.ansatz, rng);
    const RealMatrix analytic = grad_input_analytic(x, params, c);
    const RealMatrix shift = grad_input_shift(x, params, c);
    for (int i = 0; i < 2; ++i)
        for (int q = 0; q < 3; ++q) EXPECT_NEAR(analytic(i, q), shift(i, q), 1e-10);
}

TEST(Scaling, RawGradientEqualsAngleGradientTimesJacobian) {
    Rng rng(61);
    CircuitSpec scaled = default_circuit(3, 2, 2, /*arctan_scaling=*/true);
    CircuitSpec plain = scaled;
    plain.encoding.arctan_scaling = false;
    const VqcParams params = random_params(scaled.ansatz, rng);
    const auto raw = random_vector(3, rng, -2.0, 2.0);

    std::vector<double> angles(3);
    for (int q = 0; q < 3; ++q) angles[q] = std::atan(raw[q]);

    const RealMatrix g_raw = grad_input_shift(raw, params, scaled);
    const RealMatrix g_angle = grad_input_shift(angles, params, plain);
    for (int i = 0; i < 2; ++i)
        for (int q = 0; q < 3; ++q)
            EXPECT_NEAR(g_raw(i, q), g_angle(i, q) / (1.0 + raw[q] * raw[q]), 1e-12);

    // And the scaled pipeline agrees with finite differences on raw features.
    const auto fd = oracle::finite_difference(
        [&](const std::vector<double>& xs) { return run(xs, params, scaled); }, raw,
        1e-5);
    for (int q = 0; q < 3; ++q)
        for (int i = 0; i < 2; ++i)
            EXPECT_LE(oracle::rel_err(g_raw(i, q), fd[q][i]), 1e-6);
}

TEST(CircuitJson, RoundTrip) {
    CircuitSpec c = default_circuit(4, 2, 3, /*arctan_scaling=*/true);
    c.encoding.axes[2] = Pauli::X;
    c.encoding.pre[1] = PreGate::Identity;
    c.ansatz.axes[1][0] = Pauli::Z;

    const CircuitSpec back = circuit_from_json(circuit_to_json(c));
    EXPECT_EQ(back.encoding.n, c.encoding.n);
    EXPECT_EQ(back.encoding.axes, c.encoding.axes);
    EXPECT_EQ(back.encoding.pre, c.encoding.pre);
    EXPECT_EQ(back.encoding.arctan_scaling, c.encoding.arctan_scaling);
    EXPECT_EQ(back.ansatz.axes, c.ansatz.axes);
    EXPECT_EQ(back.ansatz.entanglers, c.ansatz.entanglers);
    ASSERT_EQ(back.observables.size(), c.observables.size());
    for (int i = 0; i < c.observables.size(); ++i)
        EXPECT_EQ(back.observables.observables[i].string(),
                  c.observables.observables[i].string());

    // Behavioral equality on a random point.
    Rng rng(67);
    const auto x = random_vector(4, rng);
    const VqcParams params = random_params(c.ansatz, rng);
    const auto a = run(x, params, c);
    const auto b = run(x, params, back);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}
