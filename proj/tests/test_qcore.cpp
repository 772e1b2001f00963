#include <catch2/catch_amalgamated.hpp>

#include "braidkit/qcore.hpp"

using namespace braidkit;

namespace {

StateVector random_qubit(RandomStream& rng) {
    Vector v(2);
    v << Complex{rng.gaussian(), rng.gaussian()}, Complex{rng.gaussian(), rng.gaussian()};
    v /= v.norm();
    return StateVector{v};
}

Matrix random_hermitian_matrix(Eigen::Index d, RandomStream& rng) {
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex{rng.gaussian(), rng.gaussian()};
    return 0.5 * (m + m.adjoint()).eval();
}

}  // namespace

// Convention oracle: teleporting a qubit through an EPR pair and applying
// sigma_X^alpha then sigma_Z^beta on the receiving half must restore it.
// Everything downstream (energy test keys, the simulator's corrections)
// leans on this.
TEST_CASE("teleportation keys correct the received qubit", "[qcore]") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        RandomStream rng(seed);
        const StateVector phi = random_qubit(rng);
        // qubit 0: receiver's EPR half, qubit 1: sender's EPR half,
        // qubit 2: the payload.
        StateVector sys = kron_states(epr_state(1), phi);
        const BellResult r = bell_measure(sys, 1, 2, rng);
        StateVector fixed = correct_keys(r.post, 0, r.alpha, r.beta);
        const Matrix reduced = partial_trace(density_of(fixed), {0}).mat;
        const double fidelity = (phi.amps.adjoint() * reduced * phi.amps)(0).real();
        CAPTURE(seed, r.alpha, r.beta);
        REQUIRE(fidelity == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("pauli site matrices and sign rules", "[qcore]") {
    const Matrix xz = pauli_site_matrix(SitePauli{1, 1});
    Matrix want(2, 2);
    want << 0, -1, 1, 0;
    REQUIRE((xz - want).norm() < 1e-15);

    const PauliString x = PauliString::from_letters("X");
    const PauliString z = PauliString::from_letters("Z");
    const PauliString xz_str = multiply(x, z);
    REQUIRE(xz_str.sign == 1);
    const PauliString zx_str = multiply(z, x);
    REQUIRE(zx_str.sign == -1);
    REQUIRE((pauli_to_matrix(x) * pauli_to_matrix(z) - pauli_to_matrix(xz_str)).norm() < 1e-15);
    REQUIRE((pauli_to_matrix(z) * pauli_to_matrix(x) - pauli_to_matrix(zx_str)).norm() < 1e-15);

    RandomStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        PauliString a = PauliString::identity(3);
        PauliString b = PauliString::identity(3);
        for (std::size_t i = 0; i < 3; ++i) {
            a.sites[i] = SitePauli{static_cast<std::uint8_t>(rng.bits() & 1),
                                   static_cast<std::uint8_t>(rng.bits() & 1)};
            b.sites[i] = SitePauli{static_cast<std::uint8_t>(rng.bits() & 1),
                                   static_cast<std::uint8_t>(rng.bits() & 1)};
        }
        const Matrix lhs = pauli_to_matrix(a) * pauli_to_matrix(b);
        const Matrix rhs = pauli_to_matrix(multiply(a, b));
        REQUIRE((lhs - rhs).norm() < 1e-12);
    }
}

TEST_CASE("letter strings round trip", "[qcore]") {
    const PauliString p = PauliString::from_letters("IXZXI");
    REQUIRE(p.letters() == "IXZXI");
    REQUIRE(p.weight() == 3);
    REQUIRE(PauliString::identity(4).weight() == 0);
}

TEST_CASE("epr state amplitudes and correlations", "[qcore]") {
    const StateVector one = epr_state(1);
    REQUIRE(one.amps(0).real() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(std::abs(one.amps(1)) < 1e-15);
    REQUIRE(std::abs(one.amps(2)) < 1e-15);
    REQUIRE(one.amps(3).real() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // Pair correlations on two pairs: X (x) X and Z (x) Z on pair 1 read +1.
    const StateVector two = epr_state(2);
    for (const char l : {'X', 'Z'}) {
        std::string s(4, 'I');
        s[0] = l;
        s[2] = l;
        const StateVector applied = apply_pauli(PauliString::from_letters(s), two);
        const Complex val = (two.amps.adjoint() * applied.amps)(0);
        REQUIRE(val.real() == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("partial trace of an EPR pair is maximally mixed", "[qcore]") {
    const Matrix half = partial_trace(density_of(epr_state(1)), {0}).mat;
    REQUIRE((half - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-12);
    // tracing the other side too
    const Matrix other = partial_trace(density_of(epr_state(1)), {1}).mat;
    REQUIRE((other - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("trace distance golden", "[qcore]") {
    Matrix pure = Matrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    const Matrix mixed = 0.5 * Matrix::Identity(2, 2);
    REQUIRE(trace_distance(DensityMatrix{pure}, DensityMatrix{mixed}) ==
            Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("hermitian eigensolver reconstructs and sorts", "[qcore]") {
    RandomStream rng(11);
    const Matrix h = random_hermitian_matrix(6, rng);
    const HermitianEig e = hermitian_eig(h);
    const Matrix rebuilt =
        e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    REQUIRE((rebuilt - h).norm() < 1e-10);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) REQUIRE(e.values(i - 1) <= e.values(i) + 1e-12);
    REQUIRE_THROWS(hermitian_eig(h + Matrix::Constant(6, 6, Complex{0.0, 0.5})));
}

TEST_CASE("embed and apply agree with dense tensor placement", "[qcore]") {
    const Matrix x = pauli_site_matrix(SitePauli{1, 0});
    const Matrix embedded = embed_operator(x, {1}, 3);
    const Matrix direct = pauli_to_matrix(PauliString::from_letters("IXI"));
    REQUIRE((embedded - direct).norm() < 1e-12);

    RandomStream rng(3);
    Matrix op = random_hermitian_matrix(4, rng);
    Vector amps(8);
    for (Eigen::Index i = 0; i < 8; ++i) amps(i) = Complex{rng.gaussian(), rng.gaussian()};
    amps /= amps.norm();
    const StateVector s{amps};
    const StateVector via_apply = apply_on_qubits(op, {0, 2}, s);
    const StateVector via_embed{embed_operator(op, {0, 2}, 3) * amps};
    REQUIRE((via_apply.amps - via_embed.amps).norm() < 1e-12);
}

TEST_CASE("state-weighted norm against the maximally mixed state", "[qcore]") {
    RandomStream rng(5);
    const Matrix a = random_hermitian_matrix(4, rng);
    const Matrix rho = 0.25 * Matrix::Identity(4, 4);
    REQUIRE(rho_norm(a, rho) == Catch::Approx(a.norm() / 2.0).epsilon(1e-12));
}

TEST_CASE("measurement statistics track Born probabilities", "[qcore]") {
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const StateVector s{plus};
    std::vector<Matrix> pvm = {Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    pvm[0](0, 0) = 1.0;
    pvm[1](1, 1) = 1.0;
    RandomStream rng(42);
    const int rounds = 100000;
    int zeros = 0;
    for (int i = 0; i < rounds; ++i)
        if (born_measure(s, pvm, rng).outcome == 0) ++zeros;
    const double freq = static_cast<double>(zeros) / rounds;
    const double sigma = 0.5 / std::sqrt(static_cast<double>(rounds));
    REQUIRE(std::abs(freq - 0.5) < 3 * sigma + 1e-9);

    // Teleportation keys are uniform over the four Bell outcomes.
    std::array<int, 4> counts{};
    RandomStream rng2(43);
    const StateVector payload = random_qubit(rng2);
    for (int i = 0; i < rounds; ++i) {
        StateVector sys = kron_states(epr_state(1), payload);
        const BellResult r = bell_measure(sys, 1, 2, rng2);
        ++counts[static_cast<std::size_t>(2 * r.alpha + r.beta)];
    }
    const double sigma4 = std::sqrt(0.25 * 0.75 / rounds);
    for (int k = 0; k < 4; ++k) {
        const double freq4 = static_cast<double>(counts[static_cast<std::size_t>(k)]) / rounds;
        REQUIRE(std::abs(freq4 - 0.25) < 3 * sigma4 + 1e-9);
    }
}

TEST_CASE("correlation identity links values and operator distance", "[qcore]") {
    // 2 - 2 Re<psi| A (x) B |psi> = ||(A (x) I - I (x) B)|psi>||^2 for
    // involutions A, B.
    RandomStream rng(9);
    const auto reflection = [&](Eigen::Index d) {
        const HermitianEig e = hermitian_eig(random_hermitian_matrix(d, rng));
        Vector signs(d);
        for (Eigen::Index i = 0; i < d; ++i) signs(i) = (rng.bits() & 1) ? -1.0 : 1.0;
        return Matrix(e.vectors * signs.asDiagonal() * e.vectors.adjoint());
    };
    const Matrix a = reflection(4);
    const Matrix b = reflection(4);
    for (int trial = 0; trial < 4; ++trial) {
        Vector amps(16);
        for (Eigen::Index i = 0; i < 16; ++i) amps(i) = Complex{rng.gaussian(), rng.gaussian()};
        amps /= amps.norm();
        const StateVector s{amps};
        const StateVector sa = apply_on_qubits(a, {0, 1}, s);
        const StateVector sab = apply_on_qubits(b, {2, 3}, sa);
        const double corr = (s.amps.adjoint() * sab.amps)(0).real();
        const StateVector sb = apply_on_qubits(b, {2, 3}, s);
        const double dist = (sa.amps - sb.amps).squaredNorm();
        REQUIRE(2.0 - 2.0 * corr == Catch::Approx(dist).margin(1e-10));
    }
}

TEST_CASE("bit helpers and seeded streams are stable", "[qcore]") {
    REQUIRE(qubit_bit(0b100, 0, 3) == 1);
    REQUIRE(qubit_bit(0b100, 2, 3) == 0);
    REQUIRE(set_qubit_bit(0, 0, 3, 1) == 0b100);
    REQUIRE(is_power_of_two(64));
    REQUIRE(!is_power_of_two(48));
    REQUIRE(qubit_count(32) == 5);

    RandomStream a = RandomStream::derived(123, "alpha");
    RandomStream b = RandomStream::derived(123, "alpha");
    RandomStream c = RandomStream::derived(123, "beta");
    const double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    REQUIRE(va == vb);
    REQUIRE(va != vc);
}

TEST_CASE("state products stack registers left to right", "[qcore]") {
    Vector zero(2), one(2);
    zero << 1.0, 0.0;
    one << 0.0, 1.0;
    const StateVector s = kron_states(StateVector{zero}, StateVector{one});
    REQUIRE(std::abs(s.amps(1) - 1.0) < 1e-15);  // |01>
    REQUIRE(s.qubits() == 2);
}
