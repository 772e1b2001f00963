#pragma once

// Fixture Hamiltonians and circuits shared by the demos, the CLI defaults
// and the test suite.

#include "braidkit/hamiltonian.hpp"

namespace braidkit {

inline XZHamiltonian fixture_ham_a() { return XZHamiltonian{1, {{1.0, "Z"}}}; }

inline XZHamiltonian fixture_ham_b() {
    return XZHamiltonian{2, {{1.0, "ZI"}, {1.0, "IZ"}}};
}

inline XZHamiltonian fixture_ham_c() {
    return XZHamiltonian{3, {{0.5, "XXI"}, {-0.75, "IZZ"}, {1.0, "ZIZ"}}};
}

// Gap demo pair: the first is diagonal with ground energy -1, the second
// mixes bases and only reaches -1/sqrt(2).
inline XZHamiltonian gap_demo_low() { return XZHamiltonian{2, {{1.0, "ZI"}, {1.0, "IZ"}}}; }

inline XZHamiltonian gap_demo_high() { return XZHamiltonian{2, {{1.0, "XI"}, {1.0, "ZI"}}}; }

inline Circuit fixture_circuit_one() {
    Circuit c;
    c.p = 1;
    c.q = 0;
    c.gates = {Gate::h(0)};
    return c;
}

inline Circuit fixture_circuit_two() {
    Circuit c;
    c.p = 1;
    c.q = 1;
    c.gates = {Gate::h(0), Gate::cx(0, 1)};
    return c;
}

inline Circuit fixture_circuit_three() {
    Circuit c;
    c.p = 1;
    c.q = 2;
    c.gates = {Gate::h(0), Gate::ccx(0, 1, 2), Gate::h(0)};
    return c;
}

// CX copies the witness onto the output ancilla: witness |1> accepts.
inline Circuit accepting_circuit() {
    Circuit c;
    c.p = 1;
    c.q = 1;
    c.gates = {Gate::cx(0, 1)};
    return c;
}

// No witness, no gates: the output ancilla stays |0> and never accepts.
inline Circuit rejecting_circuit() {
    Circuit c;
    c.p = 0;
    c.q = 1;
    return c;
}

}  // namespace braidkit
