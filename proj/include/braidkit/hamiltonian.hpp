#pragma once

// XZ local Hamiltonians, the clock construction turning a verification
// circuit into one, and history states.
//
// An XZ Hamiltonian on n qubits is a list of terms (gamma, letters) with
// letters over {I, X, Z} and |gamma| <= 1; its matrix is the term average
// (1/m) sum_l gamma_l sigma_l.  Clock Hamiltonians place the T+1 clock
// qubits first (time t is the unary string 1^t 0^{T+1-t}), then the p
// witness wires, then the q ancilla wires.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "braidkit/common.hpp"
#include "braidkit/qcore.hpp"

namespace braidkit {

struct HamTerm {
    double gamma = 0.0;
    std::string letters;
};

struct XZHamiltonian {
    int n = 1;
    std::vector<HamTerm> terms;

    int term_count() const { return static_cast<int>(terms.size()); }
};

inline void validate_xz_hamiltonian(const XZHamiltonian& h) {
    require(h.n >= 1, "hamiltonian: n must be positive");
    require(!h.terms.empty(), "hamiltonian: no terms");
    for (const auto& t : h.terms) {
        require(static_cast<int>(t.letters.size()) == h.n, "hamiltonian: letter string length");
        for (char c : t.letters)
            require(c == 'I' || c == 'X' || c == 'Z', "hamiltonian: letters must be I, X or Z");
        require(t.gamma != 0.0, "hamiltonian: zero coefficient");
        require(std::abs(t.gamma) <= 1.0 + 1e-12, "hamiltonian: |gamma| must be at most 1");
    }
}

inline Matrix hamiltonian_matrix(const XZHamiltonian& h) {
    validate_xz_hamiltonian(h);
    const Eigen::Index dim = Eigen::Index{1} << h.n;
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& t : h.terms)
        m += t.gamma * pauli_to_matrix(PauliString::from_letters(t.letters));
    return m / static_cast<double>(h.terms.size());
}

inline double ground_energy(const XZHamiltonian& h) {
    require(h.n <= 12, "ground_energy: n too large for dense diagonalization");
    return hermitian_eig(hamiltonian_matrix(h)).values(0);
}

inline Vector ground_state(const XZHamiltonian& h) {
    require(h.n <= 12, "ground_state: n too large for dense diagonalization");
    return hermitian_eig(hamiltonian_matrix(h)).vectors.col(0);
}

// Expand a matrix in the {I, X, Z}^k string basis.  Only matrices that lie
// in that (real) span are accepted; anything with a Y component fails the
// reconstruction check.
inline std::vector<std::pair<std::string, double>> pauli_decompose(const Matrix& m) {
    const Eigen::Index dim = m.rows();
    require(m.cols() == dim && is_power_of_two(dim), "pauli_decompose: need a square 2^k matrix");
    const int k = qubit_count(dim);
    require(k <= 10, "pauli_decompose: too many qubits");
    std::vector<std::pair<std::string, double>> out;
    double recon = 0.0;
    std::string letters(static_cast<std::size_t>(k), 'I');
    std::vector<int> digits(static_cast<std::size_t>(k), 0);
    const long count = static_cast<long>(std::pow(3.0, k) + 0.5);
    for (long idx = 0; idx < count; ++idx) {
        Eigen::Index xmask = 0, zmask = 0;
        for (int i = 0; i < k; ++i) {
            const int d = digits[static_cast<std::size_t>(i)];
            letters[static_cast<std::size_t>(i)] = d == 0 ? 'I' : (d == 1 ? 'X' : 'Z');
            const Eigen::Index bit = Eigen::Index{1} << (k - 1 - i);
            if (d == 1) xmask |= bit;
            if (d == 2) zmask |= bit;
        }
        Complex tr = 0.0;
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double sign = (std::popcount(static_cast<std::uint64_t>(j & zmask)) & 1) ? -1.0 : 1.0;
            tr += sign * m(j, j ^ xmask);
        }
        const Complex c = tr / static_cast<double>(dim);
        require(std::abs(c.imag()) <= 1e-9, "pauli_decompose: non-real coefficient");
        if (std::abs(c.real()) > 1e-12) out.emplace_back(letters, c.real());
        recon += std::norm(c) * static_cast<double>(dim);
        // advance base-3 counter
        for (int i = k - 1; i >= 0; --i) {
            if (++digits[static_cast<std::size_t>(i)] < 3) break;
            digits[static_cast<std::size_t>(i)] = 0;
        }
    }
    const double frob = m.squaredNorm();
    require(std::abs(frob - recon) <= 1e-9 * std::max(1.0, frob),
            "pauli_decompose: matrix has a component outside the I/X/Z span");
    return out;
}

// ---------------------------------------------------------------------------
// Verification circuits over the gate set {H, CNOT, Toffoli}.

struct Gate {
    enum Kind { H, CX, CCX } kind = H;
    std::vector<int> qubits;

    static Gate h(int a) { return Gate{H, {a}}; }
    static Gate cx(int c, int t) { return Gate{CX, {c, t}}; }
    static Gate ccx(int c1, int c2, int t) { return Gate{CCX, {c1, c2, t}}; }
};

struct Circuit {
    int p = 0;  // witness wires
    int q = 0;  // ancilla wires, initialized to |0>
    std::vector<Gate> gates;

    int wires() const { return p + q; }
    int depth() const { return static_cast<int>(gates.size()); }
    // Wire whose |1> outcome at the final time means "accept".
    int output_wire() const { return q >= 1 ? p : 0; }
};

inline void validate_circuit(const Circuit& c) {
    require(c.p >= 0 && c.q >= 0 && c.wires() >= 1, "circuit: need at least one wire");
    for (const auto& g : c.gates) {
        const std::size_t want = g.kind == Gate::H ? 1 : (g.kind == Gate::CX ? 2 : 3);
        require(g.qubits.size() == want, "circuit: gate arity mismatch");
        for (std::size_t i = 0; i < g.qubits.size(); ++i) {
            require(g.qubits[i] >= 0 && g.qubits[i] < c.wires(), "circuit: wire out of range");
            for (std::size_t j = i + 1; j < g.qubits.size(); ++j)
                require(g.qubits[i] != g.qubits[j], "circuit: repeated wire in gate");
        }
    }
}

inline Matrix gate_base_matrix(const Gate& g) {
    switch (g.kind) {
        case Gate::H: {
            Matrix m(2, 2);
            const double s = 1.0 / std::sqrt(2.0);
            m << s, s, s, -s;
            return m;
        }
        case Gate::CX: {
            Matrix m = Matrix::Identity(4, 4);
            m(2, 2) = 0.0;
            m(3, 3) = 0.0;
            m(2, 3) = 1.0;
            m(3, 2) = 1.0;
            return m;
        }
        default: {
            Matrix m = Matrix::Identity(8, 8);
            m(6, 6) = 0.0;
            m(7, 7) = 0.0;
            m(6, 7) = 1.0;
            m(7, 6) = 1.0;
            return m;
        }
    }
}

inline StateVector apply_gate(const Gate& g, const StateVector& s) {
    return apply_on_qubits(gate_base_matrix(g), g.qubits, s);
}

// ---------------------------------------------------------------------------
// Clock construction.

struct ClockTerm {
    std::string label;
    std::vector<int> qubits;  // global, ascending
    Matrix op;
};

namespace detail {

inline Matrix ket_bra(int b) {
    Matrix m = Matrix::Zero(2, 2);
    m(b, b) = 1.0;
    return m;
}

inline Matrix pauli_x_matrix() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

// Penalty blocks of the clock Hamiltonian for circuit c.  Qubit layout:
// clock 0..T, then the p+q data wires.  Labels: in:<j> (ancilla j starts in
// |0>), clock:<i> (unary domino), clock:top (no overflow past time T),
// prop:<t> (step t follows step t-1 via gate t), out (output wire must read
// |1> at time T).
inline std::vector<ClockTerm> clock_terms(const Circuit& c) {
    validate_circuit(c);
    const int t_max = c.depth();
    const int data0 = t_max + 1;
    std::vector<ClockTerm> terms;

    for (int j = 0; j < c.q; ++j) {
        ClockTerm t;
        t.label = "in:" + std::to_string(j);
        t.qubits = {0, data0 + c.p + j};
        t.op = detail::kron(detail::ket_bra(0), detail::ket_bra(1));
        terms.push_back(std::move(t));
    }

    for (int i = 1; i <= t_max; ++i) {
        ClockTerm t;
        t.label = "clock:" + std::to_string(i);
        t.qubits = {i - 1, i};
        t.op = detail::kron(detail::ket_bra(0), detail::ket_bra(1));
        terms.push_back(std::move(t));
    }
    {
        ClockTerm t;
        t.label = "clock:top";
        t.qubits = {t_max};
        t.op = detail::ket_bra(1);
        terms.push_back(std::move(t));
    }

    for (int step = 1; step <= t_max; ++step) {
        const Gate& g = c.gates[static_cast<std::size_t>(step - 1)];
        const Matrix u = gate_base_matrix(g);
        const Eigen::Index du = u.rows();
        const Matrix iu = Matrix::Identity(du, du);
        ClockTerm t;
        t.label = "prop:" + std::to_string(step);
        if (step >= 2) t.qubits.push_back(step - 2);
        t.qubits.push_back(step - 1);
        t.qubits.push_back(step);
        std::vector<int> gate_qs = g.qubits;
        std::sort(gate_qs.begin(), gate_qs.end());
        // Gate operands in ascending wire order; permute u accordingly.
        Matrix u_sorted = u;
        if (gate_qs != g.qubits) {
            // Map each basis index through the wire permutation.
            const int k = static_cast<int>(g.qubits.size());
            std::vector<int> perm(static_cast<std::size_t>(k));
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    if (gate_qs[static_cast<std::size_t>(a)] == g.qubits[static_cast<std::size_t>(b)])
                        perm[static_cast<std::size_t>(a)] = b;
            const auto remap = [&](Eigen::Index idx) {
                Eigen::Index out = 0;
                for (int a = 0; a < k; ++a) {
                    const int bit = (idx >> (k - 1 - perm[static_cast<std::size_t>(a)])) & 1;
                    out |= static_cast<Eigen::Index>(bit) << (k - 1 - a);
                }
                return out;
            };
            for (Eigen::Index r = 0; r < du; ++r)
                for (Eigen::Index cc = 0; cc < du; ++cc) u_sorted(remap(r), remap(cc)) = u(r, cc);
        }
        for (int w : gate_qs) t.qubits.push_back(data0 + w);

        // [c_t] (x) [c_{t+1}] (x) [data], prefixed by |1><1| on c_{t-1} for
        // steps past the first.
        const Matrix x = detail::pauli_x_matrix();
        const Matrix core =
            0.5 * detail::kron(detail::kron(Matrix::Identity(2, 2), detail::ket_bra(0)), iu) -
            0.5 * detail::kron(detail::kron(x, detail::ket_bra(0)), u_sorted);
        t.op = step >= 2 ? detail::kron(detail::ket_bra(1), core) : core;
        terms.push_back(std::move(t));
    }

    {
        ClockTerm t;
        t.label = "out";
        const int wire = data0 + c.output_wire();
        if (t_max >= 1) {
            t.qubits = {t_max - 1, wire};
            t.op = detail::kron(detail::ket_bra(1), detail::ket_bra(0));
        } else {
            t.qubits = {0, wire};
            t.op = detail::kron(detail::ket_bra(0), detail::ket_bra(0));
        }
        terms.push_back(std::move(t));
    }
    return terms;
}

// Flatten logical penalty blocks into an XZ Hamiltonian on total qubits:
// decompose each block over {I, X, Z} strings on its support, embed, merge
// identical strings, split coefficients above 1 into equal parts, drop
// negligible ones.
inline XZHamiltonian flatten_terms(const std::vector<ClockTerm>& blocks, int total) {
    std::map<std::string, double> merged;
    for (const auto& b : blocks) {
        const auto local = pauli_decompose(b.op);
        for (const auto& [letters, coeff] : local) {
            std::string global(static_cast<std::size_t>(total), 'I');
            for (std::size_t i = 0; i < b.qubits.size(); ++i)
                global[static_cast<std::size_t>(b.qubits[i])] = letters[i];
            merged[global] += coeff;
        }
    }
    XZHamiltonian h;
    h.n = total;
    for (const auto& [letters, coeff] : merged) {
        if (std::abs(coeff) < 1e-12) continue;
        const int parts = static_cast<int>(std::ceil(std::abs(coeff) - 1e-12));
        for (int i = 0; i < std::max(1, parts); ++i)
            h.terms.push_back(HamTerm{coeff / std::max(1, parts), letters});
    }
    validate_xz_hamiltonian(h);
    return h;
}

inline int clock_total_qubits(const Circuit& c) { return c.depth() + 1 + c.wires(); }

inline XZHamiltonian circuit_to_hamiltonian(const Circuit& c) {
    return flatten_terms(clock_terms(c), clock_total_qubits(c));
}

// ---------------------------------------------------------------------------
// History states.

// Basis index of the unary clock string 1^t 0^{T+1-t} within the full
// register.
inline Eigen::Index unary_clock_index(int t, int total_qubits) {
    Eigen::Index idx = 0;
    for (int i = 0; i < t; ++i) idx |= Eigen::Index{1} << (total_qubits - 1 - i);
    return idx;
}

// |Psi> = (1/sqrt(T+1)) sum_t |1^t 0^{T+1-t}> (x) U_t..U_1 |witness, 0^q>.
inline StateVector history_state_pure(const Circuit& c, const Vector& witness) {
    validate_circuit(c);
    require(witness.size() == (Eigen::Index{1} << c.p), "history_state: witness dimension");
    require(std::abs(witness.squaredNorm() - 1.0) <= 1e-9, "history_state: witness not normalized");
    const int t_max = c.depth();
    const int total = clock_total_qubits(c);
    const Eigen::Index data_dim = Eigen::Index{1} << c.wires();
    Vector data = Vector::Zero(data_dim);
    const Eigen::Index anc = Eigen::Index{1} << c.q;
    for (Eigen::Index w = 0; w < witness.size(); ++w) data(w * anc) = witness(w);
    StateVector data_state{data};
    Vector total_amps = Vector::Zero(Eigen::Index{1} << total);
    const double coeff = 1.0 / std::sqrt(static_cast<double>(t_max + 1));
    for (int t = 0; t <= t_max; ++t) {
        if (t >= 1) data_state = apply_gate(c.gates[static_cast<std::size_t>(t - 1)], data_state);
        const Eigen::Index base = unary_clock_index(t, total);
        for (Eigen::Index j = 0; j < data_dim; ++j) total_amps(base | j) += coeff * data_state.amps(j);
    }
    return StateVector{std::move(total_amps)};
}

// Mixed-witness history state: the witness density's eigen-mixture of pure
// history states.
inline DensityMatrix history_state(const Circuit& c, const Matrix& witness_density) {
    validate_circuit(c);
    const Eigen::Index dw = Eigen::Index{1} << c.p;
    require(witness_density.rows() == dw && witness_density.cols() == dw,
            "history_state: witness density dimension");
    validate_density(DensityMatrix{witness_density});
    const HermitianEig eig = hermitian_eig(witness_density);
    const Eigen::Index dim = Eigen::Index{1} << clock_total_qubits(c);
    Matrix rho = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dw; ++k) {
        const double p = eig.values(k);
        if (p < 1e-15) continue;
        Vector v = eig.vectors.col(k);
        v /= v.norm();
        const StateVector psi = history_state_pure(c, v);
        rho += p * (psi.amps * psi.amps.adjoint());
    }
    return DensityMatrix{std::move(rho)};
}

// Reduced history state on the qubit set s, computed without forming the
// full density matrix: per (t, t') pair, the clock factor is a delta-checked
// outer product on the kept clock qubits and the data factor a partial trace
// of the evolved witness pair.
inline Matrix local_density(const Circuit& c, const Matrix& witness_density,
                            const std::vector<int>& s) {
    validate_circuit(c);
    const int t_max = c.depth();
    const int total = clock_total_qubits(c);
    require(!s.empty() && static_cast<int>(s.size()) <= 8, "local_density: keep 1..8 qubits");
    for (std::size_t i = 0; i < s.size(); ++i) {
        require(s[i] >= 0 && s[i] < total, "local_density: qubit out of range");
        if (i > 0) require(s[i] > s[i - 1], "local_density: qubits must be ascending");
    }
    const Eigen::Index dw = Eigen::Index{1} << c.p;
    require(witness_density.rows() == dw && witness_density.cols() == dw,
            "local_density: witness density dimension");
    validate_density(DensityMatrix{witness_density});

    std::vector<int> clock_keep, data_keep_local;
    for (int g : s)
        if (g <= t_max)
            clock_keep.push_back(g);
        else
            data_keep_local.push_back(g - (t_max + 1));

    const HermitianEig eig = hermitian_eig(witness_density);
    const Eigen::Index data_dim = Eigen::Index{1} << c.wires();
    const Eigen::Index anc = Eigen::Index{1} << c.q;

    // Evolved eigenvector trajectories psi[k][t].
    std::vector<std::vector<Vector>> traj;
    std::vector<double> weights;
    for (Eigen::Index k = 0; k < dw; ++k) {
        const double p = eig.values(k);
        if (p < 1e-15) continue;
        Vector data = Vector::Zero(data_dim);
        for (Eigen::Index w = 0; w < dw; ++w) data(w * anc) = eig.vectors(w, k);
        StateVector st{data};
        std::vector<Vector> states;
        states.push_back(st.amps);
        for (int t = 1; t <= t_max; ++t) {
            st = apply_gate(c.gates[static_cast<std::size_t>(t - 1)], st);
            states.push_back(st.amps);
        }
        traj.push_back(std::move(states));
        weights.push_back(p);
    }

    const auto clock_bit = [&](int t, int qubit) { return qubit < t ? 1 : 0; };
    const Eigen::Index dim_clock = Eigen::Index{1} << clock_keep.size();
    const Eigen::Index dim_out = Eigen::Index{1} << s.size();
    Matrix out = Matrix::Zero(dim_out, dim_out);
    for (int t = 0; t <= t_max; ++t)
        for (int tp = 0; tp <= t_max; ++tp) {
            bool match = true;
            for (int i = 0; i <= t_max && match; ++i) {
                if (std::find(clock_keep.begin(), clock_keep.end(), i) != clock_keep.end())
                    continue;
                if (clock_bit(t, i) != clock_bit(tp, i)) match = false;
            }
            if (!match) continue;
            Eigen::Index row = 0, col = 0;
            for (std::size_t i = 0; i < clock_keep.size(); ++i) {
                const int shift = static_cast<int>(clock_keep.size() - 1 - i);
                row |= static_cast<Eigen::Index>(clock_bit(t, clock_keep[i])) << shift;
                col |= static_cast<Eigen::Index>(clock_bit(tp, clock_keep[i])) << shift;
            }
            Matrix clock_factor = Matrix::Zero(dim_clock, dim_clock);
            clock_factor(row, col) = 1.0;
            Matrix data_factor = Matrix::Zero(Eigen::Index{1} << data_keep_local.size(),
                                              Eigen::Index{1} << data_keep_local.size());
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const Matrix outer = traj[k][static_cast<std::size_t>(t)] *
                                     traj[k][static_cast<std::size_t>(tp)].adjoint();
                data_factor += weights[k] * partial_trace(DensityMatrix{outer}, data_keep_local).mat;
            }
            out += detail::kron(clock_factor, data_factor) / static_cast<double>(t_max + 1);
        }
    return out;
}

}  // namespace braidkit
