#pragma once

// Dense simulation primitives: signed X/Z Pauli strings, state vectors,
// density matrices, EPR states, partial traces, projective and Bell
// measurements.
//
// Conventions (used everywhere):
//   * qubit 0 is the leftmost tensor factor / most significant index bit;
//   * a bipartite state lists all side-A qubits first, then side B;
//   * a Pauli site holds exponents (x, z) of sigma_X^x sigma_Z^z in that
//     order, so (1,1) is the product XZ = [[0,-1],[1,0]];
//   * measurement outcome bit 0 encodes eigenvalue +1, bit 1 encodes -1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "braidkit/common.hpp"

namespace braidkit {

struct SitePauli {
    std::uint8_t x = 0;
    std::uint8_t z = 0;
};

struct PauliString {
    int n = 0;
    std::vector<SitePauli> sites;  // size n
    int sign = 1;                  // +1 or -1

    int weight() const {
        int w = 0;
        for (const auto& s : sites) w += (s.x || s.z) ? 1 : 0;
        return w;
    }

    // True when no site carries both X and Z (pure I/X/Z string).
    bool xz_only() const {
        for (const auto& s : sites)
            if (s.x && s.z) return false;
        return true;
    }

    static PauliString identity(int n) {
        PauliString p;
        p.n = n;
        p.sites.assign(static_cast<std::size_t>(n), SitePauli{});
        return p;
    }

    // Parse a letter string over {I, X, Z}; one character per site.
    static PauliString from_letters(std::string_view letters, int sign = 1) {
        PauliString p = identity(static_cast<int>(letters.size()));
        p.sign = sign;
        for (std::size_t i = 0; i < letters.size(); ++i) {
            switch (letters[i]) {
                case 'I': break;
                case 'X': p.sites[i].x = 1; break;
                case 'Z': p.sites[i].z = 1; break;
                default: throw std::invalid_argument("PauliString: letter not in {I,X,Z}");
            }
        }
        return p;
    }

    // Letter form; only defined for I/X/Z strings with positive sign handled
    // by the caller (the sign is not part of the letters).
    std::string letters() const {
        require(xz_only(), "PauliString::letters requires an I/X/Z string");
        std::string s;
        s.reserve(static_cast<std::size_t>(n));
        for (const auto& site : sites) s.push_back(site.x ? 'X' : (site.z ? 'Z' : 'I'));
        return s;
    }

    bool operator==(const PauliString& o) const {
        if (n != o.n || sign != o.sign) return false;
        for (int i = 0; i < n; ++i)
            if (sites[i].x != o.sites[i].x || sites[i].z != o.sites[i].z) return false;
        return true;
    }
};

// Group multiplication of signed Pauli strings.  Site-wise
// (X^a Z^b)(X^c Z^d) = (-1)^{b c} X^{a xor c} Z^{b xor d}; signs multiply.
inline PauliString multiply(const PauliString& p, const PauliString& q) {
    require(p.n == q.n, "PauliString multiply: size mismatch");
    PauliString r = PauliString::identity(p.n);
    int crossings = 0;
    for (int i = 0; i < p.n; ++i) {
        crossings += p.sites[i].z & q.sites[i].x;
        r.sites[i].x = p.sites[i].x ^ q.sites[i].x;
        r.sites[i].z = p.sites[i].z ^ q.sites[i].z;
    }
    r.sign = p.sign * q.sign * ((crossings & 1) ? -1 : 1);
    return r;
}

inline Matrix pauli_site_matrix(const SitePauli& s) {
    Matrix m(2, 2);
    if (s.x && s.z) {  // XZ
        m << 0, -1, 1, 0;
    } else if (s.x) {
        m << 0, 1, 1, 0;
    } else if (s.z) {
        m << 1, 0, 0, -1;
    } else {
        m << 1, 0, 0, 1;
    }
    return m;
}

inline Matrix pauli_to_matrix(const PauliString& p) {
    Matrix m = Matrix::Identity(1, 1) * static_cast<double>(p.sign);
    for (const auto& s : p.sites) m = Eigen::kroneckerProduct(m, pauli_site_matrix(s)).eval();
    return m;
}

struct StateVector {
    Vector amps;

    Eigen::Index dim() const { return amps.size(); }
    int qubits() const { return qubit_count(dim()); }
};

inline StateVector make_state(Vector amps) {
    require(is_power_of_two(amps.size()), "state dimension must be a power of two");
    require(std::abs(amps.squaredNorm() - 1.0) <= 1e-12, "state is not normalized");
    return StateVector{std::move(amps)};
}

inline StateVector basis_state(int n, Eigen::Index index) {
    Vector v = Vector::Zero(Eigen::Index{1} << n);
    v(index) = 1.0;
    return StateVector{std::move(v)};
}

struct DensityMatrix {
    Matrix mat;

    Eigen::Index dim() const { return mat.rows(); }
    int qubits() const { return qubit_count(dim()); }
};

inline DensityMatrix density_of(const StateVector& s) {
    return DensityMatrix{s.amps * s.amps.adjoint()};
}

inline void validate_density(const DensityMatrix& rho, double tol = 1e-9) {
    require(rho.mat.rows() == rho.mat.cols(), "density matrix must be square");
    require(is_power_of_two(rho.mat.rows()), "density dimension must be a power of two");
    require((rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff() <= tol,
            "density matrix is not Hermitian");
    require(std::abs(rho.mat.trace().real() - 1.0) <= tol, "density matrix trace is not 1");
}

/// n EPR pairs; 2n qubits, side A first: pair i lives on qubits (i, n+i).
inline StateVector epr_state(int n) {
    require(n >= 1, "epr_state: n must be positive");
    const Eigen::Index half = Eigen::Index{1} << n;
    Vector v = Vector::Zero(half * half);
    const double amp = std::pow(2.0, -n / 2.0);
    for (Eigen::Index a = 0; a < half; ++a) v(a * half + a) = amp;
    return StateVector{std::move(v)};
}

// Tensor product of register states, a's qubits first.
inline StateVector kron_states(const StateVector& a, const StateVector& b) {
    Vector v(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < b.dim(); ++j) v(i * b.dim() + j) = a.amps(i) * b.amps(j);
    return StateVector{std::move(v)};
}

// Apply a signed Pauli string to a state vector in O(dim).
// P|i> = sign * (-1)^{z . i} |i xor x>, acting on the listed qubits.
inline StateVector apply_pauli(const PauliString& p, const StateVector& s) {
    require(p.n == s.qubits(), "apply_pauli: qubit count mismatch");
    const int n = p.n;
    Eigen::Index xmask = 0, zmask = 0;
    for (int i = 0; i < n; ++i) {
        if (p.sites[i].x) xmask |= Eigen::Index{1} << (n - 1 - i);
        if (p.sites[i].z) zmask |= Eigen::Index{1} << (n - 1 - i);
    }
    Vector out(s.dim());
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const int par = std::popcount(static_cast<std::uint64_t>(i & zmask)) & 1;
        const double ph = (par ? -1.0 : 1.0) * p.sign;
        out(i ^ xmask) = ph * s.amps(i);
    }
    return StateVector{std::move(out)};
}

// Embed an operator acting on the listed qubits (in the listed order) into
// the full 2^total space.
inline Matrix embed_operator(const Matrix& op, const std::vector<int>& qubits, int total) {
    const int k = static_cast<int>(qubits.size());
    require(op.rows() == (Eigen::Index{1} << k) && op.cols() == op.rows(),
            "embed_operator: operator size does not match qubit list");
    for (int q : qubits) require(q >= 0 && q < total, "embed_operator: qubit out of range");
    const Eigen::Index dim = Eigen::Index{1} << total;
    Matrix full = Matrix::Zero(dim, dim);
    const Eigen::Index rest = dim >> k;
    // Enumerate assignments of the non-listed qubits, then fill the k-qubit block.
    std::vector<int> others;
    for (int q = 0; q < total; ++q)
        if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) others.push_back(q);
    for (Eigen::Index o = 0; o < rest; ++o) {
        Eigen::Index base = 0;
        for (std::size_t t = 0; t < others.size(); ++t)
            base = set_qubit_bit(base, others[t], total, qubit_bit(o, static_cast<int>(t),
                                                                  static_cast<int>(others.size())));
        for (Eigen::Index r = 0; r < op.rows(); ++r) {
            Eigen::Index row = base;
            for (int t = 0; t < k; ++t) row = set_qubit_bit(row, qubits[t], total, qubit_bit(r, t, k));
            for (Eigen::Index c = 0; c < op.cols(); ++c) {
                if (op(r, c) == Complex{0.0, 0.0}) continue;
                Eigen::Index col = base;
                for (int t = 0; t < k; ++t)
                    col = set_qubit_bit(col, qubits[t], total, qubit_bit(c, t, k));
                full(row, col) = op(r, c);
            }
        }
    }
    return full;
}

// Apply an operator on a subset of qubits to a state without materializing
// the embedded matrix.
inline StateVector apply_on_qubits(const Matrix& op, const std::vector<int>& qubits,
                                   const StateVector& s) {
    const int total = s.qubits();
    const int k = static_cast<int>(qubits.size());
    require(op.rows() == (Eigen::Index{1} << k), "apply_on_qubits: size mismatch");
    Vector out = Vector::Zero(s.dim());
    const Eigen::Index sub = Eigen::Index{1} << k;
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        if (s.amps(i) == Complex{0.0, 0.0}) continue;
        Eigen::Index c = 0;
        for (int t = 0; t < k; ++t) c |= Eigen::Index{qubit_bit(i, qubits[t], total)} << (k - 1 - t);
        for (Eigen::Index r = 0; r < sub; ++r) {
            if (op(r, c) == Complex{0.0, 0.0}) continue;
            Eigen::Index j = i;
            for (int t = 0; t < k; ++t) j = set_qubit_bit(j, qubits[t], total, qubit_bit(r, t, k));
            out(j) += op(r, c) * s.amps(i);
        }
    }
    return StateVector{std::move(out)};
}

inline Complex expectation(const StateVector& s, const Matrix& full_op) {
    return s.amps.adjoint() * (full_op * s.amps);
}

// Partial trace keeping the listed qubits (ascending order in the result).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int total = rho.qubits();
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    require(std::adjacent_find(kept.begin(), kept.end()) == kept.end(),
            "partial_trace: duplicate qubit");
    for (int q : kept) require(q >= 0 && q < total, "partial_trace: qubit out of range");
    std::vector<int> traced;
    for (int q = 0; q < total; ++q)
        if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
    const int k = static_cast<int>(kept.size());
    const int t = static_cast<int>(traced.size());
    Matrix out = Matrix::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index e = 0; e < (Eigen::Index{1} << t); ++e) {
                Eigen::Index row = 0, col = 0;
                for (int i = 0; i < k; ++i) {
                    row = set_qubit_bit(row, kept[i], total, qubit_bit(r, i, k));
                    col = set_qubit_bit(col, kept[i], total, qubit_bit(c, i, k));
                }
                for (int i = 0; i < t; ++i) {
                    const int b = qubit_bit(e, i, t);
                    row = set_qubit_bit(row, traced[i], total, b);
                    col = set_qubit_bit(col, traced[i], total, b);
                }
                acc += rho.mat(row, col);
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix{std::move(out)};
}

// State-dependent norm ||A||_rho = sqrt(Tr(A* A rho)).  A may be
// rectangular; only its domain has to carry rho.
inline double rho_norm(const Matrix& a, const Matrix& rho) {
    require(rho.rows() == rho.cols() && a.cols() == rho.rows(), "rho_norm: size mismatch");
    const Complex t = (a.adjoint() * a * rho).trace();
    return std::sqrt(std::max(0.0, t.real()));
}

struct HermitianEig {
    RealVector values;  // ascending
    Matrix vectors;     // columns match values
};

inline HermitianEig hermitian_eig(const Matrix& m) {
    require(m.rows() == m.cols(), "hermitian_eig: matrix must be square");
    require((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10,
            "hermitian_eig: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    require(solver.info() == Eigen::Success, "hermitian_eig: eigensolver failed");
    return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

// Trace distance (1/2)||rho - sigma||_1.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require(rho.dim() == sigma.dim(), "trace_distance: size mismatch");
    const HermitianEig e = hermitian_eig(rho.mat - sigma.mat);
    return 0.5 * e.values.cwiseAbs().sum();
}

inline void validate_pvm(const std::vector<Matrix>& pvm, double tol = 1e-9) {
    require(!pvm.empty(), "PVM must have at least one element");
    const Eigen::Index d = pvm[0].rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& p : pvm) {
        require(p.rows() == d && p.cols() == d, "PVM element size mismatch");
        require((p - p.adjoint()).cwiseAbs().maxCoeff() <= tol, "PVM element not Hermitian");
        sum += p;
    }
    require((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol,
            "PVM does not sum to identity");
    for (std::size_t i = 0; i < pvm.size(); ++i)
        for (std::size_t j = i; j < pvm.size(); ++j) {
            const Matrix prod = pvm[i] * pvm[j];
            const Matrix want = (i == j) ? pvm[i] : Matrix::Zero(d, d);
            require((prod - want).cwiseAbs().maxCoeff() <= tol,
                    "PVM elements not orthogonal projectors");
        }
}

struct MeasureResult {
    int outcome = 0;
    StateVector post;
};

// Projective measurement in a full-dimension PVM.
inline MeasureResult born_measure(const StateVector& s, const std::vector<Matrix>& pvm,
                                  RandomStream& rng) {
    validate_pvm(pvm);
    require(pvm[0].rows() == s.dim(), "born_measure: PVM dimension mismatch");
    std::vector<double> probs;
    std::vector<Vector> posts;
    probs.reserve(pvm.size());
    for (const auto& p : pvm) {
        Vector v = p * s.amps;
        probs.push_back(v.squaredNorm());
        posts.push_back(std::move(v));
    }
    const int k = rng.pick(probs);
    Vector post = posts[static_cast<std::size_t>(k)];
    post /= std::sqrt(probs[static_cast<std::size_t>(k)]);
    return MeasureResult{k, StateVector{std::move(post)}};
}

// The four Bell states (sigma_X^alpha sigma_Z^beta tensor I)|Phi> on two
// qubits, |Phi> = (|00> + |11>)/sqrt(2); the correction operator acts on the
// first qubit of the pair.
inline StateVector bell_pair_state(int alpha, int beta) {
    Vector phi(4);
    phi << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    StateVector s{std::move(phi)};
    PauliString p = PauliString::identity(2);
    p.sites[0].x = static_cast<std::uint8_t>(alpha);
    p.sites[0].z = static_cast<std::uint8_t>(beta);
    // sigma_X^a sigma_Z^b as a single site product: exponents already encode it.
    return apply_pauli(p, s);
}

struct BellResult {
    int alpha = 0;
    int beta = 0;
    StateVector post;
};

// Bell measurement of the ordered qubit pair (q1, q2); q1 is the qubit whose
// side carries the correction keys (the measuring prover's EPR half), q2 the
// held register qubit.  After outcome (alpha, beta) the far half of q1's EPR
// pair holds sigma_X^alpha sigma_Z^beta rho sigma_Z^beta sigma_X^alpha.
inline BellResult bell_measure(const StateVector& s, int q1, int q2, RandomStream& rng) {
    const int total = s.qubits();
    require(q1 != q2 && q1 >= 0 && q2 >= 0 && q1 < total && q2 < total,
            "bell_measure: bad qubit pair");
    std::vector<double> probs;
    std::vector<Vector> posts;
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int beta = 0; beta < 2; ++beta) {
            const StateVector bell = bell_pair_state(alpha, beta);
            const Matrix proj = bell.amps * bell.amps.adjoint();
            StateVector v = apply_on_qubits(proj, {q1, q2}, s);
            probs.push_back(v.amps.squaredNorm());
            posts.push_back(std::move(v.amps));
        }
    const int k = rng.pick(probs);
    Vector post = posts[static_cast<std::size_t>(k)];
    post /= std::sqrt(probs[static_cast<std::size_t>(k)]);
    return BellResult{k >> 1, k & 1, StateVector{std::move(post)}};
}

// Undo teleportation keys on one qubit: applies sigma_X^alpha then
// sigma_Z^beta (the operator sigma_Z^beta sigma_X^alpha).
inline StateVector correct_keys(const StateVector& s, int qubit, int alpha, int beta) {
    PauliString p = PauliString::identity(s.qubits());
    StateVector out = s;
    if (alpha) {
        p.sites[static_cast<std::size_t>(qubit)] = SitePauli{1, 0};
        out = apply_pauli(p, out);
        p.sites[static_cast<std::size_t>(qubit)] = SitePauli{};
    }
    if (beta) {
        p.sites[static_cast<std::size_t>(qubit)] = SitePauli{0, 1};
        out = apply_pauli(p, out);
    }
    return out;
}

}  // namespace braidkit
