#pragma once

// The finite Weyl-Heisenberg group H(n) = <J, X_1..X_n, Z_1..Z_n | J central,
// J^2 = X_i^2 = Z_i^2 = 1, [X_i, Z_i] = J, cross-site generators commute>,
// its irreducible representations, Fourier transforms of unitary-valued
// functions, and the constructive rounding of approximate homomorphisms to
// exact representations.
//
// Elements are kept in the normal form J^alpha X^a Z^b with a, b in {0,1}^n;
// |H(n)| = 2^(2n+1).  Bit i of the masks corresponds to site i.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "braidkit/common.hpp"
#include "braidkit/qcore.hpp"

namespace braidkit {

struct GroupElement {
    int n = 1;
    unsigned alpha = 0;  // exponent of the central J
    unsigned xbits = 0;  // X support
    unsigned zbits = 0;  // Z support

    bool operator==(const GroupElement& o) const {
        return n == o.n && alpha == o.alpha && xbits == o.xbits && zbits == o.zbits;
    }
    bool is_identity() const { return alpha == 0 && xbits == 0 && zbits == 0; }
};

inline unsigned parity(unsigned v) { return static_cast<unsigned>(std::popcount(v)) & 1u; }

// Normal-form multiplication: moving Z^b past X^c costs (-1)^(b.c), i.e. a
// factor J^(b.c).
inline GroupElement multiply(const GroupElement& g, const GroupElement& h) {
    require(g.n == h.n, "group multiply: size mismatch");
    GroupElement r;
    r.n = g.n;
    r.alpha = (g.alpha ^ h.alpha ^ parity(g.zbits & h.xbits)) & 1u;
    r.xbits = g.xbits ^ h.xbits;
    r.zbits = g.zbits ^ h.zbits;
    return r;
}

inline GroupElement inverse(const GroupElement& g) {
    GroupElement r = g;
    r.alpha = (g.alpha ^ parity(g.xbits & g.zbits)) & 1u;
    return r;
}

inline GroupElement group_identity(int n) { return GroupElement{n, 0, 0, 0}; }

inline GroupElement group_j(int n) { return GroupElement{n, 1, 0, 0}; }

inline std::size_t group_order(int n) { return std::size_t{1} << (2 * n + 1); }

// Dense index of the normal form: alpha | xbits | zbits.
inline std::size_t encode(const GroupElement& g) {
    return (static_cast<std::size_t>(g.alpha) << (2 * g.n)) |
           (static_cast<std::size_t>(g.xbits) << g.n) | g.zbits;
}

inline GroupElement decode(int n, std::size_t index) {
    GroupElement g;
    g.n = n;
    g.zbits = static_cast<unsigned>(index & ((1u << n) - 1));
    g.xbits = static_cast<unsigned>((index >> n) & ((1u << n) - 1));
    g.alpha = static_cast<unsigned>((index >> (2 * n)) & 1u);
    return g;
}

inline std::vector<GroupElement> enumerate_group(int n) {
    require(n >= 1 && n <= 4, "enumerate_group: n must be in [1,4]");
    std::vector<GroupElement> out;
    out.reserve(group_order(n));
    for (std::size_t i = 0; i < group_order(n); ++i) out.push_back(decode(n, i));
    return out;
}

// The letter string W(a)-style Pauli of a group element: X on bit i of xbits,
// Z on zbits, XZ where both; sign (-1)^alpha.
inline PauliString group_pauli(const GroupElement& g) {
    PauliString p = PauliString::identity(g.n);
    p.sign = g.alpha ? -1 : 1;
    for (int i = 0; i < g.n; ++i) {
        p.sites[static_cast<std::size_t>(i)].x = static_cast<std::uint8_t>((g.xbits >> i) & 1u);
        p.sites[static_cast<std::size_t>(i)].z = static_cast<std::uint8_t>((g.zbits >> i) & 1u);
    }
    return p;
}

// The defining 2^n-dimensional representation sigma: J -> -1, X_i -> X on
// site i, Z_i -> Z on site i.
inline Matrix sigma_matrix(const GroupElement& g) { return pauli_to_matrix(group_pauli(g)); }

// Irreducible representations: 4^n one-dimensional characters chi_{u,v}
// (trivial on J) plus the single 2^n-dimensional representation sigma.
struct Irrep {
    bool is_sigma = false;
    unsigned u = 0;
    unsigned v = 0;
    int n = 1;

    Eigen::Index dim() const { return is_sigma ? (Eigen::Index{1} << n) : 1; }

    Matrix matrix(const GroupElement& g) const {
        require(g.n == n, "irrep: element size mismatch");
        if (is_sigma) return sigma_matrix(g);
        Matrix m(1, 1);
        m(0, 0) = (parity(u & g.xbits) ^ parity(v & g.zbits)) ? -1.0 : 1.0;
        return m;
    }

    std::string label() const {
        if (is_sigma) return "sigma";
        return "chi(" + std::to_string(u) + "," + std::to_string(v) + ")";
    }
};

inline std::vector<Irrep> irr_set(int n) {
    std::vector<Irrep> out;
    for (unsigned u = 0; u < (1u << n); ++u)
        for (unsigned v = 0; v < (1u << n); ++v) out.push_back(Irrep{false, u, v, n});
    out.push_back(Irrep{true, 0, 0, n});
    return out;
}

// Unitary-valued function on H(n), tabulated in encode() order.
struct GroupFunction {
    int n = 1;
    Eigen::Index dim_h = 1;
    std::vector<Matrix> table;

    const Matrix& at(const GroupElement& g) const { return table[encode(g)]; }
};

inline GroupFunction make_group_function(int n, Eigen::Index dim_h,
                                          const std::function<Matrix(const GroupElement&)>& fn) {
    GroupFunction f;
    f.n = n;
    f.dim_h = dim_h;
    f.table.resize(group_order(n));
    for (const auto& g : enumerate_group(n)) {
        Matrix m = fn(g);
        require(m.rows() == dim_h && m.cols() == dim_h, "group function: value size mismatch");
        f.table[encode(g)] = std::move(m);
    }
    return f;
}

inline void validate_group_function(const GroupFunction& f, double tol = 1e-10) {
    const Matrix id = Matrix::Identity(f.dim_h, f.dim_h);
    require((f.at(group_identity(f.n)) - id).cwiseAbs().maxCoeff() <= tol,
            "group function: f(1) != I");
    for (const auto& g : enumerate_group(f.n)) {
        const Matrix& m = f.at(g);
        require((m * m.adjoint() - id).cwiseAbs().maxCoeff() <= tol,
                "group function: value not unitary");
        require((f.at(inverse(g)) - m.adjoint()).cwiseAbs().maxCoeff() <= tol,
                "group function: f(g^-1) != f(g)*");
    }
}

inline GroupFunction sigma_function(int n) {
    return make_group_function(n, Eigen::Index{1} << n,
                               [](const GroupElement& g) { return sigma_matrix(g); });
}

// Fourier coefficient fhat(phi) = (1/|G|) sum_g f(g) (x) conj(phi(g)),
// acting on H (x) C^{d_phi}.
inline Matrix fourier_transform(const GroupFunction& f, const Irrep& phi) {
    require(f.n == phi.n, "fourier_transform: size mismatch");
    const Eigen::Index d = f.dim_h * phi.dim();
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& g : enumerate_group(f.n))
        acc += Eigen::kroneckerProduct(f.at(g), phi.matrix(g).conjugate()).eval();
    return acc / static_cast<double>(group_order(f.n));
}

// max_g (1/|G|) sum_h ||f(g) f(h) - f(gh)||_rho^2.
inline double homomorphism_defect(const GroupFunction& f, const Matrix& rho) {
    validate_group_function(f);
    require(rho.rows() == f.dim_h && rho.cols() == f.dim_h, "defect: rho size mismatch");
    const auto elems = enumerate_group(f.n);
    double worst = 0.0;
    for (const auto& g : elems) {
        double acc = 0.0;
        for (const auto& h : elems) {
            const double r = rho_norm(f.at(g) * f.at(h) - f.at(multiply(g, h)), rho);
            acc += r * r;
        }
        worst = std::max(worst, acc / static_cast<double>(elems.size()));
    }
    return worst;
}

inline std::vector<GroupElement> subgroup_j(int n) {
    return {group_identity(n), group_j(n)};
}

struct RoundingResult {
    Matrix isometry;                     // V : H -> K
    std::vector<Irrep> retained;         // Irr(G, f|_S)
    std::vector<std::string> retained_labels;
    std::vector<double> residuals;       // ||V f(g) - phi(g) V||_rho^2, encode() order
    double max_residual = 0.0;
    double defect = 0.0;                 // homomorphism defect of f under rho
    double isometry_error = 0.0;         // max |(V*V - I)_{ij}|
};

// The exact representation on K = sum_phi C^{d_phi} (x) H (x) C^{d_phi}
// paired with a RoundingResult.
inline Matrix rounded_rep(const RoundingResult& r, Eigen::Index dim_h, const GroupElement& g) {
    std::vector<Matrix> blocks;
    Eigen::Index total = 0;
    for (const auto& phi : r.retained) {
        const Eigen::Index block = phi.dim() * dim_h * phi.dim();
        blocks.push_back(Eigen::kroneckerProduct(phi.matrix(g),
                                                 Matrix::Identity(dim_h * phi.dim(),
                                                                  dim_h * phi.dim()))
                             .eval());
        total += block;
    }
    Matrix out = Matrix::Zero(total, total);
    Eigen::Index off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.rows(), b.cols()) = b;
        off += b.rows();
    }
    return out;
}

// Round an approximate homomorphism that is exactly multiplicative on a
// central subgroup S to an exact representation, keeping only the irreps
// whose restriction to S survives in f|_S.  Returns the isometry V, the
// retained irreps and per-element residuals.
inline RoundingResult gowers_hatami_round(const GroupFunction& f, const Matrix& rho,
                                          const std::vector<GroupElement>& subgroup) {
    require(f.n <= 2, "gowers_hatami_round: n must be at most 2");
    validate_group_function(f);
    require(rho.rows() == f.dim_h && rho.cols() == f.dim_h, "rounding: rho size mismatch");

    // Subgroup sanity: contains the identity and is closed.
    bool has_id = false;
    for (const auto& s : subgroup) has_id = has_id || s.is_identity();
    require(has_id, "rounding: subgroup must contain the identity");
    for (const auto& s : subgroup)
        for (const auto& t : subgroup) {
            const GroupElement st = multiply(s, t);
            bool found = false;
            for (const auto& u : subgroup) found = found || (u == st);
            require(found, "rounding: subgroup is not closed");
        }

    // f must restrict to an exact representation interaction with S:
    // f(s g) = f(s) f(g) for all s in S, g in G.
    for (const auto& s : subgroup)
        for (const auto& g : enumerate_group(f.n)) {
            const Matrix lhs = f.at(multiply(s, g));
            const Matrix rhs = f.at(s) * f.at(g);
            require((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10,
                    "rounding: f is not multiplicative on the subgroup");
        }

    // Retained irreps: those with nonzero Fourier mass of f restricted to S.
    RoundingResult out;
    const double subgroup_size = static_cast<double>(subgroup.size());
    std::vector<Matrix> fhat;
    for (const auto& phi : irr_set(f.n)) {
        Matrix restricted = Matrix::Zero(f.dim_h * phi.dim(), f.dim_h * phi.dim());
        for (const auto& s : subgroup)
            restricted += Eigen::kroneckerProduct(f.at(s), phi.matrix(s).conjugate()).eval();
        restricted /= subgroup_size;
        if (restricted.norm() > 1e-9) {
            out.retained.push_back(phi);
            out.retained_labels.push_back(phi.label());
            fhat.push_back(fourier_transform(f, phi));
        }
    }
    require(!out.retained.empty(), "rounding: every Fourier coefficient vanished");

    // Assemble V block by block: within the block of phi, row (i, h, j) and
    // column v carry sqrt(d_phi) * fhat(phi)[(h, j), (v, i)].
    Eigen::Index dim_k = 0;
    for (const auto& phi : out.retained) dim_k += phi.dim() * f.dim_h * phi.dim();
    Matrix v = Matrix::Zero(dim_k, f.dim_h);
    Eigen::Index off = 0;
    for (std::size_t b = 0; b < out.retained.size(); ++b) {
        const Eigen::Index d = out.retained[b].dim();
        const double scale = std::sqrt(static_cast<double>(d));
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index h = 0; h < f.dim_h; ++h)
                for (Eigen::Index j = 0; j < d; ++j)
                    for (Eigen::Index col = 0; col < f.dim_h; ++col)
                        v(off + i * f.dim_h * d + h * d + j, col) =
                            scale * fhat[b](h * d + j, col * d + i);
        off += d * f.dim_h * d;
    }
    out.isometry = v;
    out.isometry_error =
        (v.adjoint() * v - Matrix::Identity(f.dim_h, f.dim_h)).cwiseAbs().maxCoeff();

    out.defect = homomorphism_defect(f, rho);
    out.residuals.resize(group_order(f.n));
    for (const auto& g : enumerate_group(f.n)) {
        const Matrix rep = rounded_rep(out, f.dim_h, g);
        const double r = rho_norm(v * f.at(g) - rep * v, rho);
        out.residuals[encode(g)] = r * r;
        out.max_residual = std::max(out.max_residual, r * r);
    }
    return out;
}

// Package single-site observables tau_X(e_i), tau_Z(e_i) into a function on
// H(n): f(J^a X^a Z^b) = (-1)^alpha prod_i tau_X(e_i)^{a_i} prod_j
// tau_Z(e_j)^{b_j}, factors in ascending site order.
inline GroupFunction strategy_to_group_function(int n, const std::vector<Matrix>& tau_x,
                                                const std::vector<Matrix>& tau_z) {
    require(static_cast<int>(tau_x.size()) == n && static_cast<int>(tau_z.size()) == n,
            "strategy_to_group_function: need one observable per site");
    const Eigen::Index d = tau_x[0].rows();
    const Matrix id = Matrix::Identity(d, d);
    for (const auto& m : {tau_x, tau_z})
        for (const auto& t : m) {
            require(t.rows() == d && t.cols() == d, "observable size mismatch");
            require((t - t.adjoint()).cwiseAbs().maxCoeff() <= 1e-10, "observable not Hermitian");
            require((t * t - id).cwiseAbs().maxCoeff() <= 1e-10, "observable not an involution");
        }
    return make_group_function(n, d, [&](const GroupElement& g) {
        Matrix m = id;
        for (int i = 0; i < n; ++i)
            if ((g.xbits >> i) & 1u) m = (m * tau_x[static_cast<std::size_t>(i)]).eval();
        for (int i = 0; i < n; ++i)
            if ((g.zbits >> i) & 1u) m = (m * tau_z[static_cast<std::size_t>(i)]).eval();
        if (g.alpha) m = -m;
        return m;
    });
}

inline Matrix random_hermitian(Eigen::Index d, RandomStream& rng) {
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = Complex{rng.gaussian(), rng.gaussian()};
    return 0.5 * (m + m.adjoint()).eval();
}

inline Matrix hermitian_exp_i(const Matrix& h) {
    const HermitianEig e = hermitian_eig(h);
    Vector phases(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        phases(i) = std::exp(kI * e.values(i));
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

// Random perturbation of sigma with tunable defect.  Each <J>-coset picks a
// Hermitian direction anti-adapted to sigma(g) (so f(g^-1) = f(g)* holds
// exactly) and multiplies sigma(g) by e^{i eps H_g}; the perturbation is
// shared across the coset, keeping f(J g) = -f(g) exact.
inline GroupFunction perturbed_sigma(int n, double eps, RandomStream& rng) {
    const Eigen::Index d = Eigen::Index{1} << n;
    std::vector<Matrix> table(group_order(n));
    table[encode(group_identity(n))] = Matrix::Identity(d, d);
    table[encode(group_j(n))] = -Matrix::Identity(d, d);
    for (std::size_t idx = 0; idx < group_order(n) / 2; ++idx) {
        const GroupElement g = decode(n, idx);  // alpha = 0 coset representatives
        if (g.is_identity()) continue;
        const Matrix s = sigma_matrix(g);
        const Matrix s_inv = s.adjoint();
        Matrix h;
        double norm = 0.0;
        do {
            const Matrix k = random_hermitian(d, rng);
            h = 0.5 * (k - s_inv * k * s).eval();
            norm = hermitian_eig(h).values.cwiseAbs().maxCoeff();
        } while (norm < 1e-8);
        h /= norm;
        const Matrix value = hermitian_exp_i(eps * h) * s;
        table[idx] = value;
        table[encode(multiply(group_j(n), g))] = -value;
    }
    GroupFunction f;
    f.n = n;
    f.dim_h = d;
    f.table = std::move(table);
    return f;
}

}  // namespace braidkit
