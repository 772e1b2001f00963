#pragma once

// The proof-system layer on top of the games: the energy test for XZ
// Hamiltonians, the mixed Hamiltonian game, honest teleportation strategies,
// repetition arithmetic, Monte Carlo protocol runs, the off-the-shelf device
// menu, and the zero-knowledge simulator audit.

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "braidkit/common.hpp"
#include "braidkit/games.hpp"
#include "braidkit/hamiltonian.hpp"
#include "braidkit/qcore.hpp"

namespace braidkit {

// ---------------------------------------------------------------------------
// Energy test.
//
// Alice receives a term's letter string and reports the +-1 outcome c (bit 0
// means +1).  Bob receives "energy", Bell-measures every (EPR half, held)
// pair and reports keys packed as [a_0..a_{n-1} b_0..b_{n-1}], site 0 most
// significant, where a_i is pair i's Z key and b_i its X key.  The verifier
// forms d_i = (-1)^{a_i} on X sites and (-1)^{b_i} on Z sites of the term,
// rejects with probability |gamma| when c * prod_i d_i matches gamma's sign,
// and always accepts otherwise.

inline int energy_key_a(int answer, int n, int site) { return (answer >> (2 * n - 1 - site)) & 1; }
inline int energy_key_b(int answer, int n, int site) { return (answer >> (n - 1 - site)) & 1; }

inline Game energy_test_game(const XZHamiltonian& h) {
    validate_xz_hamiltonian(h);
    const int n = h.n;
    require(n <= 12, "energy_test_game: n too large");
    GameBuilder b("energy(n=" + std::to_string(n) + ")");
    const int y = b.bob("energy", 1 << (2 * n));
    const double w = 1.0 / static_cast<double>(h.terms.size());
    for (const auto& term : h.terms) {
        const int x = b.alice(term.letters, 2);
        const double gamma = term.gamma;
        const std::string letters = term.letters;
        b.round(x, y, w, [n, gamma, letters](int a, int bb) {
            int prod = a == 0 ? 1 : -1;
            for (int i = 0; i < n; ++i) {
                const char l = letters[static_cast<std::size_t>(i)];
                if (l == 'I') continue;
                const int key = l == 'X' ? energy_key_a(bb, n, i) : energy_key_b(bb, n, i);
                if (key) prod = -prod;
            }
            const int gsign = gamma > 0 ? 1 : -1;
            return prod != gsign ? 1.0 : 1.0 - std::abs(gamma);
        });
    }
    return b.build();
}

// Expanded verdict for one energy-test round, for displays and cross-checks.
struct EnergyRoundExplanation {
    int term_index = 0;
    std::string letters;
    double gamma = 0.0;
    int c = 1;                      // Alice's reported outcome, +-1
    std::vector<int> key_a, key_b;  // Bob's keys per site
    std::vector<int> d;             // verifier factors per site
    int product = 1;                // c * prod d
    int gamma_sign = 1;
    double accept_prob = 1.0;
};

inline EnergyRoundExplanation explain_energy_round(const XZHamiltonian& h, int term_index,
                                                   int alice_bit, int bob_answer) {
    validate_xz_hamiltonian(h);
    require(term_index >= 0 && term_index < h.term_count(), "explain: bad term index");
    const auto& term = h.terms[static_cast<std::size_t>(term_index)];
    const int n = h.n;
    EnergyRoundExplanation e;
    e.term_index = term_index;
    e.letters = term.letters;
    e.gamma = term.gamma;
    e.c = alice_bit == 0 ? 1 : -1;
    e.product = e.c;
    for (int i = 0; i < n; ++i) {
        e.key_a.push_back(energy_key_a(bob_answer, n, i));
        e.key_b.push_back(energy_key_b(bob_answer, n, i));
        const char l = term.letters[static_cast<std::size_t>(i)];
        int d = 1;
        if (l == 'X' && e.key_a.back()) d = -1;
        if (l == 'Z' && e.key_b.back()) d = -1;
        e.d.push_back(l == 'I' ? 1 : d);
        e.product *= e.d.back();
    }
    e.gamma_sign = term.gamma > 0 ? 1 : -1;
    e.accept_prob = e.product != e.gamma_sign ? 1.0 : 1.0 - std::abs(term.gamma);
    return e;
}

// ---------------------------------------------------------------------------
// Hamiltonian game and honest strategies.

inline double default_p(int n, double gap, double c_lw = 1.0) {
    require(n >= 1, "default_p: n must be positive");
    require(gap > 0.0 && c_lw > 0.0, "default_p: gap and c_lw must be positive");
    return 32.0 * std::pow(static_cast<double>(n), -6.0) * std::pow(gap, 24.0) /
           (27.0 * std::pow(c_lw + 1.0, 4.0));
}

// (1 - p) low-weight Pauli braiding test + p energy test.  At n = 1 the
// braiding part degenerates to the linearity test alone.
inline Game hamiltonian_game(const XZHamiltonian& h, double p, int cap = 6) {
    require(p > 0.0 && p < 1.0, "hamiltonian_game: p must be in (0,1)");
    Game lw = h.n >= 2 ? lwpbt(h.n, cap) : lw_linearity_test(1, cap);
    return mix_games({{std::move(lw), 1.0 - p}, {energy_test_game(h), p}},
                     "G(n=" + std::to_string(h.n) + ",p=" + std::to_string(p) + ")");
}

// Honest strategy: n EPR pairs shared with Alice, Bob additionally holds the
// given n-qubit state.  Pauli questions are answered on the EPR halves as in
// the canonical braiding strategy; "energy" teleports the held state to
// Alice by Bell-measuring the (EPR half, held) pairs.
inline Strategy honest_strategy(const XZHamiltonian& h, const Vector& held, int cap = 6) {
    validate_xz_hamiltonian(h);
    const int n = h.n;
    require(held.size() == (Eigen::Index{1} << n), "honest_strategy: held state dimension");
    require(std::abs(held.squaredNorm() - 1.0) <= 1e-9, "honest_strategy: held state norm");
    Strategy lw = canonical_lw_strategy(n, cap);
    Strategy s;
    s.state = kron_states(epr_state(n), StateVector{held});
    s.alice_qubits = n;
    s.bob_dense_qubits = n;
    s.alice_pvms = std::move(lw.alice_pvms);
    s.bob_pvms = std::move(lw.bob_pvms);
    s.bob_bell_questions.insert("energy");
    return s;
}

inline Strategy honest_strategy(const XZHamiltonian& h, int cap = 6) {
    return honest_strategy(h, ground_state(h), cap);
}

// Value of the honest strategy holding `held`:
// 1 - p [ (1/2m) sum |gamma_l| + (1/2) <held| H |held> ].
inline double semi_honest_value(const XZHamiltonian& h, double p, const Vector& held) {
    validate_xz_hamiltonian(h);
    require(p > 0.0 && p < 1.0, "semi_honest_value: p must be in (0,1)");
    double abs_sum = 0.0;
    for (const auto& t : h.terms) abs_sum += std::abs(t.gamma);
    const double m = static_cast<double>(h.terms.size());
    const Complex energy = (held.adjoint() * hamiltonian_matrix(h) * held)(0);
    return 1.0 - p * (abs_sum / (2.0 * m) + 0.5 * energy.real());
}

inline double semi_honest_value(const XZHamiltonian& h, double p) {
    return semi_honest_value(h, p, ground_state(h));
}

// ---------------------------------------------------------------------------
// Anchoring and repetition.

// With probability 1/2 play the game, otherwise send the dummy question
// "bot" to both provers and accept; omega -> 1 - (1 - omega) / 2.
inline Game anchor_game(const Game& g) {
    GameBuilder b(g.name + "+anchor");
    for (const auto& q : g.alice_questions) b.alice(q.label, q.arity);
    for (const auto& q : g.bob_questions) b.bob(q.label, q.arity);
    auto base = std::make_shared<Game>(g);
    for (const auto& e : base->distribution) {
        const int ox = e.x, oy = e.y;
        b.round(e.x, e.y, 0.5 * e.weight,
                [base, ox, oy](int a, int bb) { return base->accept(ox, oy, a, bb); });
    }
    const int xb = b.alice("bot", 1);
    const int yb = b.bob("bot", 1);
    b.round(xb, yb, 0.5, [](int, int) { return 1.0; });
    return b.build();
}

inline Strategy anchor_strategy(const Strategy& s) {
    Strategy out = s;
    const Eigen::Index da = Eigen::Index{1} << s.alice_qubits;
    const Eigen::Index db = Eigen::Index{1} << s.bob_dense_qubits;
    out.alice_pvms["bot"] = {Matrix::Identity(da, da)};
    out.bob_pvms["bot"] = {Matrix::Identity(db, db)};
    return out;
}

struct RepetitionParams {
    double gamma = 0.0;
    double rounds = 0.0;     // m
    double threshold = 0.0;  // accept iff wins >= threshold
};

// eps_alpha: no-instance value gap, eps_beta: yes-instance value gap
// (eps_alpha > eps_beta).  The anchored per-round means 1 - eps_beta/2 and
// <= 1 - eps_alpha/2 are separated by 2 gamma; the threshold sits gamma
// below the yes mean.
inline RepetitionParams repetition_params(double eps_alpha, double eps_beta, double big_c) {
    require(eps_beta >= 0.0 && eps_alpha > eps_beta && eps_alpha <= 1.0,
            "repetition_params: need 0 <= eps_beta < eps_alpha <= 1");
    require(big_c > 0.0, "repetition_params: C must be positive");
    RepetitionParams r;
    r.gamma = (eps_alpha - eps_beta) / 4.0;
    r.rounds = std::ceil(std::max(4.0 / (r.gamma * r.gamma),
                                  2.0 * big_c / std::pow(r.gamma, 9.0)));
    r.threshold = (1.0 - eps_alpha / 2.0 + r.gamma) * r.rounds;
    return r;
}

// P(Bin(rounds, p) <= k), continued-fraction exact via the regularized
// incomplete beta function; valid for huge round counts.
inline double binomial_cdf(double rounds, double p, double k) {
    require(rounds >= 1.0, "binomial_cdf: rounds must be positive");
    if (k < 0.0) return 0.0;
    if (k >= rounds) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return boost::math::ibeta(rounds - k, k + 1.0, 1.0 - p);
}

// P(Bin(rounds, win_prob) >= threshold).
inline double threshold_accept_prob(double rounds, double win_prob, double threshold) {
    require(rounds >= 1.0, "threshold_accept_prob: rounds must be positive");
    require(win_prob >= -1e-12 && win_prob <= 1.0 + 1e-12, "threshold_accept_prob: bad win prob");
    const double p = std::clamp(win_prob, 0.0, 1.0);
    if (threshold <= 0.0) return 1.0;
    if (threshold > rounds) return 0.0;
    const double k = std::ceil(threshold - 1e-9) - 1.0;  // accept iff wins > k
    return 1.0 - binomial_cdf(rounds, p, k);
}

// ---------------------------------------------------------------------------
// Monte Carlo protocol runs.

struct McRound {
    std::string x, y;
    int a = 0, b = 0;
    double accept_prob = 0.0;
    bool accepted = false;
};

struct McResult {
    long long rounds = 0;
    long long accepted = 0;
    double frequency = 0.0;
    std::vector<McRound> transcript;  // first rounds only
};

namespace detail {

inline int sample_pvm_outcome(const std::vector<Matrix>& pvm, const std::vector<int>& qubits,
                              StateVector& state, RandomStream& rng) {
    std::vector<double> probs;
    std::vector<StateVector> posts;
    for (const auto& e : pvm) {
        posts.push_back(apply_on_qubits(e, qubits, state));
        probs.push_back(posts.back().amps.squaredNorm());
    }
    const int k = rng.pick(probs);
    state = std::move(posts[static_cast<std::size_t>(k)]);
    state.amps /= std::sqrt(std::max(state.amps.squaredNorm(), 1e-300));
    return k;
}

}  // namespace detail

inline McResult run_protocol(const Game& g, const Strategy& s, long long rounds,
                             std::uint64_t seed, int transcript_limit = 16) {
    validate_game(g);
    validate_strategy(g, s);
    RandomStream rng(seed);
    std::vector<double> weights;
    for (const auto& e : g.distribution) weights.push_back(e.weight);
    const std::vector<int> aq = alice_qubit_list(s);
    const std::vector<int> bq = bob_dense_qubit_list(s);
    const int pairs = s.bob_qubits() / 2;
    McResult res;
    res.rounds = rounds;
    for (long long r = 0; r < rounds; ++r) {
        const auto& entry = g.distribution[static_cast<std::size_t>(rng.pick(weights))];
        const auto& xq = g.alice_questions[static_cast<std::size_t>(entry.x)];
        const auto& yq = g.bob_questions[static_cast<std::size_t>(entry.y)];
        StateVector state = s.state;
        const int a = detail::sample_pvm_outcome(s.alice_pvms.at(xq.label), aq, state, rng);
        int b = 0;
        if (s.bob_bell_questions.count(yq.label)) {
            for (int i = 0; i < pairs; ++i) {
                const BellResult br =
                    bell_measure(state, s.alice_qubits + i, s.alice_qubits + pairs + i, rng);
                state = br.post;
                const int shift = pairs - 1 - i;
                b |= br.beta << (pairs + shift);
                b |= br.alpha << shift;
            }
        } else {
            b = detail::sample_pvm_outcome(s.bob_pvms.at(yq.label), bq, state, rng);
        }
        const double acc = g.accept(entry.x, entry.y, a, b);
        const bool ok = rng.bernoulli(acc);
        if (ok) ++res.accepted;
        if (static_cast<int>(res.transcript.size()) < transcript_limit)
            res.transcript.push_back(McRound{xq.label, yq.label, a, b, acc, ok});
    }
    res.frequency = static_cast<double>(res.accepted) / static_cast<double>(rounds);
    return res;
}

// ---------------------------------------------------------------------------
// EPR spectral probe: the uniform average of P (x) P over single-site
// X^a Z^b equals the mean of the per-pair EPR projectors, with top eigenvalue
// 1 (the n-pair EPR state) and second eigenvalue (n-1)/n.

inline Matrix epr_probe_operator(int n) {
    require(n >= 1 && n <= 4, "epr_probe_operator: n out of range");
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    Matrix sum = Matrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 2; ++a)
            for (int bq = 0; bq < 2; ++bq) {
                PauliString p = PauliString::identity(2 * n);
                const SitePauli site{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(bq)};
                p.sites[static_cast<std::size_t>(i)] = site;
                p.sites[static_cast<std::size_t>(n + i)] = site;
                sum += pauli_to_matrix(p);
            }
    return sum / (4.0 * n);
}

struct EprSpectralSummary {
    double top = 0.0;
    double second = 0.0;
    double epr_overlap = 0.0;  // |<EPR^n | top eigenvector>|
};

inline EprSpectralSummary epr_spectral_summary(int n) {
    const HermitianEig eig = hermitian_eig(epr_probe_operator(n));
    const Eigen::Index last = eig.values.size() - 1;
    EprSpectralSummary s;
    s.top = eig.values(last);
    s.second = eig.values(last - 1);
    s.epr_overlap = std::abs((epr_state(n).amps.adjoint() * eig.vectors.col(last))(0));
    return s;
}

// ---------------------------------------------------------------------------
// Off-the-shelf device: n EPR pairs plus a fixed measurement menu (all I/X/Z
// strings of weight at most 6 and the two-site anti-commutation observables).
// The menu is kept as labels; PVMs materialize on demand.

struct OtsDevice {
    int n = 1;
    StateVector state;
    std::vector<std::string> menu;
};

inline OtsDevice ots_device(int n) {
    require(n >= 1 && n <= 7, "ots_device: n out of range");
    OtsDevice d;
    d.n = n;
    d.state = epr_state(n);
    std::set<std::string> strings;
    for (unsigned a : low_weight_supports(n, 6))
        for (unsigned w = 0; w < (1u << n); ++w) strings.insert(delivered_string(n, w, a));
    for (const auto& s : strings) d.menu.push_back(s);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            d.menu.push_back("v9@" + std::to_string(i) + "," + std::to_string(j));
    return d;
}

inline std::vector<Matrix> menu_pvm(const OtsDevice& d, const std::string& label) {
    if (label.rfind("v9@", 0) == 0) {
        const auto comma = label.find(',');
        const int i = std::stoi(label.substr(3, comma - 3));
        const int j = std::stoi(label.substr(comma + 1));
        require(i >= 0 && j > i && j < d.n, "menu_pvm: bad v9 sites");
        return observable_pvm(embed_operator(ms_observable(8), {i, j}, d.n));
    }
    require(static_cast<int>(label.size()) == d.n, "menu_pvm: bad label length");
    return observable_pvm(pauli_to_matrix(PauliString::from_letters(label)));
}

struct ImplementabilityReport {
    bool ok = true;
    std::string reason = "ok";
};

// A strategy is device-implementable when Alice's side is exactly the
// device's n qubits, each of her measurements is a menu measurement, and the
// shared state restricted to (Alice, Bob's first n qubits) is the device's
// EPR block.
inline ImplementabilityReport implementable(const OtsDevice& d, const Strategy& s) {
    if (s.alice_qubits != d.n)
        return {false, "alice register is not the device's n qubits"};
    if (s.bob_qubits() < d.n)
        return {false, "bob register is smaller than the device's n qubits"};
    std::set<std::string> menu(d.menu.begin(), d.menu.end());
    for (const auto& [label, pvm] : s.alice_pvms) {
        if (!menu.count(label)) return {false, "alice measurement off the menu: " + label};
        const auto want = menu_pvm(d, label);
        if (want.size() != pvm.size()) return {false, "menu arity mismatch: " + label};
        for (std::size_t k = 0; k < pvm.size(); ++k)
            if ((want[k] - pvm[k]).norm() > 1e-9)
                return {false, "alice measurement differs from the menu: " + label};
    }
    // <EPR| rho_{first 2n} |EPR> = || (<EPR| (x) I_rest) |psi> ||^2, contracted
    // directly so the reduced density never materializes.
    const int rest = s.state.qubits() - 2 * d.n;
    const Eigen::Index rest_dim = Eigen::Index{1} << rest;
    double fid = 0.0;
    for (Eigen::Index j = 0; j < rest_dim; ++j) {
        Complex overlap = 0.0;
        for (Eigen::Index a = 0; a < (Eigen::Index{1} << d.n); ++a) {
            const Eigen::Index front = (a << d.n) | a;
            overlap += std::conj(d.state.amps(front)) * s.state.amps((front << rest) | j);
        }
        fid += std::norm(overlap);
    }
    if (fid < 1.0 - 1e-9)
        return {false, "shared state is not the device EPR block"};
    return {true, "ok"};
}

// ---------------------------------------------------------------------------
// Zero-knowledge simulator audit.
//
// An adversary policy is a malicious verifier that queries one prover, sees
// the answer, then queries the other.  view_distribution computes the exact
// transcript distribution against a strategy; zk_simulator reproduces it
// from witness-independent data (the EPR block) plus few-qubit reductions of
// the history state, never touching the full held state.

struct AdversaryPolicy {
    std::string name;
    bool alice_first = true;
    std::vector<std::pair<std::string, double>> first_choices;
    std::function<std::vector<std::pair<std::string, double>>(const std::string&, int)> respond;
};

using ViewDist = std::map<std::string, double>;

inline std::string view_key(const std::string& q1, int a1, const std::string& q2, int a2) {
    return "q1=" + q1 + ";a1=" + std::to_string(a1) + ";q2=" + q2 + ";a2=" + std::to_string(a2);
}

inline double statistical_distance(const ViewDist& p, const ViewDist& q) {
    double sum = 0.0;
    for (const auto& [k, v] : p) {
        const auto it = q.find(k);
        sum += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : q)
        if (!p.count(k)) sum += std::abs(v);
    return 0.5 * sum;
}

namespace detail {

inline void bell_branches(const StateVector& s, int alice_qubits, int pairs, int pair,
                          unsigned zkeys, unsigned xkeys,
                          std::vector<std::pair<int, StateVector>>& out) {
    if (pair == pairs) {
        out.emplace_back(static_cast<int>((zkeys << pairs) | xkeys), s);
        return;
    }
    const int q1 = alice_qubits + pair;
    const int q2 = alice_qubits + pairs + pair;
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int beta = 0; beta < 2; ++beta) {
            const StateVector bell = bell_pair_state(alpha, beta);
            const Matrix proj = bell.amps * bell.amps.adjoint();
            StateVector branch = apply_on_qubits(proj, {q1, q2}, s);
            const int shift = pairs - 1 - pair;
            bell_branches(branch, alice_qubits, pairs, pair + 1,
                          zkeys | (static_cast<unsigned>(beta) << shift),
                          xkeys | (static_cast<unsigned>(alpha) << shift), out);
        }
}

}  // namespace detail

// All measurement branches (answer, unnormalized post state) of one prover's
// question on the given (possibly already projected) state.
inline std::vector<std::pair<int, StateVector>> measure_branches(const Strategy& s,
                                                                 bool on_alice,
                                                                 const std::string& label,
                                                                 const StateVector& state) {
    std::vector<std::pair<int, StateVector>> out;
    if (!on_alice && s.bob_bell_questions.count(label)) {
        detail::bell_branches(state, s.alice_qubits, s.bob_qubits() / 2, 0, 0, 0, out);
        return out;
    }
    const auto& pvm = on_alice ? s.alice_pvms.at(label) : s.bob_pvms.at(label);
    const auto qubits = on_alice ? alice_qubit_list(s) : bob_dense_qubit_list(s);
    for (std::size_t k = 0; k < pvm.size(); ++k)
        out.emplace_back(static_cast<int>(k), apply_on_qubits(pvm[k], qubits, state));
    return out;
}

// Exact transcript distribution of a two-step adaptive interrogation.
inline ViewDist view_distribution(const Strategy& s, const AdversaryPolicy& pol) {
    ViewDist view;
    for (const auto& [q1, w1] : pol.first_choices) {
        const auto branches = measure_branches(s, pol.alice_first, q1, s.state);
        for (const auto& [a1, post] : branches) {
            if (post.amps.squaredNorm() < 1e-300) continue;
            for (const auto& [q2, w2] : pol.respond(q1, a1)) {
                const auto second = measure_branches(s, !pol.alice_first, q2, post);
                for (const auto& [a2, post2] : second) {
                    const double p = post2.amps.squaredNorm();
                    if (p > 0.0) view[view_key(q1, a1, q2, a2)] += w1 * w2 * p;
                }
            }
        }
    }
    return view;
}

// An Alice menu observable as (support sites, dense operator on them).
struct SiteObservable {
    std::vector<int> sites;
    Matrix op;  // 2^{|sites|}, identity when sites is empty
};

inline SiteObservable parse_site_observable(const std::string& label, int n) {
    SiteObservable o;
    if (label.rfind("v9@", 0) == 0) {
        const auto comma = label.find(',');
        const int i = std::stoi(label.substr(3, comma - 3));
        const int j = std::stoi(label.substr(comma + 1));
        require(i >= 0 && i < j && j < n, "parse_site_observable: bad v9 sites");
        o.sites = {i, j};
        o.op = ms_observable(8);
        return o;
    }
    require(static_cast<int>(label.size()) == n, "parse_site_observable: bad label");
    o.op = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        const char l = label[static_cast<std::size_t>(i)];
        if (l == 'I') continue;
        o.sites.push_back(i);
        PauliString p = PauliString::from_letters(std::string(1, l));
        o.op = detail::kron(o.op, pauli_to_matrix(p));
    }
    return o;
}

namespace detail {

// Bob-first-energy branch: keys are uniform and Alice's conditional state on
// the observable's support is the key-corrected local reduction.
inline void simulate_energy_first(const Circuit& c, const Matrix& witness_density,
                                  const AdversaryPolicy& pol, double w1, ViewDist& view) {
    const int n = clock_total_qubits(c);
    const double key_prob = std::pow(0.25, n);
    for (int key = 0; key < (1 << (2 * n)); ++key) {
        for (const auto& [q2, w2] : pol.respond("energy", key)) {
            const SiteObservable obs = parse_site_observable(q2, n);
            double mean = 1.0;
            if (!obs.sites.empty()) {
                const Matrix local = local_density(c, witness_density, obs.sites);
                Matrix corr = Matrix::Identity(1, 1);
                for (int site : obs.sites) {
                    PauliString p = PauliString::identity(1);
                    p.sites[0].x = energy_key_b(key, n, site);  // X key
                    p.sites[0].z = energy_key_a(key, n, site);  // Z key
                    corr = kron(corr, pauli_to_matrix(p));
                }
                mean = ((corr * local * corr.adjoint()) * obs.op).trace().real();
            }
            for (int a2 = 0; a2 < 2; ++a2) {
                const double p = 0.5 * (1.0 + (a2 == 0 ? mean : -mean));
                if (p > 0.0) view[view_key("energy", key, q2, a2)] += w1 * w2 * key_prob * p;
            }
        }
    }
}

// Alice-first branch followed by "energy": her answer is maximally mixed,
// the keys on her observable's support follow Bell statistics of the
// projected EPR block against the local reduction, and all other keys stay
// uniform.
inline void simulate_alice_then_energy(const Circuit& c, const Matrix& witness_density,
                                       const std::string& q1, double weight, int a1,
                                       const std::string& q2_label, ViewDist& view) {
    const int n = clock_total_qubits(c);
    const SiteObservable obs = parse_site_observable(q1, n);
    const int s = static_cast<int>(obs.sites.size());
    if (s == 0) {  // identity question: deterministic +1 answer, uniform keys
        if (a1 != 0) return;
        const double key_prob = std::pow(0.25, n);
        for (int key = 0; key < (1 << (2 * n)); ++key)
            view[view_key(q1, a1, q2_label, key)] += weight * key_prob;
        return;
    }
    const Eigen::Index ds = Eigen::Index{1} << s;
    // Project Alice's outcome on the EPR block of the support pairs.
    const Matrix e = 0.5 * (Matrix::Identity(ds, ds) + (a1 == 0 ? 1.0 : -1.0) * obs.op);
    std::vector<int> alice_side;
    for (int i = 0; i < s; ++i) alice_side.push_back(i);
    const StateVector projected = apply_on_qubits(e, alice_side, epr_state(s));
    const Matrix local = local_density(c, witness_density, obs.sites);
    const HermitianEig eig = hermitian_eig(local);
    std::vector<double> support_probs(std::size_t{1} << (2 * s), 0.0);
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) < 1e-15) continue;
        Vector held = eig.vectors.col(k);
        held /= held.norm();
        const StateVector joint = kron_states(projected, StateVector{held});
        const auto probs = bell_answer_probabilities(joint, s, s);
        for (std::size_t i = 0; i < probs.size(); ++i) support_probs[i] += eig.values(k) * probs[i];
    }
    const double off_prob = std::pow(0.25, n - s);
    for (int key = 0; key < (1 << (2 * n)); ++key) {
        // assemble this key's support part in the s-pair packing
        unsigned zs = 0, xs = 0;
        for (int i = 0; i < s; ++i) {
            zs |= static_cast<unsigned>(energy_key_a(key, n, obs.sites[static_cast<std::size_t>(i)]))
                  << (s - 1 - i);
            xs |= static_cast<unsigned>(energy_key_b(key, n, obs.sites[static_cast<std::size_t>(i)]))
                  << (s - 1 - i);
        }
        const double p = support_probs[(static_cast<std::size_t>(zs) << s) | xs] * off_prob;
        if (p > 0.0) view[view_key(q1, a1, q2_label, key)] += weight * p;
    }
}

}  // namespace detail

// Witness-independent-core simulator for the honest strategy holding the
// history state of circuit c: Pauli-only interrogations are computed on the
// bare EPR block, and any branch touching "energy" uses uniform keys plus
// local reductions on at most the observable's support.
inline ViewDist zk_simulator(const Circuit& c, const Matrix& witness_density,
                             const AdversaryPolicy& pol) {
    const int n = clock_total_qubits(c);
    const Strategy epr_only = canonical_lw_strategy(n);
    ViewDist view;
    for (const auto& [q1, w1] : pol.first_choices) {
        if (!pol.alice_first && q1 == "energy") {
            detail::simulate_energy_first(c, witness_density, pol, w1, view);
            continue;
        }
        const auto branches = measure_branches(epr_only, pol.alice_first, q1, epr_only.state);
        for (const auto& [a1, post] : branches) {
            const double p1 = post.amps.squaredNorm();
            if (p1 < 1e-300) continue;
            for (const auto& [q2, w2] : pol.respond(q1, a1)) {
                if (q2 == "energy") {
                    // Folds in p(a1) itself from the projected EPR block.
                    require(pol.alice_first, "zk_simulator: energy must go to Bob");
                    detail::simulate_alice_then_energy(c, witness_density, q1, w1 * w2, a1, q2,
                                                       view);
                    continue;
                }
                const auto second = measure_branches(epr_only, !pol.alice_first, q2, post);
                for (const auto& [a2, post2] : second) {
                    const double p = post2.amps.squaredNorm();
                    if (p > 0.0) view[view_key(q1, a1, q2, a2)] += w1 * w2 * p;
                }
            }
        }
    }
    return view;
}

// The six shipped interrogation policies, exercising every simulator branch.
inline std::vector<AdversaryPolicy> zk_shipped_policies(int n) {
    require(n >= 4, "zk_shipped_policies: n must be at least 4");
    const auto one = [n](int site, char l) {
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(site)] = l;
        return s;
    };
    const auto two = [n](int i, char li, int j, char lj) {
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(i)] = li;
        s[static_cast<std::size_t>(j)] = lj;
        return s;
    };
    std::vector<AdversaryPolicy> ps;
    {
        AdversaryPolicy p;
        p.name = "pauli-alice-first";
        p.alice_first = true;
        p.first_choices = {{one(0, 'X'), 0.5}, {one(1, 'Z'), 0.5}};
        p.respond = [one](const std::string& q1, int a1) {
            std::vector<std::pair<std::string, double>> r;
            if (q1[0] == 'X')
                r.push_back({q1 + "," + one(a1 == 0 ? 1 : 2, 'X'), 1.0});
            else
                r.push_back({q1 + "," + one(a1 == 0 ? 0 : 3, 'Z'), 1.0});
            return r;
        };
        ps.push_back(std::move(p));
    }
    {
        AdversaryPolicy p;
        p.name = "pauli-bob-first";
        p.alice_first = false;
        p.first_choices = {{"eq:r1@0,1", 1.0}};
        p.respond = [two](const std::string&, int b) {
            const int b0 = (b >> 2) & 1;
            std::vector<std::pair<std::string, double>> r;
            r.push_back({b0 ? "v9@0,1" : two(0, 'I', 1, 'Z'), 1.0});
            return r;
        };
        ps.push_back(std::move(p));
    }
    {
        AdversaryPolicy p;
        p.name = "energy-first-pauli";
        p.alice_first = false;
        p.first_choices = {{"energy", 1.0}};
        p.respond = [two](const std::string&, int key) {
            std::vector<std::pair<std::string, double>> r;
            r.push_back({(key & 1) ? two(0, 'X', 1, 'X') : two(1, 'Z', 2, 'Z'), 1.0});
            return r;
        };
        ps.push_back(std::move(p));
    }
    {
        AdversaryPolicy p;
        p.name = "energy-first-v9";
        p.alice_first = false;
        p.first_choices = {{"energy", 1.0}};
        p.respond = [](const std::string&, int key) {
            std::vector<std::pair<std::string, double>> r;
            r.push_back({((key >> 1) & 1) ? "v9@0,1" : "v9@2,3", 1.0});
            return r;
        };
        ps.push_back(std::move(p));
    }
    {
        AdversaryPolicy p;
        p.name = "pauli-then-energy";
        p.alice_first = true;
        p.first_choices = {{two(0, 'X', 1, 'Z'), 1.0}};
        p.respond = [](const std::string&, int) {
            return std::vector<std::pair<std::string, double>>{{"energy", 1.0}};
        };
        ps.push_back(std::move(p));
    }
    {
        AdversaryPolicy p;
        p.name = "v9-then-energy";
        p.alice_first = true;
        p.first_choices = {{"v9@1,2", 1.0}};
        p.respond = [](const std::string&, int) {
            return std::vector<std::pair<std::string, double>>{{"energy", 1.0}};
        };
        ps.push_back(std::move(p));
    }
    return ps;
}

struct ZkAuditResult {
    std::string policy;
    ViewDist honest_view;
    ViewDist simulated_view;
    double distance = 0.0;
};

// Compare the honest prover's transcript distribution (held state = the
// pure history state of (c, witness)) against the simulator's.
inline ZkAuditResult zk_audit(const Circuit& c, const Vector& witness,
                              const AdversaryPolicy& pol) {
    const XZHamiltonian h = circuit_to_hamiltonian(c);
    const StateVector hist = history_state_pure(c, witness);
    const Strategy honest = honest_strategy(h, hist.amps);
    ZkAuditResult r;
    r.policy = pol.name;
    r.honest_view = view_distribution(honest, pol);
    r.simulated_view = zk_simulator(c, witness * witness.adjoint(), pol);
    r.distance = statistical_distance(r.honest_view, r.simulated_view);
    return r;
}

}  // namespace braidkit
