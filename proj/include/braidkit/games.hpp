#pragma once

// Two-prover one-round games and finite-dimensional strategies: exact game
// values, the Magic Square game, the low-weight linearity and
// anti-commutation tests and their mixture, rigidity diagnostics and the
// perturbation families used to exercise them.
//
// Questions are identified by label strings.  The delivered Pauli question
// for (W, a) is the letter string with W_i at the support of a and I
// elsewhere, so distinct (W, a) pairs with the same delivered string are the
// same question (their weights merge).  Answer bit 0 encodes outcome +1.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "braidkit/common.hpp"
#include "braidkit/qcore.hpp"

namespace braidkit {

struct Question {
    std::string label;
    int arity = 2;
};

struct Game {
    std::string name;
    std::vector<Question> alice_questions;
    std::vector<Question> bob_questions;

    struct Entry {
        int x = 0;
        int y = 0;
        double weight = 0.0;
    };
    std::vector<Entry> distribution;

    // Probability that the verifier accepts answers (a, b) to questions
    // (x, y).  Randomized predicates return values strictly between 0 and 1.
    std::function<double(int x, int y, int a, int b)> accept;

    std::map<std::string, int> alice_index;
    std::map<std::string, int> bob_index;
};

inline void validate_game(const Game& g, double tol = 1e-12) {
    double total = 0.0;
    for (const auto& e : g.distribution) {
        require(e.weight >= 0.0, "game: negative weight");
        require(e.x >= 0 && e.x < static_cast<int>(g.alice_questions.size()), "game: bad x");
        require(e.y >= 0 && e.y < static_cast<int>(g.bob_questions.size()), "game: bad y");
        total += e.weight;
    }
    require(std::abs(total - 1.0) <= tol, "game: weights do not sum to 1");
}

// Incremental game assembly.  Rounds targeting the same question pair merge:
// their weights add and the acceptance probability becomes the weighted
// average of the supplied checks (the verifier's hidden choice among rounds
// that deliver identical questions).
class GameBuilder {
  public:
    explicit GameBuilder(std::string name) : name_(std::move(name)) {}

    int alice(const std::string& label, int arity) { return intern(alice_, label, arity); }
    int bob(const std::string& label, int arity) { return intern(bob_, label, arity); }

    void round(int x, int y, double weight, std::function<double(int, int)> check) {
        auto& cell = cells_[{x, y}];
        cell.weight += weight;
        cell.checks.emplace_back(weight, std::move(check));
    }

    Game build() {
        Game g;
        g.name = name_;
        g.alice_questions = alice_;
        g.bob_questions = bob_;
        for (std::size_t i = 0; i < alice_.size(); ++i) g.alice_index[alice_[i].label] = static_cast<int>(i);
        for (std::size_t i = 0; i < bob_.size(); ++i) g.bob_index[bob_[i].label] = static_cast<int>(i);
        auto cells = std::make_shared<std::map<std::pair<int, int>, Cell>>(std::move(cells_));
        for (const auto& [key, cell] : *cells)
            g.distribution.push_back(Game::Entry{key.first, key.second, cell.weight});
        g.accept = [cells](int x, int y, int a, int b) {
            const auto it = cells->find({x, y});
            require(it != cells->end(), "accept: question pair has zero weight");
            double acc = 0.0;
            for (const auto& [w, fn] : it->second.checks) acc += w * fn(a, b);
            return acc / it->second.weight;
        };
        return g;
    }

  private:
    struct Cell {
        double weight = 0.0;
        std::vector<std::pair<double, std::function<double(int, int)>>> checks;
    };

    static int intern(std::vector<Question>& qs, const std::string& label, int arity) {
        for (std::size_t i = 0; i < qs.size(); ++i)
            if (qs[i].label == label) {
                require(qs[i].arity == arity, "question re-declared with a different arity");
                return static_cast<int>(i);
            }
        qs.push_back(Question{label, arity});
        return static_cast<int>(qs.size()) - 1;
    }

    std::string name_;
    std::vector<Question> alice_;
    std::vector<Question> bob_;
    std::map<std::pair<int, int>, Cell> cells_;
};

// A strategy: shared state with Alice's qubits first, projective measurements
// per question label.  Alice's PVMs act on her whole side.  Bob's dense PVMs
// act on his first bob_dense_qubits local qubits (identity on the rest).
// Labels in bob_bell_questions are measured by Bell-measuring every pair
// (i, k+i) of his 2k local qubits; the answer index packs the keys as
// [beta_0..beta_{k-1} alpha_0..alpha_{k-1}] (Z keys first, site 0 most
// significant), matching the energy test's (a, b) answer layout.
struct Strategy {
    StateVector state;
    int alice_qubits = 1;
    int bob_dense_qubits = 1;
    std::map<std::string, std::vector<Matrix>> alice_pvms;
    std::map<std::string, std::vector<Matrix>> bob_pvms;
    std::set<std::string> bob_bell_questions;

    int bob_qubits() const { return state.qubits() - alice_qubits; }
};

inline void validate_strategy(const Game& g, const Strategy& s) {
    require(std::abs(s.state.amps.squaredNorm() - 1.0) <= 1e-9, "strategy: state not normalized");
    require(s.alice_qubits >= 1 && s.alice_qubits < s.state.qubits(), "strategy: bad qubit split");
    std::set<int> used_x, used_y;
    for (const auto& e : g.distribution) {
        if (e.weight <= 0.0) continue;
        used_x.insert(e.x);
        used_y.insert(e.y);
    }
    const Eigen::Index da = Eigen::Index{1} << s.alice_qubits;
    for (int x : used_x) {
        const auto& q = g.alice_questions[static_cast<std::size_t>(x)];
        const auto it = s.alice_pvms.find(q.label);
        require(it != s.alice_pvms.end(), "strategy: missing Alice PVM for " + q.label);
        require(static_cast<int>(it->second.size()) == q.arity,
                "strategy: Alice PVM arity mismatch for " + q.label);
        require(it->second[0].rows() == da, "strategy: Alice PVM dimension mismatch");
        validate_pvm(it->second);
    }
    const int pairs = s.bob_qubits() / 2;
    for (int y : used_y) {
        const auto& q = g.bob_questions[static_cast<std::size_t>(y)];
        if (s.bob_bell_questions.count(q.label)) {
            require(s.bob_qubits() == 2 * pairs && q.arity == (1 << (2 * pairs)),
                    "strategy: Bell question arity mismatch for " + q.label);
            continue;
        }
        const auto it = s.bob_pvms.find(q.label);
        require(it != s.bob_pvms.end(), "strategy: missing Bob PVM for " + q.label);
        require(static_cast<int>(it->second.size()) == q.arity,
                "strategy: Bob PVM arity mismatch for " + q.label);
        require(it->second[0].rows() == (Eigen::Index{1} << s.bob_dense_qubits),
                "strategy: Bob PVM dimension mismatch");
        validate_pvm(it->second);
    }
}

inline std::vector<int> alice_qubit_list(const Strategy& s) {
    std::vector<int> q;
    for (int i = 0; i < s.alice_qubits; ++i) q.push_back(i);
    return q;
}

inline std::vector<int> bob_dense_qubit_list(const Strategy& s) {
    std::vector<int> q;
    for (int i = 0; i < s.bob_dense_qubits; ++i) q.push_back(s.alice_qubits + i);
    return q;
}

namespace detail {

// Depth-first enumeration of Bell-measurement keys over Bob's qubit pairs.
// Accumulates the squared norm of each fully projected branch into
// probs[answer index]; branches are unnormalized so the values are absolute
// probabilities.
inline void bell_enum(const StateVector& s, int alice_qubits, int pairs, int pair, unsigned zkeys,
                      unsigned xkeys, std::vector<double>& probs) {
    if (pair == pairs) {
        probs[(static_cast<std::size_t>(zkeys) << pairs) | xkeys] += s.amps.squaredNorm();
        return;
    }
    const int q1 = alice_qubits + pair;
    const int q2 = alice_qubits + pairs + pair;
    for (int alpha = 0; alpha < 2; ++alpha)
        for (int beta = 0; beta < 2; ++beta) {
            const StateVector bell = bell_pair_state(alpha, beta);
            const Matrix proj = bell.amps * bell.amps.adjoint();
            StateVector branch = apply_on_qubits(proj, {q1, q2}, s);
            if (branch.amps.squaredNorm() < 1e-300) continue;
            const int shift = pairs - 1 - pair;
            bell_enum(branch, alice_qubits, pairs, pair + 1,
                      zkeys | (static_cast<unsigned>(beta) << shift),
                      xkeys | (static_cast<unsigned>(alpha) << shift), probs);
        }
}

}  // namespace detail

// Probabilities of every packed-key answer when Bob Bell-measures all his
// pairs on the (possibly unnormalized) state s.
inline std::vector<double> bell_answer_probabilities(const StateVector& s, int alice_qubits,
                                                     int pairs) {
    std::vector<double> probs(std::size_t{1} << (2 * pairs), 0.0);
    detail::bell_enum(s, alice_qubits, pairs, 0, 0, 0, probs);
    return probs;
}

// omega(G, S) = sum mu(x,y) lambda(a,b|x,y) <psi| E^x_a (x) F^y_b |psi>.
inline double exact_value(const Game& g, const Strategy& s) {
    validate_game(g);
    validate_strategy(g, s);
    const std::vector<int> aq = alice_qubit_list(s);
    const std::vector<int> bq = bob_dense_qubit_list(s);
    const int pairs = s.bob_qubits() / 2;
    double value = 0.0;
    for (const auto& e : g.distribution) {
        if (e.weight <= 0.0) continue;
        const auto& xq = g.alice_questions[static_cast<std::size_t>(e.x)];
        const auto& yq = g.bob_questions[static_cast<std::size_t>(e.y)];
        const auto& alice_pvm = s.alice_pvms.at(xq.label);
        for (int a = 0; a < xq.arity; ++a) {
            const StateVector sa = apply_on_qubits(alice_pvm[static_cast<std::size_t>(a)], aq, s.state);
            if (sa.amps.squaredNorm() < 1e-300) continue;
            if (s.bob_bell_questions.count(yq.label)) {
                const std::vector<double> probs = bell_answer_probabilities(sa, s.alice_qubits, pairs);
                for (int b = 0; b < yq.arity; ++b)
                    value += e.weight * g.accept(e.x, e.y, a, b) * probs[static_cast<std::size_t>(b)];
            } else {
                const auto& bob_pvm = s.bob_pvms.at(yq.label);
                for (int b = 0; b < yq.arity; ++b) {
                    const StateVector sab =
                        apply_on_qubits(bob_pvm[static_cast<std::size_t>(b)], bq, sa);
                    value += e.weight * g.accept(e.x, e.y, a, b) * sab.amps.squaredNorm();
                }
            }
        }
    }
    return value;
}

// ---------------------------------------------------------------------------
// Magic Square.

struct MsEquation {
    std::string label;
    int vars[3];
    int parity;
};

inline const std::vector<MsEquation>& ms_equations() {
    static const std::vector<MsEquation> eqs = {
        {"r1", {0, 1, 2}, 0}, {"r2", {3, 4, 5}, 0}, {"r3", {6, 7, 8}, 0},
        {"c1", {0, 3, 6}, 0}, {"c2", {1, 4, 7}, 0}, {"c3", {2, 5, 8}, 1},
    };
    return eqs;
}

// The two-qubit operator solution: rows and the first two columns multiply
// to +I, the last column to -I.
inline Matrix ms_observable(int v) {
    require(v >= 0 && v <= 8, "ms_observable: variable out of range");
    static const char* letters[8] = {"IZ", "ZI", "ZZ", "XI", "IX", "XX", "XZ", "ZX"};
    if (v < 8) return pauli_to_matrix(PauliString::from_letters(letters[v]));
    PauliString p = PauliString::identity(2);  // (XZ) (x) (ZX) = -(XZ (x) XZ)
    p.sites[0] = SitePauli{1, 1};
    p.sites[1] = SitePauli{1, 1};
    p.sign = -1;
    return pauli_to_matrix(p);
}

inline std::vector<Matrix> observable_pvm(const Matrix& obs) {
    const Eigen::Index d = obs.rows();
    return {0.5 * (Matrix::Identity(d, d) + obs), 0.5 * (Matrix::Identity(d, d) - obs)};
}

// Joint measurement of pairwise commuting involutions; outcome bit m (most
// significant first) is observable m's outcome.
inline std::vector<Matrix> joint_pvm(const std::vector<Matrix>& obs) {
    const Eigen::Index d = obs[0].rows();
    const int k = static_cast<int>(obs.size());
    std::vector<Matrix> pvm;
    for (int b = 0; b < (1 << k); ++b) {
        Matrix p = Matrix::Identity(d, d);
        for (int m = 0; m < k; ++m) {
            const double sign = ((b >> (k - 1 - m)) & 1) ? -1.0 : 1.0;
            p = (p * (0.5 * (Matrix::Identity(d, d) + sign * obs[static_cast<std::size_t>(m)])))
                    .eval();
        }
        pvm.push_back(std::move(p));
    }
    return pvm;
}

// Bob receives an equation and answers an assignment to its three variables;
// Alice receives one variable of that equation and must stay consistent.
inline Game magic_square_game() {
    GameBuilder b("magic_square");
    for (int q = 0; q < 6; ++q) {
        const MsEquation& eq = ms_equations()[static_cast<std::size_t>(q)];
        const int y = b.bob(eq.label, 8);
        for (int slot = 0; slot < 3; ++slot) {
            const int x = b.alice("v" + std::to_string(eq.vars[slot] + 1), 2);
            const int parity = eq.parity;
            b.round(x, y, 1.0 / 18.0, [slot, parity](int a, int bb) {
                const int b0 = (bb >> 2) & 1, b1 = (bb >> 1) & 1, b2 = bb & 1;
                if ((b0 ^ b1 ^ b2) != parity) return 0.0;
                const int bits[3] = {b0, b1, b2};
                return bits[slot] == a ? 1.0 : 0.0;
            });
        }
    }
    return b.build();
}

inline Strategy canonical_ms_strategy() {
    Strategy s;
    s.state = epr_state(2);
    s.alice_qubits = 2;
    s.bob_dense_qubits = 2;
    for (int v = 0; v < 9; ++v)
        s.alice_pvms["v" + std::to_string(v + 1)] = observable_pvm(ms_observable(v));
    for (const auto& eq : ms_equations()) {
        std::vector<Matrix> triple;
        for (int slot = 0; slot < 3; ++slot) triple.push_back(ms_observable(eq.vars[slot]));
        s.bob_pvms[eq.label] = joint_pvm(triple);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Low-weight Pauli tests.  W masks use bit i = site i, 0 for X and 1 for Z.

inline std::string delivered_string(int n, unsigned wbits, unsigned support) {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (int i = 0; i < n; ++i)
        if ((support >> i) & 1u) s[static_cast<std::size_t>(i)] = ((wbits >> i) & 1u) ? 'Z' : 'X';
    return s;
}

inline std::vector<unsigned> low_weight_supports(int n, int cap) {
    std::vector<unsigned> out;
    for (unsigned a = 0; a < (1u << n); ++a)
        if (std::popcount(a) <= cap) out.push_back(a);
    return out;
}

// Linearity: Bob measures a pair (W(a), W(a')), Alice one of W(a), W(a'),
// W(a+a') (the sum only when it stays under the weight cap).  Bob's answer
// packs (b1, b2) with b1 most significant.
inline Game lw_linearity_test(int n, int cap = 6) {
    require(n >= 1, "lw_linearity_test: n must be positive");
    require(cap >= 1, "lw_linearity_test: weight cap must be positive");
    GameBuilder b("lw_linearity(" + std::to_string(n) + ")");
    const auto supports = low_weight_supports(n, cap);
    const double base =
        1.0 / (static_cast<double>(1u << n) * static_cast<double>(supports.size()) *
               static_cast<double>(supports.size()));
    for (unsigned w = 0; w < (1u << n); ++w)
        for (unsigned a1 : supports)
            for (unsigned a2 : supports) {
                const std::string s1 = delivered_string(n, w, a1);
                const std::string s2 = delivered_string(n, w, a2);
                const int y = b.bob(s1 + "," + s2, 4);
                struct Option {
                    std::string s;
                    int kind;  // 0: b1 == c, 1: b2 == c, 2: b1 xor b2 == c
                };
                std::vector<Option> options = {{s1, 0}, {s2, 1}};
                if (std::popcount(a1 ^ a2) <= cap)
                    options.push_back({delivered_string(n, w, a1 ^ a2), 2});
                const double each = base / static_cast<double>(options.size());
                for (const auto& opt : options) {
                    const int x = b.alice(opt.s, 2);
                    const int kind = opt.kind;
                    b.round(x, y, each, [kind](int a, int bb) {
                        const int b1 = (bb >> 1) & 1, b2 = bb & 1;
                        const int want = kind == 0 ? b1 : (kind == 1 ? b2 : (b1 ^ b2));
                        return want == a ? 1.0 : 0.0;
                    });
                }
            }
    return b.build();
}

// Anti-commutation: a uniformly random weight-2 support (i, j), a Magic
// Square equation for Bob and one of its variables for Alice.  Variables 1-8
// deliver the corresponding one- or two-letter Pauli question; variable 9 is
// the dedicated question "v9@i,j".
inline Game lw_anticommutation_test(int n) {
    require(n >= 2, "lw_anticommutation_test: n must be at least 2");
    GameBuilder b("lw_anticommutation(" + std::to_string(n) + ")");
    static const char* letters[8] = {"IZ", "ZI", "ZZ", "XI", "IX", "XX", "XZ", "ZX"};
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    const double base = 1.0 / (pairs * 18.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int q = 0; q < 6; ++q) {
                const MsEquation& eq = ms_equations()[static_cast<std::size_t>(q)];
                const std::string suffix = "@" + std::to_string(i) + "," + std::to_string(j);
                const int y = b.bob("eq:" + eq.label + suffix, 8);
                for (int slot = 0; slot < 3; ++slot) {
                    const int v = eq.vars[slot];
                    std::string label;
                    if (v < 8) {
                        std::string s(static_cast<std::size_t>(n), 'I');
                        s[static_cast<std::size_t>(i)] = letters[v][0];
                        s[static_cast<std::size_t>(j)] = letters[v][1];
                        label = s;
                    } else {
                        label = "v9" + suffix;
                    }
                    const int x = b.alice(label, 2);
                    const int parity = eq.parity;
                    b.round(x, y, base, [slot, parity](int a, int bb) {
                        const int b0 = (bb >> 2) & 1, b1 = (bb >> 1) & 1, b2 = bb & 1;
                        if ((b0 ^ b1 ^ b2) != parity) return 0.0;
                        const int bits[3] = {b0, b1, b2};
                        return bits[slot] == a ? 1.0 : 0.0;
                    });
                }
            }
    return b.build();
}

// Equal-weight mixture of games.  Question lists merge by label; identical
// question pairs occurring in several components average their predicates by
// weight.
inline Game mix_games(const std::vector<std::pair<Game, double>>& parts, const std::string& name) {
    GameBuilder b(name);
    double total = 0.0;
    for (const auto& [part, share] : parts) total += share;
    require(std::abs(total - 1.0) <= 1e-12, "mix_games: shares must sum to 1");
    for (const auto& [part, share] : parts) {
        auto game = std::make_shared<Game>(part);
        for (const auto& e : game->distribution) {
            const auto& xq = game->alice_questions[static_cast<std::size_t>(e.x)];
            const auto& yq = game->bob_questions[static_cast<std::size_t>(e.y)];
            const int x = b.alice(xq.label, xq.arity);
            const int y = b.bob(yq.label, yq.arity);
            const int ox = e.x, oy = e.y;
            b.round(x, y, share * e.weight,
                    [game, ox, oy](int a, int bb) { return game->accept(ox, oy, a, bb); });
        }
    }
    return b.build();
}

// Half linearity, half anti-commutation.  Alice's question set is shared
// between the two halves by construction.
inline Game lwpbt(int n, int cap = 6) {
    require(n >= 2, "lwpbt: n must be at least 2");
    return mix_games({{lw_linearity_test(n, cap), 0.5}, {lw_anticommutation_test(n), 0.5}},
                     "lwpbt(" + std::to_string(n) + ")");
}

// Canonical strategy on n EPR pairs: Alice measures the delivered Pauli
// observable, Bob jointly measures his pair or equation triple.
inline Strategy canonical_lw_strategy(int n, int cap = 6) {
    Strategy s;
    s.state = epr_state(n);
    s.alice_qubits = n;
    s.bob_dense_qubits = n;
    const auto supports = low_weight_supports(n, cap);
    std::set<std::string> strings;
    for (unsigned w = 0; w < (1u << n); ++w)
        for (unsigned a : supports) strings.insert(delivered_string(n, w, a));
    for (const auto& str : strings)
        s.alice_pvms[str] = observable_pvm(pauli_to_matrix(PauliString::from_letters(str)));
    for (unsigned w = 0; w < (1u << n); ++w)
        for (unsigned a1 : supports)
            for (unsigned a2 : supports) {
                const std::string s1 = delivered_string(n, w, a1);
                const std::string s2 = delivered_string(n, w, a2);
                const std::string label = s1 + "," + s2;
                if (s.bob_pvms.count(label)) continue;
                s.bob_pvms[label] =
                    joint_pvm({pauli_to_matrix(PauliString::from_letters(s1)),
                               pauli_to_matrix(PauliString::from_letters(s2))});
            }
    if (n >= 2) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const std::string suffix = "@" + std::to_string(i) + "," + std::to_string(j);
                std::vector<Matrix> embedded(9);
                for (int v = 0; v < 9; ++v)
                    embedded[static_cast<std::size_t>(v)] =
                        embed_operator(ms_observable(v), {i, j}, n);
                s.alice_pvms["v9" + suffix] = observable_pvm(embedded[8]);
                for (const auto& eq : ms_equations()) {
                    std::vector<Matrix> triple;
                    for (int slot = 0; slot < 3; ++slot)
                        triple.push_back(embedded[static_cast<std::size_t>(eq.vars[slot])]);
                    s.bob_pvms["eq:" + eq.label + suffix] = joint_pvm(triple);
                }
            }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Rigidity diagnostics.

struct RigidityDiagnostics {
    // question-pair key "s|y" -> <psi| tau_A(s) (x) tau_B_y(s) |psi>
    std::map<std::string, double> consistency;
    // key "s1*s2" -> ||tau(s1) tau(s2) - tau(s1+s2)||_rho^2
    std::map<std::string, double> linearity_residuals;
    // key "i,j" -> ||tau_X(e_i) tau_Z(e_j) - (-1)^{delta_ij} tau_Z(e_j) tau_X(e_i)||_rho^2
    std::map<std::string, double> anticommutation_residuals;
    double min_consistency = 1.0;
    double max_linearity = 0.0;
    double max_anticommutation = 0.0;
};

inline Matrix strategy_observable(const Strategy& s, const std::string& label) {
    const auto it = s.alice_pvms.find(label);
    require(it != s.alice_pvms.end(), "diagnostics: missing Alice observable for " + label);
    require(it->second.size() == 2, "diagnostics: observable question must be binary");
    return it->second[0] - it->second[1];
}

inline double pvm_marginal_consistency(const Strategy& s, const Matrix& tau_a,
                                       const Matrix& tau_b) {
    const StateVector lhs = apply_on_qubits(tau_a, alice_qubit_list(s), s.state);
    const StateVector full = apply_on_qubits(tau_b, bob_dense_qubit_list(s), lhs);
    return (s.state.amps.adjoint() * full.amps)(0).real();
}

inline RigidityDiagnostics rigidity_diagnostics(const Strategy& s, int n, int cap = 6) {
    RigidityDiagnostics d;
    const DensityMatrix rho_a =
        partial_trace(density_of(s.state), alice_qubit_list(s));
    const auto supports = low_weight_supports(n, cap);

    // Group-law residuals on Alice's observables.
    std::set<std::string> seen;
    for (unsigned w = 0; w < (1u << n); ++w)
        for (unsigned a1 : supports)
            for (unsigned a2 : supports) {
                if (std::popcount(a1 ^ a2) > cap) continue;
                const std::string s1 = delivered_string(n, w, a1);
                const std::string s2 = delivered_string(n, w, a2);
                const std::string s3 = delivered_string(n, w, a1 ^ a2);
                const std::string key = s1 + "*" + s2;
                if (!seen.insert(key).second) continue;
                const Matrix t1 = strategy_observable(s, s1);
                const Matrix t2 = strategy_observable(s, s2);
                const Matrix t3 = strategy_observable(s, s3);
                const double r = rho_norm(t1 * t2 - t3, rho_a.mat);
                d.linearity_residuals[key] = r * r;
                d.max_linearity = std::max(d.max_linearity, r * r);
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::string sx(static_cast<std::size_t>(n), 'I'), sz(static_cast<std::size_t>(n), 'I');
            sx[static_cast<std::size_t>(i)] = 'X';
            sz[static_cast<std::size_t>(j)] = 'Z';
            const Matrix tx = strategy_observable(s, sx);
            const Matrix tz = strategy_observable(s, sz);
            const double sign = (i == j) ? -1.0 : 1.0;
            const double r = rho_norm(tx * tz - sign * tz * tx, rho_a.mat);
            const std::string key = std::to_string(i) + "," + std::to_string(j);
            d.anticommutation_residuals[key] = r * r;
            d.max_anticommutation = std::max(d.max_anticommutation, r * r);
        }

    // Consistency of Alice's observables against Bob's joint-measurement
    // marginals, for every Bob question stored in the strategy.
    for (const auto& [label, pvm] : s.bob_pvms) {
        const auto comma = label.find(',');
        if (label.rfind("eq:", 0) == 0) {
            const auto at = label.find('@');
            const std::string eq_label = label.substr(3, at - 3);
            const auto comma2 = label.find(',', at);
            const int i = std::stoi(label.substr(at + 1, comma2 - at - 1));
            const int j = std::stoi(label.substr(comma2 + 1));
            const MsEquation* eq = nullptr;
            for (const auto& e : ms_equations())
                if (e.label == eq_label) eq = &e;
            require(eq != nullptr, "diagnostics: unknown equation " + label);
            for (int slot = 0; slot < 3; ++slot) {
                const int v = eq->vars[slot];
                std::string alice_label;
                if (v < 8) {
                    static const char* letters[8] = {"IZ", "ZI", "ZZ", "XI", "IX", "XX", "XZ", "ZX"};
                    std::string str(static_cast<std::size_t>(n), 'I');
                    str[static_cast<std::size_t>(i)] = letters[v][0];
                    str[static_cast<std::size_t>(j)] = letters[v][1];
                    alice_label = str;
                } else {
                    alice_label = "v9@" + std::to_string(i) + "," + std::to_string(j);
                }
                Matrix tau_b = Matrix::Zero(pvm[0].rows(), pvm[0].cols());
                for (int bb = 0; bb < 8; ++bb) {
                    const double sign = ((bb >> (2 - slot)) & 1) ? -1.0 : 1.0;
                    tau_b += sign * pvm[static_cast<std::size_t>(bb)];
                }
                const double c =
                    pvm_marginal_consistency(s, strategy_observable(s, alice_label), tau_b);
                d.consistency[alice_label + "|" + label] = c;
                d.min_consistency = std::min(d.min_consistency, c);
            }
        } else if (comma != std::string::npos) {
            const std::string s1 = label.substr(0, comma);
            const std::string s2 = label.substr(comma + 1);
            PauliString p1 = PauliString::from_letters(s1);
            PauliString p2 = PauliString::from_letters(s2);
            const PauliString p3 = multiply(p1, p2);
            struct Slot {
                std::string s;
                int kind;
            };
            std::vector<Slot> slots = {{s1, 0}, {s2, 1}};
            if (p3.weight() <= cap) slots.push_back({p3.letters(), 2});
            for (const auto& slot : slots) {
                Matrix tau_b = Matrix::Zero(pvm[0].rows(), pvm[0].cols());
                for (int bb = 0; bb < 4; ++bb) {
                    const int b1 = (bb >> 1) & 1, b2 = bb & 1;
                    const int bit = slot.kind == 0 ? b1 : (slot.kind == 1 ? b2 : (b1 ^ b2));
                    tau_b += (bit ? -1.0 : 1.0) * pvm[static_cast<std::size_t>(bb)];
                }
                const double c =
                    pvm_marginal_consistency(s, strategy_observable(s, slot.s), tau_b);
                d.consistency[slot.s + "|" + label] = c;
                d.min_consistency = std::min(d.min_consistency, c);
            }
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Perturbations and reference strategies.

inline Matrix exp_i_theta_y_on_qubit(double theta, int qubit, int total) {
    Matrix y(2, 2);
    y << 0.0, -kI, kI, 0.0;
    const Matrix u = std::cos(theta) * Matrix::Identity(2, 2) + kI * std::sin(theta) * y;
    return embed_operator(u, {qubit}, total);
}

// Conjugate every Alice PVM by the same rotation on her first qubit.  Lowers
// the game value while preserving all multiplicative relations among her
// observables.
inline Strategy perturb_alice_global(const Strategy& s, double theta) {
    Strategy out = s;
    const Matrix u = exp_i_theta_y_on_qubit(theta, 0, s.alice_qubits);
    for (auto& [label, pvm] : out.alice_pvms)
        for (auto& p : pvm) p = (u * p * u.adjoint()).eval();
    return out;
}

// Conjugate each Alice question by its own label-seeded rotation.  Breaks the
// relations BETWEEN questions, so the group-law diagnostics become strictly
// positive, vanishing as theta -> 0.
inline Strategy perturb_alice_per_question(const Strategy& s, double theta) {
    Strategy out = s;
    const Eigen::Index da = Eigen::Index{1} << s.alice_qubits;
    for (auto& [label, pvm] : out.alice_pvms) {
        RandomStream rng = RandomStream::derived(0x8d1c9f3b24a65e70ull, label);
        Matrix k(da, da);
        for (Eigen::Index r = 0; r < da; ++r)
            for (Eigen::Index c = 0; c < da; ++c) k(r, c) = Complex{rng.gaussian(), rng.gaussian()};
        k = 0.5 * (k + k.adjoint()).eval();
        const HermitianEig eig = hermitian_eig(k);
        const double scale = eig.values.cwiseAbs().maxCoeff();
        Vector phases(da);
        for (Eigen::Index i = 0; i < da; ++i)
            phases(i) = std::exp(kI * (theta * eig.values(i) / scale));
        const Matrix u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
        for (auto& p : pvm) p = (u * p * u.adjoint()).eval();
    }
    return out;
}

// Answer-uniform product strategy: both sides hold uniform superpositions
// and read computational bits, so every question is answered uniformly and
// independently.  Question arities must be powers of two.
inline Strategy uniform_random_strategy(const Game& g) {
    int amax = 1, bmax = 1;
    for (const auto& q : g.alice_questions) amax = std::max(amax, q.arity);
    for (const auto& q : g.bob_questions) bmax = std::max(bmax, q.arity);
    require(is_power_of_two(amax) && is_power_of_two(bmax),
            "uniform_random_strategy: arities must be powers of two");
    const int aq = qubit_count(amax), bq = std::max(1, qubit_count(bmax));
    const int aqq = std::max(1, aq);
    Strategy s;
    const Eigen::Index dim = Eigen::Index{1} << (aqq + bq);
    Vector amps = Vector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    s.state = StateVector{std::move(amps)};
    s.alice_qubits = aqq;
    s.bob_dense_qubits = bq;
    const auto block_pvm = [](Eigen::Index dim_side, int arity) {
        std::vector<Matrix> pvm;
        const Eigen::Index block = dim_side / arity;
        for (int k = 0; k < arity; ++k) {
            Matrix p = Matrix::Zero(dim_side, dim_side);
            for (Eigen::Index i = 0; i < block; ++i) p(k * block + i, k * block + i) = 1.0;
            pvm.push_back(std::move(p));
        }
        return pvm;
    };
    for (const auto& q : g.alice_questions)
        s.alice_pvms[q.label] = block_pvm(Eigen::Index{1} << aqq, q.arity);
    for (const auto& q : g.bob_questions)
        s.bob_pvms[q.label] = block_pvm(Eigen::Index{1} << bq, q.arity);
    return s;
}

// Canonical strategy with Bob's first linearity bit flipped on every pair
// question.
inline Strategy flipped_b1_strategy(const Strategy& canonical) {
    Strategy out = canonical;
    for (auto& [label, pvm] : out.bob_pvms) {
        if (label.rfind("eq:", 0) == 0 || label.find(',') == std::string::npos) continue;
        std::swap(pvm[0], pvm[2]);
        std::swap(pvm[1], pvm[3]);
    }
    return out;
}

}  // namespace braidkit
