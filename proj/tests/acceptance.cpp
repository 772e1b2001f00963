// Acceptance harness: one numbered check per invocation, exit 0 on pass.

#include <chrono>
#include <iostream>
#include <sstream>

#include "braidkit/catalog.hpp"
#include "braidkit/group.hpp"
#include "braidkit/io.hpp"
#include "braidkit/protocol.hpp"

using namespace braidkit;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream log;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "  FAIL: " << what << "\n";
        }
    }
    void note(const std::string& what) { log << "  " << what << "\n"; }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------- 1
void magic_square_perfect(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const double omega = exact_value(magic_square_game(), canonical_ms_strategy());
    const double dt = seconds_since(t0);
    c.expect(std::abs(omega - 1.0) <= 1e-9, "magic square value " + fmt(omega) + " != 1");
    c.expect(dt < 1.0, "runtime " + fmt(dt) + "s exceeds 1s");
    c.note("value " + fmt(omega) + ", " + fmt(dt) + "s");
}

// ---------------------------------------------------------------------- 2
void braiding_test_perfect(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 2; n <= 3; ++n) {
        const Strategy s = canonical_lw_strategy(n);
        const double omega = exact_value(lwpbt(n), s);
        c.expect(std::abs(omega - 1.0) <= 1e-9,
                 "lwpbt(" + std::to_string(n) + ") value " + fmt(omega) + " != 1");
        const RigidityDiagnostics d = rigidity_diagnostics(s, n);
        c.expect(d.max_linearity <= 1e-10, "linearity residual " + fmt(d.max_linearity));
        c.expect(d.max_anticommutation <= 1e-10,
                 "anticommutation residual " + fmt(d.max_anticommutation));
        c.expect(1.0 - d.min_consistency <= 1e-10,
                 "consistency gap " + fmt(1.0 - d.min_consistency));
        c.note("n=" + std::to_string(n) + " value " + fmt(omega));
    }
    const double dt = seconds_since(t0);
    c.expect(dt < 60.0, "runtime " + fmt(dt) + "s exceeds 60s");
    c.note(fmt(dt) + "s total");
}

// ---------------------------------------------------------------------- 3
void rigidity_trend(Check& c) {
    const Game g = lwpbt(2);
    const Strategy base = canonical_lw_strategy(2);
    const double thetas[4] = {0.2, 0.1, 0.05, 0.02};
    double gap[4], lin[4], anti[4], cons[4];
    for (int i = 0; i < 4; ++i) {
        const Strategy bent = perturb_alice_per_question(base, thetas[i]);
        gap[i] = 1.0 - exact_value(g, bent);
        const RigidityDiagnostics d = rigidity_diagnostics(bent, 2);
        lin[i] = d.max_linearity;
        anti[i] = d.max_anticommutation;
        cons[i] = 1.0 - d.min_consistency;
        c.note("theta=" + fmt(thetas[i]) + " 1-omega=" + fmt(gap[i]) + " lin=" + fmt(lin[i]) +
               " anti=" + fmt(anti[i]) + " cons=" + fmt(cons[i]));
    }
    for (int i = 1; i < 4; ++i) {
        c.expect(gap[i] < gap[i - 1], "1-omega not strictly decreasing");
        c.expect(lin[i] < lin[i - 1], "linearity residual not strictly decreasing");
        c.expect(anti[i] < anti[i - 1], "anticommutation residual not strictly decreasing");
        c.expect(cons[i] < cons[i - 1], "consistency gap not strictly decreasing");
    }
    const Strategy zero = perturb_alice_per_question(base, 0.0);
    const RigidityDiagnostics d0 = rigidity_diagnostics(zero, 2);
    c.expect(d0.max_linearity < 1e-10, "theta=0 linearity residual " + fmt(d0.max_linearity));
    c.expect(d0.max_anticommutation < 1e-10,
             "theta=0 anticommutation residual " + fmt(d0.max_anticommutation));
    c.expect(1.0 - d0.min_consistency < 1e-10,
             "theta=0 consistency gap " + fmt(1.0 - d0.min_consistency));
    c.expect(1.0 - exact_value(g, zero) < 1e-10, "theta=0 value below 1");
}

// ---------------------------------------------------------------------- 4
void group_algebra_exhaustive(Check& c) {
    for (int n = 1; n <= 2; ++n) {
        const auto all = enumerate_group(n);
        const GroupElement e = group_identity(n);
        const GroupElement j = group_j(n);

        // Group axioms.
        for (const auto& g : all) {
            c.expect(multiply(g, e) == g && multiply(e, g) == g, "identity law");
            c.expect(multiply(g, inverse(g)) == e && multiply(inverse(g), g) == e,
                     "inverse law");
        }
        bool assoc = true;
        for (const auto& g : all)
            for (const auto& h : all)
                for (const auto& k : all)
                    assoc = assoc &&
                            multiply(multiply(g, h), k) == multiply(g, multiply(h, k));
        c.expect(assoc, "associativity");

        // R0: J is a central involution.  R1: the generators are involutions.
        // R2: X_i Z_i = J Z_i X_i on a site, cross-site generators commute.
        c.expect(multiply(j, j) == e, "J^2 = 1");
        for (const auto& g : all) c.expect(multiply(j, g) == multiply(g, j), "J central");
        const auto gen_x = [n](int i) { return GroupElement{n, 0, 1u << i, 0}; };
        const auto gen_z = [n](int i) { return GroupElement{n, 0, 0, 1u << i}; };
        for (int i = 0; i < n; ++i) {
            c.expect(multiply(gen_x(i), gen_x(i)) == e, "X_i^2 = 1");
            c.expect(multiply(gen_z(i), gen_z(i)) == e, "Z_i^2 = 1");
            c.expect(multiply(gen_x(i), gen_z(i)) ==
                         multiply(j, multiply(gen_z(i), gen_x(i))),
                     "X_i Z_i = J Z_i X_i");
            for (int k = 0; k < n; ++k) {
                if (k == i) continue;
                c.expect(multiply(gen_x(i), gen_z(k)) == multiply(gen_z(k), gen_x(i)),
                         "cross-site X Z commute");
                c.expect(multiply(gen_x(i), gen_x(k)) == multiply(gen_x(k), gen_x(i)),
                         "X X commute");
                c.expect(multiply(gen_z(i), gen_z(k)) == multiply(gen_z(k), gen_z(i)),
                         "Z Z commute");
            }
        }

        // Normal-form multiplication against the defining representation.
        bool sigma_exact = true;
        for (const auto& g : all)
            for (const auto& h : all) {
                const Matrix diff = sigma_matrix(g) * sigma_matrix(h) -
                                    sigma_matrix(multiply(g, h));
                sigma_exact = sigma_exact && diff.cwiseAbs().maxCoeff() == 0.0;
            }
        c.expect(sigma_exact, "sigma multiplication not exact at n=" + std::to_string(n));

        // Dimension count and column orthogonality at the identity.
        std::size_t dim_sq = 0;
        for (const auto& phi : irr_set(n))
            dim_sq += static_cast<std::size_t>(phi.dim()) * static_cast<std::size_t>(phi.dim());
        c.expect(dim_sq == group_order(n), "sum of squared dimensions");
        for (const auto& g : all) {
            Complex sum = 0.0;
            for (const auto& phi : irr_set(n))
                sum += static_cast<double>(phi.dim()) * phi.matrix(g).trace();
            const double want = g.is_identity() ? static_cast<double>(group_order(n)) : 0.0;
            c.expect(std::abs(sum - want) <= 1e-10, "completeness identity");
        }
        c.note("n=" + std::to_string(n) + " |G|=" + std::to_string(group_order(n)));
    }
}

// ---------------------------------------------------------------------- 5
void rounding_guarantee(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 1; n <= 2; ++n) {
        const Eigen::Index d = Eigen::Index{1} << n;
        const Matrix rho = Matrix::Identity(d, d) / static_cast<double>(d);
        const RoundingResult r = gowers_hatami_round(sigma_function(n), rho, subgroup_j(n));
        c.expect(r.max_residual <= 1e-12, "exact sigma residual " + fmt(r.max_residual));
        c.expect(r.isometry_error <= 1e-9, "V*V deviation " + fmt(r.isometry_error));
        c.expect(r.retained_labels == std::vector<std::string>{"sigma"},
                 "characters not filtered at n=" + std::to_string(n));
    }
    const Matrix rho1 = 0.5 * Matrix::Identity(2, 2);
    int in_band = 0;
    for (int k = 0; k < 20; ++k) {
        RandomStream rng(3000 + static_cast<std::uint64_t>(k));
        const double eps_knob = 0.01 + 0.01 * static_cast<double>(k);
        const GroupFunction f = perturbed_sigma(1, eps_knob, rng);
        const double defect = homomorphism_defect(f, rho1);
        if (defect >= 1e-4 && defect <= 1e-1) ++in_band;
        const RoundingResult r = gowers_hatami_round(f, rho1, subgroup_j(1));
        c.expect(r.max_residual <= defect + 1e-9,
                 "residual " + fmt(r.max_residual) + " exceeds defect " + fmt(defect));
        c.expect(r.isometry_error <= 1e-9, "perturbed V*V deviation");
    }
    c.expect(in_band == 20, "only " + std::to_string(in_band) + "/20 defects in [1e-4, 1e-1]");
    const double dt = seconds_since(t0);
    c.expect(dt < 120.0, "runtime " + fmt(dt) + "s exceeds 2min");
    c.note("20 perturbed functions in band, " + fmt(dt) + "s");
}

// ---------------------------------------------------------------------- 6
void spectral_probe(Check& c) {
    for (int n = 2; n <= 4; ++n) {
        const EprSpectralSummary s = epr_spectral_summary(n);
        c.expect(std::abs(s.top - 1.0) <= 1e-9, "top eigenvalue " + fmt(s.top));
        c.expect(std::abs(s.second - (n - 1.0) / n) <= 1e-9,
                 "second eigenvalue " + fmt(s.second));
        c.expect(s.second < 1.0 - 1e-9, "top eigenvalue not simple");
        c.expect(s.epr_overlap * s.epr_overlap >= 1.0 - 1e-9,
                 "eigenvector fidelity " + fmt(s.epr_overlap * s.epr_overlap));
        c.note("n=" + std::to_string(n) + " top=" + fmt(s.top) + " second=" + fmt(s.second));
    }
}

// ---------------------------------------------------------------------- 7
void semi_honest_identity(Check& c) {
    for (const XZHamiltonian& h : {fixture_ham_a(), fixture_ham_b(), fixture_ham_c()}) {
        const Vector ground = ground_state(h);
        const Strategy honest = honest_strategy(h, ground);
        for (const double p : {0.25, 0.6}) {
            const double got = exact_value(hamiltonian_game(h, p), honest);
            const double want = semi_honest_value(h, p, ground);
            c.expect(std::abs(got - want) <= 1e-9,
                     "n=" + std::to_string(h.n) + " p=" + fmt(p) + ": " + fmt(got) +
                         " != " + fmt(want));
        }

        // E[c prod d] = <ground| sigma_l |ground> by exhausting Alice's
        // outcome and every Bell key.
        const int n = h.n;
        for (int t = 0; t < h.term_count(); ++t) {
            const auto& term = h.terms[static_cast<std::size_t>(t)];
            double mean = 0.0;
            for (const auto& [a, post] : measure_branches(honest, true, term.letters,
                                                          honest.state)) {
                if (post.amps.squaredNorm() < 1e-300) continue;
                for (const auto& [b, post2] : measure_branches(honest, false, "energy", post)) {
                    const double prob = post2.amps.squaredNorm();
                    if (prob <= 0.0) continue;
                    const EnergyRoundExplanation e = explain_energy_round(h, t, a, b);
                    mean += prob * static_cast<double>(e.product);
                }
            }
            const Matrix sigma = pauli_to_matrix(PauliString::from_letters(term.letters));
            const double want = (ground.adjoint() * sigma * ground)(0).real();
            c.expect(std::abs(mean - want) <= 1e-9,
                     "term " + term.letters + ": E[c prod d] " + fmt(mean) + " != " + fmt(want));
        }
        c.note("n=" + std::to_string(h.n) + " ok (" + std::to_string(h.term_count()) +
               " terms)");
    }
}

// ---------------------------------------------------------------------- 8
void clock_construction(Check& c) {
    const std::vector<Circuit> circuits = {fixture_circuit_one(), fixture_circuit_two(),
                                           fixture_circuit_three()};
    RandomStream rng(808);
    for (std::size_t ci = 0; ci < circuits.size(); ++ci) {
        const Circuit& circ = circuits[ci];
        const int total = clock_total_qubits(circ);
        const XZHamiltonian h = circuit_to_hamiltonian(circ);
        for (const auto& t : h.terms) {
            c.expect(t.letters.find('Y') == std::string::npos, "Y letter in " + t.letters);
            c.expect(PauliString::from_letters(t.letters).weight() <= 6,
                     "term weight above 6: " + t.letters);
            c.expect(std::abs(t.gamma) <= 1.0 + 1e-12, "coefficient above 1");
        }

        Vector witness(Eigen::Index{1} << circ.p);
        for (Eigen::Index i = 0; i < witness.size(); ++i)
            witness(i) = Complex{rng.gaussian(), rng.gaussian()};
        witness /= witness.norm();
        const StateVector psi = history_state_pure(circ, witness);
        const Matrix witness_density = witness * witness.adjoint();
        for (const auto& b : clock_terms(circ)) {
            if (b.label == "out") continue;
            const Matrix op = embed_operator(b.op, b.qubits, total);
            const double direct = (psi.amps.adjoint() * op * psi.amps)(0).real();
            c.expect(std::abs(direct) <= 1e-9,
                     "history energy " + fmt(direct) + " on " + b.label);
            const Matrix local = local_density(circ, witness_density, b.qubits);
            const double via_local = (b.op * local).trace().real();
            c.expect(std::abs(via_local) <= 1e-9,
                     "local-density energy " + fmt(via_local) + " on " + b.label);
        }
        c.note("circuit " + std::to_string(ci + 1) + ": " + std::to_string(h.term_count()) +
               " flattened terms on " + std::to_string(total) + " qubits");
    }
}

// ---------------------------------------------------------------------- 9
void gate_decompositions(Check& c) {
    const auto h = pauli_decompose(gate_base_matrix(Gate::h(0)));
    std::map<std::string, double> hm(h.begin(), h.end());
    const double invrt2 = 1.0 / std::sqrt(2.0);
    c.expect(hm.size() == 2 && std::abs(hm.at("X") - invrt2) <= 1e-12 &&
                 std::abs(hm.at("Z") - invrt2) <= 1e-12,
             "H gate decomposition");

    const auto cx = pauli_decompose(gate_base_matrix(Gate::cx(0, 1)));
    std::map<std::string, double> cm(cx.begin(), cx.end());
    c.expect(cm.size() == 4, "CX decomposition size");
    c.expect(std::abs(cm.at("II") - 0.5) <= 1e-12, "CX II coefficient");
    c.expect(std::abs(cm.at("ZI") - 0.5) <= 1e-12, "CX ZI coefficient");
    c.expect(std::abs(cm.at("IX") - 0.5) <= 1e-12, "CX IX coefficient");
    c.expect(std::abs(cm.at("ZX") + 0.5) <= 1e-12, "CX ZX coefficient");
}

// --------------------------------------------------------------------- 10
void anchoring_and_repetition(Check& c) {
    const Game ms = magic_square_game();
    const Game lw = lwpbt(2);
    const std::vector<std::pair<const Game*, Strategy>> cases = {
        {&ms, canonical_ms_strategy()},
        {&ms, uniform_random_strategy(ms)},
        {&lw, canonical_lw_strategy(2)},
        {&lw, flipped_b1_strategy(canonical_lw_strategy(2))},
        {&lw, perturb_alice_per_question(canonical_lw_strategy(2), 0.1)},
    };
    for (const auto& [g, s] : cases) {
        const double omega = exact_value(*g, s);
        const double anchored = exact_value(anchor_game(*g), anchor_strategy(s));
        c.expect(std::abs(anchored - (1.0 - (1.0 - omega) / 2.0)) <= 1e-12,
                 "anchored value " + fmt(anchored) + " vs omega " + fmt(omega));
    }
    c.note("affine law on 5 strategies");

    const std::vector<std::pair<double, double>> grid = {
        {0.3, 0.1}, {0.5, 0.1}, {0.7, 0.2}, {0.9, 0.1}};
    for (const auto& [ea, eb] : grid) {
        const RepetitionParams r = repetition_params(ea, eb, 1.0);
        const double miss_yes = binomial_cdf(r.rounds, 1.0 - eb / 2.0, std::floor(r.threshold));
        const double pass_no = threshold_accept_prob(r.rounds, 1.0 - ea / 2.0, r.threshold);
        c.expect(miss_yes <= 0.25,
                 "yes-side tail " + fmt(miss_yes) + " above 1/4 at m=" + fmt(r.rounds));
        c.expect(pass_no <= 0.25,
                 "no-side tail " + fmt(pass_no) + " above 1/4 at m=" + fmt(r.rounds));
        c.note("eps=(" + fmt(ea) + "," + fmt(eb) + ") m=" + fmt(r.rounds) + " tails " +
               fmt(miss_yes) + "/" + fmt(pass_no));
    }

    const double p = 0.9;
    const double omega_no = semi_honest_value(gap_demo_high(), p);
    const double eps_a = 1.0 - omega_no;
    const RepetitionParams r = repetition_params(eps_a, 0.0, 1.0);
    const double rounds = 25.0;
    const double threshold = (1.0 - eps_a / 2.0 + r.gamma) * rounds;
    const double accept_yes = threshold_accept_prob(rounds, 1.0, threshold);
    const double accept_no = threshold_accept_prob(rounds, 1.0 - eps_a / 2.0, threshold);
    c.expect(accept_yes - accept_no > 0.25,
             "gap demo separation " + fmt(accept_yes - accept_no));
    c.note("gap demo at m=25: yes " + fmt(accept_yes) + ", no " + fmt(accept_no));
}

// --------------------------------------------------------------------- 11
void zk_audit_all_policies(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Circuit circ = accepting_circuit();
    Vector witness(2);
    witness << 0.0, 1.0;
    for (const auto& pol : zk_shipped_policies(clock_total_qubits(circ))) {
        const ZkAuditResult r = zk_audit(circ, witness, pol);
        c.expect(r.distance <= 1e-9, r.policy + ": distance " + fmt(r.distance));
        c.note(r.policy + " distance " + fmt(r.distance));
    }
    const double dt = seconds_since(t0);
    c.expect(dt < 120.0, "runtime " + fmt(dt) + "s exceeds 2min");
    c.note(fmt(dt) + "s total");
}

// --------------------------------------------------------------------- 12
void device_completeness(Check& c) {
    const std::vector<std::pair<int, Strategy>> honest_cases = {
        {1, honest_strategy(fixture_ham_a())},
        {2, honest_strategy(fixture_ham_b())},
        {3, honest_strategy(fixture_ham_c())},
        {2, canonical_lw_strategy(2)},
        {3, canonical_lw_strategy(3)},
    };
    for (const auto& [n, s] : honest_cases) {
        const ImplementabilityReport r = implementable(ots_device(n), s);
        c.expect(r.ok, "honest n=" + std::to_string(n) + " rejected: " + r.reason);
    }

    Strategy heavy;
    heavy.state = epr_state(7);
    heavy.alice_qubits = 7;
    heavy.bob_dense_qubits = 7;
    heavy.alice_pvms["XXXXXXX"] =
        observable_pvm(pauli_to_matrix(PauliString::from_letters("XXXXXXX")));
    c.expect(!implementable(ots_device(7), heavy).ok, "weight-7 question accepted");

    Strategy skewed;
    Vector amps = Vector::Zero(8);
    amps(0b000) = 0.5;
    amps(0b110) = 0.5;
    amps(0b011) = 0.5;
    amps(0b101) = 0.5;
    skewed.state = StateVector{amps};
    skewed.alice_qubits = 1;
    skewed.bob_dense_qubits = 1;
    skewed.alice_pvms["Z"] = observable_pvm(pauli_to_matrix(PauliString::from_letters("Z")));
    c.expect(!implementable(ots_device(1), skewed).ok, "non-product state accepted");
}

// --------------------------------------------------------------------- 13
void monte_carlo_consistency(Check& c) {
    const long long rounds = 100000;
    struct Pair {
        std::string name;
        Game game;
        Strategy strategy;
        std::uint64_t seed;
    };
    std::vector<Pair> pairs;
    pairs.push_back({"magic_square/canonical", magic_square_game(), canonical_ms_strategy(),
                     101});
    pairs.push_back({"lwpbt2/canonical", lwpbt(2), canonical_lw_strategy(2), 102});
    pairs.push_back({"lwpbt2/perturbed0.1", lwpbt(2),
                     perturb_alice_per_question(canonical_lw_strategy(2), 0.1), 103});
    pairs.push_back({"lwpbt3/canonical", lwpbt(3), canonical_lw_strategy(3), 104});
    pairs.push_back({"G(ham_b,0.5)/honest", hamiltonian_game(fixture_ham_b(), 0.5),
                     honest_strategy(fixture_ham_b()), 105});
    pairs.push_back({"energy(ham_a)/honest", energy_test_game(fixture_ham_a()),
                     honest_strategy(fixture_ham_a()), 106});
    pairs.push_back({"lwpbt2+anchor/canonical", anchor_game(lwpbt(2)),
                     anchor_strategy(canonical_lw_strategy(2)), 107});
    for (const auto& pr : pairs) {
        const double omega = exact_value(pr.game, pr.strategy);
        const McResult r = run_protocol(pr.game, pr.strategy, rounds, pr.seed);
        const double sigma = std::sqrt(std::max(omega * (1.0 - omega), 0.0) /
                                       static_cast<double>(rounds));
        const double dev = std::abs(r.frequency - omega);
        c.expect(dev <= 3.0 * sigma + 1e-9,
                 pr.name + ": frequency " + fmt(r.frequency) + " vs value " + fmt(omega) +
                     " (3 sigma = " + fmt(3.0 * sigma) + ")");
        c.note(pr.name + ": " + fmt(r.frequency) + " vs " + fmt(omega));
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <1..13>\n";
        return 2;
    }
    const int which = std::atoi(argv[1]);
    Check c;
    try {
        switch (which) {
            case 1: magic_square_perfect(c); break;
            case 2: braiding_test_perfect(c); break;
            case 3: rigidity_trend(c); break;
            case 4: group_algebra_exhaustive(c); break;
            case 5: rounding_guarantee(c); break;
            case 6: spectral_probe(c); break;
            case 7: semi_honest_identity(c); break;
            case 8: clock_construction(c); break;
            case 9: gate_decompositions(c); break;
            case 10: anchoring_and_repetition(c); break;
            case 11: zk_audit_all_policies(c); break;
            case 12: device_completeness(c); break;
            case 13: monte_carlo_consistency(c); break;
            default: std::cerr << "unknown check " << which << "\n"; return 2;
        }
    } catch (const std::exception& e) {
        std::cout << "check " << which << " FAIL (exception: " << e.what() << ")\n";
        return 1;
    }
    std::cout << "check " << which << (c.ok ? " PASS" : " FAIL") << "\n" << c.log.str();
    return c.ok ? 0 : 1;
}
