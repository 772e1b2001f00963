// braidkit: reproducible experiment runner over the library modules.
//
// Every command is deterministic given (config, seed): per-component random
// streams are derived from the root seed by labeled hashing, outputs are
// sorted-key JSON (or '.'-decimal CSV) with values rounded at 1e-12, and row
// order follows sort keys, so reruns are byte-identical.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "braidkit/catalog.hpp"
#include "braidkit/group.hpp"
#include "braidkit/io.hpp"
#include "braidkit/protocol.hpp"

using namespace braidkit;

namespace {

// Command line wins, then the config file, then the built-in default.
template <typename T>
void from_config(const CLI::Option* opt, const Json& cfg, const std::string& key, T& var) {
    if (opt != nullptr && opt->count() > 0) return;
    if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::uint64_t sub_seed(std::uint64_t root, std::string_view label) {
    return RandomStream::derived(root, label).bits();
}

Json ham_summary(const XZHamiltonian& h) {
    Json terms = Json::array();
    for (const auto& t : h.terms) terms.push_back({{"gamma", round12(t.gamma)}, {"letters", t.letters}});
    return {{"n", h.n}, {"terms", terms}};
}

// --------------------------------------------------------------------------

struct SweepArgs {
    int n = 2;
    std::vector<double> grid = {0.0, 0.02, 0.05, 0.1, 0.2};
};

std::string run_rigidity_sweep(const SweepArgs& a, const std::string& format) {
    require(a.n == 2 || a.n == 3, "rigidity-sweep: n must be 2 or 3");
    require(!a.grid.empty(), "rigidity-sweep: empty theta grid");
    for (double t : a.grid) require(t >= 0.0, "rigidity-sweep: theta must be nonnegative");
    std::vector<double> grid = a.grid;
    std::sort(grid.begin(), grid.end());

    const Game game = lwpbt(a.n);
    const Strategy base = canonical_lw_strategy(a.n);
    struct Row {
        double theta, gap, cons, lin, anti;
    };
    std::vector<Row> rows;
    for (double theta : grid) {
        const Strategy s = perturb_alice_per_question(base, theta);
        const RigidityDiagnostics d = rigidity_diagnostics(s, a.n);
        rows.push_back({theta, 1.0 - exact_value(game, s), 1.0 - d.min_consistency,
                        d.max_linearity, d.max_anticommutation});
    }

    if (format == "csv") {
        std::ostringstream os;
        os << "theta,one_minus_value,consistency_gap_max,linearity_residual_max,"
              "anticommutation_residual_max\n";
        for (const Row& r : rows)
            os << csv_number(round12(r.theta)) << ',' << csv_number(round12(r.gap)) << ','
               << csv_number(round12(r.cons)) << ',' << csv_number(round12(r.lin)) << ','
               << csv_number(round12(r.anti)) << '\n';
        return os.str();
    }
    Json out = {{"command", "rigidity-sweep"}, {"n", a.n}, {"rows", Json::array()}};
    for (const Row& r : rows)
        out["rows"].push_back({{"theta", round12(r.theta)},
                               {"one_minus_value", round12(r.gap)},
                               {"consistency_gap_max", round12(r.cons)},
                               {"linearity_residual_max", round12(r.lin)},
                               {"anticommutation_residual_max", round12(r.anti)}});
    return dump(out);
}

// --------------------------------------------------------------------------

struct EnergyArgs {
    std::string ham_path;
    bool has_p = false;
    double p = 0.0;
    bool has_promise = false;
    double alpha = 0.0, beta = 0.0, clw = 1.0;
    long long rounds = 100000;
    std::uint64_t seed = 1;
};

std::string run_energy_demo(const EnergyArgs& a) {
    require(!a.ham_path.empty(), "energy-demo: --ham is required");
    require(a.has_p != a.has_promise,
            "energy-demo: supply exactly one of --p or the (--alpha, --beta) promise pair");
    require(a.rounds > 0, "energy-demo: rounds must be positive");
    const XZHamiltonian h = ham_from_json(Json::parse(read_text_file(a.ham_path)));
    const double p = a.has_p ? a.p : default_p(h.n, a.alpha - a.beta, a.clw);
    require(p >= 0.0 && p < 1.0, "energy-demo: p must lie in [0, 1)");

    const Strategy honest = honest_strategy(h);
    const Game game = p == 0.0
                          ? (h.n >= 2 ? lwpbt(h.n) : lw_linearity_test(1))
                          : hamiltonian_game(h, p);
    const double formula = p == 0.0 ? 1.0 : semi_honest_value(h, p);
    const double exact = exact_value(game, honest);
    const McResult mc = run_protocol(game, honest, a.rounds, sub_seed(a.seed, "energy-demo/mc"));
    const double sigma =
        std::sqrt(std::max(exact * (1.0 - exact), 0.0) / static_cast<double>(a.rounds));

    Json out = {
        {"command", "energy-demo"},
        {"hamiltonian", ham_summary(h)},
        {"lambda0", round12(ground_energy(h))},
        {"p", round12(p)},
        {"semi_honest_value", round12(formula)},
        {"exact_value", round12(exact)},
        {"monte_carlo",
         {{"rounds", a.rounds},
          {"seed", a.seed},
          {"frequency", round12(mc.frequency)},
          {"sigma", round12(sigma)}}},
        {"deltas",
         {{"exact_vs_formula", round12(std::abs(exact - formula))},
          {"mc_vs_exact", round12(std::abs(mc.frequency - exact))},
          {"within_3_sigma", std::abs(mc.frequency - exact) <= 3.0 * sigma + 1e-9}}},
    };
    return dump(out);
}

// --------------------------------------------------------------------------

struct ZkArgs {
    std::string circuit_path;
    int witness_basis = 0;
};

std::string run_zk_audit(const ZkArgs& a) {
    require(!a.circuit_path.empty(), "zk-audit: --circuit is required");
    const Circuit circ = circuit_from_json(Json::parse(read_text_file(a.circuit_path)));
    const int total = clock_total_qubits(circ);
    require(total <= 5, "zk-audit: circuit needs " + std::to_string(total) +
                            " clock-construction qubits; the exact audit caps at 5");
    const Eigen::Index wdim = Eigen::Index{1} << circ.p;
    require(a.witness_basis >= 0 && a.witness_basis < wdim,
            "zk-audit: witness basis index out of range");
    Vector witness = Vector::Zero(wdim);
    witness(a.witness_basis) = 1.0;

    Json policies = Json::array();
    bool all_pass = true;
    for (const auto& pol : zk_shipped_policies(total)) {
        const ZkAuditResult r = zk_audit(circ, witness, pol);
        const bool pass = r.distance <= 1e-9;
        all_pass = all_pass && pass;
        policies.push_back({{"policy", r.policy},
                            {"distance", round12(r.distance)},
                            {"honest_support", r.honest_view.size()},
                            {"simulated_support", r.simulated_view.size()},
                            {"pass", pass}});
    }
    Json out = {{"command", "zk-audit"},
                {"circuit", circuit_to_json(circ)},
                {"witness_basis", a.witness_basis},
                {"clock_qubits", total},
                {"policies", policies},
                {"all_pass", all_pass}};
    return dump(out);
}

// --------------------------------------------------------------------------

struct GapArgs {
    double p = 0.9;
    double m = 25.0;
    double big_c = 1.0;
};

std::string run_gap_demo(const GapArgs& a) {
    require(a.p > 0.0 && a.p < 1.0, "gap-demo: p must lie in (0, 1)");
    require(a.m >= 1.0, "gap-demo: m must be at least 1");
    const double omega_yes = semi_honest_value(gap_demo_low(), a.p);
    const double omega_no = semi_honest_value(gap_demo_high(), a.p);
    const double eps_alpha = 1.0 - omega_no;
    require(eps_alpha > 0.0, "gap-demo: instances do not separate at this p");
    const RepetitionParams rec = repetition_params(eps_alpha, 0.0, a.big_c);
    const double threshold = (1.0 - eps_alpha / 2.0 + rec.gamma) * a.m;
    const double accept_yes = threshold_accept_prob(a.m, 1.0, threshold);
    const double accept_no = threshold_accept_prob(a.m, 1.0 - eps_alpha / 2.0, threshold);

    Json out = {
        {"command", "gap-demo"},
        {"model", "independent rounds (product strategies only)"},
        {"p", round12(a.p)},
        {"omega_yes", round12(omega_yes)},
        {"omega_no", round12(omega_no)},
        {"anchored_yes", round12(1.0 - (1.0 - omega_yes) / 2.0)},
        {"anchored_no", round12(1.0 - (1.0 - omega_no) / 2.0)},
        {"eps_alpha", round12(eps_alpha)},
        {"gamma", round12(rec.gamma)},
        {"recommended_rounds", rec.rounds},
        {"m", round12(a.m)},
        {"threshold", round12(threshold)},
        {"accept_yes", round12(accept_yes)},
        {"accept_no", round12(accept_no)},
        {"separation", round12(accept_yes - accept_no)},
        {"separated", accept_yes - accept_no > 0.25},
    };
    return dump(out);
}

// --------------------------------------------------------------------------

struct GhArgs {
    int n = 1;
    double eps = 0.0;
    std::uint64_t seed = 1;
};

std::string run_gh_round(const GhArgs& a) {
    require(a.n >= 1 && a.n <= 3, "gh-round: n must lie in [1, 3]");
    require(a.eps >= 0.0 && a.eps <= 0.5, "gh-round: eps must lie in [0, 0.5]");
    GroupFunction f = sigma_function(a.n);
    if (a.eps > 0.0) {
        RandomStream rng = RandomStream::derived(a.seed, "gh-round/perturb");
        f = perturbed_sigma(a.n, a.eps, rng);
    }
    const Eigen::Index d = Eigen::Index{1} << a.n;
    const Matrix rho = Matrix::Identity(d, d) / static_cast<double>(d);
    const RoundingResult r = gowers_hatami_round(f, rho, subgroup_j(a.n));

    Json out = {{"command", "gh-round"},
                {"n", a.n},
                {"eps", round12(a.eps)},
                {"seed", a.seed},
                {"defect", round12(r.defect)},
                {"max_residual", round12(r.max_residual)},
                {"isometry_error", round12(r.isometry_error)},
                {"retained", r.retained_labels},
                {"rounding_bound_ok", r.max_residual <= r.defect + 1e-9}};
    return dump(out);
}

// --------------------------------------------------------------------------

std::string run_device_spec(int n) {
    const OtsDevice d = ots_device(n);
    std::vector<std::string> menu = d.menu;
    std::sort(menu.begin(), menu.end());
    Json out = {{"command", "device-spec"},
                {"n", d.n},
                {"state",
                 {{"kind", "epr_pairs"},
                  {"pairs", d.n},
                  {"qubits", 2 * d.n},
                  {"description", "n maximally entangled qubit pairs, halves "
                                  "labeled (alice_i, bob_i)"}}},
                {"menu", menu},
                {"menu_size", menu.size()}};
    return dump(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"braidkit: desk-scale two-prover proof system experiments"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    std::uint64_t seed = 1;

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("rigidity-sweep",
                                       "Braiding-test value and rigidity residuals over a "
                                       "perturbation grid");
    auto* o_sw_n = c_sweep->add_option("--n", sweep.n, "Number of qubit pairs (2 or 3)");
    auto* o_sw_grid = c_sweep->add_option("--theta-grid", sweep.grid,
                                          "Perturbation angles (default 0 0.02 0.05 0.1 0.2)");

    EnergyArgs energy;
    auto* c_energy = app.add_subcommand("energy-demo",
                                        "Semi-honest value identity and Monte Carlo check for "
                                        "a Hamiltonian file");
    auto* o_en_ham = c_energy->add_option("--ham", energy.ham_path, "Hamiltonian JSON file");
    auto* o_en_p = c_energy->add_option("--p", energy.p, "Energy-test mixing weight override");
    auto* o_en_alpha = c_energy->add_option("--alpha", energy.alpha, "Promise gap alpha");
    auto* o_en_beta = c_energy->add_option("--beta", energy.beta, "Promise gap beta");
    auto* o_en_clw = c_energy->add_option("--clw", energy.clw, "Rigidity constant c_lw");
    auto* o_en_rounds = c_energy->add_option("--rounds", energy.rounds, "Monte Carlo rounds");

    ZkArgs zk;
    auto* c_zk = app.add_subcommand("zk-audit",
                                    "Honest view vs simulator distance for every shipped "
                                    "adversary policy");
    auto* o_zk_circ = c_zk->add_option("--circuit", zk.circuit_path, "Circuit JSON file");
    auto* o_zk_wit = c_zk->add_option("--witness-basis", zk.witness_basis,
                                      "Computational basis witness index");

    GapArgs gap;
    auto* c_gap = app.add_subcommand("gap-demo",
                                     "Completeness-soundness separation of the shipped "
                                     "instance pair under threshold repetition");
    auto* o_gap_p = c_gap->add_option("--p", gap.p, "Energy-test mixing weight");
    auto* o_gap_m = c_gap->add_option("--m", gap.m, "Repetition rounds for the acceptance "
                                                    "computation");
    auto* o_gap_c = c_gap->add_option("--bigC", gap.big_c, "Repetition constant C");

    GhArgs gh;
    auto* c_gh = app.add_subcommand("gh-round",
                                    "Round a (possibly perturbed) group function to the "
                                    "nearest representation");
    auto* o_gh_n = c_gh->add_option("--n", gh.n, "Number of qubit pairs (1 to 3)");
    auto* o_gh_eps = c_gh->add_option("--eps", gh.eps, "Perturbation strength (0 = exact)");

    int device_n = 2;
    auto* c_dev = app.add_subcommand("device-spec",
                                     "Machine-readable off-the-shelf device description");
    auto* o_dev_n = c_dev->add_option("--n", device_n, "Number of EPR pairs (1 to 7)");

    std::vector<CLI::Option*> o_config(6), o_seed(6), o_out(6), o_format(6);
    const std::vector<CLI::App*> subs = {c_sweep, c_energy, c_zk, c_gap, c_gh, c_dev};
    for (std::size_t i = 0; i < subs.size(); ++i) {
        o_config[i] = subs[i]->add_option("--config", config_path, "JSON config file; "
                                                                   "flags override");
        o_seed[i] = subs[i]->add_option("--seed", seed, "Root seed for derived streams");
        o_out[i] = subs[i]->add_option("--out", out_path, "Output file (default stdout)");
        o_format[i] = subs[i]->add_option("--format", format, "json or csv")
                          ->check(CLI::IsMember({"json", "csv"}));
    }

    try {
        app.parse(argc, argv);

        const std::size_t which = [&]() -> std::size_t {
            for (std::size_t i = 0; i < subs.size(); ++i)
                if (subs[i]->parsed()) return i;
            return 0;
        }();

        Json cfg = Json::object();
        if (!config_path.empty()) cfg = Json::parse(read_text_file(config_path));
        from_config(o_seed[which], cfg, "seed", seed);
        from_config(o_out[which], cfg, "out", out_path);
        from_config(o_format[which], cfg, "format", format);

        std::string text;
        if (subs[which] == c_sweep) {
            from_config(o_sw_n, cfg, "n", sweep.n);
            from_config(o_sw_grid, cfg, "theta_grid", sweep.grid);
            if (format.empty()) format = "csv";
            text = run_rigidity_sweep(sweep, format);
        } else if (subs[which] == c_energy) {
            from_config(o_en_ham, cfg, "ham", energy.ham_path);
            from_config(o_en_p, cfg, "p", energy.p);
            from_config(o_en_alpha, cfg, "alpha", energy.alpha);
            from_config(o_en_beta, cfg, "beta", energy.beta);
            from_config(o_en_clw, cfg, "clw", energy.clw);
            from_config(o_en_rounds, cfg, "rounds", energy.rounds);
            energy.has_p = o_en_p->count() > 0 || cfg.contains("p");
            energy.has_promise = o_en_alpha->count() > 0 || o_en_beta->count() > 0 ||
                                 cfg.contains("alpha") || cfg.contains("beta");
            energy.seed = seed;
            require(format.empty() || format == "json", "energy-demo: json output only");
            text = run_energy_demo(energy);
        } else if (subs[which] == c_zk) {
            from_config(o_zk_circ, cfg, "circuit", zk.circuit_path);
            from_config(o_zk_wit, cfg, "witness_basis", zk.witness_basis);
            require(format.empty() || format == "json", "zk-audit: json output only");
            text = run_zk_audit(zk);
        } else if (subs[which] == c_gap) {
            from_config(o_gap_p, cfg, "p", gap.p);
            from_config(o_gap_m, cfg, "m", gap.m);
            from_config(o_gap_c, cfg, "bigC", gap.big_c);
            require(format.empty() || format == "json", "gap-demo: json output only");
            text = run_gap_demo(gap);
        } else if (subs[which] == c_gh) {
            from_config(o_gh_n, cfg, "n", gh.n);
            from_config(o_gh_eps, cfg, "eps", gh.eps);
            gh.seed = seed;
            require(format.empty() || format == "json", "gh-round: json output only");
            text = run_gh_round(gh);
        } else {
            from_config(o_dev_n, cfg, "n", device_n);
            require(format.empty() || format == "json", "device-spec: json output only");
            text = run_device_spec(device_n);
        }
        emit(text, out_path);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << Json{{"error", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
