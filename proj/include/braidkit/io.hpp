#pragma once

// Serialization: JSON for Hamiltonians, circuits and result payloads, CSV
// rows for sweeps.  JSON objects use sorted keys (nlohmann's default map
// ordering) so outputs are byte-stable; probabilities fed to outputs should
// pass through round12 first to strip float jitter.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "braidkit/common.hpp"
#include "braidkit/hamiltonian.hpp"
#include "braidkit/protocol.hpp"

namespace braidkit {

using Json = nlohmann::json;

inline double round12(double x) {
    const double r = std::round(x * 1e12) / 1e12;
    return r == 0.0 ? 0.0 : r;  // normalize -0
}

inline Json ham_to_json(const XZHamiltonian& h) {
    Json terms = Json::array();
    for (const auto& t : h.terms) terms.push_back(Json{{"gamma", t.gamma}, {"letters", t.letters}});
    return Json{{"n", h.n}, {"terms", terms}};
}

inline XZHamiltonian ham_from_json(const Json& j) {
    XZHamiltonian h;
    h.n = j.at("n").get<int>();
    for (const auto& t : j.at("terms"))
        h.terms.push_back(HamTerm{t.at("gamma").get<double>(), t.at("letters").get<std::string>()});
    validate_xz_hamiltonian(h);
    return h;
}

inline Json circuit_to_json(const Circuit& c) {
    Json gates = Json::array();
    for (const auto& g : c.gates) {
        const char* kind = g.kind == Gate::H ? "h" : (g.kind == Gate::CX ? "cx" : "ccx");
        gates.push_back(Json{{"kind", kind}, {"qubits", g.qubits}});
    }
    return Json{{"p", c.p}, {"q", c.q}, {"gates", gates}};
}

inline Circuit circuit_from_json(const Json& j) {
    Circuit c;
    c.p = j.at("p").get<int>();
    c.q = j.at("q").get<int>();
    for (const auto& g : j.at("gates")) {
        const std::string kind = g.at("kind").get<std::string>();
        Gate gate;
        if (kind == "h")
            gate.kind = Gate::H;
        else if (kind == "cx")
            gate.kind = Gate::CX;
        else if (kind == "ccx")
            gate.kind = Gate::CCX;
        else
            throw std::invalid_argument("circuit: unknown gate kind " + kind);
        gate.qubits = g.at("qubits").get<std::vector<int>>();
        c.gates.push_back(std::move(gate));
    }
    validate_circuit(c);
    return c;
}

inline Json view_to_json(const ViewDist& v) {
    Json j = Json::object();
    for (const auto& [k, p] : v) j[k] = round12(p);
    return j;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_number(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << round12(x);
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "cannot open for writing: " + path);
    f << content;
    require(f.good(), "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "cannot open: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace braidkit
