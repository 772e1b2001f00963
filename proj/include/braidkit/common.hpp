#pragma once

// Shared aliases, seeded random streams and small numeric helpers used by
// every other header in the library.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace braidkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool is_power_of_two(Eigen::Index v) { return v > 0 && (v & (v - 1)) == 0; }

// Number of qubits for a dimension that must be a power of two.
inline int qubit_count(Eigen::Index dim) {
    require(is_power_of_two(dim), "dimension is not a power of two");
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    return n;
}

// Qubit 0 is the most significant position of a basis index (leftmost tensor
// factor).  Every indexing computation in the library goes through these two
// helpers so the convention lives in one place.
inline int qubit_bit(Eigen::Index index, int qubit, int total_qubits) {
    return static_cast<int>((index >> (total_qubits - 1 - qubit)) & 1);
}

inline Eigen::Index set_qubit_bit(Eigen::Index index, int qubit, int total_qubits, int bit) {
    const Eigen::Index mask = Eigen::Index{1} << (total_qubits - 1 - qubit);
    return bit ? (index | mask) : (index & ~mask);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Seeded random stream.  All sampling in the library takes an explicit
// stream; per-component streams are derived from one root seed by hashing a
// textual label, so a single 64-bit seed reproduces an entire run.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    static RandomStream derived(std::uint64_t root_seed, std::string_view label) {
        return RandomStream(splitmix64(root_seed ^ fnv1a64(label)));
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

    std::uint64_t bits() { return eng_(); }

    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    // Index into a nonnegative weight vector, proportional to weight.
    int pick(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        require(total > 0.0, "pick: weights sum to zero");
        double r = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r <= 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size() - 1);
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace braidkit
