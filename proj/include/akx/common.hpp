#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace akx {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base field of an algebra. Complex conjugation restricts to the identity
/// on the real field; real-field values keep a pinned-zero imaginary part
/// so that every code path runs complex arithmetic.
enum class ScalarField { real, complex_ };

inline std::string to_string(ScalarField f) {
    return f == ScalarField::real ? "real" : "complex";
}

/// n! as a double. Exact up to n = 22, correctly rounded beyond; overflows
/// past n = 170, which is far outside any truncation order used here.
inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= static_cast<double>(i);
    return r;
}

/// Binomial coefficient C(n,k) as a double (multiplicative form).
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Deterministic uniform generator. Doubles are extracted from the raw
/// 64-bit stream directly so a given seed yields the same sequence on any
/// platform, independent of the standard library's distribution code.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    cplx complex_in_box(double half_width, bool real_only) {
        double re = half_width * symmetric();
        double im = real_only ? 0.0 : half_width * symmetric();
        return {re, im};
    }

  private:
    std::uint64_t state_;
};

}  // namespace akx
