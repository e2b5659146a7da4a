#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace liouville {

// Small fixed-capacity vector for flow states (dimension 2..6).
struct Vec {
    std::array<double, 6> v{};
    int n = 0;

    Vec() = default;
    explicit Vec(int dim) : n(dim) {}
    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator*=(double c) {
        for (int i = 0; i < n; ++i) v[i] *= c;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator*(double c, Vec a) { return a *= c; }
    friend Vec operator-(Vec a, const Vec& b) {
        for (int i = 0; i < a.n; ++i) a.v[i] -= b.v[i];
        return a;
    }
    double norm() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i];
        return std::sqrt(s);
    }
};

inline double sqr(double x) { return x * x; }

// Deterministic RNG: mt19937_64 with a fixed u64->double mapping so that a
// given seed produces identical streams on any platform.
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next_u64() {
        // xorshift* generator; small, reproducible, good enough for sampling.
        uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

  private:
    uint64_t state_;
};

// Shortest-precision representation that round-trips a double.
inline std::string num_str(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

inline double clamp01(double x) { return x < 0 ? 0 : (x > 1 ? 1 : x); }

// Wrap x into [0, period).
inline double wrap(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0) y += period;
    return y;
}

}  // namespace liouville
