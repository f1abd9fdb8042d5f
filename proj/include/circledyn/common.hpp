#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace circledyn {

// Error taxonomy shared by all modules.  CLI exit codes: precondition-type
// failures map to 2, convergence failures to 3.
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& m) : std::runtime_error(m) {}
};
struct invalid_map_error : precondition_error {
    explicit invalid_map_error(const std::string& m) : precondition_error(m) {}
};
struct capability_error : precondition_error {
    explicit capability_error(const std::string& m) : precondition_error(m) {}
};
struct domain_error : precondition_error {
    explicit domain_error(const std::string& m) : precondition_error(m) {}
};
struct precision_error : precondition_error {
    explicit precision_error(const std::string& m) : precondition_error(m) {}
};
struct resource_error : precondition_error {
    explicit resource_error(const std::string& m) : precondition_error(m) {}
};
struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& m) : std::runtime_error(m) {}
};

// fractional part in [0,1)
inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;   // guards against floor(x) = x - 1 rounding
    if (f < 0.0) f += 1.0;
    return f;
}

// distance on R/Z
inline double circle_dist(double a, double b) {
    double d = frac(a - b);
    return std::min(d, 1.0 - d);
}

// dist(x, Z)
inline double dist_to_int(double x) {
    double f = frac(x);
    return std::min(f, 1.0 - f);
}

inline double sq(double x) { return x * x; }

// Kahan compensated accumulator
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// Invert a strictly increasing function by bisection on [lo, hi].
// Caller guarantees f(lo) <= y <= f(hi).
inline double invert_increasing(const std::function<double(double)>& f,
                                double lo, double hi, double y,
                                double tol = 1e-14, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (!(flo <= y && y <= fhi))
        throw domain_error("invert_increasing: target not bracketed");
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < y) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Adaptive Simpson quadrature.
namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}
inline double adsimp(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole,
                     double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adsimp(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adsimp(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::adsimp(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// SplitMix64: used to derive independent per-path seeds from a master seed.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t s) : state(s) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro-free deterministic uniforms: mt19937_64 output is pinned by the
// standard, but the std distributions are not; we map raw words ourselves.
template <class URBG>
inline double uniform01(URBG& g) {
    return (g() >> 11) * 0x1.0p-53;
}

template <class URBG>
inline double uniform(URBG& g, double a, double b) {
    return a + (b - a) * uniform01(g);
}

// index sampled from an unnormalized weight vector (deterministic given bits)
template <class URBG>
inline std::size_t sample_index(URBG& g, const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform01(g) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        acc += w[i];
        if (u < acc) return i;
    }
    return w.size() - 1;
}

// greatest common divisor on 64-bit (non-negative result)
inline long long gcd_ll(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { long long t = a % b; a = b; b = t; }
    return a;
}

struct Rational {
    long long p = 0, q = 1;
    void normalize() {
        if (q < 0) { p = -p; q = -q; }
        long long g = gcd_ll(p, q);
        if (g > 1) { p /= g; q /= g; }
    }
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

}  // namespace circledyn
