#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "circledyn/circle_map.hpp"

namespace circledyn {

struct RotationNumber {
    double value = 0.0;        // in [0,1)
    double error_bound = 0.0;  // |value - rho(f)| <= error_bound
    std::optional<Rational> exact;
};

// Birkhoff estimate: value = frac((F^n(x0) - x0)/n), error bound 2/n.
RotationNumber rotation_number_estimate(const CircleMap& f, double x0, long n);

// Smallest q <= q_max carrying a periodic point: solves F^q(x) = x + p by
// sign change on a refinable grid plus bisection to `tol` in lift coordinates.
std::optional<Rational> rotation_number_rational(const CircleMap& f, int q_max,
                                                 double tol = 1e-12);

struct ContinuedFraction {
    double theta = 0.0;
    std::vector<std::pair<long long, long long>> convergents;  // (p_k, q_k)
};

// Best-approximation denominators q_1 = 1 < q_2 < ... via the continued
// fraction recursion, cross-checked against the direct minimal-distance scan
// for q <= 10^4.
ContinuedFraction convergents(double theta, int count);

struct SemiconjugacyTable {
    std::vector<double> x;    // grid points in [0,1]
    std::vector<double> phi;  // nondecreasing, phi[0] == 0
    double rho = 0.0;
    double residual = 0.0;    // sup |phi(F(x)) - phi(x) - rho| over the grid

    double eval(double xq) const;  // linear interpolation, degree-one extension
};

// phi(x) = max_{|n| <= n_max} (F^n(x) - n rho), tabulated and normalized so
// that phi(0) = 0.  Throws for exactly-rational rho.
SemiconjugacyTable semiconjugacy_to_rotation(const CircleMap& f, const RotationNumber& rho,
                                             int n_max, int grid);

// Lower bound for V(f) = var(log f') via dyadic refinement.
double variation_log_derivative(const CircleMap& f, int refinement_levels);

struct BVFunction {
    std::function<double(double)> eval;
    double total_variation = 0.0;
    std::string name;
};

struct DenjoyKoksmaReport {
    long long q = 0;                 // convergent denominator used
    double lhs = 0.0;                // |sum_{i<q} psi(f^i x) - q mu(psi)|
    double bound = 0.0;              // var(psi) + slack
    bool pass = false;
    double mu_psi = 0.0;
    // Denjoy inequality diagnostics for psi = log f' (filled when requested)
    double denjoy_min = 0.0, denjoy_max = 0.0, denjoy_v = 0.0;
    bool denjoy_pass = true;
};

struct DenjoyKoksmaOptions {
    double x0 = 0.137;
    long long birkhoff_n = 1000000;  // >= 1e5 per contract
    double slack = 1e-3;
    bool check_denjoy_inequality = false;  // uses psi = log f'
    int denjoy_samples = 100;
    std::optional<double> mu_psi_exact;    // integral supplied by the caller
};

DenjoyKoksmaReport denjoy_koksma_check(const CircleMap& f, const BVFunction& psi,
                                       int k, const DenjoyKoksmaOptions& opt = {});

// translation number of a line homeomorphism with respect to an invariant
// Radon measure; invariance is checked on sample boxes first
double translation_number(const LineMap& g, const LineMeasure& v,
                          double box_lo = -2.0, double box_hi = 3.0,
                          double invariance_tol = 1e-9);

struct CrossedCertificate {
    double a = 0.0, b = 0.0;   // interval with Fix(fixer) cap [a,b] = {a,b}
    bool f_is_fixer = true;    // whether f (rather than g) fixes a and b
    int m = 0, n = 0;          // ping-pong words u = fixer^m, t = mover o fixer^n
    double A0_hi = 0.0;        // A0 = (a, A0_hi]
    double A1_lo = 0.0, A1_hi = 0.0;
    std::vector<std::string> verified;
};

std::optional<CrossedCertificate> detect_crossed_elements(const LineMap& f, const LineMap& g,
                                                          int search_grid,
                                                          double lo = 0.0, double hi = 1.0);

struct MinimalSetReport {
    enum class Kind { FiniteOrbit, Dense, Cantor } kind;
    int cardinality = 0;               // FiniteOrbit
    std::vector<std::pair<double, double>> gaps;  // Cantor: (left endpoint, length)
    long long depth = 0;
    int resolution = 0;
    long long points_seen = 0;
    std::string note = "depth-limited classification, not a proof";
};

MinimalSetReport classify_minimal_set(const std::vector<CircleMap>& gens, double x0,
                                      long long depth, int resolution);

// rho_mu(f) = mu([x, f(x))), checked for x-independence
double rho_mu(const CircleMap& f, const CircleMeasure& mu, int samples = 50,
              double spread_tol = 1e-3);

}  // namespace circledyn
