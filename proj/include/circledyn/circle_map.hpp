#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circledyn/common.hpp"
#include "circledyn/moebius.hpp"

namespace circledyn {

// Orientation-preserving circle homeomorphism given through a lift
// F : R -> R with F(x+1) = F(x) + 1.  The descriptor records how the map
// was built (JSON, see json_io.hpp).
struct CircleMap {
    std::function<double(double)> lift;            // required
    std::function<double(double)> derivative;      // optional, of the lift
    std::function<double(double)> inverse_lift;    // optional exact inverse
    std::string smoothness = "C0";                 // C0, C1, C1+bv, C1+Hoelder, C1+w, analytic
    nlohmann::json descriptor;

    bool has_derivative() const { return static_cast<bool>(derivative); }

    double circle(double x) const { return frac(lift(x)); }

    // F^{-1}(y); uses the exact inverse when present, else bisection
    double lift_inverse(double y) const;

    // check translation commutation and monotonicity on a sampled grid
    void validate(int grid = 256, double commute_tol = 1e-12) const;
};

// Increasing homeomorphism of the real line.
struct LineMap {
    std::function<double(double)> eval;
    std::function<double(double)> derivative;  // optional
    std::vector<double> fixed_points;          // optional exact list
    nlohmann::json descriptor;

    bool has_derivative() const { return static_cast<bool>(derivative); }
    double inverse(double y, double lo, double hi) const;
};

// Probability measure on the circle: piecewise-uniform grid weights plus an
// optional atom list.  Atoms and grid are never mixed in one integral unless
// the caller sets allow_mixed.
struct CircleMeasure {
    int grid = 4096;
    std::vector<double> weights;                    // size grid, sums to mass
    std::vector<std::pair<double, double>> atoms;   // (position, mass)

    static CircleMeasure lebesgue(int n = 4096);
    static CircleMeasure bump(double center, double width, int n = 4096);

    double total_mass() const;
    void check_probability(double tol = 1e-12) const;

    // mass of the arc [a,b) of the grid part (a,b in lift coordinates, b-a<=1)
    double arc_mass(double a, double b) const;
    double l1_distance(const CircleMeasure& other) const;
    // integral of psi against the grid part (midpoint rule per cell)
    double integrate(const std::function<double(double)>& psi,
                     bool allow_mixed = false) const;
    // smallest-window report: center and window length holding >= target mass
    std::pair<double, double> concentration_arc(double target_mass) const;
};

// Radon measure on the line through a CDF-style distribution function
// G with v([a,b)) = G(b) - G(a); atoms are jumps of G.
struct LineMeasure {
    std::function<double(double)> cdf;
    std::vector<std::pair<double, double>> atoms;

    static LineMeasure lebesgue();
    static LineMeasure atomic(const std::vector<std::pair<double, double>>& atoms);

    double interval_mass(double a, double b) const { return cdf(b) - cdf(a); }
};

// --- factories ---------------------------------------------------------------

CircleMap rotation_map(double theta);

// piecewise-affine circle map: breakpoints 0 = x0 < x1 < ... < xk < 1 with
// values f(xi) (lift convention: values increasing, value(x0) in [0,1),
// value extended by degree one).  Derivative is the left-constant slope.
CircleMap pl_circle_map(const std::vector<double>& breakpoints,
                        const std::vector<double>& values);

// Boshernitzan map: derivative lambda1 on (0,a), lambda2 on (a,1) with
// lambda1*a + lambda2*(1-a) = 1 and f(a) = 0 (i.e. value 1 as a lift).
CircleMap boshernitzan_map(double lambda1, double lambda2);

CircleMap moebius_circle_map(const MoebiusElement& m);

// f^n (n may be negative when f has an inverse route)
CircleMap power_map(const CircleMap& f, int n);

// composition maps[0] o maps[1] o ... (rightmost applied first)
CircleMap composite_map(const std::vector<CircleMap>& maps);

CircleMap inverse_map(const CircleMap& f);

// h f h^{-1}
CircleMap conjugate_map(const CircleMap& h, const CircleMap& f);

// line map factories
LineMap affine_line_map(double slope, double offset);
LineMap line_map_from_function(std::function<double(double)> f,
                               std::function<double(double)> df = nullptr);

}  // namespace circledyn
