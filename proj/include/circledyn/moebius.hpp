#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "circledyn/common.hpp"

namespace circledyn {

// Element of PSL(2,R), stored as a determinant-one matrix (sign quotient:
// we normalize so that a1 > 0, or a1 == 0 and a2 > 0).
// Acts on the circle R/Z through the identification of the boundary of the
// Poincare disk with the projective line: the angle x in [0,1) corresponds
// to the chart point s = tan(pi*x + pi/4) on which the action is
// s -> (a1 s + a2)/(a3 s + a4).
struct MoebiusElement {
    double a1 = 1, a2 = 0, a3 = 0, a4 = 1;

    MoebiusElement() = default;
    MoebiusElement(double m11, double m12, double m21, double m22);

    double trace_abs() const { return std::fabs(a1 + a4); }
    MoebiusElement inverse() const { return MoebiusElement(a4, -a2, -a3, a1); }
    MoebiusElement operator*(const MoebiusElement& o) const {
        return MoebiusElement(a1 * o.a1 + a2 * o.a3, a1 * o.a2 + a2 * o.a4,
                              a3 * o.a1 + a4 * o.a3, a3 * o.a2 + a4 * o.a4);
    }

    // half-plane action on the chart coordinate (s may be +-inf)
    double chart_apply(double s) const;
    double chart_derivative(double s) const;

    // circle action in the [0,1) parametrization, with derivative
    double act(double x) const;
    double act_derivative(double x) const;
    // degree-one lift of the circle action, pinned so lift(x) - x is the
    // displacement of smallest absolute value at x = 0
    double lift(double x) const;

    // action on the open Poincare disk (complex coordinate)
    std::complex<double> disk_apply(std::complex<double> z) const;

    static MoebiusElement rotation(double angle_of_circle);  // R_theta, theta in [0,1)
    static MoebiusElement diagonal(double lambda);  // s -> lambda * s
    static MoebiusElement parabolic(double t);      // s -> s + t
};

enum class MoebiusClass { Identity, Elliptic, Parabolic, Hyperbolic };

struct MoebiusClassification {
    MoebiusClass type;
    // present for hyperbolic elements: circle angles in [0,1)
    std::optional<double> attracting_fixed_point;
    std::optional<double> repelling_fixed_point;
    std::optional<double> derivative_at_attracting;
    // present for parabolic
    std::optional<double> parabolic_fixed_point;
};

MoebiusClassification classify(const MoebiusElement& m, double tol = 1e-10);

// cross-ratio [e^{ia}, e^{ib}, e^{ic}, e^{id}] with angles given in [0,1)
// (they are rescaled by 2*pi internally).  Returns 0 when a==c or b==d,
// throws degenerate-input error when a==d or c==b.
double cross_ratio(double a, double b, double c, double d);

struct LiouvilleBox {
    double a, b, c, d;  // cyclic order a < b < c < d < a on [0,1)
};

enum class LiouvilleMethod { ClosedForm, Quadrature };

// Lv([a,b] x [c,d]); throws when the arcs touch (infinite mass).
double liouville_box_measure(const LiouvilleBox& box,
                             LiouvilleMethod method = LiouvilleMethod::ClosedForm);

// hyperbolic distance between points of the open unit disk (curvature -1)
double hyperbolic_distance(std::complex<double> p, std::complex<double> q);

// V(g) = 4 dist(O, g(O))
double moebius_variation(const MoebiusElement& m);

// --- Liouville cocycle -----------------------------------------------------

struct TorusGridFunction {
    int n = 0;               // grid resolution per axis
    double band = 0.0;       // excluded diagonal band half-width
    std::vector<double> values;  // n*n values, row r, column s; NaN on the band
    bool symmetric = false;
    double weighted_l2 = 0.0;    // L2 norm wrt Lv over the band complement

    double& at(int r, int s) { return values[static_cast<size_t>(r) * n + s]; }
    double at(int r, int s) const { return values[static_cast<size_t>(r) * n + s]; }
};

// c(g)(r,s) = 1 - Jac(gbar)^(1/2), gbar the circle action of g^{-1}.
// Pointwise evaluator, exact up to the analytic derivative of the action.
double liouville_cocycle_value(const MoebiusElement& g, double r, double s);

// grid tabulation of c(g) with the diagonal band |r-s| <= w excluded
TorusGridFunction liouville_cocycle(const MoebiusElement& g, int grid_n, double band_w);

// sup over off-band grid points of |c(g1 g2) - c(g1) - Psi(g1) c(g2)|
double liouville_cocycle_identity_residual(const MoebiusElement& g1,
                                           const MoebiusElement& g2,
                                           int grid_n, double band_w);

// --- Schottky / ping-pong certificates --------------------------------------

struct CircleArc {
    double lo, hi;  // arc from lo to hi counterclockwise, both in [0,1)
    double length() const { return frac(hi - lo); }
    bool contains(double x) const {
        return frac(x - lo) <= length() + 1e-15;
    }
};

struct SchottkyCertificate {
    bool free_group = false;      // full ping-pong (all nonzero powers)
    bool free_semigroup = false;  // positive powers only
    int n_checked = 0;
    std::vector<std::string> verified_inclusions;
    std::string failure;          // nonempty when neither certificate holds
    double min_margin = 0.0;      // smallest slack among verified inclusions
};

// Verifies the ping-pong inclusions g0^n(I1 u J1) c I0 u J0 and symmetrically,
// for n = 1..n_check directly; all larger |n| are certified by the nesting
// inclusions g0(I0) c I0, g0^{-1}(J0) c J0 (and so on), which propagate by
// induction.  I_i should contain the attracting fixed point of g_i and J_i
// the repelling one.
SchottkyCertificate schottky_certificate(const MoebiusElement& g0, const MoebiusElement& g1,
                                         const CircleArc& I0, const CircleArc& I1,
                                         const CircleArc& J0, const CircleArc& J1,
                                         int n_check);

}  // namespace circledyn
