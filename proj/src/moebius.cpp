#include "circledyn/moebius.hpp"

#include <algorithm>
#include <cmath>

namespace circledyn {

namespace {
constexpr double kPi = 3.14159265358979323846;

// inverse chart; branch chosen so the result lies in [0,1)
double chart_to_angle(double s) {
    double x = (std::atan(s) - kPi / 4.0) / kPi;
    return frac(x);
}
}  // namespace

MoebiusElement::MoebiusElement(double m11, double m12, double m21, double m22) {
    double det = m11 * m22 - m12 * m21;
    if (det <= 0.0)
        throw invalid_map_error("MoebiusElement: determinant must be positive");
    double r = std::sqrt(det);
    a1 = m11 / r; a2 = m12 / r; a3 = m21 / r; a4 = m22 / r;
    if (std::fabs(a1 * a4 - a2 * a3 - 1.0) > 1e-12)
        throw invalid_map_error("MoebiusElement: could not normalize determinant to 1");
    // sign quotient
    if (a1 < 0 || (a1 == 0 && a2 < 0) || (a1 == 0 && a2 == 0 && a3 < 0)) {
        a1 = -a1; a2 = -a2; a3 = -a3; a4 = -a4;
    }
}

double MoebiusElement::chart_apply(double s) const {
    if (std::isinf(s)) {
        if (a3 == 0.0) return std::copysign(HUGE_VAL, s * a1 / a4);
        return a1 / a3;
    }
    double den = a3 * s + a4;
    if (den == 0.0) return HUGE_VAL;
    return (a1 * s + a2) / den;
}

double MoebiusElement::chart_derivative(double s) const {
    double den = a3 * s + a4;
    return 1.0 / (den * den);
}

double MoebiusElement::lift(double x) const {
    // The chart point x corresponds to the projective vector
    // v(x) = (cos u, sin u) with u = pi x + pi/4, whose slope is s = tan u.
    // The matrix rotates v monotonically, so the continuous image angle
    // A(x) = (angle(M v) - pi/4)/pi is a strictly increasing degree-one lift.
    double fx = frac(x);
    double u = kPi * fx + kPi / 4.0;
    double sn = std::sin(u), cs = std::cos(u);
    double w1 = a1 * sn + a2 * cs, w2 = a3 * sn + a4 * cs;
    double A = (std::atan2(w1, w2) - kPi / 4.0) / kPi;  // A(fx) mod 2
    static const double kInvSqrt2 = 0.70710678118654752440;
    double A0 = (std::atan2((a1 + a2) * kInvSqrt2, (a3 + a4) * kInvSqrt2) - kPi / 4.0) / kPi;
    // the true branch lies in the window [A0, A0 + 1); A is known mod 2
    double d = A - A0;
    double dm = d - 2.0 * std::floor(d / 2.0);  // in [0,2)
    if (dm >= 1.5) dm = 0.0;  // rounding at the window edge
    return std::floor(x) + A0 + dm;
}

double MoebiusElement::act(double x) const { return frac(lift(x)); }

double MoebiusElement::act_derivative(double x) const {
    // f'(x) = det(M) |v|^2 / |M v|^2 with v = (cos u, sin u)
    double t = frac(x);
    double u = kPi * t + kPi / 4.0;
    double sn = std::sin(u), cs = std::cos(u);
    double p = a3 * sn + a4 * cs;
    double q = a1 * sn + a2 * cs;
    return 1.0 / (p * p + q * q);
}

std::complex<double> MoebiusElement::disk_apply(std::complex<double> z) const {
    // disk -> upper half plane: w = phi(z) = (z + i)/(1 + i z)
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> w = (z + i) / (1.0 + i * z);
    std::complex<double> w2 = (a1 * w + a2) / (a3 * w + a4);
    // back: z = (w - i)/(1 - i w)
    return (w2 - i) / (1.0 - i * w2);
}

MoebiusElement MoebiusElement::rotation(double angle) {
    // elliptic rotation about the disk center by circle angle `angle`:
    // in the half-plane chart this is the matrix [[cos t, sin t], [-sin t, cos t]]
    // with t = pi * angle (the projective line is a double cover in angle).
    double t = kPi * angle;
    return MoebiusElement(std::cos(t), std::sin(t), -std::sin(t), std::cos(t));
}

MoebiusElement MoebiusElement::diagonal(double lambda) {
    if (lambda <= 0) throw domain_error("diagonal: lambda must be positive");
    double r = std::sqrt(lambda);
    return MoebiusElement(r, 0, 0, 1.0 / r);
}

MoebiusElement MoebiusElement::parabolic(double t) {
    return MoebiusElement(1, t, 0, 1);
}

MoebiusClassification classify(const MoebiusElement& m, double tol) {
    MoebiusClassification out{};
    double tr = m.trace_abs();
    bool is_id = std::fabs(m.a2) <= tol && std::fabs(m.a3) <= tol &&
                 std::fabs(m.a1 - m.a4) <= tol;
    if (is_id) { out.type = MoebiusClass::Identity; return out; }
    if (tr < 2.0 - tol) { out.type = MoebiusClass::Elliptic; return out; }
    if (tr <= 2.0 + tol) {
        out.type = MoebiusClass::Parabolic;
        // unique fixed point: a3 s^2 + (a4 - a1) s - a2 = 0, double root
        double s;
        if (std::fabs(m.a3) > tol)
            s = (m.a1 - m.a4) / (2.0 * m.a3);
        else
            s = HUGE_VAL;  // fixed point at the chart pole
        out.parabolic_fixed_point = std::isinf(s) ? frac(0.25) : chart_to_angle(s);
        return out;
    }
    out.type = MoebiusClass::Hyperbolic;
    double s_plus, s_minus;
    if (std::fabs(m.a3) > 1e-300) {
        double disc = std::sqrt(sq(m.a1 + m.a4) - 4.0);
        double tr_signed = m.a1 + m.a4;
        if (tr_signed < 0) disc = -disc;  // keep numerics away from cancellation
        s_plus = (m.a1 - m.a4 + disc) / (2.0 * m.a3);
        s_minus = (m.a1 - m.a4 - disc) / (2.0 * m.a3);
        double x1 = chart_to_angle(s_plus), x2 = chart_to_angle(s_minus);
        double d1 = m.act_derivative(x1), d2 = m.act_derivative(x2);
        if (d1 < d2) {
            out.attracting_fixed_point = x1; out.repelling_fixed_point = x2;
            out.derivative_at_attracting = d1;
        } else {
            out.attracting_fixed_point = x2; out.repelling_fixed_point = x1;
            out.derivative_at_attracting = d2;
        }
    } else {
        // fixed points: chart pole and s = a2/(a4-a1)
        double xf = chart_to_angle(m.a2 / (m.a4 - m.a1));
        double xp = frac(0.25);  // chart pole angle
        double d1 = m.act_derivative(xf), d2 = m.act_derivative(xp);
        if (d1 < d2) {
            out.attracting_fixed_point = xf; out.repelling_fixed_point = xp;
            out.derivative_at_attracting = d1;
        } else {
            out.attracting_fixed_point = xp; out.repelling_fixed_point = xf;
            out.derivative_at_attracting = d2;
        }
    }
    return out;
}

double cross_ratio(double a, double b, double c, double d) {
    const std::complex<double> I(0.0, 1.0);
    auto E = [&](double t) { return std::exp(I * (2.0 * kPi * t)); };
    std::complex<double> A = E(a), B = E(b), C = E(c), D = E(d);
    std::complex<double> num = (A - C) * (B - D);
    if (std::abs(num) == 0.0) return 0.0;  // a==c or b==d: degenerate, measure-zero box
    std::complex<double> den = (A - D) * (C - B);
    if (std::abs(den) < 1e-15)
        throw domain_error("cross_ratio: coincident points (a=d or c=b)");
    std::complex<double> cr = num / den;
    return cr.real();
}

double liouville_box_measure(const LiouvilleBox& box, LiouvilleMethod method) {
    double a = box.a, b = box.b, c = box.c, d = box.d;
    // require cyclic order a,b,c,d and disjoint closed arcs
    double ab = frac(b - a), bc = frac(c - b), cd = frac(d - c), da = frac(a - d);
    if (ab <= 0 || bc <= 0 || cd <= 0 || da <= 0 ||
        std::fabs(ab + bc + cd + da - 1.0) > 1e-9)
        throw domain_error("liouville_box_measure: arcs touch or are wrongly ordered"
                           " (adjacent boxes have infinite mass)");
    if (method == LiouvilleMethod::ClosedForm) {
        double cr = cross_ratio(a, b, c, d);
        if (cr <= 0)
            throw domain_error("liouville_box_measure: nonpositive cross-ratio");
        return std::log(cr);
    }
    // Gauss-Legendre tensor quadrature of pi^2 / sin^2(pi(s-t)) over the box.
    // 64 nodes per axis; the integrand is analytic on disjoint closed arcs.
    static const int N = 64;
    static std::vector<double> xs, ws;
    if (xs.empty()) {
        // Newton iteration for Legendre nodes on [-1,1]
        xs.resize(N); ws.resize(N);
        for (int i = 0; i < N; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (N + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= N; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1; p1 = p2;
                }
                double dp = N * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            xs[i] = x;
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= N; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1; p1 = p2;
            }
            double dp = N * (x * p1 - p0) / (x * x - 1.0);
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
    double s0 = a, s1 = a + ab;              // [a,b] unwrapped
    double t0 = a + ab + bc, t1 = t0 + cd;   // [c,d] unwrapped
    KahanSum acc;
    for (int i = 0; i < N; ++i) {
        double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * xs[i];
        for (int j = 0; j < N; ++j) {
            double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xs[j];
            double val = kPi * kPi / sq(std::sin(kPi * (s - t)));
            acc.add(ws[i] * ws[j] * val);
        }
    }
    return acc.value() * 0.25 * (s1 - s0) * (t1 - t0);
}

double hyperbolic_distance(std::complex<double> p, std::complex<double> q) {
    double ap = std::abs(p), aq = std::abs(q);
    if (ap >= 1.0 || aq >= 1.0)
        throw domain_error("hyperbolic_distance: points must lie in the open disk");
    double num = std::norm(p - q);
    double den = (1.0 - ap * ap) * (1.0 - aq * aq);
    return std::acosh(1.0 + 2.0 * num / den);
}

double moebius_variation(const MoebiusElement& m) {
    std::complex<double> img = m.disk_apply(std::complex<double>(0.0, 0.0));
    return 4.0 * hyperbolic_distance(std::complex<double>(0.0, 0.0), img);
}

// --- Liouville cocycle ------------------------------------------------------

double liouville_cocycle_value(const MoebiusElement& g, double r, double s) {
    MoebiusElement gi = g.inverse();
    double gr = gi.act(r), gs = gi.act(s);
    double num = sq(std::sin(kPi * (r - s)));
    double den = sq(std::sin(kPi * (gr - gs)));
    double jac = num / den * gi.act_derivative(r) * gi.act_derivative(s);
    return 1.0 - std::sqrt(jac);
}

TorusGridFunction liouville_cocycle(const MoebiusElement& g, int grid_n, double band_w) {
    if (grid_n < 64) throw precondition_error("liouville_cocycle: grid must be >= 64");
    TorusGridFunction out;
    out.n = grid_n;
    out.band = band_w;
    out.symmetric = true;
    out.values.assign(static_cast<size_t>(grid_n) * grid_n,
                      std::numeric_limits<double>::quiet_NaN());
    KahanSum norm2;
    double h = 1.0 / grid_n;
    for (int i = 0; i < grid_n; ++i) {
        double r = (i + 0.5) * h;
        for (int j = 0; j < grid_n; ++j) {
            double s = (j + 0.5) * h;
            if (circle_dist(r, s) <= band_w) continue;
            double v = liouville_cocycle_value(g, r, s);
            out.at(i, j) = v;
            // Lv cell weight
            double w = sq(kPi) / sq(std::sin(kPi * (r - s))) * h * h;
            norm2.add(v * v * w);
        }
    }
    out.weighted_l2 = std::sqrt(norm2.value());
    return out;
}

double liouville_cocycle_identity_residual(const MoebiusElement& g1,
                                           const MoebiusElement& g2,
                                           int grid_n, double band_w) {
    MoebiusElement prod = g1 * g2;
    MoebiusElement g1i = g1.inverse();
    double h = 1.0 / grid_n, worst = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        double r = (i + 0.5) * h;
        for (int j = 0; j < grid_n; ++j) {
            double s = (j + 0.5) * h;
            if (circle_dist(r, s) <= band_w) continue;
            double lhs = liouville_cocycle_value(prod, r, s);
            double gr = g1i.act(r), gs = g1i.act(s);
            if (circle_dist(gr, gs) < 1e-12) continue;  // pulled onto the diagonal
            double jac = sq(std::sin(kPi * (r - s))) / sq(std::sin(kPi * (gr - gs))) *
                         g1i.act_derivative(r) * g1i.act_derivative(s);
            double rhs = liouville_cocycle_value(g1, r, s) +
                         std::sqrt(jac) * liouville_cocycle_value(g2, gr, gs);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
    }
    return worst;
}

// --- Schottky ----------------------------------------------------------------

namespace {
// image of an arc under a circle homeomorphism given by a Moebius element
CircleArc act_arc(const MoebiusElement& g, const CircleArc& a) {
    return CircleArc{g.act(a.lo), g.act(a.hi)};
}
// is `inner` contained in `outer` (as counterclockwise arcs)?  returns slack
double arc_inclusion_margin(const CircleArc& inner, const CircleArc& outer) {
    double off_lo = frac(inner.lo - outer.lo);
    double off_hi = off_lo + inner.length();
    double m = std::min(off_lo, outer.length() - off_hi);
    if (off_hi > outer.length()) return -1.0;
    return m;
}
bool arcs_disjoint(const CircleArc& x, const CircleArc& y) {
    double off = frac(y.lo - x.lo);
    if (off < x.length() + 1e-15) return false;
    double off2 = frac(x.lo - y.lo);
    return off2 >= y.length() + 1e-15;
}
}  // namespace

SchottkyCertificate schottky_certificate(const MoebiusElement& g0, const MoebiusElement& g1,
                                         const CircleArc& I0, const CircleArc& I1,
                                         const CircleArc& J0, const CircleArc& J1,
                                         int n_check) {
    SchottkyCertificate cert;
    cert.n_checked = n_check;
    const CircleArc* arcs[4] = {&I0, &I1, &J0, &J1};
    const char* names[4] = {"I0", "I1", "J0", "J1"};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (!arcs_disjoint(*arcs[i], *arcs[j]))
                throw precondition_error(std::string("schottky_certificate: arcs ") +
                                         names[i] + " and " + names[j] + " overlap");

    double min_margin = 1.0;
    auto check = [&](const MoebiusElement& g, const CircleArc& src,
                     const CircleArc& dst, const std::string& label) -> bool {
        CircleArc img = act_arc(g, src);
        double m = arc_inclusion_margin(img, dst);
        if (m < 0) { cert.failure = "inclusion failed: " + label; return false; }
        cert.verified_inclusions.push_back(label);
        min_margin = std::min(min_margin, m);
        return true;
    };

    MoebiusElement p0 = g0, p1 = g1;
    MoebiusElement q0 = g0.inverse(), q1 = g1.inverse();
    bool pos_ok = true, neg_ok = true;
    for (int n = 1; n <= n_check && (pos_ok || neg_ok); ++n) {
        std::string sn = std::to_string(n);
        if (pos_ok) {
            pos_ok = check(p0, I1, I0, "g0^" + sn + "(I1) in I0") &&
                     check(p0, J1, I0, "g0^" + sn + "(J1) in I0") &&
                     check(p1, I0, I1, "g1^" + sn + "(I0) in I1") &&
                     check(p1, J0, I1, "g1^" + sn + "(J0) in I1");
        }
        if (neg_ok) {
            neg_ok = check(q0, I1, J0, "g0^-" + sn + "(I1) in J0") &&
                     check(q0, J1, J0, "g0^-" + sn + "(J1) in J0") &&
                     check(q1, I0, J1, "g1^-" + sn + "(I0) in J1") &&
                     check(q1, J0, J1, "g1^-" + sn + "(J0) in J1");
        }
        p0 = p0 * g0; p1 = p1 * g1;
        q0 = q0 * g0.inverse(); q1 = q1 * g1.inverse();
    }
    // tail: nesting inclusions let induction extend the direct checks to all
    // powers beyond n_check
    bool nest_pos = pos_ok &&
                    check(g0, I0, I0, "g0(I0) in I0") &&
                    check(g1, I1, I1, "g1(I1) in I1");
    bool nest_neg = neg_ok &&
                    check(g0.inverse(), J0, J0, "g0^-1(J0) in J0") &&
                    check(g1.inverse(), J1, J1, "g1^-1(J1) in J1");
    cert.free_semigroup = nest_pos;
    cert.free_group = nest_pos && nest_neg;
    cert.min_margin = min_margin;
    if (!cert.free_group && !cert.free_semigroup && cert.failure.empty())
        cert.failure = "no inclusion family verified";
    return cert;
}

}  // namespace circledyn
