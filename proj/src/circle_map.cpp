#include "circledyn/circle_map.hpp"

#include <algorithm>
#include <cmath>

namespace circledyn {

double CircleMap::lift_inverse(double y) const {
    if (inverse_lift) return inverse_lift(y);
    // bracket: F(x) - x is 1-periodic and bounded, so x lies within
    // [y - 1 - d0, y + 1 - d0] where d0 = F(0)
    double d0 = lift(0.0);
    double lo = y - d0 - 1.5, hi = y - d0 + 1.5;
    while (lift(lo) > y) lo -= 1.0;
    while (lift(hi) < y) hi += 1.0;
    return invert_increasing(lift, lo, hi, y, 1e-14);
}

void CircleMap::validate(int grid, double commute_tol) const {
    double prev = lift(0.0);
    for (int i = 1; i <= grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double v = lift(x);
        if (!(v > prev))
            throw invalid_map_error("CircleMap: lift not strictly increasing near x=" +
                                    std::to_string(x));
        prev = v;
    }
    for (int i = 0; i < 8; ++i) {
        double x = i / 8.0 + 0.0371;
        if (std::fabs(lift(x + 1.0) - lift(x) - 1.0) > commute_tol)
            throw invalid_map_error("CircleMap: lift does not commute with unit translation");
    }
}

double LineMap::inverse(double y, double lo, double hi) const {
    return invert_increasing(eval, lo, hi, y, 1e-14);
}

// --- measures ----------------------------------------------------------------

CircleMeasure CircleMeasure::lebesgue(int n) {
    CircleMeasure m;
    m.grid = n;
    m.weights.assign(n, 1.0 / n);
    return m;
}

CircleMeasure CircleMeasure::bump(double center, double width, int n) {
    CircleMeasure m;
    m.grid = n;
    m.weights.assign(n, 0.0);
    int lo = static_cast<int>(std::floor(frac(center - width / 2) * n));
    int span = std::max(1, static_cast<int>(std::ceil(width * n)));
    for (int k = 0; k < span; ++k)
        m.weights[(lo + k) % n] += 1.0 / span;
    return m;
}

double CircleMeasure::total_mass() const {
    KahanSum s;
    for (double w : weights) s.add(w);
    for (auto& a : atoms) s.add(a.second);
    return s.value();
}

void CircleMeasure::check_probability(double tol) const {
    if (std::fabs(total_mass() - 1.0) > tol)
        throw precondition_error("CircleMeasure: total mass differs from 1");
    for (double w : weights)
        if (w < -1e-15) throw precondition_error("CircleMeasure: negative weight");
}

double CircleMeasure::arc_mass(double a, double b) const {
    // prefix mass of the grid part: P(x) over one period plus whole periods
    auto prefix = [&](double x) {
        double fx = frac(x);
        double t = fx * grid;
        int idx = std::min(static_cast<int>(t), grid - 1);
        double acc = 0.0;
        for (int i = 0; i < idx; ++i) acc += weights[i];
        acc += weights[idx] * (t - idx);
        return acc + std::floor(x) * 1.0;  // grid part of a probability has mass 1/period
    };
    return prefix(b) - prefix(a);
}

double CircleMeasure::l1_distance(const CircleMeasure& other) const {
    if (grid != other.grid)
        throw precondition_error("l1_distance: grid sizes differ");
    double s = 0.0;
    for (int i = 0; i < grid; ++i) s += std::fabs(weights[i] - other.weights[i]);
    return s;
}

double CircleMeasure::integrate(const std::function<double(double)>& psi,
                                bool allow_mixed) const {
    if (!atoms.empty() && !allow_mixed)
        throw precondition_error("CircleMeasure::integrate: atoms present; "
                                 "pass allow_mixed to combine them with the grid");
    KahanSum s;
    for (int i = 0; i < grid; ++i)
        s.add(weights[i] * psi((i + 0.5) / grid));
    if (allow_mixed)
        for (auto& a : atoms) s.add(a.second * psi(a.first));
    return s.value();
}

std::pair<double, double> CircleMeasure::concentration_arc(double target) const {
    // smallest circular window of grid cells holding >= target mass
    int n = grid;
    std::vector<double> pre(2 * n + 1, 0.0);
    for (int i = 0; i < 2 * n; ++i) pre[i + 1] = pre[i] + weights[i % n];
    int best_w = n;
    int best_i = 0;
    for (int w = 1; w <= n; ++w) {
        bool ok = false;
        for (int i = 0; i < n; ++i) {
            if (pre[i + w] - pre[i] >= target) { ok = true; best_i = i; break; }
        }
        if (ok) { best_w = w; break; }
    }
    double center = frac((best_i + best_w * 0.5) / n);
    return {center, static_cast<double>(best_w) / n};
}

LineMeasure LineMeasure::lebesgue() {
    LineMeasure m;
    m.cdf = [](double x) { return x; };
    return m;
}

LineMeasure LineMeasure::atomic(const std::vector<std::pair<double, double>>& atoms) {
    LineMeasure m;
    m.atoms = atoms;
    auto pts = atoms;
    std::sort(pts.begin(), pts.end());
    m.cdf = [pts](double x) {
        double s = 0.0;
        for (auto& a : pts) {
            if (a.first < x) s += a.second;
            else break;
        }
        return s;
    };
    return m;
}

// --- factories ---------------------------------------------------------------

CircleMap rotation_map(double theta) {
    CircleMap f;
    f.lift = [theta](double x) { return x + theta; };
    f.derivative = [](double) { return 1.0; };
    f.inverse_lift = [theta](double y) { return y - theta; };
    f.smoothness = "analytic";
    f.descriptor = {{"type", "rotation"}, {"theta", theta}};
    return f;
}

namespace {
struct PLData {
    std::vector<double> xs;   // breakpoints in [0,1), ascending, xs[0] == 0
    std::vector<double> vs;   // lift values at breakpoints
    std::vector<double> slopes;
    std::vector<double> inv_xs, inv_vs, inv_slopes;  // inverse map data
};

double pl_eval(const std::shared_ptr<PLData>& d, double x) {
    double fx = frac(x);
    auto it = std::upper_bound(d->xs.begin(), d->xs.end(), fx);
    int i = static_cast<int>(it - d->xs.begin()) - 1;
    return std::floor(x) + d->vs[i] + d->slopes[i] * (fx - d->xs[i]);
}
}  // namespace

CircleMap pl_circle_map(const std::vector<double>& breakpoints,
                        const std::vector<double>& values) {
    if (breakpoints.size() != values.size() || breakpoints.empty())
        throw precondition_error("pl_circle_map: need matching nonempty breakpoint/value lists");
    if (std::fabs(breakpoints[0]) > 1e-15)
        throw precondition_error("pl_circle_map: first breakpoint must be 0");
    auto d = std::make_shared<PLData>();
    d->xs = breakpoints;
    d->vs = values;
    size_t k = breakpoints.size();
    for (size_t i = 0; i < k; ++i) {
        double x1 = (i + 1 < k) ? breakpoints[i + 1] : 1.0;
        double v1 = (i + 1 < k) ? values[i + 1] : values[0] + 1.0;
        double s = (v1 - values[i]) / (x1 - breakpoints[i]);
        if (s <= 0)
            throw invalid_map_error("pl_circle_map: nonpositive slope");
        d->slopes.push_back(s);
    }
    // inverse tables: breakpoints of the inverse are the (wrapped) values
    double v0 = values[0];
    for (size_t i = 0; i < k; ++i) {
        d->inv_xs.push_back(values[i] - v0);  // in [0,1)
        d->inv_vs.push_back(breakpoints[i]);
        d->inv_slopes.push_back(1.0 / d->slopes[i]);
    }
    CircleMap f;
    f.lift = [d](double x) { return pl_eval(d, x); };
    f.derivative = [d](double x) {
        double fx = frac(x);
        auto it = std::upper_bound(d->xs.begin(), d->xs.end(), fx);
        int i = static_cast<int>(it - d->xs.begin()) - 1;
        return d->slopes[i];
    };
    f.inverse_lift = [d, v0](double y) {
        double z = y - v0;
        double fz = frac(z);
        auto it = std::upper_bound(d->inv_xs.begin(), d->inv_xs.end(), fz);
        int i = static_cast<int>(it - d->inv_xs.begin()) - 1;
        return std::floor(z) + d->inv_vs[i] + d->inv_slopes[i] * (fz - d->inv_xs[i]);
    };
    f.smoothness = "C0";  // as a circle map; derivative exists off breakpoints
    f.descriptor = {{"type", "pl"}, {"breakpoints", breakpoints}, {"values", values}};
    return f;
}

CircleMap boshernitzan_map(double lambda1, double lambda2) {
    if (!(lambda1 > 1.0) || !(lambda2 < 1.0) || lambda2 <= 0.0)
        throw precondition_error("boshernitzan_map: need lambda1 > 1 > lambda2 > 0");
    double a = (1.0 - lambda2) / (lambda1 - lambda2);
    // f(0) = 1 - lambda1 * a (so that f(a) = 1 == 0 mod 1)
    CircleMap f = pl_circle_map({0.0, a}, {1.0 - lambda1 * a, 1.0});
    f.descriptor = {{"type", "pl"},
                    {"family", "boshernitzan"},
                    {"lambda1", lambda1},
                    {"lambda2", lambda2}};
    return f;
}

CircleMap moebius_circle_map(const MoebiusElement& m) {
    CircleMap f;
    MoebiusElement inv = m.inverse();
    f.lift = [m](double x) { return m.lift(x); };
    f.derivative = [m](double x) { return m.act_derivative(x); };
    f.inverse_lift = [m, inv](double y) {
        // inv.lift is a lift of the inverse circle map; pick the branch so that
        // lift(inverse_lift(y)) == y
        double x = inv.lift(y);
        double err = m.lift(x) - y;
        return x - std::round(err);
    };
    f.smoothness = "analytic";
    f.descriptor = {{"type", "moebius"},
                    {"matrix", {{m.a1, m.a2}, {m.a3, m.a4}}}};
    return f;
}

CircleMap power_map(const CircleMap& f, int n) {
    if (n == 0) return rotation_map(0.0);
    CircleMap g;
    bool neg = n < 0;
    int k = neg ? -n : n;
    CircleMap base = f;
    g.lift = [base, k, neg](double x) {
        for (int i = 0; i < k; ++i)
            x = neg ? base.lift_inverse(x) : base.lift(x);
        return x;
    };
    if (f.has_derivative()) {
        g.derivative = [base, k, neg](double x) {
            double d = 1.0;
            for (int i = 0; i < k; ++i) {
                if (neg) {
                    x = base.lift_inverse(x);
                    d /= base.derivative(x);
                } else {
                    d *= base.derivative(x);
                    x = base.lift(x);
                }
            }
            return d;
        };
    }
    g.inverse_lift = [base, k, neg](double y) {
        for (int i = 0; i < k; ++i)
            y = neg ? base.lift(y) : base.lift_inverse(y);
        return y;
    };
    g.smoothness = f.smoothness;
    g.descriptor = {{"type", "power"}, {"base", f.descriptor}, {"n", n}};
    return g;
}

CircleMap composite_map(const std::vector<CircleMap>& maps) {
    if (maps.empty()) throw precondition_error("composite_map: empty list");
    CircleMap g;
    auto copy = maps;
    g.lift = [copy](double x) {
        for (auto it = copy.rbegin(); it != copy.rend(); ++it) x = it->lift(x);
        return x;
    };
    bool all_d = true;
    for (auto& m : copy) all_d = all_d && m.has_derivative();
    if (all_d) {
        g.derivative = [copy](double x) {
            double d = 1.0;
            for (auto it = copy.rbegin(); it != copy.rend(); ++it) {
                d *= it->derivative(x);
                x = it->lift(x);
            }
            return d;
        };
    }
    g.inverse_lift = [copy](double y) {
        for (auto& m : copy) y = m.lift_inverse(y);
        return y;
    };
    g.smoothness = copy.front().smoothness;
    nlohmann::json parts = nlohmann::json::array();
    for (auto& m : copy) parts.push_back(m.descriptor);
    g.descriptor = {{"type", "composite"}, {"maps", parts}};
    return g;
}

CircleMap inverse_map(const CircleMap& f) {
    CircleMap g;
    CircleMap base = f;
    g.lift = [base](double y) { return base.lift_inverse(y); };
    if (f.has_derivative()) {
        g.derivative = [base](double y) {
            double x = base.lift_inverse(y);
            return 1.0 / base.derivative(x);
        };
    }
    g.inverse_lift = [base](double x) { return base.lift(x); };
    g.smoothness = f.smoothness;
    g.descriptor = {{"type", "inverse"}, {"of", f.descriptor}};
    return g;
}

CircleMap conjugate_map(const CircleMap& h, const CircleMap& f) {
    return composite_map({h, f, inverse_map(h)});
}

LineMap affine_line_map(double slope, double offset) {
    if (slope <= 0) throw invalid_map_error("affine_line_map: slope must be positive");
    LineMap g;
    g.eval = [slope, offset](double x) { return slope * x + offset; };
    g.derivative = [slope](double) { return slope; };
    if (slope != 1.0) g.fixed_points = {offset / (1.0 - slope)};
    g.descriptor = {{"type", "affine"}, {"slope", slope}, {"offset", offset}};
    return g;
}

LineMap line_map_from_function(std::function<double(double)> fn,
                               std::function<double(double)> df) {
    LineMap g;
    g.eval = std::move(fn);
    g.derivative = std::move(df);
    g.descriptor = {{"type", "custom"}};
    return g;
}

}  // namespace circledyn
