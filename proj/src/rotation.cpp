#include "circledyn/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace circledyn {

RotationNumber rotation_number_estimate(const CircleMap& f, double x0, long n) {
    if (n < 1) throw precondition_error("rotation_number_estimate: n >= 1 required");
    f.validate();
    double x = x0;
    for (long i = 0; i < n; ++i) x = f.lift(x);
    RotationNumber r;
    r.value = frac((x - x0) / static_cast<double>(n));
    r.error_bound = 2.0 / static_cast<double>(n);
    return r;
}

std::optional<Rational> rotation_number_rational(const CircleMap& f, int q_max, double tol) {
    if (q_max < 1) throw precondition_error("rotation_number_rational: q_max >= 1");
    f.validate();
    for (int q = 1; q <= q_max; ++q) {
        // displacement of F^q over one period
        const int coarse = 64;
        std::vector<double> disp(coarse + 1);
        auto iter = [&](double x) {
            for (int i = 0; i < q; ++i) x = f.lift(x);
            return x;
        };
        double dmin = 1e300, dmax = -1e300;
        for (int i = 0; i <= coarse; ++i) {
            double x = static_cast<double>(i) / coarse;
            disp[i] = iter(x) - x;
            dmin = std::min(dmin, disp[i]);
            dmax = std::max(dmax, disp[i]);
        }
        for (long long p = static_cast<long long>(std::floor(dmin)) - 1;
             p <= static_cast<long long>(std::ceil(dmax)) + 1; ++p) {
            // look for a zero of F^q(x) - x - p
            auto h = [&](double x) { return iter(x) - x - static_cast<double>(p); };
            bool found = false;
            double root = 0.0;
            for (int i = 0; i <= coarse && !found; ++i) {
                if (std::fabs(disp[i] - p) <= tol) { found = true; root = double(i) / coarse; }
            }
            if (!found) {
                // refine on a denser grid before giving up on this p
                const int fine = 1024;
                double prev = h(0.0), prev_x = 0.0;
                for (int i = 1; i <= fine; ++i) {
                    double x = static_cast<double>(i) / fine;
                    double cur = h(x);
                    if (prev == 0.0 || prev * cur <= 0.0) {
                        // bisection
                        double lo = prev_x, hi = x;
                        double flo = prev;
                        for (int it = 0; it < 100 && hi - lo > tol; ++it) {
                            double mid = 0.5 * (lo + hi), fm = h(mid);
                            if ((flo <= 0 && fm <= 0) || (flo >= 0 && fm >= 0)) {
                                lo = mid; flo = fm;
                            } else hi = mid;
                        }
                        root = 0.5 * (lo + hi);
                        if (std::fabs(h(root)) <= 1e-9) { found = true; break; }
                    }
                    prev = cur; prev_x = x;
                }
            }
            if (found) {
                Rational r{static_cast<long long>(((p % q) + q) % q), q};
                r.normalize();
                (void)root;
                return r;
            }
        }
    }
    return std::nullopt;
}

ContinuedFraction convergents(double theta, int count) {
    if (!(theta > 0.0 && theta < 1.0))
        throw precondition_error("convergents: theta must lie in (0,1)");
    // near-rational guard: run the Gauss map; a quotient beyond 1e6 or a
    // remainder below 1e-15 flags an effectively rational angle
    ContinuedFraction out;
    out.theta = theta;
    long double t = theta;
    long long p0 = 1, q0 = 0;  // p_{-1}/q_{-1}
    long long p1 = 0, q1 = 1;  // p_0/q_0
    std::vector<std::pair<long long, long long>> seq;
    // paper convention: the sequence starts at q = 1
    seq.emplace_back(static_cast<long long>(std::llround(theta)), 1);
    while (static_cast<int>(seq.size()) < count) {
        if (t < 1e-15L)
            throw precision_error("convergents: theta is within 1e-15 of a rational");
        long double inv = 1.0L / t;
        long long a = static_cast<long long>(inv);
        if (a > 1000000)
            throw precision_error("convergents: theta too close to a rational "
                                  "(partial quotient exceeds 1e6)");
        t = inv - a;
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q2 > seq.back().second) seq.emplace_back(p2, q2);
        if (q2 > (1LL << 60)) break;
    }
    seq.resize(std::min<size_t>(seq.size(), count));
    // verification by direct scan for q <= 1e4
    {
        double best = dist_to_int(theta);
        std::vector<long long> records = {1};
        for (long long q = 2; q <= 10000; ++q) {
            double d = dist_to_int(q * theta);
            if (d < best) { best = d; records.push_back(q); }
        }
        size_t j = 0;
        for (auto& pq : seq) {
            if (pq.second > 10000) break;
            if (j >= records.size() || records[j] != pq.second)
                throw precision_error("convergents: recursion disagrees with direct scan");
            ++j;
        }
    }
    out.convergents = seq;
    return out;
}

double SemiconjugacyTable::eval(double xq) const {
    double fx = frac(xq);
    double shift = std::floor(xq);
    auto it = std::upper_bound(x.begin(), x.end(), fx);
    size_t i = static_cast<size_t>(it - x.begin());
    if (i == 0) return shift + phi.front();
    if (i >= x.size()) return shift + phi.back();
    double t = (fx - x[i - 1]) / (x[i] - x[i - 1]);
    return shift + phi[i - 1] + t * (phi[i] - phi[i - 1]);
}

SemiconjugacyTable semiconjugacy_to_rotation(const CircleMap& f, const RotationNumber& rho,
                                             int n_max, int grid) {
    if (rho.exact)
        throw domain_error("semiconjugacy_to_rotation: rho must be irrational");
    double r = rho.value;
    SemiconjugacyTable tab;
    tab.rho = r;
    tab.x.resize(grid + 1);
    tab.phi.resize(grid + 1);
    auto phi_raw = [&](double x) {
        double best = x;  // n = 0 term
        double fw = x, bw = x;
        for (int n = 1; n <= n_max; ++n) {
            fw = f.lift(fw);
            best = std::max(best, fw - n * r);
            bw = f.lift_inverse(bw);
            best = std::max(best, bw + n * r);
        }
        return best;
    };
    double base = phi_raw(0.0);
    for (int i = 0; i <= grid; ++i) {
        tab.x[i] = static_cast<double>(i) / grid;
        tab.phi[i] = phi_raw(tab.x[i]) - base;
        if (i > 0 && tab.phi[i] < tab.phi[i - 1])
            tab.phi[i] = tab.phi[i - 1];  // clip FP dips; phi is nondecreasing
    }
    // conjugacy residual on the grid
    double worst = 0.0;
    for (int i = 0; i < grid; i += std::max(1, grid / 64)) {
        double x = tab.x[i];
        double lhs = tab.eval(f.lift(x)) - tab.eval(x) - r;
        worst = std::max(worst, std::fabs(lhs));
    }
    tab.residual = worst;
    return tab;
}

double variation_log_derivative(const CircleMap& f, int refinement_levels) {
    if (!f.has_derivative())
        throw capability_error("variation_log_derivative: derivative required");
    double best = 0.0;
    for (int lvl = 1; lvl <= refinement_levels; ++lvl) {
        long n = 1L << lvl;
        if (n > (1L << 24)) break;
        KahanSum v;
        double prev = std::log(f.derivative(0.0));
        for (long i = 1; i <= n; ++i) {
            double d = f.derivative(static_cast<double>(i) / n);
            if (!(d > 0)) throw invalid_map_error("variation_log_derivative: "
                                                  "nonpositive derivative");
            double cur = std::log(d);
            v.add(std::fabs(cur - prev));
            prev = cur;
        }
        best = std::max(best, v.value());
    }
    return best;
}

DenjoyKoksmaReport denjoy_koksma_check(const CircleMap& f, const BVFunction& psi,
                                       int k, const DenjoyKoksmaOptions& opt) {
    if (opt.birkhoff_n < 100000)
        throw precondition_error("denjoy_koksma_check: Birkhoff length must be >= 1e5");
    RotationNumber rho = rotation_number_estimate(f, opt.x0, 1000000);
    if (auto rat = rotation_number_rational(f, 16, 1e-12))
        throw domain_error("denjoy_koksma_check: map has rational rotation number " +
                           std::to_string(rat->p) + "/" + std::to_string(rat->q));
    ContinuedFraction cf = convergents(rho.value, k + 2);
    if (static_cast<int>(cf.convergents.size()) < k)
        throw precondition_error("denjoy_koksma_check: not enough convergents");
    long long q = cf.convergents[k - 1].second;

    DenjoyKoksmaReport rep;
    rep.q = q;
    double mu_psi;
    if (opt.mu_psi_exact) {
        mu_psi = *opt.mu_psi_exact;
    } else {
        KahanSum acc;
        double x = opt.x0;
        for (long long i = 0; i < opt.birkhoff_n; ++i) {
            acc.add(psi.eval(frac(x)));
            x = f.lift(x);
        }
        mu_psi = acc.value() / static_cast<double>(opt.birkhoff_n);
    }
    rep.mu_psi = mu_psi;

    KahanSum s;
    double x = opt.x0;
    for (long long i = 0; i < q; ++i) {
        s.add(psi.eval(frac(x)));
        x = f.lift(x);
    }
    rep.lhs = std::fabs(s.value() - q * mu_psi);
    rep.bound = psi.total_variation + opt.slack;
    rep.pass = rep.lhs <= rep.bound;

    if (opt.check_denjoy_inequality) {
        if (!f.has_derivative())
            throw capability_error("denjoy_koksma_check: derivative required for the "
                                   "Denjoy inequality");
        double v = variation_log_derivative(f, 14);
        rep.denjoy_v = v;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < opt.denjoy_samples; ++i) {
            double xs = (i + 0.31) / opt.denjoy_samples;
            double d = 1.0, y = xs;
            for (long long j = 0; j < q; ++j) {
                d *= f.derivative(y);
                y = f.lift(y);
            }
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        rep.denjoy_min = lo;
        rep.denjoy_max = hi;
        double slack = 1e-9 + 1e-9 * std::exp(v);
        rep.denjoy_pass = (lo >= std::exp(-v) - slack) && (hi <= std::exp(v) + slack);
        rep.pass = rep.pass && rep.denjoy_pass;
    }
    return rep;
}

double translation_number(const LineMap& g, const LineMeasure& v,
                          double box_lo, double box_hi, double invariance_tol) {
    // invariance on test boxes
    for (int i = 0; i < 10; ++i) {
        double a = box_lo + (box_hi - box_lo) * (i / 10.0);
        double b = a + (box_hi - box_lo) / 7.0;
        double m1 = v.interval_mass(a, b);
        double m2 = v.interval_mass(g.eval(a), g.eval(b));
        if (std::fabs(m1 - m2) > invariance_tol)
            throw precondition_error("translation_number: measure is not invariant "
                                     "(box residual " + std::to_string(std::fabs(m1 - m2)) + ")");
    }
    // monotonicity spot check
    double prev = g.eval(box_lo);
    for (int i = 1; i <= 32; ++i) {
        double x = box_lo + (box_hi - box_lo) * i / 32.0;
        double cur = g.eval(x);
        if (cur < prev) throw invalid_map_error("translation_number: map not increasing");
        prev = cur;
    }
    double tau = 0.0;
    bool first = true;
    for (int i = 0; i < 10; ++i) {
        double x = box_lo + (box_hi - box_lo) * (i + 0.5) / 10.0;
        double gx = g.eval(x);
        double t;
        if (gx > x) t = v.interval_mass(x, gx);
        else if (gx < x) t = -v.interval_mass(gx, x);
        else t = 0.0;
        if (first) { tau = t; first = false; }
        else if (std::fabs(t - tau) > 1e-8)
            throw precondition_error("translation_number: value depends on the base point");
    }
    return tau;
}

namespace {
// fixed points of a line map on [lo,hi] located by sign changes of f(x)-x
std::vector<double> line_fixed_points(const LineMap& f, double lo, double hi, int grid) {
    std::vector<double> out;
    if (!f.fixed_points.empty()) {
        for (double p : f.fixed_points)
            if (p >= lo - 1e-12 && p <= hi + 1e-12) out.push_back(p);
        std::sort(out.begin(), out.end());
        return out;
    }
    auto h = [&](double x) { return f.eval(x) - x; };
    double prev = h(lo);
    double prev_x = lo;
    for (int i = 1; i <= grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        double cur = h(x);
        if (std::fabs(prev) <= 1e-12) {
            if (out.empty() || std::fabs(out.back() - prev_x) > 1e-9) out.push_back(prev_x);
        } else if (prev * cur < 0) {
            double a = prev_x, b = x, fa = prev;
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b), fm = h(m);
                if ((fa <= 0) == (fm <= 0)) { a = m; fa = fm; } else b = m;
            }
            out.push_back(0.5 * (a + b));
        }
        prev = cur;
        prev_x = x;
    }
    if (std::fabs(prev) <= 1e-12)
        if (out.empty() || std::fabs(out.back() - prev_x) > 1e-9) out.push_back(prev_x);
    return out;
}

std::optional<CrossedCertificate> try_crossed(const LineMap& fixer, const LineMap& mover,
                                              bool f_is_fixer, int grid,
                                              double lo, double hi) {
    auto fixed = line_fixed_points(fixer, lo, hi, grid);
    for (size_t i = 0; i + 1 < fixed.size(); ++i) {
        double a = fixed[i], b = fixed[i + 1];
        if (b - a < 1e-9) continue;
        // interior truly fixed-point-free?
        bool interior_free = true;
        bool below = true, above = true;
        for (int j = 1; j < 64; ++j) {
            double x = a + (b - a) * j / 64.0;
            double d = fixer.eval(x) - x;
            if (std::fabs(d) <= 1e-9) { interior_free = false; break; }
            below = below && d < 0;
            above = above && d > 0;
        }
        if (!interior_free || (!below && !above)) continue;
        // mover must push an endpoint strictly inside
        double c;
        bool from_a;
        double ga = mover.eval(a), gb = mover.eval(b);
        if (ga > a + 1e-9 && ga < b - 1e-9) { c = ga; from_a = true; }
        else if (gb > a + 1e-9 && gb < b - 1e-9) { c = gb; from_a = false; }
        else continue;

        // Build a positive ping-pong witness.  Normalize to the contracting
        // picture: u = fixer or fixer^{-1} pulls (a,b) toward the endpoint e
        // that the mover's image c came from.
        // We construct words u = step^m and t = mover o step^n together with
        // disjoint sets A0 = (e, x0] resp. [x0, e) and A1 between them.
        auto step = [&](double x) {
            // iterate fixer toward the endpoint the image point c came from
            if (from_a) return below ? fixer.eval(x)
                                     : fixer.inverse(x, a, b);
            return below ? fixer.inverse(x, a, b) : fixer.eval(x);
        };
        // work in coordinates where the attracting endpoint is e
        double e = from_a ? a : b;
        auto dist_e = [&](double x) { return std::fabs(x - e); };
        double dprime = 0.5 * (c + (from_a ? b : a));  // beyond c, toward far end
        // find n with t(dprime) on the e-side of dprime
        int n_found = -1;
        double y = dprime;
        for (int n = 1; n <= 64; ++n) {
            y = step(y);
            double ty = mover.eval(y);
            if (dist_e(ty) < dist_e(dprime)) { n_found = n; break; }
        }
        if (n_found < 0) continue;
        // find m with step^m(dprime) strictly inside (e, c) by margin
        double delta = 0.25 * std::fabs(c - e);
        int m_found = -1;
        double z = dprime;
        for (int m = 1; m <= 256; ++m) {
            z = step(z);
            if (dist_e(z) < dist_e(c) - delta) { m_found = m; break; }
        }
        if (m_found < 0) continue;

        CrossedCertificate cert;
        cert.a = a; cert.b = b; cert.f_is_fixer = f_is_fixer;
        cert.m = m_found; cert.n = n_found;
        double x0 = from_a ? c - delta : c + delta;
        cert.A0_hi = x0;
        double y1 = c, y2 = dprime;
        cert.A1_lo = std::min(y1, y2);
        cert.A1_hi = std::max(y1, y2);
        // verify the positive ping-pong inclusions at interval endpoints:
        // u(A0 u A1) inside A0, t(A0 u A1) inside A1 (A0 open at e)
        auto apply_u = [&](double x) { for (int j = 0; j < m_found; ++j) x = step(x); return x; };
        auto apply_t = [&](double x) { for (int j = 0; j < n_found; ++j) x = step(x);
                                       return mover.eval(x); };
        auto inside_A0 = [&](double x) {
            return from_a ? (x > a && x <= x0) : (x >= x0 && x < b);
        };
        auto inside_A1 = [&](double x) {
            return x >= cert.A1_lo - 1e-12 && x <= cert.A1_hi + 1e-12;
        };
        bool ok = inside_A0(apply_u(x0)) && inside_A0(apply_u(cert.A1_lo)) &&
                  inside_A0(apply_u(cert.A1_hi)) &&
                  inside_A1(apply_t(x0)) && inside_A1(apply_t(cert.A1_lo)) &&
                  inside_A1(apply_t(cert.A1_hi)) &&
                  inside_A1(apply_t(e + (from_a ? 1e-12 : -1e-12) * std::max(1.0, std::fabs(e))));
        if (!ok) continue;
        cert.verified = {
            "u = s^" + std::to_string(m_found) + " maps A0 u A1 into A0",
            "t = mover o s^" + std::to_string(n_found) + " maps A0 u A1 into A1",
            "s = the generator fixing {a,b}, oriented toward the crossed endpoint"};
        return cert;
    }
    return std::nullopt;
}
}  // namespace

std::optional<CrossedCertificate> detect_crossed_elements(const LineMap& f, const LineMap& g,
                                                          int search_grid,
                                                          double lo, double hi) {
    if (auto c = try_crossed(f, g, true, search_grid, lo, hi)) return c;
    if (auto c = try_crossed(g, f, false, search_grid, lo, hi)) return c;
    return std::nullopt;
}

MinimalSetReport classify_minimal_set(const std::vector<CircleMap>& gens, double x0,
                                      long long depth, int resolution) {
    if (gens.empty()) throw precondition_error("classify_minimal_set: no generators");
    if (depth < 1) throw precondition_error("classify_minimal_set: depth >= 1");
    MinimalSetReport rep;
    rep.depth = depth;
    rep.resolution = resolution;

    const double close_tol = 1e-10;
    std::set<double> pts;
    auto nearby = [&](double x) {
        auto it = pts.lower_bound(x - close_tol);
        if (it != pts.end() && std::fabs(*it - x) <= close_tol) return true;
        // wraparound comparison
        if (!pts.empty()) {
            if (x < close_tol && std::fabs(*pts.rbegin() - (x + 1.0)) <= close_tol) return true;
            if (x > 1.0 - close_tol && std::fabs(*pts.begin() - (x - 1.0)) <= close_tol) return true;
        }
        return false;
    };

    const long long point_budget = 1 << 21;
    std::deque<double> frontier;
    double start = frac(x0);
    pts.insert(start);
    frontier.push_back(start);
    long long steps = 0;
    bool closed = false;
    // breadth-first orbit of the generators and their inverses
    while (!frontier.empty() && steps < depth &&
           static_cast<long long>(pts.size()) < point_budget) {
        double x = frontier.front();
        frontier.pop_front();
        bool all_old = true;
        for (auto& gmap : gens) {
            for (int dir = 0; dir < 2; ++dir) {
                double y = dir == 0 ? frac(gmap.lift(x)) : frac(gmap.lift_inverse(x));
                if (!nearby(y)) {
                    pts.insert(y);
                    frontier.push_back(y);
                    all_old = false;
                }
            }
        }
        ++steps;
        if (frontier.empty() && all_old) closed = true;
    }
    rep.points_seen = static_cast<long long>(pts.size());
    if (frontier.empty() || closed) {
        rep.kind = MinimalSetReport::Kind::FiniteOrbit;
        rep.cardinality = static_cast<int>(pts.size());
        return rep;
    }
    // bin coverage
    std::vector<char> hit(resolution, 0);
    for (double p : pts) {
        int b = std::min(static_cast<int>(p * resolution), resolution - 1);
        hit[b] = 1;
    }
    bool dense = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    if (dense) {
        rep.kind = MinimalSetReport::Kind::Dense;
        return rep;
    }
    rep.kind = MinimalSetReport::Kind::Cantor;
    // maximal empty arcs between consecutive orbit points of length > 2/resolution
    std::vector<double> sorted(pts.begin(), pts.end());
    double thresh = 2.0 / resolution;
    for (size_t i = 0; i < sorted.size(); ++i) {
        double aa = sorted[i];
        double bb = (i + 1 < sorted.size()) ? sorted[i + 1] : sorted[0] + 1.0;
        if (bb - aa > thresh) rep.gaps.emplace_back(frac(aa), bb - aa);
    }
    std::sort(rep.gaps.begin(), rep.gaps.end(),
              [](auto& l, auto& r) { return l.second > r.second; });
    return rep;
}

double rho_mu(const CircleMap& f, const CircleMeasure& mu, int samples, double spread_tol) {
    double val = 0.0;
    bool first = true;
    for (int i = 0; i < samples; ++i) {
        double x = (i + 0.123) / samples;
        double fx = f.lift(x);
        double m = mu.arc_mass(x, fx);
        m = frac(m);
        if (first) { val = m; first = false; }
        else if (circle_dist(m, val) > spread_tol)
            throw precondition_error("rho_mu: mu([x,f(x))) depends on x beyond tolerance");
    }
    return val;
}

}  // namespace circledyn
