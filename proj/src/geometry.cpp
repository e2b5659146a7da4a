#include "liouville/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace liouville {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double disk_radius(const BasePoint& x) { return norm_stab(x.a, x.b); }

// Smallest u >= 1 at which the forward TiltedDisk flow, written as
// (u p, u (q + 2 c1) - 2 c1) with u = e^{s/2}, crosses a wall.
double tilted_exit_factor(const TiltedDisk& td, BasePoint x) {
    double u = kInf;
    if (x.a != 0) u = std::min(u, td.p1 / std::abs(x.a));
    double m = x.b + 2 * td.c1;
    if (m > 0) u = std::min(u, (td.q_plus + 2 * td.c1) / m);
    if (m < 0) u = std::min(u, (2 * td.c1 - td.q_minus) / m);
    return u;
}

}  // namespace

bool contains(const WeinsteinBase& base, BasePoint x, double tol) {
    return std::visit(
        [&](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return disk_radius(x) <= b.r0 + tol;
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                return x.a >= b.r_lo - tol && x.a <= b.r_hi + tol && x.b >= -tol &&
                       x.b <= b.theta_len + tol;
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                return std::abs(x.a) <= b.p1 + tol && x.b >= -b.q_minus - tol && x.b <= b.q_plus + tol;
            } else {
                return x.b >= -1 - tol && x.b <= 1 + tol;
            }
        },
        base);
}

bool on_skeleton(const WeinsteinBase& base, BasePoint x, double tol) {
    return std::visit(
        [&](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return disk_radius(x) <= tol;
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                (void)b;
                return false;  // trivial cobordism, no skeleton
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                return std::abs(x.a) <= tol && std::abs(x.b + 2 * b.c1) <= tol;
            } else {
                return std::abs(x.b - b.tau0) <= tol;
            }
        },
        base);
}

FlowResult liouville_flow_base(const WeinsteinBase& base, BasePoint x, double s) {
    if (!contains(base, x))
        throw std::domain_error("liouville_flow_base: point outside base");
    return std::visit(
        [&](const auto& b) -> FlowResult {
            using T = std::decay_t<decltype(b)>;
            FlowResult r;
            if constexpr (std::is_same_v<T, Disk>) {
                double rho = disk_radius(x);
                double f = std::exp(s / 2);
                if (rho > 0 && rho * f > b.r0) {
                    double sx = 2 * std::log(b.r0 / rho);
                    double g = b.r0 / rho;
                    r.point = {x.a * g, x.b * g};
                    r.exited = true;
                    r.exit_time = sx;
                } else {
                    r.point = {x.a * f, x.b * f};
                }
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                double rn = x.a + s;
                if (rn > b.r_hi) {
                    r.point = {b.r_hi, x.b};
                    r.exited = true;
                    r.exit_time = b.r_hi - x.a;
                } else if (rn < b.r_lo) {
                    r.point = {b.r_lo, x.b};
                    r.exited = true;
                    r.exit_time = b.r_lo - x.a;
                } else {
                    r.point = {rn, x.b};
                }
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                double f = std::exp(s / 2);
                double ustar = tilted_exit_factor(b, x);
                if (f > ustar) {
                    r.point = {x.a * ustar, ustar * (x.b + 2 * b.c1) - 2 * b.c1};
                    r.exited = true;
                    r.exit_time = 2 * std::log(ustar);
                } else {
                    r.point = {x.a * f, f * (x.b + 2 * b.c1) - 2 * b.c1};
                }
            } else {  // AnnulusBand
                double d = x.b - b.tau0;
                double f = std::exp(s);
                double lim = d > 0 ? 1 - b.tau0 : 1 + b.tau0;
                if (d != 0 && std::abs(d) * f > lim) {
                    double sx = std::log(lim / std::abs(d));
                    r.point = {x.a, d > 0 ? 1.0 : -1.0};
                    r.exited = true;
                    r.exit_time = sx;
                } else {
                    r.point = {x.a, b.tau0 + d * f};
                }
            }
            return r;
        },
        base);
}

double norm_w(const WeinsteinBase& base, BasePoint x) {
    if (!contains(base, x))
        throw std::domain_error("norm_w: point outside base");
    return std::visit(
        [&](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return sqr(disk_radius(x) / b.r0);
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                return std::exp(x.a - b.r_hi);
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                double u = tilted_exit_factor(b, x);
                return u == kInf ? 0.0 : 1.0 / (u * u);
            } else {
                double d = std::abs(x.b - b.tau0);
                double lim = x.b > b.tau0 ? 1 - b.tau0 : 1 + b.tau0;
                return d / lim;
            }
        },
        base);
}

bool in_collar(const WeinsteinBase& base, BasePoint x, double s0) {
    if (!(s0 > 0)) throw std::invalid_argument("in_collar: s0 must be positive");
    return norm_w(base, x) > std::exp(-s0);
}

BoundaryHit forward_exit(const WeinsteinBase& base, BasePoint x) {
    double n = norm_w(base, x);
    if (n <= 0) throw std::domain_error("forward_exit: point on the skeleton");
    double sx = -std::log(n);
    FlowResult fr = liouville_flow_base(base, x, sx + 1.0);  // force the crossing
    if (!fr.exited) {
        // Point was already on the boundary.
        return {x, 0.0};
    }
    return {fr.point, fr.exit_time};
}

BasePoint BoundaryLoop::at_time(double u) const {
    double t = closed ? wrap(u, total) : u;
    if (!closed && (t < -1e-12 || t > total + 1e-12))
        throw std::domain_error("boundary arc: Reeb time out of range on open boundary");
    for (const auto& a : arcs) {
        if (t <= a.duration + 1e-15) return a.at(std::min(t, a.duration));
        t -= a.duration;
    }
    return arcs.back().at(arcs.back().duration);
}

BoundaryLoop boundary_loop(const WeinsteinBase& base, BasePoint near) {
    return std::visit(
        [&](const auto& b) -> BoundaryLoop {
            using T = std::decay_t<decltype(b)>;
            BoundaryLoop loop;
            if constexpr (std::is_same_v<T, Disk>) {
                double scale = b.r0 * b.r0 / 2;  // Reeb time per unit angle
                BoundaryArc arc;
                arc.duration = 2 * M_PI * scale;
                arc.at = [b, scale](double u) -> BasePoint {
                    double th = u / scale;
                    return {b.r0 * std::cos(th), b.r0 * std::sin(th)};
                };
                loop.arcs = {arc};
                loop.total = arc.duration;
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                loop.closed = false;
                bool hi = std::abs(near.a - b.r_hi) <= std::abs(near.a - b.r_lo);
                double r = hi ? b.r_hi : b.r_lo;
                double scale = std::exp(r);
                BoundaryArc arc;
                arc.duration = b.theta_len * scale;
                arc.at = [r, scale](double u) -> BasePoint { return {r, u / scale}; };
                loop.arcs = {arc};
                loop.total = arc.duration;
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                // Counterclockwise, starting at (-p1, -q_minus).
                double cb = b.q_minus / 2 - b.c1;  // bottom speed denominator
                double ct = b.q_plus / 2 + b.c1;
                double cs = b.p1 / 2;
                BoundaryArc bottom{2 * b.p1 * cb,
                                   [b, cb](double u) -> BasePoint { return {-b.p1 + u / cb, -b.q_minus}; }};
                BoundaryArc right{(b.q_minus + b.q_plus) * cs,
                                  [b, cs](double u) -> BasePoint { return {b.p1, -b.q_minus + u / cs}; }};
                BoundaryArc top{2 * b.p1 * ct,
                                [b, ct](double u) -> BasePoint { return {b.p1 - u / ct, b.q_plus}; }};
                BoundaryArc left{(b.q_minus + b.q_plus) * cs,
                                 [b, cs](double u) -> BasePoint { return {-b.p1, b.q_plus - u / cs}; }};
                loop.arcs = {bottom, right, top, left};
                loop.total = bottom.duration + right.duration + top.duration + left.duration;
            } else {  // AnnulusBand: two circles; pick the one nearest `near`.
                bool upper = near.b >= b.tau0;
                double denom = upper ? (b.tau0 - 1) : (b.tau0 + 1);  // lambda(d_theta)
                double tau = upper ? 1.0 : -1.0;
                // Positive Reeb direction drifts theta by 1/denom per unit time.
                BoundaryArc arc;
                arc.duration = b.theta_len * std::abs(denom);
                double dn = denom;
                double tl = b.theta_len;
                arc.at = [tau, dn, tl](double u) -> BasePoint { return {wrap(u / dn, tl), tau}; };
                loop.arcs = {arc};
                loop.total = arc.duration;
            }
            return loop;
        },
        base);
}

double boundary_time(const WeinsteinBase& base, BasePoint x) {
    return std::visit(
        [&](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Disk>) {
                double th = std::atan2(x.b, x.a);
                if (th < 0) th += 2 * M_PI;
                return th * b.r0 * b.r0 / 2;
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                bool hi = std::abs(x.a - b.r_hi) <= std::abs(x.a - b.r_lo);
                return x.b * std::exp(hi ? b.r_hi : b.r_lo);
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                double cb = b.q_minus / 2 - b.c1;
                double ct = b.q_plus / 2 + b.c1;
                double cs = b.p1 / 2;
                double tol = 1e-9;
                if (std::abs(x.b + b.q_minus) < tol) return (x.a + b.p1) * cb;
                double u = 2 * b.p1 * cb;
                if (std::abs(x.a - b.p1) < tol) return u + (x.b + b.q_minus) * cs;
                u += (b.q_minus + b.q_plus) * cs;
                if (std::abs(x.b - b.q_plus) < tol) return u + (b.p1 - x.a) * ct;
                u += 2 * b.p1 * ct;
                if (std::abs(x.a + b.p1) < tol) return u + (b.q_plus - x.b) * cs;
                throw std::domain_error("boundary_time: point not on TiltedDisk boundary");
            } else {
                double denom = x.b >= b.tau0 ? (b.tau0 - 1) : (b.tau0 + 1);
                return wrap(x.a * denom, b.theta_len * std::abs(denom));
            }
        },
        base);
}

BasePoint reeb_boundary_holonomy(const WeinsteinBase& base, BasePoint boundary_pt, double t) {
    BoundaryLoop loop = boundary_loop(base, boundary_pt);
    double u = boundary_time(base, boundary_pt);
    return loop.at_time(u - t);  // backward Reeb motion
}

// ---------------------------------------------------------------------------

WeinsteinBase base_from_config(const ConfigMap& cfg) {
    std::string kind = cfg.get_str("kind");
    if (kind == "disk") return Disk{cfg.get_pos("r0", 1)};
    if (kind == "strip")
        return ExactStrip{cfg.get_num("r_lo", -1), cfg.get_num("r_hi", 0), cfg.get_pos("theta_len", 1)};
    if (kind == "tilted") {
        TiltedDisk td{cfg.get_pos("c1", 0.3), cfg.get_pos("p1", 1), cfg.get_pos("q_minus", 1),
                      cfg.get_pos("q_plus", 0.2)};
        if (!(td.q_minus > 2 * td.c1))
            throw std::invalid_argument("tilted base requires q_minus > 2 c1");
        return td;
    }
    if (kind == "annulus") {
        AnnulusBand ab{cfg.get_num("tau0", 0.1), cfg.get_pos("theta_len", 1)};
        if (!(ab.tau0 > -1 && ab.tau0 < 1) || ab.tau0 == 0)
            throw std::invalid_argument("annulus base requires tau0 in (-1,1) \\ {0}");
        return ab;
    }
    throw std::invalid_argument("unknown base kind: " + kind);
}

ConfigMap base_to_config(const WeinsteinBase& base) {
    ConfigMap cfg;
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Disk>) {
                cfg.set("kind", std::string("disk"));
                cfg.set("r0", b.r0);
            } else if constexpr (std::is_same_v<T, ExactStrip>) {
                cfg.set("kind", std::string("strip"));
                cfg.set("r_lo", b.r_lo);
                cfg.set("r_hi", b.r_hi);
                cfg.set("theta_len", b.theta_len);
            } else if constexpr (std::is_same_v<T, TiltedDisk>) {
                cfg.set("kind", std::string("tilted"));
                cfg.set("c1", b.c1);
                cfg.set("p1", b.p1);
                cfg.set("q_minus", b.q_minus);
                cfg.set("q_plus", b.q_plus);
            } else {
                cfg.set("kind", std::string("annulus"));
                cfg.set("tau0", b.tau0);
                cfg.set("theta_len", b.theta_len);
            }
        },
        base);
    return cfg;
}

std::string base_kind_name(const WeinsteinBase& base) {
    return base_to_config(base).get_str("kind");
}

}  // namespace liouville
