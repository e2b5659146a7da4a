#include "liouville/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "liouville/folding.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Arc arithmetic.

namespace {

// Do [a1, a1+l1] and [a2, a2+l2] intersect on a circle of circumference T?
bool arcs_overlap(double a1, double l1, double a2, double l2, double T) {
    double d = wrap(a2 - a1, T);
    return d < l1 || d > T - l2;
}

}  // namespace

ChimneyCertificate arc_certificate(double loop_total, double gamma_lo, double gamma_len,
                                   double t_minus, double t0, bool closed_loop) {
    if (!(t_minus > 0) || !(t0 > 0)) throw std::invalid_argument("arc_certificate: lengths must be positive");
    ChimneyCertificate cert;
    cert.loop_total = loop_total;
    cert.gamma_lo = gamma_lo;
    cert.gamma_len = gamma_len;
    cert.n = static_cast<int>(std::floor(t0 / t_minus)) + 1;  // smallest n with n t_minus > t0
    if (gamma_len >= loop_total) {
        cert.disjoint = false;
        cert.first_overlap = 1;
        for (int j = 1; j <= cert.n; ++j)
            cert.iterate_arcs.push_back({wrap(gamma_lo - j * t_minus, loop_total), gamma_len});
        return cert;
    }
    cert.disjoint = true;
    cert.clearance = loop_total;
    for (int j = 1; j <= cert.n; ++j) {
        double lo = gamma_lo - j * t_minus;
        if (!closed_loop && lo < 0) {
            // Open boundary arc: iterates that run off the end cannot return.
            cert.iterate_arcs.push_back({lo, gamma_len});
            continue;
        }
        lo = wrap(lo, loop_total);
        cert.iterate_arcs.push_back({lo, gamma_len});
        if (arcs_overlap(gamma_lo, gamma_len, lo, gamma_len, loop_total)) {
            if (cert.disjoint) {
                cert.disjoint = false;
                cert.first_overlap = j;
            }
            cert.clearance = 0;
        } else {
            double fwd = wrap(lo - (gamma_lo + gamma_len), loop_total);
            double bwd = wrap(gamma_lo - (lo + gamma_len), loop_total);
            cert.clearance = std::min(cert.clearance, std::min(fwd, bwd));
        }
    }
    return cert;
}

ChimneyCertificate check_main_assumption(const WeinsteinBase& base, double gamma_lo,
                                         double gamma_len, double t_minus, double t0, double s0) {
    (void)s0;
    BoundaryLoop loop = boundary_loop(base, forward_exit(base, BasePoint{1e-3, 1e-3}).point);
    ChimneyCertificate cert = arc_certificate(loop.total, gamma_lo, gamma_len, t_minus, t0, loop.closed);
    // Replay: the iterated arcs are exactly the backward Reeb images.
    for (int j = 1; j <= cert.n && loop.closed; ++j) {
        BasePoint a = loop.at_time(gamma_lo);
        for (int k = 0; k < j; ++k) a = reeb_boundary_holonomy(base, a, t_minus);
        double u = boundary_time(base, a);
        double expect = cert.iterate_arcs[static_cast<size_t>(j) - 1].first;
        double d = wrap(u - expect, loop.total);
        if (std::min(d, loop.total - d) > 1e-9)
            throw std::logic_error("main assumption: iterate replay mismatch");
    }
    return cert;
}

PLFold build_chimney_region(const WeinsteinBase& base, double gamma_lo, double gamma_len,
                            double eps_aux, double s0, double t0, double t_minus,
                            const ChimneyCertificate& cert, double s_lo) {
    if (!(eps_aux > 0)) throw std::invalid_argument("chimney collar must be proper (eps_aux > 0)");
    if (!(eps_aux < s0)) throw std::invalid_argument("eps_aux must be smaller than s0");
    if (!(t_minus > 0 && t_minus < t0)) throw std::invalid_argument("need 0 < t_minus < t0");
    if (!cert.disjoint)
        throw std::invalid_argument("main assumption fails: iterate " +
                                    std::to_string(cert.first_overlap) + " meets gamma");
    if (cert.n * t_minus <= t0) throw std::invalid_argument("certificate n too small");
    PLFold f;
    f.kind = FoldKind::Chimney;
    f.base = base;
    f.s_lo = s_lo;
    f.s_hi = s_lo + s0;
    f.t0 = t0;
    f.t_minus = t_minus;
    f.z0 = std::exp(f.s_hi) * t0;  // z0 = e^{s0} t0 in the shifted normalization
    f.chimney = ChimneySpec{gamma_lo, gamma_len, eps_aux};
    return f;
}

// ---------------------------------------------------------------------------
// TiltedCapBase.

TiltedCapBase::TiltedCapBase(double c1_, double p1_, double q1_, double rho1_)
    : c1(c1_), p1(p1_), q1(q1_), rho1(rho1_) {
    if (!(q1 > 2 * c1)) throw std::invalid_argument("tilted cap base requires q1 > 2 c1");
    if (!(rho1 > 0 && rho1 < p1)) throw std::invalid_argument("need 0 < rho1 < p1");
    if (!(rho1 < 2 * c1)) throw std::invalid_argument("the cap must avoid the zero: rho1 < 2 c1");
    cb_ = q1 / 2 - c1;
    cs_ = p1 / 2;
    cap_time_ = M_PI * rho1 * rho1 / 2 + 2 * c1 * rho1;
    cap_start_ = 2 * p1 * cb_ + q1 * cs_ + (p1 - rho1) * c1;
    total_ = cap_start_ + cap_time_ + (p1 - rho1) * c1 + q1 * cs_;
}

bool TiltedCapBase::contains(BasePoint x, double tol) const {
    if (std::abs(x.a) <= p1 + tol && x.b >= -q1 - tol && x.b <= tol) return true;
    return x.a * x.a + x.b * x.b <= sqr(rho1 + tol) && x.b >= -tol;
}

double TiltedCapBase::exit_factor(BasePoint x) const {
    double m = x.b + 2 * c1;
    double best = std::numeric_limits<double>::infinity();
    auto take = [&](double u) {
        if (u > 1 - 1e-12 && u < best) best = u;
    };
    // Side walls p = +-p1 (valid while the crossing has q <= 0).
    if (x.a != 0) {
        double u = p1 / std::abs(x.a);
        if (u * m - 2 * c1 <= 1e-12) take(u);
    }
    // Bottom q = -q1.
    if (m < 0) take((2 * c1 - q1) / m);
    if (m > 0) {
        // Top segments q = 0 with rho1 <= |p| <= p1.
        double u = 2 * c1 / m;
        double pc = std::abs(x.a) * u;
        if (pc >= rho1 - 1e-12 && pc <= p1 + 1e-12) take(u);
        // Cap circle p^2 + q^2 = rho1^2 with q >= 0.
        double a = x.a * x.a + m * m;
        double b = -4 * c1 * m;
        double c = 4 * c1 * c1 - rho1 * rho1;
        double disc = b * b - 4 * a * c;
        if (disc >= 0) {
            double u2 = (-b + std::sqrt(disc)) / (2 * a);
            if (u2 * m - 2 * c1 >= -1e-12) take(u2);
        }
    }
    return best;
}

BasePoint TiltedCapBase::exit_point(BasePoint x) const {
    double u = exit_factor(x);
    return {x.a * u, u * (x.b + 2 * c1) - 2 * c1};
}

BasePoint TiltedCapBase::at_time(double u) const {
    u = wrap(u, total_);
    double d = 2 * p1 * cb_;
    if (u <= d) return {-p1 + u / cb_, -q1};
    u -= d;
    d = q1 * cs_;
    if (u <= d) return {p1, -q1 + u / cs_};
    u -= d;
    d = (p1 - rho1) * c1;
    if (u <= d) return {p1 - u / c1, 0};
    u -= d;
    if (u <= cap_time_) {
        // Invert u = rho1^2 phi / 2 + c1 rho1 (1 - cos phi) on [0, pi].
        double lo = 0, hi = M_PI;
        double phi = std::min(M_PI, u / (rho1 * rho1 / 2 + 2 * c1 * rho1 / M_PI));
        for (int it = 0; it < 80; ++it) {
            double f = rho1 * rho1 * phi / 2 + c1 * rho1 * (1 - std::cos(phi)) - u;
            if (f > 0)
                hi = phi;
            else
                lo = phi;
            double fp = rho1 * rho1 / 2 + c1 * rho1 * std::sin(phi);
            double next = phi - f / fp;
            phi = (next > lo && next < hi) ? next : (lo + hi) / 2;
            if (hi - lo < 1e-15) break;
        }
        return {rho1 * std::cos(phi), rho1 * std::sin(phi)};
    }
    u -= cap_time_;
    d = (p1 - rho1) * c1;
    if (u <= d) return {-rho1 - u / c1, 0};
    u -= d;
    return {-p1, -u / cs_};
}

double TiltedCapBase::time_of(BasePoint x) const {
    const double tol = 1e-9;
    if (std::abs(x.b + q1) < tol) return (x.a + p1) * cb_;
    double u = 2 * p1 * cb_;
    if (std::abs(x.a - p1) < tol && x.b <= tol) return u + (x.b + q1) * cs_;
    u += q1 * cs_;
    if (std::abs(x.b) < tol && x.a >= rho1 - tol) return u + (p1 - x.a) * c1;
    u += (p1 - rho1) * c1;
    double r = std::sqrt(x.a * x.a + x.b * x.b);
    if (x.b >= -tol && std::abs(r - rho1) < 1e-6) {
        double phi = std::atan2(x.b, x.a);
        if (phi < 0) phi = 0;
        return u + rho1 * rho1 * phi / 2 + c1 * rho1 * (1 - std::cos(phi));
    }
    u += cap_time_;
    if (std::abs(x.b) < tol && x.a <= -rho1 + tol) return u + (-rho1 - x.a) * c1;
    u += (p1 - rho1) * c1;
    if (std::abs(x.a + p1) < tol) return u + (-x.b) * cs_;
    throw std::domain_error("TiltedCapBase::time_of: point not on the boundary");
}

// ---------------------------------------------------------------------------
// Parameter schedule.

namespace {

struct CapChecks {
    bool ok_5a = false, ok_5b = false, ok_crown = false;
    double worst_exit_time = 0;
    double ext_needed = 0;  // gamma extension past the cap, in p-length
};

CapChecks check_rho1(const TiltedCapBase& W1, double rho1, double s1, double t1_minus, double delta1,
                     double crown) {
    CapChecks ck;
    ck.ok_5b = W1.cap_duration() < 0.9 * t1_minus;
    ck.ok_crown = crown * rho1 * rho1 <= 0.25 * delta1;
    double worst = 0, ext = 0;
    const int N = 24;
    for (int i = -N; i <= N; ++i) {
        for (int j = -N; j <= N; ++j) {
            BasePoint x{rho1 * i / N, rho1 * j / N};
            if (x.a * x.a + x.b * x.b > rho1 * rho1) continue;
            worst = std::max(worst, W1.exit_time(x));
            BasePoint e = W1.exit_point(x);
            if (std::abs(e.b) < 1e-9 && std::abs(e.a) > rho1)
                ext = std::max(ext, std::abs(e.a) - rho1);
        }
    }
    ck.worst_exit_time = worst;
    ck.ok_5a = worst < 0.9 * s1;
    ck.ext_needed = ext;
    return ck;
}

}  // namespace

ScheduleResult choose_blocking_params(double s0, double t0, double delta, double eps, double r0) {
    if (!(s0 > 0 && t0 > 0 && r0 > 0)) return Infeasible{"positive s0, t0, r0 required"};
    if (!(delta > 0 && delta < t0 / 8)) return Infeasible{"delta must satisfy 0 < delta << t0"};
    if (!(eps > 0 && eps < 1)) return Infeasible{"eps must lie in (0,1)"};

    BlockingApparatusParams P;
    P.s0 = s0;
    P.t0 = t0;
    P.delta = delta;
    P.eps = eps;
    P.r0 = r0;
    P.s1 = P.s2 = s0 / 3;
    // Stove critical points sit at t* ~ delta1 + delta + c1 p1; classifying
    // them below 3 delta1 forces delta1 > (delta + c1 p1) / 2.
    P.delta1 = 0.75 * delta;
    P.p1 = t0 / 10;
    P.c1 = delta / (4 * P.p1);
    P.t_top = t0 - P.delta1;
    P.crown = 0.75;
    P.sigma1_lo = 0.60 * s0;
    P.sigma2_lo = 0.15 * s0;

    // rho1 by bisection until (5a), (5b) and the crown-room bound hold.
    double rho1 = 0.8 * std::min(P.p1, 2 * P.c1);
    CapChecks ck;
    bool found = false;
    for (int it = 0; it < 50; ++it) {
        if (rho1 < 1e-9 * t0) break;
        TiltedCapBase W1(P.c1, P.p1, 3 * P.c1, rho1);  // q1 placeholder for geometry checks
        ck = check_rho1(W1, rho1, P.s1, delta, P.delta1, P.crown);
        if (ck.ok_5a && ck.ok_5b && ck.ok_crown) {
            found = true;
            break;
        }
        rho1 /= 2;
    }
    if (!found) return Infeasible{"rho1 bisection failed (5a)/(5b)"};
    P.rho1 = rho1;
    P.gamma_ext = std::min(1.1 * ck.ext_needed + 0.02 * rho1, P.p1 - rho1);

    // q1 grows geometrically until the main assumption holds.
    double t_chord = P.t_top - P.delta1;  // chimney Reeb chord on the axis
    P.n_iterates = static_cast<int>(std::floor(t_chord / delta)) + 1;
    double q1 = 2.6 * P.c1;
    bool assumption = false;
    for (int it = 0; it < 80; ++it) {
        TiltedCapBase W1(P.c1, P.p1, q1, rho1);
        double glo = W1.cap_start_time() - P.gamma_ext * P.c1;
        double glen = W1.cap_duration() + 2 * P.gamma_ext * P.c1;
        ChimneyCertificate cert = arc_certificate(W1.loop_total(), glo, glen, delta, t_chord);
        // Demand genuine clearance so the smooth wall dynamics keep a margin.
        if (cert.disjoint && cert.clearance > 0.5 * glen) {
            assumption = true;
            P.q1 = q1;
            P.gamma_lo = glo;
            P.gamma_len = glen;
            break;
        }
        q1 *= 1.5;
    }
    if (!assumption) return Infeasible{"main assumption: q1 growth failed"};

    P.min_r0 = 1.05 * std::sqrt(P.p1 * P.p1 + P.q1 * P.q1);
    if (!(P.min_r0 < r0)) return Infeasible{"r2 bound"};
    P.r2 = 0.5 * (P.min_r0 + r0);
    if (P.r2 > 0.95 * r0) P.r2 = 0.95 * r0;

    P.t2 = t0 / 2;
    P.z2 = 1.1 * 3 * P.delta1 / (1 - std::exp(-P.s2));
    if (!(P.z2 < 0.45 * P.t2)) return Infeasible{"z2 bound"};

    P.z1 = std::exp(P.sigma1_lo + P.s1) * t_chord;
    P.tau = std::min({0.05 * P.s1, 0.15 * P.delta1, 0.2 * rho1, 0.02 * t0});
    return P;
}

std::pair<double, double> stove_slab(const BlockingApparatusParams& P) {
    return {P.delta1 - P.c1 * P.p1, P.delta1 + P.c1 * P.p1 + P.delta};
}

double hole_trap_thickness(const BlockingApparatusParams& P) {
    return (1 - std::exp(-P.s2)) * P.z2;
}

BlockingApparatus assemble_blocking_apparatus(const BlockingApparatusParams& P) {
    if (!(P.sigma2_lo + P.s2 < P.sigma1_lo))
        throw std::invalid_argument("sigma intervals must be ordered: sup sigma2 < inf sigma1");
    auto [slab_lo, slab_hi] = stove_slab(P);
    double hole_lo = 2 * P.tau;
    double hole_hi = hole_lo + hole_trap_thickness(P);
    if (!(slab_lo > hole_lo && slab_hi < hole_hi))
        throw std::invalid_argument("stove slab is not engulfed by the box-hole trap band");

    BlockingApparatus A;
    A.params = P;
    A.region.s_lo = 0;
    A.region.s_hi = P.s0;
    A.region.t_hi = P.t0;
    A.region.R0 = P.r0;

    FoldingFunction chim;
    chim.H = P.z1;
    chim.tau = P.tau;
    chim.s_a = P.sigma1_lo;
    chim.s_b = P.sigma1_lo + P.s1;
    chim.tshape = FoldingFunction::TShape::ApparatusChimney;
    chim.disk_R = P.r0;
    chim.ap_delta1 = P.delta1;
    chim.ap_c1 = P.c1;
    chim.ap_rho1 = P.rho1;
    chim.ap_stove_len = P.delta;
    chim.ap_t_top = P.t_top;
    chim.ap_crown = P.crown;
    chim.ap_band = 0.35 * P.rho1;
    chim.fp_pa = -P.p1;
    chim.fp_pb = P.p1;
    chim.fp_qa = -P.q1;
    chim.fp_qb = 1.1 * P.rho1;
    chim.fp_w = std::min({0.2 * P.p1, 0.2 * P.q1, 0.3 * P.rho1});
    chim.tilt_amp = 0.2;
    chim.tilt_speak = 0.5 * (chim.s_a + chim.s_b);
    chim.geometry.kind = FoldKind::Chimney;
    chim.geometry.base = Disk{P.r0};
    chim.geometry.s_lo = chim.s_a;
    chim.geometry.s_hi = chim.s_b;
    chim.geometry.t0 = P.t_top;
    chim.geometry.t_minus = P.delta;
    chim.geometry.z0 = P.z1;

    FoldingFunction hole;
    hole.H = -std::exp(P.sigma2_lo) * P.z2;
    hole.tau = P.tau;
    hole.s_a = P.sigma2_lo;
    hole.s_b = P.sigma2_lo + P.s2;
    hole.t_a = hole_lo;
    hole.t_b = P.t2;
    hole.disk_R = P.r0;
    hole.disk_fade_radial = true;
    hole.disk_support_R = P.r2;
    hole.fade_w = 0.15 * P.r2;
    hole.tilt_amp = 0.2;
    hole.tilt_speak = 0.5 * (hole.s_a + hole.s_b);
    hole.geometry = make_box_hole(P.s2, P.t2, P.z2, Disk{P.r0}, P.sigma2_lo);

    A.region.folds.push_back(chim);
    A.region.folds.push_back(hole);
    return A;
}

std::string explain_schedule(const BlockingApparatusParams& P) {
    std::ostringstream out;
    auto line = [&](const std::string& name, double lhs, const char* rel, double rhs) {
        double slack = rhs != 0 ? std::abs(rhs - lhs) / std::abs(rhs) : 0;
        out << name << ": " << num_str(lhs) << " " << rel << " " << num_str(rhs) << "   (slack "
            << num_str(100 * slack) << "%)\n";
    };
    line("s1 + s2 < s0", P.s1 + P.s2, "<", P.s0);
    line("c1 p1 < delta", P.c1 * P.p1, "<", P.delta);
    line("delta1 < delta", P.delta1, "<", P.delta);
    line("q1 > 2 c1", P.q1, ">", 2 * P.c1);
    line("rho1 < 2 c1", P.rho1, "<", 2 * P.c1);
    line("cap Reeb time < t1_minus", M_PI * P.rho1 * P.rho1 / 2 + 2 * P.c1 * P.rho1, "<", P.delta);
    line("sqrt(p1^2+q1^2) < r2", std::sqrt(P.p1 * P.p1 + P.q1 * P.q1), "<", P.r2);
    line("r2 < r0", P.r2, "<", P.r0);
    line("z2 < t2/2", P.z2, "<", P.t2 / 2);
    line("(1-e^{-s2}) z2 > 3 delta1", hole_trap_thickness(P), ">", 3 * P.delta1);
    auto [slab_lo, slab_hi] = stove_slab(P);
    line("stove slab top < hole band top", slab_hi, "<", 2 * P.tau + hole_trap_thickness(P));
    line("sup sigma2 < inf sigma1", P.sigma2_lo + P.s2, "<", P.sigma1_lo);
    out << "n = " << P.n_iterates << ", minimal feasible r0 = " << num_str(P.min_r0) << "\n";
    return out.str();
}

}  // namespace liouville
