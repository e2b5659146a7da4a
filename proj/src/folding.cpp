#include "liouville/folding.hpp"

#include <cmath>
#include <stdexcept>

namespace liouville {

double smoothstep(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    return u * u * u * (10 + u * (-15 + 6 * u));
}
double smoothstep_d(double u) {
    if (u <= 0 || u >= 1) return 0;
    double v = u * (1 - u);
    return 30 * v * v;
}
double smoothstep_dd(double u) {
    if (u <= 0 || u >= 1) return 0;
    return 60 * u * (1 - u) * (1 - 2 * u);
}

double Plateau::value(double x) const {
    return smoothstep((x - a) / tau) * smoothstep((b - x) / tau);
}
double Plateau::deriv(double x) const {
    double ua = (x - a) / tau, ub = (b - x) / tau;
    return (smoothstep_d(ua) * smoothstep(ub) - smoothstep(ua) * smoothstep_d(ub)) / tau;
}
double Plateau::deriv2(double x) const {
    double ua = (x - a) / tau, ub = (b - x) / tau;
    return (smoothstep_dd(ua) * smoothstep(ub) - 2 * smoothstep_d(ua) * smoothstep_d(ub) +
            smoothstep(ua) * smoothstep_dd(ub)) /
           (tau * tau);
}

double Bump::value(double x) const {
    if (x <= a || x >= b) return 0;
    return x <= peak ? smoothstep((x - a) / (peak - a)) : smoothstep((b - x) / (b - peak));
}
double Bump::deriv(double x) const {
    if (x <= a || x >= b) return 0;
    return x <= peak ? smoothstep_d((x - a) / (peak - a)) / (peak - a)
                     : -smoothstep_d((b - x) / (b - peak)) / (b - peak);
}
double Bump::deriv2(double x) const {
    if (x <= a || x >= b) return 0;
    return x <= peak ? smoothstep_dd((x - a) / (peak - a)) / sqr(peak - a)
                     : smoothstep_dd((b - x) / (b - peak)) / sqr(b - peak);
}

namespace {

struct Fade {
    double v = 1, dp = 0, dq = 0;
};

// Disk-factor fade with gradient in (p, q).
Fade disk_factor(const FoldingFunction& ff, double p, double q) {
    Fade out;
    if (!ff.has_disk()) return out;
    if (ff.fp_w > 0) {
        // Rectangular footprint window (apparatus folds over the tilted base).
        Plateau pp{ff.fp_pa, ff.fp_pb, ff.fp_w};
        Plateau pq{ff.fp_qa, ff.fp_qb, ff.fp_w};
        double a = pp.value(p), b = pq.value(q);
        out.v = a * b;
        out.dp = pp.deriv(p) * b;
        out.dq = a * pq.deriv(q);
        return out;
    }
    if (ff.disk_fade <= 0 && !ff.disk_fade_radial) return out;
    double rho2 = p * p + q * q;
    if (ff.disk_fade_radial) {
        double rho = std::sqrt(rho2);
        double u = (ff.disk_support_R - rho) / ff.fade_w;
        out.v = smoothstep(u);
        double dv = -smoothstep_d(u) / ff.fade_w;
        if (rho > 1e-300) {
            out.dp = dv * p / rho;
            out.dq = dv * q / rho;
        }
    } else {
        // Collar depth rc = log((rho/R)^2); fade to zero on [-disk_fade, 0].
        if (rho2 <= 0) return out;
        double rc = std::log(rho2 / sqr(ff.disk_R));
        double u = -rc / ff.disk_fade;
        out.v = smoothstep(u);
        double dv = -smoothstep_d(u) / ff.disk_fade;  // d/d rc
        out.dp = dv * 2 * p / rho2;
        out.dq = dv * 2 * q / rho2;
    }
    return out;
}

struct AnnFade {
    double v = 1, dtau = 0;
};

AnnFade annulus_factor(const FoldingFunction& ff, double tau_w) {
    AnnFade out;
    if (!ff.annulus) return out;
    const AnnulusBand& ab = *ff.annulus;
    double d = tau_w - ab.tau0;
    if (d == 0) return out;  // on the skeleton: deep interior, no fade
    double lim = d > 0 ? 1 - ab.tau0 : 1 + ab.tau0;
    double rc = std::log(std::abs(d) / lim);
    double u = -rc / ff.annulus_fade;
    out.v = smoothstep(u);
    out.dtau = -smoothstep_d(u) / ff.annulus_fade / d;  // d rc / d tau = 1/d
    return out;
}

// Reeb chord window with gradient.
struct Chord {
    double lo = 0, hi = 1;
    double dlo[2] = {0, 0};  // gradient in (p, q)
    double dhi[2] = {0, 0};
};

Chord chord_of(const FoldingFunction& ff, const double* w) {
    Chord c;
    switch (ff.tshape) {
        case FoldingFunction::TShape::Fixed:
            c.lo = ff.t_a;
            c.hi = ff.t_b;
            break;
        case FoldingFunction::TShape::ModelChimney: {
            double p = w[0], q = w[1];
            double rho2 = p * p + q * q;
            c.lo = ff.t_a;
            if (rho2 <= 0) {
                c.hi = ff.mc_t_minus;
                break;
            }
            double rc = std::log(rho2 / sqr(ff.disk_R));
            double drc_dp = 2 * p / rho2, drc_dq = 2 * q / rho2;
            double theta = std::atan2(q, p);
            if (theta < 0) theta += 2 * M_PI;
            double u = theta * sqr(ff.disk_R) / 2;
            double du_dp = -q / rho2 * sqr(ff.disk_R) / 2;
            double du_dq = p / rho2 * sqr(ff.disk_R) / 2;
            // Signed offset along gamma, unwrapped around the loop.
            double v = wrap(u - ff.mc_glo, ff.mc_loop_total);
            if (v > ff.mc_glen + (ff.mc_loop_total - ff.mc_glen) / 2) v -= ff.mc_loop_total;
            double ur1 = (rc - ff.mc_rc_lo) / ff.mc_band_rc;
            double uu1 = v / ff.mc_band_u;
            double uu2 = (ff.mc_glen - v) / ff.mc_band_u;
            double chi = smoothstep(ur1) * smoothstep(uu1) * smoothstep(uu2);
            double dchi_drc = smoothstep_d(ur1) / ff.mc_band_rc * smoothstep(uu1) * smoothstep(uu2);
            double dchi_du = smoothstep(ur1) *
                             (smoothstep_d(uu1) * smoothstep(uu2) - smoothstep(uu1) * smoothstep_d(uu2)) /
                             ff.mc_band_u;
            double span = ff.t_b - ff.mc_t_minus;
            // Radial Morse localizer on the lid.
            Bump zr{ff.mc_rc_lo + ff.mc_band_rc, -ff.disk_fade, ff.mc_radial_peak};
            double lid_tilt = ff.mc_radial_tilt * zr.value(rc);
            double dlid_drc = ff.mc_radial_tilt * zr.deriv(rc);
            c.hi = ff.mc_t_minus + span * chi + lid_tilt * chi;
            double dhi_drc = (span + lid_tilt) * dchi_drc + dlid_drc * chi;
            double dhi_du = (span + lid_tilt) * dchi_du;
            c.dhi[0] = dhi_drc * drc_dp + dhi_du * du_dp;
            c.dhi[1] = dhi_drc * drc_dq + dhi_du * du_dq;
            break;
        }
        case FoldingFunction::TShape::ApparatusChimney: {
            double p = w[0], q = w[1];
            c.lo = ff.ap_delta1 - ff.ap_c1 * p;
            c.dlo[0] = -ff.ap_c1;
            double stove_top = c.lo + ff.ap_stove_len;
            double rho = std::sqrt(p * p + q * q);
            double ua = (ff.ap_rho1 - rho) / ff.ap_band;
            double chi = smoothstep(ua);
            double dchi = -smoothstep_d(ua) / ff.ap_band;  // d/d rho
            double crown = ff.ap_crown * p * q;
            double span = ff.ap_t_top + crown - stove_top;
            c.hi = stove_top + span * chi;
            double drho_dp = rho > 1e-300 ? p / rho : 0;
            double drho_dq = rho > 1e-300 ? q / rho : 0;
            c.dhi[0] = c.dlo[0] * (1 - chi) + chi * ff.ap_crown * q + span * dchi * drho_dp;
            c.dhi[1] = chi * ff.ap_crown * p + span * dchi * drho_dq;
            break;
        }
    }
    return c;
}

}  // namespace

void FoldingFunction::chord(const double* w, double& lo, double& hi) const {
    Chord c = chord_of(*this, w);
    lo = c.lo;
    hi = c.hi;
}

FoldEval FoldingFunction::eval(double s, double t, const double* w) const {
    FoldEval out;
    Plateau ps{s_a, s_b, tau};
    double Ps = ps.value(s), Psd = ps.deriv(s);
    if (Ps == 0 && Psd == 0) return out;

    // Morse structure: the Reeb ramp width is modulated along s by a
    // profile with a unique interior maximum of nonzero curvature (two
    // overlapping smoothsteps), which isolates the otherwise s-degenerate
    // zeros on the chord ramps.
    double te = tau, dte = 0;
    if (tilt_amp != 0) {
        double w1 = 0.62 * (s_b - s_a), w2 = 0.55 * (s_b - s_a);
        double m1 = smoothstep((s - s_a) / w1), m2 = smoothstep((s_b - s) / w2);
        double d1 = smoothstep_d((s - s_a) / w1) / w1, d2 = -smoothstep_d((s_b - s) / w2) / w2;
        te = tau * (1 - tilt_amp * m1 * m2);
        dte = -tau * tilt_amp * (d1 * m2 + m1 * d2);
    }

    Chord c = chord_of(*this, w);
    double ua = (t - c.lo) / te, ub = (c.hi - t) / te;
    double Sa = smoothstep(ua), Sb = smoothstep(ub);
    double Sad = smoothstep_d(ua), Sbd = smoothstep_d(ub);
    double R = Sa * Sb;
    double Rt = (Sad * Sb - Sa * Sbd) / te;
    double R_lo = -Sad / te * Sb;  // dR/d(lo)
    double R_hi = Sa * Sbd / te;   // dR/d(hi)
    // d/ds through the modulated ramp width: du/ds = -u * te'/te.
    double Rs_mod = -(Sad * Sb * ua + Sa * Sbd * ub) * dte / te;

    Fade D = has_disk() ? disk_factor(*this, w[0], w[1]) : Fade{};
    AnnFade A = annulus ? annulus_factor(*this, w[has_disk() ? 2 : 0]) : AnnFade{};

    out.F = H * Ps * R * D.v * A.v;
    out.Fs = H * (Psd * R + Ps * Rs_mod) * D.v * A.v;
    out.Ft = H * Ps * Rt * D.v * A.v;
    if (has_disk()) {
        out.Fw[0] = H * Ps * D.v * A.v * (R_lo * c.dlo[0] + R_hi * c.dhi[0]) + H * Ps * R * D.dp * A.v;
        out.Fw[1] = H * Ps * D.v * A.v * (R_lo * c.dlo[1] + R_hi * c.dhi[1]) + H * Ps * R * D.dq * A.v;
    }
    if (annulus) out.Fw[has_disk() ? 2 : 0] = H * Ps * R * D.v * A.dtau;
    return out;
}

FoldingFunction make_smooth_box(const PLFold& geometry, double tau) {
    FoldingFunction ff;
    ff.geometry = geometry;
    ff.tau = tau;
    ff.s_a = geometry.s_lo;
    ff.s_b = geometry.s_hi;
    ff.t_a = 0;
    ff.t_b = geometry.t0;
    ff.H = geometry.kind == FoldKind::BoxHole ? -geometry.z0 : geometry.z0;
    double collar_w = 1e300;
    if (geometry.base) {
        const auto* disk = std::get_if<Disk>(&*geometry.base);
        if (!disk) throw std::invalid_argument("smooth box folds support Disk bases");
        ff.disk_R = disk->r0;
        ff.disk_fade = tau;
        collar_w = 1.0;  // fade lives in collar-depth units
    }
    if (!(tau < 0.15 * std::min({geometry.s0(), geometry.t0, collar_w})))
        throw std::invalid_argument("smoothing parameter too large for this geometry");
    ff.tilt_amp = 0.2;  // ramp-width modulation depth
    ff.tilt_speak = 0.5 * (ff.s_a + ff.s_b) + 0.09 * (ff.s_b - ff.s_a);
    return ff;
}

FoldingFunction make_smooth_chimney(const PLFold& geometry, double tau) {
    if (geometry.kind != FoldKind::Chimney || !geometry.base || !geometry.chimney)
        throw std::invalid_argument("make_smooth_chimney expects a chimney PL fold");
    const auto* disk = std::get_if<Disk>(&*geometry.base);
    if (!disk) throw std::invalid_argument("model chimney folds are built over a Disk base");
    if (!(tau < 0.15 * std::min(geometry.s0(), geometry.t_minus)))
        throw std::invalid_argument("smoothing parameter too large for this chimney");
    FoldingFunction ff;
    ff.geometry = geometry;
    ff.tau = tau;
    ff.s_a = geometry.s_lo;
    ff.s_b = geometry.s_hi;
    ff.H = geometry.z0;
    ff.tshape = FoldingFunction::TShape::ModelChimney;
    ff.t_a = 0;
    ff.t_b = geometry.t0;
    ff.disk_R = disk->r0;
    ff.disk_fade = tau;
    ff.mc_rc_lo = geometry.collar_lo();
    ff.mc_glo = geometry.chimney->gamma_lo;
    ff.mc_glen = geometry.chimney->gamma_len;
    ff.mc_loop_total = boundary_loop(*geometry.base, {disk->r0, 0}).total;
    ff.mc_t_minus = geometry.t_minus;
    ff.mc_band_rc = std::min(tau, 0.2 * (-ff.mc_rc_lo));
    ff.mc_band_u = std::min(4 * tau, 0.2 * ff.mc_glen);
    ff.mc_radial_tilt = 0.5 * tau * geometry.t0;
    ff.mc_radial_peak = ff.mc_rc_lo + 0.45 * (-ff.mc_rc_lo);
    ff.tilt_amp = 0.2;  // ramp-width modulation depth
    ff.tilt_speak = 0.5 * (ff.s_a + ff.s_b) + 0.09 * (ff.s_b - ff.s_a);
    return ff;
}

}  // namespace liouville
