#pragma once

#include <optional>

#include "liouville/geometry.hpp"
#include "liouville/pl_fold.hpp"

namespace liouville {

// C2 quintic smoothstep and derivatives, clamped outside [0,1].
double smoothstep(double u);
double smoothstep_d(double u);
double smoothstep_dd(double u);

// Plateau profile rise(x-a / tau) * fall(b-x / tau); value/first/second.
struct Plateau {
    double a = 0, b = 1, tau = 0.1;
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

// Single-peak C2 bump on [a, b] with maximum 1 at the peak.
struct Bump {
    double a = 0, b = 1, peak = 0.5;
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

struct FoldEval {
    double F = 0;
    double Fs = 0, Ft = 0;
    double Fw[3] = {0, 0, 0};  // gradient in base coordinates (p, q[, tau])
};

// A graphical folding function F(s, t, w) built from quintic plateau
// profiles.  Base coordinate layout in eval(): w[0] = p, w[1] = q and, when
// the annulus factor is present, w[2] = tau.
struct FoldingFunction {
    enum class TShape { Fixed, ModelChimney, ApparatusChimney };

    double H = 1;    // signed plateau height (negative for a box hole)
    double tau = 0.02;
    double s_a = 0, s_b = 1;
    TShape tshape = TShape::Fixed;
    double t_a = 0, t_b = 1;

    // Disk factor decay.  Either a collar fade near the disk boundary or a
    // radial support fade at disk_support_R (box hole over a sub-disk).
    double disk_R = 0;
    double disk_fade = 0;    // in collar-depth units
    bool disk_fade_radial = false;
    double disk_support_R = 0;
    double fade_w = 0;       // radial fade width

    // Extra Weinstein factor (reduced coordinates), for folds over W_i x D^2.
    std::optional<AnnulusBand> annulus;
    double annulus_fade = 0;  // collar-depth fade width

    // Model chimney over the full disk with a collar-rectangle C.
    double mc_rc_lo = 0;
    double mc_glo = 0, mc_glen = 0, mc_loop_total = 0;
    double mc_t_minus = 0;
    double mc_band_rc = 0, mc_band_u = 0;
    double mc_radial_tilt = 0, mc_radial_peak = 0;

    // Apparatus chimney over the stabilization disk (tilted stove, radial
    // chimney tube, flat crowned lid).
    double ap_delta1 = 0, ap_c1 = 0;
    double ap_rho1 = 0;
    double ap_stove_len = 0;
    double ap_t_top = 0;
    double ap_crown = 0;
    double ap_band = 0;
    double fp_pa = 0, fp_pb = 0, fp_qa = 0, fp_qb = 0, fp_w = 0;  // footprint box

    // Morse structure: ramp-width modulation depth and its s-critical point.
    double tilt_amp = 0;
    double tilt_speak = 0;

    PLFold geometry;  // the PL fold this function approximates

    FoldEval eval(double s, double t, const double* w) const;
    bool has_disk() const { return disk_R > 0; }
    int base_dim() const { return (has_disk() ? 2 : 0) + (annulus ? 1 : 0); }
    // Reeb-chord window [t_lo(w), t_hi(w)] of the approximated region.
    void chord(const double* w, double& lo, double& hi) const;
};

// Builders.  `tau` must be < 0.1 * min(s-length, Reeb thickness, collar
// width); the builders validate this.
FoldingFunction make_smooth_box(const PLFold& geometry, double tau);
// Model chimney over a Disk base carrying the geometry's ChimneySpec.
FoldingFunction make_smooth_chimney(const PLFold& geometry, double tau);

}  // namespace liouville
