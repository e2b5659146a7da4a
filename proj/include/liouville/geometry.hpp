#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "liouville/config.hpp"
#include "liouville/util.hpp"

namespace liouville {

// A point of a two-dimensional base.  Interpretation per variant:
//   Disk        -> (p, q)
//   ExactStrip  -> (r, theta)
//   TiltedDisk  -> (p, q)
//   AnnulusBand -> (theta, tau)
struct BasePoint {
    double a = 0, b = 0;
};

// (r0 D^2, 1/2 (p dq - q dp)); Liouville field 1/2 (p dp + q dq).
struct Disk {
    double r0 = 1;
};

// ([r_lo, r_hi] x [0, theta_len], e^r dtheta); trivial cobordism, field dr.
struct ExactStrip {
    double r_lo = -1, r_hi = 0, theta_len = 1;
};

// ([-p1,p1] x [-q_minus, q_plus], 1/2 p dq - (1/2 q + c1) dp); field
// X1 = 1/2 p dp + (1/2 q + c1) dq with its unique zero at (0, -2 c1).
struct TiltedDisk {
    double c1 = 0.3, p1 = 1, q_minus = 1, q_plus = 0.2;
};

// (S^1_theta x [-1,1]_tau, (tau0 - tau) dtheta); skeleton {tau = tau0},
// flow psi^s(theta, tau) = (theta, tau0 + e^s (tau - tau0)).
struct AnnulusBand {
    double tau0 = 0.1, theta_len = 1;
};

using WeinsteinBase = std::variant<Disk, ExactStrip, TiltedDisk, AnnulusBand>;

struct FlowResult {
    BasePoint point;   // clamped endpoint when exited
    bool exited = false;
    double exit_time = 0;  // s* with psi^{s*}(x) on the boundary, when exited
};

// Closed-form time-s Liouville flow.  Never clamps silently: if the orbit
// leaves the base before time s, `exited` is set and `point` is the boundary
// crossing at `exit_time`.
FlowResult liouville_flow_base(const WeinsteinBase& base, BasePoint x, double s);

// ||x||_W in [0,1]: 0 on the skeleton, e^{-s_x} with s_x the forward exit
// time otherwise.  Analytic per variant.
double norm_w(const WeinsteinBase& base, BasePoint x);

inline double norm_stab(double p, double q) { return std::sqrt(p * p + q * q); }

// True iff forward flow exits within time s0, i.e. norm_w(x) > e^{-s0}.
bool in_collar(const WeinsteinBase& base, BasePoint x, double s0);

bool contains(const WeinsteinBase& base, BasePoint x, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Boundary structure.  The positively oriented boundary of each base is a
// union of arcs; Reeb time along the boundary is the integral of the contact
// form, so boundary motion is tracked in a "Reeb time" coordinate u.

struct BoundaryArc {
    double duration = 0;                              // Reeb time to traverse
    std::function<BasePoint(double)> at;              // u in [0, duration] -> point
    std::function<double(BasePoint)> time_of = {};    // inverse on this arc
};

struct BoundaryLoop {
    std::vector<BoundaryArc> arcs;
    bool closed = true;
    double total = 0;
    BasePoint at_time(double u) const;  // u wrapped mod total when closed
};

// The boundary loop of a base containing the given boundary point.  Disk and
// TiltedDisk have one loop; AnnulusBand has two circles (selected by tau);
// ExactStrip exposes its r = r_hi and r = r_lo arcs as open "loops".
BoundaryLoop boundary_loop(const WeinsteinBase& base, BasePoint near);

// Reeb-time coordinate of a boundary point within its loop.
double boundary_time(const WeinsteinBase& base, BasePoint x);

// Flows a boundary point along dt - R_{eta0} for Reeb duration t, i.e.
// backward Reeb motion by contact length t (forward for t < 0).  Corner
// crossings on polygonal boundaries continue into the adjacent arc.
BasePoint reeb_boundary_holonomy(const WeinsteinBase& base, BasePoint boundary_pt, double t);

// Boundary point reached by forward Liouville flow from x, plus that exit
// time; x must not be on the skeleton.
struct BoundaryHit {
    BasePoint point;
    double time;
};
BoundaryHit forward_exit(const WeinsteinBase& base, BasePoint x);

// Skeleton membership (exact set per variant).
bool on_skeleton(const WeinsteinBase& base, BasePoint x, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Plain-text config (keys: kind, r0, c1, p1, q_minus, q_plus, tau0, r_lo,
// r_hi, theta_len).
WeinsteinBase base_from_config(const ConfigMap& cfg);
ConfigMap base_to_config(const WeinsteinBase& base);
std::string base_kind_name(const WeinsteinBase& base);

}  // namespace liouville
