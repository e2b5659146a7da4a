#pragma once

#include <string>
#include <variant>
#include <vector>

#include "liouville/field.hpp"
#include "liouville/geometry.hpp"
#include "liouville/pl_fold.hpp"

namespace liouville {

struct ChimneyCertificate {
    int n = 0;                 // smallest integer with n t_minus > t0
    double gamma_lo = 0, gamma_len = 0;
    double loop_total = 0;
    std::vector<std::pair<double, double>> iterate_arcs;  // j = 1..n, time units
    bool disjoint = false;
    int first_overlap = 0;     // offending j when not disjoint
    double clearance = 0;      // smallest arc distance between gamma and an iterate
};

// Pure arc arithmetic on the boundary circle (exact intervals).
ChimneyCertificate arc_certificate(double loop_total, double gamma_lo, double gamma_len,
                                   double t_minus, double t0, bool closed_loop = true);

// Certificate via the closed-form boundary Reeb holonomy of a base.
ChimneyCertificate check_main_assumption(const WeinsteinBase& base, double gamma_lo,
                                         double gamma_len, double t_minus, double t0, double s0);

// Chimney PL fold over a Disk-like base with C = [-s0 + eps_aux, 0] x gamma.
PLFold build_chimney_region(const WeinsteinBase& base, double gamma_lo, double gamma_len,
                            double eps_aux, double s0, double t0, double t_minus,
                            const ChimneyCertificate& cert, double s_lo = 0);

// ---------------------------------------------------------------------------
// The tilted base with a cap: [-p1,p1] x [-q1,0] together with {r<=rho1,q>=0},
// carrying the field X1 = p/2 dp + (q/2 + c1) dq.
class TiltedCapBase {
  public:
    TiltedCapBase(double c1, double p1, double q1, double rho1);

    bool contains(BasePoint x, double tol = 1e-12) const;
    // Forward exit factor u* = e^{s*/2}; exit time and boundary point.
    double exit_factor(BasePoint x) const;
    double exit_time(BasePoint x) const { return 2 * std::log(exit_factor(x)); }
    BasePoint exit_point(BasePoint x) const;

    double loop_total() const { return total_; }
    double cap_start_time() const { return cap_start_; }   // u of (rho1, 0)
    double cap_duration() const { return cap_time_; }
    BasePoint at_time(double u) const;                     // wrapped
    double time_of(BasePoint boundary_pt) const;

    double c1, p1, q1, rho1;

  private:
    double total_ = 0, cap_start_ = 0, cap_time_ = 0;
    double cb_ = 0, cs_ = 0;  // bottom / side Reeb speeds
};

// ---------------------------------------------------------------------------

struct BlockingApparatusParams {
    // inputs
    double s0 = 0, t0 = 0, delta = 0, eps = 0, r0 = 0;
    // chimney fold
    double s1 = 0, delta1 = 0, c1 = 0, p1 = 0, rho1 = 0, q1 = 0;
    double gamma_lo = 0, gamma_len = 0;   // on the capped-base loop, time units
    double gamma_ext = 0;                 // p-extension of gamma past the cap
    double t_top = 0;                     // flat chimney lid height
    double crown = 0;                     // lid saddle coefficient (> 1/2)
    double z1 = 0;
    int n_iterates = 0;
    // box hole
    double s2 = 0, r2 = 0, t2 = 0, z2 = 0;
    // windows and smoothing
    double sigma1_lo = 0, sigma2_lo = 0;
    double tau = 0;
    double min_r0 = 0;                     // minimal feasible ambient radius
};

struct Infeasible {
    std::string constraint;
};

using ScheduleResult = std::variant<BlockingApparatusParams, Infeasible>;

// Deterministic parameter schedule; identical inputs yield identical params.
ScheduleResult choose_blocking_params(double s0, double t0, double delta, double eps, double r0);

// q_+ = 2 c1 (1 - e^{-s1/2}) / (1 + e^{-s1/2}); psi^{-s1}(q_+) = -q_+.
inline double tilted_qplus(double c1, double s1) {
    double e = std::exp(-s1 / 2);
    return 2 * c1 * (1 - e) / (1 + e);
}

struct BlockingApparatus {
    BlockingApparatusParams params;
    FoldedRegion region;  // [0,s0] x [0,t0] x r0-disk carrying both folds
    // region.folds[0]: chimney, region.folds[1]: box hole
};

// Builds the two smooth folds and checks the stove-slab containment.
BlockingApparatus assemble_blocking_apparatus(const BlockingApparatusParams& params);

// Constraint-by-constraint report with slacks.
std::string explain_schedule(const BlockingApparatusParams& params);

// Stove slab of the chimney fold in t: [delta1 - c1 p1, delta1 + c1 p1 + delta].
std::pair<double, double> stove_slab(const BlockingApparatusParams& params);
// Reeb thickness of the lower trapping band of the box hole.
double hole_trap_thickness(const BlockingApparatusParams& params);

}  // namespace liouville
