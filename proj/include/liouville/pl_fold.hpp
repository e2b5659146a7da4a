#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liouville/geometry.hpp"
#include "liouville/svg.hpp"

namespace liouville {

enum class FoldKind { BoxFold, BoxHole, PreChimney, Chimney };

enum class FaceId {
    ZFace,    // z = z0 plateau (z = -z0 pit for a hole)
    SLo,      // s = s_lo wall
    SHi,      // s = s_hi wall (flowlines enter here at z = 0)
    TBottom,  // t = 0
    TTop,     // t = t0 (box / pre-chimney); stove lid t = t_minus (chimney)
    TLid,     // chimney lid t = t0 over C
    WBdry,    // boundary wall of the base (pre-chimney: r = r_hi)
    StripInner,   // pre-chimney r = r_lo wall
    ThetaLoWall,  // pre-chimney theta = 0 wall
    ThetaHiWall,  // pre-chimney theta = theta_len wall
    COuterWall,   // chimney outer wall over gamma, t in [t_minus, t0]
    CInnerWall,   // chimney inner collar wall, t in [t_minus, t0]
    CSideLo,      // chimney side wall at the gamma_lo end
    CSideHi,      // chimney side wall at the gamma_hi end
};

std::string face_name(FaceId f);

// Chimney region C = { w : collar depth >= -s0 + eps_aux and boundary time of
// the forward exit in [gamma_lo, gamma_lo + gamma_len] }.
struct ChimneySpec {
    double gamma_lo = 0;
    double gamma_len = 0;
    double eps_aux = 0;
};

struct PLFold {
    FoldKind kind = FoldKind::BoxFold;
    double z0 = 1;            // positive also for holes (pit depth)
    double s_lo = 0, s_hi = 1;
    double t0 = 1;
    double t_minus = 0;       // chimney stove Reeb length
    std::optional<WeinsteinBase> base;  // nullopt: point base (2-D fold)
    std::optional<ChimneySpec> chimney;

    double s0() const { return s_hi - s_lo; }
    // z-parameter rescaled to the [0, s0] model; the holonomy of a shifted
    // fold matches the model fold with this z.
    double z0_model() const { return z0 * std::exp(-s_lo); }
    double collar_lo() const { return -s0() + chimney->eps_aux; }
};

PLFold make_box_fold(double s0, double t0, double z0,
                     std::optional<WeinsteinBase> base = std::nullopt, double s_lo = 0);
PLFold make_box_hole(double s0, double t0, double z0,
                     std::optional<WeinsteinBase> base = std::nullopt, double s_lo = 0);
PLFold make_pre_chimney(double s0, double t0, double z0, const ExactStrip& strip, double s_lo = 0);

struct FaceState {
    FaceId face = FaceId::SHi;
    double z = 0, s = 0, t = 0;
    BasePoint w;
};

// Constant face vector field: components in (z, s, t) plus the base motion.
struct FaceField {
    double dz = 0, ds = 0, dt = 0;
    enum class BaseMotion { None, LiouvilleFwd, LiouvilleBwd, ReebBwd, ReebFwdScaled, CollarIn, CollarOut };
    BaseMotion base_motion = BaseMotion::None;
    double base_rate = 0;  // |coefficient| of the base motion
    std::string describe(const PLFold& fold) const;
};

FaceField face_foliation(const PLFold& fold, FaceId face, const FaceState& at);

struct StepResult {
    FaceState next;
    bool exited = false;       // left the fold at z = 0 on the s = s_lo wall
    double exit_t = 0;
    BasePoint exit_w;
    double advance = 0;        // parameter length of this leg
};

StepResult pl_step(const PLFold& fold, const FaceState& st);

struct TrapCertificate {
    std::string kind;            // "z-spiral" or "chimney-cycle"
    std::vector<double> marks;   // the monotone data that fired the certificate
};

struct FlowOutcome {
    enum class Kind { Trapped, Exit, Escaped, Undetermined } kind = Kind::Undetermined;
    double exit_t = 0;
    BasePoint exit_w;
    TrapCertificate cert;
    FaceId escaped_face = FaceId::SHi;
    int events = 0;
};

struct TraceLog {
    std::vector<FaceState> states;
};

int pl_default_budget(const PLFold& fold);

FlowOutcome pl_trace(const PLFold& fold, double entry_t, BasePoint entry_w = {},
                     TraceLog* log = nullptr, int budget = 0);

// Closed-form holonomy of Lemma-type formulas; nullopt means trapped or out
// of the holonomy domain.
struct HolonomyImage {
    double t;
    BasePoint w;
};
std::optional<HolonomyImage> pl_holonomy_closed_form(const PLFold& fold, double entry_t,
                                                     BasePoint entry_w = {});

// Closed-form membership in the trapping region.
bool pl_trap_region(const PLFold& fold, double entry_t, BasePoint entry_w = {});

// Reeb-length ceiling over the base point (t0 over C, t_minus over the stove).
double t_ceiling(const PLFold& fold, const BasePoint& w);
bool chimney_contains(const PLFold& fold, const BasePoint& w, double shrink = 0);

// Printed 3.3 box-hole holonomy, kept verbatim for the golden discrepancy
// test; its image leaves [0, t0].
inline double box_hole_printed_formula(double s0, double t0, double t) {
    return t0 - std::exp(s0) * (t - t0);
}

// CSV rows (event index, face, z, s, t, base coords) for a trace log.
std::string trace_to_csv(const TraceLog& log);
// SVG with the (t, z) projection and the base projection side by side.
std::string trace_to_svg(const PLFold& fold, const TraceLog& log);

}  // namespace liouville
