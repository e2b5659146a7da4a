#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "liouville/folding.hpp"
#include "liouville/util.hpp"

namespace liouville {

// A flow problem for the event-detecting integrator.  classify() returns 0
// inside the region, 1 for crossing the negative end (backward exit) and
// codes >= 2 for the other region boundaries.
class Flow {
  public:
    virtual ~Flow() = default;
    virtual int dim() const = 0;
    virtual void field(const double* x, double* out) const = 0;  // forward Liouville field
    virtual int classify(const double* x) const = 0;
    // Wrap periodic coordinates into their fundamental domain.
    virtual void canonicalize(double*) const {}
};

// The symplectization region [s_lo, s_hi] x [0, t0] x base carrying one or
// more graphical folds; the base is a flat disk of radius R0 optionally
// multiplied by an annulus-band factor (tracked in reduced coordinates).
// State layout: (s, t[, p, q][, tau]).
class FoldedRegion : public Flow {
  public:
    double s_lo = 0, s_hi = 1;
    double t_hi = 1;
    double R0 = 0;                       // 0: no disk factor (2-D model)
    std::optional<AnnulusBand> annulus;  // extra Weinstein factor
    std::vector<FoldingFunction> folds;

    int dim() const override { return 2 + (R0 > 0 ? 2 : 0) + (annulus ? 1 : 0); }
    void field(const double* x, double* out) const override;
    int classify(const double* x) const override;

    // Combined folding data at a state.
    FoldEval total(const double* x) const;
    // The perturbed Liouville form dF + e^s (dt + lambda0) as a covector in
    // state coordinates (used by the identity check).
    void lambda_prime(const double* x, double* out) const;
};

enum class SmoothKind { Exit, Trapped, Escaped, Undetermined };

struct IntegratorControls {
    double h = 5e-3;          // base parameter step of the scaled field
    double budget = 2000;     // max total parameter length
    double tol_err = 1e-7;    // step-doubling error bound (1e-6 leaves the
                              // retrace residual above the 1e-5 sanity bound)
    double tol_v = 1e-6;      // trap speed threshold
    int window = 100;         // trap displacement window (steps)
    double window_disp = 1e-8;
    int max_halvings = 8;
    int max_steps = 400000;
};

struct SmoothOutcome {
    SmoothKind kind = SmoothKind::Undetermined;
    Vec end;          // exit/trap/escape point
    int boundary = 0; // classify() code for Exit/Escaped
    double duration = 0;  // parameter length traversed
    int steps = 0;
};

// Integrates the scaled field X/max(|X|, 0.1) of `flow`, backward or
// forward, with step rejection by step doubling and the trap window rule.
SmoothOutcome integrate_flow(const Flow& flow, const Vec& x0, bool backward,
                             const IntegratorControls& ctl = {},
                             std::vector<Vec>* trajectory = nullptr);

// Convenience: entry state on the s = s_hi wall of a folded region.
Vec entry_state(const FoldedRegion& region, double t, double p = 0, double q = 0, double tau = 0);

// Plain RK4 of the scaled field for a fixed signed parameter duration.
Vec flow_for(const Flow& flow, Vec x, double signed_duration, double h = 5e-3);

struct HolonomySample {
    Vec entry;
    SmoothOutcome out;
};

struct HolonomyBatch {
    std::vector<HolonomySample> samples;
    int n_exit = 0, n_trapped = 0, n_escaped = 0, n_undetermined = 0;
    double trap_fraction = 0;
};

// Backward holonomy of a batch of entry states, optionally across workers;
// results are merged in entry order.
HolonomyBatch smooth_holonomy(const FoldedRegion& region, const std::vector<Vec>& entries,
                              const IntegratorControls& ctl = {}, int workers = 1);

struct BoundReport {
    double worst_stab_ratio = 0;
    double worst_w_ratio = 0;
    int violators_stab = 0;
    int violators_w = 0;
    int counted = 0;
};

// Checks every Exit against the stabilization bound e^{s0/2} and the base
// norm bound e^{s0}, with multiplicative slack.
BoundReport holonomy_norm_bounds(const FoldedRegion& region, const HolonomyBatch& batch,
                                 double slack = 1e-3);

}  // namespace liouville
