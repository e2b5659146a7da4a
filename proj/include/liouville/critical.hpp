#pragma once

#include <vector>

#include "liouville/field.hpp"

namespace liouville {

struct CriticalPoint {
    Vec location;
    int morse_index = 0;              // count of negative-real-part eigenvalues
    std::vector<double> eig_real;     // real parts of the linearization spectrum
    double field_norm = 0;
    bool degenerate = false;          // some |Re| below the nondegeneracy floor
};

struct CensusControls {
    int s_seeds = 9;
    int t_seeds = 15;
    int base_seeds = 7;      // per axis of the (p, q) grid
    int tau_seeds = 5;       // annulus factor grid
    double fd_h = 1e-5;      // finite-difference Jacobian step
    double dedup = 1e-6;
    double accept_norm = 1e-9;
    double degeneracy_floor = 1e-6;
    int max_newton = 60;
};

// Grid-seeded damped Newton census of the zeros of the Liouville field.
std::vector<CriticalPoint> find_critical_points(const FoldedRegion& region,
                                                const CensusControls& ctl = {});

// Newton refinement from a single seed; returns true on convergence.
bool newton_zero(const Flow& flow, Vec& x, const CensusControls& ctl);

// Linearization data at a zero.
CriticalPoint classify_zero(const Flow& flow, const Vec& x, const CensusControls& ctl);

}  // namespace liouville
