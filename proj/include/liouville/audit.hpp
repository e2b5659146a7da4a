#pragma once

#include <string>
#include <vector>

#include "liouville/constructors.hpp"
#include "liouville/critical.hpp"
#include "liouville/field.hpp"

namespace liouville {

enum class LimitKind { Trapped, ExitsNegativeBoundary, Undetermined };

struct BackwardLimit {
    LimitKind kind = LimitKind::Undetermined;
    int cp = -1;  // census index when Trapped
    Vec end;
};

// Backward integration with critical-point basin matching.
BackwardLimit backward_limit(const Flow& flow, const std::vector<CriticalPoint>& census, const Vec& x,
                             const IntegratorControls& ctl = {}, double basin_radius = 1e-3);

struct CriticalGraph {
    size_t nodes = 0;
    std::vector<std::pair<int, int>> edges;  // flowline direction: from -> to
    int unresolved = 0;
    bool has_edge(int a, int b) const;
};

// Seeds K points on a small sphere around each critical point along its
// unstable eigen-directions and follows the Liouville field forward; an edge
// a -> b is recorded when a seed orbit from a reaches the basin ball of b.
CriticalGraph build_critical_graph(const Flow& flow, const std::vector<CriticalPoint>& census,
                                   int seeds_per_node = 64, double sphere_radius = 1e-4,
                                   const IntegratorControls& ctl = {}, uint64_t seed = 1,
                                   double basin_radius = 1e-3);

struct LoopCheck {
    bool acyclic = true;
    std::vector<int> cycle;  // node sequence when a cycle exists
};
LoopCheck broken_loop_check(const CriticalGraph& graph);

std::string graph_to_text(const CriticalGraph& graph, const std::vector<CriticalPoint>& census);
std::string graph_to_svg(const CriticalGraph& graph, const std::vector<CriticalPoint>& census);

// Sect. 7 predicates over an assembled blocking apparatus.
struct StoveReport {
    std::vector<int> stove;  // census indices with t* < 3 delta1
    int trap_samples = 0, trap_to_stove = 0, trap_elsewhere = 0, trap_undetermined = 0;
    int fwd_samples = 0, fwd_trapped = 0, fwd_violations = 0;
    std::vector<std::string> violations;
};

StoveReport stove_predicates(const BlockingApparatus& apparatus,
                             const std::vector<CriticalPoint>& census, int n_trap_samples,
                             int n_fwd_samples, uint64_t seed,
                             const IntegratorControls& ctl = {});

// ---------------------------------------------------------------------------
// Toy model: a Liouville structure on S^1 x [-1,1] whose skeleton is the
// closed orbit S^1 x {0} (field dx + y dy), with an optional graphical fold
// installed across the skeleton through the Liouville flow-box chart.
class ToyCylinder : public Flow {
  public:
    double x_len = 6.0;
    bool folded = false;

    ToyCylinder();

    int dim() const override { return 2; }
    void field(const double* x, double* out) const override;
    int classify(const double* x) const override;
    void canonicalize(double* x) const override { x[0] = wrap(x[0], x_len); }

    std::vector<CriticalPoint> census(const CensusControls& ctl = {}) const;
    Vec wrap_state(Vec v) const;

  private:
    FoldingFunction fold_;
    double chart_x0_ = 0.5;
};

}  // namespace liouville
