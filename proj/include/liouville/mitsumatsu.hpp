#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "liouville/audit.hpp"
#include "liouville/constructors.hpp"
#include "liouville/field.hpp"

namespace liouville {

// Eigen-data of a linear Anosov torus map.  v_contract / v_expand are the
// unit eigenvectors with eigenvalues lambda_u < 1 < lambda_s; beta_u, beta_s
// are the left eigen-covectors (A^T beta = lambda beta) with unit sup-norm,
// so beta_u annihilates v_expand and the contact form is
// alpha = beta_u + tau beta_s.
struct AnosovData {
    std::array<std::array<long, 2>, 2> A;
    double lambda_u = 0, lambda_s = 0;
    std::array<double, 2> v_contract{}, v_expand{};
    std::array<double, 2> beta_u{}, beta_s{};
};

AnosovData anosov_eigen(const std::array<std::array<long, 2>, 2>& A);

// Closed-leaf strips on T^2.  The leaf direction (m, n) is a continued-
// fraction convergent of the expanding slope; tau0 solves the Legendrian
// condition beta_u(m,n) + tau0 beta_s(m,n) = 0.  In the strip frame
// (e_t, e_th) the contact form restricts to dt + (tau0 - tau) dtheta.
struct StripSpec {
    long m = 0, n = 0;
    double tau0 = 0;
    std::array<double, 2> e_t{}, e_th{};
    double theta_period = 0;   // leaf closes after this theta
    double trans_period = 0;   // transverse period in t-units
    double t0 = 0;             // strip Reeb thickness
    double delta = 0;          // Reeb margin
    double center0 = 0, center1 = 0;  // transverse centers (equal annuli)
    double area = 0;           // strip area fraction of T^2
};

StripSpec choose_strips(const AnosovData& anosov, double delta_hint = 0);

// Transverse coordinate of a torus point in e_t units (mod trans_period).
double transverse_coord(const StripSpec& strips, double x1, double x2);
// Membership of the shrunk strip S_i^{margin}.
bool in_strip(const StripSpec& strips, int which, double u, double margin);
// Exact covering check S_0^{2 delta} u S_1^{2 delta} = T^2.
bool strips_cover(const StripSpec& strips);

// ---------------------------------------------------------------------------

struct MitsumatsuModel {
    AnosovData anosov;
    StripSpec strips;
    double eps = 0.05;
    double sig0_lo = 0, sig0_len = 0;  // apparatus 0 window in [0, ln lambda_s]
    double sig1_lo = 0, sig1_len = 0;  // apparatus 1 window, below sigma 0
    double K0 = 0.9, K1 = 0.9;         // holonomy contraction constants
    double r0 = 1.0;                   // ambient stabilization radius
    double r_trap = 0.05;              // stab radius of the certified trap window
    enum class Mode { Certified, FullSim } mode = Mode::Certified;

    double period() const { return std::log(anosov.lambda_s); }
};

MitsumatsuModel make_mitsumatsu_model(const AnosovData& anosov, double eps = 0.05);

// tau-maps of the global argument: h_i(tau) = tau0 + e^{|sigma_i|}(tau-tau0),
// h_g(tau) = lambda_u^2 tau, and the interval image machinery.
struct TauMaps {
    double tau0 = 0, e0 = 1, e1 = 1, lu2 = 0;
    double h0(double t) const { return tau0 + e0 * (t - tau0); }
    double h1(double t) const { return tau0 + e1 * (t - tau0); }
    double hg(double t) const { return lu2 * t; }
    double composite(double t) const { return hg(h1(h0(t))); }       // one backward pass
    double mid_composite(double t) const { return h0(hg(h1(t))); }   // U1 then glue then U0
    std::pair<double, double> interval_image(std::pair<double, double> iv, int k) const;
};
TauMaps tau_maps(const MitsumatsuModel& model);

// The I_eps band of the annulus base in tau.
std::pair<double, double> eps_band(const MitsumatsuModel& model);

struct SigmaCertificate {
    bool collar_ok = false;      // |sigma_i| < -ln(1-eps)
    bool contraction_ok = false; // some k maps [-1,1] into the band
    bool mid_ok = false;         // h0 o hg o h1([0,tau0]) inside the open band
    int k = -1;
    double worst_tau = 0;        // extremal value at the first failure
    bool feasible() const { return collar_ok && contraction_ok && mid_ok; }
    std::string failure;
};
SigmaCertificate sigma_feasibility(const MitsumatsuModel& model, int k_max = 64);

// Coordinate change of the standard-region rescaling: (p,q) scaled by
// e^{s/2} relative to the window anchor.
struct QPoint {
    double s = 0, tau = 0, x1 = 0, x2 = 0, p = 0, q = 0;
};
QPoint standard_region_rescale(const QPoint& pt, double s_anchor, bool inverse);

// Free backward/forward flow of ds + (p dp + q dq)/2 through the gluing,
// ignoring apparatus regions (closed form).
QPoint quotient_free_step(const MitsumatsuModel& model, QPoint pt, double ds);

// ---------------------------------------------------------------------------
// Certified interval propagation of one grid point.

struct PropagationResult {
    bool trapped = false;
    int apparatus = -1;   // 0 or 1 when trapped
    int passes = 0;
    bool escaped = false;
    std::string log;
};

PropagationResult propagate_certified(const MitsumatsuModel& model, double tau, double x1, double x2,
                                      double pq_norm, int max_passes, bool want_log = false);

struct VerificationReport {
    bool feasible = false;
    int k = -1;
    double K0 = 0, K1 = 0;
    int total = 0, trapped = 0;
    double trapped_fraction = 0;
    int max_passes = 0;
    bool covering_ok = false;
    bool loops_acyclic = false;
    bool loops_stable = false;  // same edge set at both seed densities
    std::vector<std::string> untrapped_list;
};

VerificationReport global_verify(const MitsumatsuModel& model, int grid_xy, int grid_tau,
                                 int pq_ring, const BlockingApparatus* apparatus = nullptr,
                                 int graph_seeds = 64);

// ---------------------------------------------------------------------------
// Full-simulation flow on the quotient (reduced to one leaf coordinate per
// strip is not assumed; the state is (s, tau, x1, x2, p, q)).  Apparatus
// folds act through the standard-region rescale inside their windows.
class QuotientFlow : public Flow {
  public:
    const MitsumatsuModel* model = nullptr;
    const BlockingApparatus* apparatus = nullptr;  // shared parameters for both windows

    int dim() const override { return 6; }
    void field(const double* x, double* out) const override;
    int classify(const double* x) const override;
    void canonicalize(double* x) const override;
};

// SVG of the torus with strips, iterated gamma arcs, and trap outcomes.
std::string torus_svg(const MitsumatsuModel& model,
                      const std::vector<std::array<double, 3>>& outcomes);

}  // namespace liouville
