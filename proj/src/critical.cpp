#include "liouville/critical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace liouville {

namespace {

Eigen::MatrixXd fd_jacobian(const Flow& flow, const Vec& x, double h) {
    int d = flow.dim();
    Eigen::MatrixXd J(d, d);
    Vec xp = x, xm = x, fp(d), fm(d);
    for (int j = 0; j < d; ++j) {
        xp = x;
        xm = x;
        xp[j] += h;
        xm[j] -= h;
        flow.field(xp.v.data(), fp.v.data());
        flow.field(xm.v.data(), fm.v.data());
        for (int i = 0; i < d; ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h);
    }
    return J;
}

}  // namespace

bool newton_zero(const Flow& flow, Vec& x, const CensusControls& ctl) {
    int d = flow.dim();
    Vec f(d);
    flow.field(x.v.data(), f.v.data());
    double fn = f.norm();
    for (int it = 0; it < ctl.max_newton; ++it) {
        if (fn < ctl.accept_norm / 100) break;
        Eigen::MatrixXd J = fd_jacobian(flow, x, ctl.fd_h);
        Eigen::VectorXd rhs(d);
        for (int i = 0; i < d; ++i) rhs(i) = -f[i];
        Eigen::VectorXd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) return false;
        double lam = 1.0;
        bool ok = false;
        for (int k = 0; k < 8; ++k) {
            Vec xn = x;
            for (int i = 0; i < d; ++i) xn[i] += lam * step(i);
            Vec fnew(d);
            flow.field(xn.v.data(), fnew.v.data());
            double nn = fnew.norm();
            if (nn < fn) {
                x = xn;
                f = fnew;
                fn = nn;
                ok = true;
                break;
            }
            lam /= 2;
        }
        if (!ok) break;
    }
    return fn < ctl.accept_norm;
}

CriticalPoint classify_zero(const Flow& flow, const Vec& x, const CensusControls& ctl) {
    CriticalPoint cp;
    cp.location = x;
    Vec f(flow.dim());
    flow.field(x.v.data(), f.v.data());
    cp.field_norm = f.norm();
    Eigen::MatrixXd J = fd_jacobian(flow, x, ctl.fd_h);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < flow.dim(); ++i) {
        double re = es.eigenvalues()(i).real();
        cp.eig_real.push_back(re);
        if (re < 0) ++cp.morse_index;
        if (std::abs(re) < ctl.degeneracy_floor) cp.degenerate = true;
    }
    std::sort(cp.eig_real.begin(), cp.eig_real.end());
    return cp;
}

std::vector<CriticalPoint> find_critical_points(const FoldedRegion& region, const CensusControls& ctl) {
    std::vector<CriticalPoint> found;
    auto consider = [&](Vec seed) {
        if (!newton_zero(region, seed, ctl)) return;
        if (region.classify(seed.v.data()) != 0) return;
        for (const auto& cp : found) {
            if ((cp.location - seed).norm() < ctl.dedup) return;
        }
        found.push_back(classify_zero(region, seed, ctl));
    };

    std::vector<double> taus{0};
    if (region.annulus) {
        taus.clear();
        for (int i = 0; i < ctl.tau_seeds; ++i) taus.push_back(-0.9 + 1.8 * i / (ctl.tau_seeds - 1.0));
        taus.push_back(region.annulus->tau0);
    }

    // Zeros live on the tau-width chord ramps, so the t-seeds are placed on
    // the ramps of the chord window at each base seed.
    const double ramp_u[] = {0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98};
    for (const auto& fold : region.folds) {
        std::vector<std::pair<double, double>> base_pts;
        if (region.R0 <= 0) {
            base_pts.push_back({0, 0});
        } else {
            for (int ip = 0; ip < ctl.base_seeds; ++ip)
                for (int iq = 0; iq < ctl.base_seeds; ++iq)
                    base_pts.push_back({region.R0 * (-0.8 + 1.6 * ip / (ctl.base_seeds - 1.0)),
                                        region.R0 * (-0.8 + 1.6 * iq / (ctl.base_seeds - 1.0))});
            // Axis seeds: tilted chords put zeros on the q-axis.
            for (int iq = 0; iq < 2 * ctl.base_seeds + 1; ++iq)
                base_pts.push_back({0.0, region.R0 * (-0.9 + 1.8 * iq / (2.0 * ctl.base_seeds))});
            if (fold.tshape == FoldingFunction::TShape::ApparatusChimney) {
                // The tilted stove centers its zeros at (0, -2 c1).
                base_pts.push_back({0.0, -2 * fold.ap_c1});
                base_pts.push_back({0.0, 0.0});
                base_pts.push_back({0.5 * fold.ap_rho1, -2 * fold.ap_c1});
            }
            if (fold.tshape == FoldingFunction::TShape::ModelChimney) {
                base_pts.push_back({0.0, 0.0});
            }
        }
        for (const auto& [p, q] : base_pts) {
            for (double tau : taus) {
                double wbuf[3] = {p, q, tau};
                const double* w = region.R0 > 0 ? wbuf : wbuf + 2;
                double lo = 0, hi = region.t_hi;
                fold.chord(w, lo, hi);
                std::vector<double> tseeds;
                for (double u : ramp_u) {
                    tseeds.push_back(lo + fold.tau * u);
                    tseeds.push_back(hi - fold.tau * u);
                }
                for (int it = 0; it < ctl.t_seeds; ++it)
                    tseeds.push_back(lo + (hi - lo) * (it + 0.5) / ctl.t_seeds);
                for (int is = 0; is < ctl.s_seeds; ++is) {
                    double s = fold.s_a + (fold.s_b - fold.s_a) * (is + 0.5) / ctl.s_seeds;
                    for (double t : tseeds) {
                        if (t < 0 || t > region.t_hi) continue;
                        Vec seed(region.dim());
                        seed[0] = s;
                        seed[1] = t;
                        if (region.R0 > 0) {
                            seed[2] = p;
                            seed[3] = q;
                        }
                        if (region.annulus) seed[region.R0 > 0 ? 4 : 2] = tau;
                        consider(seed);
                    }
                }
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.morse_index != b.morse_index) return a.morse_index < b.morse_index;
        return a.location[1] < b.location[1];
    });
    return found;
}

}  // namespace liouville
