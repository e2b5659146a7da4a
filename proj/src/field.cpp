#include "liouville/field.hpp"

#include <cmath>
#include <deque>
#include <thread>

namespace liouville {

FoldEval FoldedRegion::total(const double* x) const {
    FoldEval sum;
    const double* w = x + 2;
    for (const auto& f : folds) {
        FoldEval e = f.eval(x[0], x[1], w);
        sum.F += e.F;
        sum.Fs += e.Fs;
        sum.Ft += e.Ft;
        for (int i = 0; i < 3; ++i) sum.Fw[i] += e.Fw[i];
    }
    return sum;
}

void FoldedRegion::field(const double* x, double* out) const {
    FoldEval e = total(x);
    double s = x[0];
    double es = std::exp(-s);
    int d = dim();
    // lambda0(X_H) collects the contact-form pairing of the base Hamiltonian
    // part; on the disk factor lambda_stab(X_H) = -(p Fp + q Fq)/2, on the
    // annulus factor (tau0 - tau) F_tau.
    double lam_xh = 0;
    if (R0 > 0) {
        double p = x[2], q = x[3];
        lam_xh += -(p * e.Fw[0] + q * e.Fw[1]) / 2;
        out[2] = es * (e.Fw[1] - e.Ft * p / 2);
        out[3] = es * (-e.Fw[0] - e.Ft * q / 2);
    }
    if (annulus) {
        int it = R0 > 0 ? 4 : 2;
        double tau = x[it];
        double ftau = e.Fw[R0 > 0 ? 2 : 0];
        lam_xh += (annulus->tau0 - tau) * ftau;
        out[it] = -es * e.Ft * (tau - annulus->tau0);
    }
    out[0] = 1 + es * e.Ft;
    out[1] = -es * (e.Fs + lam_xh);
    (void)d;
}

void FoldedRegion::lambda_prime(const double* x, double* out) const {
    FoldEval e = total(x);
    double es = std::exp(x[0]);
    out[0] = e.Fs;            // ds component
    out[1] = e.Ft + es;       // dt component
    if (R0 > 0) {
        double p = x[2], q = x[3];
        out[2] = e.Fw[0] + es * (-q / 2);  // dp
        out[3] = e.Fw[1] + es * (p / 2);   // dq
    }
    if (annulus) {
        int it = R0 > 0 ? 4 : 2;
        // lambda on the annulus factor is (tau0 - tau) d theta; in reduced
        // coordinates only the dF part contributes a d tau component.
        out[it] = e.Fw[R0 > 0 ? 2 : 0];
    }
}

int FoldedRegion::classify(const double* x) const {
    if (x[0] < s_lo) return 1;
    if (x[0] > s_hi) return 2;
    if (x[1] < 0) return 3;
    if (x[1] > t_hi) return 4;
    if (R0 > 0 && norm_stab(x[2], x[3]) > R0) return 5;
    if (annulus) {
        int it = R0 > 0 ? 4 : 2;
        if (std::abs(x[it]) > 1) return 6;
    }
    return 0;
}

Vec entry_state(const FoldedRegion& region, double t, double p, double q, double tau) {
    Vec x(region.dim());
    x[0] = region.s_hi;
    x[1] = t;
    if (region.R0 > 0) {
        x[2] = p;
        x[3] = q;
    }
    if (region.annulus) x[region.R0 > 0 ? 4 : 2] = tau;
    return x;
}

namespace {

// Scaled field Y = sigma * X / max(|X|, 0.1): unit speed in fast regions,
// 10x time dilation in slow ones so the trap window converges.
void scaled_field(const Flow& flow, double sigma, const double* x, double* out) {
    flow.field(x, out);
    double n = 0;
    for (int i = 0; i < flow.dim(); ++i) n += out[i] * out[i];
    n = std::sqrt(n);
    double c = sigma / std::max(n, 0.1);
    for (int i = 0; i < flow.dim(); ++i) out[i] *= c;
}

Vec rk4_step(const Flow& flow, double sigma, const Vec& x, double h) {
    int d = flow.dim();
    Vec k1(d), k2(d), k3(d), k4(d), tmp(d);
    scaled_field(flow, sigma, x.v.data(), k1.v.data());
    tmp = x + (h / 2) * k1;
    scaled_field(flow, sigma, tmp.v.data(), k2.v.data());
    tmp = x + (h / 2) * k2;
    scaled_field(flow, sigma, tmp.v.data(), k3.v.data());
    tmp = x + h * k3;
    scaled_field(flow, sigma, tmp.v.data(), k4.v.data());
    return x + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Vec flow_for(const Flow& flow, Vec x, double signed_duration, double h) {
    double sigma = signed_duration >= 0 ? 1.0 : -1.0;
    double remaining = std::abs(signed_duration);
    while (remaining > 1e-15) {
        double step = std::min(h, remaining);
        Vec y1 = rk4_step(flow, sigma, x, step);
        Vec y2 = rk4_step(flow, sigma, rk4_step(flow, sigma, x, step / 2), step / 2);
        int halvings = 0;
        while ((y1 - y2).norm() > 1e-9 && halvings < 12) {
            step /= 2;
            ++halvings;
            y1 = rk4_step(flow, sigma, x, step);
            y2 = rk4_step(flow, sigma, rk4_step(flow, sigma, x, step / 2), step / 2);
        }
        x = y2 + (1.0 / 15.0) * (y2 - y1);  // local extrapolation
        remaining -= step;
    }
    return x;
}

SmoothOutcome integrate_flow(const Flow& flow, const Vec& x0, bool backward,
                             const IntegratorControls& ctl, std::vector<Vec>* trajectory) {
    const double sigma = backward ? -1.0 : 1.0;
    SmoothOutcome out;
    Vec x = x0;
    double h = ctl.h;
    std::deque<Vec> window;
    Vec f(flow.dim());
    if (trajectory) trajectory->push_back(x);

    for (int step = 0; step < ctl.max_steps && out.duration < ctl.budget; ++step) {
        // Step doubling: accept the two half steps, reject on disagreement.
        Vec y1 = rk4_step(flow, sigma, x, h);
        Vec y2 = rk4_step(flow, sigma, rk4_step(flow, sigma, x, h / 2), h / 2);
        double err = (y1 - y2).norm();
        int halvings = 0;
        while (err > ctl.tol_err && halvings < ctl.max_halvings) {
            h /= 2;
            ++halvings;
            y1 = rk4_step(flow, sigma, x, h);
            y2 = rk4_step(flow, sigma, rk4_step(flow, sigma, x, h / 2), h / 2);
            err = (y1 - y2).norm();
        }

        Vec prev = x;
        x = y2 + (1.0 / 15.0) * (y2 - y1);  // local extrapolation
        flow.canonicalize(x.v.data());
        out.duration += h;
        ++out.steps;
        bool may_grow = halvings == 0 && err < ctl.tol_err / 64 && h < ctl.h;
        if (trajectory) trajectory->push_back(x);

        int code = flow.classify(x.v.data());
        if (code != 0) {
            // Refine the crossing by bisecting the step length.
            double lo = 0, hi = h;
            Vec inside = prev;
            for (int it = 0; it < 48 && (hi - lo) > 1e-15 * (1 + h); ++it) {
                double mid = (lo + hi) / 2;
                Vec xm = rk4_step(flow, sigma, prev, mid);
                if (flow.classify(xm.v.data()) != 0) {
                    hi = mid;
                } else {
                    lo = mid;
                    inside = xm;
                }
            }
            Vec xb = rk4_step(flow, sigma, prev, hi);
            out.end = xb;
            out.boundary = flow.classify(xb.v.data());
            out.duration += hi - h;
            out.kind = out.boundary == 1 ? SmoothKind::Exit : SmoothKind::Escaped;
            if (!backward && out.boundary == 2) out.kind = SmoothKind::Exit;
            if (trajectory) trajectory->back() = xb;
            return out;
        }

        if (may_grow) h = std::min(2 * h, ctl.h);

        // Trap rule: raw speed below tol_v and the last `window` steps moved
        // less than window_disp.
        window.push_back(x);
        if (static_cast<int>(window.size()) > ctl.window + 1) window.pop_front();
        if (static_cast<int>(window.size()) == ctl.window + 1) {
            double disp = (window.back() - window.front()).norm();
            if (disp < ctl.window_disp) {
                flow.field(x.v.data(), f.v.data());
                if (f.norm() < ctl.tol_v) {
                    out.kind = SmoothKind::Trapped;
                    out.end = x;
                    return out;
                }
            }
        }
    }
    out.kind = SmoothKind::Undetermined;
    out.end = x;
    return out;
}

HolonomyBatch smooth_holonomy(const FoldedRegion& region, const std::vector<Vec>& entries,
                              const IntegratorControls& ctl, int workers) {
    HolonomyBatch batch;
    batch.samples.resize(entries.size());
    auto run = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            batch.samples[i].entry = entries[i];
            batch.samples[i].out = integrate_flow(region, entries[i], true, ctl);
        }
    };
    workers = std::max(1, workers);
    if (workers == 1 || entries.size() < 8) {
        run(0, entries.size());
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (entries.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            size_t lo = w * chunk, hi = std::min(entries.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& s : batch.samples) {
        switch (s.out.kind) {
            case SmoothKind::Exit: ++batch.n_exit; break;
            case SmoothKind::Trapped: ++batch.n_trapped; break;
            case SmoothKind::Escaped: ++batch.n_escaped; break;
            case SmoothKind::Undetermined: ++batch.n_undetermined; break;
        }
    }
    if (!batch.samples.empty())
        batch.trap_fraction = static_cast<double>(batch.n_trapped) / batch.samples.size();
    return batch;
}

BoundReport holonomy_norm_bounds(const FoldedRegion& region, const HolonomyBatch& batch, double slack) {
    BoundReport rep;
    if (region.R0 <= 0) return rep;
    double s0 = region.s_hi - region.s_lo;
    double stab_bound = std::exp(s0 / 2) * (1 + slack);
    double w_bound = std::exp(s0) * (1 + slack);
    Disk disk{region.R0};
    for (const auto& s : batch.samples) {
        if (s.out.kind != SmoothKind::Exit) continue;  // bound is about holonomy only
        double in_stab = norm_stab(s.entry[2], s.entry[3]);
        double out_stab = norm_stab(s.out.end[2], s.out.end[3]);
        double in_w = norm_w(disk, {s.entry[2], s.entry[3]});
        double out_w = norm_w(disk, {s.out.end[2], s.out.end[3]});
        ++rep.counted;
        if (in_stab > 1e-12) {
            double r = out_stab / in_stab;
            rep.worst_stab_ratio = std::max(rep.worst_stab_ratio, r);
            if (r > stab_bound) ++rep.violators_stab;
        }
        if (in_w > 1e-12) {
            double r = out_w / in_w;
            rep.worst_w_ratio = std::max(rep.worst_w_ratio, r);
            if (r > w_bound) ++rep.violators_w;
        }
    }
    return rep;
}

}  // namespace liouville
