#include "liouville/audit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "liouville/svg.hpp"

namespace liouville {

BackwardLimit backward_limit(const Flow& flow, const std::vector<CriticalPoint>& census, const Vec& x,
                             const IntegratorControls& ctl, double basin_radius) {
    BackwardLimit lim;
    SmoothOutcome out = integrate_flow(flow, x, true, ctl);
    lim.end = out.end;
    if (out.kind == SmoothKind::Exit || out.kind == SmoothKind::Escaped) {
        lim.kind = LimitKind::ExitsNegativeBoundary;
        return lim;
    }
    if (out.kind == SmoothKind::Trapped) {
        for (size_t i = 0; i < census.size(); ++i) {
            if ((census[i].location - out.end).norm() < basin_radius) {
                lim.kind = LimitKind::Trapped;
                lim.cp = static_cast<int>(i);
                return lim;
            }
        }
    }
    lim.kind = LimitKind::Undetermined;
    return lim;
}

bool CriticalGraph::has_edge(int a, int b) const {
    for (auto& [x, y] : edges)
        if (x == a && y == b) return true;
    return false;
}

CriticalGraph build_critical_graph(const Flow& flow, const std::vector<CriticalPoint>& census,
                                   int seeds_per_node, double sphere_radius,
                                   const IntegratorControls& ctl, uint64_t seed,
                                   double basin_radius) {
    CriticalGraph g;
    g.nodes = census.size();
    int d = flow.dim();

    for (size_t a = 0; a < census.size(); ++a) {
        // Unstable directions of the forward field (positive real parts).
        Eigen::MatrixXd J(d, d);
        {
            Vec xp(d), xm(d), fp(d), fm(d);
            for (int j = 0; j < d; ++j) {
                xp = census[a].location;
                xm = census[a].location;
                xp[j] += 1e-6;
                xm[j] -= 1e-6;
                flow.field(xp.v.data(), fp.v.data());
                flow.field(xm.v.data(), fm.v.data());
                for (int i = 0; i < d; ++i) J(i, j) = (fp[i] - fm[i]) / 2e-6;
            }
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(J);
        std::vector<Eigen::VectorXd> unstable;
        for (int i = 0; i < d; ++i) {
            if (es.eigenvalues()(i).real() > 0) {
                Eigen::VectorXd v = es.eigenvectors().col(i).real();
                if (v.norm() < 1e-12) v = es.eigenvectors().col(i).imag();
                v.normalize();
                unstable.push_back(v);
            }
        }
        if (unstable.empty()) continue;

        for (int k = 0; k < seeds_per_node; ++k) {
            // Deterministic direction keyed by (node, k): doubling the seed
            // count refines the sample without moving existing seeds.
            Rng rng(seed ^ (a * 1000003ull + static_cast<uint64_t>(k) * 97003ull + 11ull));
            Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
            for (const auto& v : unstable) dir += rng.uniform(-1.0, 1.0) * v;
            if (dir.norm() < 1e-9) dir = unstable[0];
            dir.normalize();
            Vec x = census[a].location;
            for (int i = 0; i < d; ++i) x[i] += sphere_radius * dir(i);

            // Follow the Liouville field and record basin-ball hits.
            Vec cur = x;
            double traveled = 0;
            long total_steps = 0;
            int last_hit = -1;
            bool resolved = false;
            const double step_budget = ctl.budget;
            const long step_cap = 60000;
            IntegratorControls leg = ctl;
            while (traveled < step_budget && total_steps < step_cap) {
                leg.budget = 0.05;  // short legs so ball entries are observed
                SmoothOutcome out = integrate_flow(flow, cur, false, leg);
                cur = out.end;
                traveled += out.duration;
                total_steps += out.steps;
                int hit = -1;
                for (size_t b = 0; b < census.size(); ++b) {
                    if (b == a && traveled < 0.2) continue;
                    if ((census[b].location - cur).norm() < basin_radius) hit = static_cast<int>(b);
                }
                if (hit >= 0 && hit != static_cast<int>(a) && hit != last_hit) {
                    if (!g.has_edge(static_cast<int>(a), hit))
                        g.edges.push_back({static_cast<int>(a), hit});
                    last_hit = hit;
                }
                if (out.kind == SmoothKind::Exit || out.kind == SmoothKind::Escaped) {
                    resolved = true;
                    break;
                }
                if (out.kind == SmoothKind::Trapped) {
                    resolved = true;
                    break;
                }
            }
            if (!resolved) ++g.unresolved;
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

LoopCheck broken_loop_check(const CriticalGraph& graph) {
    LoopCheck res;
    std::vector<std::vector<int>> adj(graph.nodes);
    for (auto& [a, b] : graph.edges) adj[static_cast<size_t>(a)].push_back(b);
    std::vector<int> state(graph.nodes, 0);  // 0 new, 1 in stack, 2 done
    std::vector<int> stack;
    std::function<bool(int)> dfs = [&](int v) -> bool {
        state[static_cast<size_t>(v)] = 1;
        stack.push_back(v);
        for (int w : adj[static_cast<size_t>(v)]) {
            if (state[static_cast<size_t>(w)] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                res.cycle.assign(it, stack.end());
                return true;
            }
            if (state[static_cast<size_t>(w)] == 0 && dfs(w)) return true;
        }
        stack.pop_back();
        state[static_cast<size_t>(v)] = 2;
        return false;
    };
    for (size_t v = 0; v < graph.nodes; ++v) {
        if (state[v] == 0 && dfs(static_cast<int>(v))) {
            res.acyclic = false;
            return res;
        }
    }
    return res;
}

std::string graph_to_text(const CriticalGraph& graph, const std::vector<CriticalPoint>& census) {
    std::ostringstream out;
    for (size_t i = 0; i < graph.nodes; ++i) {
        out << i << " (index " << census[i].morse_index << "):";
        for (auto& [a, b] : graph.edges)
            if (a == static_cast<int>(i)) out << " " << b;
        out << "\n";
    }
    return out.str();
}

std::string graph_to_svg(const CriticalGraph& graph, const std::vector<CriticalPoint>& census) {
    // Hasse-style layout: Morse index as height, nodes spread horizontally.
    int maxidx = 0;
    for (const auto& cp : census) maxidx = std::max(maxidx, cp.morse_index);
    SvgCanvas svg(-0.5, -0.5, 9.5, maxidx + 0.5, 640, 360);
    std::vector<std::pair<double, double>> pos(census.size());
    std::vector<int> count_at(static_cast<size_t>(maxidx) + 1, 0);
    for (size_t i = 0; i < census.size(); ++i) {
        int idx = census[i].morse_index;
        pos[i] = {1.0 + 2.0 * count_at[static_cast<size_t>(idx)]++, static_cast<double>(idx)};
    }
    for (auto& [a, b] : graph.edges)
        svg.line(pos[static_cast<size_t>(a)].first, pos[static_cast<size_t>(a)].second,
                 pos[static_cast<size_t>(b)].first, pos[static_cast<size_t>(b)].second, "steelblue", 1.2);
    for (size_t i = 0; i < census.size(); ++i) {
        svg.circle(pos[i].first, pos[i].second, 5, census[i].morse_index == 0 ? "black" : "crimson");
        svg.text(pos[i].first + 0.1, pos[i].second + 0.1, std::to_string(i));
    }
    return svg.str();
}

StoveReport stove_predicates(const BlockingApparatus& apparatus,
                             const std::vector<CriticalPoint>& census, int n_trap_samples,
                             int n_fwd_samples, uint64_t seed, const IntegratorControls& ctl_in) {
    const BlockingApparatusParams& P = apparatus.params;
    if (!(P.delta1 > 0)) throw std::invalid_argument("stove classification needs delta1 > 0");
    StoveReport rep;
    for (size_t i = 0; i < census.size(); ++i)
        if (census[i].location[1] < 3 * P.delta1) rep.stove.push_back(static_cast<int>(i));

    IntegratorControls ctl = ctl_in;
    if (ctl.budget < 3000) ctl.budget = 3000;
    Rng rng(seed);

    // (b) backward trap samples from the declared U_trap neighborhood.
    for (int i = 0; i < n_trap_samples; ++i) {
        double t = rng.uniform(P.delta, P.t0 - P.delta);
        double ang = rng.uniform(0, 2 * M_PI);
        double rr = 0.4 * P.rho1 * std::sqrt(rng.uniform());
        Vec x = entry_state(apparatus.region, t, rr * std::cos(ang), rr * std::sin(ang));
        BackwardLimit lim = backward_limit(apparatus.region, census, x, ctl);
        ++rep.trap_samples;
        if (lim.kind == LimitKind::Trapped) {
            bool stove = std::find(rep.stove.begin(), rep.stove.end(), lim.cp) != rep.stove.end();
            if (stove)
                ++rep.trap_to_stove;
            else {
                ++rep.trap_elsewhere;
                rep.violations.push_back("trap sample t=" + num_str(t) + " landed off the stove");
            }
        } else {
            ++rep.trap_undetermined;
            rep.violations.push_back("trap sample t=" + num_str(t) + " undetermined");
        }
    }

    // (c) forward samples from the negative end.
    for (int i = 0; i < n_fwd_samples; ++i) {
        Vec x(apparatus.region.dim());
        x[0] = 0;
        bool on_axis = i % 2 == 0;
        x[1] = rng.uniform(0.0, P.t0);
        if (on_axis) {
            x[2] = 0;
            x[3] = 0;
        } else {
            double ang = rng.uniform(0, 2 * M_PI);
            double rr = rng.uniform(0.05, 0.8) * P.r0;
            x[2] = rr * std::cos(ang);
            x[3] = rr * std::sin(ang);
        }
        SmoothOutcome out = integrate_flow(apparatus.region, x, false, ctl);
        ++rep.fwd_samples;
        if (out.kind != SmoothKind::Trapped) continue;
        ++rep.fwd_trapped;
        bool pq_ok = norm_stab(x[2], x[3]) < 1e-3;
        bool t_ok = (x[1] >= 0 && x[1] < 2 * P.delta) || (x[1] > P.t0 - 2 * P.delta && x[1] <= P.t0);
        if (!pq_ok || !t_ok) {
            ++rep.fwd_violations;
            rep.violations.push_back("forward-trapped sample off the skeleton slab: t=" + num_str(x[1]) +
                                     " |pq|=" + num_str(norm_stab(x[2], x[3])));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// ToyCylinder.

ToyCylinder::ToyCylinder() {
    // Support chosen so the folded graph stays inside |y| < 1 over the whole
    // chart: |t_a| e^{s_b} < 1.
    fold_.H = 1.0;
    fold_.tau = 0.03;
    fold_.s_a = 0.0;
    fold_.s_b = 1.4;
    fold_.t_a = -0.18;
    fold_.t_b = 0.04;
    fold_.tilt_amp = 0.2;
    fold_.tilt_speak = 0.7;
}

Vec ToyCylinder::wrap_state(Vec v) const {
    v[0] = wrap(v[0], x_len);
    return v;
}

void ToyCylinder::field(const double* x, double* out) const {
    double xx = wrap(x[0], x_len);
    double y = x[1];
    out[0] = 1;
    out[1] = y;
    if (!folded) return;
    double s = xx - chart_x0_;
    if (s < fold_.s_a - 0.1 || s > fold_.s_b + 0.1) return;
    double t = y * std::exp(-s);
    FoldEval e = fold_.eval(s, t, nullptr);
    // Chart rule t = y e^{-s}: dF/dx = Fs - t Ft, dF/dy = e^{-s} Ft, and the
    // Hamiltonian correction of dx dy gives (1 + e^{-s} Ft, y - Fs + t Ft).
    out[0] = 1 + std::exp(-s) * e.Ft;
    out[1] = y - e.Fs + t * e.Ft;
}

int ToyCylinder::classify(const double* x) const {
    return std::abs(x[1]) > 1 ? 2 : 0;
}

std::vector<CriticalPoint> ToyCylinder::census(const CensusControls& ctl) const {
    std::vector<CriticalPoint> found;
    if (!folded) return found;
    for (int is = 0; is < 12; ++is) {
        for (int it = 0; it < 24; ++it) {
            double s = fold_.s_a + (fold_.s_b - fold_.s_a) * (is + 0.5) / 12;
            double t;
            if (it < 12)
                t = fold_.t_b - fold_.tau * (it + 0.5) / 6;  // upper ramp band
            else
                t = fold_.t_a + (fold_.t_b - fold_.t_a) * (it - 11.5) / 12;
            Vec seed(2);
            seed[0] = chart_x0_ + s;
            seed[1] = t * std::exp(s);
            if (std::abs(seed[1]) > 1) continue;
            if (!newton_zero(*this, seed, ctl)) continue;
            bool dup = false;
            for (const auto& cp : found)
                if ((cp.location - seed).norm() < ctl.dedup) dup = true;
            if (!dup) found.push_back(classify_zero(*this, seed, ctl));
        }
    }
    std::sort(found.begin(), found.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.morse_index < b.morse_index; });
    return found;
}

}  // namespace liouville
