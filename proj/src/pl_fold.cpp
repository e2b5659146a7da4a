#include "liouville/pl_fold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace liouville {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-13;

double collar_depth(const WeinsteinBase& base, const BasePoint& w) {
    double n = norm_w(base, w);
    return n > 0 ? std::log(n) : -kInf;
}

// Boundary-time coordinate of the forward-exit point; constant along orbits.
double exit_time_coord(const WeinsteinBase& base, const BasePoint& w) {
    return boundary_time(base, forward_exit(base, w).point);
}
}  // namespace

std::string face_name(FaceId f) {
    switch (f) {
        case FaceId::ZFace: return "z-face";
        case FaceId::SLo: return "s=lo";
        case FaceId::SHi: return "s=hi";
        case FaceId::TBottom: return "t=0";
        case FaceId::TTop: return "t=top";
        case FaceId::TLid: return "t=lid";
        case FaceId::WBdry: return "dW0";
        case FaceId::StripInner: return "r=-r0";
        case FaceId::ThetaLoWall: return "theta=0";
        case FaceId::ThetaHiWall: return "theta=1";
        case FaceId::COuterWall: return "dC-outer";
        case FaceId::CInnerWall: return "dC-inner";
        case FaceId::CSideLo: return "dC-side-lo";
        case FaceId::CSideHi: return "dC-side-hi";
    }
    return "?";
}

PLFold make_box_fold(double s0, double t0, double z0, std::optional<WeinsteinBase> base, double s_lo) {
    if (!(s0 > 0 && t0 > 0 && z0 > 0)) throw std::invalid_argument("box fold: parameters must be positive");
    PLFold f;
    f.kind = FoldKind::BoxFold;
    f.s_lo = s_lo;
    f.s_hi = s_lo + s0;
    f.t0 = t0;
    f.z0 = z0;
    f.base = std::move(base);
    return f;
}

PLFold make_box_hole(double s0, double t0, double z0, std::optional<WeinsteinBase> base, double s_lo) {
    PLFold f = make_box_fold(s0, t0, z0, std::move(base), s_lo);
    f.kind = FoldKind::BoxHole;
    return f;
}

PLFold make_pre_chimney(double s0, double t0, double z0, const ExactStrip& strip, double s_lo) {
    if (!(t0 >= strip.theta_len))
        throw std::invalid_argument("pre-chimney requires t0 >= theta_len");
    PLFold f = make_box_fold(s0, t0, z0, strip, s_lo);
    f.kind = FoldKind::PreChimney;
    return f;
}

bool chimney_contains(const PLFold& fold, const BasePoint& w, double shrink) {
    const auto& spec = *fold.chimney;
    const auto& base = *fold.base;
    double rc = collar_depth(base, w);
    if (rc < fold.collar_lo() + shrink) return false;
    double total = boundary_loop(base, forward_exit(base, w).point).total;
    double u = exit_time_coord(base, w);
    double off = wrap(u - spec.gamma_lo, total);
    return off >= shrink && off <= spec.gamma_len - shrink;
}

double t_ceiling(const PLFold& fold, const BasePoint& w) {
    if (fold.kind != FoldKind::Chimney) return fold.t0;
    return chimney_contains(fold, w) ? fold.t0 : fold.t_minus;
}

std::string FaceField::describe(const PLFold&) const {
    std::ostringstream out;
    bool first = true;
    auto term = [&](double c, const char* sym) {
        if (c == 0) return;
        if (!first) out << (c > 0 ? " + " : " - ");
        else if (c < 0) out << "-";
        double a = std::abs(c);
        if (a != 1) out << num_str(a) << " ";
        out << sym;
        first = false;
    };
    term(dz, "dz");
    term(ds, "ds");
    term(dt, "dt");
    switch (base_motion) {
        case BaseMotion::None: break;
        case BaseMotion::LiouvilleFwd: term(base_rate, "X"); break;
        case BaseMotion::LiouvilleBwd: term(-base_rate, "X"); break;
        case BaseMotion::ReebBwd: term(-base_rate, "R"); break;
        case BaseMotion::ReebFwdScaled: term(base_rate, "R"); break;
        case BaseMotion::CollarIn: term(-base_rate, "dr"); break;
        case BaseMotion::CollarOut: term(base_rate, "dr"); break;
    }
    if (first) out << "0";
    return out.str();
}

namespace {
bool face_belongs(const PLFold& fold, FaceId face) {
    switch (face) {
        case FaceId::ZFace:
        case FaceId::SLo:
        case FaceId::SHi:
        case FaceId::TBottom:
        case FaceId::TTop:
            return true;
        case FaceId::WBdry:
            return fold.base.has_value();
        case FaceId::StripInner:
        case FaceId::ThetaLoWall:
        case FaceId::ThetaHiWall:
            return fold.kind == FoldKind::PreChimney;
        case FaceId::TLid:
        case FaceId::COuterWall:
        case FaceId::CInnerWall:
        case FaceId::CSideLo:
        case FaceId::CSideHi:
            return fold.kind == FoldKind::Chimney;
    }
    return false;
}
}  // namespace

FaceField face_foliation(const PLFold& fold, FaceId face, const FaceState&) {
    if (!face_belongs(fold, face))
        throw std::invalid_argument("face " + face_name(face) + " does not belong to this fold kind");
    const bool hole = fold.kind == FoldKind::BoxHole;
    const double eslo = std::exp(fold.s_lo), eshi = std::exp(fold.s_hi);
    FaceField f;
    using BM = FaceField::BaseMotion;
    switch (face) {
        case FaceId::ZFace:
            f.ds = -1;
            break;
        case FaceId::SLo:
            f.dt = hole ? -1 : 1;
            f.dz = hole ? eslo : -eslo;
            break;
        case FaceId::SHi:
            f.dt = hole ? 1 : -1;
            f.dz = hole ? -eshi : eshi;
            break;
        case FaceId::TBottom:
            f.ds = hole ? 1 : -1;
            if (fold.base) {
                f.base_motion = hole ? BM::LiouvilleBwd : BM::LiouvilleFwd;
                f.base_rate = 1;
            }
            break;
        case FaceId::TTop:
        case FaceId::TLid:
            f.ds = hole ? -1 : 1;
            if (fold.base) {
                f.base_motion = hole ? BM::LiouvilleFwd : BM::LiouvilleBwd;
                f.base_rate = 1;
            }
            break;
        case FaceId::WBdry:
        case FaceId::COuterWall:
            f.dt = hole ? -1 : 1;
            f.base_motion = BM::ReebBwd;
            f.base_rate = 1;
            break;
        case FaceId::StripInner: {
            const auto& strip = std::get<ExactStrip>(*fold.base);
            f.dt = -1;
            f.base_motion = BM::ReebFwdScaled;
            f.base_rate = std::exp(-strip.r_lo);
            break;
        }
        case FaceId::ThetaLoWall:
        case FaceId::CSideLo:
            f.base_motion = BM::CollarIn;
            f.base_rate = 1;
            break;
        case FaceId::ThetaHiWall:
        case FaceId::CSideHi:
            f.base_motion = BM::CollarOut;
            f.base_rate = 1;
            break;
        case FaceId::CInnerWall:
            f.dt = -1;
            f.base_motion = BM::ReebFwdScaled;
            f.base_rate = std::exp(-fold.collar_lo());
            break;
    }
    return f;
}

namespace {

struct Cand {
    double delta = kInf;
    int prio = 9;  // z=0, t=1, s=2, base boundary=3
    std::function<FaceState()> make;
    bool exits = false;
};

StepResult resolve(const PLFold&, std::vector<Cand>& cands, const FaceState& st) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
        if (cands[i].delta == kInf) continue;
        if (best < 0) {
            best = i;
            continue;
        }
        double d = cands[i].delta - cands[best].delta;
        if (d < -kTieTol * (1 + std::abs(cands[best].delta)) ||
            (std::abs(d) <= kTieTol * (1 + std::abs(cands[best].delta)) &&
             cands[i].prio < cands[best].prio))
            best = i;
    }
    if (best < 0) throw std::runtime_error("pl_step: stagnation on face " + face_name(st.face));
    StepResult r;
    r.advance = cands[best].delta;
    if (cands[best].exits) {
        r.exited = true;
        FaceState fs = cands[best].make();
        r.exit_t = fs.t;
        r.exit_w = fs.w;
        r.next = fs;
    } else {
        r.next = cands[best].make();
    }
    return r;
}

}  // namespace

StepResult pl_step(const PLFold& fold, const FaceState& st) {
    const double eslo = std::exp(fold.s_lo), eshi = std::exp(fold.s_hi);
    const bool hole = fold.kind == FoldKind::BoxHole;
    const bool prech = fold.kind == FoldKind::PreChimney;
    const bool chim = fold.kind == FoldKind::Chimney;
    std::vector<Cand> cands;

    auto flow_fwd = [&](const BasePoint& w, double d) {
        return liouville_flow_base(*fold.base, w, d).point;
    };
    auto flow_bwd = [&](const BasePoint& w, double d) {
        return liouville_flow_base(*fold.base, w, -d).point;
    };

    switch (st.face) {
        case FaceId::SHi: {
            if (!hole) {
                cands.push_back({st.t, 1, [&, st] {
                                     return FaceState{FaceId::TBottom, st.z + eshi * st.t, st.s, 0, st.w};
                                 }});
                cands.push_back({(fold.z0 - st.z) / eshi, 0, [&, st] {
                                     double d = (fold.z0 - st.z) / eshi;
                                     return FaceState{FaceId::ZFace, fold.z0, st.s, st.t - d, st.w};
                                 }});
            } else {
                cands.push_back({fold.t0 - st.t, 1, [&, st] {
                                     double d = fold.t0 - st.t;
                                     return FaceState{FaceId::TTop, st.z - eshi * d, st.s, fold.t0, st.w};
                                 }});
                cands.push_back({(st.z + fold.z0) / eshi, 0, [&, st] {
                                     double d = (st.z + fold.z0) / eshi;
                                     return FaceState{FaceId::ZFace, -fold.z0, st.s, st.t + d, st.w};
                                 }});
            }
            break;
        }
        case FaceId::ZFace: {
            cands.push_back({st.s - fold.s_lo, 2, [&, st] {
                                 return FaceState{FaceId::SLo, st.z, fold.s_lo, st.t, st.w};
                             }});
            break;
        }
        case FaceId::SLo: {
            if (!hole) {
                Cand exit;
                exit.delta = st.z / eslo;
                exit.prio = 0;
                exit.exits = true;
                exit.make = [&, st] {
                    return FaceState{FaceId::SLo, 0, fold.s_lo, st.t + st.z / eslo, st.w};
                };
                cands.push_back(exit);
                double tc = t_ceiling(fold, st.w);
                FaceId up = (chim && chimney_contains(fold, st.w)) ? FaceId::TLid : FaceId::TTop;
                cands.push_back({tc - st.t, 1, [&, st, tc, up] {
                                     double d = tc - st.t;
                                     return FaceState{up, st.z - eslo * d, st.s, tc, st.w};
                                 }});
            } else {
                Cand exit;
                exit.delta = -st.z / eslo;
                exit.prio = 0;
                exit.exits = true;
                exit.make = [&, st] {
                    return FaceState{FaceId::SLo, 0, fold.s_lo, st.t + st.z / eslo, st.w};
                };
                cands.push_back(exit);
                cands.push_back({st.t, 1, [&, st] {
                                     return FaceState{FaceId::TBottom, st.z + eslo * st.t, st.s, 0, st.w};
                                 }});
            }
            break;
        }
        case FaceId::TBottom: {
            if (!hole) {
                cands.push_back({st.s - fold.s_lo, 2, [&, st] {
                                     double d = st.s - fold.s_lo;
                                     BasePoint w = fold.base ? flow_fwd(st.w, d) : st.w;
                                     if (prech) w = {st.w.a + d, st.w.b};
                                     return FaceState{FaceId::SLo, st.z, fold.s_lo, 0, w};
                                 }});
                if (fold.base && !prech) {
                    double n = norm_w(*fold.base, st.w);
                    if (n > 0) {
                        double db = -std::log(n);
                        cands.push_back({db, 3, [&, st, db] {
                                             BasePoint w = forward_exit(*fold.base, st.w).point;
                                             return FaceState{FaceId::WBdry, st.z, st.s - db, 0, w};
                                         }});
                    }
                } else if (prech) {
                    const auto& strip = std::get<ExactStrip>(*fold.base);
                    double db = strip.r_hi - st.w.a;
                    cands.push_back({db, 3, [&, st, db, strip] {
                                         return FaceState{FaceId::WBdry, st.z, st.s - db, 0,
                                                          BasePoint{strip.r_hi, st.w.b}};
                                     }});
                }
            } else {
                cands.push_back({fold.s_hi - st.s, 2, [&, st] {
                                     double d = fold.s_hi - st.s;
                                     BasePoint w = fold.base ? flow_bwd(st.w, d) : st.w;
                                     return FaceState{FaceId::SHi, st.z, fold.s_hi, 0, w};
                                 }});
            }
            break;
        }
        case FaceId::TTop: {
            double tc = chim ? fold.t_minus : fold.t0;
            if (!hole) {
                cands.push_back({fold.s_hi - st.s, 2, [&, st, tc] {
                                     double d = fold.s_hi - st.s;
                                     BasePoint w = st.w;
                                     if (prech)
                                         w = {st.w.a - d, st.w.b};
                                     else if (fold.base)
                                         w = flow_bwd(st.w, d);
                                     return FaceState{FaceId::SHi, st.z, fold.s_hi, tc, w};
                                 }});
                if (prech) {
                    const auto& strip = std::get<ExactStrip>(*fold.base);
                    double db = st.w.a - strip.r_lo;
                    cands.push_back({db, 3, [&, st, db, strip] {
                                         return FaceState{FaceId::StripInner, st.z, st.s + db, fold.t0,
                                                          BasePoint{strip.r_lo, st.w.b}};
                                     }});
                }
            } else {
                cands.push_back({st.s - fold.s_lo, 2, [&, st] {
                                     double d = st.s - fold.s_lo;
                                     BasePoint w = fold.base ? flow_fwd(st.w, d) : st.w;
                                     return FaceState{FaceId::SLo, st.z, fold.s_lo, fold.t0, w};
                                 }});
                if (fold.base) {
                    double n = norm_w(*fold.base, st.w);
                    if (n > 0) {
                        double db = -std::log(n);
                        cands.push_back({db, 3, [&, st, db] {
                                             BasePoint w = forward_exit(*fold.base, st.w).point;
                                             return FaceState{FaceId::WBdry, st.z, st.s - db, fold.t0, w};
                                         }});
                    }
                }
            }
            break;
        }
        case FaceId::TLid: {
            cands.push_back({fold.s_hi - st.s, 2, [&, st] {
                                 double d = fold.s_hi - st.s;
                                 return FaceState{FaceId::SHi, st.z, fold.s_hi, fold.t0, flow_bwd(st.w, d)};
                             }});
            double rc = collar_depth(*fold.base, st.w);
            double db = rc - fold.collar_lo();
            cands.push_back({db, 3, [&, st, db] {
                                 return FaceState{FaceId::CInnerWall, st.z, st.s + db, fold.t0,
                                                  flow_bwd(st.w, db)};
                             }});
            break;
        }
        case FaceId::WBdry: {
            if (prech) {
                const auto& strip = std::get<ExactStrip>(*fold.base);
                double reeb_rate = std::exp(-strip.r_hi);
                cands.push_back({fold.t0 - st.t, 1, [&, st, reeb_rate] {
                                     double d = fold.t0 - st.t;
                                     return FaceState{FaceId::TTop, st.z, st.s, fold.t0,
                                                      BasePoint{st.w.a, st.w.b - d * reeb_rate}};
                                 }});
                cands.push_back({st.w.b / reeb_rate, 3, [&, st] {
                                     double d = st.w.b / std::exp(-strip.r_hi);
                                     return FaceState{FaceId::ThetaLoWall, st.z, st.s, st.t + d,
                                                      BasePoint{st.w.a, 0}};
                                 }});
            } else if (!hole) {
                double tc = chim ? fold.t_minus : fold.t0;
                cands.push_back({tc - st.t, 1, [&, st, tc] {
                                     double d = tc - st.t;
                                     BasePoint w = reeb_boundary_holonomy(*fold.base, st.w, d);
                                     FaceId nf = FaceId::TTop;
                                     if (chim && chimney_contains(fold, w)) nf = FaceId::COuterWall;
                                     return FaceState{nf, st.z, st.s, tc, w};
                                 }});
            } else {
                cands.push_back({st.t, 1, [&, st] {
                                     BasePoint w = reeb_boundary_holonomy(*fold.base, st.w, st.t);
                                     return FaceState{FaceId::TBottom, st.z, st.s, 0, w};
                                 }});
            }
            break;
        }
        case FaceId::ThetaLoWall: {
            const auto& strip = std::get<ExactStrip>(*fold.base);
            double db = st.w.a - strip.r_lo;
            cands.push_back({db, 3, [&, st, strip] {
                                 return FaceState{FaceId::StripInner, st.z, st.s, st.t,
                                                  BasePoint{strip.r_lo, st.w.b}};
                             }});
            break;
        }
        case FaceId::StripInner: {
            const auto& strip = std::get<ExactStrip>(*fold.base);
            double rate = std::exp(-strip.r_lo);
            cands.push_back({st.t, 1, [&, st, rate] {
                                 return FaceState{FaceId::TBottom, st.z, st.s, 0,
                                                  BasePoint{st.w.a, st.w.b + st.t * rate}};
                             }});
            cands.push_back({(strip.theta_len - st.w.b) / rate, 3, [&, st, strip, rate] {
                                 double d = (strip.theta_len - st.w.b) / rate;
                                 return FaceState{FaceId::ThetaHiWall, st.z, st.s, st.t - d,
                                                  BasePoint{st.w.a, strip.theta_len}};
                             }});
            break;
        }
        case FaceId::ThetaHiWall: {
            const auto& strip = std::get<ExactStrip>(*fold.base);
            double db = strip.r_hi - st.w.a;
            cands.push_back({db, 3, [&, st, strip] {
                                 return FaceState{FaceId::WBdry, st.z, st.s, st.t,
                                                  BasePoint{strip.r_hi, st.w.b}};
                             }});
            break;
        }
        case FaceId::COuterWall: {
            const auto& spec = *fold.chimney;
            BoundaryLoop loop = boundary_loop(*fold.base, st.w);
            double u = boundary_time(*fold.base, st.w);
            cands.push_back({fold.t0 - st.t, 1, [&, st] {
                                 double d = fold.t0 - st.t;
                                 BasePoint w = reeb_boundary_holonomy(*fold.base, st.w, d);
                                 return FaceState{FaceId::TLid, st.z, st.s, fold.t0, w};
                             }});
            double to_lo = wrap(u - spec.gamma_lo, loop.total);
            cands.push_back({to_lo, 3, [&, st, loop, spec, to_lo] {
                                 BasePoint w = loop.at_time(spec.gamma_lo);
                                 return FaceState{FaceId::CSideLo, st.z, st.s, st.t + to_lo, w};
                             }});
            break;
        }
        case FaceId::CSideLo: {
            double rc = collar_depth(*fold.base, st.w);
            double db = rc - fold.collar_lo();
            cands.push_back({db, 3, [&, st, db] {
                                 return FaceState{FaceId::CInnerWall, st.z, st.s, st.t, flow_bwd(st.w, db)};
                             }});
            break;
        }
        case FaceId::CInnerWall: {
            const auto& spec = *fold.chimney;
            double rate = std::exp(-fold.collar_lo());
            BasePoint bp = forward_exit(*fold.base, st.w).point;
            BoundaryLoop loop = boundary_loop(*fold.base, bp);
            double u = boundary_time(*fold.base, bp);
            cands.push_back({st.t - fold.t_minus, 1, [&, st, loop, u, rate] {
                                 double d = st.t - fold.t_minus;
                                 BasePoint w0 = loop.at_time(u + d * rate);
                                 BasePoint w = liouville_flow_base(*fold.base, w0, fold.collar_lo()).point;
                                 return FaceState{FaceId::TTop, st.z, st.s, fold.t_minus, w};
                             }});
            double ghi = spec.gamma_lo + spec.gamma_len;
            double to_hi = wrap(ghi - u, loop.total) / rate;
            cands.push_back({to_hi, 3, [&, st, loop, ghi, to_hi] {
                                 BasePoint w0 = loop.at_time(ghi);
                                 BasePoint w = liouville_flow_base(*fold.base, w0, fold.collar_lo()).point;
                                 return FaceState{FaceId::CSideHi, st.z, st.s, st.t - to_hi, w};
                             }});
            break;
        }
        case FaceId::CSideHi: {
            double rc = collar_depth(*fold.base, st.w);
            double db = -rc;
            cands.push_back({db, 3, [&, st] {
                                 BasePoint w = forward_exit(*fold.base, st.w).point;
                                 return FaceState{FaceId::COuterWall, st.z, st.s, st.t, w};
                             }});
            break;
        }
    }
    return resolve(fold, cands, st);
}

int pl_default_budget(const PLFold& fold) {
    double tm = fold.kind == FoldKind::Chimney ? fold.t_minus : fold.t0;
    return static_cast<int>(10 * (1 + fold.z0 / (std::exp(fold.s_lo) * tm))) + 200;
}

FlowOutcome pl_trace(const PLFold& fold, double entry_t, BasePoint entry_w, TraceLog* log, int budget) {
    if (budget <= 0) budget = pl_default_budget(fold);
    if (fold.base && !contains(*fold.base, entry_w))
        throw std::domain_error("pl_trace: entry base point outside the base");
    double tc = t_ceiling(fold, entry_w);
    if (!(entry_t > 0 && entry_t < tc))
        throw std::domain_error("pl_trace: entry t outside the fold footprint");

    FaceState st{FaceId::SHi, 0, fold.s_hi, entry_t, entry_w};
    if (log) log->states.push_back(st);

    const double s0 = fold.s0();
    const double contraction = std::exp(-s0) + 1e-9;
    const bool hole = fold.kind == FoldKind::BoxHole;
    std::vector<double> zface_ts;
    std::vector<double> tbottom_zs;

    FlowOutcome out;
    for (int ev = 0; ev < budget; ++ev) {
        StepResult sr = pl_step(fold, st);
        out.events = ev + 1;
        if (sr.exited) {
            if (log) log->states.push_back(sr.next);
            out.kind = FlowOutcome::Kind::Exit;
            out.exit_t = sr.exit_t;
            out.exit_w = sr.exit_w;
            return out;
        }
        st = sr.next;
        if (log) log->states.push_back(st);

        if (fold.kind == FoldKind::PreChimney && st.face == FaceId::TTop) {
            // Any flowline reaching t = t0 in a pre-chimney fold with
            // t0 >= theta_len (enforced at construction) never exits.
            out.kind = FlowOutcome::Kind::Trapped;
            out.cert = {"t0-touch", {st.z, st.s, st.w.a, st.w.b}};
            return out;
        }
        if (st.face == FaceId::ZFace) {
            zface_ts.push_back(st.t);
            size_t n = zface_ts.size();
            if (n >= 3) {
                double d1 = zface_ts[n - 2] - zface_ts[n - 3];
                double d2 = zface_ts[n - 1] - zface_ts[n - 2];
                if (hole) {
                    d1 = -d1;
                    d2 = -d2;
                }
                if (d1 > 0 && d2 > 0 && d2 <= d1 * contraction) {
                    out.kind = FlowOutcome::Kind::Trapped;
                    out.cert = {"z-spiral", {zface_ts[n - 3], zface_ts[n - 2], zface_ts[n - 1]}};
                    return out;
                }
            }
        }
        if (fold.kind == FoldKind::Chimney && st.face == FaceId::TBottom) {
            tbottom_zs.push_back(st.z);
            size_t n = tbottom_zs.size();
            if (n >= 3) {
                double gain = std::exp(fold.s_hi) * fold.t_minus;
                double d1 = tbottom_zs[n - 2] - tbottom_zs[n - 3];
                double d2 = tbottom_zs[n - 1] - tbottom_zs[n - 2];
                double tol = 1e-6 * std::max(1.0, gain);
                if (std::abs(d1 - gain) <= tol && std::abs(d2 - gain) <= tol) {
                    out.kind = FlowOutcome::Kind::Trapped;
                    out.cert = {"chimney-cycle", {tbottom_zs[n - 3], tbottom_zs[n - 2], tbottom_zs[n - 1]}};
                    return out;
                }
            }
        }
    }
    out.kind = FlowOutcome::Kind::Undetermined;
    return out;
}

std::optional<HolonomyImage> pl_holonomy_closed_form(const PLFold& fold, double entry_t, BasePoint entry_w) {
    const double s0 = fold.s0();
    const double es = std::exp(s0);
    const double zm = fold.z0_model();
    const double t0 = fold.t0;
    switch (fold.kind) {
        case FoldKind::BoxFold: {
            if (fold.base) {
                if (!(zm >= es * t0 - 1e-12))
                    throw std::invalid_argument("closed-form holonomy over a base requires z0 >= e^{s0} t0");
                if (entry_t <= 0 || entry_t >= std::exp(-s0) * t0) return std::nullopt;
                if (in_collar(*fold.base, entry_w, s0)) return std::nullopt;
                BasePoint w = liouville_flow_base(*fold.base, entry_w, s0).point;
                return HolonomyImage{es * entry_t, w};
            }
            double m = std::min(zm, t0);
            if (entry_t > 0 && entry_t < std::exp(-s0) * m) return HolonomyImage{es * entry_t, {}};
            if (entry_t > std::exp(-s0) * m && entry_t < t0 - (1 - std::exp(-s0)) * m)
                return HolonomyImage{entry_t + (1 - std::exp(-s0)) * zm, {}};
            return std::nullopt;
        }
        case FoldKind::BoxHole: {
            if (fold.base) {
                if (!(zm >= es * t0 - 1e-12))
                    throw std::invalid_argument("closed-form holonomy over a base requires z0 >= e^{s0} t0");
                if (entry_t <= (1 - std::exp(-s0)) * t0 || entry_t >= t0) return std::nullopt;
                if (in_collar(*fold.base, entry_w, s0)) return std::nullopt;
                BasePoint w = liouville_flow_base(*fold.base, entry_w, s0).point;
                return HolonomyImage{t0 - es * (t0 - entry_t), w};
            }
            // Mirror conjugate of the two-branch fold formula.
            double m = std::min(zm, t0);
            double u = t0 - entry_t;
            if (u > 0 && u < std::exp(-s0) * m) return HolonomyImage{t0 - es * u, {}};
            if (u > std::exp(-s0) * m && u < t0 - (1 - std::exp(-s0)) * m)
                return HolonomyImage{entry_t - (1 - std::exp(-s0)) * zm, {}};
            return std::nullopt;
        }
        default:
            throw std::invalid_argument("closed-form holonomy only defined for box folds and box holes");
    }
}

bool pl_trap_region(const PLFold& fold, double entry_t, BasePoint entry_w) {
    const double s0 = fold.s0();
    const double zm = fold.z0_model();
    const double t0 = fold.t0;
    switch (fold.kind) {
        case FoldKind::BoxFold: {
            if (fold.base) {
                if (!(zm >= std::exp(s0) * t0 - 1e-12))
                    throw std::invalid_argument("trap predicate over a base requires z0 >= e^{s0} t0");
                return (entry_t > std::exp(-s0) * t0 && entry_t < t0) ||
                       in_collar(*fold.base, entry_w, s0);
            }
            double m = std::min(zm, t0);
            return entry_t > t0 - (1 - std::exp(-s0)) * m && entry_t < t0;
        }
        case FoldKind::BoxHole: {
            if (fold.base) {
                if (!(zm >= std::exp(s0) * t0 - 1e-12))
                    throw std::invalid_argument("trap predicate over a base requires z0 >= e^{s0} t0");
                return (entry_t > 0 && entry_t < (1 - std::exp(-s0)) * t0) ||
                       in_collar(*fold.base, entry_w, s0);
            }
            double m = std::min(zm, t0);
            return entry_t > 0 && entry_t < (1 - std::exp(-s0)) * m;
        }
        case FoldKind::PreChimney: {
            const auto& strip = std::get<ExactStrip>(*fold.base);
            if (!(zm >= std::exp(s0) * t0 - 1e-12))
                throw std::invalid_argument("pre-chimney trap region requires z0 >= e^{s0} t0");
            double th0 = strip.theta_len;
            bool inside_r = entry_w.a > strip.r_lo && entry_w.a < strip.r_hi;
            bool band_theta = entry_w.b > std::exp(-s0) * th0 && entry_w.b < th0;
            bool band_t = entry_t > std::exp(-s0) * t0 && entry_t < t0;
            bool in_t = entry_t > 0 && entry_t < t0;
            bool in_theta = entry_w.b > 0 && entry_w.b < th0;
            return inside_r && ((in_t && band_theta) || (band_t && in_theta));
        }
        case FoldKind::Chimney:
            return entry_t > 0 && entry_t < fold.t0 && chimney_contains(fold, entry_w, 1e-12);
    }
    return false;
}

std::string trace_to_csv(const TraceLog& log) {
    CsvWriter csv({"event", "face", "z", "s", "t", "base_a", "base_b"});
    for (size_t i = 0; i < log.states.size(); ++i) {
        const auto& st = log.states[i];
        csv.row({std::to_string(i), face_name(st.face), num_str(st.z), num_str(st.s), num_str(st.t),
                 num_str(st.w.a), num_str(st.w.b)});
    }
    return csv.str();
}

std::string trace_to_svg(const PLFold& fold, const TraceLog& log) {
    double zmax = fold.kind == FoldKind::BoxHole ? 0 : fold.z0;
    double zmin = fold.kind == FoldKind::BoxHole ? -fold.z0 : 0;
    SvgCanvas tz(-0.05 * fold.t0, zmin - 0.05 * fold.z0, 1.05 * fold.t0, zmax + 0.05 * fold.z0, 560, 420);
    tz.frame();
    std::vector<std::pair<double, double>> pts;
    for (const auto& st : log.states) pts.push_back({st.t, st.z});
    tz.polyline(pts, "crimson", 1.2);
    if (!pts.empty()) tz.circle(pts.front().first, pts.front().second, 3, "black");
    tz.text_px(8, 14, "(t, z) projection");
    if (!fold.base) return tz.str();

    double ext = 1;
    if (auto* d = std::get_if<Disk>(&*fold.base)) ext = d->r0;
    if (auto* td = std::get_if<TiltedDisk>(&*fold.base))
        ext = std::max(td->p1, std::max(td->q_minus, td->q_plus));
    if (auto* strip = std::get_if<ExactStrip>(&*fold.base))
        ext = std::max(std::abs(strip->r_lo), strip->theta_len);
    SvgCanvas bw(-1.1 * ext, -1.1 * ext, 1.1 * ext, 1.1 * ext, 420, 420);
    bw.frame();
    std::vector<std::pair<double, double>> bpts;
    for (const auto& st : log.states) bpts.push_back({st.w.a, st.w.b});
    bw.polyline(bpts, "steelblue", 1.2);
    bw.text_px(8, 14, "base projection");
    // Stack the two panels in one document.
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"860\">\n";
    out << "<g>" << strip_svg_tag(tz.str()) << "</g>\n";
    out << "<g transform=\"translate(70,430)\">" << strip_svg_tag(bw.str()) << "</g>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace liouville
