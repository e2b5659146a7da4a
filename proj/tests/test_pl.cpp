#include <cmath>

#include "doctest.h"
#include "liouville/pl_fold.hpp"

using namespace liouville;

namespace {
const double LN2 = std::log(2.0);

PLFold model_chimney(double t_minus = 0.3, double gamma_len = 0.25, double gamma_lo = 3.0) {
    PLFold f;
    f.kind = FoldKind::Chimney;
    f.base = Disk{2.0};
    f.s_lo = 0;
    f.s_hi = LN2;
    f.t0 = 1.0;
    f.t_minus = t_minus;
    f.z0 = std::exp(f.s_hi) * f.t0;  // chimney exactness z0 = e^{s0} t0
    f.chimney = ChimneySpec{gamma_lo, gamma_len, 0.05 * f.s0()};
    return f;
}

BasePoint chimney_point(const PLFold& f, double rc, double urel) {
    const auto& spec = *f.chimney;
    BoundaryLoop loop = boundary_loop(*f.base, {2.0, 0.0});
    BasePoint bp = loop.at_time(spec.gamma_lo + urel * spec.gamma_len);
    return liouville_flow_base(*f.base, bp, rc).point;
}
}  // namespace

TEST_CASE("face foliation table") {
    PLFold f = make_box_fold(LN2, 1.0, 2.0);
    FaceState st;

    auto shi = face_foliation(f, FaceId::SHi, st);
    CHECK(shi.dt == doctest::Approx(-1.0));
    CHECK(shi.dz == doctest::Approx(2.0));

    auto ztop = face_foliation(f, FaceId::ZFace, st);
    CHECK(ztop.ds == doctest::Approx(-1.0));
    CHECK(ztop.dz == 0.0);
    CHECK(ztop.dt == 0.0);

    auto slo = face_foliation(f, FaceId::SLo, st);
    CHECK(slo.dt == doctest::Approx(1.0));
    CHECK(slo.dz == doctest::Approx(-1.0));

    PLFold ch = model_chimney();
    auto wall = face_foliation(ch, FaceId::WBdry, st);
    CHECK(wall.dt == doctest::Approx(1.0));
    CHECK(wall.base_motion == FaceField::BaseMotion::ReebBwd);
    CHECK(wall.base_rate == doctest::Approx(1.0));
    // Reeb speed on the disk boundary is 2/r0^2 in angle per unit time.
    auto moved = reeb_boundary_holonomy(*ch.base, {2.0, 0.0}, 1.0);
    CHECK(std::atan2(moved.b, moved.a) == doctest::Approx(-2.0 / 4.0).epsilon(1e-12));

    CHECK_THROWS(face_foliation(f, FaceId::CInnerWall, st));
}

TEST_CASE("pl_step events") {
    PLFold f = make_box_fold(LN2, 1.0, 2.0);
    FaceState st{FaceId::SHi, 0.0, f.s_hi, 0.25, {}};
    auto r = pl_step(f, st);
    CHECK(!r.exited);
    CHECK(r.next.face == FaceId::TBottom);
    CHECK(r.next.z == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.next.t == 0.0);

    FaceState zf{FaceId::ZFace, f.z0, 0.4, 0.7, {}};
    auto r2 = pl_step(f, zf);
    CHECK(r2.next.face == FaceId::SLo);
    CHECK(r2.next.s == f.s_lo);
    CHECK(r2.next.t == doctest::Approx(0.7));
    CHECK(r2.next.z == doctest::Approx(f.z0));

    // Box-hole mirror of the first event under (t, z) -> (t0 - t, -z).
    PLFold h = make_box_hole(LN2, 1.0, 2.0);
    FaceState sh{FaceId::SHi, 0.0, h.s_hi, 0.75, {}};
    auto rh = pl_step(h, sh);
    CHECK(rh.next.face == FaceId::TTop);
    CHECK(rh.next.z == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(rh.next.t == doctest::Approx(1.0));
}

TEST_CASE("2-D box fold trace and closed form") {
    PLFold f = make_box_fold(LN2, 1.0, 2.0);

    auto trapped = pl_trace(f, 0.75);
    CHECK(trapped.kind == FlowOutcome::Kind::Trapped);
    CHECK(trapped.cert.kind == "z-spiral");

    auto exit = pl_trace(f, 0.25);
    CHECK(exit.kind == FlowOutcome::Kind::Exit);
    CHECK(exit.exit_t == doctest::Approx(0.5).epsilon(1e-12));

    auto cf = pl_holonomy_closed_form(f, 0.25);
    REQUIRE(cf.has_value());
    CHECK(cf->t == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(!pl_holonomy_closed_form(f, 0.75).has_value());
    CHECK(pl_trap_region(f, 0.6));
    CHECK(!pl_trap_region(f, 0.4));

    // Oracle equivalence across 1000 uniform entries.
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(1e-4, 1.0 - 1e-4);
        if (std::abs(t - 0.5) < 1e-9) continue;  // region edge
        auto tr = pl_trace(f, t);
        auto oracle = pl_holonomy_closed_form(f, t);
        if (oracle) {
            REQUIRE(tr.kind == FlowOutcome::Kind::Exit);
            CHECK(std::abs(tr.exit_t - oracle->t) < 1e-9);
        } else {
            CHECK(tr.kind == FlowOutcome::Kind::Trapped);
            CHECK(pl_trap_region(f, t));
        }
    }
}

TEST_CASE("two-branch holonomy for z0 < t0") {
    PLFold f = make_box_fold(LN2, 1.0, 0.4);
    Rng rng(29);
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(1e-4, 1.0 - 1e-4);
        if (std::abs(t - 0.2) < 1e-9 || std::abs(t - 0.8) < 1e-9) continue;
        auto tr = pl_trace(f, t);
        auto oracle = pl_holonomy_closed_form(f, t);
        if (oracle) {
            REQUIRE(tr.kind == FlowOutcome::Kind::Exit);
            CHECK(std::abs(tr.exit_t - oracle->t) < 1e-9);
        } else {
            CHECK(tr.kind == FlowOutcome::Kind::Trapped);
        }
    }
    // Branch values: h(t) = 2t below 0.2, t + 0.2 on (0.2, 0.8).
    CHECK(pl_holonomy_closed_form(f, 0.1)->t == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(pl_holonomy_closed_form(f, 0.5)->t == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("box hole mirrors the box fold event-for-event") {
    PLFold fold = make_box_fold(LN2, 1.0, 1.0);
    PLFold hole = make_box_hole(LN2, 1.0, 1.0);
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        double t = rng.uniform(1e-3, 1.0 - 1e-3);
        TraceLog lf, lh;
        auto of = pl_trace(fold, 1.0 - t, {}, &lf);
        auto oh = pl_trace(hole, t, {}, &lh);
        CHECK(of.kind == oh.kind);
        REQUIRE(lf.states.size() == lh.states.size());
        for (size_t k = 0; k < lf.states.size(); ++k) {
            const auto& a = lf.states[k];
            const auto& b = lh.states[k];
            CHECK(std::abs((1.0 - a.t) - b.t) < 1e-10);
            CHECK(std::abs((-a.z) - b.z) < 1e-10);
            CHECK(a.s == doctest::Approx(b.s));
        }
        if (of.kind == FlowOutcome::Kind::Exit) CHECK(std::abs((1.0 - of.exit_t) - oh.exit_t) < 1e-10);
    }

    // Mirror-conjugate holonomy formula; the verbatim printed formula
    // t0 - e^{s0} (t - t0) does not match the face walker (golden check).
    double t = 0.75;
    auto tr = pl_trace(hole, t);
    REQUIRE(tr.kind == FlowOutcome::Kind::Exit);
    CHECK(tr.exit_t == doctest::Approx(0.5).epsilon(1e-12));  // t0 - e^{s0}(t0 - t)
    double printed = box_hole_printed_formula(LN2, 1.0, t);
    CHECK(printed == doctest::Approx(1.5));
    CHECK(std::abs(printed - tr.exit_t) > 0.5);  // discrepancy documented
}

TEST_CASE("shift invariance of the holonomy") {
    double s1 = 0.8;
    PLFold base_fold = make_box_fold(LN2, 1.0, 2.0);
    PLFold shifted = make_box_fold(LN2, 1.0, 2.0 * std::exp(s1), std::nullopt, s1);
    Rng rng(37);
    for (int i = 0; i < 300; ++i) {
        double t = rng.uniform(1e-3, 1.0 - 1e-3);
        if (std::abs(t - 0.5) < 1e-9) continue;
        auto a = pl_trace(base_fold, t);
        auto b = pl_trace(shifted, t);
        CHECK(a.kind == b.kind);
        if (a.kind == FlowOutcome::Kind::Exit) CHECK(std::abs(a.exit_t - b.exit_t) < 1e-9);
    }
}

TEST_CASE("high-dimensional box fold over a disk") {
    Disk disk{2.0};
    PLFold f = make_box_fold(LN2, 1.0, 2.0 * std::exp(LN2) * 1.0, disk);  // z0 = e^{s0} t0 * 2
    Rng rng(41);
    for (int i = 0; i < 400; ++i) {
        double t = rng.uniform(1e-3, 1.0 - 1e-3);
        double rho = 2.0 * std::sqrt(rng.uniform()) * 0.999;
        double th = rng.uniform(0, 2 * M_PI);
        BasePoint w{rho * std::cos(th), rho * std::sin(th)};
        bool edge = std::abs(t - 0.5) < 1e-6 ||
                    std::abs(norm_w(disk, w) - std::exp(-LN2)) < 1e-6;
        if (edge) continue;
        auto tr = pl_trace(f, t, w);
        auto oracle = pl_holonomy_closed_form(f, t, w);
        bool trap_pred = pl_trap_region(f, t, w);
        if (oracle) {
            REQUIRE(tr.kind == FlowOutcome::Kind::Exit);
            CHECK(std::abs(tr.exit_t - 2.0 * t) < 1e-9);
            auto img = liouville_flow_base(disk, w, LN2);
            CHECK(std::abs(tr.exit_w.a - img.point.a) < 1e-9);
            CHECK(std::abs(tr.exit_w.b - img.point.b) < 1e-9);
            CHECK(!trap_pred);
        } else {
            CHECK(tr.kind == FlowOutcome::Kind::Trapped);
            CHECK(trap_pred);
        }
    }
}

TEST_CASE("pre-chimney trap region") {
    // Canonical pre-chimney geometry: the strip is the depth-s0 collar of a
    // boundary arc and theta_len = t0, where the displayed region is exact.
    ExactStrip strip{-LN2, 0.0, 1.0};
    PLFold f = make_pre_chimney(LN2, 1.0, 2.0, strip);
    CHECK(pl_trap_region(f, 0.3, {-0.5, 0.8}));   // theta band
    CHECK(pl_trap_region(f, 0.8, {-0.5, 0.2}));   // t band
    CHECK(!pl_trap_region(f, 0.3, {-0.5, 0.2}));  // pass region

    Rng rng(43);
    int agree = 0, total = 0;
    for (int i = 0; i < 600; ++i) {
        double t = rng.uniform(0.01, 0.99);
        double r = rng.uniform(-LN2 + 0.01, -0.01);
        double th = rng.uniform(0.01, 0.99);
        // Skip the region edges where the predicate flips.
        if (std::abs(t - 0.5) < 5e-3 || std::abs(th - 0.5) < 5e-3) continue;
        auto tr = pl_trace(f, t, {r, th});
        bool pred = pl_trap_region(f, t, {r, th});
        bool trapped = tr.kind == FlowOutcome::Kind::Trapped;
        ++total;
        if (trapped == pred) ++agree;
    }
    CHECK(total > 400);
    CHECK(static_cast<double>(agree) / total >= 0.995);
}

TEST_CASE("chimney traps its chimney region") {
    PLFold f = model_chimney();
    Rng rng(47);
    for (int i = 0; i < 300; ++i) {
        double t = rng.uniform(0.01, 0.99);
        double rc = rng.uniform(f.collar_lo() + 0.01, -0.01);
        double ur = rng.uniform(0.02, 0.98);
        BasePoint w = chimney_point(f, rc, ur);
        CHECK(chimney_contains(f, w));
        auto tr = pl_trace(f, t, w);
        CHECK(tr.kind == FlowOutcome::Kind::Trapped);
        CHECK(pl_trap_region(f, t, w));
    }

    // Certificates replay deterministically.
    BasePoint w = chimney_point(f, -0.3, 0.5);
    auto a = pl_trace(f, 0.5, w);
    auto b = pl_trace(f, 0.5, w);
    REQUIRE(a.kind == FlowOutcome::Kind::Trapped);
    CHECK(a.cert.kind == b.cert.kind);
    REQUIRE(a.cert.marks.size() == b.cert.marks.size());
    for (size_t k = 0; k < a.cert.marks.size(); ++k) CHECK(a.cert.marks[k] == b.cert.marks[k]);
}

TEST_CASE("trace exports") {
    PLFold f = make_box_fold(LN2, 1.0, 2.0, Disk{2.0});
    TraceLog log;
    pl_trace(f, 0.25, {0.3, 0.2}, &log);
    std::string csv = trace_to_csv(log);
    CHECK(csv.find("event,face,z,s,t") == 0);
    CHECK(csv.find("s=hi") != std::string::npos);
    std::string svg = trace_to_svg(f, log);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);
}
