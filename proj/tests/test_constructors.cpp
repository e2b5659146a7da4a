#include <cmath>

#include "doctest.h"
#include "liouville/constructors.hpp"
#include "liouville/critical.hpp"

using namespace liouville;

namespace {
const double LN4 = std::log(4.0);

BlockingApparatusParams default_params() {
    auto res = choose_blocking_params(LN4, 1.0, 0.03, 0.05, 8.0);
    REQUIRE(std::holds_alternative<BlockingApparatusParams>(res));
    return std::get<BlockingApparatusParams>(res);
}
}  // namespace

TEST_CASE("main assumption certificates") {
    Disk d2{2.0};  // boundary loop of Reeb period pi r0^2 = 4 pi
    auto cert = check_main_assumption(d2, 3.0, 0.25, 0.4, 1.0, LN4);
    CHECK(cert.n == 3);
    CHECK(cert.disjoint);
    CHECK(cert.iterate_arcs.size() == 3);
    CHECK(cert.iterate_arcs[0].first == doctest::Approx(2.6));

    // gamma spanning the full boundary circle overlaps itself at j = 1.
    auto full = check_main_assumption(d2, 0.0, 4 * M_PI, 0.4, 1.0, LN4);
    CHECK(!full.disjoint);
    CHECK(full.first_overlap == 1);

    // t_minus >= t0: a single displacement check.
    auto single = check_main_assumption(d2, 3.0, 0.25, 1.2, 1.0, LN4);
    CHECK(single.n == 1);
    CHECK(single.disjoint);

    // Wrapping overlap is caught exactly.
    auto wrapped = arc_certificate(1.0, 0.0, 0.3, 0.95, 0.9);
    CHECK(!wrapped.disjoint);
}

TEST_CASE("chimney region builder") {
    Disk d2{2.0};
    auto cert = check_main_assumption(d2, 3.0, 0.25, 0.3, 1.0, std::log(2.0));
    REQUIRE(cert.disjoint);
    PLFold f = build_chimney_region(d2, 3.0, 0.25, 0.05, std::log(2.0), 1.0, 0.3, cert);
    CHECK(f.kind == FoldKind::Chimney);
    CHECK(f.z0 == doctest::Approx(2.0));
    CHECK(chimney_contains(f, liouville_flow_base(d2, boundary_loop(d2, {2, 0}).at_time(3.1), -0.2).point));

    // Degenerate collar rejected.
    CHECK_THROWS(build_chimney_region(d2, 3.0, 0.25, 0.0, std::log(2.0), 1.0, 0.3, cert));
    // A proper subset of the certified arc is accepted.
    auto sub = check_main_assumption(d2, 3.05, 0.15, 0.3, 1.0, std::log(2.0));
    CHECK(sub.disjoint);
    PLFold fs = build_chimney_region(d2, 3.05, 0.15, 0.03, std::log(2.0), 1.0, 0.3, sub);
    CHECK(fs.chimney->gamma_len == doctest::Approx(0.15));
    // Invalid certificate rejected.
    auto bad = check_main_assumption(d2, 0.0, 4 * M_PI, 0.3, 1.0, std::log(2.0));
    CHECK_THROWS(build_chimney_region(d2, 0.0, 4 * M_PI, 0.05, std::log(2.0), 1.0, 0.3, bad));
}

TEST_CASE("q_+ fixed point identity") {
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        double c1 = rng.uniform(0.05, 0.8);
        double s1 = rng.uniform(0.1, 2.0);
        double qp = tilted_qplus(c1, s1);
        double img = std::exp(s1 / 2) * (-qp + 2 * c1) - 2 * c1;
        CHECK(std::abs(img - qp) < 1e-12);
    }
    CHECK(tilted_qplus(0.3, LN4) == doctest::Approx((2.0 / 3.0) * 0.3).epsilon(1e-14));
}

TEST_CASE("tilted cap base geometry") {
    TiltedCapBase W1(0.075, 0.1, 0.9, 0.01);
    for (double u : {0.001, 0.01, 0.03, 0.05, 0.09, 0.12, 0.15}) {
        double uu = wrap(u, W1.loop_total());
        BasePoint x = W1.at_time(uu);
        CHECK(W1.time_of(x) == doctest::Approx(uu).epsilon(1e-8));
    }
    CHECK(W1.cap_duration() ==
          doctest::Approx(M_PI * 0.01 * 0.01 / 2 + 2 * 0.075 * 0.01).epsilon(1e-14));
    BasePoint e = W1.exit_point({0, 0});
    CHECK(e.a == doctest::Approx(0.0));
    CHECK(e.b == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(W1.contains({0, -2 * 0.075}));
    CHECK(!W1.contains({0, 0.02}));
}

TEST_CASE("blocking parameter schedule") {
    BlockingApparatusParams P = default_params();
    CHECK(P.s1 + P.s2 < P.s0);
    CHECK(P.c1 * P.p1 < P.delta);
    CHECK(P.q1 > 2 * P.c1);
    CHECK(P.rho1 < 2 * P.c1);
    CHECK(P.t2 == doctest::Approx(0.5));
    CHECK(P.z2 < P.t2 / 2);
    CHECK(hole_trap_thickness(P) > 3 * P.delta1);
    CHECK(P.sigma2_lo + P.s2 < P.sigma1_lo);
    CHECK(P.crown > 0.5);
    auto [lo, hi] = stove_slab(P);
    CHECK(lo > 0);
    CHECK(hi < 3 * P.delta1);

    // Deterministic: identical inputs give bit-identical parameters.
    BlockingApparatusParams Q = default_params();
    CHECK(P.rho1 == Q.rho1);
    CHECK(P.q1 == Q.q1);
    CHECK(P.gamma_lo == Q.gamma_lo);
    CHECK(P.gamma_len == Q.gamma_len);
    CHECK(P.z2 == Q.z2);
    CHECK(P.tau == Q.tau);

    // Ambient radius below the reported minimum is infeasible.
    auto bad = choose_blocking_params(LN4, 1.0, 0.03, 0.05, 0.5 * P.min_r0);
    REQUIRE(std::holds_alternative<Infeasible>(bad));
    CHECK(std::get<Infeasible>(bad).constraint == "r2 bound");

    std::string text = explain_schedule(P);
    CHECK(text.find("slack") != std::string::npos);
}

TEST_CASE("assembled apparatus census and dynamics") {
    BlockingApparatusParams P = default_params();
    BlockingApparatus A = assemble_blocking_apparatus(P);
    REQUIRE(A.region.folds.size() == 2);

    CensusControls cc;
    cc.base_seeds = 5;
    auto cps = find_critical_points(A.region, cc);
    REQUIRE(cps.size() == 6);
    int counts[3] = {0, 0, 0};
    int stove_points = 0;
    bool lid_index2 = false;
    for (const auto& cp : cps) {
        CHECK(!cp.degenerate);
        REQUIRE(cp.morse_index <= 2);
        ++counts[cp.morse_index];
        if (cp.location[1] < 3 * P.delta1) ++stove_points;
        if (cp.morse_index == 2 && cp.location[1] > P.t_top - 3 * P.tau &&
            norm_stab(cp.location[2], cp.location[3]) < 1e-6)
            lid_index2 = true;
    }
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 3);
    CHECK(counts[2] == 1);
    CHECK(lid_index2);         // index-2 point at the top of the chimney, on the axis
    CHECK(stove_points == 4);  // the chimney stove pair plus the hole pair

    // Trap-neighborhood entries converge to stove points.
    IntegratorControls ctl;
    ctl.budget = 4000;
    Rng rng(23);
    for (int i = 0; i < 3; ++i) {
        double t = rng.uniform(P.delta, P.t0 - P.delta);
        Vec x = entry_state(A.region, t, 0.3 * P.rho1, -0.1 * P.rho1);
        auto out = integrate_flow(A.region, x, true, ctl);
        REQUIRE(out.kind == SmoothKind::Trapped);
        CHECK(out.end[1] < 3 * P.delta1);
    }

    // Overlapping sigma windows are rejected.
    BlockingApparatusParams bad = P;
    bad.sigma2_lo = P.sigma1_lo;
    CHECK_THROWS(assemble_blocking_apparatus(bad));
}
