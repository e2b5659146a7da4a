#include <cmath>

#include "doctest.h"
#include "liouville/audit.hpp"

using namespace liouville;

TEST_CASE("broken loop detection on synthetic graphs") {
    CriticalGraph g;
    g.nodes = 3;
    g.edges = {{0, 1}, {1, 2}};
    auto lc = broken_loop_check(g);
    CHECK(lc.acyclic);

    g.edges.push_back({2, 1});  // planted cycle 1 -> 2 -> 1
    auto lc2 = broken_loop_check(g);
    CHECK(!lc2.acyclic);
    REQUIRE(lc2.cycle.size() == 2);
    CHECK(lc2.cycle[0] == 1);
    CHECK(lc2.cycle[1] == 2);

    CriticalGraph empty;
    CHECK(broken_loop_check(empty).acyclic);
}

TEST_CASE("toy cylinder before and after the fold") {
    ToyCylinder toy;
    CHECK(toy.census().empty());

    IntegratorControls ctl;
    ctl.budget = 60;
    Rng rng(31);
    auto none = toy.census();
    for (int i = 0; i < 15; ++i) {
        Vec x(2);
        x[0] = rng.uniform(0.0, toy.x_len);
        x[1] = rng.uniform(-0.9, 0.9);
        auto lim = backward_limit(toy, none, x, ctl);
        CHECK(lim.kind != LimitKind::Trapped);  // closed-orbit skeleton: no zeros
    }

    toy.folded = true;
    auto cps = toy.census();
    REQUIRE(cps.size() == 2);
    CHECK(cps[0].morse_index == 0);
    CHECK(cps[1].morse_index == 1);

    ctl.budget = 400;
    int trapped = 0, total = 0;
    for (int i = 0; i < 40; ++i) {
        Vec x(2);
        x[0] = rng.uniform(0.0, toy.x_len);
        x[1] = rng.uniform(-0.9, 0.9);
        if (std::abs(x[1]) < 1e-3) continue;
        ++total;
        auto lim = backward_limit(toy, cps, x, ctl);
        if (lim.kind == LimitKind::Trapped) ++trapped;
    }
    CHECK(trapped == total);

    auto g = build_critical_graph(toy, cps, 32, 1e-4, ctl, 1);
    auto lc = broken_loop_check(g);
    CHECK(lc.acyclic);
    for (auto& [a, b] : g.edges) {  // only the saddle-to-sink connection can appear
        CHECK(a == 0);
        CHECK(b == 1);
    }

    std::string txt = graph_to_text(g, cps);
    CHECK(txt.find("index 0") != std::string::npos);
    std::string svg = graph_to_svg(g, cps);
    CHECK(svg.find("<svg") == 0);
}

TEST_CASE("stove predicates on the blocking apparatus") {
    auto P = std::get<BlockingApparatusParams>(
        choose_blocking_params(std::log(4.0), 1.0, 0.03, 0.05, 8.0));
    auto A = assemble_blocking_apparatus(P);
    CensusControls cc;
    cc.base_seeds = 5;
    auto cps = find_critical_points(A.region, cc);
    REQUIRE(cps.size() == 6);

    IntegratorControls ctl;
    ctl.budget = 4000;
    auto rep = stove_predicates(A, cps, 6, 10, 7, ctl);
    CHECK(rep.stove.size() == 4);
    CHECK(rep.trap_samples == 6);
    CHECK(rep.trap_to_stove == 6);
    CHECK(rep.trap_elsewhere == 0);
    CHECK(rep.fwd_violations == 0);

    // Degenerate classification input is rejected.
    BlockingApparatus broken = A;
    broken.params.delta1 = 0;
    CHECK_THROWS(stove_predicates(broken, cps, 1, 1, 7, ctl));
}

TEST_CASE("apparatus graph is acyclic at two seed densities") {
    auto P = std::get<BlockingApparatusParams>(
        choose_blocking_params(std::log(4.0), 1.0, 0.03, 0.05, 8.0));
    auto A = assemble_blocking_apparatus(P);
    CensusControls cc;
    cc.base_seeds = 5;
    auto cps = find_critical_points(A.region, cc);
    IntegratorControls ctl;
    ctl.budget = 60;
    auto g1 = build_critical_graph(A.region, cps, 8, 1e-4, ctl, 1);
    auto g2 = build_critical_graph(A.region, cps, 16, 1e-4, ctl, 1);
    CHECK(broken_loop_check(g1).acyclic);
    CHECK(broken_loop_check(g2).acyclic);
    for (auto& e : g1.edges) CHECK(g2.has_edge(e.first, e.second));
}
