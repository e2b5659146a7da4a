#include <cmath>

#include "doctest.h"
#include "liouville/geometry.hpp"

using namespace liouville;

namespace {

std::vector<WeinsteinBase> sample_bases() {
    return {
        Disk{1.0},
        Disk{2.0},
        ExactStrip{-1.0, 0.0, 1.5},
        TiltedDisk{0.3, 1.0, 1.0, 0.2},
        TiltedDisk{0.1, 0.5, 0.4, 0.05},
        AnnulusBand{0.1, 1.0},
        AnnulusBand{-0.4, 2.0},
    };
}

BasePoint random_interior(const WeinsteinBase& base, Rng& rng) {
    for (int k = 0; k < 200; ++k) {
        BasePoint x;
        if (auto* d = std::get_if<Disk>(&base)) {
            double r = d->r0 * std::sqrt(rng.uniform()) * 0.98;
            double th = rng.uniform(0, 2 * M_PI);
            x = {r * std::cos(th), r * std::sin(th)};
        } else if (auto* s = std::get_if<ExactStrip>(&base)) {
            x = {rng.uniform(s->r_lo + 0.01, s->r_hi - 0.01), rng.uniform(0.01, s->theta_len - 0.01)};
        } else if (auto* t = std::get_if<TiltedDisk>(&base)) {
            x = {rng.uniform(-t->p1, t->p1) * 0.98, rng.uniform(-t->q_minus, t->q_plus) * 0.98};
        } else {
            auto* a = std::get_if<AnnulusBand>(&base);
            x = {rng.uniform(0, a->theta_len), rng.uniform(-0.98, 0.98)};
        }
        if (contains(base, x)) return x;
    }
    return {};
}

}  // namespace

TEST_CASE("closed-form flows match the displayed formulas") {
    // Tilted base, e^{s/2} = 2.
    TiltedDisk td{0.3, 1.0, 1.0, 0.8};
    auto fr = liouville_flow_base(td, {0.1, 0.0}, std::log(4.0));
    CHECK(!fr.exited);
    CHECK(fr.point.a == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(fr.point.b == doctest::Approx(0.6).epsilon(1e-14));

    // Identity at s = 0.
    for (const auto& base : sample_bases()) {
        Rng rng(7);
        BasePoint x = random_interior(base, rng);
        auto id = liouville_flow_base(base, x, 0.0);
        CHECK(id.point.a == doctest::Approx(x.a).epsilon(1e-15));
        CHECK(id.point.b == doctest::Approx(x.b).epsilon(1e-15));
    }

    // Disk backward flow: solve r e^{s/2}.
    auto bk = liouville_flow_base(Disk{1.0}, {0.8, 0.0}, -2 * std::log(2.0));
    CHECK(bk.point.a == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(bk.point.b == doctest::Approx(0.0));

    // Exits are flagged, not clamped silently.
    auto ex = liouville_flow_base(Disk{1.0}, {0.5, 0.0}, 10.0);
    CHECK(ex.exited);
    CHECK(ex.exit_time == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
    CHECK(norm_stab(ex.point.a, ex.point.b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flow group law psi^{a+b} = psi^a o psi^b") {
    Rng rng(11);
    auto bases = sample_bases();
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& base = bases[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(bases.size()) - 1))];
        BasePoint x = random_interior(base, rng);
        double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5);
        auto fab = liouville_flow_base(base, x, a + b);
        auto fb = liouville_flow_base(base, x, b);
        if (fb.exited || fab.exited) continue;
        auto fa = liouville_flow_base(base, fb.point, a);
        if (fa.exited) continue;
        CHECK(std::abs(fa.point.a - fab.point.a) < 1e-12);
        CHECK(std::abs(fa.point.b - fab.point.b) < 1e-12);
        ++checked;
    }
    CHECK(checked > 700);
}

TEST_CASE("norm_w values and covariance") {
    CHECK(norm_w(Disk{1.0}, {0.5, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(norm_w(Disk{2.0}, {2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm_w(Disk{2.0}, {0.0, 0.0}) == 0.0);
    CHECK(norm_w(TiltedDisk{0.3, 1, 1, 0.2}, {0.0, -0.6}) == 0.0);
    CHECK(norm_w(AnnulusBand{0.1, 1.0}, {0.3, 0.1}) == 0.0);

    Rng rng(13);
    auto bases = sample_bases();
    for (int i = 0; i < 1000; ++i) {
        const auto& base = bases[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(bases.size()) - 1))];
        BasePoint x = random_interior(base, rng);
        double s = rng.uniform(-1.0, 1.0);
        auto f = liouville_flow_base(base, x, s);
        if (f.exited) continue;
        double lhs = norm_w(base, f.point);
        double rhs = std::exp(s) * norm_w(base, x);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("norm_stab basics") {
    CHECK(norm_stab(3, 4) == doctest::Approx(5.0));
    CHECK(norm_stab(0, 0) == 0.0);
    double s = 0.7, p = 0.3, q = -1.1;
    CHECK(norm_stab(std::exp(s / 2) * p, std::exp(s / 2) * q) ==
          doctest::Approx(std::exp(s / 2) * norm_stab(p, q)).epsilon(1e-14));
}

TEST_CASE("in_collar") {
    CHECK(!in_collar(Disk{1.0}, {0.5, 0.0}, std::log(2.0)));  // 0.25 <= 0.5
    CHECK(in_collar(Disk{1.0}, {1.0, 0.0}, 0.01));            // boundary
    CHECK(!in_collar(Disk{1.0}, {0.0, 0.0}, 100.0));          // skeleton
}

TEST_CASE("tilted fixed point q_+ identity") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        double c1 = rng.uniform(0.05, 0.8);
        double s1 = rng.uniform(0.1, 2.0);
        double e = std::exp(-s1 / 2);
        double qp = 2 * c1 * (1 - e) / (1 + e);
        TiltedDisk td{c1, 1.0, 3 * c1, qp + 0.1};
        auto f = liouville_flow_base(td, {0.0, qp}, -s1);
        CHECK(!f.exited);
        CHECK(std::abs(f.point.b - (-qp)) < 1e-12);
    }
}

TEST_CASE("boundary Reeb holonomy") {
    Disk d2{2.0};
    BasePoint p = {2 * std::cos(1.0), 2 * std::sin(1.0)};
    auto h = reeb_boundary_holonomy(d2, p, 0.1);
    double th = std::atan2(h.b, h.a);
    CHECK(th == doctest::Approx(0.95).epsilon(1e-12));

    auto id = reeb_boundary_holonomy(d2, p, 0.0);
    CHECK(id.a == doctest::Approx(p.a).epsilon(1e-12));
    CHECK(id.b == doctest::Approx(p.b).epsilon(1e-12));

    // Full period of the boundary Reeb orbit: 2 pi r0^2 / 2.
    auto loop = reeb_boundary_holonomy(d2, {2.0, 0.0}, 4 * M_PI);
    CHECK(loop.a == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(loop.b) < 1e-9);

    // Composition h(t1 + t2) = h(t2) o h(t1), including across corners.
    TiltedDisk td{0.3, 1.0, 1.0, 0.2};
    BasePoint corner_near = {1.0, 0.15};
    double t1 = 0.21, t2 = 0.34;
    auto a = reeb_boundary_holonomy(td, reeb_boundary_holonomy(td, corner_near, t1), t2);
    auto b = reeb_boundary_holonomy(td, corner_near, t1 + t2);
    CHECK(std::abs(a.a - b.a) < 1e-12);
    CHECK(std::abs(a.b - b.b) < 1e-12);
}

TEST_CASE("base config round trip") {
    for (const auto& base : sample_bases()) {
        ConfigMap cfg = base_to_config(base);
        WeinsteinBase back = base_from_config(ConfigMap::parse(cfg.serialize()));
        CHECK(base_kind_name(back) == base_kind_name(base));
        Rng rng(3);
        BasePoint x = random_interior(base, rng);
        CHECK(norm_w(back, x) == doctest::Approx(norm_w(base, x)).epsilon(1e-14));
    }
    CHECK_THROWS(base_from_config(ConfigMap::parse("kind=annulus\ntau0=0\n")));
}
