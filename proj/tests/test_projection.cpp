#include <doctest.h>

#include <cmath>
#include <random>

#include "cmot/projection.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cmot;

namespace {

double dist(const PairPoint& p, const PairPoint& q) {
    return std::sqrt((p.a - q.a) * (p.a - q.a) + (p.b[0] - q.b[0]) * (p.b[0] - q.b[0]) +
                     (p.b[1] - q.b[1]) * (p.b[1] - q.b[1]));
}

double excess(const PairPoint& p) { return p.a + 0.5 * (p.b[0] * p.b[0] + p.b[1] * p.b[1]); }

PairPoint random_point(std::mt19937_64& rng, double range) {
    std::uniform_real_distribution<double> d(-range, range);
    return {d(rng), {d(rng), d(rng)}};
}

}  // namespace

TEST_CASE("projection worked examples") {
    PairPoint p = project_k({1.0, {0.0, 0.0}});
    CHECK(p.a == doctest::Approx(0.0));
    CHECK(p.b[0] == 0.0);
    CHECK(projection_multiplier({1.0, {0.0, 0.0}}) == doctest::Approx(2.0));

    PairPoint q = project_k({0.5, {1.0, 0.0}});
    CHECK(q.a == doctest::Approx(-0.1777).epsilon(1e-3));
    CHECK(q.b[0] == doctest::Approx(0.5961).epsilon(1e-3));
    CHECK(q.b[1] == 0.0);
    const double t = projection_multiplier({0.5, {1.0, 0.0}});
    CHECK(t == doctest::Approx(1.6776).epsilon(1e-4));
    CHECK(std::abs(t * t * t - 1.5 * t * t - 0.5) < 1e-12);

    PairPoint inside{-1.0, {0.5, 0.5}};
    PairPoint r = project_k(inside);
    CHECK(r.a == inside.a);
    CHECK(r.b == inside.b);

    PairPoint boundary{-0.5, {1.0, 0.0}};
    PairPoint s = project_k(boundary);
    CHECK(s.a == boundary.a);
    CHECK(s.b == boundary.b);
}

TEST_CASE("projection properties on random points") {
    std::mt19937_64 rng(31);
    for (int n = 0; n < 2000; ++n) {
        const double range = n < 1000 ? 10.0 : 1e-3;
        PairPoint p = random_point(rng, range);
        PairPoint q = random_point(rng, range);
        PairPoint pp = project_k(p), pq = project_k(q);
        CHECK(excess(pp) <= 1e-12 * std::max(1.0, std::abs(pp.a)));
        PairPoint ppp = project_k(pp);
        CHECK(dist(ppp, pp) <= 1e-12 * std::max(1.0, std::abs(pp.a)));
        CHECK(dist(pp, pq) <= dist(p, q) * (1.0 + 1e-12));
        // b* is a nonnegative multiple of b
        CHECK(pp.b[0] * p.b[0] >= 0.0);
        CHECK(pp.b[1] * p.b[1] >= 0.0);
        CHECK(std::abs(pp.b[0] * p.b[1] - pp.b[1] * p.b[0]) <= 1e-12 * (1.0 + std::abs(p.b[0] * p.b[1])));
        // the cubic is satisfied at the returned multiplier
        if (excess(p) > 0.0) {
            const double t = projection_multiplier(p);
            const double b2 = p.b[0] * p.b[0] + p.b[1] * p.b[1];
            CHECK(t >= 1.0);
            CHECK(std::abs(t * t * t - (p.a + 1) * t * t - 0.5 * b2) <= 1e-12 * std::max(1.0, t * t * t));
        }
    }
}

TEST_CASE("projection agrees with the KKT bisection oracle") {
    std::mt19937_64 rng(32);
    for (int n = 0; n < 500; ++n) {
        PairPoint p = random_point(rng, 10.0);
        PairPoint q = project_k(p);
        oracle::Point3 o = oracle::kkt_projection({p.a, p.b});
        CHECK(std::abs(q.a - o.a) < 1e-9 * std::max(1.0, std::abs(o.a)));
        CHECK(std::abs(q.b[0] - o.b[0]) < 1e-9);
        CHECK(std::abs(q.b[1] - o.b[1]) < 1e-9);
    }
}

TEST_CASE("solve_q is the pointwise projection of b + eta/r") {
    std::mt19937_64 rng(33);
    GridSpec g = GridSpec::make(5, 4, 3, SpaceBc::Periodic);
    PairField b = testutil::random_pair(g, rng, -3, 3), eta = testutil::random_pair(g, rng, -3, 3);
    const double r = 1.7;
    PairField q = solve_q(b, eta, r);
    for (std::size_t n = 0; n < g.slot_count(); ++n) {
        PairPoint in{b.scalar()[n] + eta.scalar()[n] / r,
                     {b.vector(0)[n] + eta.vector(0)[n] / r, b.vector(1)[n] + eta.vector(1)[n] / r}};
        PairPoint ref = project_k(in);
        CHECK(q.scalar()[n] == ref.a);
        CHECK(q.vector(0)[n] == ref.b[0]);
        CHECK(q.vector(1)[n] == ref.b[1]);
    }
}

TEST_CASE("solve_q trivial cases") {
    GridSpec g = GridSpec::make(4, 3, 3, SpaceBc::Neumann);
    PairField b(g), eta(g);
    for (std::size_t n = 0; n < g.slot_count(); ++n) {
        b.scalar()[n] = -2.0;
        b.vector(0)[n] = 0.5;
        b.vector(1)[n] = -1.0;
    }
    PairField q = solve_q(b, eta, 1.0);
    CHECK(q.data == b.data);

    PairField c(g);
    for (std::size_t n = 0; n < g.slot_count(); ++n) {
        c.scalar()[n] = 0.5;
        c.vector(0)[n] = 1.0;
    }
    PairField q2 = solve_q(c, eta, 1.0);
    PairPoint ref = project_k({0.5, {1.0, 0.0}});
    for (std::size_t n = 0; n < g.slot_count(); ++n) {
        CHECK(q2.scalar()[n] == ref.a);
        CHECK(q2.vector(0)[n] == ref.b[0]);
    }
}

TEST_CASE("grid search oracle sanity") {
    auto a = oracle::projection_grid_search({1.0, {0.0, 0.0}}, 1e-4);
    CHECK(std::abs(a.a) < 1e-4);
    auto b = oracle::projection_grid_search({0.5, {1.0, 0.0}}, 1e-4);
    CHECK(b.a == doctest::Approx(-0.178).epsilon(2e-3));
    CHECK(b.b[0] == doctest::Approx(0.596).epsilon(2e-3));
    auto c = oracle::projection_grid_search({-1.0, {0.2, 0.1}}, 1e-4);
    CHECK(c.a == -1.0);
}
