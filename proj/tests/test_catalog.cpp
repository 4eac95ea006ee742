#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "convreg/catalog.hpp"
#include "convreg/json_io.hpp"

using namespace convreg;

namespace {

// test-only brute-force minimizer of g over [lo, hi], independent of prox
double grid_argmin(const std::function<double(double)>& g, double lo, double hi, int points = 200001) {
    double best = kInf, arg = lo;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double v = g(x);
        if (v < best) {
            best = v;
            arg = x;
        }
    }
    return arg;
}

FunPtr half_x2() { return ConvexFunctionSpec::quadratic({{1.0}}, {0.0}); }
FunPtr x2() { return ConvexFunctionSpec::quadratic({{2.0}}, {0.0}); }
FunPtr max0x() { return ConvexFunctionSpec::max_affine({{0.0}, {1.0}}, {0.0, 0.0}); }

}  // namespace

TEST_CASE("value on the catalog") {
    CHECK(value(*x2(), {3.0}) == 9.0);
    CHECK(value(*ConvexFunctionSpec::abs(), {-2.0}) == 2.0);
    CHECK(value(*ConvexFunctionSpec::indicator_box({0.0}, {1.0}), {2.0}) == kInf);
    CHECK(value(*ConvexFunctionSpec::indicator_box({0.0}, {1.0}), {0.5}) == 0.0);
    CHECK(value(*ConvexFunctionSpec::power_even(4), {2.0}) == 16.0);
    CHECK(value(*max0x(), {-3.0}) == 0.0);
    CHECK(value(*max0x(), {2.0}) == 2.0);
    const FunPtr sep = ConvexFunctionSpec::separable({ConvexFunctionSpec::abs(), ConvexFunctionSpec::abs()});
    CHECK(value(*sep, {1.0, -2.0}) == 3.0);
    CHECK(value(*ConvexFunctionSpec::tilted(x2(), {1.0}), {2.0}) == 4.0 - 2.0);
    CHECK_THROWS_AS(value(*x2(), Vec{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("construction guards") {
    CHECK_THROWS(ConvexFunctionSpec::quadratic({{-1.0}}, {0.0}));  // not PSD
    CHECK_THROWS(ConvexFunctionSpec::power_even(3));
    CHECK_THROWS(ConvexFunctionSpec::scaled(x2(), 0.0));
    CHECK_THROWS(ConvexFunctionSpec::sum(x2(), ConvexFunctionSpec::quadratic(identity(2), {0.0, 0.0})));
}

TEST_CASE("subdifferential rules") {
    const ConvexSet d_abs0 = subdifferential(*ConvexFunctionSpec::abs(), {0.0});
    REQUIRE(d_abs0.as<Box>());
    CHECK(d_abs0.as<Box>()->lo[0] == -1.0);
    CHECK(d_abs0.as<Box>()->hi[0] == 1.0);

    const ConvexSet d_max = subdifferential(*max0x(), {0.0});
    REQUIRE(d_max.as<Polytope>());
    CHECK(d_max.as<Polytope>()->vertices.size() == 2);
    // both pieces active at the kink: subgradient inequality over a grid
    for (const Vec& g : d_max.as<Polytope>()->vertices)
        for (double z = -2.0; z <= 2.0; z += 0.05)
            CHECK(value(*max0x(), {z}) >= value(*max0x(), {0.0}) + g[0] * z - 1e-9);

    const FunPtr q = ConvexFunctionSpec::quadratic({{2.0, 0.0}, {0.0, 4.0}}, {0.0, 0.0});
    const ConvexSet dq = subdifferential(*q, {1.0, 1.0});
    REQUIRE(dq.as<Singleton>());
    CHECK(dq.as<Singleton>()->v == Vec{2.0, 4.0});

    // indicator normal cone at a corner
    const FunPtr ib = ConvexFunctionSpec::indicator_box({0.0, 0.0}, {1.0, 1.0});
    const ConvexSet nc = subdifferential(*ib, {0.0, 1.0});
    REQUIRE(nc.as<Box>());
    CHECK(nc.as<Box>()->lo == Vec{-kInf, 0.0});
    CHECK(nc.as<Box>()->hi == Vec{0.0, kInf});
    CHECK(subdifferential(*ib, {2.0, 0.0}).is_empty());

    // sum rule in 1-D: interval arithmetic
    const ConvexSet ds = subdifferential(*ConvexFunctionSpec::sum(x2(), ConvexFunctionSpec::abs()), {0.0});
    REQUIRE(ds.as<Box>());
    CHECK(ds.as<Box>()->lo[0] == -1.0);
    CHECK(ds.as<Box>()->hi[0] == 1.0);

    // unsupported Minkowski combination in n >= 2
    const FunPtr ma2 = ConvexFunctionSpec::max_affine({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
    CHECK_THROWS(subdifferential(*ConvexFunctionSpec::sum(ma2, ma2), {0.0, 0.0}));
}

TEST_CASE("solution_set rules") {
    const ConvexSet s0 = solution_set(*x2(), {0.0});
    REQUIRE(s0.as<Singleton>());
    CHECK(s0.as<Singleton>()->v[0] == 0.0);

    // (-inf, 0] for max(0,x) at ystar = 0; derived by scanning 0 in df(x)
    const ConvexSet sm = solution_set(*max0x(), {0.0});
    REQUIRE(sm.as<Box>());
    CHECK(sm.as<Box>()->lo[0] == -kInf);
    CHECK(std::abs(sm.as<Box>()->hi[0]) < 1e-12);
    for (double x = -2.0; x <= 2.0; x += 0.01) {
        const bool in_set = contains(sm, {x});
        const bool zero_in_subdiff = set_distance(subdifferential(*max0x(), {x}), {0.0}) < 1e-12;
        CHECK(in_set == zero_in_subdiff);
    }

    const FunPtr q20 = ConvexFunctionSpec::quadratic({{2.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0});
    const ConvexSet sq = solution_set(*q20, {0.0, 0.0});
    REQUIRE(sq.as<AffineSet>());
    CHECK(norm(sq.as<AffineSet>()->point) < 1e-12);
    REQUIRE(sq.as<AffineSet>()->basis.size() == 1);
    CHECK(std::abs(std::abs(sq.as<AffineSet>()->basis[0][1]) - 1.0) < 1e-12);

    CHECK(solution_set(*q20, {0.0, 1.0}).is_empty());  // inconsistent

    const ConvexSet sa = solution_set(*ConvexFunctionSpec::abs(), {1.0});
    REQUIRE(sa.as<Box>());
    CHECK(sa.as<Box>()->lo[0] == 0.0);
    CHECK(sa.as<Box>()->hi[0] == kInf);
    CHECK(solution_set(*ConvexFunctionSpec::abs(), {2.0}).is_empty());
    CHECK(solution_set(*ConvexFunctionSpec::abs(), {0.5}).as<Singleton>()->v[0] == 0.0);

    const ConvexSet sp = solution_set(*ConvexFunctionSpec::power_even(4), {-4.0});
    CHECK(sp.as<Singleton>()->v[0] == Catch::Approx(-1.0));

    CHECK_THROWS(solution_set(*ConvexFunctionSpec::sum(x2(), x2()), {0.0}));
}

TEST_CASE("set_distance") {
    CHECK(set_distance(ConvexSet::box({-1.0}, {1.0}), {3.0}) == 2.0);
    CHECK(set_distance(ConvexSet::affine({0.0, 0.0}, {{0.0, 1.0}}), {3.0, 5.0}) == 3.0);
    CHECK(set_distance(ConvexSet::empty(), {0.0}) == kInf);
    CHECK(set_distance(ConvexSet::box({-kInf}, {0.0}), {2.5}) == 2.5);

    // triangle projection: frozen sqrt(2)/2, re-derived by barycentric scan
    const ConvexSet tri = ConvexSet::polytope({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    const double d = set_distance(tri, {1.0, 1.0});
    CHECK(d == Catch::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    double brute = kInf;
    const int k = 1000;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k - i; ++j) {
            const double l1 = static_cast<double>(i) / k, l2 = static_cast<double>(j) / k;
            const double px = l1 * 1.0, py = l2 * 1.0;
            brute = std::min(brute, std::hypot(1.0 - px, 1.0 - py));
        }
    CHECK(d == Catch::Approx(brute).margin(2e-3));

    // random polytopes: projection beats every vertex and every sampled hull point
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec> verts;
        const int nv = 3 + static_cast<int>(rng() % 5);
        for (int v = 0; v < nv; ++v)
            verts.push_back({double(rng() % 100) / 25.0 - 2.0, double(rng() % 100) / 25.0 - 2.0});
        const ConvexSet P = ConvexSet::polytope(verts);
        const Vec x = {double(rng() % 100) / 10.0 - 5.0, double(rng() % 100) / 10.0 - 5.0};
        const double dist = set_distance(P, x);
        for (int s = 0; s < 2000; ++s) {
            Vec lambda(verts.size());
            double total = 0.0;
            for (auto& l : lambda) total += (l = double(rng() % 1000) + 1.0);
            Vec p(2, 0.0);
            for (std::size_t v = 0; v < verts.size(); ++v) p = add(p, scale(verts[v], lambda[v] / total));
            CHECK(dist <= norm(sub(x, p)) + 1e-9);
        }
        CHECK(contains(P, project(P, x), 1e-9));
    }
}

TEST_CASE("set_excess") {
    CHECK(set_excess(ConvexSet::empty(), ConvexSet::singleton({1.0})) == 0.0);
    CHECK(set_excess(ConvexSet::empty(), ConvexSet::empty()) == kInf);
    CHECK(set_excess(ConvexSet::box({-1.0}, {1.0}), ConvexSet::singleton({0.0})) == 1.0);
    const ConvexSet seg = ConvexSet::polytope({{0.0, 0.0}, {2.0, 0.0}});
    const ConvexSet box = ConvexSet::box({0.0, 0.0}, {1.0, 1.0});
    CHECK(set_excess(seg, box) == Catch::Approx(1.0));
    // grid sup over the segment never exceeds the extreme-point sup
    for (double t = 0.0; t <= 1.0; t += 0.001)
        CHECK(set_distance(box, {2.0 * t, 0.0}) <= set_excess(seg, box) + 1e-12);
    CHECK(set_excess(ConvexSet::box({-kInf}, {0.0}), ConvexSet::singleton({0.0})) == kInf);
}

TEST_CASE("prox closed forms and bisection agree with grid minimization") {
    CHECK(prox(*x2(), 2.0, {1.0})[0] == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(grid_argmin([](double z) { return z * z + (z - 1.0) * (z - 1.0); }, -2.0, 2.0) ==
          Catch::Approx(0.5).margin(1e-4));

    CHECK(prox(*ConvexFunctionSpec::abs(), 1.0, {10.0})[0] == Catch::Approx(9.0));
    CHECK(grid_argmin([](double z) { return std::abs(z) + 0.5 * (z - 10.0) * (z - 10.0); }, 0.0, 12.0) ==
          Catch::Approx(9.0).margin(1e-4));

    CHECK(prox(*ConvexFunctionSpec::indicator_box({0.0}, {1.0}), 5.0, {-3.0})[0] == 0.0);

    // bisection variants against the brute-force oracle
    const FunPtr p4 = ConvexFunctionSpec::power_even(4);
    const double z4 = prox(*p4, 1.0, {2.0})[0];
    CHECK(z4 == Catch::Approx(grid_argmin([](double z) { return std::pow(z, 4) + 0.5 * (z - 2.0) * (z - 2.0); },
                                          -1.0, 3.0))
                    .margin(1e-4));
    const FunPtr mix = ConvexFunctionSpec::sum(x2(), ConvexFunctionSpec::abs());
    const double zm = prox(*mix, 2.0, {3.0})[0];
    CHECK(zm == Catch::Approx(grid_argmin([](double z) { return z * z + std::abs(z) + (z - 3.0) * (z - 3.0); },
                                          -1.0, 4.0))
                    .margin(1e-4));

    CHECK_THROWS_AS(prox(*x2(), -1.0, {0.0}), std::invalid_argument);
}

TEST_CASE("catalog invariants on samples") {
    const std::vector<FunPtr> funcs = {
        x2(),
        ConvexFunctionSpec::abs(),
        ConvexFunctionSpec::power_even(4),
        max0x(),
        ConvexFunctionSpec::sum(x2(), ConvexFunctionSpec::abs()),
        ConvexFunctionSpec::scaled(ConvexFunctionSpec::abs(), 3.0),
        ConvexFunctionSpec::tilted(x2(), {0.5}),
    };
    std::mt19937_64 rng(3);
    auto draw = [&rng]() { return double(rng() % 4001) / 1000.0 - 2.0; };
    for (const FunPtr& f : funcs) {
        for (int t = 0; t < 60; ++t) {
            const double x = draw();
            const ConvexSet df = subdifferential(*f, {x});
            REQUIRE(!df.is_empty());
            // subgradient inequality at every extreme subgradient
            for (const Vec& g : extreme_points(df))
                for (int u = 0; u < 20; ++u) {
                    const double z = draw();
                    CHECK(value(*f, {z}) >= value(*f, {x}) + g[0] * (z - x) - 1e-9);
                }
            // monotonicity of the graph
            const double x2v = draw();
            const auto i1 = detail::as_interval(df);
            const auto i2 = detail::as_interval(subdifferential(*f, {x2v}));
            const double y1 = x2v >= x ? i1->hi : i1->lo;
            const double y2 = x2v >= x ? i2->lo : i2->hi;
            CHECK((y2 - y1) * (x2v - x) >= -1e-9);
            // prox optimality and inverse consistency
            const double lam = 0.5 + double(rng() % 30) / 10.0;
            const Vec z = prox(*f, lam, {x});
            CHECK(set_distance(subdifferential(*f, z), {lam * (x - z[0])}) <= 1e-8);
            const double xp = draw();
            const Vec zp = prox(*f, lam, {xp});
            CHECK(norm(sub(z, zp)) <= std::abs(x - xp) + 1e-9);
        }
    }
    // inverse consistency: y* in df(x) iff x in (df)^{-1}(y*)
    const std::vector<FunPtr> invertible = {x2(), ConvexFunctionSpec::abs(), max0x(),
                                            ConvexFunctionSpec::power_even(4)};
    for (const FunPtr& f : invertible)
        for (int t = 0; t < 100; ++t) {
            const double x = draw();
            const auto iv = detail::as_interval(subdifferential(*f, {x}));
            const double y = iv->lo;  // an exact subgradient
            if (std::isinf(y)) continue;
            CHECK(set_distance(solution_set(*f, {y}), {x}) <= 1e-8);
        }
}

TEST_CASE("JSON round trips") {
    const char* text = R"({
        "type": "sum",
        "left": {"type": "quadratic", "A": [[2.0]], "b": [0.0]},
        "right": {"type": "scaled", "inner": {"type": "abs"}, "alpha": 2.0}
    })";
    const FunPtr f = function_from_json(json::parse(text));
    CHECK(value(*f, {1.0}) == 3.0);

    const ConvexSet S = ConvexSet::box({-kInf}, {0.0});
    const ConvexSet back = set_from_json(set_to_json(S));
    CHECK(back.as<Box>()->lo[0] == -kInf);
    CHECK(back.as<Box>()->hi[0] == 0.0);

    CHECK_THROWS(function_from_json(json::parse(R"({"type":"mystery"})")));
}
