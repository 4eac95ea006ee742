#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "convreg/duality.hpp"

using namespace convreg;

namespace {

FunPtr half_x2() { return ConvexFunctionSpec::quadratic({{1.0}}, {0.0}); }
FunPtr x2() { return ConvexFunctionSpec::quadratic({{2.0}}, {0.0}); }
FunPtr absf() { return ConvexFunctionSpec::abs(); }
FunPtr max0x() { return ConvexFunctionSpec::max_affine({{0.0}, {1.0}}, {0.0, 0.0}); }
FunPtr ind01() { return ConvexFunctionSpec::indicator_box({0.0}, {1.0}); }

}  // namespace

TEST_CASE("exact conjugates against the numeric fallback") {
    struct Case {
        FunPtr f;
        std::vector<double> duals;
        double margin;  // loose when the sup sits at an off-grid breakpoint
    };
    const std::vector<Case> cases = {
        {half_x2(), {-2.0, -0.5, 0.0, 1.0, 2.5}, 1e-6},
        {ConvexFunctionSpec::quadratic({{1.0}}, {1.0}), {-1.0, 0.0, 1.0, 2.0}, 1e-6},  // f* = (y-1)^2/2
        {absf(), {-0.9, 0.0, 0.5, 0.99}, 1e-6},
        {max0x(), {0.0, 0.25, 0.5, 1.0}, 1e-6},
        {ind01(), {-3.0, -1.0, 0.0, 2.0}, 1e-6},
        {ConvexFunctionSpec::max_affine({{-1.0}, {2.0}}, {0.0, -1.0}), {-0.5, 0.0, 1.0, 2.0}, 1e-3},
    };
    for (const Case& c : cases) {
        const FunPtr conj = conjugate(*c.f);
        for (double y : c.duals) {
            const NumericConjugateValue num = conjugate_numeric(*c.f, y);
            REQUIRE(num.trusted);
            CHECK(value(*conj, {y}) == Catch::Approx(num.value).margin(c.margin));
        }
    }
    // structure checks
    CHECK(conjugate(*absf())->as<IndicatorBox>());
    CHECK(conjugate(*max0x())->as<IndicatorBox>());  // simplifies to the slope-range indicator
    CHECK(value(*conjugate(*max0x()), {2.0}) == kInf);
    CHECK(conjugate(*ind01())->as<MaxAffine>());
    CHECK_THROWS(conjugate(*ConvexFunctionSpec::power_even(4)));
    CHECK_THROWS(conjugate(*ConvexFunctionSpec::quadratic({{2.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0})));
    CHECK_THROWS(conjugate(*ConvexFunctionSpec::indicator_box({0.0}, {kInf})));
    // boundary-attained sup is flagged untrusted
    CHECK_FALSE(conjugate_numeric(*absf(), 2.0).trusted);
}

TEST_CASE("biconjugation on probe grids") {
    const std::vector<FunPtr> probes = {
        half_x2(), absf(), ind01(), max0x(),
        ConvexFunctionSpec::separable({absf(), half_x2()}),
    };
    for (const FunPtr& f : probes) {
        const FunPtr fstarstar = conjugate(*conjugate(*f));
        REQUIRE(fstarstar->dim() == f->dim());
        for (double t = -2.0; t <= 2.0; t += 0.125) {
            Vec x(f->dim(), t);
            const double lhs = value(*fstarstar, x);
            const double rhs = value(*f, x);
            if (std::isinf(rhs))
                CHECK(std::isinf(lhs));
            else
                CHECK(lhs == Catch::Approx(rhs).margin(1e-6));
        }
    }
}

TEST_CASE("Fenchel-Young inequality with the equality characterization") {
    for (const FunPtr& f : {half_x2(), absf(), max0x()}) {
        const FunPtr conj = conjugate(*f);
        for (double x = -2.0; x <= 2.0; x += 0.25)
            for (double y = -2.0; y <= 2.0; y += 0.25) {
                const double fy = value(*conj, {y});
                if (std::isinf(fy)) continue;
                const double gap = value(*f, {x}) + fy - x * y;
                CHECK(gap >= -1e-9);
                const bool tight = gap <= 1e-8;
                CHECK(tight == contains(subdifferential(*f, {x}), {y}, 1e-10));
            }
    }
}

TEST_CASE("inverse subdifferential law on sampled duals") {
    struct Case {
        FunPtr f;
        std::vector<Vec> duals;
    };
    const std::vector<Case> cases = {
        {absf(), {{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}}},
        {half_x2(), {{-3.0}, {0.0}, {3.0}}},
        {ind01(), {{-1.0}, {0.0}, {1.0}}},
        {max0x(), {{0.0}, {0.5}, {1.0}}},
    };
    for (const Case& c : cases) {
        const InverseSubdifferentialCheck chk =
            check_inverse_subdifferential(make_conjugate_pair(c.f), c.duals);
        INFO("failing dual " << (chk.failing_dual.empty() ? 0.0 : chk.failing_dual[0]));
        CHECK(chk.all_equal);
    }
    CHECK(sets_equal(ConvexSet::box({0.0}, {kInf}), ConvexSet::box({0.0}, {kInf})));
    CHECK_FALSE(sets_equal(ConvexSet::box({0.0}, {kInf}), ConvexSet::box({0.0}, {1.0})));
}

TEST_CASE("calmness moduli") {
    const SampleGrid g{{0.0}, 1.0};
    const ModulusReport ch = estimate_calmness_modulus(BasePair(half_x2(), {0.0}, {0.0}, 1.0), g, 1.0);
    CHECK(ch.value == Catch::Approx(1.0).margin(1e-9));
    CHECK(ch.classification == Classification::Holds);

    const ModulusReport ca = estimate_calmness_modulus(BasePair(absf(), {0.0}, {0.0}, 1.0), g, 2.0);
    CHECK(ca.value == 0.0);  // subgradients stay inside the reference interval
    CHECK(ca.classification == Classification::Holds);
    CHECK_FALSE(isolated_in_ball(subdifferential(*absf(), {0.0}), {0.0}, 1.0));

    const ModulusReport c4 =
        estimate_calmness_modulus(BasePair(ConvexFunctionSpec::power_even(4), {0.0}, {0.0}, 1.0), g, 8.0);
    CHECK(c4.value == Catch::Approx(4.0).margin(1e-9));  // e({4x^3}, {0})/|x| = 4x^2 at |x| = 1
    CHECK(c4.classification == Classification::Holds);
    CHECK(c4.radii_sweep.back().second == Catch::Approx(4.0 / 256.0).margin(1e-9));
}

TEST_CASE("calmness/subregularity bridge within ten percent") {
    struct Case {
        BasePair bp;
        double V;
    };
    const std::vector<Case> cases = {
        {BasePair(half_x2(), {0.0}, {0.0}, 1.0), 1.0},
        {BasePair(x2(), {0.0}, {0.0}, 1.0), 1.0},
        {BasePair(ConvexFunctionSpec::quadratic({{1.0}}, {1.0}), {0.0}, {1.0}, 1.0), 1.0},
        {BasePair(absf(), {0.0}, {0.0}, 1.0), 2.0},
        {BasePair(ind01(), {0.0}, {-1.0}, 1.0), 1.0},
    };
    for (const Case& c : cases) {
        const SampleGrid primal{c.bp.xbar, c.bp.radius};
        const SampleGrid dual{c.bp.ystar, c.bp.radius};
        const double calm = estimate_calmness_modulus(c.bp, primal, c.V).value;
        const double subreg = dual_subregularity_modulus(c.bp, dual).value;
        CHECK(std::abs(calm - subreg) <= 0.1 * std::max({calm, subreg, 1e-12}));
    }
}

TEST_CASE("corollary 4.3") {
    const SampleGrid g{{0.0}, 1.0};

    const Corollary43Check a = check_corollary_4_3(BasePair(half_x2(), {0.0}, {0.0}, 1.0), g);
    CHECK(a.calm);
    CHECK(a.isolated_calm);
    CHECK(a.growth_4_6.value == Catch::Approx(0.5).margin(1e-9));
    CHECK(a.calm_equivalence_ok);
    CHECK(a.isolated_equivalence_ok);
    // bound sanity: kappa-hat = 1 <= 1/c-hat = 2
    CHECK(a.calmness.value <= 1.0 / a.growth_4_6.value + kAssertTol);

    const Corollary43Check b = check_corollary_4_3(BasePair(absf(), {0.0}, {0.0}, 1.0), g);
    CHECK(b.calm);
    CHECK_FALSE(b.isolated_calm);  // 0 interior to [-1, 1]
    CHECK(b.calm_equivalence_ok);
    CHECK(b.isolated_equivalence_ok);

    const Corollary43Check c = check_corollary_4_3(BasePair(ind01(), {0.0}, {-1.0}, 1.0), g);
    CHECK(c.calm);
    CHECK_FALSE(c.isolated_calm);  // -1 interior to the normal cone (-inf, 0]
    CHECK(c.calm_equivalence_ok);
    CHECK(c.isolated_equivalence_ok);
}

TEST_CASE("solution map evaluation") {
    const SolutionMapSpec sabs(absf(), 1.0, 0.0);
    CHECK(sets_equal(solution_map_eval(sabs, 0.5), ConvexSet::singleton({0.0})));
    CHECK(sets_equal(solution_map_eval(sabs, 1.0), ConvexSet::box({-kInf}, {0.0})));
    const SolutionMapSpec squad(half_x2(), 1.0, 0.0);
    CHECK(sets_equal(solution_map_eval(squad, 2.0), ConvexSet::singleton({-2.0})));
    const SolutionMapSpec sdom(absf(), 1.0, 0.0, Interval{-0.5, 0.5});
    CHECK_THROWS_AS(solution_map_eval(sdom, 1.0), std::invalid_argument);
}

TEST_CASE("corollary 4.4 on the three solution-map examples") {
    const Corollary44Check a =
        check_corollary_4_4(SolutionMapSpec(half_x2(), 1.0, 0.0), 0.0, 0.0, SampleGrid{{0.0}, 1.0}, 1.0);
    CHECK(a.calm);
    CHECK(a.calm_S.value == Catch::Approx(1.0).margin(1e-9));
    CHECK(a.isolated_calm);
    CHECK(a.growth_3_1.value == Catch::Approx(0.5).margin(1e-9));
    CHECK(a.calm_equivalence_ok);
    CHECK(a.isolated_implication_ok);

    const Corollary44Check b =
        check_corollary_4_4(SolutionMapSpec(absf(), 1.0, 0.0), 0.0, 0.0, SampleGrid{{0.0}, 0.5}, 0.5);
    CHECK(b.calm);
    CHECK(b.calm_S.value == 0.0);
    CHECK(b.isolated_calm);
    CHECK(b.calm_equivalence_ok);
    CHECK(b.isolated_implication_ok);

    const Corollary44Check c = check_corollary_4_4(SolutionMapSpec(ConvexFunctionSpec::power_even(4), 1.0, 0.0),
                                                   0.0, 0.0, SampleGrid{{0.0}, 1.0}, 1.0);
    CHECK_FALSE(c.calm);  // e(S(x), S(0))/|x| = |x|^{-2/3}/4^{1/3} blows up
    CHECK(c.growth_2_1.classification == Classification::Fails);
    CHECK(c.calm_equivalence_ok);
    CHECK(c.isolated_implication_ok);

    CHECK_THROWS_AS(check_corollary_4_4(SolutionMapSpec(absf(), 1.0, 0.0), 0.0, 5.0, SampleGrid{{0.0}, 0.5}, 0.5),
                    std::invalid_argument);
}
