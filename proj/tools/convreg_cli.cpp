// convreg command-line harness: analyze / prox / duality / solution-map /
// suite. Reads JSON function descriptors, writes JSON reports and CSV
// ledgers. Exit codes: 0 success, 1 assertion failure, 2 config error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convreg/json_io.hpp"

namespace fs = std::filesystem;
using namespace convreg;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Vec parse_vec(const std::string& s) {
    Vec out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse '" + item + "' as a real number");
        }
    }
    if (out.empty()) throw ConfigError("empty vector argument");
    return out;
}

json load_json_arg(const std::string& arg) {
    std::string text = arg;
    if (arg.empty()) throw ConfigError("missing JSON argument");
    if (arg[0] != '{' && arg[0] != '[') {
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot open file: " + arg);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

FunPtr load_function(const std::string& arg) {
    try {
        return function_from_json(load_json_arg(arg));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid function descriptor: ") + e.what());
    }
}

struct CommonOpts {
    std::string function, xbar, ystar, x0, schedule, filter;
    std::string out = ".";
    double radius = 1.0;
    int grid = 41;
    int samples = 200;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_function) {
    auto* f = cmd->add_option("--function", o.function, "function descriptor (path or inline JSON)");
    if (needs_function) f->required();
    cmd->add_option("--xbar", o.xbar, "anchor point, comma-separated");
    cmd->add_option("--ystar", o.ystar, "anchor subgradient, comma-separated");
    cmd->add_option("--x0", o.x0, "initial point, comma-separated");
    cmd->add_option("--radius", o.radius, "analysis radius");
    cmd->add_option("--grid", o.grid, "grid points per axis");
    cmd->add_option("--samples", o.samples, "random samples per radius");
    cmd->add_option("--seed", o.seed, "random sample seed");
    cmd->add_option("--schedule", o.schedule, "prox schedule descriptor (JSON)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--filter", o.filter, "substring filter for suite rows");
}

SampleGrid make_grid(const CommonOpts& o, const Vec& center) {
    if (!(o.radius > 0.0)) throw ConfigError("radius must be positive");
    if (o.grid < 1 || o.samples < 0) throw ConfigError("invalid grid/sample counts");
    return SampleGrid{center, o.radius, o.grid, o.samples, o.seed};
}

BasePair make_base_pair(const FunPtr& f, const CommonOpts& o) {
    if (o.xbar.empty() || o.ystar.empty()) throw ConfigError("--xbar and --ystar are required");
    try {
        return BasePair(f, parse_vec(o.xbar), parse_vec(o.ystar), o.radius);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("base pair invalid: ") + e.what());
    }
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out);
    return (fs::path(o.out) / name).string();
}

// Theorem 3.6 chain on a base pair: strong growth holds <=> the monotone
// modulus stays positive across the sweep, with the transferred constant.
struct Chain36 {
    ModulusReport strong_growth, mono;
    bool equivalence_ok, transfer_ok;
};

Chain36 check_chain_3_6(const BasePair& bp, const SampleGrid& grid) {
    Chain36 out{estimate_strong_growth_constant(bp, grid), check_strong_monotone_relatedness(bp, grid),
                false, false};
    const bool growth_holds = out.strong_growth.classification == Classification::Holds;
    const bool mono_holds =
        out.mono.value > 0.0 && out.mono.classification == Classification::Holds;
    out.equivalence_ok = growth_holds == mono_holds;
    out.transfer_ok = out.mono.value >= out.strong_growth.value - kAssertTol;
    return out;
}

int cmd_analyze(const CommonOpts& o) {
    const FunPtr f = load_function(o.function);
    const BasePair bp = make_base_pair(f, o);
    const SampleGrid grid = make_grid(o, bp.xbar);

    const BoundCheck t21 = check_theorem_2_1(bp, grid);
    const StrongBoundCheck t31 = check_theorem_3_1(bp, grid);
    const Chain36 t36 = check_chain_3_6(bp, grid);

    json j;
    j["schema"] = "1";
    j["xbar"] = vec_to_json(bp.xbar);
    j["ystar"] = vec_to_json(bp.ystar);
    j["radius"] = bp.radius;
    j["subregularity"] = modulus_report_to_json(t21.kappa);
    j["growth"] = modulus_report_to_json(t21.c);
    j["strong_subregularity"] = modulus_report_to_json(t31.kappa);
    j["strong_growth"] = modulus_report_to_json(t31.c);
    j["monotone"] = modulus_report_to_json(t36.mono);
    j["theorem_2_1"] = {{"forward_ok", t21.forward_ok},
                        {"backward_ok", t21.backward_ok},
                        {"gap", t21.gap}};
    j["theorem_3_1"] = {{"forward_ok", t31.forward_ok},
                        {"backward_ok", t31.backward_ok},
                        {"isolated", t31.isolated},
                        {"strongly_subregular", t31.strongly_subregular},
                        {"equivalence_ok", t31.equivalence_ok}};
    j["theorem_3_6"] = {{"equivalence_ok", t36.equivalence_ok}, {"transfer_ok", t36.transfer_ok}};
    try {
        j["hessian_modulus"] = hessian_modulus(*f, bp.xbar);
    } catch (const std::exception&) {
        j["hessian_modulus"] = nullptr;  // nonsmooth anchor
    }
    try {
        j["contingent"] = modulus_report_to_json(contingent_derivative_modulus(bp));
    } catch (const std::exception&) {
        j["contingent"] = nullptr;  // outside the exact-computation sub-catalog
    }
    write_json_file(out_path(o, "analysis.json"), j);
    write_ledger_csv(out_path(o, "subregularity_ledger.csv"), t21.kappa.ledger);
    write_ledger_csv(out_path(o, "growth_ledger.csv"), t21.c.ledger);

    const bool both_hold = t21.kappa.classification == Classification::Holds &&
                           t21.c.classification == Classification::Holds;
    if (both_hold && !(t21.forward_ok && t21.backward_ok))
        throw AssertionFailure("theorem_2_1 bound check");
    if (!(t31.forward_ok && t31.backward_ok && t31.equivalence_ok))
        throw AssertionFailure("theorem_3_1 bound/equivalence check");
    if (!(t36.equivalence_ok && t36.transfer_ok)) throw AssertionFailure("theorem_3_6 chain");
    return 0;
}

int cmd_prox(const CommonOpts& o) {
    const FunPtr f = load_function(o.function);
    if (o.x0.empty()) throw ConfigError("--x0 is required");
    const Vec x0 = parse_vec(o.x0);
    ProxSchedule sched;
    sched.variant = ConstantSchedule{1.0};
    if (!o.schedule.empty()) {
        try {
            sched = schedule_from_json(load_json_arg(o.schedule));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("invalid schedule: ") + e.what());
        }
    }
    const ProxRun run = run_exact_ppa(*f, x0, sched);
    Vec xstar;
    try {
        xstar = rate_reference_point(*f, run);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("no reference minimizer: ") + e.what());
    }
    const RateReport rate = classify_rate(run.iterates(), xstar, sched.stop_tolerance);
    json j = rate_report_to_json(rate);
    j["xstar"] = vec_to_json(xstar);
    write_json_file(out_path(o, "rate.json"), j);
    write_run_csv(out_path(o, "run.csv"), run, xstar);
    write_error_csv(out_path(o, "error.csv"), run, xstar);
    // descent is an invariant of the exact iteration; a violation is a bug
    for (std::size_t n = 0; n + 1 < run.steps.size(); ++n)
        if (run.steps[n + 1].fx > run.steps[n].fx + 1e-12) throw AssertionFailure("prox descent");
    return 0;
}

int cmd_duality(const CommonOpts& o) {
    const FunPtr f = load_function(o.function);
    const BasePair bp = make_base_pair(f, o);
    const SampleGrid grid = make_grid(o, bp.xbar);

    Corollary43Check cor;
    ModulusReport dual_subreg;
    ConjugatePair pair{nullptr, nullptr};
    try {
        pair = make_conjugate_pair(f);
        cor = check_corollary_4_3(bp, grid);
        SampleGrid dual_grid = grid;
        dual_grid.center = bp.ystar;
        dual_subreg = dual_subregularity_modulus(bp, dual_grid);
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("function not conjugable: ") + e.what());
    }
    std::vector<Vec> duals;
    for (int k = -4; k <= 4; ++k) duals.push_back({bp.ystar[0] + bp.radius * k / 4.0});
    const InverseSubdifferentialCheck inv = check_inverse_subdifferential(pair, duals);

    const double kc = cor.calmness.value, ks = dual_subreg.value;
    const bool bridge_ok = std::abs(kc - ks) <= 0.1 * std::max({kc, ks, 1e-12});

    json j;
    j["schema"] = "1";
    j["calmness"] = modulus_report_to_json(cor.calmness);
    j["calm"] = cor.calm;
    j["isolated_calm"] = cor.isolated_calm;
    j["growth_4_5"] = modulus_report_to_json(cor.growth_4_5);
    j["growth_4_6"] = modulus_report_to_json(cor.growth_4_6);
    j["dual_subregularity"] = modulus_report_to_json(dual_subreg);
    j["bridge_ok"] = bridge_ok;
    j["inverse_law_ok"] = inv.all_equal;
    j["calm_equivalence_ok"] = cor.calm_equivalence_ok;
    j["isolated_equivalence_ok"] = cor.isolated_equivalence_ok;
    write_json_file(out_path(o, "duality.json"), j);

    if (!inv.all_equal) throw AssertionFailure("inverse subdifferential law");
    if (!cor.calm_equivalence_ok || !cor.isolated_equivalence_ok)
        throw AssertionFailure("corollary_4_3 equivalence");
    if (!bridge_ok) throw AssertionFailure("calmness/subregularity bridge");
    return 0;
}

int cmd_solution_map(const CommonOpts& o, double alpha, double beta) {
    const FunPtr phi = load_function(o.function);
    if (o.xbar.empty() || o.ystar.empty()) throw ConfigError("--xbar and --ystar are required");
    const double xbar = parse_vec(o.xbar)[0];
    const double ybar = parse_vec(o.ystar)[0];
    SolutionMapSpec spec(phi, alpha, beta);
    Corollary44Check chk;
    try {
        chk = check_corollary_4_4(spec, xbar, ybar, SampleGrid{{xbar}, o.radius, o.grid, o.samples, o.seed},
                                  o.radius);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    json j;
    j["schema"] = "1";
    j["S_at_xbar"] = set_to_json(solution_map_eval(spec, xbar));
    j["calm_S"] = modulus_report_to_json(chk.calm_S);
    j["calm"] = chk.calm;
    j["isolated_calm"] = chk.isolated_calm;
    j["growth_2_1"] = modulus_report_to_json(chk.growth_2_1);
    j["growth_3_1"] = modulus_report_to_json(chk.growth_3_1);
    j["calm_equivalence_ok"] = chk.calm_equivalence_ok;
    j["isolated_implication_ok"] = chk.isolated_implication_ok;
    write_json_file(out_path(o, "solution_map.json"), j);
    if (!chk.calm_equivalence_ok || !chk.isolated_implication_ok)
        throw AssertionFailure("corollary_4_4");
    return 0;
}

// ---- suite -----------------------------------------------------------------

struct SuiteRow {
    std::string instance, check, expected, measured;
    bool pass;
};

class Suite {
public:
    explicit Suite(std::uint64_t seed) : seed_(seed) {}

    void approx(const std::string& inst, const std::string& check, double expected, double measured,
                double tol) {
        rows_.push_back({inst, check, format_double(expected), format_double(measured),
                         std::abs(measured - expected) <= tol});
    }
    void boolean(const std::string& inst, const std::string& check, bool expected, bool measured) {
        rows_.push_back({inst, check, expected ? "true" : "false", measured ? "true" : "false",
                         measured == expected});
    }
    void label(const std::string& inst, const std::string& check, const std::string& expected,
               const std::string& measured) {
        rows_.push_back({inst, check, expected, measured, expected == measured});
    }

    SampleGrid grid(const Vec& center, double radius) const {
        return SampleGrid{center, radius, 41, 200, seed_};
    }

    const std::vector<SuiteRow>& rows() const { return rows_; }

private:
    std::uint64_t seed_;
    std::vector<SuiteRow> rows_;
};

FunPtr mk_x2() { return ConvexFunctionSpec::quadratic({{2.0}}, {0.0}); }
FunPtr mk_half_x2() { return ConvexFunctionSpec::quadratic({{1.0}}, {0.0}); }
FunPtr mk_abs() { return ConvexFunctionSpec::abs(); }
FunPtr mk_x4() { return ConvexFunctionSpec::power_even(4); }
FunPtr mk_max0x() { return ConvexFunctionSpec::max_affine({{0.0}, {1.0}}, {0.0, 0.0}); }
FunPtr mk_ind01() { return ConvexFunctionSpec::indicator_box({0.0}, {1.0}); }
FunPtr mk_quad24() { return ConvexFunctionSpec::quadratic({{2.0, 0.0}, {0.0, 4.0}}, {0.0, 0.0}); }
FunPtr mk_quad20() { return ConvexFunctionSpec::quadratic({{2.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}); }

void suite_x2(Suite& s) {
    const BasePair bp(mk_x2(), {0.0}, {0.0}, 1.0);
    const SampleGrid g = s.grid({0.0}, 1.0);
    const BoundCheck t21 = check_theorem_2_1(bp, g);
    s.approx("x2", "kappa", 0.5, t21.kappa.value, 1e-6);
    s.approx("x2", "growth_c", 1.0, t21.c.value, 1e-6);
    s.boolean("x2", "t21_forward", true, t21.forward_ok);
    s.boolean("x2", "t21_backward", true, t21.backward_ok);
    const StrongBoundCheck t31 = check_theorem_3_1(bp, g);
    s.approx("x2", "strong_growth_c", 1.0, t31.c.value, 1e-6);
    s.boolean("x2", "t31_equivalence", true, t31.equivalence_ok);
    s.approx("x2", "c_mono", 2.0, check_strong_monotone_relatedness(bp, g).value, 1e-6);
    s.approx("x2", "contingent", 2.0, contingent_derivative_modulus(bp).value, 1e-12);
    // Remark 2.2(i): (3.1) with c = 1/kappa = 2 fails; exhibit a witness
    const Vec w = t31.c.witness;
    const bool refuted = !w.empty() && w[0] * w[0] < 2.0 * w[0] * w[0] - 1e-12;
    s.boolean("x2", "refute_c_equal_2_witness_at_" + (w.empty() ? "none" : format_double(w[0])),
              true, refuted);
    s.boolean("x2", "prop39_c1_premise", true, check_prop_3_9(bp, 1.0, g).premise_holds);
    s.boolean("x2", "prop39_c15_premise", false, check_prop_3_9(bp, 1.5, g).premise_holds);
}

void suite_x4(Suite& s) {
    const BasePair bp(mk_x4(), {0.0}, {0.0}, 1.0);
    const SampleGrid g = s.grid({0.0}, 1.0);
    const ModulusReport kap = estimate_subregularity_modulus(bp, g);
    s.label("x4", "subreg_class", "fails", to_string(kap.classification));
    double min_factor = kInf;
    for (std::size_t k = 0; k + 1 < kap.radii_sweep.size(); ++k)
        min_factor = std::min(min_factor, kap.radii_sweep[k + 1].second / kap.radii_sweep[k].second);
    s.boolean("x4", "kappa_halving_factor_at_least_3.9", true, min_factor >= 3.9);
    const ModulusReport gr = estimate_growth_constant(bp, g);
    s.label("x4", "growth_class", "fails", to_string(gr.classification));
    double max_dev = 0.0;
    for (std::size_t k = 0; k + 1 < gr.radii_sweep.size(); ++k)
        max_dev = std::max(max_dev,
                           std::abs(gr.radii_sweep[k + 1].second / gr.radii_sweep[k].second - 0.25));
    s.approx("x4", "growth_halving_factor", 0.25, 0.25 + max_dev, 0.05);
    const StrongBoundCheck t31 = check_theorem_3_1(bp, g);
    s.boolean("x4", "isolated", true, t31.isolated);
    s.boolean("x4", "strongly_subregular", false, t31.strongly_subregular);
    s.boolean("x4", "t31_equivalence", true, t31.equivalence_ok);
    const ProxRun run = run_exact_ppa(*bp.f, {1.0}, ProxSchedule{ConstantSchedule{1.0}, 200});
    s.label("x4", "prox_rate", "sublinear",
            to_string(classify_rate(run.iterates(), {0.0}).classification));
}

void suite_max0x(Suite& s) {
    const FunPtr f = mk_max0x();
    for (const auto& [xb, yb] :
         std::vector<std::pair<double, double>>{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}}) {
        const BasePair bp(f, {xb}, {yb}, 1.0);
        const ModulusReport kap = estimate_subregularity_modulus(bp, s.grid({xb}, 1.0));
        s.label("max0x", "subreg_at_" + format_double(xb), "holds", to_string(kap.classification));
        if (xb == 0.0) s.approx("max0x", "kappa_at_0", 1.0, kap.value, 1e-6);
    }
    const BasePair bp0(f, {0.0}, {0.0}, 1.0);
    const StrongBoundCheck t31 = check_theorem_3_1(bp0, s.grid({0.0}, 1.0));
    s.boolean("max0x", "isolated_at_0", false, t31.isolated);
    s.boolean("max0x", "strongly_subregular_at_0", false, t31.strongly_subregular);
    s.boolean("max0x", "t31_equivalence", true, t31.equivalence_ok);
    s.approx("max0x", "contingent_at_0", 0.0, contingent_derivative_modulus(bp0).value, 1e-12);
}

void suite_quadratics(Suite& s) {
    const BasePair b24(mk_quad24(), {0.0, 0.0}, {0.0, 0.0}, 1.0);
    const SampleGrid g2 = s.grid({0.0, 0.0}, 1.0);
    s.approx("quad24", "hessian_modulus", 2.0, hessian_modulus(*b24.f, b24.xbar), 1e-12);
    const BoundCheck t21 = check_theorem_2_1(b24, g2);
    s.approx("quad24", "kappa", 0.5, t21.kappa.value, 1e-3);
    s.approx("quad24", "growth_c", 1.0, t21.c.value, 1e-3);
    const ModulusReport sg24 = estimate_strong_growth_constant(b24, g2);
    s.boolean("quad24", "cor38_equivalence", true,
              (hessian_modulus(*b24.f, b24.xbar) > 0.0) ==
                  (sg24.classification == Classification::Holds));

    const BasePair b20(mk_quad20(), {0.0, 0.0}, {0.0, 0.0}, 1.0);
    const ModulusReport sg20 = estimate_strong_growth_constant(b20, g2);
    s.label("quad20", "strong_growth_class", "fails", to_string(sg20.classification));
    const StrongBoundCheck t31 = check_theorem_3_1(b20, g2);
    s.boolean("quad20", "isolated", false, t31.isolated);
    s.boolean("quad20", "t31_equivalence", true, t31.equivalence_ok);
    s.boolean("quad20", "cor38_equivalence", true,
              (hessian_modulus(*b20.f, b20.xbar) > 0.0) ==
                  (sg20.classification == Classification::Holds));
    s.approx("quad20", "c_mono", 0.0, check_strong_monotone_relatedness(b20, g2).value, 1e-9);
}

void suite_chain36(Suite& s) {
    struct Case {
        std::string name;
        BasePair bp;
    };
    const std::vector<Case> cases = {
        {"x2", BasePair(mk_x2(), {0.0}, {0.0}, 1.0)},
        {"abs", BasePair(mk_abs(), {0.0}, {0.0}, 1.0)},
        {"x4", BasePair(mk_x4(), {0.0}, {0.0}, 1.0)},
        {"max0x", BasePair(mk_max0x(), {0.0}, {0.0}, 1.0)},
        {"quad24", BasePair(mk_quad24(), {0.0, 0.0}, {0.0, 0.0}, 1.0)},
        {"quad20", BasePair(mk_quad20(), {0.0, 0.0}, {0.0, 0.0}, 1.0)},
    };
    for (const Case& c : cases) {
        const Chain36 chain = check_chain_3_6(c.bp, s.grid(c.bp.xbar, 1.0));
        s.boolean(c.name, "t36_equivalence", true, chain.equivalence_ok);
        s.boolean(c.name, "t36_transfer", true, chain.transfer_ok);
    }
}

void suite_sum_rule(Suite& s) {
    const SampleGrid g = s.grid({0.0}, 1.0);
    const SumRuleCheck a = check_sum_rule(BasePair(mk_x2(), {0.0}, {0.0}, 1.0),
                                          BasePair(ConvexFunctionSpec::scaled(mk_x2(), 2.0), {0.0}, {0.0}, 1.0), g);
    s.approx("sum_x2_2x2", "c_f", 1.0, a.c_f, 1e-6);
    s.approx("sum_x2_2x2", "c_g", 2.0, a.c_g, 1e-6);
    s.approx("sum_x2_2x2", "c_sum", 3.0, a.c_sum, 1e-6);
    s.boolean("sum_x2_2x2", "superadditive", true, a.ok);
    const SumRuleCheck b = check_sum_rule(BasePair(mk_x2(), {0.0}, {0.0}, 1.0),
                                          BasePair(mk_abs(), {0.0}, {0.0}, 1.0), g);
    s.boolean("sum_x2_abs", "superadditive", true, b.ok && b.c_sum >= 2.0 - kAssertTol);
    const SumRuleCheck c = check_sum_rule(BasePair(mk_half_x2(), {0.0}, {0.0}, 1.0),
                                          BasePair(mk_x2(), {0.0}, {0.0}, 1.0), g);
    s.approx("sum_halfx2_x2", "c_sum", 1.5, c.c_sum, 1e-6);
    s.boolean("sum_halfx2_x2", "superadditive", true, c.ok);
}

void suite_prop39(Suite& s) {
    const SampleGrid g = s.grid({0.0}, 1.0);
    struct Case {
        std::string name;
        BasePair bp;
    };
    const std::vector<Case> cases = {
        {"x2", BasePair(mk_x2(), {0.0}, {0.0}, 1.0)},
        {"abs", BasePair(mk_abs(), {0.0}, {0.0}, 1.0)},
        {"x4", BasePair(mk_x4(), {0.0}, {0.0}, 1.0)},
        {"max0x", BasePair(mk_max0x(), {0.0}, {0.0}, 1.0)},
    };
    for (const Case& c : cases)
        for (double cc : {0.5, 1.0})
            s.boolean(c.name, "prop39_implication_c" + format_double(cc), true,
                      check_prop_3_9(c.bp, cc, g).implication_ok);
}

void suite_prox(Suite& s) {
    const ProxRun lin = run_exact_ppa(*mk_x2(), {1.0}, ProxSchedule{ConstantSchedule{2.0}, 200});
    const RateReport rl = classify_rate(lin.iterates(), {0.0});
    s.label("prox_x2_l2", "rate", "linear", to_string(rl.classification));
    s.approx("prox_x2_l2", "q", 0.5, rl.fitted_q, 1e-6);

    const ProxRun har = run_exact_ppa(*mk_x2(), {1.0}, ProxSchedule{HarmonicSchedule{2.0}, 12});
    s.label("prox_x2_harmonic", "rate", "superlinear",
            to_string(classify_rate(har.iterates(), {0.0}).classification));

    const ProxRun fin = run_exact_ppa(*mk_abs(), {10.0}, ProxSchedule{ConstantSchedule{1.0}, 200});
    s.label("prox_abs", "rate", "finite",
            to_string(classify_rate(fin.iterates(), {0.0}).classification));
    int steps_to_zero = -1;
    for (std::size_t n = 0; n < fin.steps.size(); ++n)
        if (fin.steps[n].x[0] == 0.0) {
            steps_to_zero = static_cast<int>(n);
            break;
        }
    s.approx("prox_abs", "steps_to_zero", 10.0, steps_to_zero, 0.0);

    const std::vector<GeneralizedStep> gsteps(40, GeneralizedStep{LinearStep{2.0}});
    const ProxRun gen = run_generalized_ppa(*mk_x2(), 1.0, gsteps);
    const ProxRun exact = run_exact_ppa(*mk_x2(), {1.0}, ProxSchedule{ConstantSchedule{2.0}, 40});
    double max_diff = 0.0;
    for (std::size_t n = 0; n < std::min(gen.steps.size(), exact.steps.size()); ++n)
        max_diff = std::max(max_diff, std::abs(gen.steps[n].x[0] - exact.steps[n].x[0]));
    s.boolean("prox_generalized", "matches_exact_1e-10", true, max_diff <= 1e-10);
}

void suite_duality(Suite& s) {
    // biconjugation on probe grids
    struct Probe {
        std::string name;
        FunPtr f;
    };
    for (const Probe& p : std::vector<Probe>{{"half_x2", mk_half_x2()},
                                             {"abs", mk_abs()},
                                             {"ind01", mk_ind01()},
                                             {"max0x", mk_max0x()}}) {
        const FunPtr fss = conjugate(*conjugate(*p.f));
        double max_err = 0.0;
        bool domain_ok = true;
        for (double t = -2.0; t <= 2.0; t += 0.125) {
            const double lhs = value(*fss, {t});
            const double rhs = value(*p.f, {t});
            if (std::isinf(rhs))
                domain_ok = domain_ok && std::isinf(lhs);
            else
                max_err = std::max(max_err, std::abs(lhs - rhs));
        }
        s.boolean("biconj_" + p.name, "f**_equals_f_1e-6", true, domain_ok && max_err <= 1e-6);
    }

    // inverse subdifferential law on sampled duals
    struct InvCase {
        std::string name;
        FunPtr f;
        std::vector<Vec> duals;
    };
    const std::vector<InvCase> inv_cases = {
        {"abs", mk_abs(), {{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}}},
        {"half_x2", mk_half_x2(), {{-3.0}, {0.0}, {3.0}}},
        {"ind01", mk_ind01(), {{-1.0}, {0.0}, {1.0}}},
        {"max0x", mk_max0x(), {{0.0}, {0.5}, {1.0}}},
    };
    for (const InvCase& c : inv_cases)
        s.boolean("inverse_" + c.name, "sets_equal_1e-8", true,
                  check_inverse_subdifferential(make_conjugate_pair(c.f), c.duals).all_equal);

    // Corollary 4.3 on the three instances
    struct CorCase {
        std::string name;
        BasePair bp;
    };
    const std::vector<CorCase> cor_cases = {
        {"half_x2", BasePair(mk_half_x2(), {0.0}, {0.0}, 1.0)},
        {"abs", BasePair(mk_abs(), {0.0}, {0.0}, 1.0)},
        {"ind01", BasePair(mk_ind01(), {0.0}, {-1.0}, 1.0)},
    };
    for (const CorCase& c : cor_cases) {
        const Corollary43Check chk = check_corollary_4_3(c.bp, s.grid(c.bp.xbar, 1.0));
        s.boolean("cor43_" + c.name, "calm_equivalence", true, chk.calm_equivalence_ok);
        s.boolean("cor43_" + c.name, "isolated_equivalence", true, chk.isolated_equivalence_ok);
    }

    // calmness/subregularity bridge within 10%
    for (const CorCase& c : cor_cases) {
        const double kc =
            estimate_calmness_modulus(c.bp, s.grid(c.bp.xbar, 1.0), c.bp.radius).value;
        const double ks = dual_subregularity_modulus(c.bp, s.grid(c.bp.ystar, 1.0)).value;
        s.boolean("bridge_" + c.name, "within_10pct", true,
                  std::abs(kc - ks) <= 0.1 * std::max({kc, ks, 1e-12}));
    }

    // Corollary 4.4 on the three solution-map examples
    struct MapCase {
        std::string name;
        SolutionMapSpec spec;
        double radius;
        bool expect_calm;
    };
    const std::vector<MapCase> map_cases = {
        {"half_y2", SolutionMapSpec(mk_half_x2(), 1.0, 0.0), 1.0, true},
        {"abs", SolutionMapSpec(mk_abs(), 1.0, 0.0), 0.5, true},
        {"y4", SolutionMapSpec(mk_x4(), 1.0, 0.0), 1.0, false},
    };
    for (const MapCase& c : map_cases) {
        const Corollary44Check chk =
            check_corollary_4_4(c.spec, 0.0, 0.0, s.grid({0.0}, c.radius), c.radius);
        s.boolean("cor44_" + c.name, "calm", c.expect_calm, chk.calm);
        s.boolean("cor44_" + c.name, "calm_equivalence", true, chk.calm_equivalence_ok);
        s.boolean("cor44_" + c.name, "isolated_implication", true, chk.isolated_implication_ok);
    }
}

// Independent brute-force oracle over a uniform 1e5-point grid with
// hand-coded subdifferentials; mirrors the unit-test oracle.
void suite_oracle(Suite& s) {
    struct Oracle {
        std::string name;
        FunPtr f;
        ConvexSet S;  // passed explicitly; solution_set refuses sums by design
        std::function<double(double)> value;
        std::function<Interval(double)> sub;
        std::function<double(double)> dist_S;
    };
    const std::vector<Oracle> oracles = {
        {"x2", mk_x2(), ConvexSet::singleton({0.0}), [](double x) { return x * x; },
         [](double x) { return Interval{2 * x, 2 * x}; }, [](double x) { return std::abs(x); }},
        {"abs", mk_abs(), ConvexSet::singleton({0.0}), [](double x) { return std::abs(x); },
         [](double x) {
             if (x == 0.0) return Interval{-1.0, 1.0};
             const double g = x > 0 ? 1.0 : -1.0;
             return Interval{g, g};
         },
         [](double x) { return std::abs(x); }},
        {"max0x", mk_max0x(), ConvexSet::box({-kInf}, {0.0}), [](double x) { return std::max(0.0, x); },
         [](double x) {
             if (x < 0) return Interval{0.0, 0.0};
             if (x > 0) return Interval{1.0, 1.0};
             return Interval{0.0, 1.0};
         },
         [](double x) { return std::max(x, 0.0); }},
        {"x2_plus_abs", ConvexFunctionSpec::sum(mk_x2(), mk_abs()), ConvexSet::singleton({0.0}),
         [](double x) { return x * x + std::abs(x); },
         [](double x) {
             if (x == 0.0) return Interval{-1.0, 1.0};
             const double g = 2 * x + (x > 0 ? 1.0 : -1.0);
             return Interval{g, g};
         },
         [](double x) { return std::abs(x); }},
    };
    for (const Oracle& o : oracles) {
        double kappa = 0.0, c = kInf;
        const int points = 100001;
        for (int i = 0; i < points; ++i) {
            const double x = -1.0 + 2.0 * i / (points - 1);
            const Interval iv = o.sub(x);
            const double den = std::max({iv.lo, -iv.hi, 0.0});
            const double dS = o.dist_S(x);
            if (den >= 1e-12) kappa = std::max(kappa, dS / den);
            if (dS >= 1e-12) c = std::min(c, o.value(x) / (dS * dS));
        }
        const BasePair bp(o.f, {0.0}, {0.0}, 1.0);
        const SampleGrid g = s.grid({0.0}, 1.0);
        s.approx("oracle_" + o.name, "kappa", kappa,
                 estimate_subregularity_modulus(bp, g, o.S).value, 1e-6);
        s.approx("oracle_" + o.name, "growth_c", c, estimate_growth_constant(bp, g, o.S).value,
                 1e-6);
    }
}

int cmd_suite(const CommonOpts& o) {
    Suite s(o.seed);
    suite_x2(s);
    suite_x4(s);
    suite_max0x(s);
    suite_quadratics(s);
    suite_chain36(s);
    suite_sum_rule(s);
    suite_prop39(s);
    suite_prox(s);
    suite_duality(s);
    suite_oracle(s);

    std::ofstream out(out_path(o, "summary.csv"), std::ios::binary);
    if (!out) throw ConfigError("cannot open summary.csv for writing");
    out << "instance,check,expected,measured,pass\n";
    bool all_pass = true;
    for (const SuiteRow& r : s.rows()) {
        if (!o.filter.empty() && r.instance.find(o.filter) == std::string::npos &&
            r.check.find(o.filter) == std::string::npos)
            continue;
        out << r.instance << ',' << r.check << ',' << r.expected << ',' << r.measured << ','
            << (r.pass ? "true" : "false") << '\n';
        if (!r.pass) {
            all_pass = false;
            std::cerr << "suite row failed: " << r.instance << "/" << r.check << " expected "
                      << r.expected << " measured " << r.measured << "\n";
        }
    }
    if (!all_pass) throw AssertionFailure("suite rows failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convex-regularity laboratory"};
    app.require_subcommand(1);

    CommonOpts analyze_o, prox_o, duality_o, map_o, suite_o;
    double alpha = 1.0, beta = 0.0;

    CLI::App* analyze = app.add_subcommand("analyze", "regularity and growth analysis at a base pair");
    add_common(analyze, analyze_o, true);
    CLI::App* prox = app.add_subcommand("prox", "proximal point run with rate classification");
    add_common(prox, prox_o, true);
    CLI::App* duality = app.add_subcommand("duality", "conjugate, calmness and corollary 4.3 checks");
    add_common(duality, duality_o, true);
    CLI::App* solmap = app.add_subcommand("solution-map", "parametric solution-map calmness checks");
    add_common(solmap, map_o, true);
    solmap->add_option("--alpha", alpha, "base slope f(x) = alpha x + beta");
    solmap->add_option("--beta", beta, "base intercept");
    CLI::App* suite = app.add_subcommand("suite", "run the acceptance matrix");
    add_common(suite, suite_o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_o);
        if (prox->parsed()) return cmd_prox(prox_o);
        if (duality->parsed()) return cmd_duality(duality_o);
        if (solmap->parsed()) return cmd_solution_map(map_o, alpha, beta);
        return cmd_suite(suite_o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 1;
    }
}
