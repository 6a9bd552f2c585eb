#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "lrcone/bounds.hpp"

using namespace lrcone;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("ipow and pow2int are exact for exact inputs") {
    REQUIRE(ipow(2.0, 10) == 1024.0);
    REQUIRE(ipow(1.5, 4) == 5.0625); // (3/2)^4 = 81/16, representable
    REQUIRE(ipow(7.0, 0) == 1.0);
    REQUIRE(pow2int(0) == 1.0);
    REQUIRE(pow2int(10) == 1024.0);
    REQUIRE(pow2int(-3) == 0.125);
}

TEST_CASE("exponential currency: seed bound and evaluation") {
    const ExpBoundParams b0 = base_bound(1.0, 1.0);
    REQUIRE(b0.c == 1.0);
    REQUIRE(b0.xi_poly == 0.0);
    REQUIRE(b0.ell == 1.0);
    REQUIRE_FALSE(b0.delta_t.has_value());
    REQUIRE(std::abs(b0.v - 10.873127313836180941) < 1e-13); // 4e

    const ExpBoundParams b1 = base_bound(1.5, 3.0);
    REQUIRE(std::abs(b1.v - 48.929072912262814236) < 1e-12); // 18e

    REQUIRE_THROWS_AS(base_bound(0.0, 1.0), DomainError);
    REQUIRE_THROWS_AS(base_bound(1.0, 0.5), DomainError);

    // c r^xi exp((v t - r)/ell) at hand-checkable values
    const ExpBoundParams b{2.0, 1.0, 3.0, 2.0, std::nullopt};
    REQUIRE(std::abs(eval_exp_bound(b, 4.0, 2.0) - 8.0 * kEuler) < 1e-13);
}

TEST_CASE("recursion constants match independent high-precision evaluations") {
    REQUIRE(xi_constant(1) == 68.0);
    REQUIRE(xi_constant(2) == 84.0);
    REQUIRE(xi_constant(3) == 100.0);
    REQUIRE_THROWS_AS(xi_constant(0), DomainError);

    REQUIRE(std::abs(g_constant(0.5, 1) - 2.0) < 1e-14);
    REQUIRE(std::abs(g_constant(0.25, 1) - 4.0) < 1e-13);
    REQUIRE(std::abs(g_constant(0.25, 2) - 32.0) < 1e-12);
    REQUIRE_THROWS_AS(g_constant(0.0, 1), DomainError);
    REQUIRE_THROWS_AS(g_constant(0.6, 1), DomainError);

    // 50-digit reference values for the shell-summation constant
    REQUIRE(std::abs(lambda_constant(0.25, 1) - 2810656.2137521510167) <
            5e-13 * 2810656.2137521510167);
    REQUIRE(std::abs(lambda_constant(0.5, 1) - 1231459.8127700583085) <
            5e-13 * 1231459.8127700583085);
    REQUIRE(std::abs(lambda_constant(0.25, 2) - 4086502668.5127520823) <
            5e-13 * 4086502668.5127520823);
}

TEST_CASE("recursion_step evaluates the shell ratio in log space") {
    // 68 * log(e) * 1 + 1 * 1 * 2^3 / 1^2.5 = 68 + 8
    REQUIRE(std::abs(recursion_step(1.0, 1.0, 2.0, kEuler, 68.0, 1.0, 1.0, 2.5, 1) - 76.0) <
            1e-12);
    // huge shells that would overflow a direct pow quotient stay finite in log space
    REQUIRE(std::isfinite(recursion_step(1.0, 1e200, 2e200, kEuler, 68.0, 1.0, 1.0, 2.5, 1)));

    REQUIRE_THROWS_AS(recursion_step(1.0, 0.5, 2.0, kEuler, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(recursion_step(1.0, 2.0, 2.0, kEuler, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(recursion_step(1.0, 1.0, 2.0, 2.0, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(recursion_step(1.0, 1.0, 2.0, kEuler, 68.0, 1.0, 1.0, 2.5, 0), DomainError);
}

TEST_CASE("choose_L solves xi log(r*) = L^{2d+1-alpha}") {
    const ChosenL a = choose_L(2.5, 1, kEuler, 68.0);
    REQUIRE_FALSE(a.degenerate);
    REQUIRE(std::abs(a.L - 4624.0) < 1e-12 * 4624.0); // (68 log e)^2

    const ChosenL b = choose_L(2.5, 1, 10.0, 68.0);
    REQUIRE(std::abs(b.L - 24515.976862852112401) < 1e-12 * 24515.976862852112401);

    const ChosenL c = choose_L(2.9, 1, kEuler, 68.0);
    REQUIRE(std::abs(c.L - 2113922820157210624.0) < 1e-12 * 2113922820157210624.0); // 68^10

    const ChosenL dg = choose_L(2.5, 1, kEuler, 0.5);
    REQUIRE(dg.degenerate);
    REQUIRE(dg.L <= 1.0);

    REQUIRE_THROWS_AS(choose_L(3.5, 1, kEuler, 68.0), DomainError);
    REQUIRE_THROWS_AS(choose_L(2.5, 1, 2.0, 68.0), DomainError);
    REQUIRE_THROWS_AS(choose_L(2.5, 1, kEuler, 0.0), DomainError);
}

TEST_CASE("choose_n counts shells and clamps at one") {
    // arg = r (t / r^{alpha-2d})^eta = 3.8 * 0.5 = 1.9, so raw = 1 exactly
    const double r = 3.8, t = std::sqrt(3.8) / 2.0;
    const ChosenN a = choose_n(r, t, 2.5, 1, 1.0, 1.9);
    REQUIRE(a.raw == 1.0);
    REQUIRE(a.n == 1);
    REQUIRE_FALSE(a.clamped);

    const ChosenN b = choose_n(1.0, 1.0, 2.5, 1, 0.0, 2.0); // arg = 1, raw = 0
    REQUIRE(b.n == 1);
    REQUIRE(b.clamped);

    const ChosenN c = choose_n(8.1, 1.0, 2.5, 1, 0.0, 2.0); // raw ~ 3.02
    REQUIRE(c.n == 3);
    REQUIRE_FALSE(c.clamped);

    REQUIRE_THROWS_AS(choose_n(0.5, 1.0, 2.5, 1, 0.0, 2.0), DomainError);
    REQUIRE_THROWS_AS(choose_n(2.0, 0.0, 2.5, 1, 0.0, 2.0), DomainError);
    REQUIRE_THROWS_AS(choose_n(2.0, 1.0, 2.5, 1, -0.1, 2.0), DomainError);
    REQUIRE_THROWS_AS(choose_n(2.0, 1.0, 2.5, 1, 0.0, 1.0), DomainError);
}

TEST_CASE("run_recursion collapses to the closed form at the optimal L") {
    for (int d : {1, 2}) {
        for (double da : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double alpha = 2.0 * d + da;
            const double xi = xi_constant(d);
            const double rstar = 10.0;
            const double L = choose_L(alpha, d, rstar, xi).L;
            const double nu = 1.0, lam = 2.5, tv = 1.3;
            const double x = xi * std::log(rstar);
            const double v1 = 4.0 * kEuler * tv * L;
            for (int n = 1; n <= 6; ++n) {
                const RecursionTrace tr = run_recursion(tv, L, n, rstar, xi, nu, lam, alpha, d);
                const double expected =
                    ipow(x, n - 1) * (v1 + (n - 1) * ipow(L, 2 * d + 1) * nu * lam);
                REQUIRE(std::abs(tr.final_velocity - expected) < 1e-12 * expected);
                REQUIRE(tr.steps.size() == static_cast<size_t>(n));
                REQUIRE(tr.steps.front().k == 1);
                REQUIRE(tr.steps.front().ell == L);
                REQUIRE(tr.steps.back().v == tr.final_velocity);
                for (size_t k = 1; k < tr.steps.size(); ++k)
                    REQUIRE(tr.steps[k].v > tr.steps[k - 1].v);
            }
        }
    }
}

TEST_CASE("run_recursion five-step velocity matches a 50-digit reference") {
    const double L = choose_L(2.5, 1, 10.0, 68.0).L;
    const RecursionTrace tr =
        run_recursion(1.0, L, 5, 10.0, 68.0, 1.0, lambda_constant(0.25, 1), 2.5, 1);
    const double want = 9.956661290461499967103596e+28;
    REQUIRE(std::abs(tr.final_velocity - want) < 1e-12 * want);

    const json j = recursion_trace_to_json(tr);
    REQUIRE(j["n"] == 5);
    REQUIRE(j["steps"].size() == 5);
    REQUIRE(j["final_velocity"].get<double>() == tr.final_velocity);
}

TEST_CASE("run_recursion validates its inputs and reports overflow") {
    REQUIRE_THROWS_AS(run_recursion(1.0, 2.0, 0, kEuler, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(run_recursion(1.0, 1.0, 3, kEuler, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(run_recursion(1.0, 2.0, 3, 1.0, 68.0, 1.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_AS(run_recursion(1.0, 2.0, 3, kEuler, 68.0, 0.0, 1.0, 2.5, 1), DomainError);
    REQUIRE_THROWS_WITH(run_recursion(1.0, 1e60, 100, kEuler, 68.0, 1.0, 1.0, 2.5, 1),
                        ContainsSubstring("overflow at step"));
}

TEST_CASE("combine_bounds composes prefactors, exponents and velocities") {
    ExpBoundParams b1{1.0, 0.0, 1.0, 2.0, std::nullopt};
    ExpBoundParams b2{1.0, 0.0, 2.0, 2.0, std::nullopt};
    const ExpBoundParams out = combine_bounds(b1, b2, 1);
    REQUIRE(out.c == 64.0); // 2^{d+5}
    REQUIRE(out.xi_poly == 2.0);
    REQUIRE(out.v == 3.0);
    REQUIRE(out.ell == 2.0);
    REQUIRE_FALSE(out.delta_t.has_value());

    b1.delta_t = 3.0;
    REQUIRE(combine_bounds(b1, b2, 1).delta_t == 3.0);
    b2.delta_t = 2.0;
    REQUIRE(combine_bounds(b1, b2, 1).delta_t == 2.0); // min wins
    b1.delta_t.reset();
    REQUIRE(combine_bounds(b1, b2, 1).delta_t == 2.0);

    b2.ell = 1.5;
    REQUIRE_THROWS_AS(combine_bounds(b1, b2, 1), DomainError);
    b2.ell = 2.0;
    REQUIRE_THROWS_AS(combine_bounds(b1, b2, 0), DomainError);
}

TEST_CASE("one doubling round is bitwise-identical to self-composition") {
    for (int d : {1, 2, 3}) {
        for (double c0 : {1.0, 1.7}) {
            for (double xi0 : {0.0, 0.3}) {
                ExpBoundParams b0{c0, xi0, 2.0, 3.0, 1.25};
                const ExpBoundParams via_combine = combine_bounds(b0, b0, d);
                const ExtendedBound via_extend = extend_time(b0, d, 1, 2.0);
                REQUIRE(via_extend.bound.c == via_combine.c);
                REQUIRE(via_extend.bound.xi_poly == via_combine.xi_poly);
                REQUIRE(via_extend.bound.v == b0.v);
                REQUIRE(via_extend.bound.ell == b0.ell);
                REQUIRE(via_extend.bound.delta_t == 2.5); // horizon doubles
            }
        }
    }
}

TEST_CASE("extend_time squares the prefactor per round") {
    for (int d : {1, 2}) {
        ExpBoundParams b0{1.5, 0.25, 2.0, 3.0, 0.7};
        const ExtendedBound e2 = extend_time(b0, d, 2, 2.0);
        // c_2 = 2^{3(d+5)} * 1.5^4; both factors exact in binary
        REQUIRE(e2.bound.c == pow2int(3 * (d + 5)) * 5.0625);
        REQUIRE(e2.bound.xi_poly == 3.0 * (d + 1) + 4.0 * 0.25);
        REQUIRE(e2.bound.v == b0.v);
        REQUIRE(e2.bound.ell == b0.ell);
        REQUIRE(e2.bound.delta_t == 4.0 * 0.7);
        const ExtendedBound e3 = extend_time(b0, d, 3, 2.0);
        REQUIRE(e3.bound.delta_t == 8.0 * 0.7);
    }

    // k = 0 is the identity on everything
    const ExpBoundParams b{1.3, 0.5, 2.0, 3.0, std::nullopt};
    const ExtendedBound e0 = extend_time(b, 1, 0, 2.0);
    REQUIRE(e0.bound.c == b.c);
    REQUIRE(e0.bound.xi_poly == b.xi_poly);
    REQUIRE_FALSE(e0.bound.delta_t.has_value());
}

TEST_CASE("extend_time growth rate chi at radius e") {
    const ExpBoundParams b0{1.0, 0.0, 1.0, 1.0, 1.0};
    const ExtendedBound e = extend_time(b0, 1, 1, kEuler);
    REQUIRE(std::abs(e.chi - 12.317766166719343713) < 1e-13); // 12 log 2 + 4
}

TEST_CASE("extend_time rejects exponent overflow and bad inputs") {
    const ExpBoundParams b0{1.0, 0.0, 1.0, 1.0, 1.0};
    REQUIRE_THROWS_AS(extend_time(b0, 1, 21, 2.0), DomainError);
    REQUIRE_THROWS_AS(extend_time(b0, 1, -1, 2.0), DomainError);
    REQUIRE_THROWS_WITH(extend_time(b0, 1, 8, 2.0),
                        ContainsSubstring("overflows a double")); // 6 * 255 > 1023
    REQUIRE_THROWS_AS(extend_time(b0, 0, 1, 2.0), DomainError);
    REQUIRE_THROWS_AS(extend_time(b0, 1, 1, 0.5), DomainError);
}

TEST_CASE("delta_constant is exact at eta = 0 and matches the reference otherwise") {
    REQUIRE(delta_constant(2.5, 1, 0.0) == 6.0);
    REQUIRE(delta_constant(2.75, 1, 0.0) == 12.0);
    REQUIRE(std::abs(delta_constant(2.5, 1, 0.01) - 5.9701492537313432836) < 1e-14 * 6.0);
    REQUIRE_THROWS_AS(delta_constant(2.5, 1, -0.1), DomainError);
    REQUIRE_THROWS_AS(delta_constant(2.0, 1, 0.0), DomainError);
}

TEST_CASE("tighten_step improves the exponents as derived") {
    const double alpha = 2.5, eta = 0.01;
    const int d = 1;
    const double delta = delta_constant(alpha, d, eta);
    AlgBoundParams b;
    b.C = 1.0;
    b.kappa = delta;
    b.gamma = alpha * (alpha - d + 1.0) / (alpha - 2.0 * d); // 12.5
    b.beta = alpha - d;
    b.c_valid = 1.0;
    b.delta = delta;

    const AlgBoundParams nb = tighten_step(b, alpha, d, eta, delta);
    REQUIRE(std::abs(nb.beta - 1.4925) < 1e-14);
    REQUIRE(std::abs(nb.gamma - 9.3183333333333333333) < 1e-13);
    REQUIRE(std::abs(nb.kappa - 6.9800995024875621891) < 1e-12);
    REQUIRE(nb.C > 0.0);
    REQUIRE(nb.c_valid > 0.0);
    REQUIRE(nb.c_valid < 1.0); // c' = (2 K3)^{-gamma'/(1+eta w)} with K3 = 1

    AlgBoundParams bad = b;
    bad.beta = 0.5;
    REQUIRE_THROWS_AS(tighten_step(bad, alpha, d, eta, delta), DomainError);
    bad = b;
    bad.gamma = 0.0;
    REQUIRE_THROWS_AS(tighten_step(bad, alpha, d, eta, delta), DomainError);
    REQUIRE_THROWS_AS(tighten_step(b, alpha, d, 0.7, delta), DomainError); // eta >= 1/(alpha-d)
    REQUIRE_THROWS_AS(tighten_step(b, alpha, d, eta, 0.0), DomainError);
}

TEST_CASE("fixpoint_gamma converges to the closed-form limit") {
    const FixpointTrace a = fixpoint_gamma(2.5, 1, 0.0);
    REQUIRE(a.converged);
    REQUIRE(a.closed_form == 3.0);
    REQUIRE(std::abs(a.limit - 3.0) < 1e-8);

    const FixpointTrace b = fixpoint_gamma(2.5, 1, 0.01);
    REQUIRE(b.converged);
    REQUIRE(std::abs(b.closed_form - 2.985) < 1e-14);
    REQUIRE(std::abs(b.limit - b.closed_form) < 1e-8);

    const FixpointTrace c = fixpoint_gamma(2.9, 1, 0.0);
    REQUIRE(c.converged);
    REQUIRE(std::abs(c.limit - 19.0 / 9.0) < 1e-8);

    // beta is constant from the first tightening on; gamma converges monotonically
    for (size_t m = 2; m < a.steps.size(); ++m) {
        REQUIRE(a.steps[m].beta == a.steps[1].beta);
        REQUIRE(std::abs(a.steps[m].gamma - a.closed_form) <=
                std::abs(a.steps[m - 1].gamma - a.closed_form) + 1e-15);
    }

    const json j = fixpoint_trace_to_json(b);
    REQUIRE(j["converged"] == true);
    REQUIRE(j["limit"].get<double>() == b.limit);
    REQUIRE(j["steps"].size() == static_cast<size_t>(b.iterations) + 1);

    REQUIRE_THROWS_AS(fixpoint_gamma(2.5, 1, 0.7), DomainError);
    REQUIRE_THROWS_AS(fixpoint_gamma(2.5, 1, 0.0, 0.0), DomainError);
    REQUIRE_THROWS_AS(fixpoint_gamma(3.2, 1, 0.0), DomainError);
}

TEST_CASE("envelope epsilon window endpoint is the exact rational") {
    REQUIRE(envelope_epsilon_max(2.5, 1) == 1.0 / 7.0);
    REQUIRE_THROWS_AS(envelope_epsilon_max(2.0, 1), DomainError);
}

TEST_CASE("theorem_envelope matches the reference value and flags validity") {
    const EnvelopeValue ev = theorem_envelope(2.0, 1.0, 2.5, 1, 0.1);
    REQUIRE(ev.valid);
    REQUIRE(std::abs(ev.value - 0.79490488873860119547) < 1e-13);

    const EnvelopeValue zero = theorem_envelope(2.0, 0.0, 2.5, 1, 0.1);
    REQUIRE(zero.value == 0.0);
    REQUIRE(zero.valid);

    // validity boundary t = c_valid r^{alpha-2d-eps}
    const double tb = std::pow(2.0, 0.4);
    REQUIRE(theorem_envelope(2.0, tb, 2.5, 1, 0.1).valid);
    REQUIRE_FALSE(theorem_envelope(2.0, tb * (1.0 + 1e-12), 2.5, 1, 0.1).valid);

    // monotone in t, antitone in r
    REQUIRE(theorem_envelope(2.0, 0.5, 2.5, 1, 0.1).value <
            theorem_envelope(2.0, 1.0, 2.5, 1, 0.1).value);
    REQUIRE(theorem_envelope(4.0, 1.0, 2.5, 1, 0.1).value <
            theorem_envelope(2.0, 1.0, 2.5, 1, 0.1).value);

    REQUIRE_THROWS_AS(theorem_envelope(0.5, 1.0, 2.5, 1, 0.1), DomainError);
    REQUIRE_THROWS_AS(theorem_envelope(2.0, -1.0, 2.5, 1, 0.1), DomainError);
    REQUIRE_THROWS_AS(theorem_envelope(2.0, 1.0, 2.5, 1, 0.1, -1.0), DomainError);
    // the eps window is open; its endpoint is spelled out in the message
    REQUIRE_THROWS_WITH(theorem_envelope(2.0, 1.0, 2.5, 1, 1.0 / 7.0),
                        ContainsSubstring(format17(1.0 / 7.0)));
    REQUIRE_THROWS_AS(theorem_envelope(2.0, 1.0, 2.5, 1, 0.0), DomainError);
}

TEST_CASE("light cone regimes partition alpha and join continuously") {
    const LightCone lg = light_cone_exponent(1.5, 1);
    REQUIRE(lg.regime == ConeRegime::Logarithmic);
    REQUIRE(lg.exponent == 0.0);

    const LightCone poly = light_cone_exponent(2.5, 1);
    REQUIRE(poly.regime == ConeRegime::Polynomial);
    REQUIRE(poly.exponent == 0.5);

    const LightCone edge = light_cone_exponent(3.0, 1);
    REQUIRE(edge.regime == ConeRegime::Polynomial);
    REQUIRE(edge.exponent == 1.0); // meets the linear regime continuously

    const LightCone lin = light_cone_exponent(3.5, 1);
    REQUIRE(lin.regime == ConeRegime::Linear);
    REQUIRE(lin.exponent == 1.0);

    REQUIRE(cone_regime_name(ConeRegime::Logarithmic) == "logarithmic");
    REQUIRE(cone_regime_name(ConeRegime::Polynomial) == "polynomial");
    REQUIRE(cone_regime_name(ConeRegime::Linear) == "linear");
    REQUIRE_THROWS_AS(light_cone_exponent(0.9, 1), DomainError);
}

TEST_CASE("untruncated exponent matches the reference and dominates the naive one") {
    REQUIRE(std::abs(untrunc_exponent(2.5, 1, 0.01) - 4.2036121264244248549) < 1e-12 * 4.2);
    REQUIRE(untrunc_exponent(2.5, 1, 0.01) > (2.5 - 1.0) / (2.5 - 2.0));
    REQUIRE_THROWS_AS(untrunc_exponent(2.5, 1, 0.2), DomainError); // eps_max = 1/7
    REQUIRE_THROWS_AS(untrunc_exponent(2.5, 1, 0.0), DomainError);
}

TEST_CASE("rational arithmetic normalizes and detects overflow") {
    REQUIRE(rat(2, 4) == rat(1, 2));
    REQUIRE(rat(-2, -4) == rat(1, 2));
    REQUIRE(rat(2, -4).num == -1);
    REQUIRE(rat(2, -4).den == 2);
    REQUIRE(rat(0, 7) == rat(0));

    REQUIRE(rat(1, 2) + rat(1, 3) == rat(5, 6));
    REQUIRE(rat(1, 2) - rat(1, 3) == rat(1, 6));
    REQUIRE(rat(2, 3) * rat(3, 4) == rat(1, 2));
    REQUIRE(rat(1, 2) / rat(1, 3) == rat(3, 2));
    REQUIRE(rat(1, 2) != rat(1, 3));
    REQUIRE(rat_less(rat(1, 3), rat(1, 2)));
    REQUIRE_FALSE(rat_less(rat(1, 2), rat(1, 2)));
    REQUIRE(rat_value(rat(1, 2)) == 0.5);
    REQUIRE(rat_str(rat(3)) == "3");
    REQUIRE(rat_str(rat(-1, 2)) == "-1/2");

    REQUIRE_THROWS_AS(rat(1, 0), DomainError);
    REQUIRE_THROWS_AS(rat(1, 2) / rat(0), DomainError);
    const Rational big = rat(INT64_MAX);
    REQUIRE_THROWS_AS(big * big, DomainError);
}

TEST_CASE("rational_from_string accepts fractions, integers and decimals") {
    REQUIRE(rational_from_string("5/2") == rat(5, 2));
    REQUIRE(rational_from_string("3") == rat(3));
    REQUIRE(rational_from_string("2.5") == rat(5, 2));
    REQUIRE(rational_from_string("-0.75") == rat(-3, 4));
    REQUIRE(rational_from_string(".5") == rat(1, 2));
    REQUIRE(rational_from_string("-.75") == rat(-3, 4));
    REQUIRE(rational_from_string("0.142857142857143") == rat(142857142857143, 1000000000000000));

    REQUIRE_THROWS_AS(rational_from_string(""), ConfigError);
    REQUIRE_THROWS_AS(rational_from_string("abc"), ConfigError);
    REQUIRE_THROWS_AS(rational_from_string("2.5e1"), ConfigError);
    REQUIRE_THROWS_AS(rational_from_string("0.142857142857142857"), ConfigError); // > 15 digits
    REQUIRE_THROWS_AS(rational_from_string("1/0"), DomainError);
}

TEST_CASE("compare_bounds reproduces the exponent table at alpha = 5/2") {
    const BoundComparison cmp = compare_bounds(rat(5, 2), 1);

    REQUIRE(cmp.b1.gamma == rat(3));
    REQUIRE(cmp.b1.beta == rat(3, 2));
    REQUIRE(cmp.b1.gamma_untrunc == rat(4));
    REQUIRE(cmp.b1.beta_untrunc == rat(3, 2));
    REQUIRE(cmp.b1.phi == rat(8, 3));

    REQUIRE(cmp.b2.gamma == rat(25, 2));
    REQUIRE(cmp.b2.beta == rat(3, 2));
    REQUIRE(cmp.b2.gamma_untrunc == rat(27, 2));
    REQUIRE(cmp.b2.phi == rat(9));

    REQUIRE(cmp.b3.gamma == rat(3, 2));
    REQUIRE(cmp.b3.beta == rat(1, 2));
    REQUIRE(cmp.b3.gamma_untrunc == rat(3, 2));
    REQUIRE(cmp.b3.phi == rat(3));

    REQUIRE(cmp.phi12_direct == rat(-19, 3));
    REQUIRE(cmp.phi12_formula == rat(-19, 3));
    REQUIRE_FALSE(cmp.phi12_discrepancy);

    REQUIRE(cmp.phi13_direct == rat(-1, 3));
    REQUIRE(cmp.phi13_formula == rat(-13, 3));
    REQUIRE(cmp.phi13_discrepancy);
}

TEST_CASE("the phi13 formula disagrees with the table everywhere in the window") {
    for (int d : {1, 2, 3}) {
        for (long long k = 1; k <= 7; ++k) {
            const Rational alpha = rat(2 * d) + rat(k, 8);
            const BoundComparison cmp = compare_bounds(alpha, d);
            REQUIRE_FALSE(cmp.phi12_discrepancy);
            REQUIRE(cmp.phi13_discrepancy);
        }
    }
    REQUIRE_THROWS_AS(compare_bounds(rat(2), 1), DomainError);
    REQUIRE_THROWS_AS(compare_bounds(rat(3), 1), DomainError);
    REQUIRE_THROWS_AS(compare_bounds(rat(7, 2), 1), DomainError);
}

TEST_CASE("comparison JSON carries both phi values and the flags") {
    const json j = comparison_to_json(compare_bounds(rat(5, 2), 1));
    REQUIRE(j["B1"]["phi"]["num"] == 8);
    REQUIRE(j["B1"]["phi"]["den"] == 3);
    REQUIRE(j["phi12_discrepancy"] == false);
    REQUIRE(j["phi13_discrepancy"] == true);
    REQUIRE(j["phi13_direct"]["num"] == -1);
    REQUIRE(j["phi13_formula"]["num"] == -13);
}

TEST_CASE("algebraic currency evaluation and the correlator envelope") {
    AlgBoundParams b;
    b.C = 1.0;
    b.kappa = 0.0;
    b.gamma = 1.0;
    b.beta = 2.0;
    REQUIRE(eval_alg_bound(b, 2.0, 1.0, kEuler) == 0.25);
    REQUIRE(correlator_envelope(b, 2.0, 1.0) == 4.0); // 2^{beta+2} t^gamma / r^beta
    REQUIRE_THROWS_AS(eval_alg_bound(b, 2.0, 1.0, 1.0), DomainError);
    REQUIRE_THROWS_AS(correlator_envelope(b, 0.5, 1.0), DomainError);
    REQUIRE_THROWS_AS(correlator_envelope(b, 2.0, -1.0), DomainError);
}
