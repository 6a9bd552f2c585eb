#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lrcone/errors.hpp"
#include "lrcone/io.hpp"

namespace lrcone {

inline constexpr double kEuler = 2.718281828459045235360287471352662498;

inline double ipow(double base, int e) {
    double p = 1.0;
    for (int k = 0; k < e; ++k) p *= base;
    return p;
}

// exact power of two (exponent shift only, no rounding)
inline double pow2int(int k) { return std::ldexp(1.0, k); }

inline void require_alpha_window(double alpha, int d, const std::string& who) {
    if (!(alpha > 2.0 * d && alpha < 2.0 * d + 1.0))
        throw DomainError(who + ": alpha must lie in (2d, 2d+1) = (" + format17(2.0 * d) +
                          ", " + format17(2.0 * d + 1.0) + "), got " + format17(alpha));
}

// ---- exponential-envelope bounds ---------------------------------------------------
//
// Currency: ||P_r O(t)|| <= c * r^xi_poly * exp((v t - r) / ell),
// optionally valid only for t <= delta_t.

struct ExpBoundParams {
    double c = 1.0;
    double xi_poly = 0.0;
    double v = 0.0;
    double ell = 1.0;
    std::optional<double> delta_t; // absent = unbounded horizon
};

inline double eval_exp_bound(const ExpBoundParams& b, double r, double t) {
    return b.c * std::pow(r, b.xi_poly) * std::exp((b.v * t - r) / b.ell);
}

// Shortest-shell seed: c = 1, no polynomial prefactor, v = 4 e tau ell1.
inline ExpBoundParams base_bound(double tau_val, double ell1) {
    if (tau_val <= 0.0) throw DomainError("base_bound: tau must be positive");
    if (ell1 < 1.0) throw DomainError("base_bound: ell1 must be >= 1");
    return ExpBoundParams{1.0, 0.0, 4.0 * kEuler * tau_val * ell1, ell1, std::nullopt};
}

inline double xi_constant(int d) {
    if (d < 1) throw DomainError("xi_constant: d must be >= 1");
    return 4.0 * (4.0 * d + 13.0);
}

inline double g_constant(double eps, int d) {
    if (d < 1) throw DomainError("g_constant: d must be >= 1");
    if (eps <= 0.0 || eps > 0.5) throw DomainError("g_constant: need 0 < eps <= 1/2");
    return std::tgamma(static_cast<double>(d) + 1.0) / std::pow(eps, d);
}

// Shell-summation constant. Reconstruction, in evaluation order:
//   g = d! / eps^d
//   g~ = g^2 * exp(2 eps + eps sqrt(d)) * (1 + e^{1+eps})^2 * 2^{2d}
//   lambda = g~ * e^2/(e-1) * e^{2+sqrt(d)} * (e/(e-1) + g) * e^{1/(1-eps)} * (1-eps)^{2d}
// Regression-pinned in tests against an independent 50-digit evaluation.
inline double lambda_constant(double eps, int d) {
    const double g = g_constant(eps, d);
    const double sqd = std::sqrt(static_cast<double>(d));
    const double gt = g * g * std::exp(2.0 * eps + eps * sqd) *
                      std::pow(1.0 + std::exp(1.0 + eps), 2.0) * std::pow(4.0, d);
    return gt * (kEuler * kEuler / (kEuler - 1.0)) * std::exp(2.0 + sqd) *
           (kEuler / (kEuler - 1.0) + g) * std::exp(1.0 / (1.0 - eps)) *
           std::pow(1.0 - eps, 2.0 * d);
}

// ---- velocity recursion ---------------------------------------------------------------

// One shell step: v_{k+1} = xi log(r*) v_k + nu lambda ell_{k+1}^{2d+1} / ell_k^alpha.
// The power ratio is evaluated in log space; the direct quotient overflows for
// large shells long before the ratio itself does.
inline double recursion_step(double v_k, double ell_k, double ell_next, double rstar,
                             double xi, double nu, double lambda, double alpha, int d) {
    if (ell_k < 1.0) throw DomainError("recursion_step: ell_k must be >= 1");
    if (ell_next <= ell_k) throw DomainError("recursion_step: ell_next must exceed ell_k");
    if (rstar < kEuler) throw DomainError("recursion_step: rstar must be >= e");
    if (d < 1) throw DomainError("recursion_step: d must be >= 1");
    const double shell = std::exp((2.0 * d + 1.0) * std::log(ell_next) - alpha * std::log(ell_k));
    return xi * std::log(rstar) * v_k + nu * lambda * shell;
}

struct ChosenL {
    double L = 0.0;
    bool degenerate = false; // L <= 1, only possible when xi log(r*) <= 1
};

inline ChosenL choose_L(double alpha, int d, double rstar, double xi) {
    require_alpha_window(alpha, d, "choose_L");
    if (rstar < kEuler) throw DomainError("choose_L: rstar must be >= e");
    if (xi <= 0.0) throw DomainError("choose_L: xi must be positive");
    const double x = xi * std::log(rstar);
    const double L = std::pow(x, 1.0 / (2.0 * d + 1.0 - alpha));
    return ChosenL{L, L <= 1.0};
}

struct ChosenN {
    int n = 1;
    bool clamped = false;
    double raw = 0.0;
};

// n = floor( log(r (t / r^{alpha-2d})^eta) / log L ), clamped below at 1.
inline ChosenN choose_n(double r, double t, double alpha, int d, double eta, double L) {
    if (r < 1.0) throw DomainError("choose_n: r must be >= 1");
    if (t <= 0.0) throw DomainError("choose_n: t must be positive");
    if (eta < 0.0) throw DomainError("choose_n: eta must be >= 0");
    if (L <= 1.0) throw DomainError("choose_n: L must exceed 1");
    const double arg = r * std::pow(t / std::pow(r, alpha - 2.0 * d), eta);
    ChosenN res;
    res.raw = std::log(arg) / std::log(L);
    const double fl = std::floor(res.raw);
    if (fl < 1.0) {
        res.n = 1;
        res.clamped = true;
    } else {
        res.n = static_cast<int>(fl);
    }
    return res;
}

struct RecursionStepRecord {
    int k = 0;
    double ell = 0.0;
    double v = 0.0;
};

struct RecursionTrace {
    double tau = 0.0, L = 0.0, rstar = 0.0, xi = 0.0, nu = 0.0, lambda = 0.0, alpha = 0.0;
    int d = 0, n = 0;
    std::vector<RecursionStepRecord> steps;
    double final_velocity = 0.0;
};

/**
 * Iterate the shell recursion n-1 times from v_1 = 4 e tau L, ell_k = L^k.
 * With L = (xi log r*)^{1/(2d+1-alpha)} the result collapses to the closed form
 * x^{n-1} (v_1 + (n-1) L^{2d+1} nu lambda), x = xi log r*; tests pin that identity.
 */
inline RecursionTrace run_recursion(double tau_val, double L, int n, double rstar, double xi,
                                    double nu, double lambda, double alpha, int d) {
    if (n < 1) throw DomainError("run_recursion: n must be >= 1");
    if (L <= 1.0) throw DomainError("run_recursion: L must exceed 1");
    if (rstar < kEuler) throw DomainError("run_recursion: rstar must be >= e");
    if (d < 1) throw DomainError("run_recursion: d must be >= 1");
    if (nu <= 0.0 || lambda <= 0.0) throw DomainError("run_recursion: nu, lambda must be positive");

    RecursionTrace tr;
    tr.tau = tau_val;
    tr.L = L;
    tr.rstar = rstar;
    tr.xi = xi;
    tr.nu = nu;
    tr.lambda = lambda;
    tr.alpha = alpha;
    tr.d = d;
    tr.n = n;

    const double x = xi * std::log(rstar);
    const double logL = std::log(L);
    double v = base_bound(tau_val, L).v;
    tr.steps.push_back({1, L, v});
    for (int k = 1; k < n; ++k) {
        const double shell =
            std::exp(logL * ((2.0 * d + 1.0) * (k + 1) - alpha * static_cast<double>(k)));
        v = x * v + nu * lambda * shell;
        const double ell = ipow(L, k + 1);
        if (!std::isfinite(v) || !std::isfinite(ell))
            throw DomainError("run_recursion: overflow at step " + std::to_string(k + 1));
        tr.steps.push_back({k + 1, ell, v});
    }
    tr.final_velocity = v;
    return tr;
}

inline json recursion_trace_to_json(const RecursionTrace& tr) {
    json j;
    j["tau"] = tr.tau;
    j["L"] = tr.L;
    j["rstar"] = tr.rstar;
    j["xi"] = tr.xi;
    j["nu"] = tr.nu;
    j["lambda"] = tr.lambda;
    j["alpha"] = tr.alpha;
    j["d"] = tr.d;
    j["n"] = tr.n;
    json steps = json::array();
    for (const auto& s : tr.steps) {
        json e;
        e["k"] = s.k;
        e["ell"] = s.ell;
        e["v"] = s.v;
        steps.push_back(std::move(e));
    }
    j["steps"] = std::move(steps);
    j["final_velocity"] = tr.final_velocity;
    return j;
}

// ---- composition and time extension ------------------------------------------------------

// Compose two envelopes evaluated at the same time. Requires the second
// (outer) length scale to dominate: ell2 >= ell1.
inline ExpBoundParams combine_bounds(const ExpBoundParams& b1, const ExpBoundParams& b2, int d) {
    if (d < 1) throw DomainError("combine_bounds: d must be >= 1");
    if (b2.ell < b1.ell) throw DomainError("combine_bounds: need b2.ell >= b1.ell");
    ExpBoundParams out;
    out.c = pow2int(d + 5) * b1.c * b2.c;
    out.xi_poly = b1.xi_poly + b2.xi_poly + (d + 1);
    out.v = b1.v + b2.v;
    out.ell = b2.ell;
    if (b1.delta_t && b2.delta_t)
        out.delta_t = std::min(*b1.delta_t, *b2.delta_t);
    else if (b1.delta_t)
        out.delta_t = b1.delta_t;
    else
        out.delta_t = b2.delta_t;
    return out;
}

struct ExtendedBound {
    ExpBoundParams bound;
    double chi = 0.0; // all-time form: exp(chi t / delta_t + (v t - r) / ell)
};

/**
 * k rounds of horizon doubling. Velocity and length scale are unchanged (each
 * factor is evaluated at half the time); the prefactors square per round:
 *   c_k = 2^{(d+5)(2^k-1)} c0^{2^k},  xi_k = (2^k-1)(d+1) + 2^k xi0.
 * One round is bitwise-identical in (c, xi_poly) to combine_bounds(b0, b0).
 * chi = 2 (log(2^{d+5} c0) + (d+1+xi0) log r) absorbs the growth at radius r.
 */
inline ExtendedBound extend_time(const ExpBoundParams& b0, int d, int k, double r) {
    if (d < 1) throw DomainError("extend_time: d must be >= 1");
    if (k < 0 || k > 20) throw DomainError("extend_time: need 0 <= k <= 20");
    if (r < 1.0) throw DomainError("extend_time: r must be >= 1");
    const std::int64_t m = static_cast<std::int64_t>(1) << k;
    const std::int64_t c_exp = static_cast<std::int64_t>(d + 5) * (m - 1);
    if (c_exp > 1023) throw DomainError("extend_time: prefactor exponent overflows a double");
    ExtendedBound out;
    out.bound.c = pow2int(static_cast<int>(c_exp)) * ipow(b0.c, static_cast<int>(m));
    out.bound.xi_poly = static_cast<double>(m - 1) * (d + 1) + static_cast<double>(m) * b0.xi_poly;
    out.bound.v = b0.v;
    out.bound.ell = b0.ell;
    if (b0.delta_t) out.bound.delta_t = static_cast<double>(m) * *b0.delta_t;
    out.chi = 2.0 * (std::log(pow2int(d + 5) * b0.c) + (d + 1 + b0.xi_poly) * std::log(r));
    return out;
}

// ---- algebraic bounds and recursive tightening ----------------------------------------------
//
// Currency: ||P_r O(t)|| <= C log^kappa(r*) t^gamma / r^beta,
// valid while t^gamma <= c_valid r^beta / log^delta(r*).

struct AlgBoundParams {
    double C = 1.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double c_valid = 1.0;
    double delta = 0.0;
};

inline double eval_alg_bound(const AlgBoundParams& b, double r, double t, double rstar) {
    if (rstar < kEuler) throw DomainError("eval_alg_bound: rstar must be >= e");
    return b.C * std::pow(std::log(rstar), b.kappa) * std::pow(t, b.gamma) / std::pow(r, b.beta);
}

inline double delta_constant(double alpha, int d, double eta) {
    require_alpha_window(alpha, d, "delta_constant");
    if (eta < 0.0) throw DomainError("delta_constant: eta must be >= 0");
    const double w = 2.0 * d + 1.0 - alpha;
    return (2.0 * d + 1.0) / (w * (1.0 + eta * w));
}

// Slots for constants the derivation leaves unpinned; every displayed chain is
// propagated, everything else defaults to 1.
struct UnpinnedConstants {
    double K1 = 1.0, K2 = 1.0, K3 = 1.0, K5 = 1.0;
};

/**
 * One tightening pass: feed an algebraic bound through the short-time/long-time
 * split and read off the improved exponents,
 *   kappa' = max(kappa - delta (beta-d)/beta + (alpha-d)/(2d+1-alpha), delta)
 *   gamma' = gamma d / beta + 1 - eta (alpha-d)
 *   beta'  = alpha - d - eta (alpha-2d)(alpha-d).
 * beta' > d holds exactly when eta < 1/(alpha-d), which is required.
 */
inline AlgBoundParams tighten_step(const AlgBoundParams& b, double alpha, int d, double eta,
                                   double delta, const UnpinnedConstants& K = {}) {
    require_alpha_window(alpha, d, "tighten_step");
    if (b.beta <= static_cast<double>(d)) throw DomainError("tighten_step: beta must exceed d");
    if (eta < 0.0 || eta >= 1.0 / (alpha - d))
        throw DomainError("tighten_step: need 0 <= eta < 1/(alpha-d)");
    if (delta <= 0.0) throw DomainError("tighten_step: delta must be positive");
    if (b.gamma <= 0.0) throw DomainError("tighten_step: gamma must be positive");

    AlgBoundParams out;
    out.kappa = std::max(b.kappa - delta * (b.beta - d) / b.beta + (alpha - d) / (2.0 * d + 1.0 - alpha),
                         delta);
    out.gamma = b.gamma * d / b.beta + 1.0 - eta * (alpha - d);
    out.beta = alpha - d - eta * (alpha - 2.0 * d) * (alpha - d);
    out.delta = delta;

    const double kc = 4.0 * K.K1 *
                      (std::pow(2.0, d + 1) * std::pow(b.c_valid, -static_cast<double>(d) / b.beta) +
                       b.C * K.K2 * std::pow(b.c_valid, -(b.beta - d) / b.beta)) *
                      b.beta / (b.gamma * d + b.beta);
    out.C = kc * std::pow(xi_constant(d), (alpha - d) / (2.0 * d + 1.0 - alpha)) + K.K5;
    out.c_valid = std::pow(2.0 * K.K3, -out.gamma / (1.0 + eta * (2.0 * d + 1.0 - alpha)));
    return out;
}

struct FixpointStepRecord {
    int m = 0;
    double gamma = 0.0, beta = 0.0, kappa = 0.0;
};

struct FixpointTrace {
    double alpha = 0.0, eta = 0.0, tol = 0.0;
    int d = 0, max_iter = 0;
    std::vector<FixpointStepRecord> steps;
    bool converged = false;
    int iterations = 0;
    double limit = 0.0;      // last iterate
    double closed_form = 0.0; // (alpha-d-eta(alpha-2d)(alpha-d))/(alpha-2d)
};

/**
 * Iterate tighten_step from the long-range seed
 *   gamma_0 = alpha (alpha-d+1)/(alpha-2d), beta_0 = alpha-d, kappa_0 = delta
 * until |gamma_{m+1} - gamma_m| < tol. beta is constant from the first step on,
 * so the gamma map is affine with slope d/beta': convergence is geometric and
 * monotone, and the limit admits the closed form recorded alongside.
 */
inline FixpointTrace fixpoint_gamma(double alpha, int d, double eta, double tol = 1e-10,
                                    int max_iter = 10000) {
    require_alpha_window(alpha, d, "fixpoint_gamma");
    if (eta < 0.0 || eta >= 1.0 / (alpha - d))
        throw DomainError("fixpoint_gamma: need 0 <= eta < 1/(alpha-d)");
    if (tol <= 0.0) throw DomainError("fixpoint_gamma: tol must be positive");

    FixpointTrace tr;
    tr.alpha = alpha;
    tr.eta = eta;
    tr.tol = tol;
    tr.d = d;
    tr.max_iter = max_iter;
    tr.closed_form = (alpha - d - eta * (alpha - 2.0 * d) * (alpha - d)) / (alpha - 2.0 * d);

    const double delta = delta_constant(alpha, d, eta);
    AlgBoundParams b;
    b.C = 1.0;
    b.kappa = delta;
    b.gamma = alpha * (alpha - d + 1.0) / (alpha - 2.0 * d);
    b.beta = alpha - d;
    b.c_valid = 1.0;
    b.delta = delta;
    tr.steps.push_back({0, b.gamma, b.beta, b.kappa});

    for (int m = 1; m <= max_iter; ++m) {
        const AlgBoundParams nb = tighten_step(b, alpha, d, eta, delta);
        tr.steps.push_back({m, nb.gamma, nb.beta, nb.kappa});
        const double diff = std::abs(nb.gamma - b.gamma);
        b = nb;
        if (diff < tol) {
            tr.converged = true;
            tr.iterations = m;
            break;
        }
    }
    if (!tr.converged) tr.iterations = max_iter;
    tr.limit = b.gamma;
    return tr;
}

inline json fixpoint_trace_to_json(const FixpointTrace& tr) {
    json j;
    j["alpha"] = tr.alpha;
    j["d"] = tr.d;
    j["eta"] = tr.eta;
    j["tol"] = tr.tol;
    j["max_iter"] = tr.max_iter;
    json steps = json::array();
    for (const auto& s : tr.steps) {
        json e;
        e["m"] = s.m;
        e["gamma"] = s.gamma;
        e["beta"] = s.beta;
        e["kappa"] = s.kappa;
        steps.push_back(std::move(e));
    }
    j["steps"] = std::move(steps);
    j["converged"] = tr.converged;
    j["iterations"] = tr.iterations;
    j["limit"] = tr.limit;
    j["closed_form"] = tr.closed_form;
    return j;
}

// ---- final envelope -------------------------------------------------------------------------

inline double envelope_epsilon_max(double alpha, int d) {
    require_alpha_window(alpha, d, "envelope_epsilon_max");
    const double a2 = (alpha - 2.0 * d) * (alpha - 2.0 * d);
    return a2 / (a2 + alpha - d);
}

struct EnvelopeValue {
    double value = 0.0;
    bool valid = false; // t <= c_valid r^{alpha-2d-eps}
};

/**
 * Final light-cone envelope
 *   C1 (t / r^{alpha-2d-eps})^{(alpha-d)/(alpha-2d) - eps/2} + C2 t / r^{alpha-d},
 * flagged valid while t <= c_valid r^{alpha-2d-eps}.
 */
inline EnvelopeValue theorem_envelope(double r, double t, double alpha, int d, double eps,
                                      double C1 = 1.0, double C2 = 1.0, double c_valid = 1.0) {
    require_alpha_window(alpha, d, "theorem_envelope");
    if (r < 1.0) throw DomainError("theorem_envelope: r must be >= 1");
    if (t < 0.0) throw DomainError("theorem_envelope: t must be >= 0");
    if (C1 < 0.0 || C2 < 0.0 || c_valid <= 0.0)
        throw DomainError("theorem_envelope: constants must be positive");
    const double eps_max = envelope_epsilon_max(alpha, d);
    if (!(eps > 0.0 && eps < eps_max))
        throw DomainError("theorem_envelope: eps must lie in (0, " + format17(eps_max) +
                          "), got " + format17(eps));
    EnvelopeValue out;
    const double front = std::pow(t / std::pow(r, alpha - 2.0 * d - eps),
                                  (alpha - d) / (alpha - 2.0 * d) - eps / 2.0);
    out.value = C1 * front + C2 * t / std::pow(r, alpha - d);
    out.valid = t <= c_valid * std::pow(r, alpha - 2.0 * d - eps);
    return out;
}

enum class ConeRegime { Logarithmic, Polynomial, Linear };

struct LightCone {
    ConeRegime regime = ConeRegime::Polynomial;
    double exponent = 0.0; // t ~ r^exponent (0 marks the logarithmic regime)
};

inline LightCone light_cone_exponent(double alpha, int d) {
    if (d < 1) throw DomainError("light_cone_exponent: d must be >= 1");
    if (alpha <= static_cast<double>(d))
        throw DomainError("light_cone_exponent: alpha must exceed d");
    if (alpha <= 2.0 * d) return {ConeRegime::Logarithmic, 0.0};
    if (alpha <= 2.0 * d + 1.0) return {ConeRegime::Polynomial, alpha - 2.0 * d};
    return {ConeRegime::Linear, 1.0};
}

inline std::string cone_regime_name(ConeRegime r) {
    switch (r) {
        case ConeRegime::Logarithmic: return "logarithmic";
        case ConeRegime::Polynomial: return "polynomial";
        case ConeRegime::Linear: return "linear";
    }
    return "polynomial";
}

// Exponent survived by the truncation argument; always at least (alpha-d)/(alpha-2d).
inline double untrunc_exponent(double alpha, int d, double eps) {
    require_alpha_window(alpha, d, "untrunc_exponent");
    const double eps_max = envelope_epsilon_max(alpha, d);
    if (!(eps > 0.0 && eps < eps_max))
        throw DomainError("untrunc_exponent: eps must lie in (0, " + format17(eps_max) +
                          "), got " + format17(eps));
    const double A = alpha - 2.0 * d;
    const double B = alpha - d;
    return (1.0 + B / A - eps) * (A - eps) / (A - eps * (A * A + B) / A + eps * eps);
}

// ---- exact-rational bound comparison -----------------------------------------------------------

struct Rational {
    long long num = 0;
    long long den = 1;
};

namespace detail {

inline long long check_narrow(__int128 v, const char* who) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw DomainError(std::string(who) + ": rational overflow");
    return static_cast<long long>(v);
}

inline Rational rat_normalize(__int128 num, __int128 den) {
    if (den == 0) throw DomainError("rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num, b = den;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    return Rational{check_narrow(num / a, "rational"), check_narrow(den / a, "rational")};
}

} // namespace detail

inline Rational rat(long long num, long long den = 1) {
    return detail::rat_normalize(num, den);
}

inline Rational operator+(const Rational& a, const Rational& b) {
    return detail::rat_normalize(static_cast<__int128>(a.num) * b.den +
                                     static_cast<__int128>(b.num) * a.den,
                                 static_cast<__int128>(a.den) * b.den);
}
inline Rational operator-(const Rational& a, const Rational& b) {
    return detail::rat_normalize(static_cast<__int128>(a.num) * b.den -
                                     static_cast<__int128>(b.num) * a.den,
                                 static_cast<__int128>(a.den) * b.den);
}
inline Rational operator*(const Rational& a, const Rational& b) {
    return detail::rat_normalize(static_cast<__int128>(a.num) * b.num,
                                 static_cast<__int128>(a.den) * b.den);
}
inline Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw DomainError("rational: division by zero");
    return detail::rat_normalize(static_cast<__int128>(a.num) * b.den,
                                 static_cast<__int128>(a.den) * b.num);
}
inline bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
}
inline bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
inline bool rat_less(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}
inline double rat_value(const Rational& a) {
    return static_cast<double>(a.num) / static_cast<double>(a.den);
}
inline std::string rat_str(const Rational& a) {
    return a.den == 1 ? std::to_string(a.num) : std::to_string(a.num) + "/" + std::to_string(a.den);
}

// "2.5" -> 5/2, "-0.75" -> -3/4, "5/2" -> 5/2, "3" -> 3.
inline Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw ConfigError("rational: empty string");
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            size_t p1, p2;
            const long long num = std::stoll(s.substr(0, slash), &p1);
            const long long den = std::stoll(s.substr(slash + 1), &p2);
            if (p1 != slash || p2 != s.size() - slash - 1) throw std::invalid_argument("");
            return rat(num, den);
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) {
            size_t p;
            const long long v = std::stoll(s, &p);
            if (p != s.size()) throw std::invalid_argument("");
            return rat(v);
        }
        const std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.empty() || fp.size() > 15) throw std::invalid_argument("");
        for (char c : fp)
            if (c < '0' || c > '9') throw std::invalid_argument("");
        size_t p;
        const long long whole = std::stoll(ip.empty() || ip == "-" ? ip + "0" : ip, &p);
        long long den = 1;
        for (size_t k = 0; k < fp.size(); ++k) den *= 10;
        const long long frac = std::stoll(fp);
        const bool neg = !ip.empty() && ip[0] == '-';
        const __int128 num =
            static_cast<__int128>(whole) * den + (neg ? -static_cast<__int128>(frac) : frac);
        return detail::rat_normalize(num, den);
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("rational: cannot parse '" + s + "'");
    }
}

struct BoundRow {
    Rational gamma, beta, gamma_untrunc, beta_untrunc, phi;
};

struct BoundComparison {
    Rational alpha;
    int d = 1;
    BoundRow b1, b2, b3;
    Rational phi12_direct, phi12_formula;
    bool phi12_discrepancy = false;
    Rational phi13_direct, phi13_formula;
    bool phi13_discrepancy = false;
};

/**
 * Exponent table for the three bound families, before and after untruncation,
 * in exact rational arithmetic. phi = gamma'/beta' is the light-cone exponent
 * read off each row. The published formula for phi_1 - phi_3 does not match
 * the row difference anywhere in the window (they coincide only at alpha = d);
 * both values are reported and the discrepancy is flagged, never reconciled.
 */
inline BoundComparison compare_bounds(const Rational& alpha, int d) {
    if (d < 1) throw DomainError("compare_bounds: d must be >= 1");
    const Rational rd = rat(d);
    const Rational two_d = rat(2 * d);
    const Rational two_d1 = rat(2 * d + 1);
    if (!rat_less(two_d, alpha) || !rat_less(alpha, two_d1))
        throw DomainError("compare_bounds: alpha must lie in (2d, 2d+1) = (" + rat_str(two_d) +
                          ", " + rat_str(two_d1) + "), got " + rat_str(alpha));

    const Rational one = rat(1);
    const Rational ad = alpha - rd;        // alpha - d
    const Rational a2d = alpha - two_d;    // alpha - 2d

    BoundComparison cmp;
    cmp.alpha = alpha;
    cmp.d = d;

    cmp.b1.gamma = ad / a2d;
    cmp.b1.beta = ad;
    cmp.b1.gamma_untrunc = cmp.b1.gamma + one;
    cmp.b1.beta_untrunc = cmp.b1.beta;

    cmp.b2.gamma = alpha * (ad + one) / a2d;
    cmp.b2.beta = ad;
    cmp.b2.gamma_untrunc = cmp.b2.gamma + one;
    cmp.b2.beta_untrunc = cmp.b2.beta;

    cmp.b3.gamma = ad;
    cmp.b3.beta = a2d;
    cmp.b3.gamma_untrunc = cmp.b3.gamma;
    cmp.b3.beta_untrunc = cmp.b3.beta;

    for (BoundRow* row : {&cmp.b1, &cmp.b2, &cmp.b3})
        row->phi = row->gamma_untrunc / row->beta_untrunc;

    cmp.phi12_direct = cmp.b1.phi - cmp.b2.phi;
    cmp.phi12_formula = rat(0) - ((alpha - one) * ad + alpha) / (ad * a2d);
    cmp.phi12_discrepancy = cmp.phi12_direct != cmp.phi12_formula;

    cmp.phi13_direct = cmp.b1.phi - cmp.b3.phi;
    cmp.phi13_formula = rat(0) - (ad * ad + rd) / (a2d * ad);
    cmp.phi13_discrepancy = cmp.phi13_direct != cmp.phi13_formula;
    return cmp;
}

inline json rational_to_json(const Rational& r) {
    json j;
    j["num"] = r.num;
    j["den"] = r.den;
    j["value"] = rat_value(r);
    return j;
}

inline json comparison_to_json(const BoundComparison& cmp) {
    json j;
    j["alpha"] = rational_to_json(cmp.alpha);
    j["d"] = cmp.d;
    auto row = [](const BoundRow& r) {
        json e;
        e["gamma"] = rational_to_json(r.gamma);
        e["beta"] = rational_to_json(r.beta);
        e["gamma_untrunc"] = rational_to_json(r.gamma_untrunc);
        e["beta_untrunc"] = rational_to_json(r.beta_untrunc);
        e["phi"] = rational_to_json(r.phi);
        return e;
    };
    j["B1"] = row(cmp.b1);
    j["B2"] = row(cmp.b2);
    j["B3"] = row(cmp.b3);
    j["phi12_direct"] = rational_to_json(cmp.phi12_direct);
    j["phi12_formula"] = rational_to_json(cmp.phi12_formula);
    j["phi12_discrepancy"] = cmp.phi12_discrepancy;
    j["phi13_direct"] = rational_to_json(cmp.phi13_direct);
    j["phi13_formula"] = rational_to_json(cmp.phi13_formula);
    j["phi13_discrepancy"] = cmp.phi13_discrepancy;
    return j;
}

// Correlator envelope 2^{beta+2} C log^kappa(r*) t^gamma / r^beta.
inline double correlator_envelope(const AlgBoundParams& b, double r, double t,
                                  double rstar = kEuler) {
    if (r < 1.0) throw DomainError("correlator_envelope: r must be >= 1");
    if (t < 0.0) throw DomainError("correlator_envelope: t must be >= 0");
    if (rstar < kEuler) throw DomainError("correlator_envelope: rstar must be >= e");
    return std::pow(2.0, b.beta + 2.0) * b.C * std::pow(std::log(rstar), b.kappa) *
           std::pow(t, b.gamma) / std::pow(r, b.beta);
}

} // namespace lrcone
