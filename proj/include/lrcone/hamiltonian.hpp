#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/errors.hpp"
#include "lrcone/io.hpp"
#include "lrcone/lattice.hpp"
#include "lrcone/rng.hpp"

namespace lrcone {

using cplx = std::complex<double>;

// Two-site coupling h acting on (site i) x (site j), i < j, row index 2*b_i + b_j.
// Invariant: Hermitian, operator norm <= dist(i,j)^{-alpha}.
struct CouplingTerm {
    int i = 0, j = 0;
    Eigen::Matrix4cd h;
};

struct PowerLawHamiltonian {
    Lattice lattice;
    double alpha = 0.0;
    std::string ensemble;
    std::uint64_t seed = 0;
    std::vector<CouplingTerm> terms;
};

inline double op_norm4(const Eigen::Matrix4cd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline bool is_hermitian4(const Eigen::Matrix4cd& m, double tol = 1e-12) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

inline Eigen::Matrix4cd zz4() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    m(2, 2) = -1.0;
    m(3, 3) = 1.0;
    return m;
}

// (XX + YY)/2: unit operator norm, so the |u|*dist^{-alpha} norm contract is exact.
inline Eigen::Matrix4cd xy4() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    return m;
}

inline Eigen::Matrix4cd random_hermitian_unit4(Rng& rng) {
    for (;;) {
        Eigen::Matrix4cd g;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) g(a, b) = cplx(rng.gaussian(), rng.gaussian());
        Eigen::Matrix4cd h = 0.5 * (g + g.adjoint());
        const double nrm = op_norm4(h);
        if (nrm > 1e-8) return h / nrm;
        // norm ~ 0 has probability ~ 0; redraw keeps determinism
    }
}

} // namespace detail

/**
 * Draw a power-law Hamiltonian: one term per site pair, with
 * ||h_ij|| = |u_ij| * dist(i,j)^{-alpha}, u_ij uniform on [-1,1].
 * Per-pair RNG streams are keyed by (seed, i, j), so the draw for a pair never
 * depends on enumeration order. Same seed implies bit-identical terms.
 */
inline PowerLawHamiltonian sample_hamiltonian(const Lattice& lat, double alpha,
                                              const std::string& ensemble,
                                              std::uint64_t seed) {
    if (alpha <= static_cast<double>(lat.d))
        throw DomainError("sample_hamiltonian: alpha must exceed d (alpha > " +
                          std::to_string(lat.d) + ")");
    int kind;
    if (ensemble == "ising_zz") kind = 0;
    else if (ensemble == "xy") kind = 1;
    else if (ensemble == "random_two_body") kind = 2;
    else throw ConfigError("sample_hamiltonian: unknown ensemble '" + ensemble +
                           "' (ising_zz|xy|random_two_body)");

    PowerLawHamiltonian ham;
    ham.lattice = lat;
    ham.alpha = alpha;
    ham.ensemble = ensemble;
    ham.seed = seed;

    const int n = lat.n_sites();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Rng rng(split_seed(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
            const double u = rng.uniform_pm1();
            const double scale = u * std::pow(lat.dist(i, j), -alpha);
            CouplingTerm term;
            term.i = i;
            term.j = j;
            switch (kind) {
                case 0: term.h = scale * detail::zz4(); break;
                case 1: term.h = scale * detail::xy4(); break;
                default: term.h = scale * detail::random_hermitian_unit4(rng); break;
            }
            ham.terms.push_back(std::move(term));
        }
    }
    return ham;
}

// ---- range decomposition -----------------------------------------------------

// Shell edges ell_0 = 0, ell_k = L^k (k = 1..n), ell_{n+1} = rstar.
// buckets[k-1] holds indices of terms with dist in (ell_{k-1}, ell_k].
struct RangeBuckets {
    std::vector<double> edges;           // size n+2
    std::vector<std::vector<int>> buckets; // size n+1
};

inline RangeBuckets range_bucket(const PowerLawHamiltonian& ham, double L, int n) {
    if (L <= 1.0) throw DomainError("range_bucket: L must exceed 1");
    if (n < 1) throw DomainError("range_bucket: n must be >= 1");

    RangeBuckets rb;
    rb.edges.resize(static_cast<size_t>(n) + 2);
    rb.edges[0] = 0.0;
    double p = 1.0;
    for (int k = 1; k <= n; ++k) {
        p *= L;
        rb.edges[static_cast<size_t>(k)] = p;
    }
    rb.edges[static_cast<size_t>(n) + 1] = ham.lattice.rstar;
    rb.buckets.assign(static_cast<size_t>(n) + 1, {});

    for (size_t ti = 0; ti < ham.terms.size(); ++ti) {
        const auto& term = ham.terms[ti];
        const double dd = ham.lattice.dist(term.i, term.j);
        for (int k = 1; k <= n + 1; ++k) {
            if (dd > rb.edges[static_cast<size_t>(k) - 1] && dd <= rb.edges[static_cast<size_t>(k)]) {
                rb.buckets[static_cast<size_t>(k) - 1].push_back(static_cast<int>(ti));
                break;
            }
        }
    }
    return rb;
}

// ---- JSON ----------------------------------------------------------------------

inline json to_json(const PowerLawHamiltonian& ham) {
    json j;
    j["d"] = ham.lattice.d;
    j["extents"] = ham.lattice.extents;
    j["metric"] = metric_name(ham.lattice.metric);
    j["alpha"] = ham.alpha;
    j["ensemble"] = ham.ensemble;
    j["seed"] = ham.seed;
    json terms = json::array();
    for (const auto& t : ham.terms) {
        json e;
        e["i"] = t.i;
        e["j"] = t.j;
        json m = json::array();
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                m.push_back(t.h(a, b).real());
                m.push_back(t.h(a, b).imag());
            }
        e["matrix"] = std::move(m);
        terms.push_back(std::move(e));
    }
    j["terms"] = std::move(terms);
    return j;
}

inline PowerLawHamiltonian hamiltonian_from_json(const json& j) {
    validate_keys(j, {"d", "extents", "metric", "alpha", "ensemble", "seed", "terms"},
                  "hamiltonian");
    for (const char* key : {"d", "extents", "metric", "alpha", "ensemble", "seed", "terms"})
        if (!j.contains(key)) throw ConfigError(std::string("hamiltonian: missing key '") + key + "'");

    PowerLawHamiltonian ham;
    ham.lattice = build_lattice(j.at("d").get<int>(), j.at("extents").get<std::vector<int>>(),
                                metric_from_name(j.at("metric").get<std::string>()));
    ham.alpha = j.at("alpha").get<double>();
    ham.ensemble = j.at("ensemble").get<std::string>();
    ham.seed = j.at("seed").get<std::uint64_t>();
    if (ham.alpha <= static_cast<double>(ham.lattice.d))
        throw DomainError("hamiltonian: alpha must exceed d");

    const int n = ham.lattice.n_sites();
    for (const auto& e : j.at("terms")) {
        validate_keys(e, {"i", "j", "matrix"}, "hamiltonian term");
        CouplingTerm t;
        t.i = e.at("i").get<int>();
        t.j = e.at("j").get<int>();
        if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n || t.i >= t.j)
            throw ConfigError("hamiltonian term: need 0 <= i < j < n_sites");
        const auto& m = e.at("matrix");
        if (!m.is_array() || m.size() != 32)
            throw ConfigError("hamiltonian term: matrix must hold 16 re/im pairs");
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const size_t base = 2 * (static_cast<size_t>(a) * 4 + static_cast<size_t>(b));
                t.h(a, b) = cplx(m[base].get<double>(), m[base + 1].get<double>());
            }
        if (!is_hermitian4(t.h))
            throw ConfigError("hamiltonian term (" + std::to_string(t.i) + "," +
                              std::to_string(t.j) + "): matrix not Hermitian");
        const double cap = std::pow(ham.lattice.dist(t.i, t.j), -ham.alpha);
        if (op_norm4(t.h) > cap * (1.0 + 1e-9))
            throw ConfigError("hamiltonian term (" + std::to_string(t.i) + "," +
                              std::to_string(t.j) + "): norm exceeds dist^-alpha");
        ham.terms.push_back(std::move(t));
    }
    return ham;
}

} // namespace lrcone
