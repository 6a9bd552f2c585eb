#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/errors.hpp"
#include "lrcone/hamiltonian.hpp"
#include "lrcone/pauli.hpp"
#include "lrcone/rng.hpp"

namespace lrcone {

inline constexpr int kMaxDynamicsQubits = 12;

enum class NormKind { Operator, Frobenius };

inline std::string norm_name(NormKind k) {
    return k == NormKind::Operator ? "operator" : "frobenius";
}

inline NormKind norm_from_name(const std::string& s) {
    if (s == "operator") return NormKind::Operator;
    if (s == "frobenius") return NormKind::Frobenius;
    throw ConfigError("unknown norm '" + s + "' (operator|frobenius)");
}

// ---- embedding -------------------------------------------------------------------
// Basis convention everywhere: site j owns bit (n-1-j) of the basis index, so
// site 0 is the most significant qubit and kron(sigma_0, sigma_1, ...) applies.

inline Eigen::MatrixXcd embed_single(const Eigen::Matrix2cd& op, int site, int n) {
    const size_t dim = static_cast<size_t>(1) << n;
    const size_t mask = static_cast<size_t>(1) << (n - 1 - site);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
    for (size_t b = 0; b < dim; ++b) {
        const int col_bit = (b & mask) ? 1 : 0;
        for (int row_bit = 0; row_bit < 2; ++row_bit) {
            const size_t row = (b & ~mask) | (row_bit ? mask : 0);
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(b)) = op(row_bit, col_bit);
        }
    }
    return out;
}

inline Eigen::MatrixXcd dense_hamiltonian(const PowerLawHamiltonian& ham) {
    const int n = ham.lattice.n_sites();
    const size_t dim = static_cast<size_t>(1) << n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const auto& term : ham.terms) {
        const size_t mi = static_cast<size_t>(1) << (n - 1 - term.i);
        const size_t mj = static_cast<size_t>(1) << (n - 1 - term.j);
        for (size_t b = 0; b < dim; ++b) {
            const int col = 2 * ((b & mi) ? 1 : 0) + ((b & mj) ? 1 : 0);
            for (int row = 0; row < 4; ++row) {
                const size_t rb = (b & ~(mi | mj)) | ((row & 2) ? mi : 0) | ((row & 1) ? mj : 0);
                h(static_cast<Eigen::Index>(rb), static_cast<Eigen::Index>(b)) += term.h(row, col);
            }
        }
    }
    return h;
}

// ---- evolution --------------------------------------------------------------------

/**
 * Eigendecomposition cache for Heisenberg evolution O(t) = e^{iHt} O e^{-iHt}.
 * Built once per Hamiltonian; every evolve() is then two dense multiplies.
 */
struct EvolutionContext {
    PowerLawHamiltonian ham;
    int n = 0;
    Eigen::MatrixXcd hdense;
    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;
};

inline EvolutionContext make_context(const PowerLawHamiltonian& ham) {
    const int n = ham.lattice.n_sites();
    if (n > kMaxDynamicsQubits)
        throw DomainError("make_context: refusing n > " + std::to_string(kMaxDynamicsQubits) +
                          " sites");
    EvolutionContext ctx;
    ctx.ham = ham;
    ctx.n = n;
    ctx.hdense = dense_hamiltonian(ham);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ctx.hdense);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("make_context: eigensolver failed to converge");
    ctx.evals = es.eigenvalues();
    ctx.evecs = es.eigenvectors();
    return ctx;
}

inline double hamiltonian_norm(const EvolutionContext& ctx) {
    return ctx.evals.size() ? ctx.evals.cwiseAbs().maxCoeff() : 0.0;
}

inline Eigen::MatrixXcd unitary(const EvolutionContext& ctx, double t) {
    const Eigen::Index dim = ctx.evecs.rows();
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
        phases(k) = std::exp(cplx(0.0, ctx.evals(k) * t));
    return ctx.evecs * phases.asDiagonal() * ctx.evecs.adjoint();
}

inline Eigen::MatrixXcd evolve(const EvolutionContext& ctx, const Eigen::MatrixXcd& op,
                               double t) {
    const Eigen::MatrixXcd u = unitary(ctx, t);
    return u * op * u.adjoint();
}

// ---- local observables --------------------------------------------------------------

struct LocalOperator {
    int site = 0;
    Eigen::Matrix2cd op;
};

inline LocalOperator local_pauli(int site, PauliLetter p) {
    return LocalOperator{site, pauli_matrix(p)};
}

inline void check_unit_local(const LocalOperator& a, int n) {
    if (a.site < 0 || a.site >= n) throw DomainError("local operator: site out of range");
    if (std::abs(op_norm(Eigen::MatrixXcd(a.op)) - 1.0) > 1e-9)
        throw DomainError("local operator: must have unit operator norm");
}

// ---- leakage -------------------------------------------------------------------------

// Norm of the flat coefficient array restricted to strings whose support
// reaches distance >= r from the center.
inline double leakage_from_flat(const std::vector<cplx>& flat, int n, const Lattice& lat,
                                int center, double r, NormKind kind) {
    if (kind == NormKind::Frobenius) {
        double s = 0.0;
        for (size_t f = 0; f < flat.size(); ++f) {
            double md = -1.0;
            for (int j = 0; j < n; ++j)
                if (letter_code_at(f, j, n) != 0) md = std::max(md, lat.dist(j, center));
            if (md >= r) s += std::norm(flat[f]);
        }
        return std::sqrt(s);
    }
    std::vector<cplx> kept(flat.size(), cplx(0.0, 0.0));
    for (size_t f = 0; f < flat.size(); ++f) {
        double md = -1.0;
        for (int j = 0; j < n; ++j)
            if (letter_code_at(f, j, n) != 0) md = std::max(md, lat.dist(j, center));
        if (md >= r) kept[f] = flat[f];
    }
    return op_norm(pauli_inverse_transform(kept, n));
}

/**
 * ||P_r O(t)||: evolve the unit-norm single-site observable, decompose into
 * Pauli strings, keep the part reaching distance >= r from the observable's
 * site, and take the requested norm.
 */
inline double leakage(const EvolutionContext& ctx, const LocalOperator& obs, double r,
                      double t, NormKind kind) {
    check_unit_local(obs, ctx.n);
    if (r < 0.0) throw DomainError("leakage: r must be >= 0");
    const Eigen::MatrixXcd ot = evolve(ctx, embed_single(obs.op, obs.site, ctx.n), t);
    const std::vector<cplx> flat = pauli_transform(ot, ctx.n);
    return leakage_from_flat(flat, ctx.n, ctx.ham.lattice, obs.site, r, kind);
}

struct LeakagePoint {
    double r = 0.0, t = 0.0, value = 0.0;
    NormKind kind = NormKind::Operator;
};

struct LeakageCurve {
    int center = 0;
    std::vector<LeakagePoint> points; // ordered by (r, t)
};

inline LeakageCurve leakage_curve(const EvolutionContext& ctx, const LocalOperator& obs,
                                  const std::vector<double>& rs, const std::vector<double>& ts,
                                  NormKind kind) {
    check_unit_local(obs, ctx.n);
    LeakageCurve curve;
    curve.center = obs.site;
    // transform once per t, reuse across the r grid
    std::vector<std::vector<cplx>> flats;
    flats.reserve(ts.size());
    const Eigen::MatrixXcd o0 = embed_single(obs.op, obs.site, ctx.n);
    for (double t : ts) flats.push_back(pauli_transform(evolve(ctx, o0, t), ctx.n));
    for (double r : rs)
        for (size_t it = 0; it < ts.size(); ++it)
            curve.points.push_back({r, ts[it],
                                    leakage_from_flat(flats[it], ctx.n, ctx.ham.lattice,
                                                      obs.site, r, kind),
                                    kind});
    return curve;
}

// ---- commutators -------------------------------------------------------------------

inline Eigen::MatrixXcd commutator_with_single_site(PauliLetter p, int site,
                                                    const Eigen::MatrixXcd& m, int n) {
    const size_t dim = static_cast<size_t>(1) << n;
    const size_t mask = static_cast<size_t>(1) << (n - 1 - site);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const cplx iu(0.0, 1.0);
    for (size_t row = 0; row < dim; ++row) {
        const auto ri = static_cast<Eigen::Index>(row);
        for (size_t col = 0; col < dim; ++col) {
            const auto ci = static_cast<Eigen::Index>(col);
            const auto rf = static_cast<Eigen::Index>(row ^ mask);
            const auto cf = static_cast<Eigen::Index>(col ^ mask);
            cplx left, right;
            switch (p) {
                case PauliLetter::X:
                    left = m(rf, ci);
                    right = m(ri, cf);
                    break;
                case PauliLetter::Y:
                    left = ((row & mask) ? iu : -iu) * m(rf, ci);
                    right = m(ri, cf) * ((col & mask) ? -iu : iu);
                    break;
                case PauliLetter::Z:
                    left = ((row & mask) ? -1.0 : 1.0) * m(ri, ci);
                    right = m(ri, ci) * ((col & mask) ? -1.0 : 1.0);
                    break;
                default:
                    left = right = m(ri, ci);
                    break;
            }
            out(ri, ci) = left - right;
        }
    }
    return out;
}

inline double commutator_norm(const EvolutionContext& ctx, const Eigen::MatrixXcd& a,
                              const Eigen::MatrixXcd& o, double t) {
    const Eigen::MatrixXcd ot = evolve(ctx, o, t);
    return op_norm(a * ot - ot * a);
}

struct SupCommutator {
    double value = 0.0;
    bool no_exterior_sites = false;
};

/**
 * max over single-site Paulis A at distance >= r from the center of
 * ||[A, O(t)]||. A restricted probe set: the result is a lower bound on the
 * true supremum over all exterior observables, never an upper bound.
 * No exterior sites at all: value 0 with the warning flag set.
 */
inline SupCommutator sup_commutator_estimate(const EvolutionContext& ctx,
                                             const LocalOperator& obs, int center, double r,
                                             double t) {
    check_unit_local(obs, ctx.n);
    const Lattice& lat = ctx.ham.lattice;
    if (center < 0 || center >= lat.n_sites())
        throw DomainError("sup_commutator_estimate: center out of range");
    const Eigen::MatrixXcd ot = evolve(ctx, embed_single(obs.op, obs.site, ctx.n), t);
    SupCommutator res;
    bool any = false;
    for (int s = 0; s < lat.n_sites(); ++s) {
        if (lat.dist(s, center) < r) continue;
        any = true;
        for (PauliLetter p : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z})
            res.value = std::max(res.value,
                                 op_norm(commutator_with_single_site(p, s, ot, ctx.n)));
    }
    res.no_exterior_sites = !any;
    return res;
}

// ---- states and correlators -----------------------------------------------------------

inline Eigen::VectorXcd basis_state(int n, const std::vector<int>& bits) {
    if (static_cast<int>(bits.size()) != n)
        throw DomainError("basis_state: need one bit per site");
    const size_t dim = static_cast<size_t>(1) << n;
    size_t idx = 0;
    for (int j = 0; j < n; ++j) {
        const int b = bits[static_cast<size_t>(j)];
        if (b != 0 && b != 1) throw DomainError("basis_state: bits must be 0 or 1");
        if (b) idx |= static_cast<size_t>(1) << (n - 1 - j);
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(idx)) = 1.0;
    return v;
}

inline Eigen::VectorXcd all_zeros_state(int n) {
    return basis_state(n, std::vector<int>(static_cast<size_t>(n), 0));
}

// Product of independent Haar-random single-qubit states; stream keyed by
// (seed, "state", site).
inline Eigen::VectorXcd haar_product_state(int n, std::uint64_t seed) {
    Eigen::VectorXcd psi(1);
    psi(0) = 1.0;
    for (int j = 0; j < n; ++j) {
        Rng rng(split_seed(seed, 0x57a7eULL, static_cast<std::uint64_t>(j)));
        Eigen::Vector2cd q;
        q(0) = cplx(rng.gaussian(), rng.gaussian());
        q(1) = cplx(rng.gaussian(), rng.gaussian());
        q /= q.norm();
        Eigen::VectorXcd next(psi.size() * 2);
        for (Eigen::Index b = 0; b < psi.size(); ++b) {
            next(2 * b) = psi(b) * q(0);
            next(2 * b + 1) = psi(b) * q(1);
        }
        psi = std::move(next);
    }
    return psi;
}

inline Eigen::VectorXcd apply_local(const LocalOperator& a, const Eigen::VectorXcd& v, int n) {
    const size_t dim = static_cast<size_t>(v.size());
    const size_t mask = static_cast<size_t>(1) << (n - 1 - a.site);
    Eigen::VectorXcd out(v.size());
    for (size_t b = 0; b < dim; ++b) {
        const size_t b0 = b & ~mask;
        const size_t b1 = b | mask;
        const cplx v0 = v(static_cast<Eigen::Index>(b0));
        const cplx v1 = v(static_cast<Eigen::Index>(b1));
        out(static_cast<Eigen::Index>(b)) =
            (b & mask) ? a.op(1, 0) * v0 + a.op(1, 1) * v1 : a.op(0, 0) * v0 + a.op(0, 1) * v1;
    }
    return out;
}

/**
 * Connected correlator <A(t)B(t)> - <A(t)><B(t)> in state psi, computed in the
 * Schroedinger picture (A(t)B(t) = e^{iHt} A B e^{-iHt}, so one state evolution
 * suffices). Returns the full complex value; report the real part.
 */
inline cplx connected_correlator(const EvolutionContext& ctx, const LocalOperator& a,
                                 const LocalOperator& b, const Eigen::VectorXcd& psi,
                                 double t) {
    check_unit_local(a, ctx.n);
    check_unit_local(b, ctx.n);
    if (psi.size() != (static_cast<Eigen::Index>(1) << ctx.n))
        throw DomainError("connected_correlator: state dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw DomainError("connected_correlator: state not normalized");

    const Eigen::Index dim = ctx.evecs.rows();
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
        phases(k) = std::exp(cplx(0.0, -ctx.evals(k) * t));
    const Eigen::VectorXcd phi = ctx.evecs * (phases.asDiagonal() * (ctx.evecs.adjoint() * psi));

    const Eigen::VectorXcd bphi = apply_local(b, phi, ctx.n);
    const Eigen::VectorXcd abphi = apply_local(a, bphi, ctx.n);
    const cplx val_ab = phi.dot(abphi);
    const cplx val_a = phi.dot(apply_local(a, phi, ctx.n));
    const cplx val_b = phi.dot(bphi);
    return val_ab - val_a * val_b;
}

// ---- truncation --------------------------------------------------------------------

// Keep the terms fully supported in the closed ball B_r(x).
inline PowerLawHamiltonian truncate_to_ball(const PowerLawHamiltonian& ham, int x, double r) {
    PowerLawHamiltonian out;
    out.lattice = ham.lattice;
    out.alpha = ham.alpha;
    out.ensemble = ham.ensemble;
    out.seed = ham.seed;
    for (const auto& term : ham.terms)
        if (ham.lattice.dist(term.i, x) <= r && ham.lattice.dist(term.j, x) <= r)
            out.terms.push_back(term);
    return out;
}

/**
 * || e^{iHt} A e^{-iHt} - e^{iH_r t} A e^{-iH_r t} || for the ball-truncated
 * Hamiltonian H_r around the observable's site. At r >= rstar the two
 * generators coincide term for term and the error is exactly zero.
 */
inline double truncation_error(const PowerLawHamiltonian& ham, const LocalOperator& obs,
                               double r, double t) {
    const EvolutionContext full = make_context(ham);
    const EvolutionContext trunc = make_context(truncate_to_ball(ham, obs.site, r));
    const Eigen::MatrixXcd a0 = embed_single(obs.op, obs.site, full.n);
    return op_norm(evolve(full, a0, t) - evolve(trunc, a0, t));
}

// values[ir][it]; shares the full-H eigendecomposition across the grid.
inline std::vector<std::vector<double>> truncation_error_curve(
    const PowerLawHamiltonian& ham, const LocalOperator& obs, const std::vector<double>& rs,
    const std::vector<double>& ts) {
    const EvolutionContext full = make_context(ham);
    check_unit_local(obs, full.n);
    const Eigen::MatrixXcd a0 = embed_single(obs.op, obs.site, full.n);
    std::vector<Eigen::MatrixXcd> at_full;
    at_full.reserve(ts.size());
    for (double t : ts) at_full.push_back(evolve(full, a0, t));

    std::vector<std::vector<double>> values;
    values.reserve(rs.size());
    for (double r : rs) {
        const EvolutionContext trunc = make_context(truncate_to_ball(ham, obs.site, r));
        std::vector<double> row;
        row.reserve(ts.size());
        for (size_t it = 0; it < ts.size(); ++it)
            row.push_back(op_norm(at_full[it] - evolve(trunc, a0, ts[it])));
        values.push_back(std::move(row));
    }
    return values;
}

// ---- restriction --------------------------------------------------------------------

/**
 * Conditional expectation onto the sites in `keep`: normalized partial trace
 * over the complement, re-embedded with identities. In the Pauli picture this
 * keeps exactly the strings supported inside `keep`; both routes agree and the
 * map is an operator-norm contraction.
 */
inline Eigen::MatrixXcd restrict_to_sites(const Eigen::MatrixXcd& m, int n,
                                          const std::vector<int>& keep) {
    std::vector<bool> in_keep(static_cast<size_t>(n), false);
    for (int s : keep) {
        if (s < 0 || s >= n) throw DomainError("restrict_to_sites: site out of range");
        in_keep[static_cast<size_t>(s)] = true;
    }
    std::vector<cplx> flat = pauli_transform(m, n);
    for (size_t f = 0; f < flat.size(); ++f) {
        for (int j = 0; j < n; ++j) {
            if (letter_code_at(f, j, n) != 0 && !in_keep[static_cast<size_t>(j)]) {
                flat[f] = 0.0;
                break;
            }
        }
    }
    return pauli_inverse_transform(flat, n);
}

} // namespace lrcone
