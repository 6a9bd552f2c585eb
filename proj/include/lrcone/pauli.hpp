#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lrcone/errors.hpp"
#include "lrcone/io.hpp"
#include "lrcone/lattice.hpp"

namespace lrcone {

using cplx = std::complex<double>;

enum class PauliLetter : unsigned char { I = 0, X = 1, Y = 2, Z = 3 };

inline char letter_char(PauliLetter p) { return "IXYZ"[static_cast<int>(p)]; }

inline PauliLetter letter_from_char(char c) {
    switch (c) {
        case 'X': return PauliLetter::X;
        case 'Y': return PauliLetter::Y;
        case 'Z': return PauliLetter::Z;
    }
    throw ConfigError(std::string("invalid Pauli letter '") + c + "' (X|Y|Z)");
}

inline Eigen::Matrix2cd pauli_matrix(PauliLetter p) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (p) {
        case PauliLetter::I: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case PauliLetter::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case PauliLetter::Y: m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
        case PauliLetter::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

// Non-identity letters only, sorted by site. coeff is Tr(P O) / 2^n.
struct PauliString {
    std::vector<std::pair<int, PauliLetter>> letters;
    cplx coeff;
};

// Canonical order: lexicographic in the (site, letter) sequence, X < Y < Z.
// The identity (empty support) sorts first.
inline bool string_less(const PauliString& a, const PauliString& b) {
    return a.letters < b.letters;
}

struct OperatorDecomposition {
    int n = 0;
    std::vector<PauliString> strings;
};

inline constexpr int kMaxDecomposeQubits = 14;

// ---- flat coefficient layout ---------------------------------------------------
//
// pauli_transform turns the 2^n x 2^n matrix (site 0 = most significant qubit,
// flat index f = row * 2^n + col) into 4^n Pauli coefficients in place. After
// the per-site butterfly, site j's letter is the bit pair
//   hi = bit (2n-1-j) of f, lo = bit (n-1-j) of f,  letter = 2*hi + lo
// with 00=I, 01=X, 10=Y, 11=Z. Each butterfly inverts the 2x2 expansion
//   m00 = cI + cZ, m11 = cI - cZ, m01 = cX - i cY, m10 = cX + i cY.
// Cost n * 4^n; butterflies for different sites touch disjoint bit pairs.

inline int letter_code_at(size_t f, int j, int n) {
    const int hi = static_cast<int>((f >> (2 * n - 1 - j)) & 1u);
    const int lo = static_cast<int>((f >> (n - 1 - j)) & 1u);
    return 2 * hi + lo;
}

inline std::vector<cplx> pauli_transform(const Eigen::MatrixXcd& m, int n) {
    const size_t dim = static_cast<size_t>(1) << n;
    const size_t total = dim * dim;
    std::vector<cplx> a(total);
    for (size_t row = 0; row < dim; ++row)
        for (size_t col = 0; col < dim; ++col)
            a[row * dim + col] = m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));

    const cplx half(0.5, 0.0), ihalf(0.0, 0.5);
    for (int j = 0; j < n; ++j) {
        const size_t rb = static_cast<size_t>(1) << (2 * n - 1 - j);
        const size_t cb = static_cast<size_t>(1) << (n - 1 - j);
        for (size_t f = 0; f < total; ++f) {
            if (f & (rb | cb)) continue;
            const cplx m00 = a[f], m01 = a[f | cb], m10 = a[f | rb], m11 = a[f | rb | cb];
            a[f] = half * (m00 + m11);
            a[f | cb] = half * (m01 + m10);
            a[f | rb] = ihalf * (m01 - m10);
            a[f | rb | cb] = half * (m00 - m11);
        }
    }
    return a;
}

inline Eigen::MatrixXcd pauli_inverse_transform(const std::vector<cplx>& coeffs, int n) {
    const size_t dim = static_cast<size_t>(1) << n;
    const size_t total = dim * dim;
    if (coeffs.size() != total)
        throw DomainError("pauli_inverse_transform: coefficient count mismatch");
    std::vector<cplx> a = coeffs;

    const cplx iunit(0.0, 1.0);
    for (int j = n - 1; j >= 0; --j) {
        const size_t rb = static_cast<size_t>(1) << (2 * n - 1 - j);
        const size_t cb = static_cast<size_t>(1) << (n - 1 - j);
        for (size_t f = 0; f < total; ++f) {
            if (f & (rb | cb)) continue;
            const cplx cI = a[f], cX = a[f | cb], cY = a[f | rb], cZ = a[f | rb | cb];
            a[f] = cI + cZ;
            a[f | cb] = cX - iunit * cY;
            a[f | rb] = cX + iunit * cY;
            a[f | rb | cb] = cI - cZ;
        }
    }
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (size_t row = 0; row < dim; ++row)
        for (size_t col = 0; col < dim; ++col)
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = a[row * dim + col];
    return m;
}

inline int qubit_count_of(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw DomainError("operator matrix must be square with dim >= 2");
    const auto dim = static_cast<size_t>(m.rows());
    int n = 0;
    while ((static_cast<size_t>(1) << n) < dim) ++n;
    if ((static_cast<size_t>(1) << n) != dim)
        throw DomainError("operator dimension must be a power of 2");
    return n;
}

/**
 * Exact Pauli-string decomposition of a 2^n x 2^n operator.
 * Coefficients below `cutoff` in modulus are dropped; canonical string order.
 */
inline OperatorDecomposition decompose(const Eigen::MatrixXcd& m, double cutoff = 1e-14) {
    const int n = qubit_count_of(m);
    if (n > kMaxDecomposeQubits)
        throw DomainError("decompose: refusing n > " + std::to_string(kMaxDecomposeQubits) +
                          " qubits");
    const std::vector<cplx> a = pauli_transform(m, n);

    OperatorDecomposition dec;
    dec.n = n;
    for (size_t f = 0; f < a.size(); ++f) {
        if (std::abs(a[f]) < cutoff) continue;
        PauliString ps;
        ps.coeff = a[f];
        for (int j = 0; j < n; ++j) {
            const int code = letter_code_at(f, j, n);
            if (code != 0)
                ps.letters.emplace_back(j, static_cast<PauliLetter>(code));
        }
        dec.strings.push_back(std::move(ps));
    }
    std::sort(dec.strings.begin(), dec.strings.end(), string_less);
    return dec;
}

inline Eigen::MatrixXcd reconstruct(const OperatorDecomposition& dec) {
    const size_t dim = static_cast<size_t>(1) << dec.n;
    std::vector<cplx> a(dim * dim, cplx(0.0, 0.0));
    for (const auto& ps : dec.strings) {
        size_t f = 0;
        for (const auto& [site, letter] : ps.letters) {
            const int code = static_cast<int>(letter);
            if (code & 2) f |= static_cast<size_t>(1) << (2 * dec.n - 1 - site);
            if (code & 1) f |= static_cast<size_t>(1) << (dec.n - 1 - site);
        }
        a[f] += ps.coeff;
    }
    return pauli_inverse_transform(a, dec.n);
}

// ---- spatial projection ---------------------------------------------------------

inline double string_max_dist(const PauliString& ps, const Lattice& lat, int center) {
    double md = -1.0;
    for (const auto& [site, letter] : ps.letters) {
        (void)letter;
        md = std::max(md, lat.dist(site, center));
    }
    return md;
}

/**
 * Keep exactly the strings whose support reaches distance >= r from the center
 * (a site at distance exactly r is kept). The identity string has empty
 * support and is always dropped, including at r = 0. Idempotent; coefficients
 * of surviving strings are untouched.
 */
inline OperatorDecomposition project_outside(const OperatorDecomposition& dec,
                                             const Lattice& lat, int center, double r) {
    if (r < 0.0) throw DomainError("project_outside: r must be >= 0");
    if (center < 0 || center >= lat.n_sites())
        throw DomainError("project_outside: center site out of range");
    OperatorDecomposition out;
    out.n = dec.n;
    for (const auto& ps : dec.strings)
        if (string_max_dist(ps, lat, center) >= r) out.strings.push_back(ps);
    return out;
}

// ---- norms -----------------------------------------------------------------------

// Largest singular value via the Hermitian spectrum of M^dagger M. Valid for
// arbitrary (non-normal) matrices; tests cross-check Hermitian inputs against
// max |eigenvalue| computed along an independent route.
inline double op_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::MatrixXcd gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// sqrt(Tr(O^dagger O) / 2^n): the norm in which Pauli strings are orthonormal.
inline double frobenius_norm_normalized(const Eigen::MatrixXcd& m) {
    const int n = qubit_count_of(m);
    return std::sqrt(m.squaredNorm() / static_cast<double>(static_cast<size_t>(1) << n));
}

// ---- JSON ------------------------------------------------------------------------

inline json decomposition_to_json(const OperatorDecomposition& dec) {
    json arr = json::array();
    for (const auto& ps : dec.strings) {
        json letters = json::object();
        for (const auto& [site, letter] : ps.letters)
            letters[std::to_string(site)] = std::string(1, letter_char(letter));
        json e;
        e["letters"] = std::move(letters);
        e["re"] = ps.coeff.real();
        e["im"] = ps.coeff.imag();
        arr.push_back(std::move(e));
    }
    return arr;
}

inline OperatorDecomposition decomposition_from_json(const json& arr, int n) {
    if (!arr.is_array()) throw ConfigError("decomposition: expected a JSON array");
    OperatorDecomposition dec;
    dec.n = n;
    for (const auto& e : arr) {
        validate_keys(e, {"letters", "re", "im"}, "decomposition entry");
        PauliString ps;
        ps.coeff = cplx(e.at("re").get<double>(), e.at("im").get<double>());
        for (auto it = e.at("letters").begin(); it != e.at("letters").end(); ++it) {
            const int site = std::stoi(it.key());
            if (site < 0 || site >= n)
                throw ConfigError("decomposition entry: site " + it.key() + " out of range");
            const std::string v = it.value().get<std::string>();
            if (v.size() != 1) throw ConfigError("decomposition entry: bad letter '" + v + "'");
            ps.letters.emplace_back(site, letter_from_char(v[0]));
        }
        std::sort(ps.letters.begin(), ps.letters.end());
        for (size_t k = 1; k < ps.letters.size(); ++k)
            if (ps.letters[k].first == ps.letters[k - 1].first)
                throw ConfigError("decomposition entry: duplicate site");
        dec.strings.push_back(std::move(ps));
    }
    std::sort(dec.strings.begin(), dec.strings.end(), string_less);
    return dec;
}

} // namespace lrcone
