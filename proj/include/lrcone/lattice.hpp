#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lrcone/errors.hpp"

namespace lrcone {

enum class Metric { Euclidean, Chebyshev, Manhattan };

inline std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Euclidean: return "euclidean";
        case Metric::Chebyshev: return "chebyshev";
        case Metric::Manhattan: return "manhattan";
    }
    return "euclidean";
}

inline Metric metric_from_name(const std::string& s) {
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "chebyshev") return Metric::Chebyshev;
    if (s == "manhattan") return Metric::Manhattan;
    throw ConfigError("unknown metric '" + s + "' (euclidean|chebyshev|manhattan)");
}

/**
 * Finite d-dimensional box with open boundaries, integer coordinates
 * 0..extent_k-1. Sites are enumerated row-major (last coordinate fastest).
 * Immutable after construction; rstar is the maximum pairwise distance.
 */
struct Lattice {
    int d = 0;
    std::vector<int> extents;
    Metric metric = Metric::Euclidean;
    std::vector<std::vector<int>> coords; // site -> d coordinates
    double rstar = 0.0;

    int n_sites() const { return static_cast<int>(coords.size()); }

    double dist(int i, int j) const {
        const auto& a = coords[static_cast<size_t>(i)];
        const auto& b = coords[static_cast<size_t>(j)];
        switch (metric) {
            case Metric::Euclidean: {
                double s = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double dk = static_cast<double>(a[static_cast<size_t>(k)] - b[static_cast<size_t>(k)]);
                    s += dk * dk;
                }
                return std::sqrt(s);
            }
            case Metric::Chebyshev: {
                int m = 0;
                for (int k = 0; k < d; ++k)
                    m = std::max(m, std::abs(a[static_cast<size_t>(k)] - b[static_cast<size_t>(k)]));
                return static_cast<double>(m);
            }
            case Metric::Manhattan: {
                int s = 0;
                for (int k = 0; k < d; ++k)
                    s += std::abs(a[static_cast<size_t>(k)] - b[static_cast<size_t>(k)]);
                return static_cast<double>(s);
            }
        }
        return 0.0;
    }
};

inline Lattice build_lattice(int d, const std::vector<int>& extents,
                             Metric metric = Metric::Euclidean) {
    if (d <= 0) throw DomainError("build_lattice: d must be >= 1");
    if (extents.empty()) throw DomainError("build_lattice: extents must be non-empty");
    if (static_cast<int>(extents.size()) != d)
        throw DomainError("build_lattice: extents size must equal d");
    for (int e : extents)
        if (e <= 0) throw DomainError("build_lattice: every extent must be >= 1");

    Lattice lat;
    lat.d = d;
    lat.extents = extents;
    lat.metric = metric;

    long total = 1;
    for (int e : extents) {
        total *= e;
        if (total > 1'000'000) throw DomainError("build_lattice: more than 1e6 sites");
    }
    lat.coords.reserve(static_cast<size_t>(total));
    std::vector<int> c(static_cast<size_t>(d), 0);
    for (long s = 0; s < total; ++s) {
        lat.coords.push_back(c);
        for (int k = d - 1; k >= 0; --k) {
            if (++c[static_cast<size_t>(k)] < extents[static_cast<size_t>(k)]) break;
            c[static_cast<size_t>(k)] = 0;
        }
    }

    // brute force over pairs; lattices here are small
    const int n = lat.n_sites();
    double rs = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rs = std::max(rs, lat.dist(i, j));
    lat.rstar = rs;
    return lat;
}

// Interaction strength tau = max_i sum_{j != i} dist(i,j)^{-alpha}.
// Finite lattice: converges for any alpha; the Hamiltonian sampler enforces
// alpha > d separately.
inline double tau(const Lattice& lat, double alpha) {
    const int n = lat.n_sites();
    if (n < 2) throw DomainError("tau: lattice needs at least 2 sites");
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            s += std::pow(lat.dist(i, j), -alpha);
        }
        best = std::max(best, s);
    }
    return best;
}

} // namespace lrcone
