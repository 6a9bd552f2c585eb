#pragma once

#include <cmath>
#include <vector>

#include "lrcone/errors.hpp"

namespace lrcone {

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0; // 0 when npoints < 3
    double ssr = 0.0;
    int npoints = 0;
};

inline LinFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("linfit: x/y size mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 2) throw DomainError("linfit: need at least 2 points");
    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < n; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw DomainError("linfit: abscissae are all identical");
    LinFit f;
    f.npoints = n;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    for (int i = 0; i < n; ++i) {
        const double res = y[i] - (f.intercept + f.slope * x[i]);
        f.ssr += res * res;
    }
    if (n > 2) f.slope_stderr = std::sqrt(f.ssr / (n - 2) / sxx);
    return f;
}

struct FrontCrossing {
    double r = 0.0;
    double tstar = 0.0;
    bool from_zero = false; // previous grid value was <= 0, no interpolation possible
};

struct FrontFit {
    double p = 0.0;    // t*(r) ~ exp(logc) r^p
    double logc = 0.0;
    LinFit fit;
    std::vector<FrontCrossing> crossings;
};

/**
 * Locate the arrival front t*(r) where values[ir][it] first reaches theta
 * (scanning t upward), then fit log t* against log r.
 *
 * The crossing between bracketing grid points is interpolated linearly in
 * log-log coordinates, which is exact whenever the curve is a pure power of t.
 * A bracket whose lower value is nonpositive cannot be interpolated; the upper
 * grid time is used and the crossing flagged. Radii whose curve starts at or
 * above theta, or never reaches it, are skipped.
 */
inline FrontFit fit_front(const std::vector<double>& rs, const std::vector<double>& ts,
                          const std::vector<std::vector<double>>& values, double theta) {
    if (theta <= 0.0) throw DomainError("fit_front: theta must be positive");
    if (rs.size() != values.size()) throw DomainError("fit_front: rs/values size mismatch");
    if (ts.size() < 2) throw DomainError("fit_front: need at least 2 times");
    for (size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1])) throw DomainError("fit_front: times must be strictly increasing");
    for (const auto& row : values)
        if (row.size() != ts.size()) throw DomainError("fit_front: ragged value rows");

    FrontFit out;
    for (size_t ir = 0; ir < rs.size(); ++ir) {
        if (rs[ir] <= 0.0) throw DomainError("fit_front: radii must be positive");
        const auto& v = values[ir];
        if (v[0] >= theta) continue; // front already passed before the grid starts
        size_t j = 1;
        while (j < v.size() && v[j] < theta) ++j;
        if (j == v.size()) continue; // never reaches the threshold
        FrontCrossing c;
        c.r = rs[ir];
        if (v[j - 1] <= 0.0) {
            c.tstar = ts[j];
            c.from_zero = true;
        } else {
            const double lt1 = std::log(ts[j - 1]), lt2 = std::log(ts[j]);
            const double lv1 = std::log(v[j - 1]), lv2 = std::log(v[j]);
            c.tstar = std::exp(lt1 + (std::log(theta) - lv1) * (lt2 - lt1) / (lv2 - lv1));
        }
        out.crossings.push_back(c);
    }
    if (out.crossings.size() < 3)
        throw DomainError("fit_front: need at least 3 radii with threshold crossings, got " +
                          std::to_string(out.crossings.size()));
    std::vector<double> lx, ly;
    for (const auto& c : out.crossings) {
        lx.push_back(std::log(c.r));
        ly.push_back(std::log(c.tstar));
    }
    out.fit = linfit(lx, ly);
    out.p = out.fit.slope;
    out.logc = out.fit.intercept;
    return out;
}

struct TailFit {
    double slope = 0.0; // v(r) ~ r^slope at fixed t
    LinFit fit;
    int used = 0;
};

// Fit log v against log r at fixed time, ignoring nonpositive values.
inline TailFit fit_tail(const std::vector<double>& rs, const std::vector<double>& vals) {
    if (rs.size() != vals.size()) throw DomainError("fit_tail: size mismatch");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < rs.size(); ++i) {
        if (vals[i] <= 0.0) continue;
        if (rs[i] <= 0.0) throw DomainError("fit_tail: radii must be positive");
        lx.push_back(std::log(rs[i]));
        ly.push_back(std::log(vals[i]));
    }
    if (lx.size() < 3)
        throw DomainError("fit_tail: need at least 3 positive values, got " +
                          std::to_string(lx.size()));
    TailFit out;
    out.fit = linfit(lx, ly);
    out.slope = out.fit.slope;
    out.used = out.fit.npoints;
    return out;
}

} // namespace lrcone
