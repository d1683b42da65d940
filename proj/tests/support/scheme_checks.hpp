#pragma once

// Randomised property checks for Scheme implementations and a brute-force
// oracle for the Hamiltonian minimum. Shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fuelctl/scheme.hpp"
#include "fuelctl/solver.hpp"

namespace fuelctl::testing {

struct PropertyResult {
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    double worst = 0.0;  // largest excess over the allowed bound

    void record(double excess) {
        ++trials;
        if (excess > 0.0) ++violations;
        worst = std::max(worst, excess);
    }
};

inline std::vector<std::size_t> interior_nodes(const Scheme& s) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.kind(n) == NodeKind::interior) out.push_back(n);
    }
    return out;
}

inline std::vector<std::size_t> active_nodes(const Scheme& s) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.kind(n) != NodeKind::inactive) out.push_back(n);
    }
    return out;
}

inline MeshFunction random_mesh(const Scheme& s, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    MeshFunction v(s.size(), 0.0);
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.kind(n) != NodeKind::inactive) v[n] = u(rng);
    }
    return v;
}

inline std::vector<double> differences(const Scheme& s, const MeshFunction& v, std::size_t n) {
    std::vector<double> d;
    for (std::size_t nb : s.stencil(n)) d.push_back(v[n] - v[nb]);
    return d;
}

/// Round-off allowance for an F value built from terms of size up to K_h * scale.
inline double roundoff(const Scheme& s, double scale) { return 1e-12 * s.constants().K_h * (1.0 + scale); }

/// Raising one neighbour by delta in (0, 1] never increases F at the centre.
inline PropertyResult check_ellipticity(const Scheme& s, std::mt19937_64& rng, int trials) {
    PropertyResult r;
    const auto nodes = interior_nodes(s);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    std::uniform_real_distribution<double> delta(0.0, 1.0);
    for (int t = 0; t < trials; ++t) {
        auto v = random_mesh(s, rng, 0.0, 1.0 / s.beta());
        const std::size_t n = nodes[pick(rng)];
        const auto stencil = s.stencil(n);
        const std::size_t nb = stencil[std::uniform_int_distribution<std::size_t>(0, stencil.size() - 1)(rng)];
        const double before = s.evaluate_local(n, v[n], differences(s, v, n));
        v[nb] += 1.0 - delta(rng);  // (0, 1]
        const double after = s.evaluate_local(n, v[n], differences(s, v, n));
        r.record(after - before - roundoff(s, 1.0 / s.beta()));
    }
    return r;
}

/// F(x, r', p) - F(x, r, p) >= min(beta, 1) (r' - r) for r' > r.
inline PropertyResult check_properness(const Scheme& s, std::mt19937_64& rng, int trials) {
    PropertyResult r;
    const auto nodes = active_nodes(s);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0 / s.beta());
    std::uniform_real_distribution<double> delta(1e-3, 1.0);
    const double floor = std::min(s.beta(), 1.0);
    for (int t = 0; t < trials; ++t) {
        const auto v = random_mesh(s, rng, 0.0, 1.0 / s.beta());
        const std::size_t n = nodes[pick(rng)];
        const auto d = differences(s, v, n);
        const double r0 = u(rng);
        const double dr = delta(rng);
        const double rise = s.evaluate_local(n, r0 + dr, d) - s.evaluate_local(n, r0, d);
        r.record(floor * dr - rise - roundoff(s, 1.0 / s.beta()));
    }
    return r;
}

/// |F(x, r, p) - F(x, r', p')| <= K_h max(|r - r'|, |p - p'|_inf).
inline PropertyResult check_lipschitz(const Scheme& s, std::mt19937_64& rng, int trials) {
    PropertyResult r;
    const auto nodes = active_nodes(s);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double scale = 1.0 / s.beta();
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = nodes[pick(rng)];
        const std::size_t width = s.stencil(n).size();
        std::vector<double> d(width), d2(width);
        const double r0 = scale * (0.5 + 0.5 * u(rng));
        const double r1 = r0 + u(rng);
        double dist = std::abs(r1 - r0);
        for (std::size_t c = 0; c < width; ++c) {
            d[c] = scale * u(rng);
            d2[c] = d[c] + u(rng);
            dist = std::max(dist, std::abs(d2[c] - d[c]));
        }
        const double change = std::abs(s.evaluate_local(n, r1, d2) - s.evaluate_local(n, r0, d));
        r.record(change - s.constants().K_h * dist - roundoff(s, scale));
    }
    return r;
}

/// |S(u) - S(v)|_inf <= gamma |u - v|_inf for the Euler map.
inline PropertyResult check_contraction(const Scheme& s, std::mt19937_64& rng, int trials) {
    PropertyResult r;
    for (int t = 0; t < trials; ++t) {
        const auto u = random_mesh(s, rng, 0.0, 1.0 / s.beta());
        auto v = u;
        // Perturb everywhere or only at a few nodes, alternating.
        std::uniform_real_distribution<double> bump(-1.0, 1.0);
        const auto nodes = active_nodes(s);
        if (t % 2 == 0) {
            for (std::size_t n : nodes) v[n] += bump(rng);
        } else {
            for (int c = 0; c < 3; ++c) v[nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)]] += bump(rng);
        }
        double in = 0.0;
        for (std::size_t n = 0; n < u.size(); ++n) in = std::max(in, std::abs(u[n] - v[n]));
        const auto su = euler_step(s, u);
        const auto sv = euler_step(s, v);
        double out = 0.0;
        for (std::size_t n = 0; n < u.size(); ++n) out = std::max(out, std::abs(su[n] - sv[n]));
        r.record(out - s.constants().gamma * in - 1e-12 * (1.0 / s.beta()));
    }
    return r;
}

/// Direct evaluation of the piecewise-linear control objective.
inline double phi_combined(double s, double a, double dm, double dp, double dy) {
    const double drift = s + a;
    return std::max(drift, 0.0) * dm - std::max(-drift, 0.0) * dp + std::abs(a) * dy;
}

inline double phi_split(double a, double dm, double dp, double dy) {
    return std::max(a, 0.0) * dm - std::max(-a, 0.0) * dp + std::abs(a) * dy;
}

/// Minimum of `phi` over lo + i * 1e-3 (bounds included).
template <class Phi>
double brute_force_min(double lo, double hi, Phi phi) {
    const auto steps = static_cast<std::int64_t>(std::llround((hi - lo) * 1000.0));
    double best = phi(hi);
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double a = std::min(hi, (std::llround(lo * 1000.0) + i) / 1000.0);
        best = std::min(best, phi(a));
    }
    return best;
}

}  // namespace fuelctl::testing
