#pragma once

#include <random>
#include <string>
#include <vector>

#include "torusforge/doubling.hpp"
#include "torusforge/poly.hpp"
#include "torusforge/vfields.hpp"

namespace tftest {

using torusforge::Exponents;
using torusforge::Poly;
using torusforge::Rational;

inline Rational random_rational(std::mt19937_64& rng, long max_num = 9, long max_den = 6,
                                bool allow_zero = false) {
    std::uniform_int_distribution<long> num(-max_num, max_num);
    std::uniform_int_distribution<long> den(1, max_den);
    for (;;) {
        Rational r(num(rng), den(rng));
        if (allow_zero || !r.is_zero()) return r;
    }
}

// Random sparse polynomial of total degree <= max_deg (possibly zero when
// terms collide and cancel, which downstream tests must tolerate).
inline Poly random_poly(std::mt19937_64& rng, int nvars, int max_deg, int max_terms = 6) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> expd(0, max_deg);
    Poly p(nvars);
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        Exponents e(nvars);
        for (;;) {
            int total = 0;
            for (int v = 0; v < nvars; ++v) {
                e[v] = expd(rng);
                total += e[v];
            }
            if (total <= max_deg) break;
        }
        p += Poly::monomial(nvars, e, random_rational(rng));
    }
    return p;
}

// As above but guaranteed nonzero with total degree exactly deg.
inline Poly random_poly_of_degree(std::mt19937_64& rng, int nvars, int deg, int max_terms = 6) {
    for (;;) {
        Poly p = random_poly(rng, nvars, deg, max_terms);
        Exponents top(nvars, 0);
        // distribute exactly `deg` among the variables
        int rest = deg;
        for (int v = 0; v < nvars; ++v) {
            std::uniform_int_distribution<int> pick(0, rest);
            int take = (v == nvars - 1) ? rest : pick(rng);
            top[v] = take;
            rest -= take;
        }
        p += Poly::monomial(nvars, top, random_rational(rng));
        if (p.total_degree() && *p.total_degree() == deg) return p;
    }
}

inline torusforge::vfields::PlanarField random_planar(std::mt19937_64& rng, int max_deg) {
    return torusforge::vfields::PlanarField(random_poly(rng, 2, max_deg),
                                            random_poly(rng, 2, max_deg));
}

inline torusforge::vfields::SpatialField random_spatial(std::mt19937_64& rng, int nspace,
                                                        int max_deg) {
    std::vector<Poly> comps;
    for (int i = 0; i < nspace; ++i) comps.push_back(random_poly(rng, nspace, max_deg));
    return torusforge::vfields::SpatialField(std::move(comps), nspace, false);
}

// Reference planar system: unit circle cycle centered at (2, 0), radial
// contraction rate r(1 - r^2) about that center, angular speed exactly 1.
// Its cycle (2 + cos t, sin t) stays inside the default box.
inline torusforge::vfields::PlanarField circle_system() {
    std::vector<std::string> names = {"x", "y"};
    Poly P = Poly::parse("-y + (x-2)*(1 - (x-2)^2 - y^2)", names);
    Poly Q = Poly::parse("(x-2) + y*(1 - (x-2)^2 - y^2)", names);
    return torusforge::vfields::PlanarField(std::move(P), std::move(Q));
}

// Time reversal of a planar field (carries attracting cycles to repelling).
inline torusforge::vfields::PlanarField reversed(const torusforge::vfields::PlanarField& f) {
    return torusforge::vfields::PlanarField(-f.P, -f.Q, f.K);
}

} // namespace tftest
