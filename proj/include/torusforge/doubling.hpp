#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "vfields.hpp"

namespace torusforge::doubling {

using vfields::SpatialField;

// ---------------------------------------------------------------------------
// Squaring pullback.  phi : x_j -> x_j^2 - 1 maps every open orthant of
// R^{d+1} diffeomorphically onto S = (-1, inf)^{d+1}; pulling a field back
// through phi replicates its invariant sets into all 2^{d+1} orthants at the
// cost of roughly doubling the degree.

// Component i of the result is (prod_{j != i} x_j) * (X0_i composed with phi).
// X0 must have d+1 polynomial components in d+1 variables and no perturbation
// slot (bind it first).
inline SpatialField pullback_double(const SpatialField& X0, int d) {
    if (X0.has_eps)
        throw InputError("pullback requires the perturbation parameter to be bound first");
    const int n = d + 1;
    if (d < 0 || X0.nspace != n)
        throw InputError("pullback dimension mismatch: expected " + std::to_string(n) +
                         " components");

    std::vector<Poly> subs;
    subs.reserve(n);
    for (int j = 0; j < n; ++j) {
        Poly xj = Poly::variable(n, j);
        subs.push_back(xj * xj - Poly::constant(n, Rational(1)));
    }

    std::vector<Poly> comps;
    comps.reserve(n);
    for (int i = 0; i < n; ++i) {
        Poly cofactor = Poly::constant(n, Rational(1));
        for (int j = 0; j < n; ++j)
            if (j != i) cofactor = cofactor * Poly::variable(n, j);
        comps.push_back(cofactor * X0.components[i].compose(subs));
    }
    return SpatialField(std::move(comps), n, false);
}

// Exact identity behind the construction:  Dphi * X1 == 2 (prod_j x_j) (X0 o phi)
// componentwise, with Dphi = diag(2 x_1, ..., 2 x_{d+1}).  True by definition
// when X1 came from pullback_double; checking it on arbitrary pairs catches
// any corruption of X1.  On failure the residuals (left minus right) are
// reported through the optional output.
inline bool verify_pullback_identity(const SpatialField& X0, const SpatialField& X1, int d,
                                     std::vector<Poly>* residuals = nullptr) {
    if (X0.has_eps || X1.has_eps)
        throw InputError("pullback identity is checked on fields without the perturbation slot");
    const int n = d + 1;
    if (X0.nspace != n || X1.nspace != n)
        throw InputError("pullback identity dimension mismatch");

    std::vector<Poly> subs;
    subs.reserve(n);
    for (int j = 0; j < n; ++j) {
        Poly xj = Poly::variable(n, j);
        subs.push_back(xj * xj - Poly::constant(n, Rational(1)));
    }
    Poly prod = Poly::constant(n, Rational(1));
    for (int j = 0; j < n; ++j) prod = prod * Poly::variable(n, j);

    bool ok = true;
    if (residuals) residuals->clear();
    for (int i = 0; i < n; ++i) {
        Poly lhs = Poly::variable(n, i).scale(Rational(2)) * X1.components[i];
        Poly rhs = prod.scale(Rational(2)) * X0.components[i].compose(subs);
        Poly res = lhs - rhs;
        if (!res.is_zero()) ok = false;
        if (residuals) residuals->push_back(std::move(res));
    }
    return ok;
}

// ---------------------------------------------------------------------------
// Exact degree / count bookkeeping.

struct SequencePoint {
    mpz_class m;
    mpz_class tau;
};

// Closed forms m_k = 2^k (m0 + d) - d and tau_k = 2^{k(d+1)} tau0; equal to
// iterating m -> 2m + d and tau -> 2^{d+1} tau from (m0, tau0).
inline SequencePoint sequence(long m0, const mpz_class& tau0, int d, int k) {
    if (k < 0) throw InputError("sequence index must be nonnegative");
    if (d < 0) throw InputError("sequence dimension parameter must be nonnegative");
    mpz_class two_k;
    mpz_ui_pow_ui(two_k.get_mpz_t(), 2, static_cast<unsigned long>(k));
    mpz_class m = two_k * (m0 + d) - d;
    mpz_class two_kn;
    mpz_ui_pow_ui(two_kn.get_mpz_t(), 2,
                  static_cast<unsigned long>(k) * static_cast<unsigned long>(d + 1));
    return {m, two_kn * tau0};
}

// One verified doubling: X1 = pullback of X0, the identity re-checked, and
// the degree / torus-count certificates carried along.
struct DoublingStep {
    SpatialField X0;
    SpatialField X1;
    int d = 0;
    int degree_in = 0;   // actual total degree of X0
    int degree_out = 0;  // certified 2*degree_in + d
    bool degree_attained = true; // actual output degree == degree_out (generic case)
    mpz_class tori_in;
    mpz_class tori_out;
};

inline DoublingStep make_doubling_step(const SpatialField& X0, int d, const mpz_class& tori_in) {
    auto deg_in = X0.space_degree();
    if (!deg_in)
        throw InputError("cannot double the zero field");
    SpatialField X1 = pullback_double(X0, d);
    if (!verify_pullback_identity(X0, X1, d))
        throw InternalError("pullback identity failed on freshly built output");
    DoublingStep step{X0, X1, d, *deg_in, 2 * *deg_in + d, true, tori_in, tori_in};
    step.tori_out <<= (d + 1); // times 2^{d+1}
    auto deg_out = X1.space_degree();
    step.degree_attained = deg_out && *deg_out == step.degree_out;
    return step;
}

// ---------------------------------------------------------------------------
// Orthant bookkeeping.  Signs is one entry of {-1,+1} per coordinate.

using Signs = std::vector<int>;

inline void check_signs(const Signs& s) {
    if (s.empty()) throw InputError("empty sign vector");
    for (int v : s)
        if (v != 1 && v != -1) throw InputError("sign vector entries must be +1 or -1");
}

// All 2^{d+1} orthants of R^{d+1}; index 0 is all-plus and the first
// coordinate toggles slowest.
inline std::vector<Signs> all_octants(int d) {
    const int n = d + 1;
    if (d < 0 || n > 30) throw InputError("octant enumeration dimension out of range");
    std::vector<Signs> out;
    out.reserve(1u << n);
    for (unsigned i = 0; i < (1u << n); ++i) {
        Signs s(n);
        for (int j = 0; j < n; ++j)
            s[j] = (i >> (n - 1 - j)) & 1u ? -1 : 1;
        out.push_back(std::move(s));
    }
    return out;
}

// phi restricted to an orthant: requires the point strictly inside, lands in
// S = (-1, inf)^{d+1}.
inline std::vector<double> octant_chart(const Signs& signs, std::span<const double> p) {
    check_signs(signs);
    if (p.size() != signs.size()) throw InputError("octant chart dimension mismatch");
    std::vector<double> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] * signs[i] <= 0.0)
            throw InputError("point not strictly inside the stated orthant");
        out[i] = p[i] * p[i] - 1.0;
    }
    return out;
}

// Inverse chart into the stated orthant: x_i = sign_i * sqrt(q_i + 1).
inline std::vector<double> octant_chart_inverse(const Signs& signs, std::span<const double> q) {
    check_signs(signs);
    if (q.size() != signs.size()) throw InputError("octant chart dimension mismatch");
    std::vector<double> out(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        if (q[i] <= -1.0)
            throw InputError("point outside S = (-1, inf)^n");
        out[i] = signs[i] * std::sqrt(q[i] + 1.0);
    }
    return out;
}

// Sign of the time reparametrization in this orthant: +1 keeps the original
// time direction, -1 reverses it (attracting sets become repelling).
inline int octant_time_orientation(const Signs& signs) {
    check_signs(signs);
    int s = 1;
    for (int v : signs) s *= v;
    return s;
}

// ---------------------------------------------------------------------------
// Lower-bound tables.

// One stored planar lower bound: at least `bound` hyperbolic limit cycles
// among degree-k planar polynomial systems.
struct HilbertBound {
    int k = 0;
    long bound = 0;
    std::string provenance;
    bool use_for_rows = true; // false marks stored variants kept for reference
};

// Published lower bounds for the planar Hilbert numbers.  Two entries exist
// in the literature in both a conservative and a larger variant; both are
// stored, the conservative one feeds the derived rows.
inline std::vector<HilbertBound> builtin_hilbert_bounds() {
    const std::string src = "Prohens-Torregrosa 2019";
    std::vector<HilbertBound> t = {
        {2, 4, src, true},
        {3, 13, src, true},
        {4, 28, src, true},
        {5, 37, src, true},
        {6, 53, src, true},
        {7, 74, src, true},
        {8, 89, "conservative variant (cf. 96 in " + src + ")", true},
        {8, 96, src, false},
        {9, 120, src, true},
        {10, 142, src, true},
        {13, 212, src, true},
        {17, 348, "conservative variant (cf. 384 in " + src + ")", true},
        {17, 384, src, false},
        {21, 568, src, true},
        {31, 1184, src, true},
        {35, 1536, src, true},
        {39, 1920, src, true},
        {43, 2272, src, true},
    };
    return t;
}

struct BoundRow {
    mpz_class m;
    mpz_class bound;
    std::string provenance;
};

// Rows sorted by m (stable for equal m).  Semantics of a row: among 3D
// polynomial fields of degree m there is one carrying at least `bound`
// normally hyperbolic invariant tori.
struct BoundTable {
    std::vector<BoundRow> rows;

    void sort_by_m() {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const BoundRow& a, const BoundRow& b) { return a.m < b.m; });
    }

    std::string to_csv() const {
        std::string out = "m,lower_bound,provenance\n";
        for (const BoundRow& r : rows)
            out += r.m.get_str() + "," + r.bound.get_str() + "," + r.provenance + "\n";
        return out;
    }
};

// Torus-count rows implied by the planar bounds: a planar degree-k system
// with B cycles lifts to a degree-(2k+2) spatial system with B tori, and odd
// degrees inherit the preceding even row.
inline BoundTable torus_bound_table(std::span<const HilbertBound> bounds) {
    if (bounds.empty()) throw InputError("empty lower-bound list");
    BoundTable t;
    for (const HilbertBound& hb : bounds) {
        if (!hb.use_for_rows) continue;
        if (hb.k < 1) throw InputError("planar bound rows need k >= 1");
        if (hb.bound < 0) throw InputError("negative lower bound");
        long m_even = 2L * hb.k + 2;
        t.rows.push_back({mpz_class(m_even), mpz_class(hb.bound),
                          "lift of planar k=" + std::to_string(hb.k) + " bound (" +
                              hb.provenance + ")"});
        t.rows.push_back({mpz_class(m_even + 1), mpz_class(hb.bound),
                          "odd extension of m=" + std::to_string(m_even) + " row"});
    }
    t.sort_by_m();
    return t;
}

// Certificate rows for the repeated-doubling growth claim: each row k states
// a degree-m_k field with at least tau_k tori and carries the exact identity
// 128*tau_k == (m_k+2)^3 special to the seed (m0=6, tau0=4, d=2).
inline std::vector<BoundRow> sequence_certificate_rows(long m0, const mpz_class& tau0, int d,
                                                       int kmax) {
    std::vector<BoundRow> rows;
    for (int k = 0; k <= kmax; ++k) {
        SequencePoint p = sequence(m0, tau0, d, k);
        std::string prov = "squaring pullback step k=" + std::to_string(k) + " from (m0=" +
                           std::to_string(m0) + " tau0=" + tau0.get_str() + " d=" +
                           std::to_string(d) + ")";
        if (m0 == 6 && tau0 == 4 && d == 2) {
            mpz_class lhs = p.tau * 128;
            mpz_class rhs = (p.m + 2) * (p.m + 2) * (p.m + 2);
            if (lhs != rhs)
                throw InternalError("sequence certificate 128*tau == (m+2)^3 failed");
            prov += "; 128*tau == (m+2)^3 verified";
        }
        rows.push_back({p.m, p.tau, std::move(prov)});
    }
    return rows;
}

} // namespace torusforge::doubling
