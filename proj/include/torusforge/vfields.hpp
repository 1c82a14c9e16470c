#pragma once

#include <span>
#include <string>
#include <vector>

#include "poly.hpp"

namespace torusforge::vfields {

// Planar domain (0, b) x (alpha, beta); the first coordinate is kept away
// from zero because downstream it carries a squared radius.
struct Box {
    Rational b = Rational(4);
    Rational alpha = Rational(-4);
    Rational beta = Rational(4);

    void validate() const {
        if (!(Rational(0) < b) || !(alpha < beta))
            throw InputError("box must satisfy 0 < b and alpha < beta");
    }
    bool contains(double u, double v, double margin = 0.0) const {
        return u > margin && u < b.to_double() - margin &&
               v > alpha.to_double() + margin && v < beta.to_double() - margin;
    }
};

// Polynomial planar system x' = P(x,y), y' = Q(x,y) on the box K.
struct PlanarField {
    Poly P;
    Poly Q;
    Box K;

    PlanarField(Poly p, Poly q, Box box = {}) : P(std::move(p)), Q(std::move(q)), K(box) {
        if (P.nvars() != 2 || Q.nvars() != 2)
            throw InputError("planar field components must use exactly two variables");
        K.validate();
    }

    static std::vector<std::string> var_names() { return {"x", "y"}; }
};

// Polynomial field in nspace spatial variables, optionally depending on a
// distinguished perturbation parameter that occupies the final variable slot.
struct SpatialField {
    std::vector<Poly> components;
    int nspace = 0;
    bool has_eps = false;

    SpatialField(std::vector<Poly> comps, int nsp, bool eps)
        : components(std::move(comps)), nspace(nsp), has_eps(eps) {
        if (nspace < 1 || static_cast<int>(components.size()) != nspace)
            throw InputError("spatial field needs one component per spatial variable");
        for (const Poly& c : components)
            if (c.nvars() != nvars())
                throw InputError("spatial component over wrong variable count");
    }

    int nvars() const { return nspace + (has_eps ? 1 : 0); }

    // Degree in the spatial variables only.
    std::optional<int> space_degree() const {
        std::optional<int> d;
        for (const Poly& c : components) {
            auto dc = c.degree_in_first(nspace);
            if (dc && (!d || *dc > *d)) d = dc;
        }
        return d;
    }

    std::vector<std::string> var_names() const {
        auto n = default_var_names(nspace);
        if (has_eps) n.push_back("eps");
        return n;
    }
};

// First order averaged system on the half plane r > 0; first component is
// divisible by r, second by r^2 (enforced).
struct GuidingField {
    Poly g1;
    Poly g2;

    GuidingField(Poly a, Poly b) : g1(std::move(a)), g2(std::move(b)) {
        if (g1.nvars() != 2 || g2.nvars() != 2)
            throw InputError("guiding field components must use exactly two variables");
        if (!g1.is_zero() && !g1.divisible_by_var(0, 1))
            throw InputError("first guiding component must vanish on r = 0");
        if (!g2.is_zero() && !g2.divisible_by_var(0, 2))
            throw InputError("second guiding component must be divisible by r^2");
    }

    static std::vector<std::string> var_names() { return {"r", "z"}; }
};

// ---------------------------------------------------------------------------
// Constructions.

// Rotational suspension of a planar system.  The planar variables are read as
// (squared radius, height); the result lives in (x, y, z, eps):
//   x' = -y
//   y' =  x + eps * y * P(x^2 + y^2, z)
//   z' =  2 * eps * y^2 * Q(x^2 + y^2, z)
inline SpatialField lift_to_3d(const PlanarField& f) {
    const int N = 4;
    Poly x = Poly::variable(N, 0), y = Poly::variable(N, 1);
    Poly z = Poly::variable(N, 2), eps = Poly::variable(N, 3);
    std::vector<Poly> subs = {x * x + y * y, z};

    Poly Pr = f.P.compose(subs);
    Poly Qr = f.Q.compose(subs);

    std::vector<Poly> comps;
    comps.push_back(-y);
    comps.push_back(x + eps * y * Pr);
    comps.push_back((eps * y * y * Qr).scale(Rational(2)));
    return SpatialField(std::move(comps), 3, true);
}

// Classical Lienard family: planar P = -y, Q = x - a - F(y), then lifted.
// F is univariate; its variable is read as the planar y.
inline SpatialField lienard_lift(const Poly& F, const Rational& a, Box K = {}) {
    if (F.nvars() != 1)
        throw InputError("lienard_lift expects a univariate polynomial");
    Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    std::vector<Poly> suby = {y};
    Poly P = -y;
    Poly Q = x - Poly::constant(2, a) - F.compose(suby);
    return lift_to_3d(PlanarField(std::move(P), std::move(Q), K));
}

// Shift the phase portrait along x by +c (substitutes x -> x - c), used to
// move a cycle into the positive-x half plane.  The box follows the portrait
// as far as its (0, b) form allows: the right edge moves, the left edge is
// pinned at zero by the domain type.
inline PlanarField translate_x(const PlanarField& f, const Rational& c) {
    std::vector<Poly> subs = {Poly::variable(2, 0) - Poly::constant(2, c), Poly::variable(2, 1)};
    Box K = f.K;
    K.b += c;
    if (!(Rational(0) < K.b))
        throw InputError("translate_x: shifted box collapses (b + c <= 0)");
    return PlanarField(f.P.compose(subs), f.Q.compose(subs), K);
}

// Shift the portrait of a spatial field by +c (substitutes x_i -> x_i - c_i
// in the spatial slots; eps is untouched).
inline SpatialField translate(const SpatialField& f, std::span<const Rational> c) {
    if (static_cast<int>(c.size()) != f.nspace)
        throw InputError("translate: one offset per spatial variable required");
    const int N = f.nvars();
    std::vector<Poly> subs;
    subs.reserve(N);
    for (int i = 0; i < f.nspace; ++i)
        subs.push_back(Poly::variable(N, i) - Poly::constant(N, c[i]));
    if (f.has_eps) subs.push_back(Poly::variable(N, f.nspace));
    std::vector<Poly> comps;
    comps.reserve(f.components.size());
    for (const Poly& comp : f.components) comps.push_back(comp.compose(subs));
    return SpatialField(std::move(comps), f.nspace, f.has_eps);
}

// Fix the perturbation parameter to an exact value.
inline SpatialField bind_eps(const SpatialField& f, const Rational& eps) {
    if (!f.has_eps)
        throw InputError("bind_eps: field has no perturbation parameter");
    std::vector<Poly> comps;
    comps.reserve(f.components.size());
    for (const Poly& comp : f.components)
        comps.push_back(comp.bind_var(f.nvars() - 1, eps));
    return SpatialField(std::move(comps), f.nspace, false);
}

// Averaged radial system of a planar pair: ((1/2) r P(r^2, z), r^2 Q(r^2, z))
// over the variables (r, z).
inline GuidingField derive_guiding(const PlanarField& f) {
    Poly r = Poly::variable(2, 0), z = Poly::variable(2, 1);
    std::vector<Poly> subs = {r * r, z};
    Poly g1 = (r * f.P.compose(subs)).scale(Rational(1, 2));
    Poly g2 = (r * r) * f.Q.compose(subs);
    return GuidingField(std::move(g1), std::move(g2));
}

// Checks that the guiding field is exactly the even-radius form of the planar
// pair: substituting rho = r^2 into (2 r g1, g2) and dividing by rho must
// reproduce (P, Q).  Optional outputs receive the mismatch.
inline bool guiding_conjugacy_check(const GuidingField& g, const PlanarField& f,
                                    Poly* residual_p = nullptr, Poly* residual_q = nullptr) {
    Poly A = g.g1.times_var(0, 1).scale(Rational(2)); // r * P(r^2, z) * r
    Poly B = g.g2;
    if (!A.has_only_even_powers(0) || !B.has_only_even_powers(0))
        return false;
    Poly Abar = A.contract_even_powers(0);
    Poly Bbar = B.contract_even_powers(0);
    if ((!Abar.is_zero() && !Abar.divisible_by_var(0, 1)) ||
        (!Bbar.is_zero() && !Bbar.divisible_by_var(0, 1)))
        return false;
    Poly Pbar = Abar.is_zero() ? Poly::zero(2) : Abar.divide_by_var(0, 1);
    Poly Qbar = Bbar.is_zero() ? Poly::zero(2) : Bbar.divide_by_var(0, 1);
    if (residual_p) *residual_p = Pbar - f.P;
    if (residual_q) *residual_q = Qbar - f.Q;
    return Pbar == f.P && Qbar == f.Q;
}

// ---------------------------------------------------------------------------
// Evaluation.

// Point has nspace entries; eps is appended when the field carries the
// perturbation slot and ignored otherwise.
inline std::vector<Rational> eval_field_exact(const SpatialField& f,
                                              std::span<const Rational> point,
                                              const Rational& eps = Rational(0)) {
    if (static_cast<int>(point.size()) != f.nspace)
        throw InputError("eval_field: point dimension mismatch");
    std::vector<Rational> full(point.begin(), point.end());
    if (f.has_eps) full.push_back(eps);
    std::vector<Rational> out;
    out.reserve(f.components.size());
    for (const Poly& c : f.components) out.push_back(c.eval_exact(full));
    return out;
}

inline std::vector<double> eval_field(const SpatialField& f, std::span<const double> point,
                                      double eps = 0.0) {
    if (static_cast<int>(point.size()) != f.nspace)
        throw InputError("eval_field: point dimension mismatch");
    std::vector<double> full(point.begin(), point.end());
    if (f.has_eps) full.push_back(eps);
    std::vector<double> out;
    out.reserve(f.components.size());
    for (const Poly& c : f.components) out.push_back(c.eval_float(full));
    return out;
}

// Float-compiled spatial field without the perturbation slot; the right hand
// side signature matches the integrator.
struct CompiledField {
    std::vector<CompiledPoly> comps;
    int dim = 0;
    double direction = 1.0; // -1 integrates the time-reversed field

    explicit CompiledField(const SpatialField& f, double dir = 1.0)
        : dim(f.nspace), direction(dir) {
        if (f.has_eps)
            throw InputError("compile: bind the perturbation parameter first");
        for (const Poly& c : f.components) comps.emplace_back(c);
    }

    void operator()(double, std::span<const double> y, std::span<double> dy) const {
        for (int i = 0; i < dim; ++i) dy[i] = direction * comps[i].eval(y);
    }
};

} // namespace torusforge::vfields
