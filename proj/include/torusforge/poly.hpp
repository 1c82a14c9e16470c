#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace torusforge {

using Exponents = std::vector<int>;

// Graded lexicographic order: compare total degree first, then exponent
// vectors lexicographically.  Keys of equal length only.
struct GrlexLess {
    bool operator()(const Exponents& a, const Exponents& b) const {
        long da = std::accumulate(a.begin(), a.end(), 0L);
        long db = std::accumulate(b.begin(), b.end(), 0L);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

// Sparse multivariate polynomial with exact rational coefficients.
// Invariants: no stored term has a zero coefficient; every exponent vector
// has exactly nvars() entries, all nonnegative.
class Poly {
public:
    using TermMap = std::map<Exponents, Rational, GrlexLess>;

    explicit Poly(int nvars = 0) : nvars_(nvars) {
        if (nvars < 0) throw InputError("negative variable count");
    }

    static Poly zero(int nvars) { return Poly(nvars); }

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term(Exponents(nvars, 0), c);
        return p;
    }

    static Poly variable(int nvars, int var) {
        Poly p(nvars);
        p.check_var(var);
        Exponents e(nvars, 0);
        e[var] = 1;
        p.add_term(e, Rational(1));
        return p;
    }

    static Poly monomial(int nvars, Exponents exps, const Rational& c) {
        Poly p(nvars);
        if (static_cast<int>(exps.size()) != nvars)
            throw InputError("exponent vector length mismatch");
        for (int e : exps)
            if (e < 0) throw InputError("negative exponent");
        p.add_term(std::move(exps), c);
        return p;
    }

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    // Total degree; empty for the zero polynomial (the "minus infinity" case).
    std::optional<int> total_degree() const {
        std::optional<int> d;
        for (const auto& [e, c] : terms_) {
            int s = std::accumulate(e.begin(), e.end(), 0);
            if (!d || s > *d) d = s;
        }
        return d;
    }

    // Total degree counting only the first k variables.
    std::optional<int> degree_in_first(int k) const {
        if (k < 0 || k > nvars_) throw InputError("degree_in_first: bad variable count");
        std::optional<int> d;
        for (const auto& [e, c] : terms_) {
            int s = std::accumulate(e.begin(), e.begin() + k, 0);
            if (!d || s > *d) d = s;
        }
        return d;
    }

    std::optional<int> degree_in(int var) const {
        check_var(var);
        std::optional<int> d;
        for (const auto& [e, c] : terms_)
            if (!d || e[var] > *d) d = e[var];
        return d;
    }

    Rational coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly operator-() const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    Poly& operator+=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r(a.nvars_);
        Exponents e(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    Poly scale(const Rational& c) const {
        Poly r(nvars_);
        if (c.is_zero()) return r;
        for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
        return r;
    }

    Poly pow(unsigned n) const {
        Poly r = constant(nvars_, Rational(1));
        Poly base = *this;
        while (n) {
            if (n & 1u) r = r * base;
            if (n >>= 1u) base = base * base;
        }
        return r;
    }

    // Multiply by var^k.
    Poly times_var(int var, int k = 1) const {
        check_var(var);
        if (k < 0) throw InputError("times_var: negative power");
        Poly r(nvars_);
        for (const auto& [e0, c] : terms_) {
            Exponents e = e0;
            e[var] += k;
            r.terms_.emplace(std::move(e), c);
        }
        return r;
    }

    // Exact division by var^k; every term must carry at least var^k.
    Poly divide_by_var(int var, int k = 1) const {
        check_var(var);
        Poly r(nvars_);
        for (const auto& [e0, c] : terms_) {
            if (e0[var] < k)
                throw InputError("polynomial not divisible by requested variable power");
            Exponents e = e0;
            e[var] -= k;
            r.terms_.emplace(std::move(e), c);
        }
        return r;
    }

    bool divisible_by_var(int var, int k = 1) const {
        check_var(var);
        for (const auto& [e, c] : terms_)
            if (e[var] < k) return false;
        return true;
    }

    // Halve every exponent of var; requires them all even.  Realizes the
    // substitution var^2 -> var.
    Poly contract_even_powers(int var) const {
        check_var(var);
        Poly r(nvars_);
        for (const auto& [e0, c] : terms_) {
            if (e0[var] % 2 != 0)
                throw InputError("odd power where an even one was required");
            Exponents e = e0;
            e[var] /= 2;
            r.terms_.emplace(std::move(e), c);
        }
        return r;
    }

    bool has_only_even_powers(int var) const {
        check_var(var);
        for (const auto& [e, c] : terms_)
            if (e[var] % 2 != 0) return false;
        return true;
    }

    Poly partial(int var) const {
        check_var(var);
        Poly r(nvars_);
        for (const auto& [e0, c] : terms_) {
            if (e0[var] == 0) continue;
            Rational nc = c * Rational(e0[var]);
            Exponents e = e0;
            e[var] -= 1;
            r.add_term(std::move(e), nc);
        }
        return r;
    }

    // Simultaneous substitution: variable i becomes subs[i].  All substituted
    // polynomials must live in a common variable space, which becomes the
    // space of the result.
    Poly compose(std::span<const Poly> subs) const {
        if (static_cast<int>(subs.size()) != nvars_)
            throw InputError("compose: substitution count != variable count");
        int m = nvars_ == 0 ? 0 : subs[0].nvars();
        for (const Poly& s : subs)
            if (s.nvars() != m)
                throw InputError("compose: substitutions disagree on variable count");

        std::vector<std::vector<Poly>> pw(nvars_);
        auto power_of = [&](int i, int e) -> const Poly& {
            auto& cache = pw[i];
            if (cache.empty()) cache.push_back(constant(m, Rational(1)));
            while (static_cast<int>(cache.size()) <= e)
                cache.push_back(cache.back() * subs[i]);
            return cache[e];
        };

        Poly r(m);
        for (const auto& [e, c] : terms_) {
            Poly acc = constant(m, c);
            for (int i = 0; i < nvars_; ++i)
                if (e[i] > 0) acc = acc * power_of(i, e[i]);
            r += acc;
        }
        return r;
    }

    // Fix one variable to an exact value; the result loses that variable slot.
    Poly bind_var(int var, const Rational& value) const {
        check_var(var);
        Poly r(nvars_ - 1);
        Exponents ne(nvars_ - 1);
        for (const auto& [e, c] : terms_) {
            for (int i = 0, j = 0; i < nvars_; ++i)
                if (i != var) ne[j++] = e[i];
            r.add_term(ne, c * value.pow(static_cast<unsigned>(e[var])));
        }
        return r;
    }

    // Reinterpret in a larger variable space; new trailing variables unused.
    Poly widened(int new_nvars) const {
        if (new_nvars < nvars_) throw InputError("widened: shrinking variable space");
        Poly r(new_nvars);
        for (const auto& [e, c] : terms_) {
            Exponents ne(new_nvars, 0);
            std::copy(e.begin(), e.end(), ne.begin());
            r.terms_.emplace(std::move(ne), c);
        }
        return r;
    }

    Rational eval_exact(std::span<const Rational> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw InputError("eval_exact: argument count mismatch");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < nvars_; ++i)
                if (e[i] > 0) t *= x[i].pow(static_cast<unsigned>(e[i]));
            acc += t;
        }
        return acc;
    }

    // Horner evaluation, recursing on the last variable.
    double eval_float(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw InputError("eval_float: argument count mismatch");
        std::vector<std::pair<const Exponents*, double>> flat;
        flat.reserve(terms_.size());
        for (const auto& [e, c] : terms_)
            flat.emplace_back(&e, c.to_double());
        return horner(flat, nvars_ - 1, x);
    }

    std::string to_string(std::span<const std::string> names) const;
    static Poly parse(std::string_view text, std::span<const std::string> names);

private:
    void check_var(int var) const {
        if (var < 0 || var >= nvars_) throw InputError("variable index out of range");
    }
    void check_same(const Poly& o) const {
        if (nvars_ != o.nvars_)
            throw InputError("polynomials over different variable counts");
    }
    void add_term(Exponents e, const Rational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    using FlatTerms = std::vector<std::pair<const Exponents*, double>>;
    static double horner(const FlatTerms& terms, int var, std::span<const double> x) {
        if (terms.empty()) return 0.0;
        if (var < 0) {
            double s = 0.0;
            for (const auto& [e, c] : terms) s += c;
            return s;
        }
        // Bucket by exponent of `var`, descending, then fold with Horner.
        std::map<int, FlatTerms, std::greater<>> buckets;
        for (const auto& t : terms) buckets[(*t.first)[var]].push_back(t);
        double acc = 0.0;
        int prev_exp = -1;
        for (const auto& [e, bucket] : buckets) {
            if (prev_exp < 0) {
                prev_exp = e;
            } else {
                for (int k = prev_exp; k > e; --k) acc *= x[var];
                prev_exp = e;
            }
            acc += horner(bucket, var - 1, x);
        }
        for (int k = prev_exp; k > 0; --k) acc *= x[var];
        return acc;
    }

    int nvars_;
    TermMap terms_;
};

// ---------------------------------------------------------------------------
// Canonical text form.  Terms print in descending graded lex order, sign
// folded into the separator: "3/2*x^2*y - z".

inline std::string Poly::to_string(std::span<const std::string> names) const {
    if (static_cast<int>(names.size()) != nvars_)
        throw InputError("to_string: name count mismatch");
    if (terms_.empty()) return "0";

    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        bool first = out.empty();
        bool neg = c.sign() < 0;
        Rational mag = neg ? -c : c;

        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";

        bool has_vars = std::any_of(e.begin(), e.end(), [](int k) { return k > 0; });
        std::string coeff = mag.to_string();
        if (!has_vars) {
            out += coeff;
            continue;
        }
        bool wrote = false;
        if (coeff != "1") {
            out += coeff;
            wrote = true;
        }
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            if (wrote) out += "*";
            out += names[i];
            if (e[i] > 1) out += "^" + std::to_string(e[i]);
            wrote = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expression parser.
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*      '/' only by constants
//   unary  := ('+'|'-')* power
//   power  := atom ('^' uint)?
//   atom   := number | name | '(' expr ')'
//
// Numbers are unsigned integers or decimals; fractions arise from '/'.

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, std::span<const std::string> names)
        : text_(text), names_(names) {}

    Poly run() {
        Poly p = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int nvars() const { return static_cast<int>(names_.size()); }

    Poly expr() {
        Poly acc = term();
        for (;;) {
            if (eat('+')) acc += term();
            else if (eat('-')) acc -= term();
            else return acc;
        }
    }

    Poly term() {
        Poly acc = unary();
        for (;;) {
            if (eat('*')) {
                acc = acc * unary();
            } else if (eat('/')) {
                Poly d = unary();
                if (d.total_degree().value_or(-1) != 0)
                    fail("division is only defined by nonzero constants");
                acc = acc.scale(Rational(1) / d.terms().begin()->second);
            } else {
                return acc;
            }
        }
    }

    Poly unary() {
        bool neg = false;
        for (;;) {
            if (eat('-')) neg = !neg;
            else if (eat('+')) continue;
            else break;
        }
        Poly p = power();
        return neg ? -p : p;
    }

    Poly power() {
        Poly base = atom();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == start) fail("exponent must be a nonnegative integer");
            unsigned e = 0;
            for (size_t i = start; i < pos_; ++i) {
                e = e * 10 + static_cast<unsigned>(text_[i] - '0');
                if (e > 1000) fail("exponent too large");
            }
            base = base.pow(e);
        }
        return base;
    }

    Poly atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!eat(')')) fail("missing ')'");
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos_;
            bool dot = false;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if (std::isdigit(static_cast<unsigned char>(d))) { ++pos_; continue; }
                if (d == '.' && !dot) { dot = true; ++pos_; continue; }
                break;
            }
            return Poly::constant(nvars(), Rational::parse(text_.substr(start, pos_ - start)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            for (int i = 0; i < nvars(); ++i)
                if (names_[i] == name) return Poly::variable(nvars(), i);
            std::string known;
            for (const auto& n : names_) known += (known.empty() ? "" : ", ") + n;
            fail("unknown variable '" + name + "' (known: " + known + ")");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::span<const std::string> names_;
    size_t pos_ = 0;
};

} // namespace detail

inline Poly Poly::parse(std::string_view text, std::span<const std::string> names) {
    return detail::ExprParser(text, names).run();
}

// Default variable names: x | x,y | x,y,z | x1..xn.
inline std::vector<std::string> default_var_names(int n) {
    if (n <= 3) {
        static const std::vector<std::string> xyz = {"x", "y", "z"};
        return {xyz.begin(), xyz.begin() + n};
    }
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

// ---------------------------------------------------------------------------
// Float-compiled form for integration hot paths: flat term list plus a pow
// table rebuilt per evaluation in thread-local scratch.

class CompiledPoly {
public:
    CompiledPoly() = default;

    explicit CompiledPoly(const Poly& p) : nvars_(p.nvars()), max_exp_(p.nvars(), 0) {
        for (const auto& [e, c] : p.terms()) {
            terms_.push_back({c.to_double(), e});
            for (int i = 0; i < nvars_; ++i) max_exp_[i] = std::max(max_exp_[i], e[i]);
        }
        offsets_.resize(nvars_ + 1, 0);
        for (int i = 0; i < nvars_; ++i) offsets_[i + 1] = offsets_[i] + max_exp_[i] + 1;
    }

    int nvars() const { return nvars_; }

    double eval(std::span<const double> x) const {
        thread_local std::vector<double> pows;
        if (static_cast<size_t>(offsets_.back()) > pows.size())
            pows.resize(offsets_.back());
        for (int i = 0; i < nvars_; ++i) {
            double* base = pows.data() + offsets_[i];
            base[0] = 1.0;
            for (int k = 1; k <= max_exp_[i]; ++k) base[k] = base[k - 1] * x[i];
        }
        double acc = 0.0;
        for (const auto& t : terms_) {
            double v = t.c;
            for (int i = 0; i < nvars_; ++i)
                if (t.e[i]) v *= pows[offsets_[i] + t.e[i]];
            acc += v;
        }
        return acc;
    }

private:
    struct Term {
        double c;
        Exponents e;
    };
    int nvars_ = 0;
    std::vector<Term> terms_;
    std::vector<int> max_exp_;
    std::vector<int> offsets_;
};

} // namespace torusforge
