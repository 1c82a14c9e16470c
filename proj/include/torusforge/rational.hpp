#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "errors.hpp"

namespace torusforge {

// Arbitrary precision rational, always kept canonical: gcd(num, den) = 1,
// den >= 1.  Thin wrapper over GMP so the rest of the library never touches
// mpq_t directly.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {} // NOLINT: implicit by design, mirrors int literals
    Rational(long num, long den) {
        if (den == 0)
            throw InputError("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    explicit Rational(const mpz_class& n) : v_(n) {}
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0)
            throw InputError("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }

    // Accepts "p", "-p", "p/q" with optional sign, or a plain decimal such as
    // "0.25" or "-1.5e-2" (converted exactly).
    static Rational parse(std::string_view text);

    bool is_zero() const { return sgn(v_) == 0; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero())
            throw InputError("division of rational by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    Rational pow(unsigned e) const {
        mpq_class r(1);
        mpq_class base = v_;
        unsigned k = e;
        while (k) {
            if (k & 1u) r *= base;
            base *= base;
            k >>= 1u;
        }
        return Rational(r);
    }

    double to_double() const { return v_.get_d(); }

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }
    bool is_integer() const { return v_.get_den() == 1; }

    // "3/2", "-3/2", "5" (no denominator when it is 1).
    std::string to_string() const {
        if (is_integer())
            return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

private:
    explicit Rational(mpq_class q) : v_(std::move(q)) {}
    mpq_class v_;
};

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw InputError("cannot parse rational: '" + std::string(text) + "'"); };

    std::string s(text);
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) fail();
    s = s.substr(a, b - a + 1);

    if (size_t slash = s.find('/'); slash != std::string::npos) {
        std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (ns.empty() || ds.empty()) fail();
        mpz_class num, den;
        if (num.set_str(ns, 10) != 0 || den.set_str(ds, 10) != 0) fail();
        return Rational(num, den);
    }

    // Integer fast path.
    {
        mpz_class n;
        if (n.set_str(s, 10) == 0)
            return Rational(n);
    }

    // Decimal with optional exponent: [-]digits[.digits][e[-]digits]
    bool neg = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = s[i] == '-'; ++i; }
    std::string digits;
    long frac_digits = 0, expo = 0;
    bool any = false, in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            any = true;
            if (in_frac) ++frac_digits;
        } else if (c == '.' && !in_frac) {
            in_frac = true;
        } else if ((c == 'e' || c == 'E') && any) {
            try { expo = std::stol(s.substr(i + 1)); } catch (...) { fail(); }
            for (char ec : s.substr(i + 1))
                if (!std::isdigit(static_cast<unsigned char>(ec)) && ec != '+' && ec != '-') fail();
            if (s.size() == i + 1) fail();
            break;
        } else {
            fail();
        }
    }
    if (!any) fail();

    mpz_class num;
    if (num.set_str(digits.empty() ? "0" : digits, 10) != 0) fail();
    if (neg) num = -num;
    long p10 = expo - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(p10 < 0 ? -p10 : p10));
    if (p10 >= 0)
        return Rational(mpz_class(num * scale));
    return Rational(num, scale);
}

} // namespace torusforge
