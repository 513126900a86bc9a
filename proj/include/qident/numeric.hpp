#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qident {

/// Exact rational scalar (GMP-backed). Arithmetic never rounds.
using Rational = boost::multiprecision::mpq_rational;
/// Arbitrary-precision binary float (MPFR-backed); precision is the
/// thread's default_precision in decimal digits.
using BigFloat = boost::multiprecision::mpfr_float;
using Integer = boost::multiprecision::mpz_int;

inline constexpr unsigned kMinFloatDigits = 30;

/// Set the working precision for BigFloat arithmetic on this thread.
inline void set_float_precision(unsigned decimal_digits) {
    if (decimal_digits < kMinFloatDigits)
        throw std::invalid_argument("BigFloat precision must be >= 30 decimal digits");
    BigFloat::default_precision(decimal_digits);
}

/// base^e with integer exponent, exact. base must be nonzero for e < 0.
inline Rational rat_pow(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    Integer n = boost::multiprecision::numerator(base);
    Integer d = boost::multiprecision::denominator(base);
    unsigned long mag = static_cast<unsigned long>(e < 0 ? -e : e);
    if (e < 0) {
        if (n == 0) throw std::domain_error("rat_pow: zero base with negative exponent");
        std::swap(n, d);
    }
    Integer np = boost::multiprecision::pow(n, mag);
    Integer dp = boost::multiprecision::pow(d, mag);
    return Rational(np, dp);
}

/// log|x| computed through mantissa/exponent splits, safe for huge values.
inline double log_abs(const Rational& x) {
    if (x == 0) throw std::domain_error("log_abs(0)");
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, mpq_numref(x.backend().data()));
    double md = mpz_get_d_2exp(&ed, mpq_denref(x.backend().data()));
    return std::log(std::fabs(mn)) - std::log(std::fabs(md)) +
           (static_cast<double>(en) - static_cast<double>(ed)) * std::log(2.0);
}

inline long binom2(long m) { return m * (m - 1) / 2; }

/// The series base q with 0 < q < 1, plus exact q-lattice probing.
class QBase {
  public:
    explicit QBase(Rational q) : q_(std::move(q)) {
        if (!(q_ > 0 && q_ < 1)) throw std::invalid_argument("QBase requires 0 < q < 1");
        log_q_ = log_abs(q_);
    }

    const Rational& value() const { return q_; }
    Rational pow(long e) const { return rat_pow(q_, e); }
    double log_value() const { return log_q_; }

    /// Exact integer t with u == q^t, if one exists (u must be positive).
    std::optional<long> exponent_of(const Rational& u) const {
        if (u <= 0) return std::nullopt;
        if (u == 1) return 0;
        double t = log_abs(u) / log_q_;
        if (std::fabs(t) > 1e5) return std::nullopt;
        long t0 = std::lround(t);
        for (long cand : {t0, t0 - 1, t0 + 1})
            if (u == rat_pow(q_, cand)) return cand;
        return std::nullopt;
    }

    /// True when u lies within eps (relatively) of some lattice point q^t,
    /// |t| <= range, without being exactly on it.
    bool near_lattice(const Rational& u, double eps, long range) const {
        if (u <= 0) return false;
        double t = log_abs(u) / log_q_;
        for (long cand : {static_cast<long>(std::floor(t)), static_cast<long>(std::ceil(t))}) {
            if (std::labs(cand) > range) continue;
            double rel = std::expm1(log_abs(u) - static_cast<double>(cand) * log_q_);
            if (std::fabs(rel) < eps && u != rat_pow(q_, cand)) return true;
        }
        return false;
    }

  private:
    Rational q_;
    double log_q_ = 0.0;
};

/// Memoized integer powers of a fixed base, extended lazily in both
/// directions. Deque storage keeps references valid while the table grows,
/// so two powers can be used inside one arithmetic expression.
template <class S>
class PowTable {
  public:
    PowTable() = default;
    explicit PowTable(S base) : base_(std::move(base)) {
        pos_.push_back(S(1));
        neg_.push_back(S(1));
    }

    const S& operator()(long e) {
        if (e >= 0) {
            while (static_cast<long>(pos_.size()) <= e) pos_.push_back(pos_.back() * base_);
            return pos_[static_cast<std::size_t>(e)];
        }
        long m = -e;
        while (static_cast<long>(neg_.size()) <= m) neg_.push_back(neg_.back() / base_);
        return neg_[static_cast<std::size_t>(m)];
    }

  private:
    S base_{};
    std::deque<S> pos_, neg_;
};

inline std::string to_decimal(const Rational& v, unsigned digits = 30) {
    BigFloat f(v);
    return f.str(digits, std::ios_base::scientific);
}
inline std::string to_decimal(const BigFloat& v, unsigned digits = 30) {
    return v.str(digits, std::ios_base::scientific);
}

}  // namespace qident
