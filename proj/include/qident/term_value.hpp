#pragma once

#include <utility>

#include "qident/numeric.hpp"

namespace qident {

/// How a single lattice term (or closed-form factor) came out. Zero and Pole
/// are values, not errors: summation skips exact zeros, and a pole is
/// reported to the caller, who decides.
enum class TermKind { Finite, Zero, Pole };

/// Severity order used when combining factors multiplicatively: a pole
/// dominates a zero, a zero dominates a finite value. 0*inf is conservatively
/// a pole.
inline TermKind combine_kinds(TermKind a, TermKind b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

inline TermKind reciprocal_kind(TermKind k) {
    switch (k) {
        case TermKind::Zero: return TermKind::Pole;
        case TermKind::Pole: return TermKind::Zero;
        default: return TermKind::Finite;
    }
}

template <class S>
struct TermValue {
    TermKind kind = TermKind::Finite;
    S value{};

    static TermValue finite(S v) { return {TermKind::Finite, std::move(v)}; }
    static TermValue zero() { return {TermKind::Zero, S(0)}; }
    static TermValue pole() { return {TermKind::Pole, S(0)}; }

    bool is_finite() const { return kind == TermKind::Finite; }
    bool is_zero() const { return kind == TermKind::Zero; }
    bool is_pole() const { return kind == TermKind::Pole; }

    /// Finite or zero: a number that can enter a sum.
    bool summable() const { return kind != TermKind::Pole; }
    S summable_value() const { return kind == TermKind::Finite ? value : S(0); }

    TermValue& operator*=(const TermValue& o) {
        kind = combine_kinds(kind, o.kind);
        if (kind == TermKind::Finite) value *= o.value;
        return *this;
    }
    TermValue& operator/=(const TermValue& o) {
        kind = combine_kinds(kind, reciprocal_kind(o.kind));
        if (kind == TermKind::Finite) value /= o.value;
        return *this;
    }
    friend TermValue operator*(TermValue a, const TermValue& b) { return a *= b; }
    friend TermValue operator/(TermValue a, const TermValue& b) { return a /= b; }
};

}  // namespace qident
