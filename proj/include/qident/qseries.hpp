#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qident/lattice_sum.hpp"
#include "qident/qpochhammer.hpp"

namespace qident {

enum class SeriesKind { Unilateral, Bilateral };

/// An s-phi-(s-1) or s-psi-s series given by explicit parameter lists. The
/// unilateral form carries the implicit (q)_k in the denominator, so
/// |lower| = |upper| - 1; the bilateral form has |lower| = |upper|.
struct SeriesSpec {
    std::vector<Rational> upper;
    std::vector<Rational> lower;
    Rational q;
    Rational z;
    SeriesKind kind = SeriesKind::Unilateral;

    void validate() const {
        if (kind == SeriesKind::Unilateral && lower.size() + 1 != upper.size())
            throw std::invalid_argument("unilateral series needs |lower| = |upper| - 1");
        if (kind == SeriesKind::Bilateral && lower.size() != upper.size())
            throw std::invalid_argument("bilateral series needs |lower| = |upper|");
    }
};

enum class SeriesClass { Balanced, WellPoised, VeryWellPoised };

namespace detail {

inline bool multiset_equal(std::vector<Rational> a, std::vector<Rational> b, const Rational& eps) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = a[i] - b[i];
        if (d < 0) d = -d;
        if (d > eps) return false;
    }
    return true;
}

inline bool close(const Rational& a, const Rational& b, const Rational& eps) {
    Rational d = a - b;
    if (d < 0) d = -d;
    return d <= eps;
}

}  // namespace detail

/// Structural classification. Parameters are exact rationals, so with
/// eps = 0 the predicates are exact; a positive eps mirrors toleranced
/// comparison for inputs produced by floating pipelines.
inline std::set<SeriesClass> classify(const SeriesSpec& spec, const Rational& eps = Rational(0)) {
    spec.validate();
    std::set<SeriesClass> out;
    const auto& U = spec.upper;
    const auto& L = spec.lower;

    Rational pu(1), pl(1);
    for (const auto& u : U) pu *= u;
    for (const auto& l : L) pl *= l;
    if (spec.kind == SeriesKind::Unilateral) {
        if (detail::close(pl, pu * spec.q, eps) && detail::close(spec.z, spec.q, eps))
            out.insert(SeriesClass::Balanced);
        // Well-poised: some special parameter A with the remaining uppers
        // pairing against the lowers as u * l = A q.
        for (std::size_t s = 0; s < U.size(); ++s) {
            const Rational& A = U[s];
            if (A == 0) continue;
            std::vector<Rational> want;
            bool bad = false;
            for (std::size_t i = 0; i < U.size(); ++i) {
                if (i == s) continue;
                if (U[i] == 0) {
                    bad = true;
                    break;
                }
                want.push_back(A * spec.q / U[i]);
            }
            if (bad || !detail::multiset_equal(want, L, eps)) continue;
            out.insert(SeriesClass::WellPoised);
            // Very-well-poised: the pair q*sqrt(A), -q*sqrt(A) among the
            // remaining uppers.
            for (std::size_t i = 0; i < U.size(); ++i) {
                if (i == s) continue;
                if (U[i] * U[i] == A * spec.q * spec.q &&
                    std::count(U.begin(), U.end(), -U[i]) > 0) {
                    out.insert(SeriesClass::VeryWellPoised);
                    break;
                }
            }
            break;
        }
    } else {
        if (detail::close(pl, pu * spec.q * spec.q, eps) && detail::close(spec.z, spec.q, eps))
            out.insert(SeriesClass::Balanced);
        // Well-poised: a constant pairing product u * l = P.
        for (const auto& l0 : L) {
            if (U.empty() || U[0] == 0) break;
            Rational P = U[0] * l0;
            std::vector<Rational> want;
            bool bad = false;
            for (const auto& u : U) {
                if (u == 0) {
                    bad = true;
                    break;
                }
                want.push_back(P / u);
            }
            if (bad || !detail::multiset_equal(want, L, eps)) continue;
            out.insert(SeriesClass::WellPoised);
            // Very-well-poised: a1 = -a2 = q b1 = -q b2.
            for (const auto& u : U) {
                if (u == 0) continue;
                if (std::count(U.begin(), U.end(), -u) > 0 &&
                    std::count(L.begin(), L.end(), u / spec.q) > 0 &&
                    std::count(L.begin(), L.end(), -u / spec.q) > 0 &&
                    u * u == P * spec.q) {
                    out.insert(SeriesClass::VeryWellPoised);
                    break;
                }
            }
            break;
        }
    }
    return out;
}

/// Raw series term k -> prod(upper)_k / prod(lower)_k * z^k, bilateral in k.
template <class S>
Summand<S> series_summand(Workspace<S>& ws, const SeriesSpec& spec) {
    spec.validate();
    std::vector<int> up, lo;
    for (const auto& a : spec.upper) up.push_back(ws.intern(a, GuardRole::Num));
    for (const auto& b : spec.lower) lo.push_back(ws.intern(b, GuardRole::Den));
    if (spec.kind == SeriesKind::Unilateral) lo.push_back(ws.intern(spec.q, GuardRole::Den));
    const bool unilateral = spec.kind == SeriesKind::Unilateral;
    Rational z = spec.z;
    Workspace<S>* w = &ws;
    auto zpow = std::make_shared<PowTable<S>>(ws.ctx.from(z));

    Summand<S> s;
    s.rank = 1;
    s.eval = [=](const MultiIndex& kk) -> TermValue<S> {
        long k = kk.at(0);
        if (unilateral && k < 0) return TermValue<S>::zero();
        TermProduct<S> t(*w);
        for (int id : up) t.poch(id, k);
        for (int id : lo) t.dpoch(id, k);
        t.value((*zpow)(k));
        return t.done();
    };
    return s;
}

/// Smallest n >= 0 with some upper parameter equal to q^{-n}; such a series
/// terminates at k = n.
inline std::optional<long> terminating_order(const QBase& qb, const SeriesSpec& spec) {
    std::optional<long> best;
    for (const auto& u : spec.upper) {
        auto t = qb.exponent_of(u);
        if (t && *t <= 0 && (!best || -*t < *best)) best = -*t;
    }
    return best;
}

/// Evaluate a unilateral series: terminating specs are summed exactly over
/// their simplex, everything else by adaptive shells on the zero-extended
/// summand.
template <class S>
SumOutcome<S> eval_phi(Workspace<S>& ws, const SeriesSpec& spec, const ConvergencePolicy& policy) {
    if (spec.kind != SeriesKind::Unilateral)
        throw std::invalid_argument("eval_phi requires a unilateral spec");
    Summand<S> s = series_summand(ws, spec);
    if (auto n = terminating_order(ws.ctx.qb, spec)) return sum_finite(s, Support{Simplex{*n}});
    return sum_bilateral(s, policy);
}

/// Evaluate a bilateral series; natural truncation is probed first so that
/// vanishing parameter patterns reroute to exact finite summation.
template <class S>
SumOutcome<S> eval_psi(Workspace<S>& ws, const SeriesSpec& spec, const ConvergencePolicy& policy) {
    if (spec.kind != SeriesKind::Bilateral)
        throw std::invalid_argument("eval_psi requires a bilateral spec");
    Summand<S> s = series_summand(ws, spec);
    if (auto t = detect_natural_truncation(s)) return sum_finite(s, *t);
    return sum_bilateral(s, policy);
}

/// Both sides of the very-well-poised 8psi8 transformation: the bilateral
/// series on the left, and coeff_b * phi_b + coeff_d * phi_d on the right,
/// where the phi's are very-well-poised 8phi7 series. Everything is kept in
/// vwp-combined form, so no square roots of parameters are needed.
template <class S>
struct Transform8psi8 {
    SumOutcome<S> lhs;
    TermValue<S> coeff_b, coeff_d;
    SumOutcome<S> phi_b, phi_d;
    TermValue<S> rhs;
    bool rhs_ok = false;
};

/// Register every Pochhammer argument of the transformation's two sides for
/// sampling-time guards, without evaluating anything.
template <class S>
void transform_8psi8_guard_args(Workspace<S>& ws, const Rational& a, const Rational& b,
                                const Rational& c, const Rational& d, const Rational& e,
                                const Rational& f, const Rational& g) {
    const Rational q = ws.ctx.qb.value();
    ws.intern(a, GuardRole::Vwp);
    for (const Rational& u : {b, c, d, e, f, g}) {
        ws.intern(u, GuardRole::Num);
        ws.intern(a * q / u, GuardRole::Den);
    }
    for (const Rational& s : {b, d}) {
        Rational alpha = s * s / a;
        ws.intern(alpha, GuardRole::Vwp);
        for (const Rational& u : {b, c, d, e, f, g}) {
            if (u == s) continue;
            ws.intern(s * u / a, GuardRole::Num);
            ws.intern(s * q / u, GuardRole::Den);
        }
    }
    // coefficient prefactors
    const std::vector<Rational> pref_num = {q, a * q, q / a, d, d / a, b * q / c, b * q / e,
                                            b * q / f, b * q / g, a * q / (b * c), a * q / (b * e),
                                            a * q / (b * f), a * q / (b * g), b, b / a, d * q / c,
                                            d * q / e, d * q / f, d * q / g, a * q / (c * d),
                                            a * q / (d * e), a * q / (d * f), a * q / (d * g)};
    const std::vector<Rational> pref_den = {q / b, q / c, q / e, q / f, q / g, a * q / b,
                                            a * q / c, a * q / e, a * q / f, a * q / g, d / b,
                                            b * d / a, b * b * q / a, q / d, a * q / d, b / d,
                                            d * d * q / a};
    for (const Rational& u : pref_num) ws.intern(u, GuardRole::Num);
    for (const Rational& u : pref_den) ws.intern(u, GuardRole::Den);
}

template <class S>
Transform8psi8<S> transform_8psi8_sides(Workspace<S>& ws, const Rational& a, const Rational& b,
                                        const Rational& c, const Rational& d, const Rational& e,
                                        const Rational& f, const Rational& g,
                                        const ConvergencePolicy& policy) {
    const Rational q = ws.ctx.qb.value();
    const Rational z = a * a * a * q * q / (b * c * d * e * f * g);
    Workspace<S>* w = &ws;

    auto zp = std::make_shared<PowTable<S>>(ws.ctx.from(z));
    Summand<S> psi{1, [=](const MultiIndex& kk) {
                       long k = kk[0];
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * k);
                       for (const Rational& u : {b, c, d, e, f, g}) t.poch(u, k).dpoch(a * q / u, k);
                       t.value((*zp)(k));
                       return t.done();
                   }};
    // Both tails of this series decay like z^k with |z| allowed up to 0.8,
    // so the shell budget scales well beyond the bilateral default.
    ConvergencePolicy deep = policy;
    deep.max_shell = std::max(policy.max_shell, 300L);

    Transform8psi8<S> out;
    if (auto tr = detect_natural_truncation(psi))
        out.lhs = sum_finite(psi, *tr);
    else
        out.lhs = sum_bilateral(psi, deep);

    // very-well-poised 8phi7 with special parameter alpha = s^2/a:
    // (alpha)_k vwp(alpha,2k) prod(sx_i/a)_k / ((q)_k prod(sq/x_i)_k) z^k
    auto phi = [&](const Rational& s, const std::vector<Rational>& others) {
        Rational alpha = s * s / a;
        auto zt = std::make_shared<PowTable<S>>(ws.ctx.from(z));
        std::vector<Rational> ups, los;
        for (const Rational& u : others) {
            ups.push_back(s * u / a);
            los.push_back(s * q / u);
        }
        Summand<S> ph{1, [=](const MultiIndex& kk) {
                          long k = kk[0];
                          if (k < 0) return TermValue<S>::zero();
                          TermProduct<S> t(*w);
                          t.poch(alpha, k).vwp(alpha, 2 * k);
                          for (const Rational& u : ups) t.poch(u, k);
                          t.dpoch(q, k);
                          for (const Rational& l : los) t.dpoch(l, k);
                          t.value((*zt)(k));
                          return t.done();
                      }};
        if (auto tr = detect_natural_truncation(ph, 40)) return sum_finite(ph, *tr);
        return sum_bilateral(ph, deep);
    };

    InfProductRatio<S> pb(ws);
    pb.num({q, a * q, q / a, d, d / a, b * q / c, b * q / e, b * q / f, b * q / g, a * q / (b * c),
            a * q / (b * e), a * q / (b * f), a * q / (b * g)});
    pb.den({q / b, q / c, q / e, q / f, q / g, a * q / b, a * q / c, a * q / e, a * q / f, a * q / g,
            d / b, b * d / a, b * b * q / a});
    out.coeff_b = pb.eval();

    InfProductRatio<S> pd(ws);
    pd.num({q, a * q, q / a, b, b / a, d * q / c, d * q / e, d * q / f, d * q / g, a * q / (c * d),
            a * q / (d * e), a * q / (d * f), a * q / (d * g)});
    pd.den({q / c, q / d, q / e, q / f, q / g, a * q / c, a * q / d, a * q / e, a * q / f, a * q / g,
            b / d, b * d / a, d * d * q / a});
    out.coeff_d = pd.eval();

    S rhs(0);
    bool ok = true;
    if (!out.coeff_b.is_zero()) {
        out.phi_b = phi(b, {c, d, e, f, g});
        ok = ok && out.phi_b.status == SumStatus::Converged && out.coeff_b.is_finite();
        if (ok) rhs += out.coeff_b.value * out.phi_b.value;
    }
    if (ok && !out.coeff_d.is_zero()) {
        out.phi_d = phi(d, {b, c, e, f, g});
        ok = ok && out.phi_d.status == SumStatus::Converged && out.coeff_d.is_finite();
        if (ok) rhs += out.coeff_d.value * out.phi_d.value;
    }
    out.rhs_ok = ok;
    out.rhs = ok ? TermValue<S>::finite(rhs) : TermValue<S>::pole();
    return out;
}

}  // namespace qident
