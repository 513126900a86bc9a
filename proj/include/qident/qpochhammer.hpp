#pragma once

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "qident/numeric.hpp"
#include "qident/term_value.hpp"

namespace qident {

/// Evaluation context: the base q, its scalar image, the absolute tail
/// tolerance for infinite products (BigFloat mode only), and lazy integer
/// powers of q in the working scalar type.
template <class S>
struct EvalContext {
    static constexpr bool exact = std::is_same_v<S, Rational>;

    QBase qb;
    S q;
    S tail_tol;
    mutable PowTable<S> qpow_table;

    EvalContext(Rational q_value, S tail_tolerance)
        : qb(std::move(q_value)), q(S(qb.value())), tail_tol(std::move(tail_tolerance)),
          qpow_table(q) {}

    explicit EvalContext(Rational q_value) : EvalContext(std::move(q_value), S(0)) {}

    S from(const Rational& r) const { return S(r); }

    const S& qpow(long e) const { return qpow_table(e); }

    S power(const Rational& base, long e) const {
        if constexpr (exact) {
            return rat_pow(base, e);
        } else {
            if (e == 0) return S(1);
            S b = S(base);
            S p = boost::multiprecision::pow(b, static_cast<unsigned>(e < 0 ? -e : e));
            return e < 0 ? S(1) / p : p;
        }
    }
};

template <class S>
EvalContext<S> make_context(const Rational& q, double tail_tol = 1e-17) {
    if constexpr (std::is_same_v<S, Rational>) {
        (void)tail_tol;
        return EvalContext<S>(q);
    } else {
        return EvalContext<S>(q, S(tail_tol));
    }
}

/// (a;q)_infinity for real a and 0 < q < 1, absolute error <= tol.
/// Exact zero when a = q^{-m}, m >= 0. Rejected in exact-rational mode.
template <class S>
TermValue<S> qpoch_inf_tol(const EvalContext<S>& ctx, const Rational& a, const S& tol) {
    if constexpr (EvalContext<S>::exact) {
        (void)tol;
        throw std::domain_error("qpoch_inf: infinite products are not available in exact-rational mode");
    } else {
        if (a == 0) return TermValue<S>::finite(S(1));
        auto t = ctx.qb.exponent_of(a);
        if (t && *t <= 0) return TermValue<S>::zero();

        const S one(1);
        const S half(Rational(1, 2));
        S prod = one;
        S apow = S(a);                    // a * q^j
        S abs_a = boost::multiprecision::abs(apow);
        S qm1 = one - ctx.q;              // 1 - q
        long j = 0;
        // Remaining log-product past index j is bounded by the geometric
        // series: sum_{i>=j} |log(1-aq^i)| <= 2|a|q^j/(1-q) once |a|q^j < 1/2,
        // and e^x - 1 <= 2x on [0,1], so the absolute tail error is at most
        // |prod| * 4|a|q^j/(1-q). Target tol/2 so that split products
        // (a)_k * (aq^k)_inf stay within 2*tol of (a)_inf.
        while (true) {
            if (abs_a < half) {
                S rem = abs_a / qm1;
                if (rem < half && boost::multiprecision::abs(prod) * 8 * rem <= tol) break;
            }
            S factor = one - apow;
            if (factor == 0) return TermValue<S>::zero();
            prod *= factor;
            apow *= ctx.q;
            abs_a *= ctx.q;
            if (++j > 1000000) throw std::runtime_error("qpoch_inf: tail bound not reached");
        }
        return TermValue<S>::finite(prod);
    }
}

template <class S>
TermValue<S> qpoch_inf(const EvalContext<S>& ctx, const Rational& a) {
    return qpoch_inf_tol(ctx, a, ctx.tail_tol);
}

/// Guard roles recorded for the sampler's pole-proximity rejection. An
/// argument exactly on the q-lattice is benign (zero terms, natural
/// truncation) or fatal (poles in the scan window) depending on where it
/// sits:
///   Num:   reject exact hits q^t with t >= 1 (pole at negative index)
///   Den:   reject exact hits with t <= 0 (denominator vanishes)
///   Vwp:   reject only t == 0 (the 1-u denominator)
///   Ratio: reject any exact hit (structure-factor difference vanishes)
/// Near-misses within the proximity epsilon are rejected for every role.
enum class GuardRole { Num, Den, Vwp, Ratio };

/// Per-argument ladders of (a;q)_k for integer k, shared across all lattice
/// points of a verification case. Zero/pole detection is decided on the exact
/// q-lattice (a = q^t), never by epsilon comparison.
template <class S>
class PochCache {
  public:
    explicit PochCache(const EvalContext<S>* ctx) : ctx_(ctx) {}

    int intern(const Rational& a) {
        auto it = index_.find(a);
        if (it != index_.end()) return it->second;
        Entry e;
        e.a = a;
        e.qexp = ctx_->qb.exponent_of(a);
        e.a_scalar = ctx_->from(a);
        e.pos.push_back(TermValue<S>::finite(S(1)));
        e.neg.push_back(TermValue<S>::finite(S(1)));
        int id = static_cast<int>(entries_.size());
        entries_.push_back(std::move(e));
        index_.emplace(a, id);
        return id;
    }

    const TermValue<S>& at(int id, long k) {
        Entry& e = entries_[static_cast<std::size_t>(id)];
        if (k >= 0) {
            while (static_cast<long>(e.pos.size()) <= k) extend_pos(e);
            return e.pos[static_cast<std::size_t>(k)];
        }
        long m = -k;
        while (static_cast<long>(e.neg.size()) <= m) extend_neg(e);
        return e.neg[static_cast<std::size_t>(m)];
    }

    const TermValue<S>& at(const Rational& a, long k) { return at(intern(a), k); }

    TermValue<S> infinity(int id) {
        Entry& e = entries_[static_cast<std::size_t>(id)];
        if (!e.inf) e.inf = qpoch_inf(*ctx_, e.a);
        return *e.inf;
    }

    void mark_role(int id, GuardRole role) {
        entries_[static_cast<std::size_t>(id)].roles |= 1u << static_cast<unsigned>(role);
    }

    struct ArgView {
        const Rational* value;
        std::optional<long> qexp;
        unsigned roles;
        bool has(GuardRole r) const { return roles & (1u << static_cast<unsigned>(r)); }
    };
    std::vector<ArgView> arguments() const {
        std::vector<ArgView> out;
        out.reserve(entries_.size());
        for (const Entry& e : entries_) out.push_back({&e.a, e.qexp, e.roles});
        return out;
    }

    const EvalContext<S>& context() const { return *ctx_; }

  private:
    struct Entry {
        Rational a;
        std::optional<long> qexp;
        S a_scalar{};
        std::deque<TermValue<S>> pos;  // pos[k] = (a)_k
        std::deque<TermValue<S>> neg;  // neg[m] = (a)_{-m}
        std::optional<TermValue<S>> inf;
        unsigned roles = 0;
    };

    void extend_pos(Entry& e) {
        long j = static_cast<long>(e.pos.size()) - 1;  // append (a)_{j+1}
        const TermValue<S>& prev = e.pos.back();
        if (!prev.is_finite()) {
            e.pos.push_back(prev);
            return;
        }
        if (e.qexp && *e.qexp == -j) {
            e.pos.push_back(TermValue<S>::zero());
            return;
        }
        S factor = S(1) - e.a_scalar * ctx_->qpow(j);
        if (factor == 0) {
            e.pos.push_back(TermValue<S>::zero());
            return;
        }
        e.pos.push_back(TermValue<S>::finite(prev.value * factor));
    }

    void extend_neg(Entry& e) {
        long m = static_cast<long>(e.neg.size());  // append (a)_{-m}
        const TermValue<S>& prev = e.neg.back();
        if (!prev.is_finite()) {
            e.neg.push_back(prev);
            return;
        }
        if (e.qexp && *e.qexp == m) {
            e.neg.push_back(TermValue<S>::pole());
            return;
        }
        S factor = S(1) - e.a_scalar * ctx_->qpow(-m);
        if (factor == 0) {
            e.neg.push_back(TermValue<S>::pole());
            return;
        }
        e.neg.push_back(TermValue<S>::finite(prev.value / factor));
    }

    const EvalContext<S>* ctx_;
    std::vector<Entry> entries_;
    std::map<Rational, int> index_;
};

/// Shared evaluation state for one verification case. The cache refers into
/// the context, so workspaces are pinned in place; builders capture a
/// pointer and the caller keeps the workspace alive.
template <class S>
struct Workspace {
    EvalContext<S> ctx;
    PochCache<S> cache;

    explicit Workspace(const Rational& q, double tail_tol = 1e-17)
        : ctx(make_context<S>(q, tail_tol)), cache(&ctx) {}

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    int intern(const Rational& a, GuardRole role) {
        int id = cache.intern(a);
        cache.mark_role(id, role);
        return id;
    }
    /// Record a structure-factor ratio for sampling-time proximity checks.
    void guard_ratio(const Rational& u) { intern(u, GuardRole::Ratio); }
};

/// (a;q)_k for any integer k: prod_{j=0}^{k-1}(1-aq^j) for k>=0, and the
/// reflected 1/prod_{j=1}^{-k}(1-aq^{-j}) for k<0 (works in exact mode, no
/// infinite products involved).
template <class S>
TermValue<S> qpoch(const EvalContext<S>& ctx, const Rational& a, long k) {
    PochCache<S> cache(&ctx);
    return cache.at(a, k);
}

template <class S>
TermValue<S> qpoch_multi(const EvalContext<S>& ctx, const std::vector<Rational>& args, long k) {
    PochCache<S> cache(&ctx);
    TermValue<S> out = TermValue<S>::finite(S(1));
    for (const Rational& a : args) out *= cache.at(a, k);
    return out;
}

template <class S>
TermValue<S> qpoch_multi_inf(const EvalContext<S>& ctx, const std::vector<Rational>& args) {
    TermValue<S> out = TermValue<S>::finite(S(1));
    for (const Rational& a : args) out *= qpoch_inf(ctx, a);
    return out;
}

/// Drop entries common to num and den (exact equality). Shared vanishing
/// factors cancel symbolically before any evaluation.
inline void cancel_common(std::vector<Rational>& num, std::vector<Rational>& den) {
    for (std::size_t i = 0; i < num.size();) {
        auto it = std::find(den.begin(), den.end(), num[i]);
        if (it != den.end()) {
            den.erase(it);
            num.erase(num.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
}

template <class S>
TermValue<S> qpoch_ratio(const EvalContext<S>& ctx, std::vector<Rational> num,
                         std::vector<Rational> den, long k) {
    cancel_common(num, den);
    PochCache<S> cache(&ctx);
    TermValue<S> out = TermValue<S>::finite(S(1));
    for (const Rational& a : num) out *= cache.at(a, k);
    for (const Rational& a : den) out /= cache.at(a, k);
    return out;
}

/// prod (num_i)_inf / prod (den_j)_inf with exact pre-cancellation and
/// shift-aware pairing: entries whose ratio is an exact integer power of q
/// reduce to finite Pochhammers, so fully terminating ratios evaluate
/// exactly even in rational mode.
///
/// Arguments q^e with e <= 0 make (q^e)_inf vanish. A vanishing numerator
/// against a vanishing denominator is a removable singularity whose value
/// does not depend on the matching, so those are reduced pairwise first;
/// the leftover count then decides zero versus pole canonically.
template <class S>
TermValue<S> qpoch_ratio_inf(const EvalContext<S>& ctx, std::vector<Rational> num,
                             std::vector<Rational> den) {
    cancel_common(num, den);
    PochCache<S> cache(&ctx);
    TermValue<S> out = TermValue<S>::finite(S(1));

    auto reduce_pair = [&](const Rational& u, const Rational& v, long t) {
        // u = v q^t: (u)_inf/(v)_inf = 1/(v)_t for t > 0, (u)_{-t} for t < 0.
        if (t > 0)
            out /= cache.at(v, t);
        else if (t < 0)
            out *= cache.at(u, -t);
    };
    auto singular = [&](const Rational& a) {
        auto t = ctx.qb.exponent_of(a);
        return t && *t <= 0;
    };

    for (std::size_t i = 0; i < num.size();) {
        if (!singular(num[i])) {
            ++i;
            continue;
        }
        bool matched = false;
        for (std::size_t j = 0; j < den.size(); ++j) {
            if (!singular(den[j])) continue;
            reduce_pair(num[i], den[j], *ctx.qb.exponent_of(num[i] / den[j]));
            den.erase(den.begin() + static_cast<std::ptrdiff_t>(j));
            num.erase(num.begin() + static_cast<std::ptrdiff_t>(i));
            matched = true;
            break;
        }
        if (!matched) ++i;
    }

    // Pair remaining entries along shared q-ladders, smallest shift first.
    for (std::size_t i = 0; i < num.size();) {
        std::optional<long> best_t;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < den.size(); ++j) {
            if (den[j] == 0 || num[i] == 0) continue;
            auto t = ctx.qb.exponent_of(num[i] / den[j]);
            if (t && (!best_t || std::labs(*t) < std::labs(*best_t))) {
                best_t = t;
                best_j = j;
            }
        }
        if (!best_t) {
            ++i;
            continue;
        }
        reduce_pair(num[i], den[best_j], *best_t);
        den.erase(den.begin() + static_cast<std::ptrdiff_t>(best_j));
        num.erase(num.begin() + static_cast<std::ptrdiff_t>(i));
    }
    // Leftover lattice arguments are exact zeros (resp. poles) in both modes.
    for (const Rational& a : num)
        out *= singular(a) ? TermValue<S>::zero() : qpoch_inf(ctx, a);
    for (const Rational& a : den)
        out /= singular(a) ? TermValue<S>::zero() : qpoch_inf(ctx, a);
    return out;
}

/// Precomputed very-well-poised factor state for hot loops.
template <class S>
struct VwpFactor {
    S scaled{};     // u as a scalar
    S inv_denom{};  // 1/(1-u)
    std::optional<long> qexp;
    bool pole = false;
};

template <class S>
VwpFactor<S> make_vwp(Workspace<S>& ws, const Rational& u) {
    ws.intern(u, GuardRole::Vwp);
    VwpFactor<S> f;
    f.qexp = ws.ctx.qb.exponent_of(u);
    f.scaled = ws.ctx.from(u);
    if (u == 1)
        f.pole = true;
    else
        f.inv_denom = S(1) / (S(1) - f.scaled);
    return f;
}

/// Multiplicative accumulator over TermValue semantics. All combinators are
/// commutative in effect, so evaluation order never changes the outcome kind.
template <class S>
class TermProduct {
  public:
    explicit TermProduct(Workspace<S>& ws) : ws_(&ws), value_(1) {}

    TermProduct& poch(const Rational& a, long k) {
        return apply(ws_->cache.at(ws_->intern(a, GuardRole::Num), k));
    }
    TermProduct& dpoch(const Rational& a, long k) {
        return apply_reciprocal(ws_->cache.at(ws_->intern(a, GuardRole::Den), k));
    }
    TermProduct& poch(int id, long k) { return apply(ws_->cache.at(id, k)); }
    TermProduct& dpoch(int id, long k) { return apply_reciprocal(ws_->cache.at(id, k)); }

    /// The very-well-poised factor (1 - u q^e)/(1 - u).
    TermProduct& vwp(const Rational& u, long e) {
        ws_->intern(u, GuardRole::Vwp);
        auto t = ws_->ctx.qb.exponent_of(u);
        if (t && *t == 0) return apply(TermValue<S>::pole());
        if (t && *t == -e) return apply(TermValue<S>::zero());
        S u_s = ws_->ctx.from(u);
        S numer = S(1) - u_s * ws_->ctx.qpow(e);
        if (numer == 0) return apply(TermValue<S>::zero());
        return apply(TermValue<S>::finite(numer / (S(1) - u_s)));
    }
    TermProduct& vwp(const VwpFactor<S>& f, long e) {
        if (f.pole) return apply(TermValue<S>::pole());
        if (f.qexp && *f.qexp == -e) return apply(TermValue<S>::zero());
        S numer = S(1) - f.scaled * ws_->ctx.qpow(e);
        if (numer == 0) return apply(TermValue<S>::zero());
        if (kind_ == TermKind::Finite) value_ *= numer * f.inv_denom;
        return *this;
    }

    TermProduct& value(const S& v) {
        if (v == 0) return apply(TermValue<S>::zero());
        return apply(TermValue<S>::finite(v));
    }
    /// num/den of plain scalars with zero/pole bookkeeping.
    TermProduct& ratio(const S& num, const S& den) {
        if (den == 0) return apply(TermValue<S>::pole());
        if (num == 0) return apply(TermValue<S>::zero());
        return apply(TermValue<S>::finite(num / den));
    }
    TermProduct& power(const Rational& base, long e) {
        if (base == 0 && e != 0)
            return apply(e > 0 ? TermValue<S>::zero() : TermValue<S>::pole());
        return value(ws_->ctx.power(base, e));
    }
    TermProduct& qpower(long e) {
        if (kind_ == TermKind::Finite) value_ *= ws_->ctx.qpow(e);
        return *this;
    }
    TermProduct& sign(long exponent) {
        if (((exponent % 2) + 2) % 2 == 1 && kind_ == TermKind::Finite) value_ = -value_;
        return *this;
    }
    TermProduct& term(const TermValue<S>& t) { return apply(t); }
    TermProduct& zero() { return apply(TermValue<S>::zero()); }
    TermProduct& pole() { return apply(TermValue<S>::pole()); }

    TermValue<S> done() const {
        switch (kind_) {
            case TermKind::Finite: return TermValue<S>::finite(value_);
            case TermKind::Zero: return TermValue<S>::zero();
            default: return TermValue<S>::pole();
        }
    }

    Workspace<S>& workspace() { return *ws_; }

  private:
    TermProduct& apply(const TermValue<S>& t) {
        kind_ = combine_kinds(kind_, t.kind);
        if (kind_ == TermKind::Finite) value_ *= t.value;
        return *this;
    }
    TermProduct& apply_reciprocal(const TermValue<S>& t) {
        kind_ = combine_kinds(kind_, reciprocal_kind(t.kind));
        if (kind_ == TermKind::Finite) value_ /= t.value;
        return *this;
    }

    Workspace<S>* ws_;
    TermKind kind_ = TermKind::Finite;
    S value_;
};

/// Closed-form product evaluator. Finite and infinite Pochhammers are
/// collected as one ratio of infinite products via (a)_k = (a)_inf /
/// (aq^k)_inf, then evaluated through qpoch_ratio_inf. The global
/// cancellation resolves the removable 0 * inf singularities that appear
/// when specialized parameters sit on the q-lattice, and reduces fully
/// terminating expressions to exact finite products usable in rational
/// mode.
template <class S>
class ClosedFormProduct {
  public:
    explicit ClosedFormProduct(Workspace<S>& ws) : ws_(&ws) {}

    ClosedFormProduct& poch(const Rational& a, long k) {
        ws_->intern(a, GuardRole::Num);
        push(num_, a);
        push(den_, a * ws_->ctx.qb.pow(k));
        return *this;
    }
    ClosedFormProduct& dpoch(const Rational& a, long k) {
        ws_->intern(a, GuardRole::Den);
        push(den_, a);
        push(num_, a * ws_->ctx.qb.pow(k));
        return *this;
    }
    ClosedFormProduct& poch_inf(const Rational& a) {
        ws_->intern(a, GuardRole::Num);
        push(num_, a);
        return *this;
    }
    ClosedFormProduct& dpoch_inf(const Rational& a) {
        ws_->intern(a, GuardRole::Den);
        push(den_, a);
        return *this;
    }
    ClosedFormProduct& poch_inf(std::initializer_list<Rational> as) {
        for (const auto& a : as) poch_inf(a);
        return *this;
    }
    ClosedFormProduct& dpoch_inf(std::initializer_list<Rational> as) {
        for (const auto& a : as) dpoch_inf(a);
        return *this;
    }
    ClosedFormProduct& num(const Rational& a) { return poch_inf(a); }
    ClosedFormProduct& den(const Rational& a) { return dpoch_inf(a); }
    ClosedFormProduct& num(std::initializer_list<Rational> as) { return poch_inf(as); }
    ClosedFormProduct& den(std::initializer_list<Rational> as) { return dpoch_inf(as); }
    /// Plain scalar multiplier (powers, signs).
    ClosedFormProduct& value(const S& v) {
        if (v == 0)
            zero_ = true;
        else
            scalar_ *= v;
        return *this;
    }
    ClosedFormProduct& power(const Rational& base, long e) { return value(ws_->ctx.power(base, e)); }

    TermValue<S> eval() const {
        TermValue<S> tv = qpoch_ratio_inf(ws_->ctx, num_, den_);
        if (zero_) tv *= TermValue<S>::zero();
        if (tv.is_finite()) tv.value *= scalar_;
        return tv;
    }

  private:
    void push(std::vector<Rational>& side, const Rational& a) {
        // (a)_0 contributes nothing; matching entries across the two sides
        // are dropped immediately to keep the multisets small.
        auto& other = (&side == &num_) ? den_ : num_;
        auto it = std::find(other.begin(), other.end(), a);
        if (it != other.end())
            other.erase(it);
        else
            side.push_back(a);
    }

    Workspace<S>* ws_;
    std::vector<Rational> num_, den_;
    S scalar_{1};
    bool zero_ = false;
};

/// Condensed notation helper for infinite-product ratios on closed-form
/// sides: collect numerator/denominator arguments, then evaluate once.
template <class S>
class InfProductRatio {
  public:
    explicit InfProductRatio(Workspace<S>& ws) : ws_(&ws) {}

    InfProductRatio& num(const Rational& a) {
        num_.push_back(a);
        ws_->intern(a, GuardRole::Num);
        return *this;
    }
    InfProductRatio& den(const Rational& a) {
        den_.push_back(a);
        ws_->intern(a, GuardRole::Den);
        return *this;
    }
    InfProductRatio& num(std::initializer_list<Rational> as) {
        for (const auto& a : as) num(a);
        return *this;
    }
    InfProductRatio& den(std::initializer_list<Rational> as) {
        for (const auto& a : as) den(a);
        return *this;
    }

    TermValue<S> eval() const { return qpoch_ratio_inf(ws_->ctx, num_, den_); }

  private:
    Workspace<S>* ws_;
    std::vector<Rational> num_, den_;
};

}  // namespace qident
