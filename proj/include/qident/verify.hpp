#pragma once

#include <chrono>
#include <sstream>

#include "qident/identities.hpp"

namespace qident {

enum class RecordStatus { Pass, Fail, Divergent, Inconclusive };

inline const char* to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::Pass: return "pass";
        case RecordStatus::Fail: return "fail";
        case RecordStatus::Divergent: return "divergent";
        default: return "inconclusive";
    }
}
inline const char* to_string(SumStatus s) {
    switch (s) {
        case SumStatus::Converged: return "converged";
        case SumStatus::Divergent: return "divergent";
        default: return "inconclusive";
    }
}

struct VerificationRecord {
    std::string id;
    int r = 1;
    std::uint64_t seed = 0;
    std::string param_digest;
    std::string lhs, rhs, residual;
    SumStatus lhs_status = SumStatus::Inconclusive;
    long shells_used = 0;
    RecordStatus status = RecordStatus::Inconclusive;
    std::string note;
    double wall_ms = 0.0;
};

namespace detail {

inline std::string format_index(const MultiIndex& k) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
    os << ")";
    return os.str();
}

template <class S>
void fill_comparison(VerificationRecord& rec, const SumOutcome<S>& lhs, const TermValue<S>& rhs,
                     double tol) {
    rec.lhs_status = lhs.status;
    rec.shells_used = lhs.shells_used;
    if (lhs.pole_hit) rec.note = "pole at " + format_index(*lhs.pole_hit);
    if (rhs.is_pole()) {
        rec.status = RecordStatus::Inconclusive;
        rec.note = rec.note.empty() ? "closed form has a pole" : rec.note;
        return;
    }
    S rhs_value = rhs.summable_value();
    rec.rhs = to_decimal(rhs_value);
    rec.lhs = to_decimal(lhs.value);
    if (lhs.status == SumStatus::Divergent) {
        rec.status = RecordStatus::Divergent;
        return;
    }
    if (lhs.status == SumStatus::Inconclusive) {
        rec.status = RecordStatus::Inconclusive;
        return;
    }
    if constexpr (std::is_same_v<S, Rational>) {
        Rational diff = lhs.value - rhs_value;
        rec.residual = to_decimal(diff);
        rec.status = diff == 0 ? RecordStatus::Pass : RecordStatus::Fail;
    } else {
        S scale = boost::multiprecision::abs(rhs_value);
        if (scale < 1) scale = S(1);
        S resid = boost::multiprecision::abs(lhs.value - rhs_value) / scale;
        rec.residual = to_decimal(resid);
        rec.status = resid <= S(tol) ? RecordStatus::Pass : RecordStatus::Fail;
    }
}

}  // namespace detail

/// Verify one registry entry at one parameter set. Routing: declared finite
/// supports are summed exactly; bilateral entries probe natural truncation
/// first and fall back to adaptive shells.
template <class S>
VerificationRecord verify_identity(const std::string& id, const ParamSet& p,
                                   const ConvergencePolicy& policy, Workspace<S>& ws,
                                   double campaign_tol) {
    VerificationRecord rec;
    rec.id = id;
    rec.r = p.r;
    rec.param_digest = p.digest();
    auto start = std::chrono::steady_clock::now();

    if (auto violation = constraint_violation(id, p)) {
        rec.status = RecordStatus::Inconclusive;
        rec.note = "constraint: " + *violation;
        return rec;
    }

    try {
        if (id == "mjackson_8psi8_transform") {
            if (p.es.size() != 3)
                throw std::invalid_argument("mjackson_8psi8_transform needs es = {e, f, g}");
            auto sides = transform_8psi8_sides(ws, p.A(), p.B(), p.Cc(), p.D(), p.es[0], p.es[1],
                                               p.es[2], policy);
            if (!sides.rhs_ok) {
                rec.status = RecordStatus::Inconclusive;
                rec.note = "phi side did not converge";
            } else {
                detail::fill_comparison(rec, sides.lhs, sides.rhs, campaign_tol);
            }
        } else {
            BuiltIdentity<S> built = build_identity(id, p, ws);
            SumOutcome<S> lhs;
            if (is_finite_support(built.support)) {
                lhs = sum_finite(built.lhs, built.support);
            } else if (auto trunc = detect_natural_truncation(built.lhs)) {
                lhs = sum_finite(built.lhs, *trunc);
            } else {
                lhs = sum_bilateral(built.lhs, policy);
            }
            detail::fill_comparison(rec, lhs, built.rhs, campaign_tol);
        }
    } catch (const std::domain_error& e) {
        rec.status = RecordStatus::Inconclusive;
        rec.note = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    return rec;
}

// ----------------------------------------------------------- degenerations

struct DegenerationOutcome {
    std::string chain;
    std::vector<std::string> residuals;
    bool passed = false;
    std::string note;
};

inline const std::vector<std::string>& degeneration_chains() {
    static const std::vector<std::string> chains = {
        "trunc_8psi8_to_jackson", "limit_8psi8_to_bailey", "limit_ar_to_gustafson",
        "limit_cr_to_gustafson", "trunc_ar_finite"};
    return chains;
}

/// Truncation chain: schlosser_8psi8 at c = a, d -> d q^{-n} coincides with
/// jackson_8phi7 at c' = a q^{1+M}/b. Checked exactly in rational mode.
inline DegenerationOutcome degeneration_trunc_8psi8_to_jackson(const ParamSet& base, long n, long M) {
    DegenerationOutcome out;
    out.chain = "trunc_8psi8_to_jackson";
    if (n < 0) {
        out.note = "needs n >= 0";
        return out;
    }
    Workspace<Rational> ws(base.q);
    ParamSet p88 = base;
    p88.r = 1;
    p88.c = base.A();
    p88.d = base.D() * rat_pow(base.q, -n);
    p88.ks = {n};
    p88.M = M;
    ParamSet p87 = base;
    p87.r = 1;
    p87.c = base.A() * rat_pow(base.q, 1 + M) / base.B();
    p87.M = n;

    ConvergencePolicy pol;
    auto r88 = verify_identity<Rational>("schlosser_8psi8", p88, pol, ws, 0.0);
    auto r87 = verify_identity<Rational>("jackson_8phi7", p87, pol, ws, 0.0);
    auto rhs88 = build_identity<Rational>("schlosser_8psi8", p88, ws).rhs;
    auto rhs87 = build_identity<Rational>("jackson_8phi7", p87, ws).rhs;
    bool same = rhs88.is_finite() && rhs87.is_finite() && rhs88.value == rhs87.value;
    out.passed = r88.status == RecordStatus::Pass && r87.status == RecordStatus::Pass && same;
    if (!out.passed)
        out.note = "specialized=" + to_decimal(rhs88.summable_value()) +
                   " target=" + to_decimal(rhs87.summable_value()) + " s88=" + r88.residual +
                   " s87=" + r87.residual;
    out.residuals.push_back(same ? "0" : "mismatch");
    return out;
}

namespace detail {

/// Shared M-sweep scaffold: |rhs_M - limit| / max(|limit|, 1) must decrease
/// monotonically over M in {10, 20, 30} and end below final_tol.
template <class Sweep>
DegenerationOutcome run_limit_sweep(const std::string& chain, const BigFloat& limit_value,
                                    Sweep rhs_at, double final_tol) {
    DegenerationOutcome out;
    out.chain = chain;
    BigFloat scale = boost::multiprecision::abs(limit_value);
    if (scale < 1) scale = 1;
    BigFloat prev(-1);
    bool monotone = true;
    BigFloat last(0);
    for (long M : {10L, 20L, 30L}) {
        TermValue<BigFloat> v = rhs_at(M);
        if (!v.is_finite()) {
            out.note = "closed form not finite at M=" + std::to_string(M);
            return out;
        }
        BigFloat resid = boost::multiprecision::abs(v.value - limit_value) / scale;
        out.residuals.push_back(to_decimal(resid));
        if (prev >= 0 && resid >= prev) monotone = false;
        prev = resid;
        last = resid;
    }
    out.passed = monotone && last < BigFloat(final_tol);
    if (!out.passed && out.note.empty()) out.note = monotone ? "final residual too large" : "not monotone";
    return out;
}

}  // namespace detail

/// M -> infinity chain: the 8psi8 closed form approaches the 6psi6 value at
/// the matched parameters (d -> d q^{n}, e = a q^{-n}/c).
inline DegenerationOutcome degeneration_limit_8psi8_to_bailey(const ParamSet& base, long n,
                                                              double final_tol = 1e-8) {
    Workspace<BigFloat> ws(base.q, 1e-30);
    ParamSet p66 = base;
    p66.r = 1;
    p66.d = base.D() * rat_pow(base.q, n);
    p66.es = {base.A() * rat_pow(base.q, -n) / base.Cc()};
    auto limit = build_identity<BigFloat>("bailey_6psi6", p66, ws).rhs;
    if (!limit.is_finite()) {
        DegenerationOutcome out;
        out.chain = "limit_8psi8_to_bailey";
        out.note = "limit value not finite";
        return out;
    }
    return detail::run_limit_sweep(
        "limit_8psi8_to_bailey", limit.value,
        [&](long M) {
            ParamSet p88 = base;
            p88.r = 1;
            p88.ks = {n};
            p88.M = M;
            return build_identity<BigFloat>("schlosser_8psi8", p88, ws).rhs;
        },
        final_tol);
}

/// M -> infinity chain: ar_8psi8 closed form approaches gustafson_ar_6psi6
/// at b~ = d q^{|k|}, d~ = b, e_i = a q^{-k_i}/c_i.
inline DegenerationOutcome degeneration_limit_ar_to_gustafson(const ParamSet& base,
                                                              double final_tol = 1e-8) {
    Workspace<BigFloat> ws(base.q, 1e-30);
    ParamSet p66 = base;
    p66.b = base.D() * rat_pow(base.q, base.k_sum());
    p66.d = base.B();
    p66.es.clear();
    for (int i = 0; i < base.r; ++i)
        p66.es.push_back(base.A() * rat_pow(base.q, -base.ks[static_cast<std::size_t>(i)]) /
                         base.cs[static_cast<std::size_t>(i)]);
    p66.M.reset();
    p66.ks.clear();
    auto limit = build_identity<BigFloat>("gustafson_ar_6psi6", p66, ws).rhs;
    if (!limit.is_finite()) {
        DegenerationOutcome out;
        out.chain = "limit_ar_to_gustafson";
        out.note = "limit value not finite";
        return out;
    }
    return detail::run_limit_sweep(
        "limit_ar_to_gustafson", limit.value,
        [&](long M) {
            ParamSet p = base;
            p.M = M;
            return build_identity<BigFloat>("ar_8psi8", p, ws).rhs;
        },
        final_tol);
}

/// M -> infinity chain: cr_8psi8 closed form approaches gustafson_cr_6psi6
/// at d~ = d q^{|k|}, e_i = a q^{-k_i}/c_i.
inline DegenerationOutcome degeneration_limit_cr_to_gustafson(const ParamSet& base,
                                                              double final_tol = 1e-8) {
    Workspace<BigFloat> ws(base.q, 1e-30);
    ParamSet p66 = base;
    p66.d = base.D() * rat_pow(base.q, base.k_sum());
    p66.es.clear();
    for (int i = 0; i < base.r; ++i)
        p66.es.push_back(base.A() * rat_pow(base.q, -base.ks[static_cast<std::size_t>(i)]) /
                         base.cs[static_cast<std::size_t>(i)]);
    p66.M.reset();
    p66.ks.clear();
    auto limit = build_identity<BigFloat>("gustafson_cr_6psi6", p66, ws).rhs;
    if (!limit.is_finite()) {
        DegenerationOutcome out;
        out.chain = "limit_cr_to_gustafson";
        out.note = "limit value not finite";
        return out;
    }
    return detail::run_limit_sweep(
        "limit_cr_to_gustafson", limit.value,
        [&](long M) {
            ParamSet p = base;
            p.M = M;
            return build_identity<BigFloat>("cr_8psi8", p, ws).rhs;
        },
        final_tol);
}

/// Truncation chain for the A_r 8psi8: c_i = q^{-k_i} (k_i >= 0) cuts the
/// multilateral sum to a finite box; everything evaluates exactly.
inline DegenerationOutcome degeneration_trunc_ar_finite(const ParamSet& base) {
    DegenerationOutcome out;
    out.chain = "trunc_ar_finite";
    for (long k : base.ks)
        if (k < 0) {
            out.note = "needs k_i >= 0";
            return out;
        }
    Workspace<Rational> ws(base.q);
    ParamSet p = base;
    p.cs.clear();
    for (long k : base.ks) p.cs.push_back(rat_pow(base.q, -k));
    ConvergencePolicy pol;
    auto rec = verify_identity<Rational>("ar_8psi8", p, pol, ws, 0.0);
    out.passed = rec.status == RecordStatus::Pass;
    out.residuals.push_back(rec.residual);
    if (!out.passed) out.note = "status " + std::string(to_string(rec.status)) + " " + rec.note;
    return out;
}

}  // namespace qident
