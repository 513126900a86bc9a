#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qident/lattice_sum.hpp"
#include "qident/param_set.hpp"
#include "qident/qseries.hpp"
#include "qident/structure_factors.hpp"

namespace qident {

enum class RootSystem { OneDim, A, C, D };
enum class ExpectedBehavior { Valid, DivergentForRGe2 };

struct IdentityInfo {
    std::string id;
    RootSystem root = RootSystem::OneDim;
    ExpectedBehavior expected = ExpectedBehavior::Valid;
    bool bilateral = false;   // closed form needs infinite products
    bool multidim = false;    // defined for r >= 2
    std::string summary;
};

inline const std::vector<IdentityInfo>& identity_registry() {
    static const std::vector<IdentityInfo> table = {
        {"bailey_6psi6", RootSystem::OneDim, ExpectedBehavior::Valid, true, false,
         "very-well-poised 6psi6 summation"},
        {"jackson_8phi7", RootSystem::OneDim, ExpectedBehavior::Valid, false, false,
         "terminating balanced very-well-poised 8phi7 summation"},
        {"schlosser_8psi8", RootSystem::OneDim, ExpectedBehavior::Valid, true, false,
         "balanced very-well-poised 8psi8 summation"},
        {"mjackson_8psi8_transform", RootSystem::OneDim, ExpectedBehavior::Valid, true, false,
         "8psi8 transformation into two 8phi7 series"},
        {"milne_ar_8phi7", RootSystem::A, ExpectedBehavior::Valid, false, true,
         "A_r terminating balanced very-well-poised 8phi7 (Milne)"},
        {"schlosser_ar_8phi7", RootSystem::A, ExpectedBehavior::Valid, false, true,
         "A_r terminating balanced very-well-poised 8phi7"},
        {"dgml_cr_8phi7", RootSystem::C, ExpectedBehavior::Valid, false, true,
         "C_r terminating balanced very-well-poised 8phi7 (Denis-Gustafson; Milne-Lilly)"},
        {"schlosser_dr_8phi7", RootSystem::D, ExpectedBehavior::Valid, false, true,
         "D_r terminating balanced very-well-poised 8phi7"},
        {"gustafson_ar_6psi6", RootSystem::A, ExpectedBehavior::Valid, true, true,
         "A_r very-well-poised 6psi6 summation (Gustafson)"},
        {"schlosser_ar_6psi6", RootSystem::A, ExpectedBehavior::Valid, true, true,
         "A_r very-well-poised 6psi6 summation"},
        {"gustafson_cr_6psi6", RootSystem::C, ExpectedBehavior::Valid, true, true,
         "C_r very-well-poised 6psi6 summation (Gustafson)"},
        {"ar_8psi8", RootSystem::A, ExpectedBehavior::Valid, true, true,
         "A_r balanced very-well-poised 8psi8 summation"},
        {"arv_8psi8", RootSystem::A, ExpectedBehavior::Valid, true, true,
         "A_r balanced very-well-poised 8psi8 summation (second form)"},
        {"cr_8psi8", RootSystem::C, ExpectedBehavior::Valid, true, true,
         "C_r balanced very-well-poised 8psi8 summation"},
        {"dr_6psi6_false", RootSystem::D, ExpectedBehavior::DivergentForRGe2, true, true,
         "D_r very-well-poised 6psi6 candidate; divergent for r >= 2"},
    };
    return table;
}

inline const IdentityInfo& identity_info(const std::string& id) {
    for (const auto& e : identity_registry())
        if (e.id == id) return e;
    throw std::invalid_argument("unknown identity id: " + id);
}

template <class S>
struct BuiltIdentity {
    Summand<S> lhs;
    Support support;
    TermValue<S> rhs;
};

namespace detail {

template <class S>
std::shared_ptr<PowTable<S>> pow_table(Workspace<S>& ws, const Rational& base) {
    return std::make_shared<PowTable<S>>(ws.ctx.from(base));
}

}  // namespace detail

// ------------------------------------------------------------ entry builders

/// 6psi6 summation: sum over k in Z of
///   (1-aq^{2k})/(1-a) * (b,c,d,e)_k / (aq/b,aq/c,aq/d,aq/e)_k * (a^2q/bcde)^k
/// = products, for |a^2q/bcde| < 1. Entry parameters: a,b,c,d and e = es[0].
template <class S>
BuiltIdentity<S> build_bailey_6psi6(const ParamSet& p, Workspace<S>& ws) {
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    if (p.es.empty()) throw std::invalid_argument("bailey_6psi6 needs e = es[0]");
    const Rational e = p.es[0];
    const Rational z = a * a * q / (b * c * d * e);
    auto zp = detail::pow_table(ws, z);
    Workspace<S>* w = &ws;

    Summand<S> lhs{1, [=](const MultiIndex& kk) {
                       long k = kk[0];
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * k);
                       t.poch(b, k).poch(c, k).poch(d, k).poch(e, k);
                       t.dpoch(a * q / b, k).dpoch(a * q / c, k).dpoch(a * q / d, k).dpoch(a * q / e, k);
                       t.value((*zp)(k));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.num({q, a * q, q / a, a * q / (b * c), a * q / (b * d), a * q / (b * e), a * q / (c * d),
             a * q / (c * e), a * q / (d * e)});
    rhs.den({a * q / b, a * q / c, a * q / d, a * q / e, q / b, q / c, q / d, q / e, z});
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// Terminating balanced very-well-poised 8phi7 summation. Uses a,b,c,d and
/// n = M; the series terminates at k = n.
template <class S>
BuiltIdentity<S> build_jackson_8phi7(const ParamSet& p, Workspace<S>& ws) {
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    const long n = p.Mval();
    const Rational up7 = a * a * rat_pow(q, 1 + n) / (b * c * d);
    const Rational lo6 = b * c * d * rat_pow(q, -n) / a;
    Workspace<S>* w = &ws;

    Summand<S> lhs{1, [=](const MultiIndex& kk) {
                       long k = kk[0];
                       if (k < 0) return TermValue<S>::zero();
                       TermProduct<S> t(*w);
                       t.poch(a, k).vwp(a, 2 * k);
                       t.poch(b, k).poch(c, k).poch(d, k).poch(up7, k).poch(rat_pow(q, -n), k);
                       t.dpoch(q, k).dpoch(a * q / b, k).dpoch(a * q / c, k).dpoch(a * q / d, k);
                       t.dpoch(lo6, k).dpoch(a * rat_pow(q, 1 + n), k);
                       t.qpower(k);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.poch(a * q, n).poch(a * q / (b * c), n).poch(a * q / (b * d), n).poch(a * q / (c * d), n);
    rhs.dpoch(a * q / b, n).dpoch(a * q / c, n).dpoch(a * q / d, n).dpoch(a * q / (b * c * d), n);
    return {std::move(lhs), Support{Simplex{n}}, rhs.eval()};
}

/// Balanced very-well-poised 8psi8 summation with shift integer k0 = ks[0]
/// and nonnegative M.
template <class S>
BuiltIdentity<S> build_schlosser_8psi8(const ParamSet& p, Workspace<S>& ws) {
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    if (p.ks.empty()) throw std::invalid_argument("schlosser_8psi8 needs ks[0]");
    const long k0 = p.ks[0];
    const long M = p.Mval();
    Workspace<S>* w = &ws;

    const Rational u3 = d * rat_pow(q, k0), u4 = a * rat_pow(q, -k0) / c;
    const Rational u5 = a * rat_pow(q, 1 + M) / b, u6 = a * rat_pow(q, -M) / d;
    const Rational l3 = a * rat_pow(q, 1 - k0) / d, l4 = c * rat_pow(q, 1 + k0);
    const Rational l5 = b * rat_pow(q, -M), l6 = d * rat_pow(q, 1 + M);

    Summand<S> lhs{1, [=](const MultiIndex& kk) {
                       long k = kk[0];
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * k);
                       t.poch(b, k).poch(c, k).poch(u3, k).poch(u4, k).poch(u5, k).poch(u6, k);
                       t.dpoch(a * q / b, k).dpoch(a * q / c, k).dpoch(l3, k).dpoch(l4, k);
                       t.dpoch(l5, k).dpoch(l6, k);
                       t.qpower(k);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.poch(a * q / (b * c), M).poch(c * q / b, M).poch(d * q, M).poch(d * q / a, M);
    rhs.dpoch(c * d * q / a, M).dpoch(d * q / c, M).dpoch(q / b, M).dpoch(a * q / b, M);
    rhs.poch(c * d / a, k0).poch(b * d / a, k0).poch(c * q, k0).poch(c * q / a, k0);
    rhs.poch(d * rat_pow(q, 1 + M) / b, k0).poch(rat_pow(q, -M), k0);
    rhs.dpoch(q, k0).dpoch(c * q / b, k0).dpoch(d / a, k0).dpoch(d, k0);
    rhs.dpoch(b * c * rat_pow(q, -M) / a, k0).dpoch(c * d * rat_pow(q, 1 + M) / a, k0);
    rhs.num({q, q, a * q, q / a, c * d * q / a, a * q / (c * d), c * q / d, d * q / c});
    rhs.den({c * q, q / c, d * q, q / d, c * q / a, a * q / c, d * q / a, a * q / d});
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

// ------------------------------------------------- multidimensional helpers

namespace detail {

template <class S>
struct XPowers {
    std::vector<std::shared_ptr<PowTable<S>>> tables;
    XPowers(Workspace<S>& ws, const std::vector<Rational>& xs) {
        for (const auto& x : xs) tables.push_back(pow_table(ws, x));
    }
    S operator()(std::size_t i, long e) const { return (*tables[i])(e); }
};

}  // namespace detail

/// A_r terminating balanced 8phi7 (support 0 <= |k| <= M).
template <class S>
BuiltIdentity<S> build_milne_ar_8phi7(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const long M = p.Mval();
    const auto& c = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       const long K = index_sum(k);
                       TermProduct<S> t(*w);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i) t.vwp(a * x[i], k[i] + K);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], k[i]).dpoch(q * x[i] / x[j], k[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(a * x[i], K);
                           t.poch(d * x[i], k[i]).poch(a * a * x[i] * rat_pow(q, 1 + M) / (b * C * d), k[i]);
                           t.dpoch(a * x[i] * q / c[i], K);
                           t.dpoch(a * x[i] * q / b, k[i]).dpoch(a * x[i] * rat_pow(q, 1 + M), k[i]);
                       }
                       t.poch(b, K).poch(rat_pow(q, -M), K);
                       t.dpoch(a * q / d, K).dpoch(b * C * d * rat_pow(q, -M) / a, K);
                       t.qpower(K);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.poch(a * q / (b * d), M).poch(a * q / (C * d), M);
    rhs.dpoch(a * q / d, M).dpoch(a * q / (b * C * d), M);
    for (int i = 0; i < r; ++i) {
        rhs.poch(a * x[i] * q, M).poch(a * x[i] * q / (b * c[i]), M);
        rhs.dpoch(a * x[i] * q / b, M).dpoch(a * x[i] * q / c[i], M);
    }
    return {std::move(lhs), Support{Simplex{M}}, rhs.eval()};
}

/// Second A_r terminating balanced 8phi7 (support 0 <= |k| <= M).
template <class S>
BuiltIdentity<S> build_schlosser_ar_8phi7(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const long M = p.Mval();
    const auto& c = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       const long K = index_sum(k);
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * K);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], k[i]).dpoch(q * x[i] / x[j], k[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(a * q / (C * x[i] * d), K - k[i]).poch(b / x[i], K).poch(d * x[i], k[i]);
                           t.dpoch(b / x[i], K - k[i]).dpoch(a * c[i] * q / (C * x[i] * d), K);
                           t.dpoch(a * x[i] * q / b, k[i]);
                       }
                       t.poch(a, K).poch(a * a * rat_pow(q, 1 + M) / (b * C * d), K).poch(rat_pow(q, -M), K);
                       t.dpoch(a * q / C, K).dpoch(b * C * d * rat_pow(q, -M) / a, K).dpoch(a * rat_pow(q, 1 + M), K);
                       t.qpower(K);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.poch(a * q, M).poch(a * q / (b * d), M);
    rhs.dpoch(a * q / C, M).dpoch(a * q / (b * C * d), M);
    for (int i = 0; i < r; ++i) {
        rhs.poch(a * q / (C * x[i] * d), M).poch(a * x[i] * q / (b * c[i]), M);
        rhs.dpoch(a * x[i] * q / b, M).dpoch(a * c[i] * q / (C * x[i] * d), M);
    }
    return {std::move(lhs), Support{Simplex{M}}, rhs.eval()};
}

/// C_r terminating balanced 8phi7 (box support 0 <= k_i <= m_i).
template <class S>
BuiltIdentity<S> build_dgml_cr_8phi7(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    if (static_cast<int>(p.ms.size()) != r) throw std::invalid_argument("dgml_cr_8phi7 needs m_i");
    const std::vector<long> m = p.ms;
    const long Msum = p.m_sum();
    const auto& x = p.xs;
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       TermProduct<S> t(*w);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i)
                           for (int j = i; j < r; ++j) t.vwp(a * x[i] * x[j], k[i] + k[j]);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j) {
                               t.poch(rat_pow(q, -m[j]) * x[i] / x[j], k[i]).poch(a * x[i] * x[j], k[i]);
                               t.dpoch(a * x[i] * x[j] * rat_pow(q, 1 + m[j]), k[i]).dpoch(q * x[i] / x[j], k[i]);
                           }
                       for (int i = 0; i < r; ++i) {
                           t.poch(b * x[i], k[i]).poch(c * x[i], k[i]).poch(d * x[i], k[i]);
                           t.poch(a * a * x[i] * rat_pow(q, 1 + Msum) / (b * c * d), k[i]);
                           t.dpoch(a * x[i] * q / b, k[i]).dpoch(a * x[i] * q / c, k[i]).dpoch(a * x[i] * q / d, k[i]);
                           t.dpoch(b * c * d * x[i] * rat_pow(q, -Msum) / a, k[i]);
                       }
                       t.qpower(index_sum(k));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) rhs.dpoch(a * x[i] * x[j] * q, m[i] + m[j]);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) rhs.poch(a * x[i] * x[j] * q, m[i]);
    rhs.poch(a * q / (b * c), Msum).poch(a * q / (b * d), Msum).poch(a * q / (c * d), Msum);
    for (int i = 0; i < r; ++i) {
        rhs.dpoch(a * x[i] * q / b, m[i]).dpoch(a * x[i] * q / c, m[i]).dpoch(a * x[i] * q / d, m[i]);
        rhs.dpoch(a * rat_pow(q, 1 + Msum - m[i]) / (b * c * d * x[i]), m[i]);
    }
    return {std::move(lhs), Support{Box{m}}, rhs.eval()};
}

/// D_r terminating balanced 8phi7 (support 0 <= |k| <= M). Uses the scalar
/// pair c,d (as the product cd) alongside the vector c_i.
template <class S>
BuiltIdentity<S> build_schlosser_dr_8phi7(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    const Rational cd = c * d;
    const long M = p.Mval();
    const auto& cv = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       const long K = index_sum(k);
                       TermProduct<S> t(*w);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i) t.vwp(a * x[i], k[i] + K);
                       for (int i = 0; i < r; ++i) {
                           t.poch(a * x[i], K).poch(a * q / (cd * x[i]), K - k[i]);
                           t.dpoch(a * x[i] * q / cv[i], K).dpoch(a * cv[i] * q / (cd * x[i]), K);
                       }
                       for (int i = 0; i < r; ++i)
                           for (int j = i + 1; j < r; ++j) t.dpoch(cd * x[i] * x[j], k[i] + k[j]);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j) {
                               t.poch(cv[j] * x[i] / x[j], k[i]).poch(cd * x[i] * x[j] / cv[j], k[i]);
                               t.dpoch(q * x[i] / x[j], k[i]);
                           }
                       t.poch(b, K).poch(a * a * rat_pow(q, 1 + M) / (b * cd), K).poch(rat_pow(q, -M), K);
                       for (int i = 0; i < r; ++i) {
                           t.dpoch(a * x[i] * q / b, k[i]).dpoch(b * cd * x[i] * rat_pow(q, -M) / a, k[i]);
                           t.dpoch(a * x[i] * rat_pow(q, 1 + M), k[i]);
                       }
                       t.qpower(K);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i) {
        rhs.poch(a * x[i] * q, M).poch(a * x[i] * q / (b * cv[i]), M);
        rhs.poch(a * cv[i] * q / (b * cd * x[i]), M).poch(a * q / (cd * x[i]), M);
        rhs.dpoch(a * q / (b * cd * x[i]), M).dpoch(a * cv[i] * q / (cd * x[i]), M);
        rhs.dpoch(a * x[i] * q / cv[i], M).dpoch(a * x[i] * q / b, M);
    }
    return {std::move(lhs), Support{Simplex{M}}, rhs.eval()};
}

/// A_r very-well-poised 6psi6 (bilateral), modulus |a^{r+1}q/bCdE| < 1.
template <class S>
BuiltIdentity<S> build_gustafson_ar_6psi6(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C(), E = p.E();
    const auto& c = p.cs;
    const auto& e = p.es;
    const auto& x = p.xs;
    const Rational z = rat_pow(a, r + 1) * q / (b * C * d * E);
    auto zp = detail::pow_table(ws, z);
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       const long K = index_sum(k);
                       TermProduct<S> t(*w);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i) t.vwp(a * x[i], k[i] + K);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], k[i]).dpoch(a * x[i] * q / (e[j] * x[j]), k[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(e[i] * x[i], K).poch(d * x[i], k[i]);
                           t.dpoch(a * x[i] * q / c[i], K).dpoch(a * x[i] * q / b, k[i]);
                       }
                       t.poch(b, K).dpoch(a * q / d, K);
                       t.value((*zp)(K));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.num({a * q / (b * d), rat_pow(a, r) * q / (b * E), a * q / (C * d)});
    rhs.den({z, a * q / d, q / b});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(a * x[i] * q / (c[i] * e[j] * x[j])).num(q * x[i] / x[j]);
            rhs.den(q * x[i] / (c[i] * x[j])).den(a * x[i] * q / (e[j] * x[j]));
        }
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q / (b * c[i]), a * q / (d * e[i] * x[i]), a * x[i] * q, q / (a * x[i])});
        rhs.den({a * x[i] * q / b, a * x[i] * q / c[i], q / (d * x[i]), q / (e[i] * x[i])});
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// Second A_r very-well-poised 6psi6 (bilateral).
template <class S>
BuiltIdentity<S> build_schlosser_ar_6psi6(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C(), E = p.E();
    const auto& c = p.cs;
    const auto& e = p.es;
    const auto& x = p.xs;
    const Rational z = rat_pow(a, r + 1) * q / (b * C * d * E);
    const Rational ar1 = rat_pow(a, r - 1);
    auto zp = detail::pow_table(ws, z);
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       const long K = index_sum(k);
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * K);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], k[i]).dpoch(a * x[i] * q / (e[j] * x[j]), k[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(a * q / (C * d * x[i]), K - k[i]).poch(b * E / (ar1 * e[i] * x[i]), K);
                           t.poch(d * x[i], k[i]);
                           t.dpoch(b * E / (ar1 * a * x[i]), K - k[i]).dpoch(a * c[i] * q / (C * d * x[i]), K);
                           t.dpoch(a * x[i] * q / b, k[i]);
                       }
                       t.poch(E / ar1, K).dpoch(a * q / C, K);
                       t.value((*zp)(K));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    rhs.num({a * q, q / a, a * q / (b * d)});
    rhs.den({a * q / C, z, ar1 * q / E});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(q * x[i] / x[j]).num(a * x[i] * q / (c[i] * e[j] * x[j]));
            rhs.den(q * x[i] / (c[i] * x[j])).den(a * x[i] * q / (e[j] * x[j]));
        }
    for (int i = 0; i < r; ++i) {
        rhs.num({ar1 * a * x[i] * q / (b * E), a * q / (e[i] * d * x[i]), a * q / (C * d * x[i]),
                 a * x[i] * q / (b * c[i])});
        rhs.den({ar1 * e[i] * x[i] * q / (b * E), q / (d * x[i]), a * x[i] * q / b,
                 a * c[i] * q / (C * d * x[i])});
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// C_r very-well-poised 6psi6 (bilateral).
template <class S>
BuiltIdentity<S> build_gustafson_cr_6psi6(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C(), E = p.E();
    const auto& c = p.cs;
    const auto& e = p.es;
    const auto& x = p.xs;
    const Rational z = rat_pow(a, r + 1) * q / (b * C * d * E);
    auto zp = detail::pow_table(ws, z);
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& k) {
                       TermProduct<S> t(*w);
                       vand->apply(t, k);
                       for (int i = 0; i < r; ++i)
                           for (int j = i; j < r; ++j) t.vwp(a * x[i] * x[j], k[i] + k[j]);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j) {
                               t.poch(c[j] * x[i] / x[j], k[i]).poch(e[j] * x[i] * x[j], k[i]);
                               t.dpoch(a * x[i] * x[j] * q / c[j], k[i]).dpoch(a * x[i] * q / (e[j] * x[j]), k[i]);
                           }
                       for (int i = 0; i < r; ++i) {
                           t.poch(b * x[i], k[i]).poch(d * x[i], k[i]);
                           t.dpoch(a * x[i] * q / b, k[i]).dpoch(a * x[i] * q / d, k[i]);
                       }
                       t.value((*zp)(index_sum(k)));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            rhs.num(a * x[i] * x[j] * q / (c[i] * c[j])).num(a * q / (e[i] * e[j] * x[i] * x[j]));
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) rhs.num(a * x[i] * x[j] * q).num(q / (a * x[i] * x[j]));
    rhs.num(a * q / (b * d));
    rhs.den(z);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(a * x[i] * q / (c[i] * e[j] * x[j])).num(q * x[i] / x[j]);
            rhs.den({a * x[i] * q / (e[j] * x[j]), q / (e[j] * x[i] * x[j]), a * x[i] * x[j] * q / c[i],
                     q * x[i] / (c[i] * x[j])});
        }
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q / (b * c[i]), a * q / (b * e[i] * x[i]), a * x[i] * q / (c[i] * d),
                 a * q / (d * e[i] * x[i])});
        rhs.den({a * x[i] * q / b, q / (b * x[i]), a * x[i] * q / d, q / (d * x[i])});
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// A_r balanced very-well-poised 8psi8 (bilateral), fixed integer vector k_i
/// and nonnegative M.
template <class S>
BuiltIdentity<S> build_ar_8psi8(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const auto& c = p.cs;
    const auto& x = p.xs;
    if (static_cast<int>(p.ks.size()) != r) throw std::invalid_argument("ar_8psi8 needs k_i");
    const std::vector<long> kk = p.ks;
    const long Ks = p.k_sum();
    const long M = p.Mval();
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& n) {
                       const long N = index_sum(n);
                       TermProduct<S> t(*w);
                       vand->apply(t, n);
                       for (int i = 0; i < r; ++i) t.vwp(a * x[i], n[i] + N);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], n[i])
                                   .dpoch(rat_pow(q, 1 + kk[j]) * c[j] * x[i] / x[j], n[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(a * x[i] * rat_pow(q, -kk[i]) / c[i], N);
                           t.poch(b * x[i], n[i]).poch(a * x[i] * rat_pow(q, -M) / d, n[i]);
                           t.dpoch(a * x[i] * q / c[i], N);
                           t.dpoch(b * x[i] * rat_pow(q, -M), n[i]).dpoch(a * x[i] * rat_pow(q, 1 - Ks) / d, n[i]);
                       }
                       t.poch(d * rat_pow(q, Ks), N).poch(a * rat_pow(q, 1 + M) / b, N);
                       t.dpoch(d * rat_pow(q, 1 + M), N).dpoch(a * q / b, N);
                       t.qpower(N);
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(q * c[j] * x[i] / (c[i] * x[j])).num(q * x[i] / x[j]);
            rhs.den(q * c[j] * x[i] / x[j]).den(q * x[i] / (c[i] * x[j]));
        }
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q, q / (a * x[i]), a * x[i] * q / (c[i] * d), c[i] * d * q / (a * x[i])});
        rhs.den({a * x[i] * q / c[i], c[i] * q / (a * x[i]), a * x[i] * q / d, d * q / (a * x[i])});
    }
    rhs.num({d * q / C, C * q / d});
    rhs.den({d * q, q / d});

    
    rhs.poch(d * q, M).poch(a * q / (b * C), M).dpoch(a * q / b, M).dpoch(d * q / C, M);
    for (int i = 0; i < r; ++i) {
        rhs.poch(c[i] * q / (b * x[i]), M).poch(d * q / (a * x[i]), M);
        rhs.dpoch(c[i] * d * q / (a * x[i]), M).dpoch(q / (b * x[i]), M);
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.poch(q * c[j] * x[i] / x[j], kk[i]);
            rhs.dpoch(q * c[j] * x[i] / (c[i] * x[j]), kk[i]);
        }
    rhs.poch(b * d / a, Ks).poch(rat_pow(q, -M), Ks);
    rhs.dpoch(d, Ks).dpoch(b * C * rat_pow(q, -M) / a, Ks);
    for (int i = 0; i < r; ++i) {
        rhs.poch(c[i] * d / (a * x[i]), Ks);
        rhs.poch(c[i] * q / (a * x[i]), kk[i]).poch(c[i] * d * rat_pow(q, 1 + M) / (b * C * x[i]), kk[i]);
        rhs.dpoch(d / (a * x[i]), Ks);
        rhs.dpoch(c[i] * q / (b * x[i]), kk[i]).dpoch(c[i] * d * rat_pow(q, 1 + M) / (a * x[i]), kk[i]);
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// Second A_r balanced very-well-poised 8psi8 (bilateral).
template <class S>
BuiltIdentity<S> build_arv_8psi8(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const auto& c = p.cs;
    const auto& x = p.xs;
    if (static_cast<int>(p.ks.size()) != r) throw std::invalid_argument("arv_8psi8 needs k_i");
    const std::vector<long> kk = p.ks;
    const long Ks = p.k_sum();
    const long M = p.Mval();
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& n) {
                       const long N = index_sum(n);
                       TermProduct<S> t(*w);
                       t.vwp(a, 2 * N);
                       t.poch(b, N).poch(a * rat_pow(q, 1 + M) / b, N).poch(a * rat_pow(q, -Ks) / C, N);
                       t.dpoch(b * rat_pow(q, -M), N).dpoch(a * q / b, N).dpoch(a * q / C, N);
                       t.qpower(N);
                       vand->apply(t, n);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j)
                               t.poch(c[j] * x[i] / x[j], n[i])
                                   .dpoch(rat_pow(q, 1 + kk[j]) * c[j] * x[i] / x[j], n[i]);
                       for (int i = 0; i < r; ++i) {
                           t.poch(d * rat_pow(q, 1 + M) / (C * x[i]), N - n[i]);
                           t.poch(c[i] * d * rat_pow(q, kk[i]) / (C * x[i]), N);
                           t.poch(a * x[i] * rat_pow(q, -M) / d, n[i]);
                           t.dpoch(d * q / (C * x[i]), N - n[i]);
                           t.dpoch(c[i] * d * rat_pow(q, 1 + M) / (C * x[i]), N);
                           t.dpoch(a * x[i] * rat_pow(q, 1 - Ks) / d, n[i]);
                       }
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(q * c[j] * x[i] / (c[i] * x[j])).num(q * x[i] / x[j]);
            rhs.den(q * c[j] * x[i] / x[j]).den(q * x[i] / (c[i] * x[j]));
        }
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q / (c[i] * d), c[i] * d * q / (a * x[i]), C * x[i] * q / d, d * q / (C * x[i])});
        rhs.den({a * x[i] * q / d, d * q / (a * x[i]), c[i] * d * q / (C * x[i]), C * x[i] * q / (c[i] * d)});
    }
    rhs.num({a * q, q / a});
    rhs.den({a * q / C, C * q / a});

    
    rhs.poch(C * q / b, M).poch(a * q / (b * C), M).dpoch(a * q / b, M).dpoch(q / b, M);
    for (int i = 0; i < r; ++i) {
        rhs.poch(c[i] * d * q / (C * x[i]), M).poch(d * q / (a * x[i]), M);
        rhs.dpoch(c[i] * d * q / (a * x[i]), M).dpoch(d * q / (C * x[i]), M);
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.poch(q * c[j] * x[i] / x[j], kk[i]);
            rhs.dpoch(q * c[j] * x[i] / (c[i] * x[j]), kk[i]);
        }
    rhs.poch(C * q / a, Ks).poch(rat_pow(q, -M), Ks);
    rhs.dpoch(C * q / b, Ks).dpoch(b * C * rat_pow(q, -M) / a, Ks);
    for (int i = 0; i < r; ++i) {
        rhs.poch(c[i] * d / (a * x[i]), Ks);
        rhs.poch(b * c[i] * d / (a * C * x[i]), kk[i]).poch(c[i] * d * rat_pow(q, 1 + M) / (b * C * x[i]), kk[i]);
        rhs.dpoch(d / (a * x[i]), Ks);
        rhs.dpoch(c[i] * d / (C * x[i]), kk[i]).dpoch(c[i] * d * rat_pow(q, 1 + M) / (a * x[i]), kk[i]);
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// C_r balanced very-well-poised 8psi8 (bilateral).
template <class S>
BuiltIdentity<S> build_cr_8psi8(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const auto& c = p.cs;
    const auto& x = p.xs;
    if (static_cast<int>(p.ks.size()) != r) throw std::invalid_argument("cr_8psi8 needs k_i");
    const std::vector<long> kk = p.ks;
    const long Ks = p.k_sum();
    const long M = p.Mval();
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& n) {
                       TermProduct<S> t(*w);
                       t.qpower(index_sum(n));
                       vand->apply(t, n);
                       for (int i = 0; i < r; ++i)
                           for (int j = i; j < r; ++j) t.vwp(a * x[i] * x[j], n[i] + n[j]);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j) {
                               t.poch(c[j] * x[i] / x[j], n[i]);
                               t.poch(a * x[i] * x[j] * rat_pow(q, -kk[j]) / c[j], n[i]);
                               t.dpoch(a * x[i] * x[j] * q / c[j], n[i]);
                               t.dpoch(rat_pow(q, 1 + kk[j]) * c[j] * x[i] / x[j], n[i]);
                           }
                       for (int i = 0; i < r; ++i) {
                           t.poch(b * x[i], n[i]).poch(d * x[i] * rat_pow(q, Ks), n[i]);
                           t.poch(a * x[i] * rat_pow(q, 1 + M) / b, n[i]).poch(a * x[i] * rat_pow(q, -M) / d, n[i]);
                           t.dpoch(a * x[i] * q / b, n[i]).dpoch(a * x[i] * rat_pow(q, 1 - Ks) / d, n[i]);
                           t.dpoch(b * x[i] * rat_pow(q, -M), n[i]).dpoch(d * x[i] * rat_pow(q, 1 + M), n[i]);
                       }
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num(q * c[j] * x[i] / (c[i] * x[j])).num(q * x[i] / x[j]);
            rhs.den({q * c[j] * x[i] / x[j], q * x[i] / (c[i] * x[j]), a * x[i] * x[j] * q / c[i],
                     c[j] * q / (a * x[i] * x[j])});
        }
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) rhs.num(a * x[i] * x[j] * q).num(q / (a * x[i] * x[j]));
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            rhs.num(a * x[i] * x[j] * q / (c[i] * c[j])).num(c[i] * c[j] * q / (a * x[i] * x[j]));
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q / (c[i] * d), c[i] * d * q / (a * x[i]), d * x[i] * q / c[i],
                 c[i] * q / (d * x[i])});
        rhs.den({a * x[i] * q / d, d * q / (a * x[i]), d * x[i] * q, q / (d * x[i])});
    }

    
    for (int i = 0; i < r; ++i) {
        rhs.poch(a * x[i] * q / (b * c[i]), M).poch(c[i] * q / (b * x[i]), M);
        rhs.poch(d * x[i] * q, M).poch(d * q / (a * x[i]), M);
        rhs.poch(c[i] * d / (a * x[i]), Ks);
        rhs.dpoch(c[i] * d * q / (a * x[i]), M).dpoch(d * x[i] * q / c[i], M);
        rhs.dpoch(q / (b * x[i]), M).dpoch(a * x[i] * q / b, M);
        rhs.dpoch(d * x[i], Ks).dpoch(d / (a * x[i]), Ks);
    }
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) rhs.dpoch(c[i] * c[j] / (a * x[i] * x[j]), kk[i] + kk[j]);
    rhs.poch(b * d / a, Ks).poch(d * rat_pow(q, 1 + M) / b, Ks).poch(rat_pow(q, -M), Ks);
    for (int i = 0; i < r; ++i) {
        rhs.poch(d * x[i] / c[i], Ks - kk[i]);
        rhs.dpoch(c[i] * q / (b * x[i]), kk[i]).dpoch(b * c[i] * rat_pow(q, -M) / (a * x[i]), kk[i]);
        rhs.dpoch(c[i] * d * rat_pow(q, 1 + M) / (a * x[i]), kk[i]);
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.poch(q * c[j] * x[i] / x[j], kk[j]).poch(c[j] * q / (a * x[i] * x[j]), kk[j]);
            rhs.dpoch(q * c[j] * x[i] / (c[i] * x[j]), kk[j]);
        }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

/// The candidate D_r very-well-poised 6psi6, carrying the q^{-e2(n)} factor
/// that destroys convergence for r >= 2. Valid at r=1 and whenever the
/// series terminates.
template <class S>
BuiltIdentity<S> build_dr_6psi6_false(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    const Rational bc = b * c;
    const Rational E = p.E();
    const auto& cv = p.cs;
    const auto& e = p.es;
    const auto& x = p.xs;
    const Rational z = a * a * q / (bc * d * E);
    auto zp = detail::pow_table(ws, z);
    detail::XPowers<S> xp(ws, x);
    Workspace<S>* w = &ws;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    Summand<S> lhs{r, [=](const MultiIndex& n) {
                       const long N = index_sum(n);
                       TermProduct<S> t(*w);
                       vand->apply(t, n);
                       for (int i = 0; i < r; ++i) t.vwp(a * x[i], n[i] + N);
                       for (int i = 0; i < r; ++i)
                           for (int j = i + 1; j < r; ++j)
                               t.poch(a * a * x[i] * x[j] / bc, n[i] + n[j]);
                       for (int i = 0; i < r; ++i)
                           for (int j = 0; j < r; ++j) {
                               t.poch(e[j] * x[i] / x[j], n[i]);
                               t.dpoch(a * x[i] * q / (cv[j] * x[j]), n[i]);
                               t.dpoch(a * cv[i] * x[i] * x[j] * q / bc, n[i]);
                           }
                       for (int i = 0; i < r; ++i) {
                           t.poch(bc / (cv[i] * x[i]), N).poch(cv[i] * x[i], N).poch(d * x[i], n[i]);
                           t.dpoch(a * x[i] * q / e[i], N).dpoch(bc / (a * x[i]), N - n[i]);
                           t.value(xp(static_cast<std::size_t>(i), n[i]));
                       }
                       t.dpoch(a * q / d, N);
                       t.value((*zp)(N));
                       t.qpower(-elem_sym2(n));
                       return t.done();
                   }};

    ClosedFormProduct<S> rhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            rhs.num(a * a * x[i] * x[j] * q / bc);
            rhs.den(a * a * x[i] * x[j] * q / (bc * e[i] * e[j]));
        }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rhs.num({a * x[i] * q / (cv[j] * e[i] * x[j]), a * cv[i] * x[i] * x[j] * q / (bc * e[j]),
                     q * x[i] / x[j]});
            rhs.den({a * x[i] * q / (cv[j] * x[j]), a * cv[i] * x[i] * x[j] * q / bc,
                     q * x[i] / (e[i] * x[j])});
        }
    rhs.num(a * q / (d * E));
    rhs.den(a * q / d);
    for (int i = 0; i < r; ++i) {
        rhs.num({a * x[i] * q, q / (a * x[i]), a * x[i] * q / bc, a * q / (cv[i] * d * x[i]),
                 a * cv[i] * x[i] * q / (bc * d)});
        rhs.den({a * x[i] * q / e[i], cv[i] * x[i] * q / bc, q / (cv[i] * x[i]), q / (d * x[i]),
                 a * a * x[i] * q / (bc * d * e[i])});
    }
    return {std::move(lhs), Support{Bilateral{}}, rhs.eval()};
}

// --------------------------------------------------------------- dispatcher

template <class S>
BuiltIdentity<S> build_identity(const std::string& id, const ParamSet& p, Workspace<S>& ws) {
    if (id == "bailey_6psi6") return build_bailey_6psi6(p, ws);
    if (id == "jackson_8phi7") return build_jackson_8phi7(p, ws);
    if (id == "schlosser_8psi8") return build_schlosser_8psi8(p, ws);
    if (id == "milne_ar_8phi7") return build_milne_ar_8phi7(p, ws);
    if (id == "schlosser_ar_8phi7") return build_schlosser_ar_8phi7(p, ws);
    if (id == "dgml_cr_8phi7") return build_dgml_cr_8phi7(p, ws);
    if (id == "schlosser_dr_8phi7") return build_schlosser_dr_8phi7(p, ws);
    if (id == "gustafson_ar_6psi6") return build_gustafson_ar_6psi6(p, ws);
    if (id == "schlosser_ar_6psi6") return build_schlosser_ar_6psi6(p, ws);
    if (id == "gustafson_cr_6psi6") return build_gustafson_cr_6psi6(p, ws);
    if (id == "ar_8psi8") return build_ar_8psi8(p, ws);
    if (id == "arv_8psi8") return build_arv_8psi8(p, ws);
    if (id == "cr_8psi8") return build_cr_8psi8(p, ws);
    if (id == "dr_6psi6_false") return build_dr_6psi6_false(p, ws);
    throw std::invalid_argument("build_identity: no summand builder for " + id);
}

/// Stated convergence modulus of an entry, if any: the sampled value must
/// stay at or below 0.8.
inline std::optional<Rational> convergence_modulus(const std::string& id, const ParamSet& p) {
    if (id == "bailey_6psi6") {
        if (p.es.empty()) return std::nullopt;
        return p.A() * p.A() * p.q / (p.B() * p.Cc() * p.D() * p.es[0]);
    }
    if (id == "gustafson_ar_6psi6" || id == "schlosser_ar_6psi6" || id == "gustafson_cr_6psi6")
        return rat_pow(p.A(), p.r + 1) * p.q / (p.B() * p.C() * p.D() * p.E());
    if (id == "mjackson_8psi8_transform") {
        Rational denom = p.B() * p.Cc() * p.D();
        for (const auto& v : p.es) denom *= v;
        return rat_pow(p.A(), 3) * p.q * p.q / denom;
    }
    return std::nullopt;
}

/// Basic admission checks an instantiation must pass before evaluation.
/// Returns the name of the violated predicate, or nothing.
inline std::optional<std::string> constraint_violation(const std::string& id, const ParamSet& p) {
    const IdentityInfo& info = identity_info(id);
    if (!info.multidim && p.r != 1) return "rank: entry is one-dimensional";
    if (p.r < 1) return "rank: r >= 1";
    if (p.M && *p.M < 0) return "M >= 0";
    for (long m : p.ms)
        if (m < 0) return "m_i >= 0";
    if (auto mod = convergence_modulus(id, p)) {
        Rational m = *mod < 0 ? -*mod : *mod;
        if (m > Rational(4, 5)) return "convergence modulus <= 0.8";
    }
    return std::nullopt;
}

}  // namespace qident
