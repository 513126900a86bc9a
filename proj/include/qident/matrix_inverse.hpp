#pragma once

#include <map>

#include "qident/lattice_sum.hpp"
#include "qident/param_set.hpp"
#include "qident/structure_factors.hpp"

namespace qident {

enum class PairSide { Left, Right };
enum class MatrixRole { F, G };

/// The four inverse pairs. "crmi_printed" is the C_r/D_r f matrix exactly as
/// displayed in the source statement, which lacks an i<j pair factor; it is
/// kept alongside the completed "crmi" because the displayed form is what
/// exhibits the right-inverse failure.
inline const std::vector<std::string>& inverse_pair_ids() {
    static const std::vector<std::string> ids = {"bmi", "armi", "arvmi", "crmi"};
    return ids;
}

inline bool pair_two_sided(const std::string& id) { return id != "crmi_printed"; }

/// One side of an inverse pair: a constant prefactor (infinite products,
/// independent of the indices) and a per-(row, column) core of finite
/// Pochhammers. Entries are f_const * f_core(n, k).
template <class S>
struct MatrixEntryEvaluator {
    TermValue<S> constant;
    std::function<TermValue<S>(const MultiIndex&, const MultiIndex&)> core;

    TermValue<S> operator()(const MultiIndex& row, const MultiIndex& col) const {
        return constant * core(row, col);
    }
};

namespace detail {

/// prod_{i<j} (c_i q^{u_i}/x_i - c_j q^{u_j}/x_j)/(c_i/x_i - c_j/x_j),
/// the difference factor of the f matrices.
template <class S>
DifferenceFactor<S> cx_difference(Workspace<S>& ws, const ParamSet& p) {
    std::vector<Rational> y;
    for (int i = 0; i < p.r; ++i) y.push_back(p.cs[static_cast<std::size_t>(i)] / p.xs[static_cast<std::size_t>(i)]);
    return DifferenceFactor<S>(ws, y);
}

}  // namespace detail

// ------------------------------------------------------------------- bmi

template <class S>
MatrixEntryEvaluator<S> bmi_f(const ParamSet& p, Workspace<S>& ws) {
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc();
    ClosedFormProduct<S> pre(ws);
    pre.num({a * q / b, b * q / a, a * q / c, c * q / a, b * q, q / b, c * q, q / c});
    pre.den({q, q, a * q, q / a, a * q / (b * c), b * c * q / a, c * q / b, b * q / c});
    Workspace<S>* w = &ws;
    auto vwp = make_vwp(ws, b * c / a);
    int ub = ws.intern(b, GuardRole::Num), uac = ws.intern(a / c, GuardRole::Num);
    int lcq = ws.intern(c * q, GuardRole::Den), lab = ws.intern(a * q / b, GuardRole::Den);
    MatrixEntryEvaluator<S> out;
    out.constant = pre.eval();
    out.core = [=](const MultiIndex& nn, const MultiIndex& kk) {
        const long n = nn[0], k = kk[0];
        TermProduct<S> t(*w);
        t.vwp(vwp, 2 * n);
        t.poch(ub, n + k).poch(uac, k - n);
        t.dpoch(lcq, n + k).dpoch(lab, k - n);
        return t.done();
    };
    return out;
}

template <class S>
MatrixEntryEvaluator<S> bmi_g(const ParamSet& p, Workspace<S>& ws) {
    const Rational q = p.q, a = p.A(), b = p.B(), c = p.Cc();
    Workspace<S>* w = &ws;
    auto vwp = make_vwp(ws, a);
    int uc = ws.intern(c, GuardRole::Num), uab = ws.intern(a / b, GuardRole::Num);
    int lbq = ws.intern(b * q, GuardRole::Den), lac = ws.intern(a * q / c, GuardRole::Den);
    MatrixEntryEvaluator<S> out;
    out.constant = TermValue<S>::finite(S(1));
    out.core = [=](const MultiIndex& kk, const MultiIndex& ll) {
        const long k = kk[0], l = ll[0];
        TermProduct<S> t(*w);
        t.vwp(vwp, 2 * k);
        t.poch(uc, k + l).poch(uab, k - l);
        t.dpoch(lbq, k + l).dpoch(lac, k - l);
        t.qpower(k - l);
        return t.done();
    };
    return out;
}

// ------------------------------------------------------------------ armi

template <class S>
MatrixEntryEvaluator<S> armi_f(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const Rational C = p.C();
    const auto& c = p.cs;
    const auto& x = p.xs;

    ClosedFormProduct<S> pre(ws);
    pre.num({b * q, q / b});
    pre.den({b * q / C, C * q / b});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            pre.num(q * c[j] * x[i] / x[j]).num(q * x[i] / (c[i] * x[j]));
            pre.den(q * c[j] * x[i] / (c[i] * x[j])).den(q * x[i] / x[j]);
        }
    for (int i = 0; i < r; ++i) {
        pre.num({a * x[i] * q / b, b * q / (a * x[i]), a * x[i] * q / c[i], c[i] * q / (a * x[i])});
        pre.den({a * x[i] * q / (b * c[i]), b * c[i] * q / (a * x[i]), a * x[i] * q, q / (a * x[i])});
    }

    auto vand = std::make_shared<DifferenceFactor<S>>(detail::cx_difference(ws, p));
    Workspace<S>* w = &ws;
    std::vector<VwpFactor<S>> vwps;
    std::vector<int> uaxc, laxb;
    std::vector<std::vector<int>> lqcx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        vwps.push_back(make_vwp(ws, b * c[i] / (a * x[i])));
        uaxc.push_back(ws.intern(a * x[i] / c[i], GuardRole::Num));
        laxb.push_back(ws.intern(a * x[i] * q / b, GuardRole::Den));
        for (int j = 0; j < r; ++j)
            lqcx[static_cast<std::size_t>(i)].push_back(
                ws.intern(q * c[j] * x[i] / x[j], GuardRole::Den));
    }
    int ub = ws.intern(b, GuardRole::Num);
    MatrixEntryEvaluator<S> out;
    out.constant = pre.eval();
    out.core = [=](const MultiIndex& n, const MultiIndex& k) {
        const long N = index_sum(n), K = index_sum(k);
        TermProduct<S> t(*w);
        vand->apply(t, n);
        for (int i = 0; i < r; ++i) t.vwp(vwps[static_cast<std::size_t>(i)], n[i] + N);
        t.poch(ub, N + K);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                t.dpoch(lqcx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], n[j] + k[i]);
        for (int i = 0; i < r; ++i) {
            t.poch(uaxc[static_cast<std::size_t>(i)], K - n[i]);
            t.dpoch(laxb[static_cast<std::size_t>(i)], k[i] - N);
        }
        return t.done();
    };
    return out;
}

template <class S>
MatrixEntryEvaluator<S> armi_g(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const auto& c = p.cs;
    const auto& x = p.xs;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);
    Workspace<S>* w = &ws;
    std::vector<VwpFactor<S>> vwps;
    std::vector<int> uaxb, laxc;
    std::vector<std::vector<int>> ucx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        vwps.push_back(make_vwp(ws, a * x[i]));
        uaxb.push_back(ws.intern(a * x[i] / b, GuardRole::Num));
        laxc.push_back(ws.intern(a * x[i] * q / c[i], GuardRole::Den));
        for (int j = 0; j < r; ++j)
            ucx[static_cast<std::size_t>(i)].push_back(
                ws.intern(c[j] * x[i] / x[j], GuardRole::Num));
    }
    int lbq = ws.intern(b * q, GuardRole::Den);
    MatrixEntryEvaluator<S> out;
    out.constant = TermValue<S>::finite(S(1));
    out.core = [=](const MultiIndex& k, const MultiIndex& l) {
        const long K = index_sum(k), L = index_sum(l);
        TermProduct<S> t(*w);
        vand->apply(t, k);
        for (int i = 0; i < r; ++i) t.vwp(vwps[static_cast<std::size_t>(i)], k[i] + K);
        t.dpoch(lbq, K + L);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                t.poch(ucx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] + l[j]);
        for (int i = 0; i < r; ++i) {
            t.poch(uaxb[static_cast<std::size_t>(i)], k[i] - L);
            t.dpoch(laxc[static_cast<std::size_t>(i)], K - l[i]);
        }
        t.qpower(K - r * L);
        return t.done();
    };
    return out;
}

// ----------------------------------------------------------------- arvmi

template <class S>
MatrixEntryEvaluator<S> arvmi_f(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const Rational C = p.C();
    const auto& c = p.cs;
    const auto& x = p.xs;

    ClosedFormProduct<S> pre(ws);
    pre.num({a * q / C, C * q / a});
    pre.den({a * q, q / a});
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            pre.num(q * c[j] * x[i] / x[j]).num(q * x[i] / (c[i] * x[j]));
            pre.den(q * c[j] * x[i] / (c[i] * x[j])).den(q * x[i] / x[j]);
        }
    for (int i = 0; i < r; ++i) {
        pre.num({a * x[i] * q / b, b * q / (a * x[i]), b * c[i] * q / (C * x[i]), C * x[i] * q / (b * c[i])});
        pre.den({a * x[i] * q / (b * c[i]), b * c[i] * q / (a * x[i]), C * x[i] * q / b, b * q / (C * x[i])});
    }

    auto vand = std::make_shared<DifferenceFactor<S>>(detail::cx_difference(ws, p));
    Workspace<S>* w = &ws;
    std::vector<VwpFactor<S>> vwps;
    std::vector<int> ubcx, laxb;
    std::vector<std::vector<int>> lqcx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        vwps.push_back(make_vwp(ws, b * c[i] / (a * x[i])));
        ubcx.push_back(ws.intern(b * c[i] / (C * x[i]), GuardRole::Num));
        laxb.push_back(ws.intern(a * x[i] * q / b, GuardRole::Den));
        for (int j = 0; j < r; ++j)
            lqcx[static_cast<std::size_t>(i)].push_back(
                ws.intern(q * c[j] * x[i] / x[j], GuardRole::Den));
    }
    int uaC = ws.intern(a / C, GuardRole::Num);
    MatrixEntryEvaluator<S> out;
    out.constant = pre.eval();
    out.core = [=](const MultiIndex& n, const MultiIndex& k) {
        const long N = index_sum(n), K = index_sum(k);
        TermProduct<S> t(*w);
        vand->apply(t, n);
        for (int i = 0; i < r; ++i) t.vwp(vwps[static_cast<std::size_t>(i)], n[i] + N);
        t.poch(uaC, K - N);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                t.dpoch(lqcx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], n[j] + k[i]);
        for (int i = 0; i < r; ++i) {
            t.poch(ubcx[static_cast<std::size_t>(i)], n[i] + K);
            t.dpoch(laxb[static_cast<std::size_t>(i)], k[i] - N);
        }
        return t.done();
    };
    return out;
}

template <class S>
MatrixEntryEvaluator<S> arvmi_g(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const Rational C = p.C();
    const auto& c = p.cs;
    const auto& x = p.xs;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);
    Workspace<S>* w = &ws;
    auto vwpa = make_vwp(ws, a);
    std::vector<VwpFactor<S>> vwps;
    std::vector<int> uaxb, lbcx;
    std::vector<std::vector<int>> ucx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        vwps.push_back(make_vwp(ws, b / (C * x[i])));
        uaxb.push_back(ws.intern(a * x[i] / b, GuardRole::Num));
        lbcx.push_back(ws.intern(b * c[i] * q / (C * x[i]), GuardRole::Den));
        for (int j = 0; j < r; ++j)
            ucx[static_cast<std::size_t>(i)].push_back(
                ws.intern(c[j] * x[i] / x[j], GuardRole::Num));
    }
    int laC = ws.intern(a * q / C, GuardRole::Den);
    MatrixEntryEvaluator<S> out;
    out.constant = TermValue<S>::finite(S(1));
    out.core = [=](const MultiIndex& k, const MultiIndex& l) {
        const long K = index_sum(k), L = index_sum(l);
        TermProduct<S> t(*w);
        t.vwp(vwpa, 2 * K);
        vand->apply(t, k);
        for (int i = 0; i < r; ++i) t.vwp(vwps[static_cast<std::size_t>(i)], K - k[i]);
        t.dpoch(laC, K - L);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                t.poch(ucx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] + l[j]);
        for (int i = 0; i < r; ++i) {
            t.poch(uaxb[static_cast<std::size_t>(i)], k[i] - L);
            t.dpoch(lbcx[static_cast<std::size_t>(i)], K + l[i]);
        }
        t.qpower(K - r * L);
        return t.done();
    };
    return out;
}

// ------------------------------------------------------------------ crmi

template <class S>
MatrixEntryEvaluator<S> crmi_f(const ParamSet& p, Workspace<S>& ws, bool with_pair_factor = true) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const auto& c = p.cs;
    const auto& x = p.xs;

    ClosedFormProduct<S> pre(ws);
    for (int i = 0; i < r; ++i) {
        pre.num({a * x[i] * q / b, b * q / (a * x[i]), b * x[i] * q, q / (b * x[i])});
        pre.den({a * x[i] * q / (b * c[i]), b * c[i] * q / (a * x[i]), b * x[i] * q / c[i],
                 c[i] * q / (b * x[i])});
    }
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            pre.num({q * c[j] * x[i] / x[j], q * x[i] / (c[i] * x[j]), a * x[i] * x[j] * q / c[i],
                     c[j] * q / (a * x[i] * x[j])});
            pre.den({q * c[j] * x[i] / (c[i] * x[j]), q * x[i] / x[j]});
        }
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) pre.den({a * x[i] * x[j] * q, q / (a * x[i] * x[j])});
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            pre.den({a * x[i] * x[j] * q / (c[i] * c[j]), c[i] * c[j] * q / (a * x[i] * x[j])});

    auto vand = std::make_shared<DifferenceFactor<S>>(detail::cx_difference(ws, p));
    Workspace<S>* w = &ws;
    std::vector<VwpFactor<S>> vwp1, vwp2;
    std::vector<std::vector<VwpFactor<S>>> vwp_pair(static_cast<std::size_t>(r));
    std::vector<int> ubx, laxb;
    std::vector<std::vector<int>> uaxx(static_cast<std::size_t>(r)), lqcx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        vwp1.push_back(make_vwp(ws, b * c[i] / (a * x[i])));
        vwp2.push_back(make_vwp(ws, b * x[i] / c[i]));
        ubx.push_back(ws.intern(b * x[i], GuardRole::Num));
        laxb.push_back(ws.intern(a * x[i] * q / b, GuardRole::Den));
        for (int j = 0; j < r; ++j) {
            uaxx[static_cast<std::size_t>(i)].push_back(
                ws.intern(a * x[i] * x[j] / c[j], GuardRole::Num));
            lqcx[static_cast<std::size_t>(i)].push_back(
                ws.intern(q * c[j] * x[i] / x[j], GuardRole::Den));
            // The printed statement omits this pair factor; without it the
            // left-orthogonality sum normalizes to (1 - Cq^{|n|}/aX)-type
            // values instead of 1 for r >= 2 (checked against the C_r 6psi6
            // route at r = 2 and r = 3). Empty at r = 1.
            if (j > i)
                vwp_pair[static_cast<std::size_t>(i)].push_back(
                    make_vwp(ws, c[i] * c[j] / (a * x[i] * x[j])));
        }
    }
    MatrixEntryEvaluator<S> out;
    out.constant = pre.eval();
    out.core = [=](const MultiIndex& n, const MultiIndex& k) {
        const long N = index_sum(n);
        TermProduct<S> t(*w);
        vand->apply(t, n);
        if (with_pair_factor)
            for (int i = 0; i < r; ++i)
                for (int j = i + 1; j < r; ++j)
                    t.vwp(vwp_pair[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i - 1)],
                          n[i] + n[j]);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                t.poch(uaxx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] - n[j]);
                t.dpoch(lqcx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] + n[j]);
            }
        for (int i = 0; i < r; ++i) {
            t.vwp(vwp1[static_cast<std::size_t>(i)], n[i] + N);
            t.vwp(vwp2[static_cast<std::size_t>(i)], N - n[i]);
            t.poch(ubx[static_cast<std::size_t>(i)], k[i] + N);
            t.dpoch(laxb[static_cast<std::size_t>(i)], k[i] - N);
        }
        return t.done();
    };
    return out;
}

template <class S>
MatrixEntryEvaluator<S> crmi_g(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B();
    const auto& c = p.cs;
    const auto& x = p.xs;
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);
    Workspace<S>* w = &ws;
    std::vector<std::vector<VwpFactor<S>>> vwps(static_cast<std::size_t>(r));
    std::vector<int> uaxb, lbxq;
    std::vector<std::vector<int>> ucx(static_cast<std::size_t>(r)), laxx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        uaxb.push_back(ws.intern(a * x[i] / b, GuardRole::Num));
        lbxq.push_back(ws.intern(b * x[i] * q, GuardRole::Den));
        for (int j = 0; j < r; ++j) {
            ucx[static_cast<std::size_t>(i)].push_back(
                ws.intern(c[j] * x[i] / x[j], GuardRole::Num));
            laxx[static_cast<std::size_t>(i)].push_back(
                ws.intern(a * x[i] * x[j] * q / c[j], GuardRole::Den));
            if (j >= i) vwps[static_cast<std::size_t>(i)].push_back(make_vwp(ws, a * x[i] * x[j]));
        }
    }
    MatrixEntryEvaluator<S> out;
    out.constant = TermValue<S>::finite(S(1));
    out.core = [=](const MultiIndex& k, const MultiIndex& l) {
        const long K = index_sum(k), L = index_sum(l);
        TermProduct<S> t(*w);
        vand->apply(t, k);
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j)
                t.vwp(vwps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)], k[i] + k[j]);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                t.poch(ucx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] + l[j]);
                t.dpoch(laxx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], k[i] - l[j]);
            }
        for (int i = 0; i < r; ++i) {
            t.poch(uaxb[static_cast<std::size_t>(i)], k[i] - L);
            t.dpoch(lbxq[static_cast<std::size_t>(i)], k[i] + L);
        }
        t.qpower(K + (1 - 2 * r) * L);
        return t.done();
    };
    return out;
}

// ------------------------------------------------------------- dispatcher

template <class S>
MatrixEntryEvaluator<S> matrix_entry(const std::string& pair, MatrixRole role, const ParamSet& p,
                                     Workspace<S>& ws) {
    if (pair == "bmi") {
        if (p.r != 1) throw std::invalid_argument("bmi requires r = 1");
        return role == MatrixRole::F ? bmi_f(p, ws) : bmi_g(p, ws);
    }
    if (pair == "armi") return role == MatrixRole::F ? armi_f(p, ws) : armi_g(p, ws);
    if (pair == "arvmi") return role == MatrixRole::F ? arvmi_f(p, ws) : arvmi_g(p, ws);
    if (pair == "crmi") return role == MatrixRole::F ? crmi_f(p, ws) : crmi_g(p, ws);
    if (pair == "crmi_printed")
        return role == MatrixRole::F ? crmi_f(p, ws, false) : crmi_g(p, ws);
    throw std::invalid_argument("unknown inverse pair: " + pair);
}

// ----------------------------------------------------------- orthogonality

struct OrthogonalityCell {
    MultiIndex row, col;
    std::string residual;  // |sum - delta| as decimal
    SumStatus status = SumStatus::Inconclusive;
};

struct OrthogonalityReport {
    std::string pair;
    PairSide side = PairSide::Left;
    int r = 1;
    long window = 0;
    std::vector<OrthogonalityCell> cells;
    std::string max_residual;
    bool all_converged = false;
};

/// Scan all (n, l) with max-norm <= window; each cell bilaterally sums
/// f_{nk} g_{kl} (left) or g_{nk} f_{kl} (right) over k and compares with
/// the Kronecker delta.
template <class S>
OrthogonalityReport check_orthogonality(const std::string& pair, const ParamSet& p, PairSide side,
                                        long window, const ConvergencePolicy& policy,
                                        Workspace<S>& ws) {
    auto f = matrix_entry(pair, MatrixRole::F, p, ws);
    auto g = matrix_entry(pair, MatrixRole::G, p, ws);

    OrthogonalityReport rep;
    rep.pair = pair;
    rep.side = side;
    rep.r = p.r;
    rep.window = window;

    S max_resid(0);
    bool ok = true;
    std::vector<MultiIndex> points;
    for_each_in_window(p.r, window, [&](const MultiIndex& m) { points.push_back(m); });

    for (const MultiIndex& n : points) {
        for (const MultiIndex& l : points) {
            // The constant prefactor scales the whole cell sum.
            Summand<S> cell{p.r, [&](const MultiIndex& k) {
                                return side == PairSide::Left ? f.core(n, k) * g.core(k, l)
                                                              : g.core(n, k) * f.core(k, l);
                            }};
            SumOutcome<S> sum = sum_bilateral(cell, policy);
            OrthogonalityCell c;
            c.row = n;
            c.col = l;
            c.status = sum.status;
            S delta(n == l ? 1 : 0);
            S resid;
            if (!f.constant.is_finite()) {
                c.status = SumStatus::Inconclusive;
                resid = S(-1);
                ok = false;
            } else {
                resid = boost::multiprecision::abs(sum.value * f.constant.value - delta);
            }
            c.residual = to_decimal(resid);
            if (sum.status != SumStatus::Converged) ok = false;
            if (resid > max_resid) max_resid = resid;
            rep.cells.push_back(std::move(c));
        }
    }
    rep.max_residual = to_decimal(max_resid);
    rep.all_converged = ok;
    return rep;
}

// -------------------------------------------------------- inverse relations

enum class RelationDirection { InvRel, RotInv };

/// A transcribed sequence pair (a_k, b_n) from one of the derivations, with
/// the matrix pair and direction it belongs to.
template <class S>
struct ProofSequences {
    std::string pair;
    RelationDirection direction = RelationDirection::InvRel;
    std::function<TermValue<S>(const MultiIndex&)> a;
    std::function<TermValue<S>(const MultiIndex&)> b;
};

struct RelationReport {
    std::string pair;
    RelationDirection direction = RelationDirection::InvRel;
    long window = 0;
    std::vector<OrthogonalityCell> cells;  // row = checked index
    std::string max_residual;
    bool all_converged = false;
};

/// Check the relation implied by the orthogonality: for rotinv,
/// sum_n f_{nk} a_n = b_k at each k in the window; for invrel,
/// sum_k f_{nk} a_k = b_n at each n.
template <class S>
RelationReport apply_inverse_relation(const ProofSequences<S>& seqs, const ParamSet& p, long window,
                                      const ConvergencePolicy& policy, Workspace<S>& ws) {
    auto f = matrix_entry(seqs.pair, MatrixRole::F, p, ws);

    RelationReport rep;
    rep.pair = seqs.pair;
    rep.direction = seqs.direction;
    rep.window = window;

    S max_resid(0);
    bool ok = true;
    std::vector<MultiIndex> points;
    for_each_in_window(p.r, window, [&](const MultiIndex& m) { points.push_back(m); });

    for (const MultiIndex& fixed : points) {
        Summand<S> cell{p.r, [&](const MultiIndex& var) {
                            TermValue<S> fv = seqs.direction == RelationDirection::RotInv
                                                  ? f.core(var, fixed)  // sum over first index
                                                  : f.core(fixed, var);
                            fv *= seqs.a(var);
                            return f.constant * fv;
                        }};
        SumOutcome<S> sum = sum_bilateral(cell, policy);
        OrthogonalityCell c;
        c.row = fixed;
        c.status = sum.status;
        TermValue<S> target = seqs.b(fixed);
        S resid;
        if (target.is_pole() || sum.status != SumStatus::Converged) {
            ok = false;
            resid = S(-1);
        } else {
            S scale = boost::multiprecision::abs(target.summable_value());
            if (scale < 1) scale = S(1);
            resid = boost::multiprecision::abs(sum.value - target.summable_value()) / scale;
        }
        c.residual = to_decimal(resid);
        if (resid > max_resid) max_resid = resid;
        rep.cells.push_back(std::move(c));
    }
    rep.max_residual = to_decimal(max_resid);
    rep.all_converged = ok;
    return rep;
}

// -------------------------------------------------- proof sequence builders

/// Sequences of the first 8psi8 derivation (rotinv with armi): a_l and b_k
/// obtained from the b -> d, c_i -> c_i q^{l_i}, d -> a q^{-|l|}/b case of
/// the A_r terminating 8phi7 summation.
template <class S>
ProofSequences<S> proof_sequences_a88s(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const long M = p.Mval();
    const auto& c = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;

    ProofSequences<S> out;
    out.pair = "armi";
    out.direction = RelationDirection::RotInv;

    ClosedFormProduct<S> apre(ws);
    apre.poch(b * q / d, M).poch(b * q / C, M).dpoch(b * q, M).dpoch(b * q / (C * d), M);
    for (int i = 0; i < r; ++i) {
        apre.poch(a * x[i] * q, M).poch(a * x[i] * q / (c[i] * d), M);
        apre.dpoch(a * x[i] * q / d, M).dpoch(a * x[i] * q / c[i], M);
    }
    TermValue<S> aconst = apre.eval();

    out.a = [=](const MultiIndex& l) {
        const long L = index_sum(l);
        TermProduct<S> t(*w);
        t.term(aconst);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t.poch(c[j] * x[i] / x[j], l[j]);
        t.poch(b * rat_pow(q, 1 + M) / d, L);
        t.dpoch(b * rat_pow(q, 1 + M), L).dpoch(b * q / d, L);
        for (int i = 0; i < r; ++i) {
            t.poch(c[i] * rat_pow(q, -M) / (a * x[i]), l[i]).poch(c[i] * d / (a * x[i]), l[i]);
            t.dpoch(c[i] * d * rat_pow(q, -M) / (a * x[i]), l[i]);
            t.dpoch(b * q / (a * x[i]), L);
        }
        t.sign((r - 1) * L);
        t.power(a, (1 - r) * L);
        t.power(b, r * L);
        long e = r * binom2(L);
        for (int i = 0; i < r; ++i) e -= binom2(l[i]);
        t.qpower(e);
        for (int i = 0; i < r; ++i) {
            t.power(c[i], -l[i]);
            t.power(x[i], l[i] - L);
        }
        return t.done();
    };

    out.b = [=](const MultiIndex& k) {
        const long K = index_sum(k);
        TermProduct<S> t(*w);
        t.poch(d, K).poch(rat_pow(q, -M), K);
        t.dpoch(C * d * rat_pow(q, -M) / b, K);
        for (int i = 0; i < r; ++i) {
            t.poch(a * b * x[i] * rat_pow(q, 1 + M) / (C * d), k[i]);
            t.poch(a * x[i], K);
            t.dpoch(a * x[i] * q / d, k[i]).dpoch(a * x[i] * rat_pow(q, 1 + M), k[i]);
        }
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t.dpoch(q * x[i] / x[j], k[i]);
        return t.done();
    };
    return out;
}

/// Sequences of the second 8psi8 derivation (invrel with arvmi).
template <class S>
ProofSequences<S> proof_sequences_av88s(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const Rational C = p.C();
    const long M = p.Mval();
    const auto& c = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;

    ProofSequences<S> out;
    out.pair = "arvmi";
    out.direction = RelationDirection::InvRel;

    ClosedFormProduct<S> apre(ws);
    apre.poch(b * q / d, M).poch(b * q / (a * d), M);
    apre.dpoch(b * C * q / (a * d), M).dpoch(b * q / (C * d), M);
    for (int i = 0; i < r; ++i) {
        apre.poch(b * c[i] * q / (a * x[i]), M).poch(b * q / (C * x[i]), M);
        apre.dpoch(b * c[i] * q / (C * x[i]), M).dpoch(b * q / (a * x[i]), M);
    }
    TermValue<S> aconst = apre.eval();
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    out.a = [=](const MultiIndex& k) {
        const long K = index_sum(k);
        TermProduct<S> t(*w);
        t.term(aconst);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t.poch(c[j] * x[i] / x[j], k[i]);
        vand->apply(t, k);
        for (int i = 0; i < r; ++i) {
            t.poch(b * rat_pow(q, 1 + M) / (C * x[i]), K - k[i]);
            t.poch(a * x[i] * rat_pow(q, -M) / b, k[i]);
            t.dpoch(b / (C * x[i]), K - k[i]);
            t.dpoch(b * c[i] * rat_pow(q, 1 + M) / (C * x[i]), K);
        }
        t.vwp(a, 2 * K);
        t.poch(a * d / b, K).poch(b * rat_pow(q, 1 + M) / d, K);
        t.dpoch(a * d * rat_pow(q, -M) / b, K).dpoch(b * q / d, K);
        t.qpower(K);
        return t.done();
    };

    auto vandc = std::make_shared<DifferenceFactor<S>>(detail::cx_difference(ws, p));
    out.b = [=](const MultiIndex& l) {
        const long L = index_sum(l);
        TermProduct<S> t(*w);
        vandc->apply(t, l);
        for (int i = 0; i < r; ++i) t.vwp(b * c[i] / (a * x[i]), l[i] + L);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t.dpoch(q * c[i] * x[j] / (c[j] * x[i]), l[i]);
        t.poch(rat_pow(q, -M), L);
        t.dpoch(b * C * q / (a * d), L).dpoch(C * d * rat_pow(q, -M) / b, L);
        for (int i = 0; i < r; ++i) {
            t.poch(b * c[i] / (a * x[i]), L);
            t.poch(c[i] * d / (C * x[i]), l[i]);
            t.poch(b * b * c[i] * rat_pow(q, 1 + M) / (a * C * d * x[i]), l[i]);
            t.dpoch(b * c[i] * rat_pow(q, 1 + M) / (a * x[i]), l[i]);
            t.power(x[i], L);
        }
        t.sign((r - 1) * L);
        t.power(a, (r - 1) * L);
        t.power(b, -r * L);
        t.power(C, L);
        t.qpower(L + (1 - r) * binom2(L));
        return t.done();
    };
    return out;
}

/// Sequences of the C_r 8psi8 derivation (invrel with crmi): from the
/// k_i -> l_i, a -> b/a, b -> d, c_i -> c_i q^{k_i}, cd -> 1/a,
/// x_i -> c_i/x_i case of the D_r terminating 8phi7 summation.
template <class S>
ProofSequences<S> proof_sequences_c88s(const ParamSet& p, Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q, a = p.A(), b = p.B(), d = p.D();
    const long M = p.Mval();
    const auto& c = p.cs;
    const auto& x = p.xs;
    Workspace<S>* w = &ws;

    ProofSequences<S> out;
    out.pair = "crmi";
    out.direction = RelationDirection::InvRel;

    ClosedFormProduct<S> apre(ws);
    for (int i = 0; i < r; ++i) {
        apre.poch(b * c[i] * q / (a * x[i]), M).poch(b * x[i] * q / c[i], M);
        apre.poch(b * q / (a * d * x[i]), M).poch(b * x[i] * q / d, M);
        apre.dpoch(b * x[i] * q / (c[i] * d), M).dpoch(b * c[i] * q / (a * d * x[i]), M);
        apre.dpoch(b * x[i] * q, M).dpoch(b * q / (a * x[i]), M);
    }
    TermValue<S> aconst = apre.eval();
    auto vand = std::make_shared<DifferenceFactor<S>>(ws, x);

    out.a = [=](const MultiIndex& k) {
        TermProduct<S> t(*w);
        t.term(aconst);
        for (int i = 0; i < r; ++i) {
            t.poch(a * d * x[i] / b, k[i]).poch(b * x[i] * rat_pow(q, 1 + M) / d, k[i]);
            t.poch(a * x[i] * rat_pow(q, -M) / b, k[i]);
            t.dpoch(a * d * x[i] * rat_pow(q, 1 - M) / b, k[i]);
            t.dpoch(b * x[i] * rat_pow(q, 1 + M), k[i]).dpoch(b * x[i] * q / d, k[i]);
            // Required to make the specialized D_r 8phi7 reading of
            // invrel2 hold exactly (checked per-coordinate on finite sums);
            // absent from the printed sequence.
            t.vwp(a * d * x[i] * rat_pow(q, -M) / b, k[i]);
        }
        t.qpower(index_sum(k));
        vand->apply(t, k);
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) t.vwp(a * x[i] * x[j], k[i] + k[j]);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) {
                t.poch(c[j] * x[i] / x[j], k[i]);
                t.dpoch(a * x[i] * x[j] * q / c[j], k[i]);
            }
        return t.done();
    };

    auto vandc = std::make_shared<DifferenceFactor<S>>(detail::cx_difference(ws, p));
    out.b = [=](const MultiIndex& l) {
        const long L = index_sum(l);
        TermProduct<S> t(*w);
        vandc->apply(t, l);
        for (int i = 0; i < r; ++i) t.vwp(b * c[i] / (a * x[i]), l[i] + L);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t.dpoch(q * c[i] * x[j] / (c[j] * x[i]), l[i]);
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j) t.dpoch(c[i] * c[j] / (a * x[i] * x[j]), l[i] + l[j]);
        for (int i = 0; i < r; ++i) {
            t.poch(b * c[i] / (a * x[i]), L);
            t.poch(b * x[i] * q / c[i], L - l[i]);
            t.power(c[i], r * l[i]);
            t.power(x[i], -r * l[i]);
        }
        t.poch(d, L).poch(b * b * rat_pow(q, 1 + M) / (a * d), L).poch(rat_pow(q, -M), L);
        for (int i = 0; i < r; ++i) {
            t.dpoch(b * c[i] * q / (a * d * x[i]), l[i]);
            t.dpoch(d * c[i] * rat_pow(q, -M) / (b * x[i]), l[i]);
            t.dpoch(b * c[i] * rat_pow(q, 1 + M) / (a * x[i]), l[i]);
        }
        t.power(b, -r * L);
        long e = -r * binom2(L);
        for (int i = 0; i < r; ++i) e += r * binom2(l[i] + 1);
        t.qpower(e);
        return t.done();
    };
    return out;
}

// ------------------------------------------------------------- milne lemma

/// Both sides of the finite product identity used by the A_r inversion
/// proofs: prod_{i,j} (q^{1+n_j-n_i} c_j x_i / c_i x_j)_{n_i-n_j} against
/// its closed form. Exact in rational mode.
template <class S>
std::pair<TermValue<S>, TermValue<S>> milne_lemma_sides(const ParamSet& p, const MultiIndex& n,
                                                        Workspace<S>& ws) {
    const int r = p.r;
    const Rational q = p.q;
    const auto& c = p.cs;
    const auto& x = p.xs;
    const long N = index_sum(n);

    TermProduct<S> lhs(ws);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            lhs.poch(rat_pow(q, 1 + n[j] - n[i]) * c[j] * x[i] / (c[i] * x[j]), n[i] - n[j]);

    TermProduct<S> rhs(ws);
    rhs.sign((r - 1) * N);
    long e = binom2(N);
    for (int i = 0; i < r; ++i) e -= r * binom2(n[i]);
    rhs.qpower(e);
    for (int i = 0; i < r; ++i) rhs.power(c[i] / x[i], N - r * n[i]);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            S den = ws.ctx.from(c[i] / x[i]) * ws.ctx.qpow(n[i]) -
                    ws.ctx.from(c[j] / x[j]) * ws.ctx.qpow(n[j]);
            rhs.ratio(ws.ctx.from(c[i] / x[i] - c[j] / x[j]), den);
        }
    return {lhs.done(), rhs.done()};
}

}  // namespace qident
