#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "qident/multi_index.hpp"
#include "qident/qpochhammer.hpp"
#include "qident/term_value.hpp"

namespace qident {

/// A term evaluator over Z^r.
template <class S>
struct Summand {
    int rank = 1;
    std::function<TermValue<S>(const MultiIndex&)> eval;

    TermValue<S> operator()(const MultiIndex& k) const { return eval(k); }
};

struct Bilateral {};
struct Simplex {
    long M = 0;  // k_i >= 0, 0 <= |k| <= M
};
struct Box {
    std::vector<long> m;  // 0 <= k_i <= m_i
};
struct Window {
    long radius = 0;  // max_i |k_i| <= radius
};
using Support = std::variant<Bilateral, Simplex, Box, Window>;

inline bool is_finite_support(const Support& s) {
    return !std::holds_alternative<Bilateral>(s);
}

struct ConvergencePolicy {
    double shell_tol = 1e-16;    // relative, absolute once |partial| < 1
    long min_shells = 3;
    long divergence_patience = 5;
    long max_shell = 60;

    void validate() const {
        if (min_shells < 1 || max_shell < min_shells)
            throw std::invalid_argument("ConvergencePolicy requires max_shell >= min_shells >= 1");
    }
};

enum class SumStatus { Converged, Divergent, Inconclusive };

template <class S>
struct SumOutcome {
    S value{};
    long shells_used = 0;
    SumStatus status = SumStatus::Inconclusive;
    std::optional<MultiIndex> pole_hit;
};

/// Exact sum over a declared finite support. Pole terms are skipped, the
/// first pole site is reported and the outcome degrades to Inconclusive.
template <class S>
SumOutcome<S> sum_finite(const Summand<S>& f, const Support& support) {
    SumOutcome<S> out;
    out.value = S(0);
    out.status = SumStatus::Converged;
    auto add = [&](const MultiIndex& k) {
        TermValue<S> t = f(k);
        if (t.is_pole()) {
            if (!out.pole_hit) out.pole_hit = k;
            out.status = SumStatus::Inconclusive;
            return;
        }
        if (t.is_finite()) out.value += t.value;
    };
    if (const Simplex* s = std::get_if<Simplex>(&support)) {
        for_each_in_simplex(f.rank, s->M, add);
    } else if (const Box* b = std::get_if<Box>(&support)) {
        for_each_in_box(b->m, add);
    } else if (const Window* w = std::get_if<Window>(&support)) {
        for_each_in_window(f.rank, w->radius, add);
    } else {
        throw std::invalid_argument("sum_finite requires a finite support");
    }
    return out;
}

/// Adaptive bilateral summation over max-norm shells S_N = {k : max|k_i|=N}.
///
/// Converged: the last min_shells shell totals each stay below
/// shell_tol * max(|partial|, 1). Divergent: shell magnitudes strictly
/// increase for divergence_patience consecutive shells past shell 10 (a
/// heuristic verdict, not a proof). Otherwise Inconclusive at max_shell.
template <class S>
SumOutcome<S> sum_bilateral(const Summand<S>& f, const ConvergencePolicy& policy) {
    policy.validate();
    SumOutcome<S> out;
    out.value = S(0);
    const S tol = S(policy.shell_tol);
    const S one(1);

    S prev_mag(0);
    long ok_streak = 0;
    long grow_streak = 0;
    bool have_prev = false;

    for (long N = 0; N <= policy.max_shell; ++N) {
        S shell(0);
        bool pole = false;
        MultiIndex pole_at;
        for_each_on_shell(f.rank, N, [&](const MultiIndex& k) {
            if (pole) return;
            TermValue<S> t = f(k);
            if (t.is_pole()) {
                pole = true;
                pole_at = k;
                return;
            }
            if (t.is_finite()) shell += t.value;
        });
        if (pole) {
            out.status = SumStatus::Inconclusive;
            out.pole_hit = pole_at;
            out.shells_used = N;
            return out;
        }
        out.value += shell;
        out.shells_used = N;

        S mag = boost::multiprecision::abs(shell);
        S scale = boost::multiprecision::abs(out.value);
        if (scale < one) scale = one;
        if (mag <= tol * scale)
            ++ok_streak;
        else
            ok_streak = 0;
        if (N >= 1 && ok_streak >= policy.min_shells && N >= policy.min_shells) {
            out.status = SumStatus::Converged;
            return out;
        }

        if (N > 10 && have_prev && mag > prev_mag)
            ++grow_streak;
        else if (N > 10)
            grow_streak = 0;
        if (grow_streak >= policy.divergence_patience) {
            out.status = SumStatus::Divergent;
            return out;
        }
        prev_mag = mag;
        have_prev = true;
    }
    out.status = SumStatus::Inconclusive;
    return out;
}

/// Probe a bilateral summand for natural truncation: vanishing factors such
/// as (q^{-M})_{|k|} cut the support to a finite simplex or box. Returns the
/// implied support when one is found within probe_radius.
template <class S>
std::optional<Support> detect_natural_truncation(const Summand<S>& f, long probe_radius = 24) {
    const int r = f.rank;
    auto zero_at = [&](const MultiIndex& k) { return f(k).is_zero(); };
    auto axis_point = [&](int i, long v) {
        MultiIndex k(static_cast<std::size_t>(r), 0);
        k[static_cast<std::size_t>(i)] = v;
        return k;
    };

    // Lower side: every axis must vanish for all probed k_i < 0.
    for (int i = 0; i < r; ++i)
        for (long v = -1; v >= -std::min<long>(probe_radius, 6); --v)
            if (!zero_at(axis_point(i, v))) return std::nullopt;
    // A couple of mixed-sign probes guard against axis-only vanishing.
    if (r >= 2) {
        MultiIndex k(static_cast<std::size_t>(r), 0);
        k[0] = -1;
        k[1] = 1;
        if (!zero_at(k)) return std::nullopt;
        k[0] = 1;
        k[1] = -2;
        if (!zero_at(k)) return std::nullopt;
    }

    // Upper side along each axis.
    std::vector<long> upper(static_cast<std::size_t>(r), -1);
    for (int i = 0; i < r; ++i) {
        long top = -1;
        for (long v = probe_radius; v >= 0; --v) {
            if (!zero_at(axis_point(i, v))) {
                top = v;
                break;
            }
        }
        if (top < 0 || top >= probe_radius) return std::nullopt;
        // The tail above must stay zero.
        for (long v = top + 1; v <= std::min(top + 3, probe_radius); ++v)
            if (!zero_at(axis_point(i, v))) return std::nullopt;
        upper[static_cast<std::size_t>(i)] = top;
    }

    if (r == 1) return Support{Simplex{upper[0]}};

    // Distinguish |k| <= M (simplex) from independent per-axis bounds (box):
    // on a simplex, the corner (upper_0, upper_1, ...) vanishes unless all
    // the weight sits on one axis.
    bool all_equal = true;
    for (int i = 1; i < r; ++i) all_equal = all_equal && upper[static_cast<std::size_t>(i)] == upper[0];
    if (all_equal && upper[0] > 0) {
        MultiIndex corner(static_cast<std::size_t>(r), 0);
        corner[0] = upper[0];
        corner[1] = 1;
        if (zero_at(corner)) {
            long M = upper[0];
            // Confirm the simplex boundary: slices |k| = M+1 vanish.
            bool ok = true;
            for_each_in_simplex(r, M + 1, [&](const MultiIndex& k) {
                if (index_sum(k) == M + 1 && !zero_at(k)) ok = false;
            });
            if (ok) return Support{Simplex{M}};
        }
    }
    // Box: confirm a layer above each bound vanishes across the box.
    for (int i = 0; i < r; ++i) {
        MultiIndex k(upper.begin(), upper.end());
        k[static_cast<std::size_t>(i)] += 1;
        if (!zero_at(k)) return std::nullopt;
    }
    return Support{Box{upper}};
}

}  // namespace qident
