#pragma once

#include <cstdlib>
#include <functional>
#include <numeric>
#include <vector>

namespace qident {

/// A lattice point in Z^r. |k| and e2(k) are always recomputed from the
/// entries.
using MultiIndex = std::vector<long>;

inline long index_sum(const MultiIndex& k) {
    return std::accumulate(k.begin(), k.end(), 0L);
}

/// Second elementary symmetric function sum_{i<j} k_i k_j.
inline long elem_sym2(const MultiIndex& k) {
    long s = index_sum(k);
    long sq = 0;
    for (long v : k) sq += v * v;
    return (s * s - sq) / 2;
}

inline long max_abs(const MultiIndex& k) {
    long m = 0;
    for (long v : k) m = std::max(m, std::labs(v));
    return m;
}

namespace detail {
template <class F>
void shell_rec(MultiIndex& k, std::size_t pos, long radius, bool saturated, F& f) {
    if (pos + 1 == k.size()) {
        if (saturated) {
            for (long v = -radius; v <= radius; ++v) {
                k[pos] = v;
                f(const_cast<const MultiIndex&>(k));
            }
        } else {
            k[pos] = -radius;
            f(const_cast<const MultiIndex&>(k));
            if (radius != 0) {
                k[pos] = radius;
                f(const_cast<const MultiIndex&>(k));
            }
        }
        return;
    }
    for (long v = -radius; v <= radius; ++v) {
        k[pos] = v;
        shell_rec(k, pos + 1, radius, saturated || std::labs(v) == radius, f);
    }
}

template <class F>
void simplex_rec(MultiIndex& k, std::size_t pos, long budget, F& f) {
    if (pos + 1 == k.size()) {
        for (long v = 0; v <= budget; ++v) {
            k[pos] = v;
            f(const_cast<const MultiIndex&>(k));
        }
        return;
    }
    for (long v = 0; v <= budget; ++v) {
        k[pos] = v;
        simplex_rec(k, pos + 1, budget - v, f);
    }
}
}  // namespace detail

/// Visit every k in Z^r with max-norm exactly `radius`.
template <class F>
void for_each_on_shell(int r, long radius, F f) {
    MultiIndex k(static_cast<std::size_t>(r), 0);
    detail::shell_rec(k, 0, radius, false, f);
}

/// Visit every k with k_i >= 0 and |k| <= M.
template <class F>
void for_each_in_simplex(int r, long M, F f) {
    MultiIndex k(static_cast<std::size_t>(r), 0);
    detail::simplex_rec(k, 0, M, f);
}

/// Visit every k with 0 <= k_i <= m_i.
template <class F>
void for_each_in_box(const std::vector<long>& m, F f) {
    MultiIndex k(m.size(), 0);
    while (true) {
        f(const_cast<const MultiIndex&>(k));
        std::size_t i = 0;
        while (i < k.size()) {
            if (++k[i] <= m[i]) break;
            k[i] = 0;
            ++i;
        }
        if (i == k.size()) return;
    }
}

/// Visit every k with max-norm <= radius.
template <class F>
void for_each_in_window(int r, long radius, F f) {
    for (long n = 0; n <= radius; ++n) for_each_on_shell(r, n, f);
}

}  // namespace qident
