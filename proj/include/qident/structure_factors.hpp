#pragma once

#include "qident/multi_index.hpp"
#include "qident/param_set.hpp"
#include "qident/qpochhammer.hpp"

namespace qident {

/// Precomputed difference-product machinery shared by the root-system
/// structure factors: prod_{i<j} (y_i q^{k_i} - y_j q^{k_j}) / (y_i - y_j)
/// for a fixed vector y.
template <class S>
class DifferenceFactor {
  public:
    DifferenceFactor() = default;
    DifferenceFactor(Workspace<S>& ws, const std::vector<Rational>& y) : ws_(&ws) {
        const std::size_t r = y.size();
        y_s_.reserve(r);
        for (const auto& v : y) y_s_.push_back(ws.ctx.from(v));
        inv_den_ = S(1);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = i + 1; j < r; ++j) {
                S d = y_s_[i] - y_s_[j];
                if (d == 0) {
                    singular_ = true;
                    return;
                }
                inv_den_ *= d;
                ws.guard_ratio(y[i] / y[j]);
            }
        inv_den_ = S(1) / inv_den_;
    }

    /// Contribution at lattice point k (uses each coordinate's q-power).
    void apply(TermProduct<S>& t, const MultiIndex& k) const {
        if (singular_) {
            t.pole();
            return;
        }
        if (y_s_.size() < 2) return;
        S num(1);
        for (std::size_t i = 0; i < y_s_.size(); ++i)
            for (std::size_t j = i + 1; j < y_s_.size(); ++j)
                num *= y_s_[i] * ws_->ctx.qpow(k[i]) - y_s_[j] * ws_->ctx.qpow(k[j]);
        if (num == 0) {
            t.zero();
            return;
        }
        t.value(num * inv_den_);
    }

  private:
    Workspace<S>* ws_ = nullptr;
    std::vector<S> y_s_;
    S inv_den_{};
    bool singular_ = false;
};

/// A_r structure factor prod_{i<j} (x_i q^{k_i} - x_j q^{k_j})/(x_i - x_j).
template <class S>
TermValue<S> ar_factor(Workspace<S>& ws, const ParamSet& p, const MultiIndex& k) {
    DifferenceFactor<S> diff(ws, p.xs);
    TermProduct<S> t(ws);
    diff.apply(t, k);
    return t.done();
}

/// C_r structure factor: the A_r difference product times
/// prod_{i<=j} (1 - x_i x_j q^{k_i+k_j})/(1 - x_i x_j).
template <class S>
TermValue<S> cr_factor(Workspace<S>& ws, const ParamSet& p, const MultiIndex& k) {
    DifferenceFactor<S> diff(ws, p.xs);
    TermProduct<S> t(ws);
    diff.apply(t, k);
    const std::size_t r = p.xs.size();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j)
            t.vwp(p.xs[i] * p.xs[j], k[i] + k[j]);
    return t.done();
}

/// D_r structure factor: only the i<j part of the C_r product.
template <class S>
TermValue<S> dr_factor(Workspace<S>& ws, const ParamSet& p, const MultiIndex& k) {
    DifferenceFactor<S> diff(ws, p.xs);
    TermProduct<S> t(ws);
    diff.apply(t, k);
    const std::size_t r = p.xs.size();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            t.vwp(p.xs[i] * p.xs[j], k[i] + k[j]);
    return t.done();
}

}  // namespace qident
