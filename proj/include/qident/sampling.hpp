#pragma once

#include <random>

#include "qident/matrix_inverse.hpp"
#include "qident/verify.hpp"

namespace qident {

/// Deterministic parameter sampler. A fixed (case id, r, seed) triple always
/// produces the same ParamSet: q in [0.15, 0.45] and parameters as small
/// positive rationals with magnitude in [0.2, 0.9], redrawn until the case's
/// constraints and pole-proximity guards are satisfied.
class ParamSampler {
  public:
    static constexpr double kProximityEps = 1e-6;
    static constexpr double kStructureEps = 1e-4;
    static constexpr long kGuardRange = 200;
    static constexpr int kMaxAttempts = 10000;

    ParamSampler(std::string case_id, int r, std::uint64_t seed)
        : case_id_(std::move(case_id)), r_(r), rng_(mix(case_id_, r, seed)) {}

    /// Draw a ParamSet for an identity entry.
    ParamSet identity_params(const ConvergencePolicy& policy);
    /// Draw a ParamSet for a matrix pair or relation check.
    ParamSet pair_params();

  private:
    static std::uint64_t mix(const std::string& id, int r, std::uint64_t seed) {
        std::uint64_t h = 1469598103934665603ull;
        auto eat = [&](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        for (unsigned char ch : id) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        eat(static_cast<std::uint64_t>(r));
        eat(seed);
        return h;
    }

    Rational rational_in(double lo, double hi) {
        std::uniform_int_distribution<long> den_d(7, 64);
        for (int tries = 0; tries < 64; ++tries) {
            long den = den_d(rng_);
            long nlo = static_cast<long>(std::ceil(lo * static_cast<double>(den)));
            long nhi = static_cast<long>(std::floor(hi * static_cast<double>(den)));
            if (nlo > nhi) continue;
            std::uniform_int_distribution<long> num_d(nlo, nhi);
            return Rational(num_d(rng_), den);
        }
        return Rational(static_cast<long>((lo + hi) * 32), 64);
    }

    long int_in(long lo, long hi) {
        std::uniform_int_distribution<long> d(lo, hi);
        return d(rng_);
    }

    ParamSet draw_candidate();
    bool admit(const ParamSet& p, const ConvergencePolicy* policy);

    std::string case_id_;
    int r_;
    std::mt19937_64 rng_;
};

namespace detail {

/// Reject arguments that sit dangerously close to (or, depending on role,
/// exactly on) the q-power lattice, per the recorded guard roles.
template <class S>
bool guards_pass(const Workspace<S>& ws, double eps, long range) {
    const QBase& qb = ws.ctx.qb;
    for (const auto& arg : ws.cache.arguments()) {
        const Rational& u = *arg.value;
        if (u == 0) continue;
        if (u > 0 && qb.near_lattice(u, eps, range)) return false;
        if (arg.qexp) {
            long t = *arg.qexp;
            if (arg.has(GuardRole::Ratio)) return false;
            if (arg.has(GuardRole::Vwp) && t == 0) return false;
            if (arg.has(GuardRole::Den) && t <= 0) return false;
            if (arg.has(GuardRole::Num) && t >= 1 && !arg.has(GuardRole::Den)) return false;
        }
    }
    return true;
}

/// Empirical tail probe for bilateral summands without a stated convergence
/// modulus: estimate the per-shell decay along the outer rays and reject
/// rates that cannot reach shell tolerances within the shell budget.
template <class S>
bool tail_probe_pass(const Summand<S>& f, int r, double max_rate = 0.88) {
    const long n0 = 18, n1 = 24;
    std::vector<MultiIndex> dirs;
    for_each_on_shell(r, 1, [&](const MultiIndex& d) { dirs.push_back(d); });
    for (const MultiIndex& d : dirs) {
        auto at = [&](long n) {
            MultiIndex k(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) k[i] = d[i] * n;
            return f(k);
        };
        TermValue<S> t0 = at(n0), t1 = at(n1);
        if (t0.is_pole() || t1.is_pole()) return false;
        if (!t0.is_finite() || t0.value == 0) continue;  // truncated direction
        if (!t1.is_finite() || t1.value == 0) continue;
        S ratio = boost::multiprecision::abs(t1.value) / boost::multiprecision::abs(t0.value);
        double rate = std::pow(ratio.template convert_to<double>(), 1.0 / double(n1 - n0));
        if (!(rate < max_rate)) return false;
    }
    return true;
}

}  // namespace detail

inline ParamSet ParamSampler::draw_candidate() {
    ParamSet p;
    p.r = r_;
    p.q = rational_in(0.15, 0.45);
    p.a = rational_in(0.2, 0.9);
    p.b = rational_in(0.2, 0.9);
    p.c = rational_in(0.2, 0.9);
    p.d = rational_in(0.2, 0.9);
    for (int i = 0; i < r_; ++i) {
        p.cs.push_back(rational_in(0.2, 0.9));
        p.es.push_back(rational_in(0.2, 0.9));
        p.xs.push_back(rational_in(0.2, 0.9));
    }
    const IdentityInfo* info = nullptr;
    for (const auto& e : identity_registry())
        if (e.id == case_id_) info = &e;
    if (info) {
        if (case_id_ == "jackson_8phi7") {
            p.M = int_in(0, 4);
        } else if (case_id_ == "schlosser_8psi8") {
            p.M = int_in(0, 4);
            p.ks = {int_in(-2, 2)};
        } else if (case_id_ == "mjackson_8psi8_transform") {
            p.es = {rational_in(0.2, 0.9), rational_in(0.2, 0.9), rational_in(0.2, 0.9)};
        } else if (case_id_ == "dgml_cr_8phi7") {
            p.ms.clear();
            for (int i = 0; i < r_; ++i) p.ms.push_back(int_in(0, 4));
        } else if (case_id_ == "milne_ar_8phi7" || case_id_ == "schlosser_ar_8phi7" ||
                   case_id_ == "schlosser_dr_8phi7") {
            p.M = int_in(0, 4);
        } else if (case_id_ == "ar_8psi8" || case_id_ == "arv_8psi8" || case_id_ == "cr_8psi8") {
            p.M = int_in(0, 4);
            p.ks.clear();
            for (int i = 0; i < r_; ++i) p.ks.push_back(int_in(-2, 2));
        }
    } else {
        p.M = int_in(0, 3);  // relation checks
    }
    // distinct x_i, kept apart by the structural epsilon
    for (std::size_t i = 0; i < p.xs.size(); ++i)
        for (std::size_t j = i + 1; j < p.xs.size(); ++j) {
            Rational diff = p.xs[i] - p.xs[j];
            if (diff < 0) diff = -diff;
            if (BigFloat(diff) < kStructureEps) p.xs[j] += Rational(1, 13);
        }
    return p;
}

inline bool ParamSampler::admit(const ParamSet& p, const ConvergencePolicy* policy) {
    bool is_identity = false;
    const IdentityInfo* info = nullptr;
    for (const auto& e : identity_registry())
        if (e.id == case_id_) {
            is_identity = true;
            info = &e;
        }
    if (is_identity && constraint_violation(case_id_, p)) return false;
    try {
        set_float_precision(std::max(50u, BigFloat::default_precision()));
        Workspace<BigFloat> ws(p.q, 1e-20);
        if (is_identity) {
            if (case_id_ == "mjackson_8psi8_transform") {
                transform_8psi8_guard_args(ws, p.A(), p.B(), p.Cc(), p.D(), p.es[0], p.es[1],
                                           p.es[2]);
            } else {
                BuiltIdentity<BigFloat> built = build_identity(case_id_, p, ws);
                // probe a couple of lattice points so every factor records its
                // guard arguments
                MultiIndex probe(static_cast<std::size_t>(p.r), 1);
                (void)built.lhs(probe);
                if (!detail::guards_pass(ws, kProximityEps, kGuardRange)) return false;
                bool needs_probe = info && info->bilateral &&
                                   (info->expected == ExpectedBehavior::Valid || p.r == 1);
                if (needs_probe && !detail::tail_probe_pass(built.lhs, p.r)) return false;
                if (built.rhs.is_pole()) return false;
                (void)policy;
                return true;
            }
        } else {
            // matrix pair: build both sides and probe one entry each
            auto f = matrix_entry(case_id_ == "crmi_printed" ? "crmi_printed" : case_id_,
                                  MatrixRole::F, p, ws);
            auto g = matrix_entry(case_id_ == "crmi_printed" ? "crmi_printed" : case_id_,
                                  MatrixRole::G, p, ws);
            MultiIndex probe(static_cast<std::size_t>(p.r), 1);
            MultiIndex zero(static_cast<std::size_t>(p.r), 0);
            (void)(f.constant * f.core(probe, zero));
            (void)g.core(probe, zero);
            if (!f.constant.is_finite()) return false;
        }
        return detail::guards_pass(ws, kProximityEps, kGuardRange);
    } catch (const std::exception&) {
        return false;
    }
}

inline ParamSet ParamSampler::identity_params(const ConvergencePolicy& policy) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ParamSet p = draw_candidate();
        if (admit(p, &policy)) return p;
    }
    throw std::runtime_error("sample_params: exhausted attempts for " + case_id_ +
                             "; tightest constraint is the pole-proximity guard");
}

inline ParamSet ParamSampler::pair_params() {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ParamSet p = draw_candidate();
        if (admit(p, nullptr)) return p;
    }
    throw std::runtime_error("sample_params: exhausted attempts for " + case_id_ +
                             "; tightest constraint is the pole-proximity guard");
}

/// Spec-facing convenience: deterministic ParamSet for a case id.
inline ParamSet sample_params(const std::string& id, int r, std::uint64_t seed,
                              const ConvergencePolicy& policy = ConvergencePolicy{}) {
    ParamSampler sampler(id, r, seed);
    bool is_identity = false;
    for (const auto& e : identity_registry()) is_identity |= e.id == id;
    return is_identity ? sampler.identity_params(policy) : sampler.pair_params();
}

}  // namespace qident
