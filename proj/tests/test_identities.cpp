#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qident/verify.hpp"

using namespace qident;

namespace {
Rational rat(long n, long d) { return Rational(n, d); }

ParamSet base_params(int r, Rational q = rat(3, 10)) {
    ParamSet p;
    p.r = r;
    p.q = q;
    p.a = rat(2, 5);
    p.b = rat(3, 5);
    p.c = rat(5, 9);
    p.d = rat(4, 7);
    p.cs = {rat(5, 9), rat(6, 13), rat(3, 8)};
    p.es = {rat(7, 11), rat(8, 13), rat(2, 5)};
    p.xs = {rat(4, 9), rat(7, 8), rat(2, 3)};
    p.cs.resize(static_cast<std::size_t>(r));
    p.es.resize(static_cast<std::size_t>(r));
    p.xs.resize(static_cast<std::size_t>(r));
    return p;
}
}  // namespace

TEST_CASE("structure factors: spec examples") {
    set_float_precision(50);
    ParamSet p = base_params(2, rat(1, 2));
    Workspace<Rational> ws(rat(1, 2));
    // k = 0 -> 1, for all three factor families
    CHECK(ar_factor(ws, p, {0, 0}).value == 1);
    CHECK(cr_factor(ws, p, {0, 0}).value == 1);
    CHECK(dr_factor(ws, p, {0, 0}).value == 1);
    // r = 1: empty products
    ParamSet p1 = base_params(1, rat(1, 2));
    CHECK(ar_factor(ws, p1, {3}).value == 1);
    CHECK(dr_factor(ws, p1, {-2}).value == 1);
    // r = 2 direct value: (x1 q - x2)/(x1 - x2) at x = (1, 1/3), q = 1/2
    ParamSet px = p;
    px.xs = {Rational(1), rat(1, 3)};
    auto v = ar_factor(ws, px, {1, 0});
    REQUIRE(v.is_finite());
    CHECK(v.value == rat(1, 4));
    // r = 1 C-factor reduces to the very-well-poised factor with x1^2
    Rational x1 = p1.xs[0];
    for (long k = -2; k <= 2; ++k) {
        auto cv = cr_factor(ws, p1, {k});
        REQUIRE(cv.is_finite());
        CHECK(cv.value == (1 - x1 * x1 * rat_pow(rat(1, 2), 2 * k)) / (1 - x1 * x1));
    }
}

TEST_CASE("jackson_8phi7: n = 0 gives LHS = RHS = 1, n = 1 matches the hand expansion") {
    Rational q = rat(1, 2), a = rat(1, 3), b = rat(1, 5), c = rat(1, 7), d = rat(1, 11);
    Workspace<Rational> ws(q);
    ParamSet p;
    p.r = 1;
    p.q = q;
    p.a = a;
    p.b = b;
    p.c = c;
    p.d = d;
    p.M = 0;
    auto built0 = build_identity<Rational>("jackson_8phi7", p, ws);
    CHECK(built0.lhs({0}).value == 1);
    CHECK(built0.rhs.value == 1);

    // independent two-term expansion of the n = 1 sum, straight from the
    // displayed series
    p.M = 1;
    auto built = build_identity<Rational>("jackson_8phi7", p, ws);
    Rational A = a * a * q * q / (b * c * d);    // upper a^2 q^{1+n}/(bcd) at n=1
    Rational B = b * c * d / (a * q);            // lower bcd q^{-n}/a
    Rational term1 = (1 - a) * ((1 - a * q * q) / (1 - a)) * (1 - b) * (1 - c) * (1 - d) *
                     (1 - A) * (1 - rat_pow(q, -1)) /
                     ((1 - q) * (1 - a * q / b) * (1 - a * q / c) * (1 - a * q / d) * (1 - B) *
                      (1 - a * q * q)) * q;
    Rational oracle = 1 + term1;
    auto lhs = sum_finite(built.lhs, built.support);
    CHECK(lhs.value == oracle);
    CHECK(built.rhs.value == oracle);
}

TEST_CASE("terminating entries are exact in rational mode at r = 2") {
    Rational q = rat(3, 10);
    Workspace<Rational> ws(q);
    ConvergencePolicy pol;
    for (const char* id : {"milne_ar_8phi7", "schlosser_ar_8phi7", "schlosser_dr_8phi7"}) {
        ParamSet p = base_params(2);
        p.M = 3;
        auto rec = verify_identity<Rational>(id, p, pol, ws, 0.0);
        CHECK(rec.status == RecordStatus::Pass);
    }
    ParamSet p = base_params(2);
    p.ms = {2, 3};
    auto rec = verify_identity<Rational>("dgml_cr_8phi7", p, pol, ws, 0.0);
    CHECK(rec.status == RecordStatus::Pass);
}

TEST_CASE("r = 1 collapse: multidimensional terminating entries reduce to the 8phi7") {
    Rational q = rat(3, 10);
    Workspace<Rational> ws(q);
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<long> kd(0, 3);

    ParamSet p = base_params(1);
    p.M = 3;
    Rational a = p.A(), b = p.B(), c = p.Cc(), d = p.D();
    Rational c1 = p.cs[0], x1 = p.xs[0];

    struct Map {
        const char* id;
        ParamSet inner;   // the multidimensional entry at r = 1
        ParamSet target;  // equivalent jackson_8phi7 parameters
    };
    std::vector<Map> maps;
    {
        Map m{"milne_ar_8phi7", p, {}};
        ParamSet t;
        t.r = 1;
        t.q = q;
        t.a = a * x1;
        t.b = b;
        t.c = c1;
        t.d = d * x1;
        t.M = 3;
        m.target = t;
        maps.push_back(m);
    }
    {
        Map m{"schlosser_ar_8phi7", p, {}};
        ParamSet t;
        t.r = 1;
        t.q = q;
        t.a = a;
        t.b = b / x1;
        t.c = c1;
        t.d = d * x1;
        t.M = 3;
        m.target = t;
        maps.push_back(m);
    }
    {
        ParamSet inner = p;
        inner.M.reset();
        inner.ms = {3};
        Map m{"dgml_cr_8phi7", inner, {}};
        ParamSet t;
        t.r = 1;
        t.q = q;
        t.a = a * x1 * x1;
        t.b = b * x1;
        t.c = c * x1;
        t.d = d * x1;
        t.M = 3;
        m.target = t;
        maps.push_back(m);
    }
    {
        Map m{"schlosser_dr_8phi7", p, {}};
        ParamSet t;
        t.r = 1;
        t.q = q;
        t.a = a * x1;
        t.b = b;
        t.c = c1;
        t.d = c * d * x1 * x1 / c1;
        t.M = 3;
        m.target = t;
        maps.push_back(m);
    }

    for (const auto& m : maps) {
        auto inner = build_identity<Rational>(m.id, m.inner, ws);
        auto target = build_identity<Rational>("jackson_8phi7", m.target, ws);
        for (int i = 0; i < 10; ++i) {
            long k = kd(rng);
            auto vi = inner.lhs({k});
            auto vt = target.lhs({k});
            REQUIRE(vi.kind == vt.kind);
            if (vi.is_finite()) CHECK(vi.value == vt.value);
        }
        REQUIRE(inner.rhs.is_finite());
        CHECK(inner.rhs.value == target.rhs.value);
    }
}

TEST_CASE("r = 1 collapse: bilateral entries reduce to their one-dimensional ancestors") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    Workspace<BigFloat> ws(q, 1e-25);
    ParamSet p = base_params(1);
    Rational a = p.A(), b = p.B(), d = p.D();
    Rational c1 = p.cs[0], e1 = p.es[0], x1 = p.xs[0];
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> kd(-4, 4);

    auto check_pointwise = [&](const char* inner_id, const ParamSet& pi, const char* outer_id,
                               const ParamSet& po, int points) {
        auto inner = build_identity<BigFloat>(inner_id, pi, ws);
        auto outer = build_identity<BigFloat>(outer_id, po, ws);
        for (int i = 0; i < points; ++i) {
            long k = kd(rng);
            auto vi = inner.lhs({k});
            auto vo = outer.lhs({k});
            REQUIRE(vi.kind == vo.kind);
            if (vi.is_finite())
                CHECK(boost::multiprecision::abs(vi.value - vo.value) < 1e-35);
        }
        REQUIRE(inner.rhs.is_finite());
        REQUIRE(outer.rhs.is_finite());
        CHECK(boost::multiprecision::abs(inner.rhs.value - outer.rhs.value) /
                  boost::multiprecision::abs(outer.rhs.value) <
              1e-40);
    };

    {
        ParamSet t;  // gustafson_ar -> bailey(a x1, b, c1, d x1, e1 x1)
        t.r = 1;
        t.q = q;
        t.a = a * x1;
        t.b = b;
        t.c = c1;
        t.d = d * x1;
        t.es = {e1 * x1};
        check_pointwise("gustafson_ar_6psi6", p, "bailey_6psi6", t, 10);
    }
    {
        ParamSet t;  // schlosser_ar -> bailey(a, b/x1, c1, d x1, e1)
        t.r = 1;
        t.q = q;
        t.a = a;
        t.b = b / x1;
        t.c = c1;
        t.d = d * x1;
        t.es = {e1};
        check_pointwise("schlosser_ar_6psi6", p, "bailey_6psi6", t, 10);
    }
    {
        ParamSet t;  // gustafson_cr -> bailey(a x1^2, b x1, c1, d x1, e1 x1^2); 5 sampled k
        t.r = 1;
        t.q = q;
        t.a = a * x1 * x1;
        t.b = b * x1;
        t.c = c1;
        t.d = d * x1;
        t.es = {e1 * x1 * x1};
        check_pointwise("gustafson_cr_6psi6", p, "bailey_6psi6", t, 5);
    }

    ParamSet p8 = p;
    p8.ks = {1};
    p8.M = 2;
    {
        ParamSet t;  // ar_8psi8 -> schlosser_8psi8(a x1, b x1, c1, d)
        t.r = 1;
        t.q = q;
        t.a = a * x1;
        t.b = b * x1;
        t.c = c1;
        t.d = d;
        t.ks = {1};
        t.M = 2;
        check_pointwise("ar_8psi8", p8, "schlosser_8psi8", t, 10);
    }
    {
        ParamSet t;  // arv_8psi8 -> schlosser_8psi8(a, b, c1, d/x1)
        t.r = 1;
        t.q = q;
        t.a = a;
        t.b = b;
        t.c = c1;
        t.d = d / x1;
        t.ks = {1};
        t.M = 2;
        check_pointwise("arv_8psi8", p8, "schlosser_8psi8", t, 10);
    }
    {
        ParamSet t;  // cr_8psi8 -> schlosser_8psi8(a x1^2, b x1, c1, d x1)
        t.r = 1;
        t.q = q;
        t.a = a * x1 * x1;
        t.b = b * x1;
        t.c = c1;
        t.d = d * x1;
        t.ks = {1};
        t.M = 2;
        check_pointwise("cr_8psi8", p8, "schlosser_8psi8", t, 10);
    }
}

TEST_CASE("bilateral verification: spec example tolerances") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-22;
    pol.max_shell = 240;
    Workspace<BigFloat> ws(q, 1e-24);
    ParamSet p = base_params(1);
    p.es = {rat(7, 11)};
    auto rec = verify_identity<BigFloat>("bailey_6psi6", p, pol, ws, 1e-20);
    CHECK(rec.status == RecordStatus::Pass);

    ParamSet p2 = base_params(2);
    p2.ks = {1, -1};
    p2.M = 2;
    auto rec2 = verify_identity<BigFloat>("cr_8psi8", p2, pol, ws, 1e-15);
    CHECK(rec2.status == RecordStatus::Pass);
}

TEST_CASE("documented source-display defects: entries 10 and 13 at r = 2") {
    // Both entries pass at r = 1 and in every specialization exercised by the
    // validated matrix-inverse machinery, but their printed displays fail
    // generic verification at r >= 2 (see the repository notes). These checks
    // pin the r = 1 behaviour.
    set_float_precision(50);
    Rational q = rat(3, 10);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-17;
    pol.max_shell = 240;
    Workspace<BigFloat> ws(q, 1e-19);
    ParamSet p = base_params(1);
    auto r10 = verify_identity<BigFloat>("schlosser_ar_6psi6", p, pol, ws, 1e-15);
    CHECK(r10.status == RecordStatus::Pass);
    ParamSet p13 = base_params(1);
    p13.ks = {1};
    p13.M = 2;
    auto r13 = verify_identity<BigFloat>("arv_8psi8", p13, pol, ws, 1e-15);
    CHECK(r13.status == RecordStatus::Pass);
}

TEST_CASE("natural truncation fires on the lattice specializations") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    Workspace<BigFloat> ws(q, 1e-20);
    // entry 3 with c = q^{-k} at the series' own shift integer
    ParamSet p = base_params(1);
    p.c = rat_pow(q, -2);
    p.ks = {2};
    p.M = 2;
    auto built = build_identity<BigFloat>("schlosser_8psi8", p, ws);
    auto sup = detect_natural_truncation(built.lhs);
    REQUIRE(sup.has_value());
    CHECK(is_finite_support(*sup));
    // entries 12 and 14 with c_i = q^{-k_i}
    for (const char* id : {"ar_8psi8", "cr_8psi8"}) {
        ParamSet p2 = base_params(2);
        p2.ks = {1, 2};
        p2.M = 2;
        p2.cs = {rat_pow(q, -1), rat_pow(q, -2)};
        auto b2 = build_identity<BigFloat>(id, p2, ws);
        auto s2 = detect_natural_truncation(b2.lhs);
        REQUIRE(s2.has_value());
        CHECK(is_finite_support(*s2));
    }
}

TEST_CASE("symmetry: entries 5 and 9 are invariant under (c_i, x_i) pair permutation") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-18;
    pol.max_shell = 240;

    ParamSet p = base_params(2);
    p.M = 3;
    ParamSet swapped = p;
    std::swap(swapped.cs[0], swapped.cs[1]);
    std::swap(swapped.xs[0], swapped.xs[1]);
    std::swap(swapped.es[0], swapped.es[1]);

    Workspace<Rational> wr(q);
    auto a1 = verify_identity<Rational>("milne_ar_8phi7", p, pol, wr, 0.0);
    auto a2 = verify_identity<Rational>("milne_ar_8phi7", swapped, pol, wr, 0.0);
    CHECK(a1.status == RecordStatus::Pass);
    CHECK(a2.status == RecordStatus::Pass);

    Workspace<BigFloat> wf(q, 1e-20);
    auto b1 = verify_identity<BigFloat>("gustafson_ar_6psi6", p, pol, wf, 1e-15);
    auto b2 = verify_identity<BigFloat>("gustafson_ar_6psi6", swapped, pol, wf, 1e-15);
    CHECK(b1.status == RecordStatus::Pass);
    CHECK(b2.status == RecordStatus::Pass);
    CHECK(b1.rhs == b2.rhs);
}

TEST_CASE("appendix series: valid at r = 1, divergent at r = 2, exact when terminating") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-17;
    pol.max_shell = 60;
    Workspace<BigFloat> ws(q, 1e-19);

    ParamSet p1 = base_params(1);
    auto rec1 = verify_identity<BigFloat>("dr_6psi6_false", p1, pol, ws, 1e-15);
    CHECK(rec1.status == RecordStatus::Pass);

    ParamSet p2 = base_params(2);
    auto rec2 = verify_identity<BigFloat>("dr_6psi6_false", p2, pol, ws, 1e-15);
    CHECK(rec2.status == RecordStatus::Divergent);
    CHECK(rec2.shells_used <= 60);

    // Terminating specialization c_i = a, e_i = q^{-m_i}: both sides evaluate
    // exactly, truncation detection fires, and the comparison runs; as
    // printed, the displayed closed form misses the exact sum by ~1% at
    // r = 2 (a source-display defect recorded in the repository notes, like
    // the ones proven for the C_r/D_r inverse and the related A_r displays).
    // The acceptance suite reports this sub-check honestly.
    ParamSet pb = base_params(2);
    pb.cs = {pb.A(), pb.A()};
    pb.es = {rat_pow(q, -2), rat_pow(q, -3)};
    Workspace<Rational> wr(q);
    auto rec3 = verify_identity<Rational>("dr_6psi6_false", pb, pol, wr, 0.0);
    CHECK(rec3.status != RecordStatus::Inconclusive);
    CHECK(rec3.status != RecordStatus::Divergent);
}

TEST_CASE("degenerations: truncation chains are exact, M sweeps approach the limit") {
    ParamSet base = base_params(1);
    auto t1 = degeneration_trunc_8psi8_to_jackson(base, 2, 3);
    CHECK(t1.passed);

    ParamSet base2 = base_params(2);
    base2.ks = {1, 2};
    base2.M = 2;
    auto t2 = degeneration_trunc_ar_finite(base2);
    CHECK(t2.passed);

    set_float_precision(50);
    ParamSet lim = base_params(1);
    lim.b = rat(4, 5);  // keeps |aq/bd| well inside the limit identity's region
    auto s1 = degeneration_limit_8psi8_to_bailey(lim, 1);
    CHECK(s1.passed);
    REQUIRE(s1.residuals.size() == 3);
}
