#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qident/qseries.hpp"

using namespace qident;

namespace {
Rational rat(long n, long d) { return Rational(n, d); }

// 8phi7 spec of the terminating balanced very-well-poised summation, with
// a = sa^2 so the square roots are rational.
SeriesSpec jackson_spec(const Rational& sa, const Rational& b, const Rational& c, const Rational& d,
                        long n, const Rational& q) {
    Rational a = sa * sa;
    SeriesSpec s;
    s.q = q;
    s.z = q;
    s.kind = SeriesKind::Unilateral;
    s.upper = {a,
               q * sa,
               -q * sa,
               b,
               c,
               d,
               a * a * rat_pow(q, 1 + n) / (b * c * d),
               rat_pow(q, -n)};
    s.lower = {sa,
               -sa,
               a * q / b,
               a * q / c,
               a * q / d,
               b * c * d * rat_pow(q, -n) / a,
               a * rat_pow(q, 1 + n)};
    return s;
}

SeriesSpec bailey_spec(const Rational& sa, const Rational& b, const Rational& c, const Rational& d,
                       const Rational& e, const Rational& q) {
    Rational a = sa * sa;
    SeriesSpec s;
    s.q = q;
    s.z = a * a * q / (b * c * d * e);
    s.kind = SeriesKind::Bilateral;
    s.upper = {q * sa, -q * sa, b, c, d, e};
    s.lower = {sa, -sa, a * q / b, a * q / c, a * q / d, a * q / e};
    return s;
}
}  // namespace

TEST_CASE("classify: structural examples") {
    Rational q = rat(1, 2);
    auto jackson = jackson_spec(rat(1, 3), rat(2, 5), rat(3, 7), rat(4, 9), 2, q);
    auto cls = classify(jackson);
    CHECK(cls.count(SeriesClass::Balanced));
    CHECK(cls.count(SeriesClass::WellPoised));
    CHECK(cls.count(SeriesClass::VeryWellPoised));

    auto bailey = bailey_spec(rat(1, 3), rat(2, 5), rat(3, 7), rat(4, 9), rat(5, 11), q);
    auto cls2 = classify(bailey);
    CHECK(!cls2.count(SeriesClass::Balanced));
    CHECK(cls2.count(SeriesClass::WellPoised));
    CHECK(cls2.count(SeriesClass::VeryWellPoised));

    SeriesSpec generic;  // 2phi1
    generic.q = q;
    generic.z = rat(1, 3);
    generic.upper = {rat(2, 5), rat(3, 7)};
    generic.lower = {rat(4, 9)};
    CHECK(classify(generic).empty());
}

TEST_CASE("classify is invariant under permutations of the parameter lists") {
    Rational q = rat(1, 2);
    auto spec = jackson_spec(rat(1, 3), rat(2, 5), rat(3, 7), rat(4, 9), 2, q);
    auto base = classify(spec);
    std::reverse(spec.upper.begin(), spec.upper.end());
    std::swap(spec.lower[0], spec.lower[3]);
    CHECK(classify(spec) == base);
}

TEST_CASE("very-well-poised factor emerges from the classifier-positive pair") {
    set_float_precision(50);
    Rational q = rat(2, 7), sa = rat(3, 5);
    Rational a = sa * sa;
    auto ctx = make_context<Rational>(q);
    for (long k = -4; k <= 4; ++k) {
        auto num = qpoch_multi(ctx, {q * sa, -q * sa}, k);
        auto den = qpoch_multi(ctx, {sa, -sa}, k);
        REQUIRE(num.is_finite());
        REQUIRE(den.is_finite());
        CHECK(num.value / den.value == (1 - a * rat_pow(q, 2 * k)) / (1 - a));
    }
}

TEST_CASE("eval_phi: all-upper-one series collapses to the k=0 term") {
    set_float_precision(50);
    Workspace<BigFloat> ws(rat(1, 3));
    SeriesSpec s;
    s.q = rat(1, 3);
    s.z = rat(1, 5);
    s.upper = {Rational(1), rat(2, 5)};
    s.lower = {rat(3, 7)};
    ConvergencePolicy pol;
    auto out = eval_phi(ws, s, pol);
    CHECK(out.status == SumStatus::Converged);
    CHECK(boost::multiprecision::abs(out.value - 1) < 1e-30);
}

TEST_CASE("eval_phi: q-binomial cross check, series versus products") {
    set_float_precision(50);
    Workspace<BigFloat> ws(rat(1, 2), 1e-30);
    Rational a = rat(1, 4), z = rat(1, 3), q = rat(1, 2);
    SeriesSpec s;
    s.q = q;
    s.z = z;
    s.upper = {a};
    s.lower = {};
    ConvergencePolicy pol;
    pol.shell_tol = 1e-25;
    auto lhs = eval_phi(ws, s, pol);
    REQUIRE(lhs.status == SumStatus::Converged);
    auto rhs = qpoch_ratio_inf(ws.ctx, {a * z}, {z});
    REQUIRE(rhs.is_finite());
    CHECK(boost::multiprecision::abs(lhs.value - rhs.value) < 1e-22);
}

TEST_CASE("terminating eval_phi equals eval_psi on the zero-extended spec") {
    set_float_precision(50);
    Workspace<BigFloat> ws(rat(2, 7));
    auto spec = jackson_spec(rat(1, 3), rat(2, 5), rat(3, 7), rat(4, 9), 2, rat(2, 7));
    ConvergencePolicy pol;
    auto phi = eval_phi(ws, spec, pol);
    // identical parameter lists, declared bilateral with the implicit (q)_k
    // made explicit
    SeriesSpec psi = spec;
    psi.kind = SeriesKind::Bilateral;
    psi.lower.push_back(spec.q);  // the implicit (q)_k, made explicit
    auto zext = eval_psi(ws, psi, pol);
    REQUIRE(phi.status == SumStatus::Converged);
    REQUIRE(zext.status == SumStatus::Converged);
    CHECK(boost::multiprecision::abs(phi.value - zext.value) < 1e-30);
}

TEST_CASE("eval_psi sums the very-well-poised bilateral series to its product form") {
    set_float_precision(50);
    Workspace<BigFloat> ws(rat(1, 2), 1e-25);
    Rational q = rat(1, 2), sa = rat(3, 5), b = rat(4, 5), c = rat(3, 5), d = rat(5, 7),
             e = rat(2, 3);
    Rational a = sa * sa;
    auto spec = bailey_spec(sa, b, c, d, e, q);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-20;
    pol.max_shell = 200;
    auto lhs = eval_psi(ws, spec, pol);
    REQUIRE(lhs.status == SumStatus::Converged);
    InfProductRatio<BigFloat> rhs(ws);
    rhs.num({q, a * q, q / a, a * q / (b * c), a * q / (b * d), a * q / (b * e), a * q / (c * d),
             a * q / (c * e), a * q / (d * e)});
    rhs.den({a * q / b, a * q / c, a * q / d, a * q / e, q / b, q / c, q / d, q / e, spec.z});
    auto rv = rhs.eval();
    REQUIRE(rv.is_finite());
    BigFloat scale = boost::multiprecision::abs(rv.value);
    CHECK(boost::multiprecision::abs(lhs.value - rv.value) / scale < 1e-17);
}

TEST_CASE("eval_psi reroutes naturally truncated series to exact summation") {
    Workspace<Rational> ws(rat(1, 2));
    // bilateral spec with upper q^{-3} and lower q: support {0..3}
    SeriesSpec s;
    s.q = rat(1, 2);
    s.z = rat(1, 3);
    s.kind = SeriesKind::Bilateral;
    s.upper = {rat_pow(rat(1, 2), -3), rat(2, 5)};
    s.lower = {rat(1, 2), rat(3, 7)};
    ConvergencePolicy pol;
    auto out = eval_psi(ws, s, pol);
    CHECK(out.status == SumStatus::Converged);
    // brute force over the finite support
    Summand<Rational> raw = series_summand(ws, s);
    Rational direct(0);
    for (long k = 0; k <= 3; ++k) direct += raw({k}).summable_value();
    CHECK(out.value == direct);
}

TEST_CASE("8psi8 transformation: both sides agree and the specialized coefficient vanishes") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    Workspace<BigFloat> ws(q, 1e-20);
    Rational a = rat(3, 4), b = rat(3, 5), c = rat(5, 9), d = rat(4, 7), e = rat(7, 11),
             f = rat(2, 3), g = rat(5, 8);
    ConvergencePolicy pol;
    pol.shell_tol = 1e-17;
    auto sides = transform_8psi8_sides(ws, a, b, c, d, e, f, g, pol);
    REQUIRE(sides.lhs.status == SumStatus::Converged);
    REQUIRE(sides.rhs_ok);
    BigFloat scale = boost::multiprecision::abs(sides.rhs.value);
    if (scale < 1) scale = 1;
    CHECK(boost::multiprecision::abs(sides.lhs.value - sides.rhs.value) / scale < 1e-15);

    // d -> d q^k, e -> a q^{-k}/b, f -> a q^{1+M}/b, g -> a q^{-M}/d: the
    // first series' coefficient carries (q^{-M})_inf and must vanish exactly.
    long k = 1, M = 2;
    Rational d2 = d * rat_pow(q, k);
    auto special = transform_8psi8_sides(ws, a, b, c, d2, a * rat_pow(q, -k) / b,
                                         a * rat_pow(q, 1 + M) / b, a * rat_pow(q, -M) / d2, pol);
    CHECK(special.coeff_b.is_zero());
    REQUIRE(special.lhs.status == SumStatus::Converged);
    REQUIRE(special.rhs_ok);
    BigFloat s2 = boost::multiprecision::abs(special.rhs.value);
    if (s2 < 1) s2 = 1;
    CHECK(boost::multiprecision::abs(special.lhs.value - special.rhs.value) / s2 < 1e-15);
}

TEST_CASE("8psi8 transformation: g -> aq/f collapses both sides onto the 6psi6 value") {
    set_float_precision(50);
    Rational q = rat(3, 10);
    Workspace<BigFloat> ws(q, 1e-22);
    Rational a = rat(9, 16), b = rat(3, 5), c = rat(5, 9), d = rat(4, 7), e = rat(7, 11),
             f = rat(2, 3);
    Rational g = a * q / f;
    ConvergencePolicy pol;
    pol.shell_tol = 1e-18;
    pol.max_shell = 400;
    auto sides = transform_8psi8_sides(ws, a, b, c, d, e, f, g, pol);
    REQUIRE(sides.lhs.status == SumStatus::Converged);
    REQUIRE(sides.rhs_ok);

    // independent evaluation of the reduced series: the (f, g) pair cancels
    // against its lower partners, leaving the very-well-poised 6psi6.
    Rational z6 = a * a * q / (b * c * d * e);
    auto zp = std::make_shared<PowTable<BigFloat>>(ws.ctx.from(z6));
    Workspace<BigFloat>* w = &ws;
    Summand<BigFloat> psi6{1, [=](const MultiIndex& kk) {
                               long kv = kk[0];
                               TermProduct<BigFloat> t(*w);
                               t.vwp(a, 2 * kv);
                               for (const Rational& u : {b, c, d, e}) t.poch(u, kv).dpoch(a * q / u, kv);
                               t.value((*zp)(kv));
                               return t.done();
                           }};
    auto ref = sum_bilateral(psi6, pol);
    REQUIRE(ref.status == SumStatus::Converged);
    BigFloat scale = boost::multiprecision::abs(ref.value);
    if (scale < 1) scale = 1;
    CHECK(boost::multiprecision::abs(sides.lhs.value - ref.value) / scale < 1e-15);
    CHECK(boost::multiprecision::abs(sides.rhs.value - ref.value) / scale < 1e-15);
}
