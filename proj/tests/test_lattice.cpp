#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qident/lattice_sum.hpp"
#include "qident/qseries.hpp"

using namespace qident;

namespace {
Rational rat(long n, long d) { return Rational(n, d); }
}

TEST_CASE("sum_finite: delta summand over a simplex") {
    Summand<Rational> s{2, [](const MultiIndex& k) {
                            bool origin = k[0] == 0 && k[1] == 0;
                            return origin ? TermValue<Rational>::finite(Rational(1))
                                          : TermValue<Rational>::zero();
                        }};
    auto out = sum_finite(s, Support{Simplex{3}});
    CHECK(out.status == SumStatus::Converged);
    CHECK(out.value == 1);
}

TEST_CASE("sum_finite: lattice count of a box") {
    Summand<Rational> s{2, [](const MultiIndex&) { return TermValue<Rational>::finite(Rational(1)); }};
    auto out = sum_finite(s, Support{Box{{1, 2}}});
    CHECK(out.value == 6);
}

TEST_CASE("sum_finite reports pole sites") {
    Summand<Rational> s{1, [](const MultiIndex& k) {
                            return k[0] == 2 ? TermValue<Rational>::pole()
                                             : TermValue<Rational>::finite(Rational(1));
                        }};
    auto out = sum_finite(s, Support{Simplex{4}});
    CHECK(out.status == SumStatus::Inconclusive);
    REQUIRE(out.pole_hit.has_value());
    CHECK((*out.pole_hit)[0] == 2);
    CHECK(out.value == 4);  // the four non-pole terms
}

TEST_CASE("sum_bilateral: geometric series") {
    set_float_precision(50);
    auto zp = std::make_shared<PowTable<BigFloat>>(BigFloat(rat(1, 3)));
    Summand<BigFloat> s{1, [zp](const MultiIndex& k) {
                            if (k[0] < 0) return TermValue<BigFloat>::zero();
                            return TermValue<BigFloat>::finite((*zp)(k[0]));
                        }};
    ConvergencePolicy pol;
    auto out = sum_bilateral(s, pol);
    CHECK(out.status == SumStatus::Converged);
    CHECK(boost::multiprecision::abs(out.value - BigFloat(rat(3, 2))) < 1e-14);
}

TEST_CASE("sum_bilateral: diagonal growth is flagged divergent") {
    set_float_precision(50);
    auto ws = std::make_shared<Workspace<BigFloat>>(rat(1, 2));
    Summand<BigFloat> s{2, [ws](const MultiIndex& k) {
                            if (k[0] != k[1]) return TermValue<BigFloat>::zero();
                            // q^{-e2(k)} on the diagonal grows like 2^{N^2}
                            return TermValue<BigFloat>::finite(ws->ctx.qpow(-elem_sym2(k)));
                        }};
    ConvergencePolicy pol;
    auto out = sum_bilateral(s, pol);
    CHECK(out.status == SumStatus::Divergent);
    CHECK(out.shells_used <= 60);
}

TEST_CASE("sum_bilateral: 6psi6 series against the closed-form products") {
    // Brute-force shell summation of the very-well-poised 6psi6 versus the
    // tail-bounded product side, at b=c=d=e.
    set_float_precision(50);
    auto check_at = [&](const Rational& a, const Rational& q, const Rational& b) {
        auto ws = std::make_shared<Workspace<BigFloat>>(q, 1e-30);
        Rational z = a * a * q / (b * b * b * b);
        REQUIRE(boost::multiprecision::abs(BigFloat(z)) < 1);

        auto zp = std::make_shared<PowTable<BigFloat>>(ws->ctx.from(z));
        Summand<BigFloat> s{1, [=](const MultiIndex& kk) {
                                long k = kk[0];
                                TermProduct<BigFloat> t(*ws);
                                t.vwp(a, 2 * k);
                                for (int i = 0; i < 4; ++i) t.poch(b, k).dpoch(a * q / b, k);
                                t.value((*zp)(k));
                                return t.done();
                            }};
        ConvergencePolicy pol;
        pol.shell_tol = 1e-30;
        auto lhs = sum_bilateral(s, pol);
        REQUIRE(lhs.status == SumStatus::Converged);

        InfProductRatio<BigFloat> rhs(*ws);
        rhs.num({q, a * q, q / a});
        for (int i = 0; i < 6; ++i) rhs.num(a * q / (b * b));  // aq/bc over all parameter pairs
        for (int i = 0; i < 4; ++i) rhs.den(a * q / b).den(q / b);
        rhs.den(z);
        auto rv = rhs.eval();
        CHECK(boost::multiprecision::abs(lhs.value - rv.summable_value()) < 1e-25);
        return rv;
    };
    // a = q^2 puts q/a on the lattice: the product side vanishes exactly and
    // the series indeed sums to zero.
    auto degenerate = check_at(rat(1, 4), rat(1, 2), rat(3, 5));
    CHECK(degenerate.is_zero());
    // generic a
    auto generic = check_at(rat(1, 5), rat(1, 2), rat(3, 5));
    CHECK(generic.is_finite());
}

TEST_CASE("shell partition: window sums equal accumulated shells") {
    set_float_precision(50);
    auto ws = std::make_shared<Workspace<BigFloat>>(rat(1, 3));
    Summand<BigFloat> s{2, [ws](const MultiIndex& k) {
                            long n = std::labs(k[0]) + std::labs(k[1]);
                            return TermValue<BigFloat>::finite(ws->ctx.qpow(n) * (k[0] - 3 * k[1] + 1));
                        }};
    for (long radius : {0L, 1L, 3L, 5L}) {
        auto win = sum_finite(s, Support{Window{radius}});
        BigFloat acc(0);
        for (long n = 0; n <= radius; ++n)
            for_each_on_shell(2, n, [&](const MultiIndex& k) { acc += s(k).value; });
        CHECK(boost::multiprecision::abs(win.value - acc) == 0);
    }
}

TEST_CASE("detect_natural_truncation: terminating factor patterns") {
    set_float_precision(50);
    auto ws = std::make_shared<Workspace<BigFloat>>(rat(1, 2));
    Rational q = rat(1, 2);

    // (q^{-3})_k / (q)_k style: zero below 0 (via 1/(q)_k) and above 3.
    Summand<BigFloat> phi_like{1, [=](const MultiIndex& kk) {
                                   long k = kk[0];
                                   TermProduct<BigFloat> t(*ws);
                                   t.poch(rat_pow(q, -3), k).dpoch(q, k).poch(rat(2, 7), k);
                                   return t.done();
                               }};
    auto sup = detect_natural_truncation(phi_like);
    REQUIRE(sup.has_value());
    REQUIRE(std::holds_alternative<Simplex>(*sup));
    CHECK(std::get<Simplex>(*sup).M == 3);

    // generic bilateral summand: no truncation
    Summand<BigFloat> generic{1, [=](const MultiIndex& kk) {
                                  TermProduct<BigFloat> t(*ws);
                                  t.poch(rat(2, 7), kk[0]).dpoch(rat(3, 11), kk[0]);
                                  t.qpower(std::labs(kk[0]));
                                  return t.done();
                              }};
    CHECK(!detect_natural_truncation(generic).has_value());

    // r=2 box pattern: (q^{-m_i})_{k_i} per axis over 1/(q)_{k_i}
    Summand<BigFloat> box_like{2, [=](const MultiIndex& k) {
                                   TermProduct<BigFloat> t(*ws);
                                   t.poch(rat_pow(q, -2), k[0]).dpoch(q, k[0]);
                                   t.poch(rat_pow(q, -4), k[1]).dpoch(q, k[1]);
                                   return t.done();
                               }};
    auto bsup = detect_natural_truncation(box_like);
    REQUIRE(bsup.has_value());
    REQUIRE(std::holds_alternative<Box>(*bsup));
    CHECK(std::get<Box>(*bsup).m == std::vector<long>{2, 4});

    // r=2 simplex pattern: (q^{-M})_{|k|} over 1/(q)_{k_i}
    Summand<BigFloat> simplex_like{2, [=](const MultiIndex& k) {
                                       TermProduct<BigFloat> t(*ws);
                                       t.poch(rat_pow(q, -3), index_sum(k));
                                       t.dpoch(q, k[0]).dpoch(q, k[1]);
                                       return t.done();
                                   }};
    auto ssup = detect_natural_truncation(simplex_like);
    REQUIRE(ssup.has_value());
    REQUIRE(std::holds_alternative<Simplex>(*ssup));
    CHECK(std::get<Simplex>(*ssup).M == 3);
}

TEST_CASE("compact support: bilateral and finite summation agree") {
    set_float_precision(50);
    auto ws = std::make_shared<Workspace<BigFloat>>(rat(1, 2));
    Rational q = rat(1, 2);
    Summand<BigFloat> s{2, [=](const MultiIndex& k) {
                            TermProduct<BigFloat> t(*ws);
                            t.poch(rat_pow(q, -3), index_sum(k));
                            t.dpoch(q, k[0]).dpoch(q, k[1]);
                            t.poch(rat(2, 5), k[0]).poch(rat(3, 7), k[1]);
                            return t.done();
                        }};
    auto sup = detect_natural_truncation(s);
    REQUIRE(sup.has_value());
    auto fin = sum_finite(s, *sup);
    ConvergencePolicy pol;
    auto bil = sum_bilateral(s, pol);
    REQUIRE(bil.status == SumStatus::Converged);
    CHECK(boost::multiprecision::abs(fin.value - bil.value) < 1e-15);
}

TEST_CASE("monotone refinement: tightening shell_tol never turns converged into divergent") {
    set_float_precision(50);
    auto ws = std::make_shared<Workspace<BigFloat>>(rat(1, 3));
    Summand<BigFloat> decaying{1, [ws](const MultiIndex& k) {
                                   return TermValue<BigFloat>::finite(ws->ctx.qpow(std::labs(k[0])));
                               }};
    for (double tol : {1e-6, 1e-10, 1e-16, 1e-24}) {
        ConvergencePolicy pol;
        pol.shell_tol = tol;
        auto out = sum_bilateral(decaying, pol);
        CHECK(out.status != SumStatus::Divergent);
    }
}

TEST_CASE("policy validation") {
    ConvergencePolicy pol;
    pol.min_shells = 0;
    CHECK_THROWS_AS(pol.validate(), std::invalid_argument);
    pol.min_shells = 10;
    pol.max_shell = 5;
    CHECK_THROWS_AS(pol.validate(), std::invalid_argument);
}
