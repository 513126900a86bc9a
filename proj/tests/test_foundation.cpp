#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qident/qpochhammer.hpp"

using namespace qident;

namespace {

Rational rat(long n, long d) { return Rational(n, d); }

// Independent reference: straight product loop, no tail bound, run far past
// the target accuracy. Used to pin down the infinite-product oracles.
BigFloat reference_qpoch_inf(const Rational& a, const Rational& q, int factors) {
    BigFloat prod(1);
    BigFloat af(a), qf(q);
    for (int j = 0; j < factors; ++j) {
        prod *= (1 - af);
        af *= qf;
    }
    return prod;
}

struct RatGen {
    std::mt19937_64 rng;
    explicit RatGen(std::uint64_t seed) : rng(seed) {}
    Rational operator()(bool allow_negative = true) {
        std::uniform_int_distribution<long> num(1, 40);
        std::uniform_int_distribution<long> den(2, 40);
        std::uniform_int_distribution<int> sign(0, 1);
        Rational v(num(rng), den(rng));
        if (allow_negative && sign(rng)) v = -v;
        return v;
    }
    long int_in(long lo, long hi) {
        std::uniform_int_distribution<long> d(lo, hi);
        return d(rng);
    }
};

}  // namespace

TEST_CASE("qpoch at nonnegative index") {
    auto ctx = make_context<Rational>(rat(1, 2));
    CHECK(qpoch(ctx, rat(3, 10), 0).value == 1);
    CHECK(qpoch(ctx, rat(3, 10), 1).value == rat(7, 10));
    // factor 1 - a q^2 vanishes for a = q^{-2}
    auto z = qpoch(ctx, Rational(4), 3);
    CHECK(z.is_zero());
}

TEST_CASE("qpoch at negative index: reflection and poles") {
    auto ctx = make_context<Rational>(rat(1, 2));
    auto v = qpoch(ctx, rat(1, 4), -1);
    REQUIRE(v.is_finite());
    CHECK(v.value == 2);
    CHECK(qpoch(ctx, rat(1, 2), -1).is_pole());  // 1 - a/q = 0
}

TEST_CASE("qpoch_multi") {
    auto ctx = make_context<Rational>(rat(1, 2));
    CHECK(qpoch_multi(ctx, {}, 5).value == 1);
    CHECK(qpoch_multi(ctx, {rat(3, 10), rat(1, 5)}, 1).value == rat(14, 25));
    CHECK(qpoch_multi(ctx, {rat(1, 4), rat(1, 2)}, -1).is_pole());
}

TEST_CASE("qpoch_inf basics and frozen oracle") {
    set_float_precision(50);
    auto ctx = make_context<BigFloat>(rat(1, 2), 1e-30);
    CHECK(qpoch_inf(ctx, Rational(0)).value == 1);
    CHECK(qpoch_inf(ctx, Rational(1)).is_zero());
    CHECK(qpoch_inf(ctx, rat(1, 4) * 4).is_zero());  // a = 1 = q^0

    auto v = qpoch_inf_tol(ctx, rat(1, 2), BigFloat(1e-25));
    REQUIRE(v.is_finite());
    BigFloat ref = reference_qpoch_inf(rat(1, 2), rat(1, 2), 200);
    CHECK(boost::multiprecision::abs(v.value - ref) < 1e-25);
    // frozen leading digits
    CHECK(boost::multiprecision::abs(v.value - BigFloat("0.2887880950866024")) < 1e-15);
}

TEST_CASE("qpoch_inf rejects exact-rational mode") {
    auto ctx = make_context<Rational>(rat(1, 2));
    CHECK_THROWS_AS((void)qpoch_inf(ctx, rat(1, 3)), std::domain_error);
}

TEST_CASE("qpoch_ratio finite index") {
    auto ctx = make_context<Rational>(rat(1, 2));
    // identical entries cancel before evaluation, even on a pole site
    auto one = qpoch_ratio(ctx, {rat(1, 2)}, {rat(1, 2)}, -1);
    REQUIRE(one.is_finite());
    CHECK(one.value == 1);
    auto z = qpoch_ratio(ctx, {rat_pow(rat(1, 2), -3)}, {}, 5);
    CHECK(z.is_zero());  // (q^{-3})_5 contains 1 - q^{-3} q^3
}

TEST_CASE("qpoch_ratio at infinity with shift cancellation") {
    set_float_precision(50);
    auto ctx = make_context<BigFloat>(rat(1, 2), 1e-25);
    // (1/2)_inf / (1/4)_inf = (1/2)_1 = 1/2 exactly, since 1/2 = (1/4) q^{-1}.
    auto v = qpoch_ratio_inf(ctx, {rat(1, 2)}, {rat(1, 4)});
    REQUIRE(v.is_finite());
    CHECK(v.value == BigFloat(0.5));
    // the denominator product itself, against the independent reference
    auto den = qpoch_inf_tol(ctx, rat(1, 4), BigFloat(1e-25));
    BigFloat ref = reference_qpoch_inf(rat(1, 4), rat(1, 2), 200);
    CHECK(boost::multiprecision::abs(den.value - ref) < 1e-25);

    // shift cancellation keeps exact-rational mode usable when everything
    // terminates: (a)_inf/(a q^3)_inf = (a)_3
    auto ctxr = make_context<Rational>(rat(1, 2));
    Rational a = rat(2, 5);
    auto fin = qpoch_ratio_inf(ctxr, {a}, {a * rat_pow(rat(1, 2), 3)});
    REQUIRE(fin.is_finite());
    CHECK(fin.value == qpoch(ctxr, a, 3).value);
}

TEST_CASE("recurrence and splitting properties, exact mode") {
    // 10000 randomized checks: (a)_{k+1} = (a)_k (1-aq^k) and
    // (a)_{k+m} = (a)_k (aq^k)_m wherever no pole occurs.
    RatGen gen(20260808);
    long checked = 0;
    while (checked < 10000) {
        Rational q = rat(gen.int_in(1, 9), 10 + gen.int_in(0, 30));
        auto ctx = make_context<Rational>(q);
        Rational a = gen();
        long k = gen.int_in(-6, 6);
        long m = gen.int_in(-6, 6);

        auto pk = qpoch(ctx, a, k);
        auto pk1 = qpoch(ctx, a, k + 1);
        if (pk.is_finite() && pk1.is_finite()) {
            CHECK(pk1.value == pk.value * (1 - a * rat_pow(q, k)));
            ++checked;
        }
        auto pkm = qpoch(ctx, a, k + m);
        auto shift = qpoch(ctx, a * rat_pow(q, k), m);
        if (pkm.is_finite() && pk.is_finite() && shift.is_finite()) {
            CHECK(pkm.value == pk.value * shift.value);
            ++checked;
        }
    }
}

TEST_CASE("infinite split within twice the tail tolerance") {
    set_float_precision(50);
    BigFloat tol(1e-25);
    auto ctx = make_context<BigFloat>(rat(3, 10), 1e-25);
    for (long k = -3; k <= 3; ++k) {
        Rational a = rat(2, 7);
        auto whole = qpoch_inf_tol(ctx, a, tol);
        auto head = qpoch(ctx, a, k);
        REQUIRE(whole.is_finite());
        REQUIRE(head.is_finite());
        // (a)_k scales the tail's error, so the tail side is evaluated to a
        // matching accuracy; the identity then holds within 2*tol.
        BigFloat scale = boost::multiprecision::abs(head.value);
        if (scale < 1) scale = 1;
        auto tail = qpoch_inf_tol(ctx, a * rat_pow(rat(3, 10), k), BigFloat(tol / scale));
        REQUIRE(tail.is_finite());
        CHECK(boost::multiprecision::abs(whole.value - head.value * tail.value) < 2 * tol);
    }
}

TEST_CASE("mode agreement: BigFloat(50) vs exact rational") {
    set_float_precision(50);
    RatGen gen(777);
    auto ctxq = make_context<Rational>(rat(2, 7));
    auto ctxf = make_context<BigFloat>(rat(2, 7), 1e-40);
    for (int i = 0; i < 200; ++i) {
        Rational a = gen();
        long k = gen.int_in(-8, 8);
        auto vr = qpoch(ctxq, a, k);
        auto vf = qpoch(ctxf, a, k);
        REQUIRE(vr.kind == vf.kind);
        if (!vr.is_finite()) continue;
        BigFloat exact(vr.value);
        BigFloat rel = boost::multiprecision::abs(vf.value - exact);
        if (exact != 0) rel /= boost::multiprecision::abs(exact);
        CHECK(rel < 1e-45);
    }
}

TEST_CASE("exact zero detection needs no epsilon in rational mode") {
    auto ctx = make_context<Rational>(rat(3, 11));
    for (long m = 0; m <= 5; ++m) {
        Rational a = rat_pow(rat(3, 11), -m);
        CHECK(qpoch(ctx, a, m + 1).is_zero());
        CHECK(qpoch(ctx, a, m).is_finite());
    }
    // near misses stay finite
    Rational almost = rat_pow(rat(3, 11), -2) + rat(1, 1000000000L);
    CHECK(qpoch(ctx, almost, 5).is_finite());
}

TEST_CASE("QBase lattice probing") {
    QBase qb(rat(2, 7));
    CHECK(qb.exponent_of(rat(2, 7)) == 1);
    CHECK(qb.exponent_of(rat_pow(rat(2, 7), -4)) == -4);
    CHECK(qb.exponent_of(Rational(1)) == 0);
    CHECK(!qb.exponent_of(rat(1, 3)).has_value());
    CHECK(!qb.exponent_of(rat(-2, 7)).has_value());
    CHECK(qb.near_lattice(rat(2, 7) + rat(1, 100000000L), 1e-6, 10));
    CHECK(!qb.near_lattice(rat(2, 7), 1e-6, 10));  // exact, not "near"
    CHECK(!qb.near_lattice(rat(1, 3), 1e-6, 10));
}

TEST_CASE("pochhammer ladder cache matches one-off evaluation") {
    set_float_precision(50);
    Workspace<BigFloat> ws(rat(1, 3), 1e-25);
    RatGen gen(99);
    for (int i = 0; i < 50; ++i) {
        Rational a = gen();
        long k = gen.int_in(-20, 20);
        auto cached = ws.cache.at(a, k);
        auto direct = qpoch(ws.ctx, a, k);
        REQUIRE(cached.kind == direct.kind);
        if (cached.is_finite())
            CHECK(boost::multiprecision::abs(cached.value - direct.value) < 1e-40);
    }
}

TEST_CASE("TermProduct kind lattice is order independent") {
    Workspace<Rational> ws(rat(1, 2));
    // zero then pole and pole then zero both end as pole
    {
        TermProduct<Rational> t(ws);
        t.zero().pole();
        CHECK(t.done().is_pole());
    }
    {
        TermProduct<Rational> t(ws);
        t.pole().zero();
        CHECK(t.done().is_pole());
    }
    // dividing by a pole contributes a zero
    {
        TermProduct<Rational> t(ws);
        t.value(Rational(7)).dpoch(rat(1, 2), -3);  // (q)_{-3} is a pole
        CHECK(t.done().is_zero());
    }
}
