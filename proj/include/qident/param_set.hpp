#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qident/numeric.hpp"

namespace qident {

/// Named assignment of the free symbols an identity or matrix pair needs:
/// scalars a..d, vectors c_i, e_i, x_i of length r, the truncation integers
/// M / m_i and the fixed integer shift vector k_i. All values are exact
/// rationals in both numeric modes.
struct ParamSet {
    int r = 1;
    Rational q;
    std::optional<Rational> a, b, c, d;
    std::vector<Rational> cs, es, xs;  // c_i, e_i, x_i
    std::optional<long> M;
    std::vector<long> ms;  // m_i >= 0
    std::vector<long> ks;  // fixed integer vector k_i

    Rational C() const {
        Rational p(1);
        for (const auto& v : cs) p *= v;
        return p;
    }
    Rational E() const {
        Rational p(1);
        for (const auto& v : es) p *= v;
        return p;
    }
    long k_sum() const {
        long s = 0;
        for (long v : ks) s += v;
        return s;
    }
    long m_sum() const {
        long s = 0;
        for (long v : ms) s += v;
        return s;
    }

    const Rational& need(const std::optional<Rational>& v, const char* name) const {
        if (!v) throw std::invalid_argument(std::string("ParamSet: missing scalar ") + name);
        return *v;
    }
    Rational A() const { return need(a, "a"); }
    Rational B() const { return need(b, "b"); }
    Rational Cc() const { return need(c, "c"); }
    Rational D() const { return need(d, "d"); }
    long Mval() const {
        if (!M) throw std::invalid_argument("ParamSet: missing integer M");
        return *M;
    }

    std::string digest() const {
        std::ostringstream os;
        os << "r=" << r << ";q=" << q;
        auto sc = [&](const char* n, const std::optional<Rational>& v) {
            if (v) os << ";" << n << "=" << *v;
        };
        sc("a", a);
        sc("b", b);
        sc("c", c);
        sc("d", d);
        auto vec = [&](const char* n, const std::vector<Rational>& v) {
            if (v.empty()) return;
            os << ";" << n << "=";
            for (const auto& x : v) os << x << ",";
        };
        vec("cs", cs);
        vec("es", es);
        vec("xs", xs);
        if (M) os << ";M=" << *M;
        auto ivec = [&](const char* n, const std::vector<long>& v) {
            if (v.empty()) return;
            os << ";" << n << "=";
            for (long x : v) os << x << ",";
        };
        ivec("ms", ms);
        ivec("ks", ks);

        // FNV-1a over the canonical text.
        std::string s = os.str();
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        std::ostringstream hex;
        hex << std::hex << h;
        return hex.str();
    }
};

}  // namespace qident
