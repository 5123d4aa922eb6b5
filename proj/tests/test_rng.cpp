#include <doctest.h>

#include <cmath>
#include <set>

#include "gradstorm/rng.hpp"

using namespace gradstorm;

// Known-answer vectors of Philox4x32-10 (Random123 distribution, kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::apply(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::apply(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are addressable and reproducible") {
    SampleStream a(42, 7), b(42, 7), c(42, 8), d(43, 7), e(42, 7, 1);
    const double first = a.uniform();
    CHECK(first == b.uniform());
    CHECK(first != c.uniform());
    CHECK(first != d.uniform());
    CHECK(first != e.uniform());
}

TEST_CASE("uniform draws stay in the open unit interval") {
    SampleStream s(1, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal moments") {
    double m1 = 0, m2 = 0, m4 = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        SampleStream s(9, static_cast<std::uint64_t>(i));
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 3.0 / std::sqrt(n));
    CHECK(std::abs(m2 - 1.0) < 3.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 3.0 * std::sqrt(96.0 / n));
}
