#include <doctest.h>

#include "qkolmo/linalg.hpp"
#include "qkolmo/numeric.hpp"

#include <cmath>
#include <random>

using namespace qkolmo;

namespace {

CVec vec2(long a, long b) {
    CVec v(2);
    v[0] = CRat(Rational(a));
    v[1] = CRat(Rational(b));
    return v;
}

}  // namespace

TEST_CASE("rational parsing stays exact") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-6/8") == Rational(-3, 4));
    CHECK(parse_rational("5") == Rational(5));
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
    CHECK(floor_log2(Rational(5)) == 2);
    CHECK(floor_log2(Rational(1)) == 0);
    CHECK(floor_log2(Rational(1, 3)) == -2);
}

TEST_CASE("complex rational literals round trip") {
    CRat z = parse_crat("1/2+0/1i");
    CHECK(z.re == Rational(1, 2));
    CHECK(z.im == Rational(0));
    CRat w = parse_crat("0/1-1/2i");
    CHECK(w.im == Rational(-1, 2));
    CHECK(parse_crat(crat_str(w)) == w);
    CHECK(parse_crat("-3/4") == CRat(Rational(-3, 4)));
}

TEST_CASE("gram_schmidt worked examples") {
    // {(1,1),(1,0)} -> {dir (1,1) nsq 2; dir (1/2,-1/2) nsq 1/2}
    auto out = gram_schmidt({vec2(1, 1), vec2(1, 0)});
    REQUIRE(out.size() == 2);
    CHECK(out[0].direction == vec2(1, 1));
    CHECK(out[0].norm_sq == Rational(2));
    CHECK(out[1].direction[0] == CRat(Rational(1, 2)));
    CHECK(out[1].direction[1] == CRat(Rational(-1, 2)));
    CHECK(out[1].norm_sq == Rational(1, 2));

    // already orthonormal stays unchanged
    auto ortho = gram_schmidt({vec2(1, 0), vec2(0, 1)});
    REQUIRE(ortho.size() == 2);
    CHECK(ortho[0].norm_sq == Rational(1));
    CHECK(ortho[1].norm_sq == Rational(1));

    // dependent vector dropped
    auto dropped = gram_schmidt({vec2(1, 0), vec2(2, 0)});
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].direction == vec2(1, 0));
}

TEST_CASE("rank and membership worked examples") {
    CHECK(rank_and_membership({vec2(1, 0)}, vec2(2, 0)) == std::make_pair(1, true));
    CHECK(rank_and_membership({vec2(1, 0)}, vec2(0, 1)) == std::make_pair(1, false));
    CHECK(rank_and_membership({vec2(1, 1), vec2(1, -1)}, vec2(3, 5)) == std::make_pair(2, true));
    CHECK_THROWS_AS(rank_and_membership({vec2(1, 0)}, CVec(3)), std::invalid_argument);
}

TEST_CASE("kernel basis solves the constraints") {
    // x + y = 0 over C^2
    CVec row(2);
    row[0] = CRat(Rational(1));
    row[1] = CRat(Rational(1));
    auto kernel = kernel_basis({row}, 2);
    REQUIRE(kernel.size() == 1);
    CHECK(inner_product(row, kernel[0]).is_zero());
}

TEST_CASE("approx_to_digits accuracy contract") {
    CVec one(1);
    one[0] = CRat(Rational(1));
    auto exact = approx_to_digits(one, 8);
    CHECK(exact[0] == std::complex<double>(1.0, 0.0));

    CVec third(1);
    third[0] = CRat(Rational(1, 3));
    auto x = approx_to_digits(third, 4);
    CHECK(std::abs(x[0].real() - 1.0 / 3.0) < 1.0 / 16.0);

    CVec seventh(1);
    seventh[0] = CRat(Rational(1, 7));
    // long-division oracle for 1/7 to 30 digits
    double oracle = 0.0;
    long rem = 1;
    for (int digit = 1; digit <= 30; ++digit) {
        rem *= 2;
        if (rem >= 7) {
            oracle += std::pow(2.0, -digit);
            rem -= 7;
        }
    }
    auto y = approx_to_digits(seventh, 20);
    CHECK(std::abs(y[0].real() - oracle) < std::pow(2.0, -20));
}

TEST_CASE("trace distance basics") {
    FMat a(2, 2), b(2, 2);
    a.at(0, 0) = 1.0;
    b.at(1, 1) = 1.0;
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));

    // pure states with overlap 1/sqrt2 -> sqrt2/2
    std::vector<std::complex<double>> psi = {1.0, 0.0};
    double inv = 1.0 / std::sqrt(2.0);
    std::vector<std::complex<double>> phi = {inv, inv};
    double d = trace_distance(FMat::outer(psi, psi), FMat::outer(phi, phi));
    CHECK(d == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(pure_state_trace_distance(psi, phi) == doctest::Approx(d).epsilon(1e-12));

    FMat bad(2, 2);
    bad.at(0, 1) = 1.0;
    CHECK_THROWS_AS(trace_distance(bad, a), std::invalid_argument);
}

TEST_CASE("canonical scaling yields integer directions") {
    CVec v(2);
    v[0] = CRat(Rational(1, 2));
    v[1] = CRat(Rational(1, 2));
    ScaledUnitVector u(v);
    ScaledUnitVector c = canonical_scaled(u);
    CHECK(c.direction == vec2(1, 1));
    CHECK(c.norm_sq == Rational(2));
}

TEST_CASE("exact PSD check") {
    CMat ok(2, 2);
    ok.at(0, 0) = CRat(Rational(1, 2));
    ok.at(1, 1) = CRat(Rational(1, 2));
    ok.at(0, 1) = CRat(Rational(1, 4));
    ok.at(1, 0) = CRat(Rational(1, 4));
    CHECK(is_psd_exact(ok));

    CMat bad = ok;
    bad.at(0, 1) = CRat(Rational(3, 4));
    bad.at(1, 0) = CRat(Rational(3, 4));
    CHECK_FALSE(is_psd_exact(bad));

    CMat zero_diag(2, 2);
    zero_diag.at(0, 1) = CRat(Rational(1));
    zero_diag.at(1, 0) = CRat(Rational(1));
    CHECK_FALSE(is_psd_exact(zero_diag));
}

TEST_CASE("subspace dump format") {
    auto out = gram_schmidt({vec2(1, 1)});
    // round trip through the dump format happens in the halting tests; here we
    // just pin the inner-product invariants on random instances
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CVec> vecs;
        std::size_t dim = 2 + (rng() % 3);
        for (int i = 0; i < 3; ++i) {
            CVec v(dim);
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = CRat(Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 4)),
                            Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 4)));
            vecs.push_back(std::move(v));
        }
        auto gs = gram_schmidt(vecs);
        for (std::size_t i = 0; i < gs.size(); ++i)
            for (std::size_t j = i + 1; j < gs.size(); ++j)
                CHECK(inner_product(gs[i].direction, gs[j].direction).is_zero());
    }
    CHECK(out.size() == 1);
}
