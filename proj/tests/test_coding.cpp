#include <doctest.h>

#include "qkolmo/coding.hpp"
#include "qkolmo/machines.hpp"

#include <cmath>
#include <random>

using namespace qkolmo;

TEST_CASE("self-delimiting integers") {
    CHECK(self_delim_encode(1) == "01");
    CHECK(self_delim_encode(2) == "1010");
    CHECK(self_delim_decode("01").first == 1);
    CHECK(self_delim_decode("1010").first == 2);
    auto [five, rest] = self_delim_decode("110101xyz");
    CHECK(five == 5);
    CHECK(rest == "xyz");
    CHECK_THROWS_AS(self_delim_decode("11"), std::invalid_argument);
    CHECK_THROWS_AS(self_delim_decode("10"), std::invalid_argument);
    for (long k = 1; k <= 200; ++k) {
        auto [back, tail] = self_delim_decode(self_delim_encode(k));
        CHECK(back == k);
        CHECK(tail.empty());
        CHECK(self_delim_encode(k).size() == 2 * static_cast<std::size_t>(std::log2(k)) + 2);
    }
}

TEST_CASE("kraft accounting") {
    CHECK(kraft_check({1, 2, 2}));
    CHECK(kraft_mass({1, 2, 2}) == Rational(1));
    CHECK_FALSE(kraft_check({1, 1, 1}));
    CHECK(kraft_mass({1, 1, 1}) == Rational(3, 2));
    CHECK(kraft_check({}));
}

TEST_CASE("blind prefix coding follows the rule") {
    PrefixCode code = blind_prefix_extend({}, 1);
    CHECK(code.codewords == std::vector<std::string>{"0"});

    PrefixCode with00;
    with00.codewords = {"00"};
    with00.consumed_mass = Rational(1, 4);
    CHECK(blind_prefix_extend(with00, 1).codewords.back() == "1");

    PrefixCode zero;
    zero.codewords = {"0"};
    zero.consumed_mass = Rational(1, 2);
    PrefixCode two = blind_prefix_extend(zero, 2);
    CHECK(two.codewords.back() == "10");
    CHECK(blind_prefix_extend(two, 2).codewords.back() == "11");

    PrefixCode worked = blind_prefix_code({1, 2, 2});
    CHECK(worked.codewords == std::vector<std::string>{"0", "10", "11"});
    CHECK(worked.consumed_mass == Rational(1));
    CHECK_THROWS_AS(blind_prefix_extend(worked, 3), std::domain_error);
}

TEST_CASE("standard basis examples") {
    // U = span{|00>, |01>} keeps the computational vectors
    std::vector<CVec> u01 = {CVec::basis(4, 0), CVec::basis(4, 1)};
    auto basis = standard_basis(u01);
    REQUIRE(basis.size() == 2);
    CHECK(basis[0].direction == CVec::basis(4, 0));
    CHECK(basis[1].direction == CVec::basis(4, 1));

    // U = H_n gives the computational basis
    std::vector<CVec> full;
    for (std::size_t i = 0; i < 4; ++i) full.push_back(CVec::basis(4, i));
    auto all = standard_basis(full);
    REQUIRE(all.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(all[i].direction == CVec::basis(4, i));

    // U = span{(1,1)}: single vector dir (1,1), nsq 2
    CVec plus(2);
    plus[0] = CRat(Rational(1));
    plus[1] = CRat(Rational(1));
    auto line = standard_basis({plus});
    REQUIRE(line.size() == 1);
    CHECK(line[0].direction == plus);
    CHECK(line[0].norm_sq == Rational(2));
}

TEST_CASE("compression round trips exactly") {
    std::vector<CVec> u01 = {CVec::basis(4, 0), CVec::basis(4, 1)};
    CompressionMap map = CompressionMap::build(u01, 4);
    CHECK(map.qubits == 1);

    CVec psi = CVec::basis(4, 1);  // |01>
    CompressedVec chi = compress(map, psi);
    REQUIRE(chi.dim() == 2);
    CHECK(chi.coeffs[0].is_zero());
    CHECK_FALSE(chi.coeffs[1].is_zero());
    CHECK(decompress_exact(map, chi) == psi);

    // membership is checked exactly
    CHECK_THROWS_AS(compress(map, CVec::basis(4, 2)), std::invalid_argument);

    // U = H_1: identity
    std::vector<CVec> h1 = {CVec::basis(2, 0), CVec::basis(2, 1)};
    CompressionMap identity = CompressionMap::build(h1, 2);
    CVec any(2);
    any[0] = CRat(Rational(2, 3), Rational(1, 5));
    any[1] = CRat(Rational(-1, 2));
    CHECK(decompress_exact(identity, compress(identity, any)) == any);

    // one-dimensional U compresses to the empty register
    CVec gen(4);
    gen[0] = CRat(Rational(1));
    gen[3] = CRat(Rational(2));
    CompressionMap line = CompressionMap::build({gen}, 4);
    CHECK(line.qubits == 0);
    CompressedVec tiny = compress(line, gen);
    REQUIRE(tiny.dim() == 1);
    CHECK(decompress_exact(line, tiny) == gen);
}

TEST_CASE("compression is an exact isometry") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t dim = 4;
        std::vector<CVec> span;
        for (int i = 0; i < 2; ++i) {
            CVec v(dim);
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = CRat(Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3)),
                            Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3)));
            span.push_back(std::move(v));
        }
        auto ortho = gram_schmidt(span);
        if (ortho.empty()) continue;
        CompressionMap map = CompressionMap::build(span, dim);
        auto member = [&](long seed1, long seed2) {
            CVec psi(dim);
            long s = seed1;
            for (const auto& u : ortho) {
                CRat c(Rational(s % 5 - 2), Rational(seed2 % 3 - 1));
                psi += CRat(c.re / u.norm_sq, c.im / u.norm_sq) * u.direction;
                s = s * 7 + seed2;
            }
            return psi;
        };
        CVec a = member(static_cast<long>(rng() % 100), static_cast<long>(rng() % 100));
        CVec b = member(static_cast<long>(rng() % 100), static_cast<long>(rng() % 100));
        CompressedVec ca = compress(map, a), cb = compress(map, b);
        // <Ca, Cb> in the scaled representation: sum conj(ca_i) cb_i / scale_i
        CRat lhs;
        for (std::size_t i = 0; i < ca.dim(); ++i) {
            CRat term = ca.coeffs[i].conj() * cb.coeffs[i];
            lhs += CRat(term.re / ca.scales[i], term.im / ca.scales[i]);
        }
        CHECK(lhs == inner_product(a, b));
    }
}

TEST_CASE("fixed-length embedding") {
    QubitString lambda;
    QubitString embedded = embed_fixed_length(lambda);
    CHECK(embedded.max_len() == 1);
    CHECK(embedded == QubitString::classical("0"));

    CVec v(ragged_dim(2));
    v[string_index("0")] = CRat(Rational(1));
    v[string_index("11")] = CRat(Rational(1));
    QubitString super = QubitString::pure_from_scaled(v, 2);
    QubitString emb = embed_fixed_length(super);
    CHECK(emb.max_len() == 3);
    // ragged indices 1 and 6 map to the 2nd and 7th computational vectors of H_3
    const SMat& m = emb.exact();
    CHECK(m.at(string_index("001"), string_index("001")).re == Rational(1, 2));
    CHECK(m.at(string_index("110"), string_index("110")).re == Rational(1, 2));
    CHECK_FALSE(m.at(string_index("001"), string_index("110")).is_zero());

    CHECK(embed_fixed_length_inverse(emb) == super);

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        int n = static_cast<int>(rng() % 4);
        CVec w(ragged_dim(n));
        bool any = false;
        for (std::size_t i = 0; i < w.dim(); ++i) {
            long re = static_cast<long>(rng() % 5) - 2;
            if (re != 0) any = true;
            w[i] = CRat(Rational(re));
        }
        if (!any) continue;
        QubitString sigma = QubitString::pure_from_scaled(w, n);
        CHECK(embed_fixed_length_inverse(embed_fixed_length(sigma)) == sigma);
    }

    // inverse rejects support outside the embedded range
    QubitString outside = QubitString::classical("1");
    CHECK_THROWS_AS(embed_fixed_length_inverse(outside), std::domain_error);
}

TEST_CASE("float decompression stays within budget") {
    std::vector<CVec> u01 = {CVec::basis(4, 0), CVec::basis(4, 1)};
    CompressionMap map = CompressionMap::build(u01, 4);
    CVec psi(4);
    psi[0] = CRat(Rational(3, 5));
    psi[1] = CRat(Rational(4, 5));
    CompressedVec chi = compress(map, psi);
    for (double delta : {1e-3, 1e-6}) {
        auto approx = decompress_float(map, chi.to_complex(), delta);
        auto exact = psi.to_complex();
        double err = 0;
        for (std::size_t i = 0; i < approx.size(); ++i) err += std::norm(approx[i] - exact[i]);
        CHECK(std::sqrt(err) <= delta);
    }
}
