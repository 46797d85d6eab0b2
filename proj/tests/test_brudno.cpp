#include <doctest.h>

#include "qkolmo/brudno.hpp"

#include <cmath>
#include <random>

using namespace qkolmo;

TEST_CASE("local densities") {
    SourceModel mixed = SourceModel::make_iid_diag(0.5);
    FMat two = local_density(mixed, 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(two.at(i, i).real() == doctest::Approx(0.25));

    SourceModel skew = SourceModel::make_iid_diag(0.9);
    FMat d2 = local_density(skew, 2);
    CHECK(d2.at(0, 0).real() == doctest::Approx(0.81));
    CHECK(d2.at(1, 1).real() == doctest::Approx(0.09));
    CHECK(d2.at(2, 2).real() == doctest::Approx(0.09));
    CHECK(d2.at(3, 3).real() == doctest::Approx(0.01));

    SourceModel frozen = SourceModel::make_markov({1, 0, 0, 1});
    FMat f2 = local_density(frozen, 2);
    CHECK(f2.at(0, 0).real() == doctest::Approx(0.5));
    CHECK(f2.at(3, 3).real() == doctest::Approx(0.5));
    CHECK(f2.at(1, 1).real() == doctest::Approx(0.0));
    CHECK(f2.at(2, 2).real() == doctest::Approx(0.0));
}

TEST_CASE("consistency under partial trace") {
    for (const SourceModel& source :
         {SourceModel::make_iid_diag(0.7), SourceModel::make_markov({0.9, 0.1, 0.2, 0.8})}) {
        for (int n = 1; n <= 4; ++n) {
            FMat big = local_density(source, n + 1);
            FMat small = local_density(source, n);
            for (std::size_t r = 0; r < small.rows(); ++r)
                for (std::size_t c = 0; c < small.cols(); ++c) {
                    std::complex<double> traced = big.at(2 * r, 2 * c) + big.at(2 * r + 1, 2 * c + 1);
                    CHECK(std::abs(traced - small.at(r, c)) < 1e-12);
                }
        }
    }
}

TEST_CASE("entropy rates") {
    FMat pure(2, 2);
    pure.at(0, 0) = 1.0;
    CHECK(entropy_rate(SourceModel::make_iid(pure)) == doctest::Approx(0.0));
    CHECK(entropy_rate(SourceModel::make_iid_diag(0.5)) == doctest::Approx(1.0));
    // binary entropy oracle
    double h = -0.9 * std::log2(0.9) - 0.1 * std::log2(0.1);
    CHECK(entropy_rate(SourceModel::make_iid_diag(0.9)) == doctest::Approx(h).epsilon(1e-9));
    CHECK(h == doctest::Approx(0.46900).epsilon(1e-4));

    // markov entropy rate
    SourceModel chain = SourceModel::make_markov({0.9, 0.1, 0.2, 0.8});
    double expect = chain.stationary[0] * binary_entropy(0.9) + chain.stationary[1] * binary_entropy(0.8);
    CHECK(entropy_rate(chain) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("beta_min greedy projector") {
    FMat pure(2, 2);
    pure.at(0, 0) = 1.0;
    TypicalProjector trivial = beta_min(SourceModel::make_iid(pure), 4, 0.1);
    CHECK(trivial.rank == 1);
    CHECK(trivial.log_trace == doctest::Approx(0.0));

    TypicalProjector uniform = beta_min(SourceModel::make_iid_diag(0.5), 2, 0.1);
    CHECK(uniform.rank == 4);
    CHECK(uniform.log_trace == doctest::Approx(2.0));

    TypicalProjector skew = beta_min(SourceModel::make_iid_diag(0.9), 2, 0.1);
    CHECK(skew.rank == 2);
    CHECK(skew.mass == doctest::Approx(0.90));
    CHECK(skew.log_trace == doctest::Approx(1.0));

    CHECK_THROWS_AS(beta_min(SourceModel::make_iid_diag(0.5), 2, 0.0), std::invalid_argument);
}

TEST_CASE("symmetric subspace dimensions with rank cross-check") {
    CHECK(symmetric_subspace_dim(1, 1) == 4);
    CHECK(symmetric_subspace_dim(1, 2) == 10);
    CHECK(symmetric_subspace_dim(1, 3) == 20);
    CHECK(symmetric_spanning_rank(1, 1) == 4);
    CHECK(symmetric_spanning_rank(1, 2) == 10);
    CHECK(symmetric_spanning_rank(1, 3) == 20);
}

TEST_CASE("universal typical projector") {
    // all codewords span everything
    std::vector<std::string> all;
    for (int v = 0; v < 4; ++v) all.push_back({char('0' + (v >> 1)), char('0' + (v & 1))});
    UniversalProjectorResult full = universal_typical_projector(all, 1, 2, 2);
    CHECK(full.rank == 4);

    // single codeword 00: the span is the symmetric subspace image of |00>,
    // dim span{A tensor A |00>} = dim SYM^2(C^2) = 3 by direct enumeration
    {
        // independent oracle: rank of {v tensor v} over a spanning sample
        std::vector<CVec> sample;
        for (auto [a, b] : {std::pair<long, long>{1, 0}, {0, 1}, {1, 1}, {1, -1}}) {
            CVec v(4);
            v[0] = CRat(Rational(a * a));
            v[1] = CRat(Rational(a * b));
            v[2] = CRat(Rational(b * a));
            v[3] = CRat(Rational(b * b));
            sample.push_back(std::move(v));
        }
        CHECK(exact_rank(sample) == 3);
    }
    UniversalProjectorResult single = universal_typical_projector({"00"}, 1, 2, 2);
    CHECK(single.span_rank == 3);
    CHECK(single.rank == 3);
    CHECK(single.within_bound);

    UniversalProjectorResult pair = universal_typical_projector({"00", "01"}, 1, 2, 2);
    CHECK(pair.rank >= 4);
    CHECK(pair.rank <= 10);
    CHECK(pair.rank == 4);  // the two spans already fill H_2
    CHECK(pair.within_bound);

    // padding multiplies the rank by the free-qubit dimension
    UniversalProjectorResult padded = universal_typical_projector({"00"}, 1, 2, 3);
    CHECK(padded.rank == 6);
    CHECK(static_cast<std::size_t>(padded.basis.size()) == 6);

    CHECK_THROWS_AS(universal_typical_projector({"00", "00"}, 1, 2, 2), std::invalid_argument);
}

TEST_CASE("rotated products stay inside the universal projector range") {
    UniversalProjectorResult single = universal_typical_projector({"00"}, 1, 2, 2);
    std::vector<CVec> range;
    for (const auto& u : single.basis) range.push_back(u.direction);
    // rational unitary (3/5, 4/5) on each factor: U tensor U |00> must stay inside
    CVec rotated(4);
    // (3/5 |0> + 4/5 |1>) tensor (3/5 |0> + 4/5 |1>), scaled by 25
    rotated[0] = CRat(Rational(9));
    rotated[1] = CRat(Rational(12));
    rotated[2] = CRat(Rational(12));
    rotated[3] = CRat(Rational(16));
    CHECK(rank_and_membership(range, rotated).second);

    // a vector outside the symmetric subspace is not in the range
    CVec anti(4);
    anti[1] = CRat(Rational(1));
    anti[2] = CRat(Rational(-1));
    CHECK_FALSE(rank_and_membership(range, anti).second);
}

TEST_CASE("block length sandwich") {
    CHECK(block_length_lm(8) == 1);
    CHECK(block_length_lm(127) == 1);
    CHECK(block_length_lm(128) == 2);
    CHECK(block_length_lm(2048) == 2);
    CHECK_THROWS_AS(block_length_lm(7), std::invalid_argument);
    // uniqueness: scan a range and confirm exactly one power of two qualifies
    for (long m = 8; m <= 40000; m = m * 3 / 2 + 1) {
        int found = 0;
        for (long l = 1; l <= 64; l *= 2) {
            long double lower = static_cast<long double>(l) * std::pow(2.0L, 3.0L * l);
            long double upper = 2.0L * l * std::pow(2.0L, 6.0L * l);
            if (lower <= m && m < upper) ++found;
        }
        CHECK(found == 1);
        CHECK(block_length_lm(m) >= 1);
    }
}

TEST_CASE("empirical typical codewords") {
    // R >= l keeps every string (up to the cap)
    auto all = empirical_typical_codewords(1, 3, 1.0);
    CHECK(all.size() == 8);

    auto frozen = empirical_typical_codewords(1, 4, 0.1);
    CHECK(frozen == std::vector<std::string>{"0000", "1111"});

    // H(1/4) = 0.811 <= 0.9 < H(2/4) = 1: weights 0, 1, 3, 4 survive
    auto skew = empirical_typical_codewords(1, 4, 0.9);
    CHECK(skew.size() == 10);
    for (const auto& w : skew) {
        int ones = 0;
        for (char c : w) ones += c == '1';
        CHECK(ones != 2);
    }
}

TEST_CASE("brudno report trend for diag(0.9, 0.1)") {
    SourceModel source = SourceModel::make_iid_diag(0.9);
    auto rows = brudno_report(source, {4, 8, 12, 16}, 0.1);
    REQUIRE(rows.size() == 4);
    double s = entropy_rate(source);
    CHECK(rows[3].gap <= 0.15);
    CHECK(rows[3].gap <= rows[0].gap);
    CHECK(rows[3].beta_over_n == doctest::Approx(rows[3].beta / 16));
    CHECK(rows[0].entropy == doctest::Approx(s));

    std::string tsv = brudno_report_tsv(rows);
    CHECK(tsv.find("n\tbeta\tbeta/n\ts\tgap") == 0);
}

TEST_CASE("subadditivity of the local entropies") {
    for (const SourceModel& source :
         {SourceModel::make_iid_diag(0.8), SourceModel::make_markov({0.7, 0.3, 0.4, 0.6})}) {
        for (int n = 1; n <= 3; ++n)
            for (int m = 1; m <= 3; ++m) {
                double snm = von_neumann_entropy(local_density(source, n + m));
                double sn = von_neumann_entropy(local_density(source, n));
                double sm = von_neumann_entropy(local_density(source, m));
                CHECK(snm <= sn + sm + 1e-9);
            }
    }
}

TEST_CASE("source files round trip") {
    SourceModel iid = SourceModel::make_iid_diag(0.9);
    SourceModel back = parse_source_text(serialize_source(iid));
    CHECK(back.kind == SourceModel::Kind::iid);
    CHECK(back.rho.at(0, 0).real() == doctest::Approx(0.9));

    SourceModel markov = SourceModel::make_markov({0.9, 0.1, 0.2, 0.8});
    SourceModel mback = parse_source_text(serialize_source(markov));
    CHECK(mback.kind == SourceModel::Kind::markov_diag);
    CHECK(mback.transition[0] == doctest::Approx(0.9));
    CHECK(mback.stationary[0] == doctest::Approx(markov.stationary[0]));

    CHECK_THROWS_AS(parse_source_text("kind: other\n"), std::invalid_argument);
}
