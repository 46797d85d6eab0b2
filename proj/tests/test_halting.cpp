#include <doctest.h>

#include "qkolmo/halting.hpp"
#include "qkolmo/machines.hpp"
#include "qkolmo/qtm_io.hpp"

#include <cmath>

using namespace qkolmo;

namespace {

CVec hn(std::initializer_list<long> entries) {
    CVec v(entries.size());
    std::size_t i = 0;
    for (long e : entries) v[i++] = CRat(Rational(e));
    return v;
}

}  // namespace

TEST_CASE("exact halting spaces of the identity machine") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);

    CHECK(analyzer.exact_halting_space(2, 3).dim() == 4);
    CHECK(analyzer.exact_halting_space(2, 2).dim() == 0);
    CHECK(analyzer.exact_halting_space(2, 4).dim() == 0);
    CHECK(analyzer.exact_halting_space(1, 2).dim() == 2);
    CHECK(analyzer.exact_halting_space(0, 1).dim() == 1);

    Machine never(non_halting_machine());
    HaltingAnalyzer nanal(never);
    for (int t = 1; t <= 8; ++t) CHECK(nanal.exact_halting_space(2, t).dim() == 0);
}

TEST_CASE("halting space basis vectors halt at their time") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);
    const HaltingSpace& space = analyzer.exact_halting_space(2, 3);
    for (const auto& u : space.basis) {
        QubitString state = QubitString::pure_from_scaled(hn_to_ragged(u.direction, 2), 2);
        CHECK(machine.halting_time(state, 8) == 3);
    }
}

TEST_CASE("halting spaces are orthogonal with bounded total dimension") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Machine machine(random_reversible_machine(seed, 1, seed % 2 == 0));
        HaltingAnalyzer analyzer(machine);
        for (int n = 0; n <= 2; ++n) {
            long total = 0;
            std::vector<CVec> all;
            for (int t = 1; t <= 12; ++t) {
                const HaltingSpace& space = analyzer.exact_halting_space(n, t);
                total += space.dim();
                for (const auto& u : space.basis) {
                    for (const auto& other : all) CHECK(inner_product(other, u.direction).is_zero());
                    all.push_back(u.direction);
                }
            }
            CHECK(total <= (1L << n));
        }
    }
}

TEST_CASE("eps-t-halting") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);

    QubitString exact_input = QubitString::classical("01");
    CHECK(analyzer.eps_t_halting(exact_input, 3, Rational(0)));
    // tested at t+1 the weight-one time violates the early bound
    CHECK_FALSE(analyzer.eps_t_halting(exact_input, 4, Rational(0)));
    CHECK_FALSE(analyzer.eps_t_halting(exact_input, 4, Rational(1, 10)));

    // mixture (1 - eta) (3-halting) + eta (not halting by 3)
    Rational eta(1, 8);
    QubitString mix = QubitString::mix({{Rational(1) - eta, QubitString::classical("11")},
                                        {eta, QubitString::classical("110")}});
    CHECK(analyzer.eps_t_halting(mix, 3, eta));
    CHECK_FALSE(analyzer.eps_t_halting(mix, 3, eta / 2));
}

TEST_CASE("ball halting test contract") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);

    // exactly halting centre: 1 at its halting time, 0 elsewhere
    CVec zero = hn({1, 0});
    CHECK(analyzer.ball_halting_test(zero, 1, Rational(1, 10), Rational(1, 10), 2) == 1);
    CHECK(analyzer.ball_halting_test(zero, 1, Rational(1, 10), Rational(1, 10), 1) == 0);
    CHECK(analyzer.ball_halting_test(zero, 1, Rational(1, 10), Rational(1, 10), 3) == 0);

    Machine never(non_halting_machine());
    HaltingAnalyzer nanal(never);
    CHECK(nanal.ball_halting_test(zero, 1, Rational(1, 10), Rational(1, 10), 2) == 0);

    // centre norm must sit inside the shell
    CVec big = hn({2, 0});
    CHECK_THROWS_AS(analyzer.ball_halting_test(big, 1, Rational(1, 10), Rational(1, 10), 2),
                    std::invalid_argument);
}

TEST_CASE("interpolating subspace examples") {
    // pos = computational basis of H_1, tilde empty, d = 2: the whole space
    std::vector<CVec> basis = {hn({1, 0}), hn({0, 1})};
    InterpolationResult whole =
        interpolating_subspace({}, basis, 2, Rational(1, 4), Rational(1, 8), Rational(1, 4), Rational(1, 8));
    CHECK(whole.found);
    CHECK(whole.basis.size() == 2);

    // pos = {|0>}, tilde = {|1>}, d = 1: span |0>
    InterpolationResult line = interpolating_subspace({hn({0, 1})}, {hn({1, 0})}, 1, Rational(1, 4),
                                                      Rational(1, 8), Rational(1, 4), Rational(1, 8));
    CHECK(line.found);
    REQUIRE(line.basis.size() == 1);
    CHECK(line.basis[0][1].is_zero());

    // pos = {|0>, |1>}, d = 1: no line is 1/4-close to both
    InterpolationResult none = interpolating_subspace({}, {hn({1, 0}), hn({0, 1})}, 1, Rational(1, 4),
                                                      Rational(1, 8), Rational(1, 4), Rational(1, 8));
    CHECK_FALSE(none.found);
}

TEST_CASE("approximate halting spaces of the identity machine") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);
    Rational delta(1, 100);

    ApproxHaltingSpace at2 = analyzer.approx_halting_space(1, delta, 2);
    CHECK(at2.dim() == 2);
    CHECK(at2.eps <= 18 * delta);
    for (const auto& v : at2.basis) CHECK(analyzer.eps_t_halting_scaled(v, 1, 2, 20 * delta));

    for (int t : {1, 3, 4}) {
        ApproxHaltingSpace other = analyzer.approx_halting_space(1, delta, t);
        CHECK(other.dim() == 0);
    }
}

TEST_CASE("approximate space of a never-halting machine is trivial") {
    Machine never(non_halting_machine());
    HaltingAnalyzer analyzer(never);
    ApproxHaltingSpace space = analyzer.approx_halting_space(1, Rational(1, 50), 3);
    CHECK(space.dim() == 0);
    CHECK(space.eps == Rational(9, 25));
}

TEST_CASE("approximate spaces obey the dimension budget") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);
    // delta below 2^-2n/80: cheap at n = 0, where the cover is one-dimensional
    Rational delta(1, 100);
    long total = 0;
    for (int t = 1; t <= 4; ++t) total += analyzer.approx_halting_space(0, delta, t).dim();
    CHECK(total <= 1);
}

TEST_CASE("prefix domain detection") {
    Machine identity(identity_machine());
    HaltingAnalyzer id_analyzer(identity);
    CHECK_FALSE(id_analyzer.is_prefix_domain(2, 6));

    Machine len2(fixed_length_halting_machine(2));
    HaltingAnalyzer len2_analyzer(len2);
    CHECK(len2_analyzer.is_prefix_domain(3, 8));
}

TEST_CASE("inner-product dimension bound on constructed families") {
    // unit vectors with pairwise overlap below 1/(N-1) are independent
    std::vector<CVec> family;
    std::size_t dim = 4;
    for (std::size_t i = 0; i < dim; ++i) {
        CVec v(dim);
        for (std::size_t j = 0; j < dim; ++j) v[j] = CRat(Rational(j == i ? 40 : 1, 1));
        family.push_back(std::move(v));
    }
    // pairwise |<a,b>| / (|a||b|) is small; exact rank must be full
    CHECK(exact_rank(family) == static_cast<int>(dim));
}

TEST_CASE("subspace dump round trips") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);
    const HaltingSpace& space = analyzer.exact_halting_space(2, 3);
    std::string text = dump_subspace(space.basis);
    auto parsed = parse_subspace(text);
    REQUIRE(parsed.size() == space.basis.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].direction == space.basis[i].direction);
        CHECK(parsed[i].norm_sq == space.basis[i].norm_sq);
    }
}

TEST_CASE("stability bounds on approximate basis vectors") {
    Machine machine(identity_machine());
    HaltingAnalyzer analyzer(machine);
    Rational delta(1, 100);
    ApproxHaltingSpace at2 = analyzer.approx_halting_space(1, delta, 2);
    // every exact halting unit vector sits within 11/2 delta of the approx space
    const HaltingSpace& exact = analyzer.exact_halting_space(1, 2);
    std::vector<ScaledUnitVector> gs = gram_schmidt(at2.basis);
    for (const auto& u : exact.basis) {
        Rational d2 = dist_sq_to_span(gs, u.direction);
        // distance of the scaled vector: compare against (11/2 delta)^2 |u|^2
        CHECK(d2 <= Rational(11, 2) * Rational(11, 2) * delta * delta * u.norm_sq);
    }
}
