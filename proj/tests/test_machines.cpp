#include <doctest.h>

#include "qkolmo/machines.hpp"
#include "qkolmo/qtm_io.hpp"

using namespace qkolmo;

TEST_CASE("builtin machines validate") {
    CHECK(Machine(identity_machine()).validate_unitarity(8, 3));
    CHECK(Machine(coin_machine()).validate_unitarity(6, 2));
    CHECK(Machine(non_halting_machine()).validate_unitarity(8, 2));
    CHECK(Machine(fixed_length_halting_machine(2)).validate_unitarity(8, 3));
    CHECK_FALSE(Machine(colliding_machine()).validate_unitarity(4, 1));
}

TEST_CASE("random reversible machines validate across seeds") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        CAPTURE(seed);
        CHECK(Machine(random_reversible_machine(seed, 1, seed % 2 == 0)).validate_unitarity(6, 2));
        CHECK(Machine(random_reversible_machine(seed, 0, false)).validate_unitarity(6, 2));
    }
}

TEST_CASE("fixed-length machine halts only on its length") {
    Machine machine(fixed_length_halting_machine(2));
    CHECK(machine.halting_time(QubitString::classical("01"), 10) == 3);
    CHECK(machine.halting_time(QubitString::classical("11"), 10) == 3);
    CHECK_FALSE(machine.halting_time(QubitString::classical("0"), 12).has_value());
    CHECK_FALSE(machine.halting_time(QubitString::classical("011"), 12).has_value());
    CHECK_FALSE(machine.halting_time(QubitString::classical(""), 12).has_value());
    auto out = machine.apply(QubitString::classical("10"), 10);
    REQUIRE(out.has_value());
    CHECK(*out == QubitString::classical("10"));
}

TEST_CASE("param-strip machine validates") {
    Machine machine(param_strip_machine());
    CHECK(machine.validate_unitarity(10, 3));
}

TEST_CASE("param-strip computes sigma from <k, sigma>") {
    Machine machine(param_strip_machine());
    for (long k : {1L, 2L, 3L, 5L, 8L, 15L}) {
        for (const std::string& bits : {std::string(""), std::string("0"), std::string("1"), std::string("01"),
                                        std::string("101")}) {
            CAPTURE(k);
            CAPTURE(bits);
            QubitString sigma = QubitString::classical(bits);
            QubitString input = encode_pair(k, sigma);
            auto out = machine.apply(input, 128);
            REQUIRE(out.has_value());
            CHECK(*out == sigma);
        }
    }
}

TEST_CASE("param-strip keeps equal-length superpositions coherent") {
    Machine machine(param_strip_machine());
    CVec v(ragged_dim(2));
    v[string_index("00")] = CRat(Rational(3));
    v[string_index("11")] = CRat(Rational(4));
    QubitString sigma = QubitString::pure_from_scaled(v, 2);
    QubitString input = encode_pair(2, sigma);
    auto out = machine.apply(input, 128);
    REQUIRE(out.has_value());
    CHECK(*out == sigma);
}

TEST_CASE("completion rejects tables without enough free range") {
    QtmSpec bad;
    bad.state_names = {"q0", "qf"};
    bad.initial_state = 0;
    bad.final_state = 1;
    // branching rules consume two range slots per domain slot; eventually the
    // free range cannot host the remaining sources
    for (std::uint8_t s = 0; s < 9; ++s) {
        Transition a, b;
        a.state = 1;
        a.write_in = cell_in(s);
        a.write_out = cell_out(s);
        a.direction = +1;
        a.amplitude = Amp(CRat(Rational(3, 5)));
        b = a;
        b.state = 0;
        b.amplitude = Amp(CRat(Rational(4, 5)));
        bad.rules[{0, s}] = {a, b};
    }
    CHECK_THROWS_AS(complete_reversible(bad), std::invalid_argument);
}

TEST_CASE("serialized fixtures stay stable") {
    // the shipped fixture files are canonical serializations
    CHECK(serialize_machine(identity_machine()) == serialize_machine(parse_machine_text(serialize_machine(identity_machine()))));
}
