// Built-in machines and generators: the identity mover, a never-halting
// machine, a coin machine with 1/sqrt(2) amplitudes, seeded random reversible
// machines (optionally with a rational unitary mixed in), and a reversible
// parameter-stripping machine that maps <k, sigma> to sigma.
#pragma once

#include "qkolmo/qtm.hpp"

#include <cstdint>

namespace qkolmo {

// Fills a partial deterministic (amplitude-one) table to a total injective one.
// Existing rules are kept; new rules are unreachable filler.
QtmSpec complete_reversible(QtmSpec partial);

// Moves the input track to the output track, halts on the first blank.
QtmSpec identity_machine();

// Shifts right forever; the declared final state is never entered.
QtmSpec non_halting_machine();

// Two distinct sources map onto one successor; fails validate_unitarity.
QtmSpec colliding_machine();

// Two-state machine with a (1/sqrt2, -i/sqrt2) branch pair; radicand 2.
QtmSpec coin_machine();

// Seeded random reversible machine with `extra_states` working states besides
// q0/qf. With `mix_rotation`, one source pair is blended by the rational
// rotation (3/5, 4/5). Always passes validate_unitarity by construction.
QtmSpec random_reversible_machine(std::uint64_t seed, int extra_states, bool mix_rotation);

// Reversible machine computing sigma from <k, sigma> for k in [1, 2^(max_ones+1)).
QtmSpec param_strip_machine(int max_ones = 3);

// Halts at t = 2 on inputs starting with 0 and at t = 3 on inputs starting
// with 1 (the empty input never halts); two halting times per input length.
QtmSpec two_phase_machine();

// Moves exactly `len` input bits to the output track and halts at len + 1;
// every other input length runs forever. Its domain is prefix-free.
QtmSpec fixed_length_halting_machine(int len);

}  // namespace qkolmo
