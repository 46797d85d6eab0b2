// Machine-spec file format: line-oriented text.
//   #! comment
//   states: q0 q1 qf
//   initial: q0
//   final: qf
//   q0 0# -> q1 #0 R 1/2+0/1i ; q1 #0 L 0/1-1/2i
//   q0 1# -> qf #1 R 1/1+0/1i normsq: 2/1
// Amplitudes are a/b+c/di. A rule group's optional normsq s divides every
// listed amplitude by sqrt(s).
#pragma once

#include "qkolmo/qtm.hpp"

#include <iosfwd>
#include <string>

namespace qkolmo {

QtmSpec parse_machine(std::istream& in);
QtmSpec parse_machine_text(const std::string& text);
QtmSpec load_machine_file(const std::string& path);

// Canonical serialization; parse(serialize(spec)) == spec.
std::string serialize_machine(const QtmSpec& spec);

std::uint64_t machine_hash(const QtmSpec& spec);

std::string sym_pair_str(std::uint8_t cell);
std::uint8_t parse_sym_pair(const std::string& s);

}  // namespace qkolmo
