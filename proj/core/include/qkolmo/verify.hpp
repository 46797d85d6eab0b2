// Seeded randomized invariant suites shared by the CLI verify-suite verb and
// the test binaries. Every suite is deterministic given the seed.
#pragma once

#include "qkolmo/qtm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qkolmo {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string details;
};

struct VerifyConfig {
    std::uint64_t seed = 1;
    int trials = 1000;
    Caps caps;
    std::vector<std::string> machine_files;  // extra machines to validate
};

VerifyConfig parse_verify_config(const std::string& text);

std::vector<SuiteResult> run_verify_suites(const VerifyConfig& config);

// Individual bound-lemma suites (trials each, zero violations beyond 1e-10).
SuiteResult suite_norm_inequality(std::uint64_t seed, int trials);
SuiteResult suite_pure_trace_distance(std::uint64_t seed, int trials);
SuiteResult suite_isometry_composition(std::uint64_t seed, int trials);
SuiteResult suite_halting_matrix_element(std::uint64_t seed, int trials);
SuiteResult suite_halting_superposition(std::uint64_t seed, int trials);
SuiteResult suite_almost_orthogonality(std::uint64_t seed, int trials);
SuiteResult suite_chi_nonnegative(std::uint64_t seed, int trials);
SuiteResult suite_chi_monotone(std::uint64_t seed, int trials);
SuiteResult suite_gram_schmidt(std::uint64_t seed, int trials);
SuiteResult suite_blind_coding(std::uint64_t seed, int trials);
SuiteResult suite_compression_roundtrip(std::uint64_t seed, int trials);
SuiteResult suite_machine_validation(const VerifyConfig& config);
SuiteResult suite_norm_preservation(std::uint64_t seed, int trials);
SuiteResult suite_source_consistency(std::uint64_t seed, int trials);

}  // namespace qkolmo
