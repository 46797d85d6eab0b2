// Desk-scale realization of the strongly-universal encode/decode construction:
// halting time sequences, codeword assignment, standard-compressed payloads,
// the host-level decoder, and the counting / complexity bound calculators.
#pragma once

#include "qkolmo/coding.hpp"
#include "qkolmo/halting.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qkolmo {

enum class PipelineMode { exact, approx };

struct HaltingTimeSequence {
    std::uint64_t machine = 0;
    int n = 0;
    Rational eps0 = 0;
    PipelineMode mode = PipelineMode::exact;
    std::vector<std::pair<int, int>> times;  // (t_i, dim_i), strictly increasing t

    std::vector<int> codeword_lengths() const;  // n + 1 - ceil(log2 dim_i)
};

Rational default_eps0(int n);  // 2^{-2n} / 81

HaltingTimeSequence halting_time_sequence(const HaltingAnalyzer& analyzer, int n, const Rational& eps0,
                                          int t_max, PipelineMode mode);

struct UniversalProgram {
    std::string machine_text;  // serialized machine description
    std::string codeword;
    CompressedVec payload;
    int input_length = 0;  // n
    PipelineMode mode = PipelineMode::exact;

    // quantum length of codeword plus payload register; always n + 1
    int quantum_length() const;
    // self-delimited classical description length in bits
    std::size_t description_bits() const;
};

// psi: scaled rational vector over H_n that halts within t_max.
UniversalProgram encode_input(const HaltingAnalyzer& analyzer, const CVec& psi_hn, int n, int t_max,
                              PipelineMode mode);

// Exact decode: recomputes halting spaces, matches the codeword, decompresses
// exactly and simulates; equals apply() on the encoded input.
QubitString decode_program_exact(const UniversalProgram& program, int t_max, const Caps& caps = Caps{});
// Float decode with total trace-distance budget delta (> 0).
QubitString decode_program(const UniversalProgram& program, double delta, int t_max, const Caps& caps = Caps{});

std::string program_to_text(const UniversalProgram& program);
UniversalProgram parse_program_text(const std::string& text);

// log2 #N_delta <= (log2 d + 4 delta log2(1/delta)) / (1 - 4 delta)
double counting_bound(long dim, double delta);

struct Ensemble {
    std::vector<double> weights;
    std::vector<FMat> states;
};

double chi_quantity(const Ensemble& ensemble);

// The diagonal-measurement channel built from an orthonormal system: maps a
// state to its overlap diagonal (plus a rest bucket); chi never increases.
Ensemble diagonal_measurement(const Ensemble& ensemble, const std::vector<std::vector<std::complex<double>>>& ortho);

struct QcSearchConfig {
    int max_len = 6;          // classical candidates up to this length
    int t_max = 64;
    int k_max = 0;            // 0: fixed-delta criterion; else all k <= k_max via encode_pair
    std::vector<QubitString> extra_candidates;  // caller-supplied pure inputs
};

struct QcBound {
    bool found = false;
    int bound = 0;           // least candidate base length when found
    int searched_max_len = 0;
    std::string witness;     // classical witness, or a label for a supplied candidate
};

// Upper bound over the searched set, never a claim about the true complexity.
QcBound qc_upper_bound(const Machine& reference, const QubitString& target, double delta,
                       const QcSearchConfig& config);

struct IncompressibilityReport {
    int count = 0;
    double bound_orthonormal = 0;  // (1-4d) log2 n - 1 - 4d log2(1/d)
    double bound_holevo = 0;       // S(avg) - 4d log2((n+1)/(2d)) - 1
    double max_searched_bound = 0; // +inf when some member exceeded the search
    bool all_found = false;
    bool consistent = false;       // searched upper bounds cannot sit below the theorem bounds
};

IncompressibilityReport incompressibility_audit(const Machine& reference,
                                                const std::vector<QubitString>& orthonormal_set, double delta,
                                                const QcSearchConfig& config);

struct CountingAudit {
    int outputs = 0;
    int family = 0;       // greedy maximal orthonormal delta-covered family
    double log2_family = 0;
    double bound = 0;
    bool within = false;
};

CountingAudit counting_audit(const Machine& toy, int max_len, double delta, int t_max);

}  // namespace qkolmo
