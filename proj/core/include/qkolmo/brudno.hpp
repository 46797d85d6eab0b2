// Ergodic source models, entropy rates, minimal typical projectors, the
// symmetric-subspace machinery and the universal typical projector built from
// a classical codeword list.
#pragma once

#include "qkolmo/linalg.hpp"
#include "qkolmo/numeric.hpp"

#include <string>
#include <vector>

namespace qkolmo {

struct SourceModel {
    enum class Kind { iid, markov_diag };
    Kind kind = Kind::iid;
    std::string name;
    FMat rho;                          // 2x2 single-site density (iid)
    std::vector<double> transition;    // 2x2 row-stochastic P (markov), row major
    std::vector<double> stationary;    // pi with pi P = pi

    static SourceModel make_iid(const FMat& rho, std::string name = "iid");
    static SourceModel make_iid_diag(double p0, std::string name = "iid-diag");
    static SourceModel make_markov(const std::vector<double>& p, std::string name = "markov");

    bool is_diagonal() const;
    void validate() const;
};

SourceModel parse_source_text(const std::string& text);
std::string serialize_source(const SourceModel& source);

// Dense local density rho^(n); capped at n <= 10 (matrix is 4^n entries).
FMat local_density(const SourceModel& source, int n);
// Diagonal of rho^(n) for diagonal sources; capped at n <= 16.
std::vector<double> local_diagonal(const SourceModel& source, int n);

// Eigenvalues of rho^(n) with multiplicities, descending, without
// materializing the matrix. (value, multiplicity)
std::vector<std::pair<double, double>> local_spectrum(const SourceModel& source, int n);

double entropy_rate(const SourceModel& source);

struct TypicalProjector {
    int n = 0;
    double rank = 0;
    double log_trace = 0;  // log2 rank
    double mass = 0;
};

// Greedy spectral minimizer: fewest top eigenvalues with mass >= 1 - eps.
TypicalProjector beta_min(const SourceModel& source, int n, double eps);

// C(n + 4^l - 1, 4^l - 1)
long symmetric_subspace_dim(int l, int n);
// exact rank of the symmetrized matrix-unit spanning set; capped at l*n <= 4
long symmetric_spanning_rank(int l, int n);

// Applies the symmetrized matrix-unit basis elements of SYM^n(M_{2^l}) to the
// codeword vectors, filters by exact linear independence, pads to m qubits and
// completes; returns the projector data.
struct UniversalProjectorResult {
    int l = 0, n = 0, m = 0;
    long span_rank = 0;   // step-6 dimension D
    long rank = 0;        // final projector rank D * 2^{m-ln}
    double trace_bound = 0;
    bool within_bound = false;
    std::vector<ScaledUnitVector> basis;  // orthogonal basis of the range (dim 2^m)
};

UniversalProjectorResult universal_typical_projector(const std::vector<std::string>& codewords, int l, int n,
                                                     int m);

// Integer vectors A_k |omega> for the symmetrized matrix units; exact.
std::vector<CVec> symmetric_span_vectors(const std::string& omega, int l, int n);

// The unique power of two l with l 2^{3l} <= m < 2 l 2^{6l}; m >= 8.
int block_length_lm(long m);

// All strings in ({0,1}^l)^n with empirical per-block entropy <= rate, capped
// at 2^{ceil(rate n)} in lexicographic order.
std::vector<std::string> empirical_typical_codewords(int l, int n, double rate);

struct BrudnoRow {
    int n = 0;
    double beta = 0;
    double beta_over_n = 0;
    double entropy = 0;
    double gap = 0;
};

std::vector<BrudnoRow> brudno_report(const SourceModel& source, const std::vector<int>& sizes, double eps);
std::string brudno_report_tsv(const std::vector<BrudnoRow>& rows);

}  // namespace qkolmo
