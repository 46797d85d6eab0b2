// Classical prefix-code machinery (self-delimiting integers, Kraft accounting,
// blind prefix coding) and exact quantum standard compression/decompression.
#pragma once

#include "qkolmo/linalg.hpp"
#include "qkolmo/qtm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qkolmo {

std::string self_delim_encode(long k);
// returns (k, rest); throws on a malformed stream
std::pair<long, std::string> self_delim_decode(const std::string& stream);

bool kraft_check(const std::vector<int>& lengths);
Rational kraft_mass(const std::vector<int>& lengths);

struct PrefixCode {
    std::vector<std::string> codewords;
    Rational consumed_mass = Rational(0);

    bool is_prefix_free() const;
};

// Appends the lexicographically first string of the given length that is
// neither prefix nor extension of any existing codeword. Throws when the
// extension would break the Kraft inequality (no such codeword exists).
PrefixCode blind_prefix_extend(PrefixCode code, int next_len);
PrefixCode blind_prefix_code(const std::vector<int>& lengths);

// Gram-Schmidt of {P_U e_i} over the computational basis order, nulls dropped.
std::vector<ScaledUnitVector> standard_basis(const std::vector<CVec>& span_of_u);

// Compressed coordinates: component i is coeff_i / sqrt(scale_i); the exact
// representation keeps round trips exact.
struct CompressedVec {
    std::vector<CRat> coeffs;
    std::vector<Rational> scales;

    std::size_t dim() const { return coeffs.size(); }
    std::vector<std::complex<double>> to_complex() const;
};

struct CompressionMap {
    std::vector<ScaledUnitVector> basis;  // standard basis of U
    std::size_t source_dim = 0;           // dim H_n
    int qubits = 0;                       // ceil(log2 dim U); 0 for a 1-dim U

    static CompressionMap build(const std::vector<CVec>& span_of_u, std::size_t source_dim);
    std::size_t subspace_dim() const { return basis.size(); }
};

// psi must lie in U exactly.
CompressedVec compress(const CompressionMap& map, const CVec& psi);
// exact inverse: decompress(map, compress(map, psi)) == psi
CVec decompress_exact(const CompressionMap& map, const CompressedVec& chi);
// float path with total error below delta in the euclidean norm
std::vector<std::complex<double>> decompress_float(const CompressionMap& map,
                                                   const std::vector<std::complex<double>>& chi,
                                                   double delta);

// Lexicographic isometric embedding of H_{<=n} into H_{n+1} (n = base length).
QubitString embed_fixed_length(const QubitString& sigma);
QubitString embed_fixed_length_inverse(const QubitString& embedded);

}  // namespace qkolmo
