// Quantum Turing machine model: two-track tape, exact amplitudes in Q(i,sqrt(d)),
// sparse configuration-space evolution, strict halting detection, the fixed
// reading operation, and indeterminate-length qubit strings.
#pragma once

#include "qkolmo/linalg.hpp"
#include "qkolmo/numeric.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace qkolmo {

// Track symbols. A tape cell carries one symbol per track, packed as in*3+out.
inline constexpr std::uint8_t kSym0 = 0;
inline constexpr std::uint8_t kSym1 = 1;
inline constexpr std::uint8_t kBlank = 2;
inline constexpr std::uint8_t kBlankPair = kBlank * 3 + kBlank;

inline std::uint8_t pack_cell(std::uint8_t in, std::uint8_t out) { return static_cast<std::uint8_t>(in * 3 + out); }
inline std::uint8_t cell_in(std::uint8_t cell) { return static_cast<std::uint8_t>(cell / 3); }
inline std::uint8_t cell_out(std::uint8_t cell) { return static_cast<std::uint8_t>(cell % 3); }

// Element of Q(i) + Q(i)*sqrt(d); the radicand d is machine-level context.
struct Amp {
    CRat rat;
    CRat irr;

    Amp() = default;
    Amp(CRat r) : rat(std::move(r)) {}
    Amp(CRat r, CRat i) : rat(std::move(r)), irr(std::move(i)) {}

    bool is_zero() const { return rat.is_zero() && irr.is_zero(); }
    bool is_rational() const { return irr.is_zero(); }
    Amp conj() const { return Amp(rat.conj(), irr.conj()); }

    Amp& operator+=(const Amp& o) { rat += o.rat; irr += o.irr; return *this; }
    friend Amp operator+(Amp a, const Amp& b) { return a += b; }
    friend Amp operator-(const Amp& a, const Amp& b) { return Amp(a.rat - b.rat, a.irr - b.irr); }
    friend Amp operator-(const Amp& a) { return Amp(-a.rat, -a.irr); }
    friend bool operator==(const Amp& a, const Amp& b) { return a.rat == b.rat && a.irr == b.irr; }
};

Amp amp_mul(const Amp& a, const Amp& b, const Rational& d);
std::complex<double> amp_to_complex(const Amp& a, const Rational& d);
// sign of (a.rat.re + a.irr.re*sqrt(d) - c); a must be real.
int amp_real_cmp(const Amp& a, const Rational& c, const Rational& d);

struct Transition {
    int state = 0;
    std::uint8_t write_in = kBlank;
    std::uint8_t write_out = kBlank;
    int direction = +1;  // -1 left, +1 right
    Amp amplitude;
};

struct QtmSpec {
    std::vector<std::string> state_names;
    int initial_state = 0;
    int final_state = 1;
    Rational radicand = 1;  // d of Q(i,sqrt(d)); 1 means plain rational machine
    // (state, packed cell symbol) -> successor list
    std::map<std::pair<int, std::uint8_t>, std::vector<Transition>> rules;

    int state_count() const { return static_cast<int>(state_names.size()); }
    void check_well_formed() const;  // q0 != qf, known states, nonzero amplitudes
};

// One classical machine configuration with trimmed two-track tape.
struct Config {
    std::int16_t state = 0;
    std::int32_t head = 0;
    std::int32_t origin = 0;           // tape cell index of tape[0]
    std::vector<std::uint8_t> tape;    // packed cells; canonical: no blank-blank ends

    std::uint8_t cell_at(std::int32_t pos) const;
    void write_cell(std::int32_t pos, std::uint8_t value);
    void canonicalize();

    friend auto operator<=>(const Config& a, const Config& b) = default;
};

using SparseVec = std::map<Config, Amp>;

struct GlobalState {
    int time = 0;
    SparseVec table;
    Rational radicand = 1;

    // exact squared norm (real); rational part plus sqrt coefficient
    Amp norm_sq() const;
};

// H_{<=n} ragged basis: {lambda, 0, 1, 00, 01, 10, 11, ...}.
std::size_t ragged_dim(int max_len);
std::size_t string_index(const std::string& bits);
std::string index_string(std::size_t index);

// A density operator on H_{<=max_len}; exact (CMat) or float (FMat) entries.
class QubitString {
public:
    QubitString();  // the empty string, exact
    static QubitString classical(const std::string& bits);
    // density dir*dir^dagger / |dir|^2, exact; dir indexed over the ragged basis
    static QubitString pure_from_scaled(const CVec& dir, int max_len);
    static QubitString from_exact(SMat matrix, int max_len);
    static QubitString from_float(FMat matrix, int max_len);
    static QubitString mix(const std::vector<std::pair<Rational, QubitString>>& parts);

    bool is_exact() const { return std::holds_alternative<SMat>(matrix_); }
    int max_len() const { return max_len_; }
    const SMat& exact() const;
    FMat to_fmat() const;  // dense float view; capped at 12 qubits
    // both operands padded to a common max_len
    static QubitString pad(const QubitString& s, int max_len);

    // trace == 1 and hermitian; exact mode checks exactly, float within 1e-9
    bool is_valid_density() const;

    friend bool operator==(const QubitString& a, const QubitString& b);

private:
    int max_len_ = 0;
    std::variant<SMat, FMat> matrix_;
};

int base_length(const QubitString& s);
Rational average_length_exact(const QubitString& s);  // exact mode only
double average_length(const QubitString& s);
std::pair<int, double> lengths(const QubitString& s);

// |s_k><s_k| (x) sigma with s_k = 1^{floor(log k)} 0 (binary digits of k)
std::string self_delimiting_int(long k);
QubitString encode_pair(long k, const QubitString& sigma);
// <l, <m, sigma>> for delta = l/m in lowest terms
QubitString encode_rational_pair(const Rational& delta, const QubitString& sigma);
QubitString tensor_prefix(const std::string& bits, const QubitString& sigma);

// partial trace onto the first k cells, reinterpreted as a qubit string
QubitString truncate_prefix(const QubitString& sigma, int k);

double qubit_string_trace_distance(const QubitString& a, const QubitString& b);

// Control-space density operator with entries in Q(i,sqrt(d)).
struct ControlDensity {
    int states = 0;
    Rational radicand = 1;
    std::vector<Amp> entries;  // row-major states x states

    Amp& at(int r, int c) { return entries[static_cast<std::size_t>(r * states + c)]; }
    const Amp& at(int r, int c) const { return entries[static_cast<std::size_t>(r * states + c)]; }
    FMat to_fmat() const;
    CMat to_cmat() const;  // throws if any irrational part is nonzero
};

struct Caps {
    int t_max = 64;
    int n_exact_max = 6;
    int n_net_max = 3;
    long net_points_max = 80'000'000;

    static Caps from_env();  // honors QKOLMO_CAPS="t=...,nexact=...,nnet=...,points=..."
};

class Machine {
public:
    explicit Machine(QtmSpec spec);

    const QtmSpec& spec() const { return spec_; }
    const Rational& radicand() const { return spec_.radicand; }

    // Columns of the evolution restricted to configurations reachable within
    // t_max steps from classical inputs of length <= n_max are exactly orthonormal.
    bool validate_unitarity(int t_max, int n_max) const;

    // Exact evolution of a pure rational input of fixed length n for t steps.
    GlobalState run(const CVec& psi, int n, int t) const;
    GlobalState run(const QubitString& input, int t) const;  // input must be exact pure

    ControlDensity control_state(const GlobalState& g) const;

    // Exact qf weights <q_f|M_C^t(sigma)|q_f> for t = 0..t_max.
    std::vector<Amp> qf_weight_profile(const QubitString& input, int t_max) const;
    // Same for a scaled pure rational vector over H_{<=n}; weights are for dir/|dir|.
    std::vector<Amp> qf_weight_profile_scaled(const CVec& dir, int n, int t_max) const;

    std::optional<int> halting_time(const QubitString& input, int t_max) const;

    QubitString read_output(const GlobalState& g) const;

    std::optional<QubitString> apply(const QubitString& input, int t_max) const;

    // Output of the reading operation after exactly tau steps on a float pure
    // vector over the ragged basis of H_{<=n}; simulation amplitudes stay exact.
    QubitString apply_pure_float(const std::vector<std::complex<double>>& psi_ragged, int n, int tau) const;

    // Gram matrix over the ragged basis of H_{<=n}:
    // G_t[i][j] = sum over final-state configs of amp_i(c) * conj(amp_j(c)).
    const std::vector<std::vector<Amp>>& qf_gram(int n, int t) const;

    // Exact sparse state V^t |init(bits)>.
    const SparseVec& evolved(const std::string& bits, int t) const;

    // Gram entries restricted to the support pairs of a sparse density.
    std::map<std::pair<std::size_t, std::size_t>, Amp> qf_gram_support(int n, int t, const SMat& sigma) const;

    std::uint64_t hash() const;

private:
    friend class Evolution;
    QtmSpec spec_;

    struct BasisEvolution {
        std::vector<SparseVec> by_time;  // index = t
    };
    mutable std::map<std::pair<int, std::size_t>, BasisEvolution> basis_cache_;  // (n, basis idx)
    mutable std::map<std::pair<int, int>, std::vector<std::vector<Amp>>> gram_cache_;

    const SparseVec& evolved_basis(int n, std::size_t index, int t) const;
    SparseVec step(const SparseVec& v) const;
    Config initial_config(const std::string& bits) const;
};

}  // namespace qkolmo
