// Halting-space analysis: exact halting subspaces as kernels of the linear
// halting constraints, the ball halting test, the interpolating-subspace
// search, delta-approximate halting spaces, and the prefix-domain test.
//
// Net-based routines use a deterministic phase-quotient lattice cover of the
// unit sphere (one real-positive pivot coordinate per slice) instead of a full
// vector-sphere lattice; all downstream predicates are phase invariant, and
// the quotient keeps desk-scale instances enumerable.
#pragma once

#include "qkolmo/machines.hpp"
#include "qkolmo/qtm.hpp"

#include <memory>
#include <optional>

namespace qkolmo {

struct HaltingSpace {
    std::uint64_t machine = 0;
    int n = 0;
    int t = 0;
    std::vector<ScaledUnitVector> basis;  // orthogonal, exact, over H_n (dim 2^n)

    int dim() const { return static_cast<int>(basis.size()); }
};

struct ApproxHaltingSpace {
    std::uint64_t machine = 0;
    int n = 0;
    int t = 0;
    Rational delta = 0;
    Rational eps = 0;                  // achieved accuracy, <= 18 delta
    std::vector<CVec> basis;           // rational entries, over H_n

    int dim() const { return static_cast<int>(basis.size()); }
};

struct InterpolationResult {
    bool found = false;
    std::vector<CVec> basis;
};

// Searches a deterministic candidate family (full space, caller-supplied
// candidates, spans of positive vectors) for a d-dimensional subspace that is
// closer than big_delta to every positive vector and farther than tilde_delta
// from every tilde vector. Sound but not exhaustive over all subspaces.
InterpolationResult interpolating_subspace(const std::vector<CVec>& tilde_set,
                                           const std::vector<CVec>& pos_set,
                                           int d,
                                           const Rational& big_delta,
                                           const Rational& small_delta,
                                           const Rational& tilde_big_delta,
                                           const Rational& tilde_delta,
                                           const std::vector<std::vector<CVec>>& extra_candidates = {});

class HaltingAnalyzer {
public:
    explicit HaltingAnalyzer(const Machine& machine, Caps caps = Caps{});

    const Machine& machine() const { return machine_; }

    // Exact kernel of the stacked halting constraints over H_n.
    const HaltingSpace& exact_halting_space(int n, int t) const;

    // Strict comparisons against eps on the exact qf-weight profile.
    bool eps_t_halting(const QubitString& sigma, int t, const Rational& eps) const;
    bool eps_t_halting_scaled(const CVec& dir_hn, int n, int t, const Rational& eps) const;

    // Algorithm B contract: 0 if the ball is not eps-t-halting, 1 if it is
    // (eps/4)-t-halting, either in between. phi lives in H_n (dim 2^n),
    // rational, with |phi| inside (1 - delta/2, 1 + delta/2).
    int ball_halting_test(const CVec& phi, int n, const Rational& delta, const Rational& eps, int t) const;

    ApproxHaltingSpace approx_halting_space(int n, const Rational& delta, int t) const;

    bool is_prefix_domain(int n_max, int t_max) const;

    // qf-weight profile for a scaled vector in H_n (not the ragged space).
    std::vector<Amp> weight_profile_hn(const CVec& dir_hn, int n, int t_max) const;

    const Caps& caps() const { return caps_; }

private:
    const Machine& machine_;
    Caps caps_;
    mutable std::map<std::pair<int, int>, HaltingSpace> exact_cache_;

    struct Cover;  // phase-quotient lattice cover of S_n with cached profiles
    std::shared_ptr<Cover> build_cover(int n, const Rational& delta) const;
    mutable std::map<std::pair<int, Rational>, std::shared_ptr<Cover>> cover_cache_;
    void ensure_profiles(Cover& cover, int t) const;
};

// H_n vector (dim 2^n) placed into the length-n block of H_{<=n}.
CVec hn_to_ragged(const CVec& v, int n);
CVec ragged_to_hn(const CVec& v, int n);

// Subspace dump: one basis vector per line, `nsq p/q : re/..+im/..i, ...`.
std::string dump_subspace(const std::vector<ScaledUnitVector>& basis);
std::vector<ScaledUnitVector> parse_subspace(const std::string& text);

}  // namespace qkolmo
