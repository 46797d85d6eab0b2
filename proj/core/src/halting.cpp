#include "qkolmo/halting.hpp"

#include "qkolmo/qtm_io.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <cmath>
#include <sstream>

namespace qkolmo {

CVec hn_to_ragged(const CVec& v, int n) {
    std::size_t block = std::size_t{1} << n;
    if (v.dim() != block) throw std::invalid_argument("hn_to_ragged dimension mismatch");
    CVec out(ragged_dim(n));
    std::size_t offset = block - 1;
    for (std::size_t i = 0; i < block; ++i) out[offset + i] = v[i];
    return out;
}

CVec ragged_to_hn(const CVec& v, int n) {
    std::size_t block = std::size_t{1} << n;
    if (v.dim() != ragged_dim(n)) throw std::invalid_argument("ragged_to_hn dimension mismatch");
    std::size_t offset = block - 1;
    for (std::size_t i = 0; i < offset; ++i)
        if (!v[i].is_zero()) throw std::invalid_argument("vector has support below length n");
    CVec out(block);
    for (std::size_t i = 0; i < block; ++i) out[i] = v[offset + i];
    return out;
}

HaltingAnalyzer::HaltingAnalyzer(const Machine& machine, Caps caps) : machine_(machine), caps_(caps) {}

const HaltingSpace& HaltingAnalyzer::exact_halting_space(int n, int t) const {
    auto key = std::make_pair(n, t);
    auto hit = exact_cache_.find(key);
    if (hit != exact_cache_.end()) return hit->second;
    if (n < 0 || n > caps_.n_exact_max) throw std::domain_error("exact halting space: n exceeds cap");
    if (t < 1 || t > caps_.t_max) throw std::domain_error("exact halting space: t exceeds cap");

    const std::size_t block = std::size_t{1} << n;
    const bool irrational = machine_.radicand() != 1;
    std::vector<CVec> rows;

    auto add_constraints = [&](int time, bool final_configs) {
        // collect the configurations appearing across all basis strings
        std::map<Config, std::size_t> row_of;
        std::vector<std::vector<Amp>> amp_rows;
        for (std::size_t j = 0; j < block; ++j) {
            std::string bits = index_string(block - 1 + j);
            for (const auto& [config, amp] : machine_.evolved(bits, time)) {
                bool is_final = config.state == machine_.spec().final_state;
                if (is_final != final_configs) continue;
                auto [it, inserted] = row_of.try_emplace(config, amp_rows.size());
                if (inserted) amp_rows.emplace_back(block);
                amp_rows[it->second][j] = amp;
            }
        }
        for (const auto& arow : amp_rows) {
            CVec rat_row(block), irr_row(block);
            bool has_irr = false;
            for (std::size_t j = 0; j < block; ++j) {
                rat_row[j] = arow[j].rat;
                irr_row[j] = arow[j].irr;
                has_irr = has_irr || !arow[j].irr.is_zero();
            }
            rows.push_back(std::move(rat_row));
            if (irrational && has_irr) rows.push_back(std::move(irr_row));
        }
    };

    for (int time = 1; time < t; ++time) add_constraints(time, true);
    add_constraints(t, false);

    std::vector<CVec> kernel = kernel_basis(rows, block);
    HaltingSpace space;
    space.machine = machine_.hash();
    space.n = n;
    space.t = t;
    space.basis = gram_schmidt(kernel);
    for (auto& u : space.basis) u = canonical_scaled(u);
    return exact_cache_.emplace(key, std::move(space)).first->second;
}

std::vector<Amp> HaltingAnalyzer::weight_profile_hn(const CVec& dir_hn, int n, int t_max) const {
    return machine_.qf_weight_profile_scaled(hn_to_ragged(dir_hn, n), n, t_max);
}

namespace {

bool profile_within(const std::vector<Amp>& profile, int t, const Rational& tolerance, const Rational& radicand) {
    for (int time = 1; time < t; ++time)
        if (amp_real_cmp(profile[static_cast<std::size_t>(time)], tolerance, radicand) > 0) return false;
    return amp_real_cmp(profile[static_cast<std::size_t>(t)], Rational(1) - tolerance, radicand) >= 0;
}

}  // namespace

bool HaltingAnalyzer::eps_t_halting(const QubitString& sigma, int t, const Rational& eps) const {
    if (t < 1) throw std::invalid_argument("eps_t_halting needs t >= 1");
    if (eps < 0) throw std::invalid_argument("eps_t_halting needs eps >= 0");
    auto profile = machine_.qf_weight_profile(sigma, t);
    return profile_within(profile, t, eps, machine_.radicand());
}

bool HaltingAnalyzer::eps_t_halting_scaled(const CVec& dir_hn, int n, int t, const Rational& eps) const {
    if (t < 1) throw std::invalid_argument("eps_t_halting needs t >= 1");
    auto profile = weight_profile_hn(dir_hn, n, t);
    return profile_within(profile, t, eps, machine_.radicand());
}

int HaltingAnalyzer::ball_halting_test(const CVec& phi, int n, const Rational& delta, const Rational& eps,
                                       int t) const {
    if (n < 0 || n > caps_.n_net_max) throw std::domain_error("ball test: n exceeds cap");
    if (t < 1 || t > caps_.t_max) throw std::domain_error("ball test: t exceeds cap");
    if (delta <= 0 || eps <= 0) throw std::invalid_argument("ball test needs positive delta and eps");
    if (phi.dim() != (std::size_t{1} << n)) throw std::invalid_argument("ball test dimension mismatch");
    Rational nsq = phi.norm_sq();
    Rational lo = (1 - delta / 2) * (1 - delta / 2), hi = (1 + delta / 2) * (1 + delta / 2);
    if (!(nsq > lo && nsq < hi)) throw std::invalid_argument("ball test centre norm outside the shell");

    if (eps >= 2 * delta) {
        // centre test: the normalized centre is within (3/2) delta of every unit
        // vector of the ball, and itself lies inside the open ball
        Rational tolerance = (eps >= 4 * delta) ? Rational(Rational(5) * eps / 8) : Rational(eps / 4 + Rational(3) * delta / 2);
        auto profile = weight_profile_hn(phi, n, t);
        return profile_within(profile, t, tolerance, machine_.radicand()) ? 1 : 0;
    }

    // refinement net inside the ball: lattice with covering radius rho, points
    // kept when the normalized point provably lies inside the open ball; a
    // marked point certifies eps-halting, a covered eps/4 witness marks one
    Rational rho = std::min(Rational(Rational(3) * eps / 8), Rational(Rational(3) * delta / 17));
    int dims = 1 << (n + 1);
    // covering radius g sqrt(dims)/2 <= rho for dims <= 16
    Rational g = rho / 2;
    long budget = caps_.net_points_max;
    std::vector<long> centre(static_cast<std::size_t>(dims));
    for (int i = 0; i < dims / 2; ++i) {
        centre[static_cast<std::size_t>(2 * i)] = static_cast<long>(to_double(phi[static_cast<std::size_t>(i)].re / g));
        centre[static_cast<std::size_t>(2 * i + 1)] = static_cast<long>(to_double(phi[static_cast<std::size_t>(i)].im / g));
    }
    long ball_steps = static_cast<long>(to_double(delta / g)) + 2;
    Rational max_dist_sq = (delta - 2 * rho) * (delta - 2 * rho);
    if (delta <= 2 * rho) max_dist_sq = 0;
    Rational shell_lo = (1 - rho) * (1 - rho), shell_hi = (1 + rho) * (1 + rho);
    Rational threshold = eps / 4 + 2 * rho;

    std::vector<long> z(static_cast<std::size_t>(dims));
    bool found = false;
    long visited = 0;
    std::function<void(int)> recurse = [&](int coord) {
        if (found) return;
        if (coord == dims) {
            if (++visited > budget) throw std::domain_error("ball test net-size cap exceeded");
            CVec p(std::size_t{1} << n);
            for (int i = 0; i < dims / 2; ++i)
                p[static_cast<std::size_t>(i)] =
                    CRat(g * Rational(z[static_cast<std::size_t>(2 * i)]), g * Rational(z[static_cast<std::size_t>(2 * i + 1)]));
            CVec diff = p;
            diff -= phi;
            if (!(diff.norm_sq() <= max_dist_sq)) return;
            Rational pn = p.norm_sq();
            if (!(pn >= shell_lo && pn <= shell_hi)) return;
            auto profile = weight_profile_hn(p, n, t);
            if (profile_within(profile, t, threshold, machine_.radicand())) found = true;
            return;
        }
        long c = centre[static_cast<std::size_t>(coord)];
        for (long v = c - ball_steps; v <= c + ball_steps && !found; ++v) {
            z[static_cast<std::size_t>(coord)] = v;
            recurse(coord + 1);
        }
    };
    recurse(0);
    return found ? 1 : 0;
}

InterpolationResult interpolating_subspace(const std::vector<CVec>& tilde_set, const std::vector<CVec>& pos_set,
                                           int d, const Rational& big_delta, const Rational& small_delta,
                                           const Rational& tilde_big_delta, const Rational& tilde_delta,
                                           const std::vector<std::vector<CVec>>& extra_candidates) {
    if (!(big_delta > small_delta) || !(tilde_big_delta > tilde_delta))
        throw std::invalid_argument("interpolating_subspace needs Delta > delta on both sides");
    if (d < 1) throw std::invalid_argument("interpolating_subspace needs d >= 1");
    std::size_t dim = 0;
    for (const auto& v : pos_set) dim = v.dim();
    for (const auto& v : tilde_set) dim = v.dim();
    if (dim == 0) {
        if (!extra_candidates.empty() && !extra_candidates.front().empty()) dim = extra_candidates.front().front().dim();
        else return {false, {}};
    }

    Rational big_sq = big_delta * big_delta;
    Rational tilde_sq = tilde_delta * tilde_delta;

    auto passes = [&](const std::vector<ScaledUnitVector>& gs) -> bool {
        if (static_cast<int>(gs.size()) != d) return false;
        for (const auto& neg : tilde_set)
            if (!(dist_sq_to_span(gs, neg) > tilde_sq)) return false;
        for (const auto& pos : pos_set)
            if (!(dist_sq_to_span(gs, pos) < big_sq)) return false;
        return true;
    };

    std::vector<std::vector<CVec>> candidates;
    if (static_cast<std::size_t>(d) == dim) {
        std::vector<CVec> full;
        for (std::size_t i = 0; i < dim; ++i) full.push_back(CVec::basis(dim, i));
        candidates.push_back(std::move(full));
    }
    for (const auto& extra : extra_candidates)
        if (!extra.empty()) candidates.push_back(extra);
    // greedy independent subset of the positive vectors
    {
        std::vector<CVec> greedy;
        std::vector<ScaledUnitVector> gs;
        for (const auto& pos : pos_set) {
            if (static_cast<int>(greedy.size()) == d) break;
            CVec residual = pos;
            residual -= project_onto_span(gs, pos);
            if (!residual.is_zero()) {
                gs.emplace_back(residual);
                greedy.push_back(pos);
            }
        }
        if (static_cast<int>(greedy.size()) == d) candidates.push_back(std::move(greedy));
    }
    // short windows over the positive list
    std::size_t window_starts = std::min<std::size_t>(pos_set.size(), 8);
    for (std::size_t start = 0; start < window_starts; ++start) {
        if (start + static_cast<std::size_t>(d) > pos_set.size()) break;
        std::vector<CVec> window(pos_set.begin() + static_cast<long>(start),
                                 pos_set.begin() + static_cast<long>(start) + d);
        candidates.push_back(std::move(window));
    }

    for (const auto& candidate : candidates) {
        std::vector<ScaledUnitVector> gs = gram_schmidt(candidate);
        if (passes(gs)) {
            std::vector<CVec> basis;
            for (const auto& u : gs) basis.push_back(u.direction);
            return {true, std::move(basis)};
        }
    }
    (void)small_delta;
    (void)tilde_big_delta;
    return {false, {}};
}

// --- phase-quotient lattice cover -----------------------------------------

struct HaltingAnalyzer::Cover {
    int n = 0;
    Rational g = 0;
    int sdim = 0;                      // real coordinates per slice: 2^{n+1} - 1
    std::vector<std::int32_t> coords;  // per point: slice index then sdim ints
    std::size_t point_count = 0;

    // cached normalized qf weights w_k(t') = numerators[t'][k] / (d_common * s[k]);
    // int_path falls back to exact rationals when the grams do not fit
    bool profiles_ready = false;
    bool int_path = true;
    mpz_class d_common = 1;
    std::vector<std::vector<std::int64_t>> numerators;  // [t'][point]
    std::vector<std::int64_t> s_values;                 // [point]
    std::vector<std::vector<Rational>> slow_weights;    // [t'][point], normalized

    std::size_t stride() const { return static_cast<std::size_t>(sdim) + 1; }

    CVec vector_of(std::size_t k) const {
        std::size_t base = k * stride();
        int slice = coords[base];
        std::size_t complex_dim = std::size_t{1} << n;
        CVec v(complex_dim);
        std::size_t cursor = base + 1;
        for (std::size_t i = 0; i < complex_dim; ++i) {
            if (static_cast<int>(i) == slice) {
                v[i] = CRat(g * Rational(coords[cursor]), Rational(0));
                cursor += 1;
            } else {
                v[i] = CRat(g * Rational(coords[cursor]), g * Rational(coords[cursor + 1]));
                cursor += 2;
            }
        }
        return v;
    }
};

std::shared_ptr<HaltingAnalyzer::Cover> HaltingAnalyzer::build_cover(int n, const Rational& delta) const {
    auto key = std::make_pair(n, delta);
    auto hit = cover_cache_.find(key);
    if (hit != cover_cache_.end()) return hit->second;
    auto cover = std::make_shared<Cover>();
    cover->n = n;
    cover->sdim = (1 << (n + 1)) - 1;
    // rational upper bounds on sqrt(sdim)
    Rational iroot;
    switch (cover->sdim) {
        case 1: iroot = Rational(1); break;
        case 3: iroot = Rational(26, 15); break;
        case 7: iroot = Rational(53, 20); break;
        case 15: iroot = Rational(31, 8); break;
        default: throw std::domain_error("cover: n exceeds cap");
    }
    Rational rho = Rational(9, 20) * delta;  // covering radius bound, < delta/2
    cover->g = (Rational(9, 10) * delta) / iroot;
    const Rational& g = cover->g;
    Rational lo = (1 - rho) * (1 - rho) / (g * g);
    Rational hi = (1 + rho) * (1 + rho) / (g * g);
    mpz_class lo_z(static_cast<long>(std::ceil(to_double(lo))));
    while (Rational(lo_z) < lo) ++lo_z;
    while (Rational(lo_z - 1) >= lo) --lo_z;
    mpz_class hi_z(static_cast<long>(std::floor(to_double(hi))));
    while (Rational(hi_z) > hi) --hi_z;
    while (Rational(hi_z + 1) <= hi) ++hi_z;
    long b_lo = lo_z.get_si(), b_hi = hi_z.get_si();
    if (b_hi < b_lo) throw std::domain_error("cover: empty shell");

    long limit = static_cast<long>(std::sqrt(static_cast<double>(b_hi))) + 1;
    while (limit * limit > b_hi) --limit;
    const int sdim = cover->sdim;
    std::vector<std::int32_t> z(static_cast<std::size_t>(sdim));
    long budget = caps_.net_points_max;
    long count = 0;

    for (int slice = 0; slice < (1 << n); ++slice) {
        // coordinate 0 of the slice layout is the pivot (real > 0)
        std::function<void(int, long)> recurse = [&](int coord, long sum) {
            if (coord == sdim - 1) {
                long rest_lo = b_lo - sum, rest_hi = b_hi - sum;
                if (rest_hi < 0) return;
                long k_lo = 0;
                if (rest_lo > 0) {
                    k_lo = static_cast<long>(std::sqrt(static_cast<double>(rest_lo)));
                    while (k_lo * k_lo < rest_lo) ++k_lo;
                    while (k_lo > 0 && (k_lo - 1) * (k_lo - 1) >= rest_lo) --k_lo;
                }
                long k_hi = static_cast<long>(std::sqrt(static_cast<double>(rest_hi))) + 1;
                while (k_hi * k_hi > rest_hi) --k_hi;
                for (long k = k_lo; k <= k_hi; ++k) {
                    int copies = (k == 0) ? 1 : 2;
                    for (int sign = 0; sign < copies; ++sign) {
                        z[static_cast<std::size_t>(sdim - 1)] = static_cast<std::int32_t>(sign ? -k : k);
                        if (++count > budget) throw std::domain_error("cover: net point cap exceeded");
                        cover->coords.push_back(slice);
                        cover->coords.insert(cover->coords.end(), z.begin(), z.end());
                    }
                }
                return;
            }
            bool pivot = (coord == 0);
            long from = pivot ? 1 : -limit;
            for (long v = from; v <= limit; ++v) {
                long add = v * v;
                if (sum + add > b_hi) {
                    if (v > 0) break;
                    continue;
                }
                z[static_cast<std::size_t>(coord)] = static_cast<std::int32_t>(v);
                recurse(coord + 1, sum + add);
            }
        };
        recurse(0, 0);
    }
    cover->point_count = static_cast<std::size_t>(count);
    cover_cache_.emplace(key, cover);
    return cover;
}

void HaltingAnalyzer::ensure_profiles(Cover& cover, int t) const {
    const int n = cover.n;
    const std::size_t block = std::size_t{1} << n;
    const std::size_t points = cover.point_count;
    if (!cover.profiles_ready) {
        cover.profiles_ready = true;
        cover.int_path = machine_.radicand() == 1;
        cover.s_values.assign(points, 0);
        for (std::size_t k = 0; k < points; ++k) {
            std::size_t base = k * cover.stride();
            std::int64_t s = 0;
            for (int c = 0; c < cover.sdim; ++c) {
                std::int64_t v = cover.coords[base + 1 + static_cast<std::size_t>(c)];
                s += v * v;
            }
            cover.s_values[k] = s;
        }
    }
    while (static_cast<int>(std::max(cover.numerators.size(), cover.slow_weights.size())) <= t) {
        int time = static_cast<int>(std::max(cover.numerators.size(), cover.slow_weights.size()));
        const auto& ragged = machine_.qf_gram(n, time);
        // extract the length-n block
        std::vector<CRat> gram(block * block);
        bool rational = true;
        for (std::size_t i = 0; i < block && rational; ++i)
            for (std::size_t j = 0; j < block; ++j) {
                const Amp& a = ragged[block - 1 + i][block - 1 + j];
                if (!a.irr.is_zero()) { rational = false; break; }
                gram[i * block + j] = a.rat;
            }
        if (!rational) throw std::domain_error("approx halting space: irrational weights unsupported");
        if (cover.int_path) {
            // widen the common denominator if needed; restart arrays when it grows
            mpz_class d = cover.d_common;
            for (const CRat& e : gram) {
                mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), e.re.get_den().get_mpz_t());
                mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), e.im.get_den().get_mpz_t());
            }
            bool fits = mpz_sizeinbase(d.get_mpz_t(), 2) <= 24;
            std::vector<std::int64_t> gre(block * block), gim(block * block);
            if (fits) {
                for (std::size_t idx = 0; idx < gram.size() && fits; ++idx) {
                    Rational sre = gram[idx].re * Rational(d), sim = gram[idx].im * Rational(d);
                    if (mpz_sizeinbase(sre.get_num().get_mpz_t(), 2) > 30 ||
                        mpz_sizeinbase(sim.get_num().get_mpz_t(), 2) > 30) {
                        fits = false;
                        break;
                    }
                    gre[idx] = sre.get_num().get_si();
                    gim[idx] = sim.get_num().get_si();
                }
            }
            if (fits && d != cover.d_common && !cover.numerators.empty()) {
                // rescale earlier arrays to the wider denominator
                mpz_class factor_z = d / cover.d_common;
                if (!factor_z.fits_slong_p()) fits = false;
                else {
                    std::int64_t factor = factor_z.get_si();
                    for (auto& row : cover.numerators)
                        for (auto& v : row) v *= factor;
                }
            }
            if (fits) {
                cover.d_common = d;
                std::vector<std::int64_t> row(points, 0);
                std::vector<std::int64_t> zre(block), zim(block);
                for (std::size_t k = 0; k < points; ++k) {
                    std::size_t base = k * cover.stride();
                    int slice = cover.coords[base];
                    std::size_t cursor = base + 1;
                    for (std::size_t i = 0; i < block; ++i) {
                        if (static_cast<int>(i) == slice) {
                            zre[i] = cover.coords[cursor];
                            zim[i] = 0;
                            cursor += 1;
                        } else {
                            zre[i] = cover.coords[cursor];
                            zim[i] = cover.coords[cursor + 1];
                            cursor += 2;
                        }
                    }
                    __int128 num = 0;
                    for (std::size_t i = 0; i < block; ++i)
                        for (std::size_t j = 0; j < block; ++j) {
                            std::int64_t re = gre[i * block + j], im = gim[i * block + j];
                            if (re == 0 && im == 0) continue;
                            __int128 rr = static_cast<__int128>(zre[i]) * zre[j] + static_cast<__int128>(zim[i]) * zim[j];
                            __int128 ii = static_cast<__int128>(zre[i]) * zim[j] - static_cast<__int128>(zim[i]) * zre[j];
                            num += rr * re - ii * im;
                        }
                    row[k] = static_cast<std::int64_t>(num);
                }
                cover.numerators.push_back(std::move(row));
                continue;
            }
            // migrate to the slow path: recompute every earlier time exactly
            cover.int_path = false;
            cover.numerators.clear();
            cover.slow_weights.clear();
            for (int redo = 0; redo < time; ++redo) ensure_profiles(cover, redo);
        }
        // slow path: exact rational normalized weights
        std::vector<Rational> slow(points);
        for (std::size_t k = 0; k < points; ++k) {
            CVec v = cover.vector_of(k);
            Rational nsq = v.norm_sq();
            CRat acc;
            for (std::size_t i = 0; i < block; ++i) {
                if (v[i].is_zero()) continue;
                for (std::size_t j = 0; j < block; ++j) {
                    if (v[j].is_zero()) continue;
                    acc += v[i] * v[j].conj() * gram[i * block + j];
                }
            }
            if (acc.im != 0) throw std::logic_error("qf weight must be real");
            slow[k] = acc.re / nsq;
        }
        cover.slow_weights.push_back(std::move(slow));
    }
}

ApproxHaltingSpace HaltingAnalyzer::approx_halting_space(int n, const Rational& delta, int t) const {
    if (n < 0 || n > caps_.n_net_max) throw std::domain_error("approx halting space: n exceeds cap");
    if (t < 1 || t > caps_.t_max) throw std::domain_error("approx halting space: t exceeds cap");
    if (delta <= 0) throw std::invalid_argument("approx halting space needs delta > 0");

    ApproxHaltingSpace result;
    result.machine = machine_.hash();
    result.n = n;
    result.t = t;
    result.delta = delta;

    auto cover = build_cover(n, delta);
    ensure_profiles(*cover, t);
    const std::size_t block = std::size_t{1} << n;
    const std::size_t points = cover->point_count;

    // marked(k, tol): max_{t' < t} w_k(t') <= tol and w_k(t) >= 1 - tol
    bool narrow = cover->int_path && cover->d_common.fits_slong_p();
    std::int64_t d_narrow = narrow ? cover->d_common.get_si() : 0;
    auto marked = [&](std::size_t k, const Rational& tol) -> bool {
        if (cover->int_path) {
            std::int64_t worst = 0;
            for (int time = 1; time < t; ++time)
                worst = std::max(worst, cover->numerators[static_cast<std::size_t>(time)][k]);
            std::int64_t at_t = cover->numerators[static_cast<std::size_t>(t)][k];
            if (narrow && tol.get_num().fits_slong_p() && tol.get_den().fits_slong_p()) {
                std::int64_t num = tol.get_num().get_si(), den = tol.get_den().get_si();
                __int128 ds = static_cast<__int128>(d_narrow) * cover->s_values[k];
                if (static_cast<__int128>(den) * worst > static_cast<__int128>(num) * ds) return false;
                return static_cast<__int128>(den) * at_t >= static_cast<__int128>(den - num) * ds;
            }
            const mpz_class& d = cover->d_common;
            mpz_class rhs = tol.get_num() * d * mpz_class(static_cast<long>(cover->s_values[k]));
            if (tol.get_den() * mpz_class(static_cast<long>(worst)) > rhs) return false;
            mpz_class lhs2 = tol.get_den() * mpz_class(static_cast<long>(at_t));
            mpz_class rhs2 = (tol.get_den() - tol.get_num()) * d * mpz_class(static_cast<long>(cover->s_values[k]));
            return lhs2 >= rhs2;
        }
        Rational worst(0);
        for (int time = 1; time < t; ++time)
            worst = std::max(worst, cover->slow_weights[static_cast<std::size_t>(time)][k]);
        if (worst > tol) return false;
        return cover->slow_weights[static_cast<std::size_t>(t)][k] >= 1 - tol;
    };
    auto b_test = [&](std::size_t k, const Rational& eps) -> int {
        Rational tolerance = (eps >= 4 * delta) ? Rational(Rational(5) * eps / 8)
                                                : Rational(eps / 4 + Rational(3) * delta / 2);
        return marked(k, tolerance) ? 1 : 0;
    };

    Rational eps18 = 18 * delta;
    std::vector<std::uint8_t> neg(points);
    for (std::size_t k = 0; k < points; ++k) neg[k] = b_test(k, eps18) == 0;

    Rational eps = eps18;
    for (int round = 0; round < 64; ++round) {
        if (eps < 2 * delta)
            throw std::domain_error("approx halting space: accuracy loop descended below the centre-test regime");
        bool any_pos = false, any_neg = false;
        for (std::size_t k = 0; k < points && !(any_pos && any_neg); ++k) {
            any_pos = any_pos || b_test(k, eps) == 1;
            any_neg = any_neg || neg[k];
        }
        if (!any_pos) {
            result.eps = eps;
            result.basis.clear();
            return result;
        }
        // shortcut before materializing: with no negatives the full space wins
        if (!any_neg) {
            std::vector<CVec> full;
            for (std::size_t i = 0; i < block; ++i) full.push_back(CVec::basis(block, i));
            result.eps = eps;
            result.basis = std::move(full);
            return result;
        }
        // negative and positive vectors for the interpolation search
        std::vector<CVec> pos_vecs, neg_vecs;
        for (std::size_t k = 0; k < points; ++k) {
            if (neg[k]) neg_vecs.push_back(cover->vector_of(k));
            else if (b_test(k, eps) == 1) pos_vecs.push_back(cover->vector_of(k));
        }
        std::vector<std::vector<CVec>> extras;
        {
            const HaltingSpace& exact = exact_halting_space(n, t);
            if (exact.dim() > 0) {
                std::vector<CVec> basis;
                for (const auto& u : exact.basis) basis.push_back(u.direction);
                extras.push_back(std::move(basis));
            }
        }
        for (int d = 1 << n; d >= 1; --d) {
            std::vector<std::vector<CVec>> sized;
            for (const auto& e : extras)
                if (static_cast<int>(e.size()) == d) sized.push_back(e);
            InterpolationResult found = interpolating_subspace(neg_vecs, pos_vecs, d, 2 * delta, delta,
                                                               Rational(7) * delta / 4, Rational(3) * delta / 2, sized);
            if (found.found) {
                result.eps = eps;
                result.basis = std::move(found.basis);
                return result;
            }
        }
        eps /= 2;
    }
    throw std::domain_error("approx halting space: accuracy loop exceeded the iteration cap");
}

bool HaltingAnalyzer::is_prefix_domain(int n_max, int t_max) const {
    if (n_max < 0 || n_max > caps_.n_exact_max) throw std::domain_error("prefix domain: n exceeds cap");
    if (t_max < 1 || t_max > caps_.t_max) throw std::domain_error("prefix domain: t exceeds cap");
    // collect exact halting bases per length
    std::vector<std::vector<CVec>> by_length(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        for (int t = 1; t <= t_max; ++t) {
            const HaltingSpace& space = exact_halting_space(n, t);
            for (const auto& u : space.basis) by_length[static_cast<std::size_t>(n)].push_back(u.direction);
        }
    for (int n_long = 1; n_long <= n_max; ++n_long) {
        for (const CVec& phi : by_length[static_cast<std::size_t>(n_long)]) {
            QubitString density = QubitString::pure_from_scaled(hn_to_ragged(phi, n_long), n_long);
            for (int n_short = 0; n_short < n_long; ++n_short) {
                if (by_length[static_cast<std::size_t>(n_short)].empty()) continue;
                QubitString prefix = truncate_prefix(density, n_short);
                const SMat& m = prefix.exact();
                std::size_t offset = (std::size_t{1} << n_short) - 1;
                for (const CVec& psi : by_length[static_cast<std::size_t>(n_short)]) {
                    CRat value;
                    for (std::size_t r = 0; r < psi.dim(); ++r) {
                        if (psi[r].is_zero()) continue;
                        for (std::size_t c = 0; c < psi.dim(); ++c) {
                            if (psi[c].is_zero()) continue;
                            value += psi[r].conj() * m.at(offset + r, offset + c) * psi[c];
                        }
                    }
                    if (!value.is_zero()) return false;
                }
            }
        }
    }
    return true;
}

std::string dump_subspace(const std::vector<ScaledUnitVector>& basis) {
    std::ostringstream os;
    for (const auto& u : basis) {
        os << "nsq " << u.norm_sq.get_str() << " :";
        for (std::size_t i = 0; i < u.dim(); ++i) {
            os << (i ? ", " : " ");
            const CRat& z = u.direction[i];
            os << z.re.get_num().get_str() << "/" << z.re.get_den().get_str()
               << (sgn(z.im) >= 0 ? "+" : "-") << mpz_class(abs(z.im.get_num())).get_str() << "/"
               << z.im.get_den().get_str() << "i";
        }
        os << "\n";
    }
    return os.str();
}

std::vector<ScaledUnitVector> parse_subspace(const std::string& text) {
    std::vector<ScaledUnitVector> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.rfind("nsq ", 0) != 0) throw std::invalid_argument("subspace line must start with 'nsq'");
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("subspace line lacks ':'");
        Rational nsq = parse_rational(line.substr(4, colon - 4));
        std::vector<CRat> entries;
        std::stringstream items(line.substr(colon + 1));
        std::string item;
        while (std::getline(items, item, ',')) entries.push_back(parse_crat(item));
        CVec dir(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) dir[i] = entries[i];
        if (dir.norm_sq() != nsq) throw std::invalid_argument("subspace line norm mismatch");
        out.emplace_back(std::move(dir), std::move(nsq));
    }
    return out;
}

}  // namespace qkolmo
