#include "qkolmo/verify.hpp"

#include "qkolmo/brudno.hpp"
#include "qkolmo/coding.hpp"
#include "qkolmo/halting.hpp"
#include "qkolmo/machines.hpp"
#include "qkolmo/qtm_io.hpp"
#include "qkolmo/universal.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qkolmo {

namespace {

constexpr double kSlack = 1e-10;

Rational random_rational(std::mt19937_64& rng, int span = 8) {
    std::uniform_int_distribution<int> num(-span, span);
    std::uniform_int_distribution<int> den(1, span);
    return Rational(num(rng), den(rng));
}

CRat random_crat(std::mt19937_64& rng) { return CRat(random_rational(rng), random_rational(rng)); }

CVec random_cvec(std::mt19937_64& rng, std::size_t dim) {
    CVec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = random_crat(rng);
    return v;
}

std::vector<std::complex<double>> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> v(dim);
    double norm = 0;
    for (auto& z : v) {
        z = {gauss(rng), gauss(rng)};
        norm += std::norm(z);
    }
    norm = std::sqrt(norm);
    for (auto& z : v) z /= norm;
    return v;
}

FMat random_density(std::mt19937_64& rng, std::size_t dim, int terms = 3) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> weights(static_cast<std::size_t>(terms));
    double total = 0;
    for (auto& w : weights) {
        w = unit(rng) + 1e-3;
        total += w;
    }
    FMat rho(dim, dim);
    for (double w : weights) {
        auto psi = random_unit(rng, dim);
        rho = rho + FMat::outer(psi, psi).scaled(w / total);
    }
    return rho;
}

SuiteResult make_result(const std::string& name, int failures, int trials, const std::string& extra = "") {
    SuiteResult result;
    result.name = name;
    result.pass = failures == 0;
    std::ostringstream os;
    os << failures << " violation(s) in " << trials << " trials";
    if (!extra.empty()) os << "; " << extra;
    result.details = os.str();
    return result;
}

// A pure ragged-space qubit string a|s_long> + b|s_short| (lengths differ):
// the identity machine halts on it at |s_long|+1 with accuracy |b|^2.
struct HaltingSample {
    CVec ragged;    // scaled vector over H_{<=n}
    int n = 0;
    int t = 0;      // target halting time
    double eps = 0; // measured eps-t-halting accuracy
};

HaltingSample sample_almost_halting(std::mt19937_64& rng, const Machine& machine, int n_long, int n_short) {
    std::uniform_int_distribution<int> coeff(1, 6);
    std::uniform_int_distribution<long> pick_long(0, (1L << n_long) - 1);
    std::uniform_int_distribution<long> pick_short(0, (1L << n_short) - 1);
    HaltingSample sample;
    sample.n = n_long;
    sample.t = n_long + 1;  // identity halting time for length n_long
    CVec v(ragged_dim(n_long));
    long a = coeff(rng);                              // signal weight
    long b = 1 + static_cast<long>(rng() % 3);        // contamination weight
    std::size_t long_index = (std::size_t{1} << n_long) - 1 + static_cast<std::size_t>(pick_long(rng));
    std::size_t short_index = (std::size_t{1} << n_short) - 1 + static_cast<std::size_t>(pick_short(rng));
    v[long_index] = CRat(Rational(4 * a), Rational(0));
    v[short_index] = CRat(Rational(b), Rational(0));
    sample.ragged = v;
    // measured accuracy: max off-profile weight
    auto profile = machine.qf_weight_profile_scaled(v, n_long, sample.t);
    double worst = 0;
    for (int t = 1; t < sample.t; ++t)
        worst = std::max(worst, amp_to_complex(profile[static_cast<std::size_t>(t)], machine.radicand()).real());
    double at_t = amp_to_complex(profile[static_cast<std::size_t>(sample.t)], machine.radicand()).real();
    sample.eps = std::max(worst, 1.0 - at_t);
    return sample;
}

std::complex<double> qf_cross_element(const Machine& machine, const CVec& a, const CVec& b, int n, int t) {
    // <qf| M_C^t (|a><b|) |qf> for normalized a, b
    const auto& gram = machine.qf_gram(n, t);
    Amp acc;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.dim(); ++j) {
            if (b[j].is_zero()) continue;
            acc += amp_mul(Amp(a[i] * b[j].conj()), gram[i][j], machine.radicand());
        }
    }
    std::complex<double> value = amp_to_complex(acc, machine.radicand());
    double na = std::sqrt(to_double(a.norm_sq())), nb = std::sqrt(to_double(b.norm_sq()));
    return value / (na * nb);
}

}  // namespace

SuiteResult suite_norm_inequality(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x6e6f726dull);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 2 + (rng() % 5);
        FMat rho = random_density(rng, dim), sigma = random_density(rng, dim);
        FMat diff = rho - sigma;
        if (operator_norm_hermitian(diff) > trace_distance(rho, sigma) + kSlack) ++failures;
    }
    return make_result("norm-vs-trace-norm", failures, trials);
}

SuiteResult suite_pure_trace_distance(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x70757265ull);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 2 + (rng() % 6);
        auto psi = random_unit(rng, dim), phi = random_unit(rng, dim);
        double formula = pure_state_trace_distance(psi, phi);
        double eigen = trace_distance(FMat::outer(psi, psi), FMat::outer(phi, phi));
        if (std::abs(formula - eigen) > 1e-12) ++failures;
    }
    return make_result("pure-state-trace-distance", failures, trials);
}

SuiteResult suite_isometry_composition(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x69736f6dull);
    std::uniform_real_distribution<double> angle(-0.05, 0.05);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 2 + (rng() % 3);
        FMat product = FMat::identity(dim);
        double budget = 0;
        int k_count = 2 + static_cast<int>(rng() % 4);
        for (int k = 0; k < k_count; ++k) {
            // small unitary: apply a plane rotation by a small angle
            FMat u = FMat::identity(dim);
            std::size_t a = rng() % dim, b = (a + 1 + rng() % (dim - 1)) % dim;
            double theta = angle(rng);
            u.at(a, a) = std::cos(theta);
            u.at(b, b) = std::cos(theta);
            u.at(a, b) = -std::sin(theta);
            u.at(b, a) = std::sin(theta);
            product = u * product;
            budget += operator_norm(u - FMat::identity(dim));
        }
        if (operator_norm(product - FMat::identity(dim)) > budget + kSlack) ++failures;
    }
    return make_result("isometry-composition", failures, trials);
}

SuiteResult suite_halting_matrix_element(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x6d617472ull);
    Machine machine(identity_machine());
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        HaltingSample a = sample_almost_halting(rng, machine, 2, rng() % 2 == 0 ? 0 : 1);
        HaltingSample b = sample_almost_halting(rng, machine, 2, rng() % 2 == 0 ? 0 : 1);
        for (int t = 1; t < a.t; ++t) {
            std::complex<double> cross = qf_cross_element(machine, a.ragged, b.ragged, 2, t);
            if (std::abs(cross) > std::sqrt(a.eps * b.eps) + kSlack) ++failures;
        }
    }
    return make_result("halting-matrix-element", failures, trials);
}

SuiteResult suite_halting_superposition(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x73757065ull);
    Machine machine(identity_machine());
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        HaltingSample a = sample_almost_halting(rng, machine, 2, 0);
        HaltingSample b = sample_almost_halting(rng, machine, 2, 1);
        // combine (already scaled): psi = a + b is again a superposition of
        // almost-halting components; alpha_i read off from the norms
        CVec combined = a.ragged + b.ragged;
        Rational nsq = combined.norm_sq();
        if (nsq == 0) continue;
        double na = std::sqrt(to_double(a.ragged.norm_sq() / nsq));
        double nb = std::sqrt(to_double(b.ragged.norm_sq() / nsq));
        double budget = std::pow(na * std::sqrt(a.eps) + nb * std::sqrt(b.eps), 2.0);
        auto profile = machine.qf_weight_profile_scaled(combined, 2, a.t);
        double worst = 0;
        for (int t = 1; t < a.t; ++t)
            worst = std::max(worst, amp_to_complex(profile[static_cast<std::size_t>(t)], machine.radicand()).real());
        double at_t = amp_to_complex(profile[static_cast<std::size_t>(a.t)], machine.radicand()).real();
        double measured = std::max(worst, 1.0 - at_t);
        if (measured > budget + kSlack) ++failures;
    }
    return make_result("halting-superposition", failures, trials);
}

SuiteResult suite_almost_orthogonality(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x616c6d6full);
    Machine machine(identity_machine());
    int failures = 0;
    int used = 0;
    for (int trial = 0; trial < trials; ++trial) {
        // t-halting-ish at t = 3 (length 2) versus t' = 2 (length 1)
        HaltingSample a = sample_almost_halting(rng, machine, 2, 0);
        HaltingSample b = sample_almost_halting(rng, machine, 1, 0);
        if (a.eps + b.eps > 1) continue;
        ++used;
        CVec b_padded(ragged_dim(2));
        for (std::size_t i = 0; i < b.ragged.dim(); ++i) b_padded[i] = b.ragged[i];
        CRat overlap = inner_product(b_padded, a.ragged);
        double na = std::sqrt(to_double(a.ragged.norm_sq())), nb = std::sqrt(to_double(b.ragged.norm_sq()));
        double value = std::abs(overlap.to_complex()) / (na * nb);
        double bound = std::sqrt(1.0 - std::pow(1.0 - a.eps - b.eps, 2.0));
        if (value > bound + kSlack) ++failures;
    }
    return make_result("almost-orthogonality", failures, used);
}

SuiteResult suite_chi_nonnegative(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x63686930ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 2 + (rng() % 3);
        int parts = 2 + static_cast<int>(rng() % 3);
        Ensemble ensemble;
        double total = 0;
        for (int i = 0; i < parts; ++i) {
            double w = unit(rng) + 1e-3;
            ensemble.weights.push_back(w);
            ensemble.states.push_back(random_density(rng, dim));
            total += w;
        }
        for (auto& w : ensemble.weights) w /= total;
        if (chi_quantity(ensemble) < -kSlack) ++failures;
    }
    return make_result("chi-nonnegative", failures, trials);
}

SuiteResult suite_chi_monotone(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x63686931ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 3;
        Ensemble ensemble;
        double total = 0;
        for (int i = 0; i < 3; ++i) {
            double w = unit(rng) + 1e-3;
            ensemble.weights.push_back(w);
            ensemble.states.push_back(random_density(rng, dim));
            total += w;
        }
        for (auto& w : ensemble.weights) w /= total;
        // orthonormal pair for the measurement channel
        std::vector<std::vector<std::complex<double>>> ortho;
        ortho.push_back({1.0, 0.0, 0.0});
        ortho.push_back({0.0, 1.0, 0.0});
        Ensemble measured = diagonal_measurement(ensemble, ortho);
        if (chi_quantity(measured) > chi_quantity(ensemble) + 1e-8) ++failures;
    }
    return make_result("chi-monotone-under-measurement", failures, trials);
}

SuiteResult suite_gram_schmidt(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x6772616dull);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t dim = 2 + (rng() % 4);
        std::size_t count = 1 + (rng() % (dim + 1));
        std::vector<CVec> vectors;
        for (std::size_t i = 0; i < count; ++i) vectors.push_back(random_cvec(rng, dim));
        auto ortho = gram_schmidt(vectors);
        for (std::size_t i = 0; i < ortho.size(); ++i) {
            if (ortho[i].direction.norm_sq() != ortho[i].norm_sq) ++failures;
            for (std::size_t j = i + 1; j < ortho.size(); ++j)
                if (!inner_product(ortho[i].direction, ortho[j].direction).is_zero()) ++failures;
        }
        // span equality both ways
        std::vector<CVec> dirs;
        for (const auto& u : ortho) dirs.push_back(u.direction);
        for (const auto& v : vectors)
            if (!rank_and_membership(dirs, v).second) ++failures;
        for (const auto& d : dirs)
            if (!rank_and_membership(vectors, d).second) ++failures;
    }
    return make_result("gram-schmidt-exact", failures, trials);
}

SuiteResult suite_blind_coding(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x636f6465ull);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> words(1, 64);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> lengths;
        int count = words(rng);
        Rational mass(0);
        for (int i = 0; i < count; ++i) {
            int next = len(rng);
            mpz_class denom;
            mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(next));
            Rational add = Rational(1) / Rational(denom);
            if (mass + add > 1) break;
            mass += add;
            lengths.push_back(next);
        }
        if (lengths.empty()) lengths.push_back(1);
        PrefixCode code = blind_prefix_code(lengths);
        if (!code.is_prefix_free()) ++failures;
        if (code.consumed_mass > 1) ++failures;
        for (std::size_t i = 0; i < lengths.size(); ++i)
            if (static_cast<int>(code.codewords[i].size()) != lengths[i]) ++failures;
    }
    return make_result("blind-prefix-coding", failures, trials);
}

SuiteResult suite_compression_roundtrip(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x636f6d70ull);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4);
        std::size_t dim = std::size_t{1} << n;
        std::size_t count = 1 + (rng() % dim);
        std::vector<CVec> span;
        for (std::size_t i = 0; i < count; ++i) span.push_back(random_cvec(rng, dim));
        std::vector<ScaledUnitVector> ortho = gram_schmidt(span);
        if (ortho.empty()) continue;
        CompressionMap map = CompressionMap::build(span, dim);
        // random exact member of U
        CVec psi(dim);
        for (const auto& u : ortho) {
            CRat c = random_crat(rng);
            psi += CRat(c.re / u.norm_sq, c.im / u.norm_sq) * u.direction;
        }
        if (psi.is_zero()) continue;
        CompressedVec chi = compress(map, psi);
        if (!(decompress_exact(map, chi) == psi)) ++failures;
        // float path error against the exact route
        auto approx = decompress_float(map, chi.to_complex(), 1e-6);
        auto exact = psi.to_complex();
        double err = 0;
        for (std::size_t i = 0; i < approx.size(); ++i) err += std::norm(approx[i] - exact[i]);
        if (std::sqrt(err) > 1e-6 * std::sqrt(to_double(psi.norm_sq()))) ++failures;
    }
    return make_result("compression-roundtrip", failures, trials);
}

SuiteResult suite_machine_validation(const VerifyConfig& config) {
    int failures = 0;
    std::ostringstream details;
    auto expect = [&](const char* name, const QtmSpec& spec, bool expected) {
        Machine machine(spec);
        bool got = machine.validate_unitarity(6, 2);
        if (got != expected) {
            ++failures;
            details << name << " ";
        }
    };
    expect("identity", identity_machine(), true);
    expect("coin", coin_machine(), true);
    expect("non-halting", non_halting_machine(), true);
    expect("colliding", colliding_machine(), false);
    expect("param-strip", param_strip_machine(), true);
    for (std::uint64_t s = 1; s <= 3; ++s)
        expect("random", random_reversible_machine(s, 1, s % 2 == 0), true);
    for (const auto& path : config.machine_files) {
        Machine machine(load_machine_file(path));
        if (!machine.validate_unitarity(6, 2)) {
            ++failures;
            details << path << " ";
        }
    }
    SuiteResult result;
    result.name = "machine-validation";
    result.pass = failures == 0;
    result.details = failures == 0 ? "all fixtures behave as expected" : ("unexpected: " + details.str());
    return result;
}

SuiteResult suite_norm_preservation(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x756e6974ull);
    int failures = 0;
    std::vector<QtmSpec> specs = {identity_machine(), coin_machine(), random_reversible_machine(7, 1, true)};
    int used = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const Machine machine(specs[static_cast<std::size_t>(trial) % specs.size()]);
        int n = 1 + static_cast<int>(rng() % 2);
        CVec psi(ragged_dim(n));
        std::size_t offset = (std::size_t{1} << n) - 1;
        for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) psi[offset + i] = random_crat(rng);
        if (psi.is_zero()) continue;
        ++used;
        Rational nsq = psi.norm_sq();
        for (int t = 1; t <= 4; ++t) {
            GlobalState g = machine.run(psi, n, t);
            Amp total = g.norm_sq();
            // exact preservation of the squared norm
            if (amp_real_cmp(total, nsq, machine.radicand()) != 0) ++failures;
        }
    }
    return make_result("norm-preservation", failures, used);
}

SuiteResult suite_source_consistency(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed ^ 0x73726373ull);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        SourceModel source = SourceModel::make_iid_diag(unit(rng));
        if (trial % 2 == 1) {
            double p = unit(rng), q = unit(rng);
            source = SourceModel::make_markov({p, 1 - p, q, 1 - q});
        }
        int n = 2 + static_cast<int>(rng() % 3);
        FMat big = local_density(source, n + 1);
        FMat small = local_density(source, n);
        // partial trace over the last site
        std::size_t dim = small.rows();
        double worst = 0;
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) {
                std::complex<double> acc = big.at(2 * r, 2 * c) + big.at(2 * r + 1, 2 * c + 1);
                worst = std::max(worst, std::abs(acc - small.at(r, c)));
            }
        if (worst > 1e-12) ++failures;
    }
    return make_result("source-consistency", failures, trials);
}

VerifyConfig parse_verify_config(const std::string& text) {
    VerifyConfig config;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto bang = line.find("#!");
        if (bang != std::string::npos) line = line.substr(0, bang);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "seed:") ls >> config.seed;
        else if (key == "trials:") ls >> config.trials;
        else if (key == "machine:") {
            std::string path;
            ls >> path;
            config.machine_files.push_back(path);
        } else throw std::invalid_argument("unknown verify config key " + key);
    }
    return config;
}

std::vector<SuiteResult> run_verify_suites(const VerifyConfig& config) {
    std::vector<SuiteResult> results;
    results.push_back(suite_gram_schmidt(config.seed, std::min(config.trials, 200)));
    results.push_back(suite_norm_inequality(config.seed, config.trials));
    results.push_back(suite_pure_trace_distance(config.seed, config.trials));
    results.push_back(suite_isometry_composition(config.seed, std::min(config.trials, 300)));
    results.push_back(suite_halting_matrix_element(config.seed, config.trials));
    results.push_back(suite_halting_superposition(config.seed, config.trials));
    results.push_back(suite_almost_orthogonality(config.seed, config.trials));
    results.push_back(suite_chi_nonnegative(config.seed, std::min(config.trials, 400)));
    results.push_back(suite_chi_monotone(config.seed, std::min(config.trials, 300)));
    results.push_back(suite_blind_coding(config.seed, config.trials));
    results.push_back(suite_compression_roundtrip(config.seed, std::min(config.trials, 200)));
    results.push_back(suite_machine_validation(config));
    results.push_back(suite_norm_preservation(config.seed, std::min(config.trials, 200)));
    results.push_back(suite_source_consistency(config.seed, std::min(config.trials, 100)));
    return results;
}

}  // namespace qkolmo
