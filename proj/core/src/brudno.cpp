#include "qkolmo/brudno.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <sstream>

namespace qkolmo {

SourceModel SourceModel::make_iid(const FMat& rho, std::string name) {
    SourceModel s;
    s.kind = Kind::iid;
    s.rho = rho;
    s.name = std::move(name);
    s.validate();
    return s;
}

SourceModel SourceModel::make_iid_diag(double p0, std::string name) {
    FMat rho(2, 2);
    rho.at(0, 0) = p0;
    rho.at(1, 1) = 1.0 - p0;
    return make_iid(rho, std::move(name));
}

SourceModel SourceModel::make_markov(const std::vector<double>& p, std::string name) {
    SourceModel s;
    s.kind = Kind::markov_diag;
    s.transition = p;
    s.name = std::move(name);
    if (p.size() != 4) throw std::invalid_argument("markov source needs a 2x2 transition matrix");
    // stationary distribution of [[p00,p01],[p10,p11]]
    double p01 = p[1], p10 = p[2];
    if (p01 + p10 <= 1e-15) {
        s.stationary = {0.5, 0.5};  // both states absorbing; the symmetric mixture
    } else {
        s.stationary = {p10 / (p01 + p10), p01 / (p01 + p10)};
    }
    s.validate();
    return s;
}

bool SourceModel::is_diagonal() const {
    if (kind == Kind::markov_diag) return true;
    return std::abs(rho.at(0, 1)) < 1e-15 && std::abs(rho.at(1, 0)) < 1e-15;
}

void SourceModel::validate() const {
    if (kind == Kind::iid) {
        if (rho.rows() != 2 || rho.cols() != 2) throw std::invalid_argument("iid source needs a 2x2 density");
        if (rho.hermiticity_defect() > 1e-12) throw std::invalid_argument("iid density must be hermitian");
        if (std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) > 1e-12)
            throw std::invalid_argument("iid density must have unit trace");
        for (double lambda : hermitian_eigenvalues(rho))
            if (lambda < -1e-12) throw std::invalid_argument("iid density must be positive semidefinite");
    } else {
        if (transition.size() != 4 || stationary.size() != 2)
            throw std::invalid_argument("markov source needs P (2x2) and pi");
        for (double v : transition)
            if (v < -1e-12 || v > 1 + 1e-12) throw std::invalid_argument("markov transition out of range");
        if (std::abs(transition[0] + transition[1] - 1.0) > 1e-9 ||
            std::abs(transition[2] + transition[3] - 1.0) > 1e-9)
            throw std::invalid_argument("markov transition rows must sum to one");
        // pi P = pi
        double a = stationary[0] * transition[0] + stationary[1] * transition[2];
        if (std::abs(a - stationary[0]) > 1e-9) throw std::invalid_argument("stationary distribution mismatch");
    }
}

SourceModel parse_source_text(const std::string& text) {
    std::istringstream in(text);
    std::string line, kind;
    std::vector<double> rho_vals, p_vals, pi_vals;
    while (std::getline(in, line)) {
        auto bang = line.find("#!");
        if (bang != std::string::npos) line = line.substr(0, bang);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "kind:") ls >> kind;
        else if (key == "rho:") { double v; while (ls >> v) rho_vals.push_back(v); }
        else if (key == "P:") { double v; while (ls >> v) p_vals.push_back(v); }
        else if (key == "pi:") { double v; while (ls >> v) pi_vals.push_back(v); }
        else throw std::invalid_argument("unknown source key " + key);
    }
    if (kind == "iid") {
        if (rho_vals.size() != 4) throw std::invalid_argument("iid source needs rho: p00 p01r p01i p11");
        FMat rho(2, 2);
        rho.at(0, 0) = rho_vals[0];
        rho.at(0, 1) = std::complex<double>(rho_vals[1], rho_vals[2]);
        rho.at(1, 0) = std::complex<double>(rho_vals[1], -rho_vals[2]);
        rho.at(1, 1) = rho_vals[3];
        return SourceModel::make_iid(rho);
    }
    if (kind == "markov") {
        SourceModel s = SourceModel::make_markov(p_vals);
        if (pi_vals.size() == 2) {
            s.stationary = pi_vals;
            s.validate();
        }
        return s;
    }
    throw std::invalid_argument("source kind must be iid or markov");
}

std::string serialize_source(const SourceModel& source) {
    std::ostringstream os;
    os.precision(17);
    if (source.kind == SourceModel::Kind::iid) {
        os << "kind: iid\n";
        os << "rho: " << source.rho.at(0, 0).real() << " " << source.rho.at(0, 1).real() << " "
           << source.rho.at(0, 1).imag() << " " << source.rho.at(1, 1).real() << "\n";
    } else {
        os << "kind: markov\n";
        os << "P: " << source.transition[0] << " " << source.transition[1] << " " << source.transition[2] << " "
           << source.transition[3] << "\n";
        os << "pi: " << source.stationary[0] << " " << source.stationary[1] << "\n";
    }
    return os.str();
}

FMat local_density(const SourceModel& source, int n) {
    if (n < 1 || n > 10) throw std::domain_error("local_density cap: n in [1, 10]");
    std::size_t dim = std::size_t{1} << n;
    FMat out(dim, dim);
    if (source.kind == SourceModel::Kind::iid) {
        // n-fold tensor power
        out = FMat(1, 1);
        out.at(0, 0) = 1.0;
        for (int i = 0; i < n; ++i) {
            std::size_t d = out.rows();
            FMat next(d * 2, d * 2);
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    for (std::size_t a = 0; a < 2; ++a)
                        for (std::size_t b = 0; b < 2; ++b)
                            next.at(r * 2 + a, c * 2 + b) = out.at(r, c) * source.rho.at(a, b);
            out = std::move(next);
        }
        return out;
    }
    auto diag = local_diagonal(source, n);
    for (std::size_t i = 0; i < dim; ++i) out.at(i, i) = diag[i];
    return out;
}

std::vector<double> local_diagonal(const SourceModel& source, int n) {
    if (!source.is_diagonal()) throw std::invalid_argument("local_diagonal needs a diagonal source");
    if (n < 1 || n > 16) throw std::domain_error("local_diagonal cap: n in [1, 16]");
    std::size_t dim = std::size_t{1} << n;
    std::vector<double> out(dim);
    for (std::size_t word = 0; word < dim; ++word) {
        double p = 1.0;
        int prev = -1;
        for (int pos = n - 1; pos >= 0; --pos) {
            int bit = static_cast<int>((word >> pos) & 1);
            if (source.kind == SourceModel::Kind::iid) {
                p *= source.rho.at(static_cast<std::size_t>(bit), static_cast<std::size_t>(bit)).real();
            } else if (prev < 0) {
                p *= source.stationary[static_cast<std::size_t>(bit)];
            } else {
                p *= source.transition[static_cast<std::size_t>(prev * 2 + bit)];
            }
            prev = bit;
        }
        out[word] = p;
    }
    return out;
}

std::vector<std::pair<double, double>> local_spectrum(const SourceModel& source, int n) {
    if (n < 1 || n > 16) throw std::domain_error("local_spectrum cap: n in [1, 16]");
    std::vector<std::pair<double, double>> out;
    if (source.kind == SourceModel::Kind::iid) {
        auto single = hermitian_eigenvalues(source.rho);
        double lo = std::max(0.0, single[0]), hi = std::max(0.0, single[1]);
        // eigenvalues are hi^k lo^(n-k) with multiplicity C(n, k)
        for (int k = 0; k <= n; ++k) {
            double mult = 1.0;
            for (int i = 0; i < k; ++i) mult = mult * static_cast<double>(n - i) / static_cast<double>(i + 1);
            out.emplace_back(std::pow(hi, k) * std::pow(lo, n - k), mult);
        }
    } else {
        for (double p : local_diagonal(source, n)) out.emplace_back(p, 1.0);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return out;
}

double entropy_rate(const SourceModel& source) {
    if (source.kind == SourceModel::Kind::iid) {
        double s = 0;
        for (double lambda : hermitian_eigenvalues(source.rho)) s += eta_log2(lambda);
        return s;
    }
    double s = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            s += source.stationary[static_cast<std::size_t>(i)] *
                 eta_log2(source.transition[static_cast<std::size_t>(i * 2 + j)]);
    return s;
}

TypicalProjector beta_min(const SourceModel& source, int n, double eps) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("beta_min needs eps in (0,1)");
    TypicalProjector out;
    out.n = n;
    double mass = 0, rank = 0;
    for (const auto& [value, mult] : local_spectrum(source, n)) {
        if (mass >= 1.0 - eps) break;
        // take only as many copies of this eigenvalue as needed
        double needed = (1.0 - eps) - mass;
        double copies = (value <= 0) ? mult : std::min(mult, std::ceil(needed / value - 1e-12));
        if (value <= 0) break;
        rank += copies;
        mass += copies * value;
    }
    out.rank = rank;
    out.mass = mass;
    out.log_trace = rank > 0 ? std::log2(rank) : 0.0;
    return out;
}

long symmetric_subspace_dim(int l, int n) {
    if (l < 1 || n < 1) throw std::invalid_argument("symmetric_subspace_dim needs l, n >= 1");
    // C(n + 4^l - 1, 4^l - 1)
    long units = 1L << (2 * l);
    mpz_class result;
    mpz_bin_uiui(result.get_mpz_t(), static_cast<unsigned long>(n + units - 1),
                 static_cast<unsigned long>(units - 1));
    if (!result.fits_slong_p()) throw std::domain_error("symmetric dimension overflow");
    return result.get_si();
}

namespace {

// multisets of size n over {0, ..., units-1}
void enumerate_multisets(int units, int n, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == n) {
        out.push_back(current);
        return;
    }
    int start = current.empty() ? 0 : current.back();
    for (int v = start; v < units; ++v) {
        current.push_back(v);
        enumerate_multisets(units, n, current, out);
        current.pop_back();
    }
}

// A_multiset |omega>: sum over distinct permutations of the units applied blockwise
CVec apply_symmetrized_unit(const std::vector<int>& multiset, const std::string& omega, int l, int n) {
    std::size_t dim = std::size_t{1} << (static_cast<std::size_t>(l) * static_cast<std::size_t>(n));
    CVec out(dim);
    std::vector<int> perm = multiset;
    std::sort(perm.begin(), perm.end());
    auto block_value = [&](int block) {
        int v = 0;
        for (int b = 0; b < l; ++b) v = v * 2 + (omega[static_cast<std::size_t>(block * l + b)] - '0');
        return v;
    };
    do {
        // unit k = (row, col) in M_{2^l}: k = row * 2^l + col
        std::size_t target = 0;
        bool alive = true;
        for (int block = 0; block < n && alive; ++block) {
            int unit = perm[static_cast<std::size_t>(block)];
            int row = unit >> l, col = unit & ((1 << l) - 1);
            if (col != block_value(block)) alive = false;
            else target = (target << l) | static_cast<std::size_t>(row);
        }
        if (alive) out[target] += CRat(1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace

std::vector<CVec> symmetric_span_vectors(const std::string& omega, int l, int n) {
    if (static_cast<int>(omega.size()) != l * n) throw std::invalid_argument("omega must have length l*n");
    if (l * n > 8) throw std::domain_error("symmetric span cap: l*n <= 8");
    std::vector<std::vector<int>> multisets;
    std::vector<int> current;
    enumerate_multisets(1 << (2 * l), n, current, multisets);
    std::vector<CVec> out;
    out.reserve(multisets.size());
    for (const auto& multiset : multisets) out.push_back(apply_symmetrized_unit(multiset, omega, l, n));
    return out;
}

long symmetric_spanning_rank(int l, int n) {
    if (l * n > 4) throw std::domain_error("symmetric rank cap: l*n <= 4");
    std::size_t op_dim = std::size_t{1} << (2 * static_cast<std::size_t>(l) * static_cast<std::size_t>(n));
    std::vector<std::vector<int>> multisets;
    std::vector<int> current;
    enumerate_multisets(1 << (2 * l), n, current, multisets);
    std::vector<CVec> vectorized;
    std::size_t dim = std::size_t{1} << (static_cast<std::size_t>(l) * static_cast<std::size_t>(n));
    for (const auto& multiset : multisets) {
        // vectorize the operator: apply to every computational basis vector
        CVec vec(op_dim);
        for (std::size_t basis = 0; basis < dim; ++basis) {
            std::string omega;
            for (int b = static_cast<int>(static_cast<std::size_t>(l) * static_cast<std::size_t>(n)) - 1; b >= 0; --b)
                omega.push_back(((basis >> b) & 1) ? '1' : '0');
            CVec column = apply_symmetrized_unit(multiset, omega, l, n);
            for (std::size_t r = 0; r < dim; ++r) vec[basis * dim + r] = column[r];
        }
        vectorized.push_back(std::move(vec));
    }
    return exact_rank(vectorized);
}

UniversalProjectorResult universal_typical_projector(const std::vector<std::string>& codewords, int l, int n,
                                                     int m) {
    UniversalProjectorResult result;
    result.l = l;
    result.n = n;
    result.m = m;
    int ln = l * n;
    if (m < ln) throw std::invalid_argument("universal projector needs m >= l*n");
    if (ln > 8 || m > 10) throw std::domain_error("universal projector cap: l*n <= 8, m <= 10");
    for (const auto& w : codewords)
        if (static_cast<int>(w.size()) != ln) throw std::invalid_argument("codeword length must be l*n");
    {
        std::vector<std::string> sorted = codewords;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("codewords must be distinct");
    }

    // steps 5-6: symmetrized spans, filtered by exact independence
    std::vector<ScaledUnitVector> filter;
    std::vector<CVec> accepted;
    for (const auto& omega : codewords) {
        for (CVec& u : symmetric_span_vectors(omega, l, n)) {
            if (u.is_zero()) continue;
            CVec residual = u;
            residual -= project_onto_span(filter, u);
            if (!residual.is_zero()) {
                filter.emplace_back(std::move(residual));
                accepted.push_back(std::move(u));
            }
        }
    }
    result.span_rank = static_cast<long>(accepted.size());

    // step 7: pad with the computational basis of the remaining qubits
    std::size_t out_dim = std::size_t{1} << m;
    std::size_t pad_dim = std::size_t{1} << (m - ln);
    std::vector<CVec> padded;
    for (const auto& u : accepted)
        for (std::size_t tail = 0; tail < pad_dim; ++tail) {
            CVec x(out_dim);
            for (std::size_t r = 0; r < u.dim(); ++r)
                if (!u[r].is_zero()) x[r * pad_dim + tail] = u[r];
            padded.push_back(std::move(x));
        }
    result.rank = static_cast<long>(padded.size());

    // steps 8-9: complete with computational vectors, drop dependents, orthonormalize
    std::vector<CVec> completion = padded;
    {
        std::vector<ScaledUnitVector> gs = gram_schmidt(padded);
        for (std::size_t i = 0; i < out_dim && gs.size() < out_dim; ++i) {
            CVec e = CVec::basis(out_dim, i);
            CVec residual = e;
            residual -= project_onto_span(gs, e);
            if (!residual.is_zero()) {
                gs.emplace_back(std::move(residual));
                completion.push_back(std::move(e));
            }
        }
        result.basis = gram_schmidt(completion);
        result.basis.resize(static_cast<std::size_t>(result.rank),
                            ScaledUnitVector(CVec::basis(out_dim, 0)));
    }

    double rate_power = codewords.empty() ? 1.0 : static_cast<double>(codewords.size());
    result.trace_bound = std::pow(static_cast<double>(n) + 1.0, std::pow(2.0, 2.0 * l)) * rate_power *
                         std::pow(2.0, static_cast<double>(l));
    result.within_bound = static_cast<double>(result.rank) <= result.trace_bound * (1.0 + 1e-12);
    return result;
}

int block_length_lm(long m) {
    if (m < 8) throw std::invalid_argument("block_length_lm needs m >= 8");
    for (long l = 1; l <= 64; l *= 2) {
        // l * 2^{3l} <= m < 2 l 2^{6l}
        long double lower = static_cast<long double>(l) * std::pow(2.0L, static_cast<long double>(3 * l));
        long double upper = 2.0L * static_cast<long double>(l) * std::pow(2.0L, static_cast<long double>(6 * l));
        if (lower <= static_cast<long double>(m) && static_cast<long double>(m) < upper) return static_cast<int>(l);
    }
    throw std::domain_error("block_length_lm found no admissible block length");
}

std::vector<std::string> empirical_typical_codewords(int l, int n, double rate) {
    if (rate <= 0) throw std::invalid_argument("empirical codewords need rate > 0");
    int ln = l * n;
    if (ln > 20) throw std::domain_error("empirical codewords cap: l*n <= 20");
    long cap = 1;
    double cap_exp = std::ceil(rate * n);
    if (cap_exp >= 62) cap = std::numeric_limits<long>::max();
    else cap = 1L << static_cast<long>(cap_exp);
    std::vector<std::string> out;
    std::size_t total = std::size_t{1} << ln;
    int units = 1 << l;
    std::vector<int> counts(static_cast<std::size_t>(units));
    for (std::size_t word = 0; word < total; ++word) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int block = 0; block < n; ++block) {
            int v = static_cast<int>((word >> ((n - 1 - block) * l)) & ((1u << l) - 1));
            counts[static_cast<std::size_t>(v)] += 1;
        }
        double entropy = 0;
        for (int c : counts)
            if (c > 0) entropy += eta_log2(static_cast<double>(c) / static_cast<double>(n));
        if (entropy <= rate + 1e-9) {
            std::string bits;
            for (int b = ln - 1; b >= 0; --b) bits.push_back(((word >> b) & 1) ? '1' : '0');
            out.push_back(std::move(bits));
            if (static_cast<long>(out.size()) >= cap) break;
        }
    }
    return out;
}

std::vector<BrudnoRow> brudno_report(const SourceModel& source, const std::vector<int>& sizes, double eps) {
    std::vector<BrudnoRow> rows;
    double s = entropy_rate(source);
    for (int n : sizes) {
        TypicalProjector proj = beta_min(source, n, eps);
        BrudnoRow row;
        row.n = n;
        row.beta = proj.log_trace;
        row.beta_over_n = proj.log_trace / static_cast<double>(n);
        row.entropy = s;
        row.gap = std::abs(row.beta_over_n - s);
        rows.push_back(row);
    }
    return rows;
}

std::string brudno_report_tsv(const std::vector<BrudnoRow>& rows) {
    std::ostringstream os;
    os << "n\tbeta\tbeta/n\ts\tgap\n";
    for (const auto& row : rows)
        os << row.n << "\t" << row.beta << "\t" << row.beta_over_n << "\t" << row.entropy << "\t" << row.gap
           << "\n";
    return os.str();
}

}  // namespace qkolmo
