#include "qkolmo/universal.hpp"

#include "qkolmo/qtm_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qkolmo {

Rational default_eps0(int n) {
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(2 * n));
    return Rational(1) / (Rational(81) * Rational(denom));
}

namespace {

int ceil_log2(int d) {
    if (d < 1) throw std::invalid_argument("ceil_log2 needs d >= 1");
    int bits = 0;
    while ((1 << bits) < d) ++bits;
    return bits;
}

}  // namespace

std::vector<int> HaltingTimeSequence::codeword_lengths() const {
    std::vector<int> out;
    out.reserve(times.size());
    for (const auto& [t, d] : times) out.push_back(n + 1 - ceil_log2(d));
    return out;
}

HaltingTimeSequence halting_time_sequence(const HaltingAnalyzer& analyzer, int n, const Rational& eps0,
                                          int t_max, PipelineMode mode) {
    HaltingTimeSequence seq;
    seq.machine = analyzer.machine().hash();
    seq.n = n;
    seq.eps0 = eps0;
    seq.mode = mode;
    long total = 0;
    for (int t = 1; t <= t_max; ++t) {
        int dim = 0;
        if (mode == PipelineMode::exact) dim = analyzer.exact_halting_space(n, t).dim();
        else dim = analyzer.approx_halting_space(n, eps0, t).dim();
        if (dim > 0) {
            seq.times.emplace_back(t, dim);
            total += dim;
        }
    }
    if (total > (1L << n)) throw std::logic_error("halting dimensions exceed the space dimension");
    return seq;
}

int UniversalProgram::quantum_length() const {
    return static_cast<int>(codeword.size()) + ceil_log2(static_cast<int>(payload.dim()));
}

std::size_t UniversalProgram::description_bits() const {
    std::size_t bytes = machine_text.size();
    return self_delim_encode(static_cast<long>(bytes)).size() + 8 * bytes;
}

UniversalProgram encode_input(const HaltingAnalyzer& analyzer, const CVec& psi_hn, int n, int t_max,
                              PipelineMode mode) {
    const Machine& machine = analyzer.machine();
    if (psi_hn.dim() != (std::size_t{1} << n)) throw std::invalid_argument("encode_input dimension mismatch");

    // halting time of the input
    QubitString density = QubitString::pure_from_scaled(hn_to_ragged(psi_hn, n), n);
    std::optional<int> tau = machine.halting_time(density, t_max);
    if (!tau) throw std::domain_error("encode_input: the input does not halt within the horizon");

    Rational eps0 = default_eps0(n);
    HaltingTimeSequence seq = halting_time_sequence(analyzer, n, eps0, t_max, mode);
    std::size_t index = seq.times.size();
    for (std::size_t i = 0; i < seq.times.size(); ++i)
        if (seq.times[i].first == *tau) { index = i; break; }
    if (index == seq.times.size())
        throw std::domain_error("encode_input: halting time missing from the halting time sequence");

    std::vector<int> lengths = seq.codeword_lengths();
    if (!kraft_check(lengths)) throw std::logic_error("encode_input: codeword lengths break the Kraft inequality");
    PrefixCode code = blind_prefix_code(std::vector<int>(lengths.begin(), lengths.begin() + static_cast<long>(index) + 1));

    std::vector<CVec> space;
    if (mode == PipelineMode::exact) {
        for (const auto& u : analyzer.exact_halting_space(n, *tau).basis) space.push_back(u.direction);
    } else {
        space = analyzer.approx_halting_space(n, eps0, *tau).basis;
    }
    CompressionMap map = CompressionMap::build(space, std::size_t{1} << n);

    UniversalProgram program;
    program.machine_text = serialize_machine(machine.spec());
    program.codeword = code.codewords.back();
    // fine tuning is the identity here: the reference space contains the exact
    // halting vectors for every machine this encoder accepts
    program.payload = compress(map, psi_hn);
    program.input_length = n;
    program.mode = mode;
    if (program.quantum_length() != n + 1)
        throw std::logic_error("encode_input: quantum length law violated");
    return program;
}

namespace {

struct DecodeSpaces {
    int tau = 0;
    CompressionMap map;
};

DecodeSpaces match_codeword(const HaltingAnalyzer& analyzer, const UniversalProgram& program, int t_max) {
    int n = program.input_length;
    Rational eps0 = default_eps0(n);
    PrefixCode code;
    for (int t = 1; t <= t_max; ++t) {
        std::vector<CVec> space;
        if (program.mode == PipelineMode::exact) {
            for (const auto& u : analyzer.exact_halting_space(n, t).basis) space.push_back(u.direction);
        } else {
            space = analyzer.approx_halting_space(n, eps0, t).basis;
        }
        if (space.empty()) continue;
        int len = n + 1 - ceil_log2(static_cast<int>(space.size()));
        code = blind_prefix_extend(std::move(code), len);
        if (code.codewords.back() == program.codeword) {
            DecodeSpaces out;
            out.tau = t;
            out.map = CompressionMap::build(space, std::size_t{1} << n);
            return out;
        }
    }
    throw std::domain_error("decode: codeword matches no halting space within the horizon");
}

}  // namespace

QubitString decode_program_exact(const UniversalProgram& program, int t_max, const Caps& caps) {
    Machine machine(parse_machine_text(program.machine_text));
    HaltingAnalyzer analyzer(machine, caps);
    DecodeSpaces spaces = match_codeword(analyzer, program, t_max);
    CVec psi = decompress_exact(spaces.map, program.payload);
    QubitString density = QubitString::pure_from_scaled(hn_to_ragged(psi, program.input_length), program.input_length);
    std::optional<int> tau = machine.halting_time(density, t_max);
    if (!tau || *tau != spaces.tau)
        throw std::domain_error("decode: decoded state does not halt at the matched time");
    auto out = machine.apply(density, t_max);
    return *out;
}

QubitString decode_program(const UniversalProgram& program, double delta, int t_max, const Caps& caps) {
    if (delta <= 0) throw std::invalid_argument("decode needs delta > 0");
    Machine machine(parse_machine_text(program.machine_text));
    HaltingAnalyzer analyzer(machine, caps);
    DecodeSpaces spaces = match_codeword(analyzer, program, t_max);
    // payload decompressed within delta/3; fine tuning is exact (identity);
    // the simulation itself uses exact amplitudes
    std::vector<std::complex<double>> chi = program.payload.to_complex();
    std::vector<std::complex<double>> psi = decompress_float(spaces.map, chi, delta / 3);
    // normalize against numerical drift
    double norm = 0;
    for (const auto& z : psi) norm += std::norm(z);
    norm = std::sqrt(norm);
    if (norm <= 0) throw std::domain_error("decode: zero payload");
    std::vector<std::complex<double>> ragged(ragged_dim(program.input_length));
    std::size_t offset = (std::size_t{1} << program.input_length) - 1;
    for (std::size_t i = 0; i < psi.size(); ++i) ragged[offset + i] = psi[i] / norm;
    return machine.apply_pure_float(ragged, program.input_length, spaces.tau);
}

std::string program_to_text(const UniversalProgram& program) {
    std::ostringstream os;
    os << "[machine]\n" << program.machine_text;
    if (!program.machine_text.empty() && program.machine_text.back() != '\n') os << "\n";
    os << "[codeword]\n" << program.codeword << "\n";
    os << "[payload]\n";
    for (std::size_t i = 0; i < program.payload.dim(); ++i) {
        const CRat& c = program.payload.coeffs[i];
        os << "nsq " << program.payload.scales[i].get_str() << " : " << c.re.get_num().get_str() << "/"
           << c.re.get_den().get_str() << (sgn(c.im) >= 0 ? "+" : "-") << mpz_class(abs(c.im.get_num())).get_str() << "/"
           << c.im.get_den().get_str() << "i\n";
    }
    os << "[mode]\n" << (program.mode == PipelineMode::exact ? "exact" : "approx") << "\n";
    return os.str();
}

UniversalProgram parse_program_text(const std::string& text) {
    UniversalProgram program;
    std::istringstream in(text);
    std::string line, section;
    std::ostringstream machine_text;
    bool have_codeword = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '[') {
            section = line;
            continue;
        }
        if (section == "[machine]") {
            machine_text << line << "\n";
        } else if (section == "[codeword]") {
            if (!have_codeword) {
                program.codeword = line;
                have_codeword = true;
            }
        } else if (section == "[payload]") {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            if (line.rfind("nsq ", 0) != 0) throw std::invalid_argument("payload line must start with 'nsq'");
            auto colon = line.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("payload line lacks ':'");
            program.payload.scales.push_back(parse_rational(line.substr(4, colon - 4)));
            program.payload.coeffs.push_back(parse_crat(line.substr(colon + 1)));
        } else if (section == "[mode]") {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            if (line == "exact") program.mode = PipelineMode::exact;
            else if (line == "approx") program.mode = PipelineMode::approx;
            else throw std::invalid_argument("unknown pipeline mode " + line);
        }
    }
    program.machine_text = machine_text.str();
    if (program.machine_text.empty() || !have_codeword || program.payload.dim() == 0)
        throw std::invalid_argument("program file misses a required section");
    program.input_length = static_cast<int>(program.codeword.size()) +
                           ceil_log2(static_cast<int>(program.payload.dim())) - 1;
    return program;
}

double counting_bound(long dim, double delta) {
    if (dim < 1) throw std::invalid_argument("counting_bound needs dim >= 1");
    if (delta < 0 || delta >= 1.0 / (2.0 * std::exp(1.0)))
        throw std::invalid_argument("counting_bound needs delta in [0, 1/(2e))");
    double logd = std::log2(static_cast<double>(dim));
    if (delta == 0) return logd;
    return (logd + 4.0 * delta * std::log2(1.0 / delta)) / (1.0 - 4.0 * delta);
}

double chi_quantity(const Ensemble& ensemble) {
    if (ensemble.weights.size() != ensemble.states.size() || ensemble.states.empty())
        throw std::invalid_argument("chi needs matching weights and states");
    double total = 0;
    for (double w : ensemble.weights) {
        if (w < -1e-12) throw std::invalid_argument("chi needs nonnegative weights");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("chi weights must sum to one");
    std::size_t dim = ensemble.states.front().rows();
    FMat average(dim, dim);
    double mixture_entropy = 0;
    for (std::size_t i = 0; i < ensemble.states.size(); ++i) {
        average = average + ensemble.states[i].scaled(ensemble.weights[i]);
        mixture_entropy += ensemble.weights[i] * von_neumann_entropy(ensemble.states[i]);
    }
    return von_neumann_entropy(average) - mixture_entropy;
}

Ensemble diagonal_measurement(const Ensemble& ensemble,
                              const std::vector<std::vector<std::complex<double>>>& ortho) {
    Ensemble out;
    out.weights = ensemble.weights;
    std::size_t buckets = ortho.size() + 1;
    for (const FMat& rho : ensemble.states) {
        FMat diag(buckets, buckets);
        double rest = 1.0;
        for (std::size_t i = 0; i < ortho.size(); ++i) {
            // <phi_i| rho |phi_i>
            std::complex<double> value = 0;
            for (std::size_t r = 0; r < rho.rows(); ++r)
                for (std::size_t c = 0; c < rho.cols(); ++c)
                    value += std::conj(ortho[i][r]) * rho.at(r, c) * ortho[i][c];
            diag.at(i, i) = value.real();
            rest -= value.real();
        }
        diag.at(buckets - 1, buckets - 1) = std::max(0.0, rest);
        out.states.push_back(std::move(diag));
    }
    return out;
}

namespace {

struct Candidate {
    int length;
    QubitString state;
    std::string label;
};

std::vector<Candidate> build_candidates(const QcSearchConfig& config) {
    std::vector<Candidate> out;
    out.push_back({0, QubitString(), "(empty)"});
    for (int len = 1; len <= config.max_len; ++len)
        for (long v = 0; v < (1L << len); ++v) {
            std::string bits;
            for (int b = len - 1; b >= 0; --b) bits.push_back((v >> b) & 1 ? '1' : '0');
            out.push_back({len, QubitString::classical(bits), bits});
        }
    for (std::size_t i = 0; i < config.extra_candidates.size(); ++i)
        out.push_back({base_length(config.extra_candidates[i]), config.extra_candidates[i],
                       "(supplied " + std::to_string(i) + ")"});
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.length < b.length; });
    return out;
}

bool candidate_reaches(const Machine& reference, const QubitString& input, const QubitString& target,
                       double delta, int t_max) {
    try {
        auto result = reference.apply(input, t_max);
        if (!result) return false;
        return qubit_string_trace_distance(*result, target) < delta;
    } catch (const std::runtime_error&) {
        return false;  // evolution left the machine's defined table
    }
}

}  // namespace

QcBound qc_upper_bound(const Machine& reference, const QubitString& target, double delta,
                       const QcSearchConfig& config) {
    QcBound bound;
    bound.searched_max_len = config.max_len;
    for (const Candidate& candidate : build_candidates(config)) {
        bool ok;
        if (config.k_max <= 0) {
            ok = candidate_reaches(reference, candidate.state, target, delta, config.t_max);
        } else {
            ok = true;
            for (long k = 1; k <= config.k_max && ok; ++k)
                ok = candidate_reaches(reference, encode_pair(k, candidate.state), target, 1.0 / static_cast<double>(k),
                                       config.t_max);
        }
        if (ok) {
            bound.found = true;
            bound.bound = candidate.length;
            bound.witness = candidate.label;
            return bound;
        }
    }
    return bound;
}

IncompressibilityReport incompressibility_audit(const Machine& reference,
                                                const std::vector<QubitString>& orthonormal_set, double delta,
                                                const QcSearchConfig& config) {
    IncompressibilityReport report;
    report.count = static_cast<int>(orthonormal_set.size());
    if (orthonormal_set.empty()) throw std::invalid_argument("audit needs a nonempty orthonormal set");
    // exact pairwise orthogonality: Tr(rho_i rho_j) == 0
    int n = 0;
    for (const auto& s : orthonormal_set) n = std::max(n, s.max_len());
    for (std::size_t i = 0; i < orthonormal_set.size(); ++i) {
        const SMat a = QubitString::pad(orthonormal_set[i], n).exact();
        if (!(a * a == a)) throw std::invalid_argument("audit members must be pure");
        for (std::size_t j = i + 1; j < orthonormal_set.size(); ++j) {
            const SMat b = QubitString::pad(orthonormal_set[j], n).exact();
            if ((a * b).trace_real() != 0) throw std::invalid_argument("audit set is not orthonormal");
        }
    }
    double count = static_cast<double>(orthonormal_set.size());
    report.bound_orthonormal = (1.0 - 4.0 * delta) * std::log2(count) - 1.0 - 4.0 * delta * std::log2(1.0 / delta);

    FMat average(ragged_dim(n), ragged_dim(n));
    for (const auto& s : orthonormal_set)
        average = average + QubitString::pad(s, n).to_fmat().scaled(1.0 / count);
    report.bound_holevo =
        von_neumann_entropy(average) - 4.0 * delta * std::log2((count + 1.0) / (2.0 * delta)) - 1.0;

    report.all_found = true;
    double worst = 0;
    for (const auto& s : orthonormal_set) {
        QcBound b = qc_upper_bound(reference, s, delta, config);
        if (!b.found) {
            report.all_found = false;
            worst = std::numeric_limits<double>::infinity();
        } else {
            worst = std::max(worst, static_cast<double>(b.bound));
        }
    }
    report.max_searched_bound = worst;
    double theorem = std::max(report.bound_orthonormal, report.bound_holevo);
    report.consistent = worst > theorem;
    return report;
}

CountingAudit counting_audit(const Machine& toy, int max_len, double delta, int t_max) {
    CountingAudit audit;
    std::vector<QubitString> outputs;
    for (std::size_t i = 0; i < ragged_dim(max_len); ++i) {
        QubitString input = QubitString::classical(index_string(i));
        try {
            auto out = toy.apply(input, t_max);
            if (out && out->is_exact()) outputs.push_back(std::move(*out));
        } catch (const std::runtime_error&) {
            continue;
        }
    }
    audit.outputs = static_cast<int>(outputs.size());
    // greedy maximal orthonormal family of pure outputs; each member is its own
    // delta-cover witness
    std::vector<QubitString> family;
    int n = 0;
    for (const auto& s : outputs) n = std::max(n, s.max_len());
    for (const auto& s : outputs) {
        SMat m = QubitString::pad(s, n).exact();
        if (!(m * m == m)) continue;  // mixed output; skip as a family candidate
        bool orthogonal = true;
        for (const auto& f : family) {
            if ((QubitString::pad(f, n).exact() * m).trace_real() != 0) {
                orthogonal = false;
                break;
            }
        }
        if (orthogonal) family.push_back(s);
    }
    audit.family = static_cast<int>(family.size());
    audit.log2_family = family.empty() ? 0.0 : std::log2(static_cast<double>(family.size()));
    audit.bound = counting_bound((1L << (max_len + 1)) - 1, delta);
    audit.within = audit.log2_family <= audit.bound + 1e-12;
    return audit;
}

}  // namespace qkolmo
