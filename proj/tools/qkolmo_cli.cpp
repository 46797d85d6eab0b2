// Batch front end: parses machine and source files, dispatches the analyses
// and prints deterministic text or TSV reports.
#include <CLI11.hpp>

#include "qkolmo/brudno.hpp"
#include "qkolmo/coding.hpp"
#include "qkolmo/halting.hpp"
#include "qkolmo/machines.hpp"
#include "qkolmo/qtm_io.hpp"
#include "qkolmo/universal.hpp"
#include "qkolmo/verify.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace qkolmo;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

QtmSpec load_machine_arg(const std::string& arg) {
    if (arg == "builtin:identity") return identity_machine();
    if (arg == "builtin:coin") return coin_machine();
    if (arg == "builtin:non-halting") return non_halting_machine();
    if (arg == "builtin:colliding") return colliding_machine();
    if (arg == "builtin:param-strip") return param_strip_machine();
    if (arg.rfind("builtin:random:", 0) == 0) {
        std::uint64_t seed = std::stoull(arg.substr(15));
        return random_reversible_machine(seed, 1, seed % 2 == 0);
    }
    if (arg.rfind("builtin:fixed-length:", 0) == 0) return fixed_length_halting_machine(std::stoi(arg.substr(21)));
    return load_machine_file(arg);
}

void print_provenance(std::ostream& os, const Machine& machine, const Caps& caps, const std::string& mode) {
    os << "# machine: " << std::hex << std::setw(16) << std::setfill('0') << machine.hash() << std::dec
       << std::setfill(' ') << "\n";
    os << "# caps: t=" << caps.t_max << " nexact=" << caps.n_exact_max << " nnet=" << caps.n_net_max << "\n";
    if (!mode.empty()) os << "# mode: " << mode << "\n";
}

std::string classical_output_or_summary(const QubitString& s) {
    // classical pure output prints as its bit string; anything else as a summary
    if (s.is_exact()) {
        const SMat& m = s.exact();
        if (m.entries().size() == 1) {
            const auto& [rc, v] = *m.entries().begin();
            if (rc.first == rc.second && v.re == 1)
                return index_string(rc.first).empty() ? "(empty)" : index_string(rc.first);
        }
    } else {
        FMat m = s.to_fmat();
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (std::abs(m.at(i, i) - std::complex<double>(1.0, 0.0)) < 1e-9)
                return (index_string(i).empty() ? "(empty)" : index_string(i)) + " (within 1e-9)";
    }
    std::ostringstream os;
    os << "state on H_<= " << s.max_len() << " (base length " << base_length(s) << ", average length "
       << average_length(s) << ")";
    return os.str();
}

CVec parse_vector_arg(const std::string& arg, int n) {
    std::vector<CRat> entries;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) entries.push_back(parse_crat(item));
    if (entries.size() != (std::size_t{1} << n))
        throw std::invalid_argument("vector needs exactly 2^n amplitudes");
    CVec v(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) v[i] = entries[i];
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Turing machine and quantum Kolmogorov complexity laboratory"};
    app.require_subcommand(1);
    Caps caps = Caps::from_env();

    std::string machine_path, input_bits, vector_arg, out_path, format = "text";
    std::string delta_arg = "1/100", eps_arg, mode_arg = "exact", source_path, config_path, target_bits;
    std::string lengths_arg, ensemble_path, sizes_arg = "4,8,12,16", program_path;
    int t_max = 16, n_max = 3, n_arg = 1, t_arg = 0, max_len = 4, k_max = 0;
    long dim_arg = 8;
    double delta_f = 0.0, eps_f = 0.1;
    std::uint64_t seed = 1;
    int trials = 1000;

    auto* validate = app.add_subcommand("validate", "check evolution unitarity on reachable windows");
    validate->add_option("machine", machine_path)->required();
    validate->add_option("--tmax", t_max);
    validate->add_option("--nmax", n_max);

    auto* simulate = app.add_subcommand("simulate", "run a machine on a classical input");
    simulate->add_option("machine", machine_path)->required();
    simulate->add_option("--input", input_bits)->required();
    simulate->add_option("--tmax", t_max);

    auto* halting = app.add_subcommand("halting-spaces", "exact halting subspaces for one input length");
    halting->add_option("machine", machine_path)->required();
    halting->add_option("--n", n_arg)->required();
    halting->add_option("--tmax", t_max);
    halting->add_option("--out", out_path);

    auto* approx = app.add_subcommand("approx-spaces", "delta-approximate halting spaces");
    approx->add_option("machine", machine_path)->required();
    approx->add_option("--n", n_arg)->required();
    approx->add_option("--delta", delta_arg);
    approx->add_option("--t", t_arg);
    approx->add_option("--tmax", t_max);
    approx->add_option("--out", out_path);

    auto* code = app.add_subcommand("code", "blind prefix codewords for a length sequence");
    code->add_option("--lengths", lengths_arg)->required();

    auto* encode = app.add_subcommand("encode", "encode a halting input into a universal program");
    encode->add_option("machine", machine_path)->required();
    encode->add_option("--input", input_bits);
    encode->add_option("--vector", vector_arg);
    encode->add_option("--n", n_arg);
    encode->add_option("--tmax", t_max);
    encode->add_option("--mode", mode_arg);
    encode->add_option("--out", out_path);

    auto* decode = app.add_subcommand("decode", "decode a universal program file");
    decode->add_option("program", program_path)->required();
    decode->add_option("--delta", delta_f);
    decode->add_option("--tmax", t_max);

    auto* qc = app.add_subcommand("qc-bound", "searched upper bound on quantum complexity");
    qc->add_option("machine", machine_path)->required();
    qc->add_option("--target", target_bits)->required();
    qc->add_option("--delta", delta_f)->required();
    qc->add_option("--max-len", max_len);
    qc->add_option("--kmax", k_max);
    qc->add_option("--tmax", t_max);

    auto* counting = app.add_subcommand("counting", "quantum counting bound");
    counting->add_option("--d", dim_arg)->required();
    counting->add_option("--delta", delta_f);

    auto* chi = app.add_subcommand("chi", "Holevo chi of an ensemble file");
    chi->add_option("ensemble", ensemble_path)->required();

    auto* brudno = app.add_subcommand("brudno", "typical projector report for a source");
    brudno->add_option("source", source_path)->required();
    brudno->add_option("--sizes", sizes_arg);
    brudno->add_option("--eps", eps_f);
    brudno->add_option("--format", format);

    auto* verify = app.add_subcommand("verify-suite", "run every module invariant suite");
    verify->add_option("--config", config_path);
    verify->add_option("--seed", seed);
    verify->add_option("--trials", trials);

    auto* dump = app.add_subcommand("dump-machine", "canonical machine-spec serialization");
    dump->add_option("machine", machine_path)->required();
    dump->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code_ = app.exit(e);
        return code_ == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) {
            Machine machine(load_machine_arg(machine_path));
            print_provenance(std::cout, machine, caps, "");
            bool ok = machine.validate_unitarity(t_max, n_max);
            std::cout << "unitary: " << (ok ? "yes" : "no") << "\n";
            return kExitOk;
        }
        if (*simulate) {
            Machine machine(load_machine_arg(machine_path));
            print_provenance(std::cout, machine, caps, "");
            QubitString input = QubitString::classical(input_bits);
            auto tau = machine.halting_time(input, t_max);
            if (!tau) {
                std::cout << "does not halt within t=" << t_max << "\n";
                return kExitDomain;
            }
            auto output = machine.apply(input, t_max);
            std::cout << "halts at t=" << *tau << ", output " << classical_output_or_summary(*output) << "\n";
            return kExitOk;
        }
        if (*halting) {
            Machine machine(load_machine_arg(machine_path));
            HaltingAnalyzer analyzer(machine, caps);
            std::ostringstream os;
            print_provenance(os, machine, caps, "exact");
            long total = 0;
            for (int t = 1; t <= t_max; ++t) {
                const HaltingSpace& space = analyzer.exact_halting_space(n_arg, t);
                if (space.dim() == 0) continue;
                total += space.dim();
                os << "t=" << t << " dim=" << space.dim() << "\n";
                os << dump_subspace(space.basis);
            }
            os << "total dimension: " << total << " of " << (1L << n_arg) << "\n";
            write_output(out_path, os.str());
            return kExitOk;
        }
        if (*approx) {
            Machine machine(load_machine_arg(machine_path));
            HaltingAnalyzer analyzer(machine, caps);
            Rational delta = parse_rational(delta_arg);
            std::ostringstream os;
            print_provenance(os, machine, caps, "approx");
            int lo = t_arg > 0 ? t_arg : 1, hi = t_arg > 0 ? t_arg : t_max;
            for (int t = lo; t <= hi; ++t) {
                ApproxHaltingSpace space = analyzer.approx_halting_space(n_arg, delta, t);
                os << "t=" << t << " dim=" << space.dim() << " eps=" << space.eps.get_str() << "\n";
                std::vector<ScaledUnitVector> scaled;
                for (const auto& v : space.basis) scaled.emplace_back(v);
                os << dump_subspace(scaled);
            }
            write_output(out_path, os.str());
            return kExitOk;
        }
        if (*code) {
            std::vector<int> lengths;
            std::stringstream ss(lengths_arg);
            std::string item;
            while (std::getline(ss, item, ',')) lengths.push_back(std::stoi(item));
            if (!kraft_check(lengths)) {
                std::cout << "lengths violate the Kraft inequality\n";
                return kExitDomain;
            }
            PrefixCode pc = blind_prefix_code(lengths);
            for (const auto& w : pc.codewords) std::cout << w << "\n";
            return kExitOk;
        }
        if (*encode) {
            Machine machine(load_machine_arg(machine_path));
            HaltingAnalyzer analyzer(machine, caps);
            CVec psi;
            int n;
            if (!vector_arg.empty()) {
                n = n_arg;
                psi = parse_vector_arg(vector_arg, n);
            } else {
                n = static_cast<int>(input_bits.size());
                psi = CVec(std::size_t{1} << n);
                std::size_t value = input_bits.empty() ? 0 : string_index(input_bits) - ((std::size_t{1} << n) - 1);
                psi[value] = CRat(1);
            }
            PipelineMode mode = mode_arg == "approx" ? PipelineMode::approx : PipelineMode::exact;
            UniversalProgram program = encode_input(analyzer, psi, n, t_max, mode);
            std::ostringstream os;
            os << program_to_text(program);
            write_output(out_path, os.str());
            std::cerr << "quantum length " << program.quantum_length() << " (n+1=" << n + 1 << "), codeword "
                      << program.codeword << "\n";
            return kExitOk;
        }
        if (*decode) {
            UniversalProgram program = parse_program_text(read_file(program_path));
            QubitString output =
                delta_f > 0 ? decode_program(program, delta_f, t_max, caps) : decode_program_exact(program, t_max, caps);
            std::cout << "# mode: " << (delta_f > 0 ? "float" : "exact") << "\n";
            std::cout << "decoded output: " << classical_output_or_summary(output) << "\n";
            return kExitOk;
        }
        if (*qc) {
            Machine machine(load_machine_arg(machine_path));
            print_provenance(std::cout, machine, caps, k_max > 0 ? "approximation-scheme" : "fixed-delta");
            QcSearchConfig config;
            config.max_len = max_len;
            config.t_max = t_max;
            config.k_max = k_max;
            QubitString target = QubitString::classical(target_bits);
            QcBound bound = qc_upper_bound(machine, target, delta_f, config);
            if (bound.found)
                std::cout << "upper bound (searched set, length <= " << bound.searched_max_len
                          << "): " << bound.bound << " via " << bound.witness << "\n";
            else
                std::cout << "no candidate succeeded: bound > " << bound.searched_max_len
                          << " over the searched set\n";
            return bound.found ? kExitOk : kExitDomain;
        }
        if (*counting) {
            double bound = counting_bound(dim_arg, delta_f);
            std::cout << "bound: " << bound << "\n";
            return kExitOk;
        }
        if (*chi) {
            std::string text = read_file(ensemble_path);
            std::istringstream in(text);
            std::string line;
            Ensemble ensemble;
            std::size_t dim = 0;
            while (std::getline(in, line)) {
                auto bang = line.find("#!");
                if (bang != std::string::npos) line = line.substr(0, bang);
                std::istringstream ls(line);
                double weight;
                if (!(ls >> weight)) continue;
                std::string colon;
                ls >> colon;
                std::vector<std::complex<double>> amps;
                double re, im;
                char comma;
                while (ls >> re >> comma >> im) amps.emplace_back(re, im);
                if (dim == 0) dim = amps.size();
                if (amps.size() != dim) throw std::invalid_argument("ensemble rows must share one dimension");
                double norm = 0;
                for (auto& z : amps) norm += std::norm(z);
                norm = std::sqrt(norm);
                for (auto& z : amps) z /= norm;
                ensemble.weights.push_back(weight);
                ensemble.states.push_back(FMat::outer(amps, amps));
            }
            std::cout << "chi: " << chi_quantity(ensemble) << "\n";
            return kExitOk;
        }
        if (*brudno) {
            SourceModel source = parse_source_text(read_file(source_path));
            std::vector<int> sizes;
            std::stringstream ss(sizes_arg);
            std::string item;
            while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
            auto rows = brudno_report(source, sizes, eps_f);
            if (format == "tsv") {
                std::cout << brudno_report_tsv(rows);
            } else {
                std::cout << "# source: " << source.name << ", entropy rate " << entropy_rate(source) << "\n";
                for (const auto& row : rows)
                    std::cout << "n=" << row.n << " beta=" << row.beta << " beta/n=" << row.beta_over_n
                              << " gap=" << row.gap << "\n";
            }
            return kExitOk;
        }
        if (*dump) {
            QtmSpec spec = load_machine_arg(machine_path);
            write_output(out_path, serialize_machine(spec));
            return kExitOk;
        }
        if (*verify) {
            VerifyConfig config;
            if (!config_path.empty()) config = parse_verify_config(read_file(config_path));
            if (verify->count("--seed")) config.seed = seed;
            if (verify->count("--trials")) config.trials = trials;
            config.caps = caps;
            auto results = run_verify_suites(config);
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << " (" << r.details << ")\n";
                all_pass = all_pass && r.pass;
            }
            std::cout << (all_pass ? "all suites passed" : "some suites failed") << " [seed " << config.seed
                      << "]\n";
            return all_pass ? kExitOk : kExitDomain;
        }
    } catch (const CLI::ParseError&) {
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
