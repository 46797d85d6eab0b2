#include "qkolmo/qtm_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace qkolmo {

namespace {

char sym_char(std::uint8_t s) { return s == kBlank ? '#' : static_cast<char>('0' + s); }

std::uint8_t char_sym(char c) {
    if (c == '#') return kBlank;
    if (c == '0') return kSym0;
    if (c == '1') return kSym1;
    throw std::invalid_argument(std::string("bad track symbol '") + c + "'");
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

// s = square * d with d having no square divisor > 1 (trial division).
void square_free_split(const mpz_class& s, mpz_class& root, mpz_class& d) {
    root = 1;
    d = 1;
    mpz_class rest = s;
    for (mpz_class p = 2; p * p <= rest; ++p) {
        if (rest % p != 0) continue;
        int count = 0;
        while (rest % p == 0) {
            rest /= p;
            ++count;
        }
        for (int i = 0; i < count / 2; ++i) root *= p;
        if (count % 2) d *= p;
    }
    d *= rest;
}

}  // namespace

std::string sym_pair_str(std::uint8_t cell) {
    std::string s;
    s.push_back(sym_char(cell_in(cell)));
    s.push_back(sym_char(cell_out(cell)));
    return s;
}

std::uint8_t parse_sym_pair(const std::string& s) {
    if (s.size() != 2) throw std::invalid_argument("tape symbol must be two characters: " + s);
    return pack_cell(char_sym(s[0]), char_sym(s[1]));
}

QtmSpec parse_machine(std::istream& in) {
    QtmSpec spec;
    std::map<std::string, int> state_index;
    bool have_states = false, have_initial = false, have_final = false;
    std::string line;
    int line_no = 0;
    Rational radicand(1);

    auto state_of = [&](const std::string& name) {
        auto it = state_index.find(name);
        if (it == state_index.end())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown state " + name);
        return it->second;
    };

    while (std::getline(in, line)) {
        ++line_no;
        auto bang = line.find("#!");
        if (bang != std::string::npos) line = line.substr(0, bang);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        if (line.rfind("states:", 0) == 0) {
            for (const auto& name : split_ws(line.substr(7))) {
                if (state_index.count(name))
                    throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate state " + name);
                state_index[name] = static_cast<int>(spec.state_names.size());
                spec.state_names.push_back(name);
            }
            have_states = true;
            continue;
        }
        if (line.rfind("initial:", 0) == 0) {
            auto toks = split_ws(line.substr(8));
            if (toks.size() != 1) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad initial line");
            spec.initial_state = state_of(toks[0]);
            have_initial = true;
            continue;
        }
        if (line.rfind("final:", 0) == 0) {
            auto toks = split_ws(line.substr(6));
            if (toks.size() != 1) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad final line");
            spec.final_state = state_of(toks[0]);
            have_final = true;
            continue;
        }

        // rule line
        if (!have_states) throw std::invalid_argument("rule before states: header");
        std::string rule_text = line;
        Rational group_normsq(1);
        auto npos = rule_text.find("normsq:");
        if (npos != std::string::npos) {
            group_normsq = parse_rational(rule_text.substr(npos + 7));
            if (group_normsq <= 0)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": normsq must be positive");
            rule_text = rule_text.substr(0, npos);
        }
        auto arrow = rule_text.find("->");
        if (arrow == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected '->'");
        auto lhs = split_ws(rule_text.substr(0, arrow));
        if (lhs.size() != 2) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad rule source");
        int src_state = state_of(lhs[0]);
        std::uint8_t src_sym = parse_sym_pair(lhs[1]);

        // 1/sqrt(s) = (root_den/(root_num*d_num)) * sqrt(d_num*d_den)-ish; work via num*den
        // s = p/q: sqrt(1/s) = sqrt(q)/sqrt(p) = sqrt(pq)/p; split pq = r^2 d.
        mpz_class p = group_normsq.get_num(), q = group_normsq.get_den();
        mpz_class root, d;
        square_free_split(p * q, root, d);
        // 1/sqrt(s) = root*sqrt(d)/p
        Rational scale = Rational(root) / Rational(p);
        bool irrational_group = d != 1;
        if (irrational_group) {
            Rational dd(d);
            if (radicand == 1) radicand = dd;
            else if (radicand != dd)
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": normsq mixes incompatible radicands within one machine");
        }

        std::vector<Transition> list;
        std::string succ_text = rule_text.substr(arrow + 2);
        std::stringstream branches(succ_text);
        std::string branch;
        while (std::getline(branches, branch, ';')) {
            auto toks = split_ws(branch);
            if (toks.size() != 4)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": bad successor '" + branch + "'");
            Transition tr;
            tr.state = state_of(toks[0]);
            std::uint8_t w = parse_sym_pair(toks[1]);
            tr.write_in = cell_in(w);
            tr.write_out = cell_out(w);
            if (toks[2] == "L") tr.direction = -1;
            else if (toks[2] == "R") tr.direction = +1;
            else throw std::invalid_argument("line " + std::to_string(line_no) + ": direction must be L or R");
            CRat coeff = parse_crat(toks[3]);
            CRat scaled(scale * coeff.re, scale * coeff.im);
            tr.amplitude = irrational_group ? Amp(CRat(), scaled) : Amp(scaled);
            if (tr.amplitude.is_zero())
                throw std::invalid_argument("line " + std::to_string(line_no) + ": zero amplitude");
            list.push_back(std::move(tr));
        }
        if (list.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty successor list");
        if (!spec.rules.emplace(std::make_pair(src_state, src_sym), std::move(list)).second)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate rule source");
    }
    if (!have_states || !have_initial || !have_final)
        throw std::invalid_argument("machine file needs states:, initial: and final: headers");
    spec.radicand = radicand;
    spec.check_well_formed();
    return spec;
}

QtmSpec parse_machine_text(const std::string& text) {
    std::istringstream ss(text);
    return parse_machine(ss);
}

QtmSpec load_machine_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open machine file " + path);
    return parse_machine(f);
}

std::string serialize_machine(const QtmSpec& spec) {
    std::ostringstream os;
    os << "states:";
    for (const auto& name : spec.state_names) os << " " << name;
    os << "\n";
    os << "initial: " << spec.state_names[static_cast<std::size_t>(spec.initial_state)] << "\n";
    os << "final: " << spec.state_names[static_cast<std::size_t>(spec.final_state)] << "\n";
    for (const auto& [key, list] : spec.rules) {
        bool rational = std::all_of(list.begin(), list.end(),
                                    [](const Transition& t) { return t.amplitude.is_rational(); });
        bool irrational = std::all_of(list.begin(), list.end(),
                                      [](const Transition& t) { return t.amplitude.rat.is_zero(); });
        if (!rational && !irrational)
            throw std::logic_error("rule group mixes rational and irrational amplitudes; not serializable");
        os << spec.state_names[static_cast<std::size_t>(key.first)] << " " << sym_pair_str(key.second) << " ->";
        bool first = true;
        for (const Transition& tr : list) {
            if (!first) os << " ;";
            first = false;
            // irr*sqrt(d) is written as (irr*d)/sqrt(d), i.e. coefficient irr*d with normsq d
            CRat c = rational ? tr.amplitude.rat
                              : CRat(spec.radicand * tr.amplitude.irr.re, spec.radicand * tr.amplitude.irr.im);
            os << " " << spec.state_names[static_cast<std::size_t>(tr.state)] << " "
               << sym_pair_str(pack_cell(tr.write_in, tr.write_out)) << " "
               << (tr.direction > 0 ? "R" : "L") << " "
               << c.re.get_num().get_str() << "/" << c.re.get_den().get_str()
               << (sgn(c.im) >= 0 ? "+" : "-")
               << mpz_class(abs(c.im.get_num())).get_str() << "/" << c.im.get_den().get_str() << "i";
        }
        if (!rational) {
            // amplitude = coeff*sqrt(d); in file form coeff' / sqrt(d) with coeff' = coeff*d
            os << " normsq: " << spec.radicand.get_num().get_str();
            if (spec.radicand.get_den() != 1) os << "/" << spec.radicand.get_den().get_str();
        }
        os << "\n";
    }
    return os.str();
}

std::uint64_t Machine::hash() const { return machine_hash(spec_); }

std::uint64_t machine_hash(const QtmSpec& spec) {
    std::string text = serialize_machine(spec);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qkolmo
