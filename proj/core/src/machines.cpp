#include "qkolmo/machines.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace qkolmo {

namespace {

Amp one() { return Amp(CRat(1)); }

void add_rule(QtmSpec& spec, int q, const char* sym, int q2, const char* sym2, int dir, Amp amp = Amp(CRat(1))) {
    auto pack = [](const char* s) {
        auto ch = [](char c) -> std::uint8_t { return c == '#' ? kBlank : static_cast<std::uint8_t>(c - '0'); };
        return pack_cell(ch(s[0]), ch(s[1]));
    };
    Transition tr;
    tr.state = q2;
    std::uint8_t w = pack(sym2);
    tr.write_in = cell_in(w);
    tr.write_out = cell_out(w);
    tr.direction = dir;
    tr.amplitude = std::move(amp);
    spec.rules[{q, pack(sym)}].push_back(std::move(tr));
}

}  // namespace

QtmSpec complete_reversible(QtmSpec spec) {
    const int nstates = spec.state_count();
    // Entry directions already implied by existing rules; default R elsewhere.
    std::vector<int> entry_dir(static_cast<std::size_t>(nstates), 0);
    std::set<std::pair<int, std::uint8_t>> used_range;
    for (const auto& [key, list] : spec.rules) {
        for (const Transition& tr : list) {
            int& dir = entry_dir[static_cast<std::size_t>(tr.state)];
            if (dir == 0) dir = tr.direction;
            used_range.insert({tr.state, pack_cell(tr.write_in, tr.write_out)});
        }
    }
    std::vector<std::pair<int, std::uint8_t>> free_domain, free_range;
    for (int q = 0; q < nstates; ++q)
        for (std::uint8_t s = 0; s < 9; ++s) {
            if (!spec.rules.count({q, s})) free_domain.push_back({q, s});
            if (!used_range.count({q, s})) free_range.push_back({q, s});
        }
    if (free_domain.size() > free_range.size())
        throw std::invalid_argument("partial table cannot be completed injectively");
    for (std::size_t i = 0; i < free_domain.size(); ++i) {
        auto [q, s] = free_domain[i];
        auto [q2, s2] = free_range[i];
        int dir = entry_dir[static_cast<std::size_t>(q2)];
        if (dir == 0) dir = +1;
        Transition tr;
        tr.state = q2;
        tr.write_in = cell_in(s2);
        tr.write_out = cell_out(s2);
        tr.direction = dir;
        tr.amplitude = one();
        spec.rules[{q, s}].push_back(std::move(tr));
    }
    return spec;
}

QtmSpec identity_machine() {
    QtmSpec spec;
    spec.state_names = {"q0", "qf"};
    spec.initial_state = 0;
    spec.final_state = 1;
    add_rule(spec, 0, "##", 1, "##", +1);
    add_rule(spec, 0, "0#", 0, "#0", +1);
    add_rule(spec, 0, "1#", 0, "#1", +1);
    return complete_reversible(spec);
}

QtmSpec non_halting_machine() {
    QtmSpec spec;
    spec.state_names = {"q0", "qf"};
    spec.initial_state = 0;
    spec.final_state = 1;
    const char* syms[] = {"00", "01", "0#", "10", "11", "1#", "#0", "#1", "##"};
    for (const char* s : syms) add_rule(spec, 0, s, 0, s, +1);
    // qf row: harmless self-advance rules to keep the table total
    for (const char* s : syms) add_rule(spec, 1, s, 1, s, +1);
    return spec;
}

QtmSpec colliding_machine() {
    QtmSpec spec;
    spec.state_names = {"q0", "q1", "qf"};
    spec.initial_state = 0;
    spec.final_state = 2;
    // both bit readings write a zero: the columns for inputs "0" and "1" collide
    add_rule(spec, 0, "0#", 1, "0#", +1);
    add_rule(spec, 0, "1#", 1, "0#", +1);
    add_rule(spec, 0, "##", 2, "##", +1);
    return spec;
}

QtmSpec coin_machine() {
    QtmSpec spec;
    spec.state_names = {"q0", "qf"};
    spec.initial_state = 0;
    spec.final_state = 1;
    spec.radicand = 2;
    // amplitude 1/sqrt2 = (1/2) sqrt2 ; -i/sqrt2 = (-i/2) sqrt2
    Amp plus(CRat(), CRat(Rational(1, 2), Rational(0)));
    Amp minus_i(CRat(), CRat(Rational(0), Rational(-1, 2)));
    add_rule(spec, 0, "0#", 1, "#0", +1, plus);
    add_rule(spec, 0, "0#", 1, "#1", +1, minus_i);
    add_rule(spec, 0, "1#", 1, "#0", +1, minus_i);
    add_rule(spec, 0, "1#", 1, "#1", +1, plus);
    add_rule(spec, 0, "##", 1, "##", +1);
    // keep the table total on the final state row
    const char* syms[] = {"00", "01", "0#", "10", "11", "1#", "#0", "#1", "##"};
    for (const char* s : syms) add_rule(spec, 1, s, 0, s, +1);
    // remaining q0 sources map into the free (qf, .) slots
    add_rule(spec, 0, "00", 1, "00", +1);
    add_rule(spec, 0, "01", 1, "01", +1);
    add_rule(spec, 0, "10", 1, "10", +1);
    add_rule(spec, 0, "11", 1, "11", +1);
    add_rule(spec, 0, "#0", 1, "0#", +1);
    add_rule(spec, 0, "#1", 1, "1#", +1);
    return spec;
}

QtmSpec random_reversible_machine(std::uint64_t seed, int extra_states, bool mix_rotation) {
    if (extra_states < 0 || extra_states > 4) throw std::invalid_argument("extra_states out of range");
    std::mt19937_64 rng(seed);
    QtmSpec spec;
    spec.state_names = {"q0", "qf"};
    for (int i = 0; i < extra_states; ++i) spec.state_names.push_back("q" + std::to_string(i + 1));
    spec.initial_state = 0;
    spec.final_state = 1;
    const int nstates = spec.state_count();

    // random bijection (q,s) -> (q',s') plus per-state directions
    std::vector<std::pair<int, std::uint8_t>> domain, range;
    for (int q = 0; q < nstates; ++q)
        for (std::uint8_t s = 0; s < 9; ++s) {
            domain.push_back({q, s});
            range.push_back({q, s});
        }
    std::shuffle(range.begin(), range.end(), rng);
    std::vector<int> dir(static_cast<std::size_t>(nstates));
    for (int q = 0; q < nstates; ++q) dir[static_cast<std::size_t>(q)] = (rng() & 1) ? +1 : -1;

    // bias toward halting: make the blank-blank start reach qf quickly
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (domain[i] == std::make_pair(0, kBlankPair)) {
            for (std::size_t j = 0; j < range.size(); ++j)
                if (range[j].first == 1) { std::swap(range[i], range[j]); break; }
        }
    }

    for (std::size_t i = 0; i < domain.size(); ++i) {
        Transition tr;
        tr.state = range[i].first;
        tr.write_in = cell_in(range[i].second);
        tr.write_out = cell_out(range[i].second);
        tr.direction = dir[static_cast<std::size_t>(range[i].first)];
        tr.amplitude = one();
        spec.rules[domain[i]].push_back(std::move(tr));
    }

    if (mix_rotation) {
        // blend two sources of one state with the rational rotation (3/5, 4/5)
        int q = (extra_states > 0) ? 2 : 0;
        std::uint8_t sa = pack_cell(kSym0, kBlank), sb = pack_cell(kSym1, kBlank);
        Transition ta = spec.rules[{q, sa}].front();
        Transition tb = spec.rules[{q, sb}].front();
        auto scaled = [](const Transition& t, long num, long den) {
            Transition out = t;
            out.amplitude = Amp(CRat(Rational(num, den)));
            return out;
        };
        spec.rules[{q, sa}] = {scaled(ta, 3, 5), scaled(tb, 4, 5)};
        spec.rules[{q, sb}] = {scaled(ta, -4, 5), scaled(tb, 3, 5)};
    }
    return spec;
}

QtmSpec two_phase_machine() {
    QtmSpec spec;
    spec.state_names = {"q0", "qf", "a", "b1", "b2", "z"};
    spec.initial_state = 0;
    spec.final_state = 1;
    const int A = 2, B1 = 3, B2 = 4, Z = 5;
    // first bit 0: copy it and halt at t = 2; first bit 1: copy and halt at t = 3
    add_rule(spec, 0, "0#", A, "#0", +1);
    add_rule(spec, 0, "1#", B1, "#1", +1);
    add_rule(spec, 0, "##", Z, "##", +1);
    for (const char* s : {"0#", "1#", "##"}) {
        add_rule(spec, A, s, 1, s, +1);
        add_rule(spec, B1, s, B2, s, +1);
        add_rule(spec, B2, s, 1, s, +1);
    }
    const char* all[] = {"00", "01", "0#", "10", "11", "1#", "#0", "#1", "##"};
    for (const char* s : all) add_rule(spec, Z, s, Z, s, +1);
    return complete_reversible(spec);
}

QtmSpec fixed_length_halting_machine(int len) {
    if (len < 1 || len > 6) throw std::invalid_argument("fixed_length_halting_machine: len out of range");
    QtmSpec spec;
    spec.state_names = {"q0", "qf"};
    spec.initial_state = 0;
    spec.final_state = 1;
    auto add_state = [&](const std::string& name) {
        spec.state_names.push_back(name);
        return static_cast<int>(spec.state_names.size()) - 1;
    };
    std::vector<int> scan(static_cast<std::size_t>(len) + 1);
    scan[0] = 0;
    for (int i = 1; i <= len; ++i) scan[static_cast<std::size_t>(i)] = add_state("s" + std::to_string(i));
    auto sink_after = [&](int src, std::initializer_list<const char*> syms) {
        int z = add_state("z" + std::to_string(src));
        for (const char* s : syms) add_rule(spec, src, s, z, s, +1);
        const char* all[] = {"00", "01", "0#", "10", "11", "1#", "#0", "#1", "##"};
        for (const char* s : all) add_rule(spec, z, s, z, s, +1);
        return z;
    };
    for (int i = 0; i < len; ++i) {
        int cur = scan[static_cast<std::size_t>(i)], next = scan[static_cast<std::size_t>(i + 1)];
        add_rule(spec, cur, "0#", next, "#0", +1);
        add_rule(spec, cur, "1#", next, "#1", +1);
        sink_after(cur, {"##"});
    }
    int last = scan[static_cast<std::size_t>(len)];
    add_rule(spec, last, "##", 1, "##", +1);
    sink_after(last, {"0#", "1#"});
    sink_after(1, {"00", "01", "0#", "10", "11", "1#", "#0", "#1", "##"});
    return spec;
}

QtmSpec param_strip_machine(int max_ones) {
    if (max_ones < 0 || max_ones > 4) throw std::invalid_argument("max_ones out of range");
    QtmSpec spec;
    spec.initial_state = 0;
    spec.final_state = 1;
    auto add_state = [&](const std::string& name) {
        spec.state_names.push_back(name);
        return static_cast<int>(spec.state_names.size()) - 1;
    };
    add_state("q0");  // doubles as ones-counter c=0
    add_state("qf");

    const int A = max_ones;
    std::vector<int> ones(static_cast<std::size_t>(A) + 1);  // ones[c]: counted c leading 1s
    ones[0] = 0;
    for (int c = 1; c <= A; ++c) ones[static_cast<std::size_t>(c)] = add_state("p1_" + std::to_string(c));

    // d[c][i]: after the separator, about to cross digit i of c+1
    std::vector<std::vector<int>> dig(static_cast<std::size_t>(A) + 1);
    for (int c = 0; c <= A; ++c)
        for (int i = 0; i <= c; ++i)
            dig[static_cast<std::size_t>(c)].push_back(add_state("d_" + std::to_string(c) + "_" + std::to_string(i)));

    std::vector<int> fetch(static_cast<std::size_t>(A) + 1);
    for (int c = 0; c <= A; ++c) fetch[static_cast<std::size_t>(c)] = add_state("f_" + std::to_string(c));

    // w[c][s][j]: carrying bit s leftward, j steps done (lands after p0-1 steps)
    // b[c][j]: walking back rightward
    auto p0 = [](int c) { return 2 * c + 2; };
    std::vector<std::vector<std::vector<int>>> walk(static_cast<std::size_t>(A) + 1);
    std::vector<std::vector<int>> back(static_cast<std::size_t>(A) + 1);
    for (int c = 0; c <= A; ++c) {
        walk[static_cast<std::size_t>(c)].resize(2);
        for (int s = 0; s < 2; ++s)
            for (int j = 0; j < p0(c); ++j)
                walk[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)].push_back(
                    add_state("w_" + std::to_string(c) + "_" + std::to_string(s) + "_" + std::to_string(j)));
        for (int j = 0; j < p0(c); ++j)
            back[static_cast<std::size_t>(c)].push_back(add_state("b_" + std::to_string(c) + "_" + std::to_string(j)));
    }
    int sink_count = 0;
    auto fresh_sink = [&]() { return add_state("z" + std::to_string(sink_count++)); };

    const char* track_out[] = {"0", "1", "#"};
    auto sym = [&](int in, int out) {
        std::string s = std::string(track_out[in]) + track_out[out];
        return s;
    };

    auto add = [&](int q, const std::string& s, int q2, const std::string& s2, int dir) {
        add_rule(spec, q, s.c_str(), q2, s2.c_str(), dir);
    };
    auto sink_state = [&](int src, const std::vector<std::string>& srcsyms) {
        int z = fresh_sink();
        for (const auto& s : srcsyms) add(src, s, z, s, +1);
        for (int in = 0; in < 3; ++in)
            for (int out = 0; out < 3; ++out) add(z, sym(in, out), z, sym(in, out), +1);
        return z;
    };

    // Phase 1: count leading ones, cross the separator zero.
    for (int c = 0; c <= A; ++c) {
        int qc = ones[static_cast<std::size_t>(c)];
        if (c < A) add(qc, "1#", ones[static_cast<std::size_t>(c + 1)], "1#", +1);
        add(qc, "0#", dig[static_cast<std::size_t>(c)][0], "0#", +1);
        std::vector<std::string> bad = {"##"};
        if (c == A) bad.push_back("1#");
        sink_state(qc, bad);
    }
    // Phase 2: cross the c+1 binary digits of k.
    for (int c = 0; c <= A; ++c)
        for (int i = 0; i <= c; ++i) {
            int qd = dig[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
            int next = (i < c) ? dig[static_cast<std::size_t>(c)][static_cast<std::size_t>(i + 1)]
                               : fetch[static_cast<std::size_t>(c)];
            add(qd, "0#", next, "0#", +1);
            add(qd, "1#", next, "1#", +1);
            sink_state(qd, {"##"});
        }
    // Phase 3: copy loop. fetch erases the source cell (the carried bit moves to
    // the state), so superpositions of equal-length tails stay coherent.
    for (int c = 0; c <= A; ++c) {
        int qf_ = fetch[static_cast<std::size_t>(c)];
        for (int s = 0; s < 2; ++s)
            add(qf_, sym(s, 2), walk[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)][0], "##", -1);
        add(qf_, "##", 1, "##", +1);  // halt
        const int P = p0(c);
        for (int s = 0; s < 2; ++s) {
            for (int j = 0; j + 1 < P; ++j) {
                int qw = walk[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
                int qn = walk[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)][static_cast<std::size_t>(j + 1)];
                for (int in = 0; in < 3; ++in) add(qw, sym(in, 2), qn, sym(in, 2), -1);
            }
            // arrived at the target cell: write the carried bit on the output track
            int qw = walk[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)][static_cast<std::size_t>(P - 1)];
            for (int in = 0; in < 3; ++in) add(qw, sym(in, 2), back[static_cast<std::size_t>(c)][0], sym(in, s), +1);
        }
        for (int j = 0; j + 1 < P; ++j) {
            int qb = back[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
            int qn = back[static_cast<std::size_t>(c)][static_cast<std::size_t>(j + 1)];
            for (int in = 0; in < 3; ++in)
                for (int out = 0; out < 3; ++out) add(qb, sym(in, out), qn, sym(in, out), +1);
        }
        int qb = back[static_cast<std::size_t>(c)][static_cast<std::size_t>(P - 1)];
        for (int in = 0; in < 3; ++in)
            for (int out = 0; out < 3; ++out) add(qb, sym(in, out), qf_, sym(in, out), +1);
    }
    return complete_reversible(spec);
}

}  // namespace qkolmo
