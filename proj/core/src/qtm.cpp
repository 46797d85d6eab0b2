#include "qkolmo/qtm.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace qkolmo {

Amp amp_mul(const Amp& a, const Amp& b, const Rational& d) {
    // (x + y sqrt(d))(u + v sqrt(d)) = (xu + d yv) + (xv + yu) sqrt(d)
    Amp out;
    out.rat = a.rat * b.rat;
    if (!a.irr.is_zero() && !b.irr.is_zero()) out.rat += d * (a.irr * b.irr);
    out.irr = a.rat * b.irr + a.irr * b.rat;
    return out;
}

std::complex<double> amp_to_complex(const Amp& a, const Rational& d) {
    std::complex<double> z = a.rat.to_complex();
    if (!a.irr.is_zero()) z += a.irr.to_complex() * std::sqrt(to_double(d));
    return z;
}

int amp_real_cmp(const Amp& a, const Rational& c, const Rational& d) {
    if (a.rat.im != 0 || a.irr.im != 0) throw std::domain_error("amp_real_cmp on a non-real value");
    Rational p = a.rat.re - c;   // compare p + q sqrt(d) with 0
    const Rational& q = a.irr.re;
    if (q == 0) return sgn(p);
    if (d == 0) return sgn(p);
    int sq = sgn(q);
    if (sgn(p) == sq || p == 0) return sq;
    // p and q have opposite signs; sign decided by |p|^2 vs q^2 d
    Rational lhs = p * p, rhs = q * q * d;
    int mag = (lhs > rhs) ? 1 : (lhs < rhs ? -1 : 0);
    return mag == 0 ? 0 : (sgn(p) > 0 ? mag : -mag);
}

void QtmSpec::check_well_formed() const {
    if (state_names.empty()) throw std::invalid_argument("machine needs at least one state");
    if (initial_state == final_state) throw std::invalid_argument("initial and final state must differ");
    auto in_range = [&](int q) { return q >= 0 && q < state_count(); };
    if (!in_range(initial_state) || !in_range(final_state)) throw std::invalid_argument("state index out of range");
    for (const auto& [key, list] : rules) {
        if (!in_range(key.first) || key.second >= 9) throw std::invalid_argument("malformed rule key");
        for (const auto& tr : list) {
            if (!in_range(tr.state) || tr.write_in > 2 || tr.write_out > 2 || (tr.direction != 1 && tr.direction != -1))
                throw std::invalid_argument("malformed transition");
            if (tr.amplitude.is_zero()) throw std::invalid_argument("zero amplitude listed in transition table");
        }
    }
}

std::uint8_t Config::cell_at(std::int32_t pos) const {
    if (pos < origin || pos >= origin + static_cast<std::int32_t>(tape.size())) return kBlankPair;
    return tape[static_cast<std::size_t>(pos - origin)];
}

void Config::write_cell(std::int32_t pos, std::uint8_t value) {
    if (tape.empty()) {
        if (value == kBlankPair) return;
        origin = pos;
        tape.push_back(value);
        return;
    }
    std::int32_t end = origin + static_cast<std::int32_t>(tape.size());
    if (pos < origin) {
        if (value == kBlankPair) return;
        tape.insert(tape.begin(), static_cast<std::size_t>(origin - pos), kBlankPair);
        origin = pos;
        tape.front() = value;
        return;
    }
    if (pos >= end) {
        if (value == kBlankPair) return;
        tape.insert(tape.end(), static_cast<std::size_t>(pos - end + 1), kBlankPair);
        tape.back() = value;
        return;
    }
    tape[static_cast<std::size_t>(pos - origin)] = value;
    if (value == kBlankPair) canonicalize();
}

void Config::canonicalize() {
    std::size_t first = 0;
    while (first < tape.size() && tape[first] == kBlankPair) ++first;
    if (first == tape.size()) {
        tape.clear();
        origin = 0;
        return;
    }
    std::size_t last = tape.size();
    while (last > first && tape[last - 1] == kBlankPair) --last;
    if (first > 0 || last < tape.size()) {
        std::vector<std::uint8_t> trimmed(tape.begin() + static_cast<long>(first), tape.begin() + static_cast<long>(last));
        origin += static_cast<std::int32_t>(first);
        tape = std::move(trimmed);
    }
}

Amp GlobalState::norm_sq() const {
    Amp total;
    for (const auto& [c, a] : table) total += amp_mul(a.conj(), a, radicand);
    return total;
}

std::size_t ragged_dim(int max_len) {
    if (max_len < 0) throw std::invalid_argument("negative length");
    return (std::size_t{1} << (max_len + 1)) - 1;
}

std::size_t string_index(const std::string& bits) {
    std::size_t value = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("basis string must be binary");
        value = value * 2 + static_cast<std::size_t>(c - '0');
    }
    return ((std::size_t{1} << bits.size()) - 1) + value;
}

std::string index_string(std::size_t index) {
    int len = 0;
    std::size_t block = 1;
    while (index >= block) {
        index -= block;
        block <<= 1;
        ++len;
    }
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = len - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = (index & 1) ? '1' : '0';
        index >>= 1;
    }
    return s;
}

QubitString::QubitString() : max_len_(0), matrix_(SMat(1)) {
    std::get<SMat>(matrix_).set(0, 0, CRat(1));
}

QubitString QubitString::classical(const std::string& bits) {
    int n = static_cast<int>(bits.size());
    SMat m(ragged_dim(n));
    std::size_t idx = string_index(bits);
    m.set(idx, idx, CRat(1));
    return from_exact(std::move(m), n);
}

QubitString QubitString::pure_from_scaled(const CVec& dir, int max_len) {
    if (dir.dim() != ragged_dim(max_len)) throw std::invalid_argument("pure_from_scaled dimension mismatch");
    Rational nsq = dir.norm_sq();
    if (nsq == 0) throw std::invalid_argument("pure_from_scaled needs a nonzero vector");
    SMat m(dir.dim());
    for (std::size_t r = 0; r < dir.dim(); ++r) {
        if (dir[r].is_zero()) continue;
        for (std::size_t c = 0; c < dir.dim(); ++c) {
            if (dir[c].is_zero()) continue;
            CRat v = dir[r] * dir[c].conj();
            m.set(r, c, CRat(v.re / nsq, v.im / nsq));
        }
    }
    return from_exact(std::move(m), max_len);
}

QubitString QubitString::from_exact(SMat matrix, int max_len) {
    if (matrix.dim() != ragged_dim(max_len))
        throw std::invalid_argument("qubit string matrix has wrong dimension");
    QubitString s;
    s.max_len_ = max_len;
    s.matrix_ = std::move(matrix);
    return s;
}

QubitString QubitString::from_float(FMat matrix, int max_len) {
    if (matrix.rows() != ragged_dim(max_len) || matrix.cols() != ragged_dim(max_len))
        throw std::invalid_argument("qubit string matrix has wrong dimension");
    QubitString s;
    s.max_len_ = max_len;
    s.matrix_ = std::move(matrix);
    return s;
}

QubitString QubitString::mix(const std::vector<std::pair<Rational, QubitString>>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty mixture");
    int n = 0;
    bool exact = true;
    Rational total(0);
    for (const auto& [w, s] : parts) {
        if (w < 0) throw std::invalid_argument("negative mixture weight");
        total += w;
        n = std::max(n, s.max_len());
        exact = exact && s.is_exact();
    }
    if (total != 1) throw std::invalid_argument("mixture weights must sum to 1");
    if (exact) {
        SMat acc(ragged_dim(n));
        for (const auto& [w, s] : parts) {
            SMat m = pad(s, n).exact();
            for (const auto& [rc, v] : m.entries()) acc.add(rc.first, rc.second, CRat(w) * v);
        }
        return from_exact(std::move(acc), n);
    }
    FMat acc(ragged_dim(n), ragged_dim(n));
    for (const auto& [w, s] : parts) {
        FMat m = pad(s, n).to_fmat().scaled(to_double(w));
        acc = acc + m;
    }
    return from_float(std::move(acc), n);
}

const SMat& QubitString::exact() const {
    if (!is_exact()) throw std::logic_error("qubit string is not in exact mode");
    return std::get<SMat>(matrix_);
}

FMat QubitString::to_fmat() const {
    if (is_exact()) {
        const SMat& src = std::get<SMat>(matrix_);
        if (src.dim() > 8192) throw std::domain_error("float view exceeds the 12-qubit cap");
        FMat m(src.dim(), src.dim());
        for (const auto& [rc, v] : src.entries()) m.at(rc.first, rc.second) = v.to_complex();
        return m;
    }
    return std::get<FMat>(matrix_);
}

QubitString QubitString::pad(const QubitString& s, int max_len) {
    if (max_len < s.max_len_) throw std::invalid_argument("pad cannot shrink a qubit string");
    if (max_len == s.max_len_) return s;
    std::size_t dim = ragged_dim(max_len);
    if (s.is_exact()) {
        SMat m(dim);
        for (const auto& [rc, v] : s.exact().entries()) m.set(rc.first, rc.second, v);
        return from_exact(std::move(m), max_len);
    }
    FMat m(dim, dim);
    const FMat src = s.to_fmat();
    for (std::size_t r = 0; r < src.rows(); ++r)
        for (std::size_t c = 0; c < src.cols(); ++c) m.at(r, c) = src.at(r, c);
    return from_float(std::move(m), max_len);
}

bool QubitString::is_valid_density() const {
    if (is_exact()) {
        const SMat& m = exact();
        if (!m.is_hermitian() || m.trace_real() != 1) return false;
        if (m.dim() > 512) throw std::domain_error("exact PSD check exceeds the 8-qubit cap");
        CMat dense(m.dim(), m.dim());
        for (const auto& [rc, v] : m.entries()) dense.at(rc.first, rc.second) = v;
        return is_psd_exact(dense);
    }
    const FMat& m = std::get<FMat>(matrix_);
    if (m.hermiticity_defect() > 1e-9) return false;
    if (std::abs(m.trace() - std::complex<double>(1.0, 0.0)) > 1e-9) return false;
    for (double lambda : hermitian_eigenvalues(m))
        if (lambda < -1e-10) return false;
    return true;
}

bool operator==(const QubitString& a, const QubitString& b) {
    int n = std::max(a.max_len(), b.max_len());
    QubitString pa = QubitString::pad(a, n), pb = QubitString::pad(b, n);
    if (pa.is_exact() && pb.is_exact()) return pa.exact() == pb.exact();
    FMat ma = pa.to_fmat(), mb = pb.to_fmat();
    for (std::size_t r = 0; r < ma.rows(); ++r)
        for (std::size_t c = 0; c < ma.cols(); ++c)
            if (ma.at(r, c) != mb.at(r, c)) return false;
    return true;
}

int base_length(const QubitString& s) {
    int best = 0;
    if (s.is_exact()) {
        for (const auto& [rc, v] : s.exact().entries())
            if (rc.first == rc.second && v.re > 0)
                best = std::max(best, static_cast<int>(index_string(rc.first).size()));
    } else {
        FMat m = s.to_fmat();
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (m.at(i, i).real() > 1e-12) best = std::max(best, static_cast<int>(index_string(i).size()));
    }
    return best;
}

Rational average_length_exact(const QubitString& s) {
    Rational acc(0);
    for (const auto& [rc, v] : s.exact().entries())
        if (rc.first == rc.second)
            acc += Rational(static_cast<long>(index_string(rc.first).size())) * v.re;
    return acc;
}

double average_length(const QubitString& s) {
    if (s.is_exact()) return to_double(average_length_exact(s));
    FMat m = s.to_fmat();
    double acc = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += static_cast<double>(index_string(i).size()) * m.at(i, i).real();
    return acc;
}

std::pair<int, double> lengths(const QubitString& s) { return {base_length(s), average_length(s)}; }

std::string self_delimiting_int(long k) {
    if (k < 1) throw std::invalid_argument("self-delimiting encoding needs k >= 1");
    std::string digits;
    for (long v = k; v > 0; v /= 2) digits.push_back(static_cast<char>('0' + (v & 1)));
    std::reverse(digits.begin(), digits.end());
    return std::string(digits.size() - 1, '1') + "0" + digits;
}

QubitString tensor_prefix(const std::string& bits, const QubitString& sigma) {
    for (char c : bits)
        if (c != '0' && c != '1') throw std::invalid_argument("prefix must be binary");
    int n = static_cast<int>(bits.size()) + sigma.max_len();
    std::size_t dim = ragged_dim(n);
    std::size_t src_dim = ragged_dim(sigma.max_len());
    auto shifted = [&](std::size_t i) { return string_index(bits + index_string(i)); };
    if (sigma.is_exact()) {
        SMat m(dim);
        for (const auto& [rc, v] : sigma.exact().entries()) m.set(shifted(rc.first), shifted(rc.second), v);
        return QubitString::from_exact(std::move(m), n);
    }
    FMat m(dim, dim);
    FMat src = sigma.to_fmat();
    for (std::size_t r = 0; r < src_dim; ++r)
        for (std::size_t c = 0; c < src_dim; ++c) m.at(shifted(r), shifted(c)) = src.at(r, c);
    return QubitString::from_float(std::move(m), n);
}

QubitString encode_pair(long k, const QubitString& sigma) { return tensor_prefix(self_delimiting_int(k), sigma); }

QubitString encode_rational_pair(const Rational& delta, const QubitString& sigma) {
    if (delta <= 0) throw std::invalid_argument("rational parameter must be positive");
    Rational lowest = delta;
    lowest.canonicalize();
    long l = static_cast<long>(lowest.get_num().get_si());
    long m = static_cast<long>(lowest.get_den().get_si());
    return encode_pair(l, encode_pair(m, sigma));
}

QubitString truncate_prefix(const QubitString& sigma, int k) {
    if (k < 0) throw std::invalid_argument("truncate_prefix needs k >= 0");
    int n = sigma.max_len();
    if (k >= n) return sigma;
    std::size_t out_dim = ragged_dim(k);
    std::size_t src_dim = ragged_dim(n);
    auto len_of = [](std::size_t i) { return index_string(i).size(); };
    if (sigma.is_exact()) {
        SMat m(out_dim);
        for (const auto& [rc, value] : sigma.exact().entries()) {
            std::string ws = index_string(rc.first), vs = index_string(rc.second);
            if (ws.size() <= static_cast<std::size_t>(k) && vs.size() <= static_cast<std::size_t>(k)) {
                m.add(rc.first, rc.second, value);
            } else if (ws.size() > static_cast<std::size_t>(k) && vs.size() > static_cast<std::size_t>(k)) {
                if (ws.substr(static_cast<std::size_t>(k)) == vs.substr(static_cast<std::size_t>(k)))
                    m.add(string_index(ws.substr(0, static_cast<std::size_t>(k))),
                          string_index(vs.substr(0, static_cast<std::size_t>(k))), value);
            }
        }
        return QubitString::from_exact(std::move(m), k);
    }
    FMat m(out_dim, out_dim);
    FMat src = sigma.to_fmat();
    for (std::size_t r = 0; r < src_dim; ++r) {
        std::string ws = index_string(r);
        for (std::size_t c = 0; c < src_dim; ++c) {
            std::string vs = index_string(c);
            (void)len_of;
            if (ws.size() <= static_cast<std::size_t>(k) && vs.size() <= static_cast<std::size_t>(k)) {
                m.at(r, c) += src.at(r, c);
            } else if (ws.size() > static_cast<std::size_t>(k) && vs.size() > static_cast<std::size_t>(k)) {
                if (ws.substr(static_cast<std::size_t>(k)) == vs.substr(static_cast<std::size_t>(k)))
                    m.at(string_index(ws.substr(0, static_cast<std::size_t>(k))),
                         string_index(vs.substr(0, static_cast<std::size_t>(k)))) += src.at(r, c);
            }
        }
    }
    return QubitString::from_float(std::move(m), k);
}

double qubit_string_trace_distance(const QubitString& a, const QubitString& b) {
    int n = std::max(a.max_len(), b.max_len());
    return trace_distance(QubitString::pad(a, n).to_fmat(), QubitString::pad(b, n).to_fmat());
}

FMat ControlDensity::to_fmat() const {
    FMat m(static_cast<std::size_t>(states), static_cast<std::size_t>(states));
    for (int r = 0; r < states; ++r)
        for (int c = 0; c < states; ++c) m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = amp_to_complex(at(r, c), radicand);
    return m;
}

CMat ControlDensity::to_cmat() const {
    CMat m(static_cast<std::size_t>(states), static_cast<std::size_t>(states));
    for (int r = 0; r < states; ++r)
        for (int c = 0; c < states; ++c) {
            const Amp& a = at(r, c);
            if (!a.irr.is_zero()) throw std::logic_error("control density has irrational entries");
            m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = a.rat;
        }
    return m;
}

Caps Caps::from_env() {
    Caps caps;
    const char* env = std::getenv("QKOLMO_CAPS");
    if (!env) return caps;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        long value = std::strtol(item.c_str() + eq + 1, nullptr, 10);
        if (key == "t") caps.t_max = static_cast<int>(value);
        else if (key == "nexact") caps.n_exact_max = static_cast<int>(value);
        else if (key == "nnet") caps.n_net_max = static_cast<int>(value);
        else if (key == "points") caps.net_points_max = value;
    }
    return caps;
}

Machine::Machine(QtmSpec spec) : spec_(std::move(spec)) { spec_.check_well_formed(); }

Config Machine::initial_config(const std::string& bits) const {
    Config c;
    c.state = static_cast<std::int16_t>(spec_.initial_state);
    c.head = 0;
    c.origin = 0;
    c.tape.reserve(bits.size());
    for (char b : bits) c.tape.push_back(pack_cell(b == '1' ? kSym1 : kSym0, kBlank));
    c.canonicalize();
    return c;
}

SparseVec Machine::step(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [config, amp] : v) {
        std::uint8_t sym = config.cell_at(config.head);
        auto it = spec_.rules.find({config.state, sym});
        if (it == spec_.rules.end())
            throw std::runtime_error("transition table has no rule for a reachable configuration");
        for (const Transition& tr : it->second) {
            Config next = config;
            next.state = static_cast<std::int16_t>(tr.state);
            next.write_cell(config.head, pack_cell(tr.write_in, tr.write_out));
            next.head += tr.direction;
            Amp contribution = amp_mul(amp, tr.amplitude, spec_.radicand);
            auto [slot, inserted] = out.try_emplace(std::move(next), contribution);
            if (!inserted) slot->second += contribution;
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_zero()) it = out.erase(it);
        else ++it;
    }
    return out;
}

const SparseVec& Machine::evolved(const std::string& bits, int t) const {
    return evolved_basis(static_cast<int>(bits.size()), string_index(bits), t);
}

const SparseVec& Machine::evolved_basis(int n, std::size_t index, int t) const {
    auto& record = basis_cache_[{n, index}];
    if (record.by_time.empty()) {
        SparseVec start;
        start.emplace(initial_config(index_string(index)), Amp(CRat(1)));
        record.by_time.push_back(std::move(start));
    }
    while (static_cast<int>(record.by_time.size()) <= t) record.by_time.push_back(step(record.by_time.back()));
    return record.by_time[static_cast<std::size_t>(t)];
}

GlobalState Machine::run(const CVec& psi, int n, int t) const {
    if (psi.dim() != ragged_dim(n)) throw std::invalid_argument("run input dimension mismatch");
    if (t < 0) throw std::invalid_argument("run needs t >= 0");
    GlobalState g;
    g.time = t;
    g.radicand = spec_.radicand;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        if (psi[i].is_zero()) continue;
        const SparseVec& base = evolved_basis(n, i, t);
        Amp coeff(psi[i]);
        for (const auto& [config, amp] : base) {
            Amp contribution = amp_mul(coeff, amp, spec_.radicand);
            auto [slot, inserted] = g.table.try_emplace(config, contribution);
            if (!inserted) slot->second += contribution;
        }
    }
    for (auto it = g.table.begin(); it != g.table.end();) {
        if (it->second.is_zero()) it = g.table.erase(it);
        else ++it;
    }
    return g;
}

namespace {

// Extracts a scaled ket from an exact rank-one density matrix.
CVec extract_pure_ket(const SMat& m) {
    std::size_t pivot = m.dim();
    for (const auto& [rc, v] : m.entries()) {
        if (rc.first == rc.second && v.re > 0) { pivot = rc.first; break; }
    }
    if (pivot == m.dim()) throw std::invalid_argument("zero density matrix");
    CVec ket(m.dim());
    for (const auto& [rc, v] : m.entries())
        if (rc.second == pivot) ket[rc.first] = v;
    // purity check: m * m == m (trace one assumed)
    if (!(m * m == m)) throw std::invalid_argument("run needs a pure input");
    return ket;
}

}  // namespace

GlobalState Machine::run(const QubitString& input, int t) const {
    if (!input.is_exact()) throw std::invalid_argument("run needs an exact input");
    CVec ket = extract_pure_ket(input.exact());
    return run(ket, input.max_len(), t);
}

ControlDensity Machine::control_state(const GlobalState& g) const {
    ControlDensity out;
    out.states = spec_.state_count();
    out.radicand = spec_.radicand;
    out.entries.assign(static_cast<std::size_t>(out.states * out.states), Amp());
    // bucket by (head, tape); control entries are the per-bucket outer products
    std::map<std::pair<std::int32_t, std::pair<std::int32_t, std::vector<std::uint8_t>>>, std::vector<std::pair<int, Amp>>> buckets;
    for (const auto& [config, amp] : g.table)
        buckets[{config.head, {config.origin, config.tape}}].emplace_back(config.state, amp);
    for (const auto& [key, members] : buckets)
        for (const auto& [q, aq] : members)
            for (const auto& [p, ap] : members)
                out.at(q, p) += amp_mul(aq, ap.conj(), spec_.radicand);
    return out;
}

std::vector<Amp> Machine::qf_weight_profile_scaled(const CVec& dir, int n, int t_max) const {
    Rational nsq = dir.norm_sq();
    if (nsq == 0) throw std::invalid_argument("weight profile needs a nonzero vector");
    std::vector<Amp> out;
    out.reserve(static_cast<std::size_t>(t_max) + 1);
    for (int t = 0; t <= t_max; ++t) {
        const auto& gram = qf_gram(n, t);
        Amp acc;
        for (std::size_t i = 0; i < dir.dim(); ++i) {
            if (dir[i].is_zero()) continue;
            for (std::size_t j = 0; j < dir.dim(); ++j) {
                if (dir[j].is_zero()) continue;
                // sigma_{i,j} = dir_i conj(dir_j)/nsq
                CRat sigma = dir[i] * dir[j].conj();
                acc += amp_mul(Amp(sigma), gram[i][j], spec_.radicand);
            }
        }
        acc.rat = CRat(acc.rat.re / nsq, acc.rat.im / nsq);
        acc.irr = CRat(acc.irr.re / nsq, acc.irr.im / nsq);
        out.push_back(std::move(acc));
    }
    return out;
}

std::vector<Amp> Machine::qf_weight_profile(const QubitString& input, int t_max) const {
    if (!input.is_exact()) throw std::invalid_argument("weight profile needs an exact input");
    const SMat& sigma = input.exact();
    int n = input.max_len();
    std::vector<Amp> out;
    out.reserve(static_cast<std::size_t>(t_max) + 1);
    for (int t = 0; t <= t_max; ++t) {
        const auto& gram = qf_gram_support(n, t, sigma);
        Amp acc;
        for (const auto& [rc, v] : sigma.entries()) {
            auto it = gram.find(rc);
            if (it != gram.end()) acc += amp_mul(Amp(v), it->second, spec_.radicand);
        }
        out.push_back(std::move(acc));
    }
    return out;
}

const std::vector<std::vector<Amp>>& Machine::qf_gram(int n, int t) const {
    auto key = std::make_pair(n, t);
    auto it = gram_cache_.find(key);
    if (it != gram_cache_.end()) return it->second;
    std::size_t dim = ragged_dim(n);
    std::vector<std::vector<Amp>> gram(dim, std::vector<Amp>(dim));
    // collect qf-amplitudes per basis string, then join on configuration
    std::map<Config, std::vector<std::pair<std::size_t, Amp>>> by_config;
    for (std::size_t i = 0; i < dim; ++i) {
        const SparseVec& v = evolved_basis(n, i, t);
        for (const auto& [config, amp] : v)
            if (config.state == spec_.final_state) by_config[config].emplace_back(i, amp);
    }
    for (const auto& [config, members] : by_config)
        for (const auto& [i, ai] : members)
            for (const auto& [j, aj] : members) gram[i][j] += amp_mul(ai, aj.conj(), spec_.radicand);
    // G(i,j) corresponds to sigma_{i,j} coefficient: <qf|Tr(V|i><j|V*)|qf> = sum amp_i conj(amp_j)
    return gram_cache_.emplace(key, std::move(gram)).first->second;
}

std::map<std::pair<std::size_t, std::size_t>, Amp> Machine::qf_gram_support(int n, int t,
                                                                             const SMat& sigma) const {
    std::set<std::size_t> support;
    for (const auto& [rc, v] : sigma.entries()) {
        support.insert(rc.first);
        support.insert(rc.second);
    }
    std::map<Config, std::vector<std::pair<std::size_t, Amp>>> by_config;
    for (std::size_t i : support) {
        for (const auto& [config, amp] : evolved_basis(n, i, t))
            if (config.state == spec_.final_state) by_config[config].emplace_back(i, amp);
    }
    std::map<std::pair<std::size_t, std::size_t>, Amp> gram;
    for (const auto& [config, members] : by_config)
        for (const auto& [i, ai] : members)
            for (const auto& [j, aj] : members) {
                auto [it, inserted] = gram.try_emplace({i, j}, Amp());
                it->second += amp_mul(ai, aj.conj(), spec_.radicand);
                (void)inserted;
            }
    return gram;
}

std::optional<int> Machine::halting_time(const QubitString& input, int t_max) const {
    if (t_max < 1) throw std::invalid_argument("halting_time needs t_max >= 1");
    std::vector<Amp> profile = qf_weight_profile(input, t_max);
    for (int t = 1; t <= t_max; ++t) {
        const Amp& w = profile[static_cast<std::size_t>(t)];
        int vs_zero = amp_real_cmp(w, Rational(0), spec_.radicand);
        if (vs_zero == 0) continue;
        int vs_one = amp_real_cmp(w, Rational(1), spec_.radicand);
        if (vs_one == 0) return t;  // all earlier weights were exactly zero
        return std::nullopt;        // strictly between 0 and 1 before any valid halt
    }
    return std::nullopt;
}

namespace {

// output-track content of a configuration: (origin, symbols) trimmed
struct OutTrack {
    std::int32_t origin = 0;
    std::vector<std::uint8_t> syms;

    friend auto operator<=>(const OutTrack& a, const OutTrack& b) = default;
};

OutTrack out_track(const Config& c) {
    OutTrack o;
    o.origin = c.origin;
    o.syms.reserve(c.tape.size());
    for (std::uint8_t cell : c.tape) o.syms.push_back(cell_out(cell));
    // trim blanks
    std::size_t first = 0;
    while (first < o.syms.size() && o.syms[first] == kBlank) ++first;
    if (first == o.syms.size()) return OutTrack{};
    std::size_t last = o.syms.size();
    while (last > first && o.syms[last - 1] == kBlank) --last;
    o.origin += static_cast<std::int32_t>(first);
    o.syms.assign(o.syms.begin() + static_cast<long>(first), o.syms.begin() + static_cast<long>(last));
    return o;
}

// maximal bit run starting at cell 0, up to the first blank
std::string read_result(const OutTrack& o) {
    std::string s;
    for (std::int32_t pos = 0;; ++pos) {
        std::uint8_t sym = kBlank;
        if (pos >= o.origin && pos < o.origin + static_cast<std::int32_t>(o.syms.size()))
            sym = o.syms[static_cast<std::size_t>(pos - o.origin)];
        if (sym == kBlank) break;
        s.push_back(sym == kSym1 ? '1' : '0');
    }
    return s;
}

bool is_clean(const OutTrack& o, const std::string& result) {
    if (result.empty()) return o.syms.empty();
    return o.origin == 0 && o.syms.size() == result.size();
}

OutTrack in_track_key(const Config& c) {
    OutTrack o;
    o.origin = c.origin;
    o.syms.reserve(c.tape.size());
    for (std::uint8_t cell : c.tape) o.syms.push_back(cell_in(cell));
    std::size_t first = 0;
    while (first < o.syms.size() && o.syms[first] == kBlank) ++first;
    if (first == o.syms.size()) return OutTrack{};
    std::size_t last = o.syms.size();
    while (last > first && o.syms[last - 1] == kBlank) --last;
    o.origin += static_cast<std::int32_t>(first);
    o.syms.assign(o.syms.begin() + static_cast<long>(first), o.syms.begin() + static_cast<long>(last));
    return o;
}

}  // namespace

QubitString Machine::read_output(const GlobalState& g) const {
    // trace out control, input track and head, then apply the reading channel:
    // coherence survives only between equal junk indices; the clean embedding
    // of each string is index one, every other track layout gets its own index.
    struct Piece {
        std::string result;
        bool clean;
        OutTrack track;
        Amp amp;
    };
    std::map<std::tuple<std::int16_t, std::int32_t, OutTrack>, std::vector<Piece>> buckets;
    for (const auto& [config, amp] : g.table) {
        OutTrack track = out_track(config);
        std::string result = read_result(track);
        buckets[{config.state, config.head, in_track_key(config)}].push_back(
            Piece{result, is_clean(track, result), std::move(track), amp});
    }
    int max_len = 0;
    for (const auto& [key, pieces] : buckets)
        for (const auto& p : pieces) max_len = std::max(max_len, static_cast<int>(p.result.size()));
    std::size_t dim = ragged_dim(max_len);
    std::vector<Amp> acc(dim * dim);
    for (const auto& [key, pieces] : buckets)
        for (const auto& a : pieces)
            for (const auto& b : pieces) {
                bool same_junk = a.clean ? b.clean : (!b.clean && a.track == b.track);
                if (!same_junk) continue;
                std::size_t r = string_index(a.result), c = string_index(b.result);
                acc[r * dim + c] += amp_mul(a.amp, b.amp.conj(), spec_.radicand);
            }
    bool rational = spec_.radicand == 1 ||
                    std::all_of(acc.begin(), acc.end(), [](const Amp& a) { return a.is_rational(); });
    if (rational) {
        SMat m(dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) {
                const Amp& a = acc[r * dim + c];
                m.set(r, c, spec_.radicand == 1 ? a.rat + a.irr : a.rat);
            }
        return QubitString::from_exact(std::move(m), max_len);
    }
    FMat m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) m.at(r, c) = amp_to_complex(acc[r * dim + c], spec_.radicand);
    return QubitString::from_float(std::move(m), max_len);
}

std::optional<QubitString> Machine::apply(const QubitString& input, int t_max) const {
    if (!input.is_exact()) throw std::invalid_argument("apply needs an exact input");
    std::optional<int> tau = halting_time(input, t_max);
    if (!tau) return std::nullopt;
    // assemble the output bilinearly over the input's basis support
    const SMat& sigma = input.exact();
    int n = input.max_len();
    // For mixed inputs, read_output is linear in |i><j|: one joint bucket walk
    // over the support accumulates sum_{i,j} sigma_{i,j} pieces.
    std::set<std::size_t> support;
    for (const auto& [rc, v] : sigma.entries()) {
        support.insert(rc.first);
        support.insert(rc.second);
    }
    struct Piece {
        std::string result;
        bool clean;
        OutTrack track;
        std::size_t basis;
        Amp amp;
    };
    std::map<std::tuple<std::int16_t, std::int32_t, OutTrack>, std::vector<Piece>> buckets;
    for (std::size_t i : support) {
        for (const auto& [config, amp] : evolved_basis(n, i, *tau)) {
            OutTrack track = out_track(config);
            std::string result = read_result(track);
            buckets[{config.state, config.head, in_track_key(config)}].push_back(
                Piece{result, is_clean(track, result), std::move(track), i, amp});
        }
    }
    int max_len = 0;
    for (const auto& [key, pieces] : buckets)
        for (const auto& p : pieces) max_len = std::max(max_len, static_cast<int>(p.result.size()));
    std::size_t odim = ragged_dim(max_len);
    std::vector<Amp> acc(odim * odim);
    for (const auto& [key, pieces] : buckets)
        for (const auto& a : pieces)
            for (const auto& b : pieces) {
                if (sigma.at(a.basis, b.basis).is_zero()) continue;
                bool same_junk = a.clean ? b.clean : (!b.clean && a.track == b.track);
                if (!same_junk) continue;
                Amp w = amp_mul(a.amp, b.amp.conj(), spec_.radicand);
                w = amp_mul(Amp(sigma.at(a.basis, b.basis)), w, spec_.radicand);
                acc[string_index(a.result) * odim + string_index(b.result)] += w;
            }
    bool rational = std::all_of(acc.begin(), acc.end(), [](const Amp& a) { return a.is_rational(); });
    if (spec_.radicand == 1 || rational) {
        SMat m(odim);
        for (std::size_t r = 0; r < odim; ++r)
            for (std::size_t c = 0; c < odim; ++c) {
                const Amp& a = acc[r * odim + c];
                m.set(r, c, spec_.radicand == 1 ? a.rat + a.irr : a.rat);
            }
        return QubitString::from_exact(std::move(m), max_len);
    }
    FMat m(odim, odim);
    for (std::size_t r = 0; r < odim; ++r)
        for (std::size_t c = 0; c < odim; ++c) m.at(r, c) = amp_to_complex(acc[r * odim + c], spec_.radicand);
    return QubitString::from_float(std::move(m), max_len);
}

QubitString Machine::apply_pure_float(const std::vector<std::complex<double>>& psi_ragged, int n, int tau) const {
    if (psi_ragged.size() != ragged_dim(n)) throw std::invalid_argument("apply_pure_float dimension mismatch");
    if (tau < 0) throw std::invalid_argument("apply_pure_float needs tau >= 0");
    struct Piece {
        std::string result;
        bool clean;
        OutTrack track;
        std::size_t basis;
        Amp amp;
    };
    std::map<std::tuple<std::int16_t, std::int32_t, OutTrack>, std::vector<Piece>> buckets;
    for (std::size_t i = 0; i < psi_ragged.size(); ++i) {
        if (std::abs(psi_ragged[i]) == 0.0) continue;
        for (const auto& [config, amp] : evolved_basis(n, i, tau)) {
            OutTrack track = out_track(config);
            std::string result = read_result(track);
            buckets[{config.state, config.head, in_track_key(config)}].push_back(
                Piece{result, is_clean(track, result), std::move(track), i, amp});
        }
    }
    int max_len = 0;
    for (const auto& [key, pieces] : buckets)
        for (const auto& p : pieces) max_len = std::max(max_len, static_cast<int>(p.result.size()));
    std::size_t odim = ragged_dim(max_len);
    FMat m(odim, odim);
    for (const auto& [key, pieces] : buckets)
        for (const auto& a : pieces)
            for (const auto& b : pieces) {
                bool same_junk = a.clean ? b.clean : (!b.clean && a.track == b.track);
                if (!same_junk) continue;
                std::complex<double> w = psi_ragged[a.basis] * std::conj(psi_ragged[b.basis]);
                if (w == std::complex<double>(0.0, 0.0)) continue;
                w *= amp_to_complex(a.amp, spec_.radicand) * std::conj(amp_to_complex(b.amp, spec_.radicand));
                m.at(string_index(a.result), string_index(b.result)) += w;
            }
    return QubitString::from_float(std::move(m), max_len);
}

bool Machine::validate_unitarity(int t_max, int n_max) const {
    if (t_max < 1 || n_max < 0) throw std::invalid_argument("validate_unitarity needs t_max >= 1, n_max >= 0");
    // reachable set within t_max steps from all classical inputs of length <= n_max
    std::vector<Config> frontier;
    std::set<Config> reachable;
    for (std::size_t i = 0; i < ragged_dim(n_max); ++i) {
        Config c = initial_config(index_string(i));
        if (reachable.insert(c).second) frontier.push_back(c);
    }
    for (int t = 0; t < t_max && !frontier.empty(); ++t) {
        std::vector<Config> next;
        for (const Config& c : frontier) {
            auto it = spec_.rules.find({c.state, c.cell_at(c.head)});
            if (it == spec_.rules.end()) return false;  // evolution undefined on reachable set
            for (const Transition& tr : it->second) {
                Config succ = c;
                succ.state = static_cast<std::int16_t>(tr.state);
                succ.write_cell(c.head, pack_cell(tr.write_in, tr.write_out));
                succ.head += tr.direction;
                if (reachable.insert(succ).second) next.push_back(succ);
            }
        }
        frontier = std::move(next);
    }
    // columns joined on shared target configurations
    std::map<Config, std::vector<std::pair<const Config*, Amp>>> by_target;
    std::map<const Config*, Amp> col_norm;
    std::vector<const Config*> order;
    for (const Config& c : reachable) {
        auto it = spec_.rules.find({c.state, c.cell_at(c.head)});
        if (it == spec_.rules.end()) return false;
        order.push_back(&c);
        for (const Transition& tr : it->second) {
            Config succ = c;
            succ.state = static_cast<std::int16_t>(tr.state);
            succ.write_cell(c.head, pack_cell(tr.write_in, tr.write_out));
            succ.head += tr.direction;
            by_target[succ].emplace_back(&c, tr.amplitude);
        }
    }
    std::map<std::pair<const Config*, const Config*>, Amp> cross;
    for (const auto& [target, sources] : by_target)
        for (const auto& [ca, aa] : sources)
            for (const auto& [cb, ab] : sources) {
                if (ca == cb) {
                    auto [slot, inserted] = col_norm.try_emplace(ca, Amp());
                    slot->second += amp_mul(aa.conj(), aa, spec_.radicand);
                    (void)inserted;
                } else if (ca < cb) {
                    auto [slot, inserted] = cross.try_emplace(std::make_pair(ca, cb), Amp());
                    slot->second += amp_mul(aa.conj(), ab, spec_.radicand);
                    (void)inserted;
                }
            }
    for (const Config* c : order) {
        auto it = col_norm.find(c);
        if (it == col_norm.end()) return false;
        if (amp_real_cmp(it->second, Rational(1), spec_.radicand) != 0) return false;
    }
    for (const auto& [pair, value] : cross)
        if (!value.is_zero()) return false;
    return true;
}

}  // namespace qkolmo
