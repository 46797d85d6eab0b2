#include "qkolmo/coding.hpp"

#include <algorithm>
#include <cmath>

namespace qkolmo {

std::string self_delim_encode(long k) { return self_delimiting_int(k); }

std::pair<long, std::string> self_delim_decode(const std::string& stream) {
    std::size_t ones = 0;
    while (ones < stream.size() && stream[ones] == '1') ++ones;
    if (ones >= stream.size() || stream[ones] != '0')
        throw std::invalid_argument("self-delimiting stream lacks the separator zero");
    std::size_t digits = ones + 1;
    if (stream.size() < ones + 1 + digits) throw std::invalid_argument("self-delimiting stream truncated");
    long k = 0;
    for (std::size_t i = 0; i < digits; ++i) {
        char c = stream[ones + 1 + i];
        if (c != '0' && c != '1') throw std::invalid_argument("self-delimiting stream has a non-binary digit");
        k = k * 2 + (c - '0');
    }
    if (k < 1 || (digits > 1 && stream[ones + 1] != '1'))
        throw std::invalid_argument("self-delimiting stream has a non-canonical integer");
    return {k, stream.substr(ones + 1 + digits)};
}

Rational kraft_mass(const std::vector<int>& lengths) {
    Rational mass(0);
    for (int len : lengths) {
        if (len < 0) throw std::invalid_argument("negative codeword length");
        mpz_class denom;
        mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(len));
        mass += Rational(1) / Rational(denom);
    }
    return mass;
}

bool kraft_check(const std::vector<int>& lengths) { return kraft_mass(lengths) <= 1; }

bool PrefixCode::is_prefix_free() const {
    for (std::size_t i = 0; i < codewords.size(); ++i)
        for (std::size_t j = 0; j < codewords.size(); ++j) {
            if (i == j) continue;
            if (codewords[i].size() <= codewords[j].size() &&
                codewords[j].compare(0, codewords[i].size(), codewords[i]) == 0)
                return false;
        }
    return true;
}

PrefixCode blind_prefix_extend(PrefixCode code, int next_len) {
    if (next_len < 0) throw std::invalid_argument("negative codeword length");
    // walk candidates of the requested length in lexicographic order
    std::string candidate(static_cast<std::size_t>(next_len), '0');
    auto conflicts = [&](const std::string& c) {
        for (const std::string& w : code.codewords) {
            std::size_t k = std::min(w.size(), c.size());
            if (w.compare(0, k, c, 0, k) == 0) return true;  // prefix or extension
        }
        return false;
    };
    auto bump = [&]() {
        for (std::size_t i = candidate.size(); i-- > 0;) {
            if (candidate[i] == '0') {
                candidate[i] = '1';
                std::fill(candidate.begin() + static_cast<long>(i) + 1, candidate.end(), '0');
                return true;
            }
        }
        return false;
    };
    if (next_len == 0) {
        if (!code.codewords.empty()) throw std::domain_error("empty codeword conflicts with existing code");
        code.codewords.push_back("");
        code.consumed_mass += 1;
        return code;
    }
    while (conflicts(candidate)) {
        if (!bump()) throw std::domain_error("no prefix-free codeword of the requested length exists");
    }
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 2, static_cast<unsigned long>(next_len));
    code.consumed_mass += Rational(1) / Rational(denom);
    code.codewords.push_back(std::move(candidate));
    return code;
}

PrefixCode blind_prefix_code(const std::vector<int>& lengths) {
    PrefixCode code;
    for (int len : lengths) code = blind_prefix_extend(std::move(code), len);
    return code;
}

std::vector<ScaledUnitVector> standard_basis(const std::vector<CVec>& span_of_u) {
    if (span_of_u.empty()) throw std::invalid_argument("standard_basis needs a nonempty span");
    std::vector<ScaledUnitVector> ortho = gram_schmidt(span_of_u);
    if (ortho.empty()) throw std::invalid_argument("standard_basis needs a nonzero span");
    std::size_t dim = span_of_u.front().dim();
    std::vector<CVec> projections;
    projections.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i)
        projections.push_back(project_onto_span(ortho, CVec::basis(dim, i)));
    std::vector<ScaledUnitVector> out = gram_schmidt(projections);
    for (auto& u : out) u = canonical_scaled(u);
    return out;
}

std::vector<std::complex<double>> CompressedVec::to_complex() const {
    std::vector<std::complex<double>> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        out[i] = coeffs[i].to_complex() / std::sqrt(to_double(scales[i]));
    return out;
}

CompressionMap CompressionMap::build(const std::vector<CVec>& span_of_u, std::size_t source_dim) {
    CompressionMap map;
    map.basis = standard_basis(span_of_u);
    map.source_dim = source_dim;
    std::size_t n = map.basis.size();
    map.qubits = 0;
    while ((std::size_t{1} << map.qubits) < n) ++map.qubits;
    return map;
}

CompressedVec compress(const CompressionMap& map, const CVec& psi) {
    if (psi.dim() != map.source_dim) throw std::invalid_argument("compress dimension mismatch");
    if (dist_sq_to_span(map.basis, psi) != 0) throw std::invalid_argument("compress input lies outside the subspace");
    CompressedVec out;
    out.coeffs.reserve(map.basis.size());
    out.scales.reserve(map.basis.size());
    for (const auto& u : map.basis) {
        // <u_i|psi> with u_i = dir/sqrt(nsq): coefficient <dir|psi>, scale nsq
        out.coeffs.push_back(inner_product(u.direction, psi));
        out.scales.push_back(u.norm_sq);
    }
    return out;
}

CVec decompress_exact(const CompressionMap& map, const CompressedVec& chi) {
    if (chi.dim() != map.basis.size()) throw std::invalid_argument("decompress dimension mismatch");
    CVec out(map.source_dim);
    for (std::size_t i = 0; i < map.basis.size(); ++i) {
        // (coeff/sqrt(nsq)) * dir/sqrt(nsq) = (coeff/nsq) * dir
        const CRat& c = chi.coeffs[i];
        if (c.is_zero()) continue;
        CRat scaled(c.re / chi.scales[i], c.im / chi.scales[i]);
        out += scaled * map.basis[i].direction;
    }
    return out;
}

std::vector<std::complex<double>> decompress_float(const CompressionMap& map,
                                                   const std::vector<std::complex<double>>& chi,
                                                   double delta) {
    if (chi.size() != map.basis.size()) throw std::invalid_argument("decompress dimension mismatch");
    if (delta <= 0) throw std::invalid_argument("decompress_float needs delta > 0");
    // rotation columns evaluated to enough binary digits that the matrix error
    // stays far below delta
    int digits = std::max(40, static_cast<int>(std::ceil(std::log2(4.0 * static_cast<double>(map.source_dim) / delta))));
    std::vector<std::complex<double>> out(map.source_dim, 0.0);
    for (std::size_t i = 0; i < map.basis.size(); ++i) {
        auto column = approx_to_digits(map.basis[i].direction, digits);
        double scale = 1.0 / std::sqrt(to_double(map.basis[i].norm_sq));
        for (std::size_t r = 0; r < out.size(); ++r) out[r] += chi[i] * column[r] * scale;
    }
    return out;
}

namespace {

// basis index of H_{<=n} in lexicographic (length-then-value) order equals the
// ragged index already used for qubit strings
std::string fixed_len_string(std::size_t index, int len) {
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = len - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = (index & 1) ? '1' : '0';
        index >>= 1;
    }
    return s;
}

}  // namespace

QubitString embed_fixed_length(const QubitString& sigma) {
    int n = base_length(sigma);
    std::size_t src_dim = ragged_dim(n);
    int m = n + 1;
    std::size_t block = std::size_t{1} << m;
    // target index of ragged index i: the i-th computational vector of H_{n+1}
    auto target = [&](std::size_t i) { return string_index(fixed_len_string(i, m)); };
    std::size_t dim = ragged_dim(m);
    if (sigma.is_exact()) {
        SMat m_out(dim);
        for (const auto& [rc, v] : sigma.exact().entries()) m_out.set(target(rc.first), target(rc.second), v);
        return QubitString::from_exact(std::move(m_out), m);
    }
    FMat src = sigma.to_fmat();
    FMat m_out(dim, dim);
    for (std::size_t r = 0; r < src_dim; ++r)
        for (std::size_t c = 0; c < src_dim; ++c) m_out.at(target(r), target(c)) = src.at(r, c);
    (void)block;
    return QubitString::from_float(std::move(m_out), m);
}

QubitString embed_fixed_length_inverse(const QubitString& embedded) {
    int m = embedded.max_len();
    if (m < 1) throw std::invalid_argument("embedded string must have length >= 1");
    int n = m - 1;
    std::size_t out_dim = ragged_dim(n);
    auto target = [&](std::size_t i) { return string_index(fixed_len_string(i, m)); };
    if (embedded.is_exact()) {
        const SMat& src = embedded.exact();
        // support must lie inside the embedded range
        std::vector<bool> in_range(src.dim(), false);
        for (std::size_t i = 0; i < out_dim; ++i) in_range[target(i)] = true;
        for (const auto& [rc, v] : src.entries())
            if (rc.first == rc.second && !in_range[rc.first] && v.re != 0)
                throw std::domain_error("state lies outside the embedded range");
        SMat out(out_dim);
        for (std::size_t r = 0; r < out_dim; ++r)
            for (std::size_t c = 0; c < out_dim; ++c) out.set(r, c, src.at(target(r), target(c)));
        return QubitString::from_exact(std::move(out), n);
    }
    FMat src = embedded.to_fmat();
    std::vector<bool> in_range(src.rows(), false);
    for (std::size_t i = 0; i < out_dim; ++i) in_range[target(i)] = true;
    for (std::size_t i = 0; i < src.rows(); ++i)
        if (!in_range[i] && std::abs(src.at(i, i)) > 1e-9)
            throw std::domain_error("state lies outside the embedded range");
    FMat out(out_dim, out_dim);
    for (std::size_t r = 0; r < out_dim; ++r)
        for (std::size_t c = 0; c < out_dim; ++c) out.at(r, c) = src.at(target(r), target(c));
    return QubitString::from_float(std::move(out), n);
}

}  // namespace qkolmo
