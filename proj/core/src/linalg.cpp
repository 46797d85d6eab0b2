#include "qkolmo/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace qkolmo {

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    try {
        Rational r(s);
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
}

std::string rational_str(const Rational& r) { return r.get_str(); }

double to_double(const Rational& r) { return r.get_d(); }

long floor_log2(const Rational& r) {
    if (r <= 0) throw std::domain_error("floor_log2 needs a positive argument");
    // Find k with 2^k <= r < 2^{k+1} by integer bit counts, then adjust.
    mpz_class num = r.get_num(), den = r.get_den();
    long k = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
    Rational pow;
    if (k >= 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k));
        pow = Rational(p);
    } else {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(-k));
        pow = Rational(1) / Rational(p);
    }
    while (pow > r) { pow /= 2; --k; }
    while (pow * 2 <= r) { pow *= 2; ++k; }
    return k;
}

namespace {

// Splits "a+bi" / "a-bi" / "a" / "ai" at the top-level sign separating the parts.
std::pair<std::string, std::string> split_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    // scan from position 1 so a leading sign stays with the real part
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != '/' && s[i - 1] != '+' && s[i - 1] != '-') {
            return {s.substr(0, i), s.substr(i)};
        }
    }
    return {s, ""};
}

}  // namespace

CRat parse_crat(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
    if (s.empty()) throw std::invalid_argument("empty amplitude literal");
    bool trailing_i = !s.empty() && s.back() == 'i';
    auto [first, second] = split_complex(s);
    if (second.empty()) {
        if (trailing_i) {
            first.pop_back();
            if (first.empty() || first == "+") first = "1";
            if (first == "-") first = "-1";
            return CRat(Rational(0), parse_rational(first));
        }
        return CRat(parse_rational(first));
    }
    if (second.back() != 'i') throw std::invalid_argument("bad amplitude literal: " + text);
    second.pop_back();
    if (second == "+") second = "1";
    if (second == "-") second = "-1";
    return CRat(parse_rational(first), parse_rational(second));
}

std::string crat_str(const CRat& z) {
    std::ostringstream os;
    os << z.re.get_str();
    if (sgn(z.im) >= 0) os << "+";
    os << z.im.get_str() << "i";
    return os.str();
}

CVec CVec::basis(std::size_t dim, std::size_t index) {
    CVec v(dim);
    v[index] = CRat(1);
    return v;
}

bool CVec::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const CRat& z) { return z.is_zero(); });
}

Rational CVec::norm_sq() const {
    Rational n(0);
    for (const auto& z : entries_) n += z.norm_sq();
    return n;
}

CVec& CVec::operator+=(const CVec& o) {
    if (dim() != o.dim()) throw std::invalid_argument("vector dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

CVec& CVec::operator-=(const CVec& o) {
    if (dim() != o.dim()) throw std::invalid_argument("vector dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

CVec operator*(const CRat& s, const CVec& v) {
    CVec out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out[i] = s * v[i];
    return out;
}

std::vector<std::complex<double>> CVec::to_complex() const {
    std::vector<std::complex<double>> out;
    out.reserve(entries_.size());
    for (const auto& z : entries_) out.push_back(z.to_complex());
    return out;
}

CRat inner_product(const CVec& a, const CVec& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner product dimension mismatch");
    CRat acc;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i].conj() * b[i];
    return acc;
}

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = CRat(1);
    return m;
}

bool CMat::is_hermitian() const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r; c < cols_; ++c)
            if (at(r, c) != at(c, r).conj()) return false;
    return true;
}

CMat CMat::adjoint() const {
    CMat m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m.at(c, r) = at(r, c).conj();
    return m;
}

CVec CMat::apply(const CVec& v) const {
    if (v.dim() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
    CVec out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        CRat acc;
        for (std::size_t c = 0; c < cols_; ++c) acc += at(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product dimension mismatch");
    CMat m(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a.at(r, k).is_zero()) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) m.at(r, c) += a.at(r, k) * b.at(k, c);
        }
    return m;
}

CMat operator+(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum dimension mismatch");
    CMat m(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) + b.at(r, c);
    return m;
}

CMat operator-(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix diff dimension mismatch");
    CMat m(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) - b.at(r, c);
    return m;
}

bool operator==(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a.at(r, c) != b.at(r, c)) return false;
    return true;
}

Rational CMat::trace_real() const {
    Rational t(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i).re;
    return t;
}

ScaledUnitVector::ScaledUnitVector(CVec dir) : direction(std::move(dir)), norm_sq(direction.norm_sq()) {
    if (norm_sq == 0) throw std::invalid_argument("scaled unit vector needs a nonzero direction");
}

std::vector<std::complex<double>> ScaledUnitVector::to_unit_complex() const {
    double scale = 1.0 / std::sqrt(to_double(norm_sq));
    auto out = direction.to_complex();
    for (auto& z : out) z *= scale;
    return out;
}

std::vector<ScaledUnitVector> gram_schmidt(const std::vector<CVec>& vectors) {
    std::vector<ScaledUnitVector> out;
    if (vectors.empty()) return out;
    std::size_t dim = vectors.front().dim();
    for (const auto& v : vectors) {
        if (v.dim() != dim) throw std::invalid_argument("gram_schmidt dimension mismatch");
        CVec residual = v;
        for (const auto& u : out) {
            CRat coeff = inner_product(u.direction, residual);
            if (!coeff.is_zero()) {
                coeff = CRat(coeff.re / u.norm_sq, coeff.im / u.norm_sq);
                residual -= coeff * u.direction;
            }
        }
        Rational nsq = residual.norm_sq();
        if (nsq != 0) out.emplace_back(std::move(residual), std::move(nsq));
    }
    return out;
}

namespace {

// In-place elimination; rows are the matrix rows. Returns rank.
int eliminate(std::vector<CVec>& rows) {
    if (rows.empty()) return 0;
    std::size_t cols = rows.front().dim();
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols && pivot_row < rows.size(); ++col) {
        std::size_t sel = pivot_row;
        while (sel < rows.size() && rows[sel][col].is_zero()) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[sel], rows[pivot_row]);
        const CRat inv_pivot = CRat(Rational(1)) / rows[pivot_row][col];
        for (std::size_t c = col; c < cols; ++c) rows[pivot_row][c] = inv_pivot * rows[pivot_row][c];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == pivot_row || rows[r][col].is_zero()) continue;
            CRat factor = rows[r][col];
            for (std::size_t c = col; c < cols; ++c) rows[r][c] -= factor * rows[pivot_row][c];
        }
        ++pivot_row;
    }
    return static_cast<int>(pivot_row);
}

}  // namespace

int exact_rank(const std::vector<CVec>& vectors) {
    std::vector<CVec> rows = vectors;
    return eliminate(rows);
}

std::pair<int, bool> rank_and_membership(const std::vector<CVec>& basis, const CVec& candidate) {
    for (const auto& v : basis)
        if (v.dim() != candidate.dim()) throw std::invalid_argument("rank_and_membership dimension mismatch");
    int rank = exact_rank(basis);
    std::vector<CVec> extended = basis;
    extended.push_back(candidate);
    bool in_span = exact_rank(extended) == rank;
    return {rank, in_span};
}

std::vector<CVec> kernel_basis(const std::vector<CVec>& rows, std::size_t dim) {
    std::vector<CVec> reduced = rows;
    for (const auto& r : reduced)
        if (r.dim() != dim) throw std::invalid_argument("kernel_basis dimension mismatch");
    int rank = eliminate(reduced);
    reduced.resize(static_cast<std::size_t>(rank), CVec(dim));

    // Identify pivot columns of the reduced echelon form.
    std::vector<long> pivot_col(static_cast<std::size_t>(rank), -1);
    std::vector<bool> is_pivot(dim, false);
    for (int r = 0; r < rank; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (!reduced[static_cast<std::size_t>(r)][c].is_zero()) {
                pivot_col[static_cast<std::size_t>(r)] = static_cast<long>(c);
                is_pivot[c] = true;
                break;
            }
        }
    }
    std::vector<CVec> kernel;
    for (std::size_t free_col = 0; free_col < dim; ++free_col) {
        if (is_pivot[free_col]) continue;
        CVec v(dim);
        v[free_col] = CRat(1);
        for (int r = 0; r < rank; ++r) {
            long pc = pivot_col[static_cast<std::size_t>(r)];
            if (pc < 0) continue;
            v[static_cast<std::size_t>(pc)] = -reduced[static_cast<std::size_t>(r)][free_col];
        }
        kernel.push_back(std::move(v));
    }
    return kernel;
}

std::vector<std::complex<double>> approx_to_digits(const CVec& v, int digits) {
    if (digits < 1) throw std::invalid_argument("approx_to_digits needs digits >= 1");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(digits));
    auto snap = [&](const Rational& x) {
        // round(x * 2^N) / 2^N, exact, then one double conversion
        Rational scaled = x * Rational(scale);
        mpz_class num = scaled.get_num(), den = scaled.get_den(), q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        // round-half-up on the fractional part
        if (mpz_class(r * 2) >= den) q += 1;
        Rational rounded = Rational(q) / Rational(scale);
        return rounded.get_d();
    };
    std::vector<std::complex<double>> out;
    out.reserve(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) out.emplace_back(snap(v[i].re), snap(v[i].im));
    return out;
}

Rational dist_sq_to_span(const std::vector<ScaledUnitVector>& ortho_basis, const CVec& v) {
    Rational total = v.norm_sq();
    for (const auto& u : ortho_basis) {
        CRat c = inner_product(u.direction, v);
        total -= c.norm_sq() / u.norm_sq;
    }
    return total;
}

CVec project_onto_span(const std::vector<ScaledUnitVector>& ortho_basis, const CVec& v) {
    CVec out(v.dim());
    for (const auto& u : ortho_basis) {
        CRat c = inner_product(u.direction, v);
        if (c.is_zero()) continue;
        c = CRat(c.re / u.norm_sq, c.im / u.norm_sq);
        out += c * u.direction;
    }
    return out;
}

namespace {
const CRat kZeroEntry{};
}  // namespace

const CRat& SMat::at(std::size_t r, std::size_t c) const {
    auto it = entries_.find({r, c});
    return it == entries_.end() ? kZeroEntry : it->second;
}

void SMat::set(std::size_t r, std::size_t c, CRat value) {
    if (r >= dim_ || c >= dim_) throw std::out_of_range("SMat::set index");
    if (value.is_zero()) entries_.erase({r, c});
    else entries_[{r, c}] = std::move(value);
}

void SMat::add(std::size_t r, std::size_t c, const CRat& value) {
    if (value.is_zero()) return;
    auto [it, inserted] = entries_.try_emplace({r, c}, value);
    if (!inserted) {
        it->second += value;
        if (it->second.is_zero()) entries_.erase(it);
    }
}

bool SMat::is_hermitian() const {
    for (const auto& [rc, v] : entries_) {
        if (at(rc.second, rc.first) != v.conj()) return false;
    }
    return true;
}

Rational SMat::trace_real() const {
    Rational t(0);
    for (const auto& [rc, v] : entries_)
        if (rc.first == rc.second) t += v.re;
    return t;
}

SMat SMat::adjoint() const {
    SMat out(dim_);
    for (const auto& [rc, v] : entries_) out.set(rc.second, rc.first, v.conj());
    return out;
}

SMat operator*(const SMat& a, const SMat& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("SMat product dimension mismatch");
    // index b rows for the join
    std::map<std::size_t, std::vector<std::pair<std::size_t, const CRat*>>> rows_of_b;
    for (const auto& [rc, v] : b.entries_) rows_of_b[rc.first].emplace_back(rc.second, &v);
    SMat out(a.dim_);
    for (const auto& [rc, v] : a.entries_) {
        auto it = rows_of_b.find(rc.second);
        if (it == rows_of_b.end()) continue;
        for (const auto& [col, bv] : it->second) out.add(rc.first, col, v * (*bv));
    }
    return out;
}

ScaledUnitVector canonical_scaled(const ScaledUnitVector& v) {
    mpz_class den_lcm(1), num_gcd(0);
    auto visit = [&](const Rational& r) {
        if (r == 0) return;
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), r.get_den().get_mpz_t());
        mpz_class num = abs(r.get_num());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), num.get_mpz_t());
    };
    for (std::size_t i = 0; i < v.dim(); ++i) {
        visit(v.direction[i].re);
        visit(v.direction[i].im);
    }
    if (num_gcd == 0) throw std::invalid_argument("canonical_scaled on a zero vector");
    Rational scale = Rational(den_lcm) / Rational(num_gcd);
    CVec dir = CRat(scale) * v.direction;
    return ScaledUnitVector(std::move(dir), v.norm_sq * scale * scale);
}

bool is_psd_exact(const CMat& input) {
    if (!input.is_hermitian()) return false;
    CMat m = input;
    std::size_t n = m.rows();
    std::vector<bool> done(n, false);
    for (;;) {
        // pick a remaining index with positive diagonal
        std::size_t pivot = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            if (m.at(i, i).re < 0 || m.at(i, i).im != 0) return false;
            if (m.at(i, i).re > 0 && pivot == n) pivot = i;
        }
        if (pivot == n) {
            // all remaining diagonals are zero: rows must vanish entirely
            for (std::size_t i = 0; i < n; ++i) {
                if (done[i]) continue;
                for (std::size_t j = 0; j < n; ++j)
                    if (!done[j] && !m.at(i, j).is_zero()) return false;
            }
            return true;
        }
        Rational d = m.at(pivot, pivot).re;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || i == pivot) continue;
            CRat f = m.at(i, pivot);
            if (f.is_zero()) continue;
            CRat factor(f.re / d, f.im / d);
            for (std::size_t j = 0; j < n; ++j) {
                if (done[j] || j == pivot) continue;
                m.at(i, j) -= factor * m.at(pivot, j);
            }
        }
        done[pivot] = true;
    }
}

}  // namespace qkolmo
