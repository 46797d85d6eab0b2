// Exact linear algebra over the complex rationals: vectors, matrices,
// Gram-Schmidt with scaled unit vectors, rank / span membership via rational
// Gaussian elimination, and controlled-precision float snapshots.
#pragma once

#include "qkolmo/rational.hpp"

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace qkolmo {

class CVec {
public:
    CVec() = default;
    explicit CVec(std::size_t dim) : entries_(dim) {}
    CVec(std::initializer_list<CRat> init) : entries_(init) {}
    static CVec basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return entries_.size(); }
    CRat& operator[](std::size_t i) { return entries_[i]; }
    const CRat& operator[](std::size_t i) const { return entries_[i]; }

    bool is_zero() const;
    Rational norm_sq() const;

    CVec& operator+=(const CVec& o);
    CVec& operator-=(const CVec& o);
    friend CVec operator+(CVec a, const CVec& b) { return a += b; }
    friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
    friend CVec operator*(const CRat& s, const CVec& v);
    friend bool operator==(const CVec& a, const CVec& b) { return a.entries_ == b.entries_; }

    std::vector<std::complex<double>> to_complex() const;

private:
    std::vector<CRat> entries_;
};

// <a|b> = sum conj(a_i) b_i, exact.
CRat inner_product(const CVec& a, const CVec& b);

class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    static CMat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    CRat& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const CRat& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    bool is_hermitian() const;
    CMat adjoint() const;
    CVec apply(const CVec& v) const;
    friend CMat operator*(const CMat& a, const CMat& b);
    friend CMat operator+(const CMat& a, const CMat& b);
    friend CMat operator-(const CMat& a, const CMat& b);
    friend bool operator==(const CMat& a, const CMat& b);
    Rational trace_real() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<CRat> entries_;
};

// direction / sqrt(norm_sq) without irrational entries; norm_sq is the exact
// squared norm of direction and is kept > 0.
struct ScaledUnitVector {
    CVec direction;
    Rational norm_sq;

    ScaledUnitVector(CVec dir, Rational nsq) : direction(std::move(dir)), norm_sq(std::move(nsq)) {}
    explicit ScaledUnitVector(CVec dir);

    std::size_t dim() const { return direction.dim(); }
    std::vector<std::complex<double>> to_unit_complex() const;
};

// Exact Gram-Schmidt in input order, null vectors dropped.
std::vector<ScaledUnitVector> gram_schmidt(const std::vector<CVec>& vectors);

// Exact rank of the basis and span membership of the candidate.
std::pair<int, bool> rank_and_membership(const std::vector<CVec>& basis, const CVec& candidate);

int exact_rank(const std::vector<CVec>& vectors);

// Kernel of the linear map given by constraint rows (each row r: sum_j r_j x_j = 0),
// as a basis of exact vectors.
std::vector<CVec> kernel_basis(const std::vector<CVec>& rows, std::size_t dim);

// Per-entry accuracy 2^-N on each of real and imaginary part (N >= 1).
std::vector<std::complex<double>> approx_to_digits(const CVec& v, int digits);

// dist(span, v)^2 = |v|^2 - |P v|^2, exact; basis given as orthogonal scaled units.
Rational dist_sq_to_span(const std::vector<ScaledUnitVector>& ortho_basis, const CVec& v);

// P_U v for an orthogonal scaled-unit basis of U, exact.
CVec project_onto_span(const std::vector<ScaledUnitVector>& ortho_basis, const CVec& v);

// Sparse square matrix over the complex rationals; absent entries are zero.
// Zero-valued writes erase, so equal matrices have equal entry maps.
class SMat {
public:
    SMat() = default;
    explicit SMat(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    const CRat& at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, CRat value);
    void add(std::size_t r, std::size_t c, const CRat& value);

    using EntryMap = std::map<std::pair<std::size_t, std::size_t>, CRat>;
    const EntryMap& entries() const { return entries_; }

    bool is_hermitian() const;
    Rational trace_real() const;
    SMat adjoint() const;
    friend SMat operator*(const SMat& a, const SMat& b);
    friend bool operator==(const SMat& a, const SMat& b) { return a.dim_ == b.dim_ && a.entries_ == b.entries_; }

private:
    std::size_t dim_ = 0;
    EntryMap entries_;
};

// Rescales by a positive rational so all entries are integers with content 1.
ScaledUnitVector canonical_scaled(const ScaledUnitVector& v);

// Exact positive-semidefiniteness of a hermitian rational matrix (LDL descent).
bool is_psd_exact(const CMat& m);

}  // namespace qkolmo
