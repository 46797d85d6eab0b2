// Floating-point companion to the exact layer: dense complex matrices,
// hermitian eigensolves, trace distance, operator norm, von Neumann entropy.
// Exactness lives in linalg.hpp; this file is for spectra and distances.
#pragma once

#include "qkolmo/linalg.hpp"

#include <complex>
#include <vector>

namespace qkolmo {

class FMat {
public:
    FMat() = default;
    FMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
    static FMat identity(std::size_t n);
    static FMat from_exact(const CMat& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::complex<double>& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const std::complex<double>& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    FMat adjoint() const;
    friend FMat operator*(const FMat& a, const FMat& b);
    friend FMat operator+(const FMat& a, const FMat& b);
    friend FMat operator-(const FMat& a, const FMat& b);
    FMat scaled(double s) const;
    std::complex<double> trace() const;
    double hermiticity_defect() const;  // max |m - m*| entry

    static FMat outer(const std::vector<std::complex<double>>& ket,
                      const std::vector<std::complex<double>>& bra);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::complex<double>> entries_;
};

// Ascending eigenvalues of a hermitian matrix (tridiagonalization + QL, via Eigen).
std::vector<double> hermitian_eigenvalues(const FMat& m);

// (1/2) sum |eigenvalues(rho - sigma)|. Throws on dimension mismatch or
// non-hermitian input (tolerance 1e-9 on the defect).
double trace_distance(const FMat& rho, const FMat& sigma);
double trace_distance(const CMat& rho, const CMat& sigma);

// sqrt(1 - |<psi|phi>|^2) for unit vectors.
double pure_state_trace_distance(const std::vector<std::complex<double>>& psi,
                                 const std::vector<std::complex<double>>& phi);

// Largest |eigenvalue| of a hermitian matrix.
double operator_norm_hermitian(const FMat& m);

// General operator norm (largest singular value).
double operator_norm(const FMat& m);

// von Neumann entropy in bits: -sum lambda log2 lambda over the spectrum.
double von_neumann_entropy(const FMat& rho);

double binary_entropy(double p);

// -x log2 x with 0 log2 0 := 0.
double eta_log2(double x);

}  // namespace qkolmo
