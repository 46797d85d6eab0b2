#include "qkolmo/numeric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace qkolmo {

namespace {

Eigen::MatrixXcd to_eigen(const FMat& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(static_cast<long>(r), static_cast<long>(c)) = m.at(r, c);
    return out;
}

}  // namespace

FMat FMat::identity(std::size_t n) {
    FMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

FMat FMat::from_exact(const CMat& src) {
    FMat m(src.rows(), src.cols());
    for (std::size_t r = 0; r < src.rows(); ++r)
        for (std::size_t c = 0; c < src.cols(); ++c) m.at(r, c) = src.at(r, c).to_complex();
    return m;
}

FMat FMat::adjoint() const {
    FMat m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m.at(c, r) = std::conj(at(r, c));
    return m;
}

FMat operator*(const FMat& a, const FMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("FMat product dimension mismatch");
    FMat m(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            auto v = a.at(r, k);
            if (v == std::complex<double>(0.0, 0.0)) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) m.at(r, c) += v * b.at(k, c);
        }
    return m;
}

FMat operator+(const FMat& a, const FMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("FMat sum dimension mismatch");
    FMat m(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) + b.at(r, c);
    return m;
}

FMat operator-(const FMat& a, const FMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("FMat diff dimension mismatch");
    FMat m(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c) - b.at(r, c);
    return m;
}

FMat FMat::scaled(double s) const {
    FMat m(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) m.entries_[i] = entries_[i] * s;
    return m;
}

std::complex<double> FMat::trace() const {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i);
    return t;
}

double FMat::hermiticity_defect() const {
    if (rows_ != cols_) return 1.0;
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r; c < cols_; ++c)
            worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
    return worst;
}

FMat FMat::outer(const std::vector<std::complex<double>>& ket, const std::vector<std::complex<double>>& bra) {
    FMat m(ket.size(), bra.size());
    for (std::size_t r = 0; r < ket.size(); ++r)
        for (std::size_t c = 0; c < bra.size(); ++c) m.at(r, c) = ket[r] * std::conj(bra[c]);
    return m;
}

std::vector<double> hermitian_eigenvalues(const FMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues need a square matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian eigensolve failed");
    std::vector<double> out(static_cast<std::size_t>(solver.eigenvalues().size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = solver.eigenvalues()(static_cast<long>(i));
    return out;
}

double trace_distance(const FMat& rho, const FMat& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("trace_distance dimension mismatch");
    FMat diff = rho - sigma;
    if (diff.hermiticity_defect() > 1e-9) throw std::invalid_argument("trace_distance needs hermitian operands");
    double sum = 0.0;
    for (double lambda : hermitian_eigenvalues(diff)) sum += std::abs(lambda);
    return 0.5 * sum;
}

double trace_distance(const CMat& rho, const CMat& sigma) {
    if (!rho.is_hermitian() || !sigma.is_hermitian())
        throw std::invalid_argument("trace_distance needs hermitian operands");
    return trace_distance(FMat::from_exact(rho), FMat::from_exact(sigma));
}

double pure_state_trace_distance(const std::vector<std::complex<double>>& psi,
                                 const std::vector<std::complex<double>>& phi) {
    if (psi.size() != phi.size()) throw std::invalid_argument("pure_state_trace_distance dimension mismatch");
    std::complex<double> ov = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) ov += std::conj(psi[i]) * phi[i];
    double rest = 1.0 - std::norm(ov);
    return std::sqrt(std::max(0.0, rest));
}

double operator_norm_hermitian(const FMat& m) {
    double worst = 0.0;
    for (double lambda : hermitian_eigenvalues(m)) worst = std::max(worst, std::abs(lambda));
    return worst;
}

double operator_norm(const FMat& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double von_neumann_entropy(const FMat& rho) {
    double s = 0.0;
    for (double lambda : hermitian_eigenvalues(rho)) s += eta_log2(lambda);
    return s;
}

double eta_log2(double x) {
    if (x <= 0.0) return 0.0;
    return -x * std::log2(x);
}

double binary_entropy(double p) { return eta_log2(p) + eta_log2(1.0 - p); }

}  // namespace qkolmo
