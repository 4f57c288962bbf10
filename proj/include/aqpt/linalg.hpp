#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace aqpt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Counter-based stream derivation so repeat i of a seeded experiment gets an
/// independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

double uniform_real(Rng& rng, double lo, double hi);

bool is_hermitian(const CMatrix& m, double tol);

/// (M + M†)/2
CMatrix hermitian_part(const CMatrix& m);

/// Eigenvalues of a (nearly) Hermitian matrix, ascending.
RVector hermitian_eigenvalues(const CMatrix& m);

double min_eigenvalue(const CMatrix& m);

/// Square root of a Hermitian PSD matrix. Eigenvalues below `clip` are
/// treated as exactly zero.
CMatrix psd_sqrt(const CMatrix& m, double clip = 1e-12);

/// Complex matrix with i.i.d. standard normal real and imaginary parts.
CMatrix ginibre(int rows, int cols, Rng& rng);

/// rows x cols matrix with orthonormal, Haar-distributed columns (rows >= cols).
/// QR of a Ginibre matrix with the R diagonal rephased to be real positive.
CMatrix haar_random_unitary(int rows, int cols, Rng& rng);

}  // namespace aqpt
