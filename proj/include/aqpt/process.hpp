#pragma once

#include "aqpt/linalg.hpp"

#include <vector>

namespace aqpt {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigClip = 1e-12;

/// d x d state. Sub-normalized traces represent loss, so trace is in (0, 1].
struct DensityMatrix {
  int dim = 0;
  CMatrix mat;
};

/// Operation elements {E_k} of a channel, E(rho) = sum_k E_k rho E_k†.
struct KrausSet {
  int dim = 0;
  std::vector<CMatrix> elements;
  bool trace_preserving = false;
};

/// d² x d² process matrix in the operator basis E_{m = l*d + l'} = |l><l'|.
struct ChiMatrix {
  int dim = 0;
  CMatrix mat;
  bool trace_preserving = false;
};

/// Stacked block column (E_1; E_2; ...; E_K), the channel-determining part of
/// a unitary dilation.
struct DilationColumn {
  int dim = 0;
  int num_elements = 0;
  CMatrix col;  // (dim * num_elements) x dim
};

void validate(const DensityMatrix& rho);
void validate(const KrausSet& ks);
void validate(const ChiMatrix& chi);
void validate(const DilationColumn& dc);

/// Row-major flattening: vec(E)[l*d + l'] = E(l, l').
CVector vec_op(const CMatrix& e);
CMatrix unvec_op(const CVector& v, int d);

/// Q = sum_k E_k† E_k. Equals I for trace-preserving sets.
CMatrix completeness_operator(const KrausSet& ks);

/// (Tr_1 chi)(l', j') = sum_l chi(l*d + l', l*d + j').
CMatrix partial_trace_first(const CMatrix& chi, int d);

ChiMatrix kraus_to_chi(const KrausSet& ks);

/// Recovers operation elements from the eigendecomposition of chi; eigenvalues
/// below 1e-12 are dropped.
KrausSet chi_to_kraus(const ChiMatrix& chi);

DilationColumn kraus_to_dilation(const KrausSet& ks);
KrausSet dilation_to_kraus(const DilationColumn& dc);

DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho);
DensityMatrix apply_channel_chi(const ChiMatrix& chi, const DensityMatrix& rho);

/// chi / d, valid for trace-preserving processes only.
DensityMatrix choi_state(const ChiMatrix& chi);

/// d²_B(A, B) = Tr A + Tr B - 2 Tr sqrt(sqrt(A) B sqrt(A)) on Hermitian PSD
/// matrices of any trace.
double bures_distance_sq(const CMatrix& a, const CMatrix& b);

/// Squared Bures distance between two process matrices.
double process_distance(const ChiMatrix& a, const ChiMatrix& b);

/// Tr(chi²) / (Tr chi)², equal to 1 exactly for rank-1 (unitary-like) processes.
double purity(const ChiMatrix& chi);

/// Tr chi / d; the average loss is 1 - Tr chi / d.
double average_transmittance(const ChiMatrix& chi);

}  // namespace aqpt
