#include "aqpt/process.hpp"

#include <cmath>
#include <stdexcept>

namespace aqpt {

namespace {

void check_square(const CMatrix& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

void validate(const DensityMatrix& rho) {
  if (rho.dim <= 0) throw std::invalid_argument("DensityMatrix: dim must be positive");
  check_square(rho.mat, rho.dim, "DensityMatrix");
  if (!rho.mat.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  if (!is_hermitian(rho.mat, kHermitianTol)) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (min_eigenvalue(rho.mat) < -kPsdTol) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }
  const double tr = rho.mat.trace().real();
  if (tr <= 0.0 || tr > 1.0 + kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace must be in (0, 1]");
  }
}

void validate(const KrausSet& ks) {
  if (ks.dim <= 0) throw std::invalid_argument("KrausSet: dim must be positive");
  if (ks.elements.empty()) throw std::invalid_argument("KrausSet: no elements");
  if (static_cast<int>(ks.elements.size()) > ks.dim * ks.dim + 1) {
    throw std::invalid_argument("KrausSet: too many elements");
  }
  for (const auto& e : ks.elements) check_square(e, ks.dim, "KrausSet element");
  const CMatrix q = completeness_operator(ks);
  if (hermitian_eigenvalues(q).maxCoeff() > 1.0 + kTraceTol) {
    throw std::invalid_argument("KrausSet: completeness operator exceeds identity");
  }
  if (ks.trace_preserving) {
    const double dev = (q - CMatrix::Identity(ks.dim, ks.dim)).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol) {
      throw std::invalid_argument("KrausSet: flagged trace-preserving but sum E†E != I");
    }
  }
}

void validate(const ChiMatrix& chi) {
  if (chi.dim <= 0) throw std::invalid_argument("ChiMatrix: dim must be positive");
  const int d2 = chi.dim * chi.dim;
  check_square(chi.mat, d2, "ChiMatrix");
  if (!chi.mat.allFinite()) throw std::invalid_argument("ChiMatrix: non-finite entries");
  if (!is_hermitian(chi.mat, kHermitianTol)) {
    throw std::invalid_argument("ChiMatrix: not Hermitian");
  }
  if (min_eigenvalue(chi.mat) < -kPsdTol) {
    throw std::invalid_argument("ChiMatrix: not positive semidefinite");
  }
  const double tr = chi.mat.trace().real();
  if (tr > chi.dim + kTraceTol) {
    throw std::invalid_argument("ChiMatrix: trace exceeds dimension");
  }
  if (chi.trace_preserving) {
    if (std::abs(tr - chi.dim) > kTraceTol) {
      throw std::invalid_argument("ChiMatrix: flagged trace-preserving but Tr chi != d");
    }
    const CMatrix pt = partial_trace_first(chi.mat, chi.dim);
    if ((pt - CMatrix::Identity(chi.dim, chi.dim)).cwiseAbs().maxCoeff() > kTraceTol) {
      throw std::invalid_argument("ChiMatrix: flagged trace-preserving but Tr_1 chi != I");
    }
  }
}

void validate(const DilationColumn& dc) {
  if (dc.dim <= 0 || dc.num_elements <= 0) {
    throw std::invalid_argument("DilationColumn: dims must be positive");
  }
  if (dc.col.rows() != static_cast<Eigen::Index>(dc.dim) * dc.num_elements ||
      dc.col.cols() != dc.dim) {
    throw std::invalid_argument("DilationColumn: shape mismatch");
  }
  const CMatrix q = dc.col.adjoint() * dc.col;
  if (hermitian_eigenvalues(q).maxCoeff() > 1.0 + kTraceTol) {
    throw std::invalid_argument("DilationColumn: col†·col exceeds identity");
  }
}

CVector vec_op(const CMatrix& e) {
  const int d = static_cast<int>(e.rows());
  CVector v(d * d);
  for (int l = 0; l < d; ++l) {
    for (int lp = 0; lp < d; ++lp) v[l * d + lp] = e(l, lp);
  }
  return v;
}

CMatrix unvec_op(const CVector& v, int d) {
  CMatrix e(d, d);
  for (int l = 0; l < d; ++l) {
    for (int lp = 0; lp < d; ++lp) e(l, lp) = v[l * d + lp];
  }
  return e;
}

CMatrix completeness_operator(const KrausSet& ks) {
  CMatrix q = CMatrix::Zero(ks.dim, ks.dim);
  for (const auto& e : ks.elements) q += e.adjoint() * e;
  return q;
}

CMatrix partial_trace_first(const CMatrix& chi, int d) {
  CMatrix out = CMatrix::Zero(d, d);
  for (int lp = 0; lp < d; ++lp) {
    for (int jp = 0; jp < d; ++jp) {
      Complex s(0, 0);
      for (int l = 0; l < d; ++l) s += chi(l * d + lp, l * d + jp);
      out(lp, jp) = s;
    }
  }
  return out;
}

ChiMatrix kraus_to_chi(const KrausSet& ks) {
  const int d = ks.dim;
  for (const auto& e : ks.elements) check_square(e, d, "kraus_to_chi");
  CMatrix chi = CMatrix::Zero(d * d, d * d);
  for (const auto& e : ks.elements) {
    const CVector v = vec_op(e);
    chi += v * v.adjoint();
  }
  const CMatrix q = completeness_operator(ks);
  const bool tp = (q - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= kHermitianTol;
  return ChiMatrix{d, std::move(chi), tp};
}

KrausSet chi_to_kraus(const ChiMatrix& chi) {
  validate(chi);
  const int d = chi.dim;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(chi.mat));
  if (es.info() != Eigen::Success) throw std::runtime_error("chi_to_kraus: eigensolver failed");
  KrausSet ks;
  ks.dim = d;
  // Descending eigenvalue order; negligible components dropped.
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double lam = es.eigenvalues()[i];
    if (lam <= kEigClip) break;
    ks.elements.push_back(std::sqrt(lam) * unvec_op(es.eigenvectors().col(i), d));
  }
  if (ks.elements.empty()) ks.elements.push_back(CMatrix::Zero(d, d));
  const CMatrix q = completeness_operator(ks);
  ks.trace_preserving = (q - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8;
  return ks;
}

DilationColumn kraus_to_dilation(const KrausSet& ks) {
  const int d = ks.dim;
  const int k = static_cast<int>(ks.elements.size());
  CMatrix col(d * k, d);
  for (int i = 0; i < k; ++i) {
    check_square(ks.elements[i], d, "kraus_to_dilation");
    col.middleRows(i * d, d) = ks.elements[i];
  }
  return DilationColumn{d, k, std::move(col)};
}

KrausSet dilation_to_kraus(const DilationColumn& dc) {
  const int d = dc.dim;
  if (dc.col.rows() % d != 0) {
    throw std::invalid_argument("dilation_to_kraus: row count not divisible by dim");
  }
  const int k = static_cast<int>(dc.col.rows()) / d;
  KrausSet ks;
  ks.dim = d;
  for (int i = 0; i < k; ++i) ks.elements.push_back(dc.col.middleRows(i * d, d));
  const CMatrix q = completeness_operator(ks);
  ks.trace_preserving = (q - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= kHermitianTol;
  return ks;
}

DensityMatrix apply_channel(const KrausSet& ks, const DensityMatrix& rho) {
  if (ks.dim != rho.dim) throw std::invalid_argument("apply_channel: dimension mismatch");
  CMatrix out = CMatrix::Zero(rho.dim, rho.dim);
  for (const auto& e : ks.elements) out += e * rho.mat * e.adjoint();
  return DensityMatrix{rho.dim, std::move(out)};
}

DensityMatrix apply_channel_chi(const ChiMatrix& chi, const DensityMatrix& rho) {
  const int d = chi.dim;
  if (d != rho.dim) throw std::invalid_argument("apply_channel_chi: dimension mismatch");
  // rho'(l, j) = sum_{l', j'} chi(l*d + l', j*d + j') rho(l', j')
  CMatrix out(d, d);
  for (int l = 0; l < d; ++l) {
    for (int j = 0; j < d; ++j) {
      Complex s(0, 0);
      for (int lp = 0; lp < d; ++lp) {
        for (int jp = 0; jp < d; ++jp) {
          s += chi.mat(l * d + lp, j * d + jp) * rho.mat(lp, jp);
        }
      }
      out(l, j) = s;
    }
  }
  return DensityMatrix{d, std::move(out)};
}

DensityMatrix choi_state(const ChiMatrix& chi) {
  if (!chi.trace_preserving) {
    throw std::invalid_argument("choi_state: chi is not trace-preserving");
  }
  return DensityMatrix{chi.dim * chi.dim, chi.mat / chi.dim};
}

double bures_distance_sq(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument("bures_distance_sq: shape mismatch");
  }
  const double psd_slack = 1e-8;
  if (!is_hermitian(a, 1e-8) || !is_hermitian(b, 1e-8)) {
    throw std::invalid_argument("bures_distance_sq: inputs must be Hermitian");
  }
  if (min_eigenvalue(a) < -psd_slack || min_eigenvalue(b) < -psd_slack) {
    throw std::invalid_argument("bures_distance_sq: inputs must be PSD");
  }
  const CMatrix sa = psd_sqrt(a, kEigClip);
  const CMatrix inner = sa * b * sa;
  RVector lam = hermitian_eigenvalues(inner);
  double fid = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > 0) fid += std::sqrt(lam[i]);
  }
  const double d2 = a.trace().real() + b.trace().real() - 2.0 * fid;
  return d2 > 0.0 ? d2 : 0.0;
}

double process_distance(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.dim != b.dim) throw std::invalid_argument("process_distance: dimension mismatch");
  return bures_distance_sq(a.mat, b.mat);
}

double purity(const ChiMatrix& chi) {
  const double tr = chi.mat.trace().real();
  if (tr <= 0) throw std::invalid_argument("purity: chi has non-positive trace");
  const double tr2 = (chi.mat * chi.mat).trace().real();
  return tr2 / (tr * tr);
}

double average_transmittance(const ChiMatrix& chi) {
  return chi.mat.trace().real() / chi.dim;
}

}  // namespace aqpt
