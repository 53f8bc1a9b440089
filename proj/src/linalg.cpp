#include "svp/linalg.hpp"

#include <algorithm>
#include <stdexcept>

// LAPACK symmetric eigensolver (column-major, but symmetric input so the
// layout does not matter; eigenvectors come back as columns).
extern "C" void dsyev_(const char* jobz, const char* uplo, const int* n, double* a,
                       const int* lda, double* w, double* work, const int* lwork,
                       int* info);

namespace svp {

EigResult sym_eig(const Mat& a) {
  const int n = static_cast<int>(a.size());
  require(n > 0, "sym_eig: empty matrix");
  for (const auto& row : a) require(static_cast<int>(row.size()) == n, "sym_eig: not square");

  std::vector<double> buf(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) buf[static_cast<size_t>(j) * n + i] = a[i][j];

  Vec w(n);
  int info = 0, lwork = -1;
  double wk_query = 0.0;
  dsyev_("V", "U", &n, buf.data(), &n, w.data(), &wk_query, &lwork, &info);
  lwork = static_cast<int>(wk_query);
  std::vector<double> work(std::max(lwork, 1));
  dsyev_("V", "U", &n, buf.data(), &n, w.data(), work.data(), &lwork, &info);
  if (info != 0) throw std::runtime_error("sym_eig: dsyev failed, info=" + std::to_string(info));

  EigResult r;
  r.eigvals = w;
  r.eigvecs = Mat(n, Vec(n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) r.eigvecs[k][i] = buf[static_cast<size_t>(k) * n + i];
  return r;
}

LstsqResult lstsq_min_norm(const Mat& a, const Vec& b, double rank_tol) {
  require(a.size() == b.size(), "lstsq: row count mismatch");
  require(!a.empty(), "lstsq: empty system");
  const size_t m = a.size(), n = a[0].size();

  // Normal equations diagonalized: A^T A = V diag(lam) V^T, lam = sigma^2.
  Mat ata = mat_zeros(n, n);
  Vec atb = zeros(n);
  for (size_t r = 0; r < m; ++r) {
    for (size_t i = 0; i < n; ++i) {
      atb[i] += a[r][i] * b[r];
      for (size_t j = 0; j < n; ++j) ata[i][j] += a[r][i] * a[r][j];
    }
  }
  // Rank cut on the eigenvalues of A^T A directly: a squared singular-value
  // threshold rank_tol^2 * lam_max would sit below machine noise (~1e-16 *
  // lam_max) and admit junk eigenpairs into the solve.
  EigResult eig = sym_eig(ata);
  double lam_max = std::max(eig.eigvals.back(), 0.0);
  double cut = std::max(lam_max * rank_tol, 1e-300);

  LstsqResult out;
  out.x = zeros(n);
  out.nullity = 0;
  for (size_t k = 0; k < n; ++k) {
    if (eig.eigvals[k] <= cut) {
      out.nullity += 1;
      out.null_basis.push_back(eig.eigvecs[k]);
    } else {
      double c = inner(eig.eigvecs[k], atb) / eig.eigvals[k];
      out.x = axpy(out.x, c, eig.eigvecs[k]);
    }
  }
  out.residual = 0.0;
  for (size_t r = 0; r < m; ++r)
    out.residual = std::max(out.residual, std::abs(inner(a[r], out.x) - b[r]));
  return out;
}

GenEigResult sym_geneig(const Mat& a, const Mat& b, double b_floor) {
  const size_t n = a.size();
  require(b.size() == n, "sym_geneig: size mismatch");
  EigResult eb = sym_eig(b);
  double bmax = std::max(eb.eigvals.back(), 0.0);
  double cut = std::max(bmax * b_floor, 1e-300);

  // Columns of the whitening map B^{-1/2} restricted to the retained subspace.
  std::vector<size_t> keep;
  for (size_t k = 0; k < n; ++k)
    if (eb.eigvals[k] > cut) keep.push_back(k);
  GenEigResult out;
  out.discarded = static_cast<int>(n - keep.size());
  if (keep.empty()) return out;

  const size_t r = keep.size();
  Mat w = mat_zeros(n, r); // whitening columns
  for (size_t c = 0; c < r; ++c) {
    double s = 1.0 / std::sqrt(eb.eigvals[keep[c]]);
    for (size_t i = 0; i < n; ++i) w[i][c] = eb.eigvecs[keep[c]][i] * s;
  }
  // Reduced matrix W^T A W (r x r).
  Mat aw = mat_zeros(n, r);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (a[i][j] != 0.0)
        for (size_t c = 0; c < r; ++c) aw[i][c] += a[i][j] * w[j][c];
  Mat red = mat_zeros(r, r);
  for (size_t c1 = 0; c1 < r; ++c1)
    for (size_t i = 0; i < n; ++i)
      if (w[i][c1] != 0.0)
        for (size_t c2 = 0; c2 < r; ++c2) red[c1][c2] += w[i][c1] * aw[i][c2];
  // Symmetrize against round-off before the solve.
  for (size_t i = 0; i < r; ++i)
    for (size_t j = i + 1; j < r; ++j) {
      double s = 0.5 * (red[i][j] + red[j][i]);
      red[i][j] = red[j][i] = s;
    }

  EigResult er = sym_eig(red);
  out.eigvals = er.eigvals;
  out.eigvecs = Mat(r, Vec(n, 0.0));
  for (size_t k = 0; k < r; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < r; ++c) out.eigvecs[k][i] += w[i][c] * er.eigvecs[k][c];
  return out;
}

} // namespace svp
