#include "neulap/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>

#include "neulap/errors.hpp"

namespace neulap::eigs {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using fem::SpMat;

struct Breakdown {};

double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 4503599627370496.0) - 1.0;
}

// Remove the span of each (M-orthonormal) prior block from B, then M-orthonormalize
// the columns of B in place by modified Gram-Schmidt with one reorthogonalization
// pass, dropping columns that collapse. MB is kept consistent.
void m_orthonormalize(const SpMat& M, MatrixXd& B, MatrixXd& MB,
                      const std::vector<const MatrixXd*>& priors,
                      const std::vector<const MatrixXd*>& m_priors) {
  if (B.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass)
    for (size_t p = 0; p < priors.size(); ++p)
      if (priors[p]->cols() > 0) B -= (*priors[p]) * (m_priors[p]->transpose() * B);
  MB = M * B;
  const int m = static_cast<int>(B.cols());
  std::vector<int> keep;
  keep.reserve(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    const double orig = std::sqrt(std::max(0.0, B.col(c).dot(MB.col(c))));
    for (int pass = 0; pass < 2; ++pass)
      for (int d : keep) {
        const double a = MB.col(d).dot(B.col(c));
        B.col(c) -= a * B.col(d);
        MB.col(c) -= a * MB.col(d);
      }
    const double nrm2 = B.col(c).dot(MB.col(c));
    if (!(nrm2 > 0.0)) continue;
    const double nrm = std::sqrt(nrm2);
    if (nrm < 1e-7 * (orig + 1e-300)) continue;  // numerically dependent, drop
    B.col(c) /= nrm;
    MB.col(c) /= nrm;
    keep.push_back(c);
  }
  if (static_cast<int>(keep.size()) < m) {
    MatrixXd Bk(B.rows(), keep.size()), MBk(B.rows(), keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      Bk.col(static_cast<int>(i)) = B.col(keep[i]);
      MBk.col(static_cast<int>(i)) = MB.col(keep[i]);
    }
    B = std::move(Bk);
    MB = std::move(MBk);
  }
}

std::vector<double> block_residuals(const MatrixXd& KX, const MatrixXd& MX,
                                    const VectorXd& theta, int k) {
  std::vector<double> res(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    const VectorXd r = KX.col(i) - theta[i] * MX.col(i);
    const double denom = KX.col(i).norm() + std::abs(theta[i]) * MX.col(i).norm();
    res[static_cast<size_t>(i)] = denom > 0.0 ? r.norm() / denom : r.norm();
  }
  return res;
}

EigenResult lobpcg_attempt(const fem::AssembledForms& forms, const EigenRequest& req,
                           std::uint64_t seed) {
  const SpMat& K = forms.K;
  const SpMat& M = forms.M;
  const int n = static_cast<int>(K.rows());
  int bs = req.block_size > 0 ? req.block_size : req.k + std::max(2, req.k / 2);
  if (req.block_size > 0 && req.block_size < req.k)
    throw ParameterError("block_size must be >= k");
  bs = std::min(bs, n);
  bs = std::max(bs, req.k);

  double sigma = 0.0;
  if (!forms.dirichlet_active) sigma = 1e-3 * K.diagonal().sum() / n;

  // Preconditioner: sparse LDL^t of K + sigma*M. Point Jacobi is kept as a
  // fallback only; the mapped channel forms are far too anisotropic for it
  // (transverse/axial coefficient ratio ~ 1/g^2, and a diagonal scaling leaves
  // the preconditioned condition number ~ 1e9 at eps = 0.125).
  Eigen::SimplicialLDLT<SpMat> ldlt;
  if (sigma != 0.0) {
    SpMat shifted = K + SpMat(sigma * M);
    ldlt.compute(shifted);
  } else {
    ldlt.compute(K);
  }
  const bool use_ldlt = ldlt.info() == Eigen::Success;
  VectorXd D = K.diagonal() + sigma * M.diagonal();
  for (int i = 0; i < n; ++i)
    if (!(D[i] > 0.0)) D[i] = 1.0;

  std::mt19937_64 rng(seed);
  MatrixXd X(n, bs);
  for (int c = 0; c < bs; ++c)
    for (int r = 0; r < n; ++r) X(r, c) = uniform_pm1(rng);
  MatrixXd MX;
  m_orthonormalize(M, X, MX, {}, {});
  if (X.cols() < bs) throw Breakdown{};
  MatrixXd KX = K * X;

  // Rayleigh-Ritz on the initial block
  VectorXd theta;
  {
    MatrixXd A = X.transpose() * KX;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));
    if (es.info() != Eigen::Success) throw Breakdown{};
    theta = es.eigenvalues();
    X = X * es.eigenvectors();
    KX = KX * es.eigenvectors();
    MX = MX * es.eigenvectors();
  }

  MatrixXd P(n, 0), KP(n, 0), MP(n, 0);
  EigenResult out;
  int it = 0;
  int stall = 0;
  for (it = 1; it <= req.max_iter; ++it) {
    MatrixXd R = KX - MX * theta.asDiagonal();
    const auto res = block_residuals(KX, MX, theta, req.k);
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, r);
    if (worst <= req.tol) {
      out.converged = true;
      break;
    }

    MatrixXd W =
        use_ldlt ? MatrixXd(ldlt.solve(R)) : MatrixXd((R.array().colwise() / D.array()).matrix());
    MatrixXd MW;
    {
      std::vector<const MatrixXd*> priors{&X};
      std::vector<const MatrixXd*> mpriors{&MX};
      if (P.cols() > 0) {
        priors.push_back(&P);
        mpriors.push_back(&MP);
      }
      m_orthonormalize(M, W, MW, priors, mpriors);
    }
    if (W.cols() == 0 && P.cols() == 0) break;  // no admissible search direction left
    MatrixXd KW = K * W;

    const int nw = static_cast<int>(W.cols());
    const int np = static_cast<int>(P.cols());
    const int ns = bs + nw + np;
    MatrixXd A(ns, ns), B(ns, ns);
    auto fill_block = [&](MatrixXd& G, const MatrixXd& Li, const MatrixXd& Rj, int r0,
                          int c0) { G.block(r0, c0, Li.cols(), Rj.cols()) = Li.transpose() * Rj; };
    // A = S^t K S, B = S^t M S with S = [X W P]
    fill_block(A, X, KX, 0, 0);
    fill_block(A, X, KW, 0, bs);
    fill_block(A, W, KW, bs, bs);
    fill_block(B, X, MX, 0, 0);
    fill_block(B, X, MW, 0, bs);
    fill_block(B, W, MW, bs, bs);
    if (np > 0) {
      fill_block(A, X, KP, 0, bs + nw);
      fill_block(A, W, KP, bs, bs + nw);
      fill_block(A, P, KP, bs + nw, bs + nw);
      fill_block(B, X, MP, 0, bs + nw);
      fill_block(B, W, MP, bs, bs + nw);
      fill_block(B, P, MP, bs + nw, bs + nw);
    }
    A.triangularView<Eigen::StrictlyLower>() = A.transpose();
    B.triangularView<Eigen::StrictlyLower>() = B.transpose();

    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, B,
                                                          Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw Breakdown{};
    const MatrixXd C = es.eigenvectors().leftCols(bs);
#ifndef NDEBUG
    for (int i = 0; i < bs; ++i)
      assert(es.eigenvalues()[i] <= theta[i] + 1e-8 * (1.0 + std::abs(theta[i])) &&
             "Ritz values must not increase");
#endif
    const VectorXd theta_new = es.eigenvalues().head(bs);

    const MatrixXd Cx = C.topRows(bs);
    const MatrixXd Cw = C.middleRows(bs, nw);
    MatrixXd Xn = X * Cx + W * Cw;
    MatrixXd KXn = KX * Cx + KW * Cw;
    MatrixXd MXn = MX * Cx + MW * Cw;
    MatrixXd Pn = W * Cw;
    MatrixXd KPn = KW * Cw;
    MatrixXd MPn = MW * Cw;
    if (np > 0) {
      const MatrixXd Cp = C.bottomRows(np);
      Xn += P * Cp;
      KXn += KP * Cp;
      MXn += MP * Cp;
      Pn += P * Cp;
      KPn += KP * Cp;
      MPn += MP * Cp;
    }
    X = std::move(Xn);
    KX = std::move(KXn);
    MX = std::move(MXn);

    // The relative residual bottoms out near eps_mach * kappa(K) / 2 (the K*x
    // product cancels), which sits above tol on the thin-channel forms.  Once
    // the Ritz values are stationary to working precision, more iterations
    // only churn roundoff: stop and report the flag honestly.
    double dmax = 0.0;
    for (int i = 0; i < req.k; ++i)
      dmax = std::max(dmax, std::abs(theta_new[i] - theta[i]) / (1.0 + std::abs(theta_new[i])));
    stall = dmax <= 1e-13 ? stall + 1 : 0;
    theta = theta_new;
    if (stall >= 5) break;

    // keep the implicit difference directions, M-orthonormalized against X
    P = std::move(Pn);
    MatrixXd MPtmp;
    m_orthonormalize(M, P, MPtmp, {&X}, {&MX});
    if (P.cols() > 0) {
      KP = K * P;
      MP = std::move(MPtmp);
    } else {
      KP.resize(n, 0);
      MP.resize(n, 0);
    }
  }

  out.iterations = std::min(it, req.max_iter);
  out.values.assign(theta.data(), theta.data() + req.k);
  out.vectors = X.leftCols(req.k);
  out.residuals = block_residuals(KX, MX, theta, req.k);
  if (!out.converged) {
    double worst = 0.0;
    for (double r : out.residuals) worst = std::max(worst, r);
    out.converged = worst <= req.tol;
  }
  return out;
}

}  // namespace

EigenResult lobpcg(const fem::AssembledForms& forms, const EigenRequest& req) {
  const int n = static_cast<int>(forms.K.rows());
  if (req.k < 1) throw ParameterError("k must be >= 1");
  if (req.k > n) throw ParameterError("k exceeds problem size");
  if (!(req.tol > 0.0)) throw ParameterError("tol must be positive");
  try {
    return lobpcg_attempt(forms, req, req.seed);
  } catch (const Breakdown&) {
    // one fresh random block, then give up
    try {
      return lobpcg_attempt(forms, req, req.seed ^ 0x9e3779b97f4a7c15ULL);
    } catch (const Breakdown&) {
      throw ConvergenceError("Ritz breakdown persisted after restart");
    }
  }
}

EigenResult dense_oracle(const fem::AssembledForms& forms) {
  const int n = static_cast<int>(forms.K.rows());
  if (n > 2000) throw ParameterError("dense oracle limited to n <= 2000");
  MatrixXd Kd = MatrixXd(forms.K);
  MatrixXd Md = MatrixXd(forms.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(
      Kd, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense factorization failed; M not positive definite?");
  EigenResult out;
  out.vectors = es.eigenvectors();
  MatrixXd KX = forms.K * out.vectors;
  MatrixXd MX = forms.M * out.vectors;
  // One Rayleigh quotient pass against the sparse forms. The reduction to
  // standard form is backward stable only in absolute terms (~eps*lambda_max),
  // which destroys the relative accuracy of small eigenvalues on badly scaled
  // pencils (thin channels reach lambda_max ~ 1e11). The quotient of the
  // computed eigenvector recovers relative accuracy.
  VectorXd polished(n);
  for (int i = 0; i < n; ++i) {
    const double mass = out.vectors.col(i).dot(MX.col(i));
    polished[i] = mass > 0.0 ? out.vectors.col(i).dot(KX.col(i)) / mass
                             : es.eigenvalues()[i];
  }
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return polished[a] < polished[b]; });
  out.values.resize(static_cast<size_t>(n));
  MatrixXd vperm(n, n), kperm(n, n), mperm(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[static_cast<size_t>(i)] = polished[order[static_cast<size_t>(i)]];
    vperm.col(i) = out.vectors.col(order[static_cast<size_t>(i)]);
    kperm.col(i) = KX.col(order[static_cast<size_t>(i)]);
    mperm.col(i) = MX.col(order[static_cast<size_t>(i)]);
  }
  out.vectors.swap(vperm);
  KX.swap(kperm);
  MX.swap(mperm);
  out.residuals.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const VectorXd r = KX.col(i) - out.values[static_cast<size_t>(i)] * MX.col(i);
    const double denom =
        KX.col(i).norm() + std::abs(out.values[static_cast<size_t>(i)]) * MX.col(i).norm();
    out.residuals[static_cast<size_t>(i)] = denom > 0.0 ? r.norm() / denom : r.norm();
  }
  out.iterations = 0;
  out.converged = true;
  return out;
}

double rayleigh_quotient(const fem::AssembledForms& forms, const Eigen::VectorXd& x) {
  const double mnorm = x.dot(forms.M * x);
  if (!(mnorm > 0.0)) throw ParameterError("vector has zero M-norm");
  return x.dot(forms.K * x) / mnorm;
}

}  // namespace neulap::eigs
