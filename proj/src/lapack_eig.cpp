#include "nhfp/lapack_eig.hpp"

#include <vector>

#include "nhfp/errors.hpp"

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, nhfp::cx* a,
            const int* lda, nhfp::cx* w, nhfp::cx* vl, const int* ldvl,
            nhfp::cx* vr, const int* ldvr, nhfp::cx* work, const int* lwork,
            double* rwork, int* info);
}

namespace nhfp {

namespace {

void zgeev_call(MatrixXcd a, VectorXcd& w, MatrixXcd* vr, MatrixXcd* vl) {
  const int n = int(a.rows());
  w.resize(n);
  if (vr) vr->resize(n, n);
  if (vl) vl->resize(n, n);
  const char* jobvr = vr ? "V" : "N";
  const char* jobvl = vl ? "V" : "N";
  cx* pvr = vr ? vr->data() : nullptr;
  cx* pvl = vl ? vl->data() : nullptr;
  std::vector<double> rwork(2 * n);
  int info = 0;
  int lwork = -1;
  cx wkopt;
  zgeev_(jobvl, jobvr, &n, a.data(), &n, w.data(), pvl, &n, pvr, &n, &wkopt,
         &lwork, rwork.data(), &info);
  lwork = int(wkopt.real());
  std::vector<cx> work(lwork);
  zgeev_(jobvl, jobvr, &n, a.data(), &n, w.data(), pvl, &n, pvr, &n,
         work.data(), &lwork, rwork.data(), &info);
  if (info != 0) throw error("zgeev failed to converge, info=" + std::to_string(info));
}

}  // namespace

VectorXcd eig_values(const MatrixXcd& a) {
  VectorXcd w;
  zgeev_call(a, w, nullptr, nullptr);
  return w;
}

void eig_general(const MatrixXcd& a, VectorXcd& w, MatrixXcd& vr, MatrixXcd& vl) {
  zgeev_call(a, w, &vr, &vl);
}

}  // namespace nhfp
