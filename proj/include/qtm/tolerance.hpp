#ifndef QTM_TOLERANCE_HPP
#define QTM_TOLERANCE_HPP

namespace qtm {

// Thresholds shared by the QT arithmetic and the iterative solvers.
//   trunc_eps: relative truncation threshold for symbols and corrections
//              inside arithmetic (the CQT-style internal precision);
//   tol:       iteration tolerance for Newton-type solvers and mean fixed points;
//   max_iter:  iteration cap before NoConvergence.
struct ToleranceConfig {
    double trunc_eps = 1e-15;
    double tol = 1e-13;
    int max_iter = 100;
};

} // namespace qtm

#endif
