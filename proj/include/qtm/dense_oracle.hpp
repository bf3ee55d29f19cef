#ifndef QTM_DENSE_ORACLE_HPP
#define QTM_DENSE_ORACLE_HPP

#include <Eigen/Dense>

#include <functional>
#include <span>

#include "qtm/means.hpp"

namespace qtm {

using DenseMatrix = Eigen::MatrixXcd;

// Eigendecomposition-based primitives for Hermitian matrices: the brute-force
// reference path, independent of the Newton/CR iterations.
DenseMatrix dense_func(const DenseMatrix& a, const std::function<double(double)>& f);
DenseMatrix dense_sqrt(const DenseMatrix& a);
DenseMatrix dense_power(const DenseMatrix& a, double t);
DenseMatrix dense_log(const DenseMatrix& a);
DenseMatrix dense_exp(const DenseMatrix& a);
// A #_t B via the eigendecomposition formula.
DenseMatrix dense_sharp(const DenseMatrix& a, const DenseMatrix& b, double t);

// Reference geometric means of dense Hermitian positive definite matrices:
// the same recursive averaging / Karcher fixed point driven entirely by the
// eigendecomposition primitives. weights is used by the Weighted kind only.
DenseMatrix dense_oracle_mean(MeanKind kind, std::span<const DenseMatrix> matrices,
                              double tol, int max_iter = 200,
                              std::span<const double> weights = {});

} // namespace qtm

#endif
