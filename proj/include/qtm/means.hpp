#ifndef QTM_MEANS_HPP
#define QTM_MEANS_HPP

#include <span>
#include <string>
#include <vector>

#include "qtm/funcalc.hpp"
#include "qtm/qt_matrix.hpp"

namespace qtm {

enum class MeanKind { ALM, NBMP, Weighted, Karcher };

const char* to_string(MeanKind kind);
MeanKind mean_kind_from_string(const std::string& name);

struct MeanRequest {
    std::vector<QTMatrix> matrices;
    MeanKind kind = MeanKind::ALM;
    std::vector<double> weights; // Weighted only; w_i > 0, sum 1
    double tol = 1e-13;
    int max_iter = 100;
    ToleranceConfig cfg{};

    // p >= 2, all matrices flagged (or verified) self-adjoint positive
    // definite, weights a probability vector when kind == Weighted.
    void validate() const;
};

struct MeanResult {
    QTMatrix mean;
    IterationTrace trace;          // max-over-sequences residual per iteration
    double symbol_check = 0.0;     // max-grid |g_mean - g_predicted|
    double symbol_check_rel = 0.0; // relative to max |g_predicted|
};

// Recursive averaging with exponents (1, ..., 1, 1/2): the ALM mean.
MeanResult alm_mean(const MeanRequest& req);
// Exponents ((p-1)/p, (p-2)/(p-1), ..., 1/2): the NBMP mean.
MeanResult nbmp_mean(const MeanRequest& req);
// A_i <- A_i #_{1-w_i} G_{w^(i)}(others); symbol law prod a_i^{w_i}.
MeanResult weighted_mean(const MeanRequest& req);
// Fixed point of X = X^{1/2} exp((1/p) sum log(X^{-1/2} A_i X^{-1/2})) X^{1/2},
// warm-started at the NBMP mean, with step halving on residual increase.
MeanResult karcher_mean(const MeanRequest& req);

MeanResult compute_mean(const MeanRequest& req);

// Karcher residual ||sum_i log(X^{-1/2} A_i X^{-1/2})||_QT at the given X.
double karcher_residual(std::span<const QTMatrix> matrices, const QTMatrix& x, double tol,
                        const ToleranceConfig& cfg = {});

// --- scalar ALM closed form ---------------------------------------------------

// n_k = (1/p) (1 + (-1)^{k+1}/(p-1)^k), the exponent of the scalar ALM
// iterates a_i^{(k)} = a_i^{n_{k-1}} prod_{j != i} a_j^{n_k}.
double alm_exponent(int p, int k);

struct ScalarAlmExponents {
    double n_k = 0.0;
    double n_km1 = 0.0;
    double check_rel_err = 0.0; // closed form vs direct iteration, over 0..k
};

// Closed-form exponent plus a verification against the direct scalar ALM
// iteration on the given positive tuple (a default tuple when omitted).
ScalarAlmExponents scalar_alm_exponents(int p, int k, std::span<const double> a = {});

// --- diagnostics ----------------------------------------------------------------

// Thompson-metric estimate log max(rho(A^-1 B), rho(B^-1 A)) on the m x m
// dense truncations (generalized eigenvalue extremes). An estimate of the
// operator metric, not the metric itself.
double thompson_distance(const QTMatrix& a, const QTMatrix& b, long m);

} // namespace qtm

#endif
