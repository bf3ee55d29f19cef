#ifndef QTM_EXPERIMENTS_HPP
#define QTM_EXPERIMENTS_HPP

#include <filesystem>
#include <vector>

#include "qtm/io.hpp"
#include "qtm/means.hpp"

namespace qtm {

struct FamilyCoeffs {
    double f0 = 0.0, f1 = 0.0, f2 = 0.0;
};

// Trigonometric test symbol (f0 + theta) + 2 f1 cos t + 2 f2 cos 2t.
Symbol family_symbol(const FamilyCoeffs& f, double theta);

struct ExperimentConfig {
    std::vector<FamilyCoeffs> family = {{2, 1, 0}, {3, 2, 1}, {9, 4, 4}};
    std::vector<double> thetas = {1.0, 0.1, 0.01};
    double eps = 1e-14; // interpolation / final truncation epsilon
    double tol = 1e-13; // mean iteration tolerance
    int max_iter = 100;
    std::vector<MeanKind> kinds = {MeanKind::ALM, MeanKind::NBMP};
    std::filesystem::path out_dir = "out";

    void validate() const;
    io::json to_json() const;
    static ExperimentConfig from_json(const io::json& j);

    // internal arithmetic threshold is eps/10 (the 10x truncation rule)
    ToleranceConfig tolerances() const;
    std::vector<QTMatrix> matrices(double theta) const;
};

struct Table1Row {
    double theta = 0.0;
    long length = 0;       // one-sided numerical length of g
    std::size_t points = 0; // interpolation points
    double seconds = 0.0;
};

struct Table2Row {
    double theta = 0.0;
    MeanKind kind = MeanKind::ALM;
    int iterations = 0;
    double seconds = 0.0;
    long size = 0; // correction support
    long rank = 0;
};

struct Table3Row {
    double theta = 0.0;
    MeanKind kind = MeanKind::ALM;
    long m = 0; // finite size, 3x the infinite correction support
    double finite_seconds = 0.0;
    double infinite_seconds = 0.0;
};

// Evaluation/interpolation of the symbol g per theta; writes table1.csv
// (columns theta,length,n,seconds; the time column is not deterministic).
std::vector<Table1Row> run_table1(const ExperimentConfig& cfg);

// Mean runs per (theta, kind); writes table2.csv
// (columns theta,kind,iterations,seconds,size,rank).
std::vector<Table2Row> run_table2(const ExperimentConfig& cfg);

// Finite (3x support) vs infinite timings; writes table3.csv
// (columns theta,kind,m,finite_seconds,infinite_seconds).
std::vector<Table3Row> run_table3(const ExperimentConfig& cfg);

// Symbol decay and correction grids for the first configured theta: writes
// figure_symbol.csv (j,log10_abs), figure_correction_{alm,nbmp}.csv and
// figure_diff_alm_nbmp.csv (i,j,log10_abs triples; zero entries skipped).
void run_figures(const ExperimentConfig& cfg);

// Config echo plus version stamps, written as manifest.json in out_dir.
void write_manifest(const ExperimentConfig& cfg);

} // namespace qtm

#endif
