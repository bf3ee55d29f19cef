#ifndef QTM_IO_HPP
#define QTM_IO_HPP

#include <json.hpp>

#include <filesystem>
#include <string>

#include "qtm/finite.hpp"
#include "qtm/funcalc.hpp"
#include "qtm/qt_matrix.hpp"

namespace qtm {
namespace io {

using json = nlohmann::json;

// Doubles are written in shortest round-trip decimal form; all formats
// round-trip bit-exactly.
std::string format_double(double x);
double parse_double(const std::string& s);

// Symbol: CSV lines "k,re,im" and a JSON variant {offset, coeffs}.
std::string symbol_to_csv(const Symbol& a);
Symbol symbol_from_csv(const std::string& text);
json symbol_to_json(const Symbol& a);
Symbol symbol_from_json(const json& j);

// Correction: JSON header {rows_u, rows_v, rank} with the two factors as
// dense CSV blocks.
json correction_to_json(const LowRankCorrection& e);
LowRankCorrection correction_from_json(const json& j);

// QTMatrix envelope {symbol, correction, flags}.
json qt_to_json(const QTMatrix& a);
QTMatrix qt_from_json(const json& j);

// FiniteQT: the envelope plus {m, e_se} (or the dense payload).
json finite_to_json(const FiniteQT& a);
FiniteQT finite_from_json(const json& j);

// Dense array as CSV (rows of re,im pairs).
std::string dense_to_csv(const DenseMatrix& m);
DenseMatrix dense_from_csv(const std::string& text);

// Iteration trace as CSV "iter,residual".
std::string trace_to_csv(const IterationTrace& t);

// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

void save_json(const std::filesystem::path& path, const json& j);
json load_json(const std::filesystem::path& path);

} // namespace io
} // namespace qtm

#endif
