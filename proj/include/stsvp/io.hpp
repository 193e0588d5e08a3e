#pragma once

#include "stsvp/types.hpp"

#include <iosfwd>
#include <string>

namespace stsvp::io {

/// Coordinate text format: optional '%' comment lines, then a
/// "rows cols nnz" size line, then one 1-indexed "i j value" line per
/// entry. Observation files carry the sampling probability as a leading
/// "% p=<value>" comment when it is known.

void write_matrix(std::ostream& os, const DenseMatrix& m);
void write_matrix_file(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& is);
DenseMatrix read_matrix_file(const std::string& path);

void write_observations(std::ostream& os, const ObservationSet& omega);
void write_observations_file(const std::string& path, const ObservationSet& omega);
ObservationSet read_observations(std::istream& is);
ObservationSet read_observations_file(const std::string& path);

/// A factorization is stored as three coordinate files:
/// <base>.U.txt, <base>.S.txt (diagonal), <base>.V.txt.
void write_factorization(const std::string& base, const LowRankFactorization& f);
LowRankFactorization read_factorization(const std::string& base);

} // namespace stsvp::io
