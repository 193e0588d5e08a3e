#include "stsvp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace stsvp::io {

namespace {

void write_entries_header(std::ostream& os, Index rows, Index cols,
                          std::size_t nnz) {
    os << rows << ' ' << cols << ' ' << nnz << '\n';
}

void write_entry(std::ostream& os, Index i, Index j, double v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n",
                  static_cast<long long>(i + 1), static_cast<long long>(j + 1),
                  v);
    os << buf;
}

struct ParsedCoordinate {
    Index rows = 0;
    Index cols = 0;
    std::vector<Sample> entries;
    double prob = ObservationSet::kUnknownProb;
};

ParsedCoordinate parse_coordinate(std::istream& is) {
    ParsedCoordinate out;
    std::string line;
    bool have_header = false;
    long long expected = -1;
    std::unordered_set<std::uint64_t> seen;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '%') {
            const auto at = line.find("p=");
            if (at != std::string::npos)
                out.prob = std::stod(line.substr(at + 2));
            continue;
        }
        std::istringstream ls(line);
        if (!have_header) {
            long long r, c, nnz;
            if (!(ls >> r >> c >> nnz) || r < 0 || c < 0 || nnz < 0)
                throw std::runtime_error("coordinate parse: bad size line");
            out.rows = static_cast<Index>(r);
            out.cols = static_cast<Index>(c);
            expected = nnz;
            out.entries.reserve(static_cast<std::size_t>(nnz));
            have_header = true;
            continue;
        }
        long long i, j;
        double v;
        if (!(ls >> i >> j >> v))
            throw std::runtime_error("coordinate parse: bad entry line: " + line);
        if (i < 1 || i > out.rows || j < 1 || j > out.cols)
            throw std::runtime_error("coordinate parse: index out of range: " + line);
        if (!std::isfinite(v))
            throw std::runtime_error("coordinate parse: non-finite value: " + line);
        const std::uint64_t key = static_cast<std::uint64_t>(i - 1) *
                                      static_cast<std::uint64_t>(out.cols) +
                                  static_cast<std::uint64_t>(j - 1);
        if (!seen.insert(key).second)
            throw std::runtime_error("coordinate parse: duplicate entry: " + line);
        out.entries.push_back({static_cast<std::int32_t>(i - 1),
                               static_cast<std::int32_t>(j - 1), v});
    }
    if (!have_header)
        throw std::runtime_error("coordinate parse: missing size line");
    if (expected >= 0 &&
        static_cast<long long>(out.entries.size()) != expected)
        throw std::runtime_error("coordinate parse: entry count mismatch");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

} // namespace

void write_matrix(std::ostream& os, const DenseMatrix& m) {
    write_entries_header(os, m.rows(), m.cols(),
                         static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) write_entry(os, i, j, m(i, j));
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
    auto os = open_out(path);
    write_matrix(os, m);
}

DenseMatrix read_matrix(std::istream& is) {
    ParsedCoordinate parsed = parse_coordinate(is);
    DenseMatrix m = DenseMatrix::Zero(parsed.rows, parsed.cols);
    for (const Sample& e : parsed.entries) m(e.row, e.col) = e.value;
    return m;
}

DenseMatrix read_matrix_file(const std::string& path) {
    auto is = open_in(path);
    return read_matrix(is);
}

void write_observations(std::ostream& os, const ObservationSet& omega) {
    if (omega.prob_known()) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%% p=%.17g\n", omega.sampling_prob);
        os << buf;
    }
    write_entries_header(os, omega.rows, omega.cols, omega.samples.size());
    for (const Sample& e : omega.samples)
        write_entry(os, e.row, e.col, e.value);
}

void write_observations_file(const std::string& path,
                             const ObservationSet& omega) {
    auto os = open_out(path);
    write_observations(os, omega);
}

ObservationSet read_observations(std::istream& is) {
    ParsedCoordinate parsed = parse_coordinate(is);
    ObservationSet omega;
    omega.rows = parsed.rows;
    omega.cols = parsed.cols;
    omega.samples = std::move(parsed.entries);
    omega.sampling_prob = parsed.prob;
    return omega;
}

ObservationSet read_observations_file(const std::string& path) {
    auto is = open_in(path);
    return read_observations(is);
}

void write_factorization(const std::string& base,
                         const LowRankFactorization& f) {
    write_matrix_file(base + ".U.txt", f.left);
    DenseMatrix s = DenseMatrix::Zero(f.rank(), f.rank());
    s.diagonal() = f.values;
    write_matrix_file(base + ".S.txt", s);
    write_matrix_file(base + ".V.txt", f.right);
}

LowRankFactorization read_factorization(const std::string& base) {
    LowRankFactorization f;
    f.left = read_matrix_file(base + ".U.txt");
    DenseMatrix s = read_matrix_file(base + ".S.txt");
    f.values = s.diagonal();
    f.right = read_matrix_file(base + ".V.txt");
    if (f.left.cols() != f.values.size() || f.right.cols() != f.values.size())
        throw std::runtime_error("read_factorization: inconsistent shapes");
    return f;
}

} // namespace stsvp::io
