#ifndef NMFID_IO_HPP
#define NMFID_IO_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmfid/matrix.hpp"
#include "nmfid/scalar.hpp"

namespace nmfid {

// ---------------------------------------------------------------------------
// CSV matrices.
//
// One matrix row per line, entries separated by commas.  Entries may be
// integers, fractions "p/q", or finite decimals; scientific notation is
// accepted only in float mode.  Blank lines and lines starting with '#'
// are skipped.
// ---------------------------------------------------------------------------

inline std::string trim_copy(const std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::vector<std::string>> csv_tokens(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim_copy(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> row;
        std::string cell;
        std::istringstream ls(t);
        while (std::getline(ls, cell, ',')) {
            std::string c = trim_copy(cell);
            if (c.empty())
                throw std::invalid_argument("empty cell at line " + std::to_string(lineno));
            row.push_back(c);
        }
        if (row.empty())
            throw std::invalid_argument("empty row at line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("no matrix rows found");
    for (const auto& r : rows)
        if (r.size() != rows.front().size())
            throw std::invalid_argument("rows have inconsistent lengths");
    return rows;
}

// True when every cell parses as an exact rational (integer, fraction, or
// finite plain decimal) -- the test used to pick exact mode automatically.
inline bool csv_is_exact(const std::string& text) {
    try {
        for (const auto& row : csv_tokens(text))
            for (const auto& cell : row)
                if (!parse_rational(cell)) return false;
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

template <typename T>
Matrix<T> read_matrix_csv(const std::string& text) {
    auto rows = csv_tokens(text);
    if (rows.empty()) throw std::runtime_error("CSV contains no data rows");
    Matrix<T> m(rows.size(), rows.front().size());
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j) {
            std::optional<T> v = parse_scalar<T>(rows[i][j]);
            if (!v)
                throw std::runtime_error("CSV row " + std::to_string(i + 1) + ", column " +
                                         std::to_string(j + 1) + ": cannot parse \"" +
                                         rows[i][j] + "\"");
            m(i, j) = std::move(*v);
        }
    return m;
}

template <typename T>
void write_matrix_csv(std::ostream& os, const Matrix<T>& m) {
    for (index_t i = 0; i < m.rows(); ++i) {
        for (index_t j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << format_scalar(m(i, j));
        }
        os << '\n';
    }
}

template <typename T>
std::string matrix_csv_string(const Matrix<T>& m) {
    std::ostringstream os;
    write_matrix_csv(os, m);
    return os.str();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename T>
Matrix<T> read_matrix_file(const std::string& path) {
    return read_matrix_csv<T>(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Plain-text PGM (P2) images for the synthetic swimmer frames.  Matrix rows
// are image rows; entries must be integers in [0, maxval].
// ---------------------------------------------------------------------------

inline void write_pgm_p2(std::ostream& os, const Matrix<double>& img, int maxval = 1) {
    os << "P2\n" << img.cols() << ' ' << img.rows() << '\n' << maxval << '\n';
    for (index_t i = 0; i < img.rows(); ++i) {
        for (index_t j = 0; j < img.cols(); ++j) {
            long v = std::lround(img(i, j));
            if (v < 0 || v > maxval)
                throw std::invalid_argument("pixel out of range for PGM");
            if (j) os << ' ';
            os << v;
        }
        os << '\n';
    }
}

}  // namespace nmfid

#endif  // NMFID_IO_HPP
