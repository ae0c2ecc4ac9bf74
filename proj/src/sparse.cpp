#include "hfill/sparse.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hfill {

  void SparseIntMatrix::add(std::size_t r, std::size_t c, std::int64_t v) {
    if (r >= _rows || c >= cols()) {
      throw std::out_of_range("SparseIntMatrix::add");
    }
    if (v == 0) {
      return;
    }
    auto& col = _columns[c];
    auto  it  = std::lower_bound(
        col.begin(), col.end(), r, [](Entry const& e, std::size_t row) {
          return e.first < row;
        });
    if (it != col.end() && it->first == r) {
      it->second += v;
      if (it->second == 0) {
        col.erase(it);
      }
    } else {
      col.insert(it, {r, v});
    }
  }

  std::int64_t SparseIntMatrix::at(std::size_t r, std::size_t c) const {
    auto const& col = _columns.at(c);
    auto        it  = std::lower_bound(
        col.begin(), col.end(), r, [](Entry const& e, std::size_t row) {
          return e.first < row;
        });
    return it != col.end() && it->first == r ? it->second : 0;
  }

  std::size_t SparseIntMatrix::nonzeros() const {
    std::size_t n = 0;
    for (auto const& c : _columns) {
      n += c.size();
    }
    return n;
  }

  std::vector<std::int64_t>
  SparseIntMatrix::multiply(std::vector<std::int64_t> const& x) const {
    if (x.size() != cols()) {
      throw std::invalid_argument("SparseIntMatrix::multiply: size mismatch");
    }
    std::vector<std::int64_t> y(_rows, 0);
    for (std::size_t c = 0; c < cols(); ++c) {
      if (x[c] == 0) {
        continue;
      }
      for (auto const& [r, v] : _columns[c]) {
        y[r] += v * x[c];
      }
    }
    return y;
  }

  SparseIntMatrix SparseIntMatrix::operator*(SparseIntMatrix const& other) const {
    if (cols() != other.rows()) {
      throw std::invalid_argument("SparseIntMatrix::operator*: size mismatch");
    }
    SparseIntMatrix out(_rows, other.cols());
    for (std::size_t c = 0; c < other.cols(); ++c) {
      std::map<std::size_t, std::int64_t> acc;
      for (auto const& [k, v] : other.column(c)) {
        for (auto const& [r, w] : _columns[k]) {
          acc[r] += v * w;
        }
      }
      for (auto const& [r, v] : acc) {
        if (v != 0) {
          out._columns[c].emplace_back(r, v);
        }
      }
    }
    return out;
  }

  SparseIntMatrix
  SparseIntMatrix::select_columns(std::vector<std::size_t> const& cols) const {
    SparseIntMatrix out(_rows, cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out._columns[i] = _columns.at(cols[i]);
    }
    return out;
  }

}  // namespace hfill
