#ifndef HFILL_SPARSE_HPP_
#define HFILL_SPARSE_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace hfill {

  // Column-major sparse integer matrix. Each column holds (row, value) pairs
  // sorted by row; zero values are never stored.
  class SparseIntMatrix {
   public:
    using Entry  = std::pair<std::size_t, std::int64_t>;
    using Column = std::vector<Entry>;

    SparseIntMatrix() = default;
    SparseIntMatrix(std::size_t rows, std::size_t cols)
        : _rows(rows), _columns(cols) {}

    std::size_t rows() const noexcept {
      return _rows;
    }
    std::size_t cols() const noexcept {
      return _columns.size();
    }

    // Adds v to entry (r, c); an entry that becomes zero is erased.
    void add(std::size_t r, std::size_t c, std::int64_t v);

    std::int64_t at(std::size_t r, std::size_t c) const;

    Column const& column(std::size_t c) const {
      return _columns[c];
    }

    std::size_t nonzeros() const;

    // y = M x
    std::vector<std::int64_t> multiply(std::vector<std::int64_t> const& x) const;

    SparseIntMatrix operator*(SparseIntMatrix const& other) const;

    bool is_zero() const {
      return nonzeros() == 0;
    }

    // Restriction to a subset of columns (rows unchanged).
    SparseIntMatrix select_columns(std::vector<std::size_t> const& cols) const;

    bool operator==(SparseIntMatrix const&) const = default;

   private:
    std::size_t         _rows = 0;
    std::vector<Column> _columns;
  };

}  // namespace hfill

#endif  // HFILL_SPARSE_HPP_
