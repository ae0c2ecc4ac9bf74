#ifndef HFILL_CHAINS_HPP_
#define HFILL_CHAINS_HPP_

#include "hfill/complex.hpp"
#include "hfill/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfill {

  // Integer d-chain; zero coefficients are never stored.
  class Chain {
   public:
    using Coeffs = std::map<std::size_t, std::int64_t>;

    Chain() = default;
    explicit Chain(int dim) : _dim(dim) {}
    Chain(int dim, Coeffs coeffs);

    int dim() const noexcept {
      return _dim;
    }
    Coeffs const& coeffs() const noexcept {
      return _coeffs;
    }
    bool empty() const noexcept {
      return _coeffs.empty();
    }
    std::size_t support_size() const noexcept {
      return _coeffs.size();
    }

    std::int64_t operator[](std::size_t cell) const;
    void         add(std::size_t cell, std::int64_t v);

    // Sum of absolute coefficients.
    std::int64_t norm() const;

    Chain& operator+=(Chain const& o);
    Chain& operator-=(Chain const& o);
    friend Chain operator+(Chain a, Chain const& b) {
      return a += b;
    }
    friend Chain operator-(Chain a, Chain const& b) {
      return a -= b;
    }
    friend Chain operator*(std::int64_t k, Chain c);

    bool operator==(Chain const&) const = default;

    // Dense coefficient vector of the given length.
    std::vector<std::int64_t> dense(std::size_t size) const;
    static Chain from_dense(int dim, std::vector<std::int64_t> const& v);

   private:
    int    _dim = 0;
    Coeffs _coeffs;
  };

  Chain apply_boundary(CellComplex const& k, Chain const& c);

  // d >= 1: boundary vanishes. d = 0: coefficient sum is zero on every
  // connected component of the 1-skeleton.
  bool is_cycle(CellComplex const& k, Chain const& c);

  inline std::int64_t norm(Chain const& c) {
    return c.norm();
  }

  // JSON array of [cell, coefficient] pairs sorted by cell.
  std::string to_json(Chain const& c);
  Chain       chain_from_json(std::string const& text, int dim);

  struct KernelReport {
    std::size_t                                           rank        = 0;
    std::size_t                                           kernel_rank = 0;
    std::optional<std::vector<std::vector<std::int64_t>>> basis;
  };

  // Exact rank by fraction-free elimination with Markowitz pivoting; the
  // integer kernel basis is produced on request.
  KernelReport kernel_rank(SparseIntMatrix const& m, bool want_basis = false);

  // Unique integer solution of m x = b. Absent when the system is
  // inconsistent; throws NON_UNIQUE when m has a nontrivial kernel and
  // NON_INTEGRAL_SOLUTION when the unique rational solution is fractional.
  std::optional<std::vector<std::int64_t>>
  solve_exact(SparseIntMatrix const& m, std::vector<std::int64_t> const& b);

}  // namespace hfill

#endif  // HFILL_CHAINS_HPP_
