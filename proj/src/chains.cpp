#include "hfill/chains.hpp"

#include "hfill/errors.hpp"
#include "hfill/exact.hpp"

#include "json.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace hfill {

  Chain::Chain(int dim, Coeffs coeffs) : _dim(dim), _coeffs(std::move(coeffs)) {
    std::erase_if(_coeffs, [](auto const& kv) { return kv.second == 0; });
  }

  std::int64_t Chain::operator[](std::size_t cell) const {
    auto it = _coeffs.find(cell);
    return it == _coeffs.end() ? 0 : it->second;
  }

  void Chain::add(std::size_t cell, std::int64_t v) {
    if (v == 0) {
      return;
    }
    auto [it, inserted] = _coeffs.try_emplace(cell, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) {
        _coeffs.erase(it);
      }
    }
  }

  std::int64_t Chain::norm() const {
    std::int64_t n = 0;
    for (auto const& [c, v] : _coeffs) {
      n += v < 0 ? -v : v;
    }
    return n;
  }

  Chain& Chain::operator+=(Chain const& o) {
    if (!o.empty() && !empty() && o._dim != _dim) {
      throw Error(ErrorCode::invalid_argument, "adding chains of different dimension");
    }
    if (empty()) {
      _dim = o._dim;
    }
    for (auto const& [c, v] : o._coeffs) {
      add(c, v);
    }
    return *this;
  }

  Chain& Chain::operator-=(Chain const& o) {
    return *this += (-1) * o;
  }

  Chain operator*(std::int64_t k, Chain c) {
    if (k == 0) {
      c._coeffs.clear();
      return c;
    }
    for (auto& [cell, v] : c._coeffs) {
      v *= k;
    }
    return c;
  }

  std::vector<std::int64_t> Chain::dense(std::size_t size) const {
    std::vector<std::int64_t> out(size, 0);
    for (auto const& [c, v] : _coeffs) {
      if (c >= size) {
        throw Error(ErrorCode::invalid_argument, "chain cell out of range");
      }
      out[c] = v;
    }
    return out;
  }

  Chain Chain::from_dense(int dim, std::vector<std::int64_t> const& v) {
    Chain c(dim);
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.add(i, v[i]);
    }
    return c;
  }

  Chain apply_boundary(CellComplex const& k, Chain const& c) {
    if (c.dim() < 1) {
      throw Error(ErrorCode::invalid_argument,
                  "apply_boundary needs a chain of dimension >= 1");
    }
    Chain out(c.dim() - 1);
    for (auto const& [cell, v] : c.coeffs()) {
      for (auto const& sc : k.boundary_of(c.dim(), cell)) {
        out.add(sc.cell, v * sc.sign);
      }
    }
    return out;
  }

  bool is_cycle(CellComplex const& k, Chain const& c) {
    if (c.dim() >= 1) {
      return apply_boundary(k, c).empty();
    }
    std::vector<std::size_t> parent(k.vertices().size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x         = parent[x];
      }
      return x;
    };
    for (auto const& e : k.edges()) {
      parent[find(e.tail)] = find(e.head);
    }
    std::map<std::size_t, std::int64_t> total;
    for (auto const& [v, coeff] : c.coeffs()) {
      total[find(v)] += coeff;
    }
    return std::all_of(total.begin(), total.end(),
                       [](auto const& kv) { return kv.second == 0; });
  }

  std::string to_json(Chain const& c) {
    nlohmann::json a = nlohmann::json::array();
    for (auto const& [cell, v] : c.coeffs()) {
      a.push_back({cell, v});
    }
    return a.dump();
  }

  Chain chain_from_json(std::string const& text, int dim) {
    Chain c(dim);
    try {
      auto a = nlohmann::json::parse(text);
      if (!a.is_array()) {
        throw Error(ErrorCode::syntax, "chain JSON must be an array");
      }
      for (auto const& p : a) {
        if (!p.is_array() || p.size() != 2) {
          throw Error(ErrorCode::syntax, "chain entries must be [cell, coefficient]");
        }
        c.add(p[0].get<std::size_t>(), p[1].get<std::int64_t>());
      }
    } catch (nlohmann::json::exception const& e) {
      throw Error(ErrorCode::syntax, e.what());
    }
    return c;
  }

  namespace {

    // Fraction-free sparse Gaussian elimination. Row updates use
    // row2 <- (p/g) row2 - (a/g) row followed by division by the row content,
    // so all entries stay integral.
    template <typename Int>
    class Eliminator {
     public:
      using Row = std::vector<std::pair<std::size_t, Int>>;

      struct Pivot {
        std::size_t col;
        Int         value;
        Row         row;
        Int         rhs;
      };

      Eliminator(SparseIntMatrix const& m, std::vector<std::int64_t> const* b)
          : _rows(m.rows()), _rhs(m.rows(), Int(0)), _colrows(m.cols()) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
          for (auto const& [r, v] : m.column(c)) {
            _rows[r].emplace_back(c, Int(v));
            _colrows[c].insert(r);
          }
        }
        if (b != nullptr) {
          for (std::size_t r = 0; r < m.rows(); ++r) {
            _rhs[r] = Int((*b)[r]);
          }
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
          _active.emplace(_rows[r].size(), r);
        }
      }

      void run() {
        while (!_active.empty()) {
          auto first = _active.begin();
          if (first->first == 0) {
            if (_rhs[first->second] != 0) {
              _consistent = false;
            }
            _active.erase(first);
            continue;
          }
          auto [r, c] = choose_pivot();
          eliminate(r, c);
        }
      }

      std::vector<Pivot> const& pivots() const {
        return _pivots;
      }
      bool consistent() const {
        return _consistent;
      }

      // Back substitution; `x` holds values for free columns on entry.
      void back_substitute(std::vector<Fraction<Int>>& x) const {
        for (auto it = _pivots.rbegin(); it != _pivots.rend(); ++it) {
          Fraction<Int> acc(it->rhs);
          for (auto const& [c, v] : it->row) {
            if (c != it->col && !x[c].is_zero()) {
              acc -= Fraction<Int>(v) * x[c];
            }
          }
          x[it->col] = acc / Fraction<Int>(it->value);
        }
      }

     private:
      static constexpr std::size_t scan_limit = 16;

      static Int abs_of(Int const& v) {
        return v < 0 ? Int(-v) : v;
      }

      // Markowitz cost (len(row) - 1) * (count(col) - 1); unit pivots
      // preferred; ties broken by (row, col).
      std::pair<std::size_t, std::size_t> choose_pivot() const {
        using Key = std::tuple<std::size_t, int, std::size_t, std::size_t>;
        std::optional<Key> best;
        std::size_t        scanned = 0;
        for (auto it = _active.begin(); it != _active.end() && scanned < scan_limit;
             ++it, ++scanned) {
          auto [len, r] = *it;
          for (auto const& [c, v] : _rows[r]) {
            std::size_t cost = (len - 1) * (_colrows[c].size() - 1);
            Key         key{cost, abs_of(v) == 1 ? 0 : 1, r, c};
            if (!best || key < *best) {
              best = key;
            }
          }
          if (std::get<0>(*best) == 0 && std::get<1>(*best) == 0) {
            break;
          }
        }
        return {std::get<2>(*best), std::get<3>(*best)};
      }

      void eliminate(std::size_t r, std::size_t c) {
        Row prow = std::move(_rows[r]);
        _rows[r].clear();
        Int prhs = _rhs[r];
        _active.erase({prow.size(), r});
        for (auto const& e : prow) {
          _colrows[e.first].erase(r);
        }
        Int p = std::find_if(prow.begin(), prow.end(), [&](auto const& e) {
                  return e.first == c;
                })->second;

        std::vector<std::size_t> targets(_colrows[c].begin(), _colrows[c].end());
        for (std::size_t r2 : targets) {
          Row& row2 = _rows[r2];
          _active.erase({row2.size(), r2});
          Int a = std::find_if(row2.begin(), row2.end(), [&](auto const& e) {
                    return e.first == c;
                  })->second;
          Int g  = gcd_abs(p, a);
          Int m2 = p / g;
          Int m1 = a / g;

          Row merged;
          merged.reserve(row2.size() + prow.size());
          auto i = row2.begin();
          auto j = prow.begin();
          while (i != row2.end() || j != prow.end()) {
            if (j == prow.end() || (i != row2.end() && i->first < j->first)) {
              merged.emplace_back(i->first, m2 * i->second);
              ++i;
            } else if (i == row2.end() || j->first < i->first) {
              merged.emplace_back(j->first, -(m1 * j->second));
              _colrows[j->first].insert(r2);
              ++j;
            } else {
              Int v = m2 * i->second - m1 * j->second;
              if (v != 0) {
                merged.emplace_back(i->first, std::move(v));
              } else {
                _colrows[i->first].erase(r2);
              }
              ++i;
              ++j;
            }
          }
          Int rhs2 = m2 * _rhs[r2] - m1 * prhs;

          Int content = abs_of(rhs2);
          for (auto const& e : merged) {
            content = gcd_abs(content, e.second);
            if (content == 1) {
              break;
            }
          }
          if (content > 1) {
            for (auto& e : merged) {
              e.second /= content;
            }
            rhs2 /= content;
          }
          row2      = std::move(merged);
          _rhs[r2]  = std::move(rhs2);
          _active.emplace(row2.size(), r2);
        }
        _colrows[c].clear();
        _pivots.push_back({c, std::move(p), std::move(prow), std::move(prhs)});
      }

      std::vector<Row>                                 _rows;
      std::vector<Int>                                 _rhs;
      std::vector<std::set<std::size_t>>               _colrows;
      std::set<std::pair<std::size_t, std::size_t>>    _active;
      std::vector<Pivot>                               _pivots;
      bool                                             _consistent = true;
    };

    template <typename Int>
    std::vector<std::int64_t> integer_scaled(std::vector<Fraction<Int>> const& x) {
      Int l(1);
      for (auto const& f : x) {
        l = l / gcd_abs(l, f.den()) * f.den();
      }
      std::vector<Int> v;
      Int              content(0);
      for (auto const& f : x) {
        v.push_back(f.num() * (l / f.den()));
        content = gcd_abs(content, v.back());
      }
      std::vector<std::int64_t> out;
      for (auto& e : v) {
        if (content > 1) {
          e /= content;
        }
        out.push_back(to_int64(e));
      }
      return out;
    }

    template <typename Int>
    KernelReport kernel_impl(SparseIntMatrix const& m, bool want_basis) {
      Eliminator<Int> elim(m, nullptr);
      elim.run();
      KernelReport report;
      report.rank        = elim.pivots().size();
      report.kernel_rank = m.cols() - report.rank;
      if (want_basis) {
        std::vector<bool> pivot_col(m.cols(), false);
        for (auto const& p : elim.pivots()) {
          pivot_col[p.col] = true;
        }
        std::vector<std::vector<std::int64_t>> basis;
        for (std::size_t f = 0; f < m.cols(); ++f) {
          if (pivot_col[f]) {
            continue;
          }
          std::vector<Fraction<Int>> x(m.cols());
          x[f] = Fraction<Int>(Int(1));
          elim.back_substitute(x);
          basis.push_back(integer_scaled(x));
        }
        report.basis = std::move(basis);
      }
      return report;
    }

    template <typename Int>
    std::optional<std::vector<std::int64_t>>
    solve_impl(SparseIntMatrix const& m, std::vector<std::int64_t> const& b) {
      Eliminator<Int> elim(m, &b);
      elim.run();
      if (!elim.consistent()) {
        return std::nullopt;
      }
      if (elim.pivots().size() < m.cols()) {
        throw Error(ErrorCode::non_unique,
                    "kernel has rank " + std::to_string(m.cols() - elim.pivots().size()));
      }
      std::vector<Fraction<Int>> x(m.cols());
      elim.back_substitute(x);
      std::vector<std::int64_t> out;
      out.reserve(x.size());
      for (auto const& f : x) {
        if (!f.is_integer()) {
          throw Error(ErrorCode::non_integral_solution,
                      "unique rational solution is not integral");
        }
        out.push_back(to_int64(f.num()));
      }
      return out;
    }

    template <typename F>
    auto with_fallback(F&& f) {
      try {
        return f.template operator()<SmallInt>();
      } catch (std::overflow_error const&) {
        return f.template operator()<BigInt>();
      }
    }

  }  // namespace

  KernelReport kernel_rank(SparseIntMatrix const& m, bool want_basis) {
    try {
      return with_fallback(
          [&]<typename Int>() { return kernel_impl<Int>(m, want_basis); });
    } catch (std::overflow_error const&) {
      throw Error(ErrorCode::overflow, "kernel basis does not fit in 64-bit integers");
    }
  }

  std::optional<std::vector<std::int64_t>>
  solve_exact(SparseIntMatrix const& m, std::vector<std::int64_t> const& b) {
    if (b.size() != m.rows()) {
      throw Error(ErrorCode::invalid_argument, "solve_exact: right-hand side size mismatch");
    }
    std::optional<std::vector<std::int64_t>> x;
    try {
      x = with_fallback([&]<typename Int>() { return solve_impl<Int>(m, b); });
    } catch (std::overflow_error const&) {
      throw Error(ErrorCode::overflow, "solution does not fit in 64-bit integers");
    }
    if (x && m.multiply(*x) != b) {
      throw Error(ErrorCode::non_integral_solution,
                  "internal: solution failed verification");
    }
    return x;
  }

}  // namespace hfill
