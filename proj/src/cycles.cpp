#include "hfill/errors.hpp"
#include "hfill/filling.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

namespace hfill {

  namespace {

    std::size_t pick(std::mt19937_64& rng, std::size_t n) {
      return static_cast<std::size_t>(rng() % n);
    }

    std::vector<int> distances_from(CellComplex const& k, std::size_t source) {
      std::vector<int>        dist(k.vertices().size(), -1);
      std::deque<std::size_t> queue{source};
      dist[source] = 0;
      while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto e : k.incident_edges(v)) {
          auto u = k.other_end(e, v);
          if (dist[u] < 0) {
            dist[u] = dist[v] + 1;
            queue.push_back(u);
          }
        }
      }
      return dist;
    }

    // Vertices of a cell of dimension d >= 1.
    std::vector<std::size_t> cell_vertices(CellComplex const& k, int d, std::size_t c) {
      std::vector<std::size_t> out;
      if (d == 1) {
        out = {k.edges()[c].tail, k.edges()[c].head};
      } else if (d == 2) {
        out = k.faces2()[c].walk;
      } else {
        for (auto const& f : k.faces3()[c].boundary) {
          auto const& w = k.faces2()[f.cell].walk;
          out.insert(out.end(), w.begin(), w.end());
        }
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }

    bool is_point_vertex(VertexLabel const& l) {
      return l.empty() || l[0] != aux_label_tag;
    }

  }  // namespace

  int default_margin(int radius) {
    return (radius + 2) / 3;
  }

  std::vector<bool> inner_vertices(CellComplex const& k, int margin) {
    int               limit = k.radius() - margin;
    std::vector<bool> out(k.vertices().size(), false);
    if (k.vertices().empty() || limit < 0) {
      return out;
    }
    if (k.label_kind() == LabelKind::point) {
      for (std::size_t v = 0; v < out.size(); ++v) {
        auto const& l = k.vertices()[v];
        out[v]        = is_point_vertex(l)
                 && std::all_of(l.begin(), l.end(), [&](std::int32_t x) { return std::abs(x) <= limit; });
      }
    } else {
      auto dist = distances_from(k, 0);
      for (std::size_t v = 0; v < out.size(); ++v) {
        out[v] = dist[v] >= 0 && dist[v] <= limit;
      }
    }
    return out;
  }

  Chain box_cycle(CellComplex const& grid, std::vector<int> const& corner,
                  std::vector<int> const& sides) {
    int rank = grid.dim();
    if (grid.label_kind() != LabelKind::point || rank < 2 || rank > 3
        || static_cast<int>(corner.size()) != rank || static_cast<int>(sides.size()) != rank) {
      throw Error(ErrorCode::invalid_argument, "box cycles need a grid complex of rank 2 or 3");
    }
    std::int64_t expected = 1;
    for (int s : sides) {
      if (s < 1) {
        throw Error(ErrorCode::invalid_argument, "box sides must be positive");
      }
      expected *= s;
    }
    Chain body(rank);
    for (std::size_t c = 0; c < grid.cell_count(rank); ++c) {
      auto verts  = cell_vertices(grid, rank, c);
      bool inside = std::all_of(verts.begin(), verts.end(), [&](std::size_t v) {
        auto const& l = grid.vertices()[v];
        for (int i = 0; i < rank; ++i) {
          if (l[i] < corner[i] || l[i] > corner[i] + sides[i]) {
            return false;
          }
        }
        return true;
      });
      if (inside) {
        body.add(c, 1);
      }
    }
    if (static_cast<std::int64_t>(body.support_size()) != expected) {
      throw Error(ErrorCode::invalid_argument, "box does not fit in the complex");
    }
    return apply_boundary(grid, body);
  }

  std::vector<Chain> exhaustive_loops(CellComplex const& k, std::size_t max_len) {
    if (max_len > 12) {
      throw Error(ErrorCode::invalid_argument, "exhaustive loops are limited to length 12");
    }
    std::vector<Chain> out;
    if (k.vertices().empty() || k.dim() < 1) {
      return out;
    }
    auto                                 dist = distances_from(k, 0);
    std::set<std::vector<std::size_t>>   seen;
    std::vector<std::size_t>             path{0};
    std::vector<bool>                    on_path(k.vertices().size(), false);
    on_path[0] = true;

    auto emit = [&] {
      auto key = canonical_cycle(path);
      if (!seen.insert(key).second) {
        return;
      }
      Chain c(1);
      for (std::size_t i = 0; i < path.size(); ++i) {
        auto u = path[i], v = path[(i + 1) % path.size()];
        auto e = *k.find_edge(u, v);
        c.add(e, k.edges()[e].tail == u ? 1 : -1);
      }
      out.push_back(std::move(c));
    };
    auto rec = [&](auto&& self) -> void {
      auto v = path.back();
      for (auto e : k.incident_edges(v)) {
        auto u = k.other_end(e, v);
        if (u == 0 && path.size() >= 3) {
          emit();
          continue;
        }
        if (on_path[u] || path.size() + static_cast<std::size_t>(dist[u]) > max_len) {
          continue;
        }
        on_path[u] = true;
        path.push_back(u);
        self(self);
        path.pop_back();
        on_path[u] = false;
      }
    };
    rec(rec);
    return out;
  }

  Chain random_cluster_cycle(CellComplex const& k, std::vector<bool> const& allowed,
                             std::size_t max_norm, std::uint64_t seed) {
    int   top = k.dim();
    Chain boundary(top - 1);
    if (top < 1) {
      return boundary;
    }
    std::size_t cells = k.cell_count(top);
    // Usable cells and, for each codimension-one cell, the usable cells on it.
    std::vector<bool>                             usable(cells, false);
    std::map<std::size_t, std::vector<std::size_t>> cofaces;
    std::vector<std::size_t>                      at_origin, any;
    for (std::size_t c = 0; c < cells; ++c) {
      auto verts = cell_vertices(k, top, c);
      usable[c]  = std::all_of(verts.begin(), verts.end(), [&](std::size_t v) { return allowed[v]; });
      if (!usable[c]) {
        continue;
      }
      any.push_back(c);
      if (verts.front() == 0) {
        at_origin.push_back(c);
      }
      for (auto const& f : k.boundary_of(top, c)) {
        cofaces[f.cell].push_back(c);
      }
    }
    if (any.empty()) {
      return boundary;
    }
    std::mt19937_64 rng(seed);
    auto const&     starts = at_origin.empty() ? any : at_origin;
    std::size_t     first  = starts[pick(rng, starts.size())];

    auto add_cell = [&](Chain& b, std::size_t c, int sign) {
      for (auto const& f : k.boundary_of(top, c)) {
        b.add(f.cell, sign * f.sign);
      }
    };
    Chain trial = boundary;
    add_cell(trial, first, 1);
    if (static_cast<std::size_t>(trial.norm()) > max_norm) {
      return boundary;
    }
    boundary = trial;
    std::unordered_set<std::size_t> in_cluster{first};

    int failures = 0;
    while (failures < 20) {
      // Cross a random boundary cell into a neighbor outside the cluster.
      auto it = boundary.coeffs().begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick(rng, boundary.coeffs().size())));
      auto [shared, coeff] = *it;
      std::vector<std::size_t> options;
      for (auto c : cofaces[shared]) {
        if (!in_cluster.count(c)) {
          options.push_back(c);
        }
      }
      if (options.empty()) {
        ++failures;
        continue;
      }
      std::size_t next = options[pick(rng, options.size())];
      int         incidence = 0;
      for (auto const& f : k.boundary_of(top, next)) {
        if (f.cell == shared) {
          incidence = f.sign;
        }
      }
      int sign = (coeff > 0 ? -1 : 1) * incidence;
      trial    = boundary;
      add_cell(trial, next, sign);
      if (static_cast<std::size_t>(trial.norm()) > max_norm || trial.empty()) {
        ++failures;
        continue;
      }
      failures = 0;
      boundary = std::move(trial);
      in_cluster.insert(next);
    }
    return boundary;
  }

  std::size_t GroupCycle::norm() const {
    std::size_t n = 0;
    for (auto const& t : edges) {
      n += static_cast<std::size_t>(t.coeff < 0 ? -t.coeff : t.coeff);
    }
    return n;
  }

  namespace {

    std::vector<Letters> relator_loops(Presentation const& p) {
      std::vector<Letters> loops;
      for (auto const& rel : p.relators()) {
        for (auto const& w :
             {rel.canonical().letters(), inverse_letters(rel.canonical().letters())}) {
          for (auto const& rot : rotations(w)) {
            if (std::find(loops.begin(), loops.end(), rot) == loops.end()) {
              loops.push_back(rot);
            }
          }
        }
      }
      return loops;
    }

  }  // namespace

  GroupCycle random_group_cluster(GroupOracle const& oracle, std::size_t max_norm,
                                  std::uint64_t seed) {
    auto const& p     = oracle.presentation();
    auto        loops = relator_loops(p);
    GroupCycle  out;
    if (loops.empty()) {
      return out;
    }
    std::mt19937_64 rng(seed);
    ElementIndex    index(oracle);
    index.insert(Word());

    // Edge (v, g) runs from v to v * generator g.
    using EdgeKey = std::pair<std::size_t, std::size_t>;
    std::map<EdgeKey, std::int64_t>        boundary;
    std::set<std::vector<std::size_t>>     faces;

    // Vertex walk of the loop read from `base`.
    auto walk_of = [&](std::size_t base, Letters const& loop) {
      std::vector<std::size_t> walk{base};
      for (std::size_t j = 0; j + 1 < loop.size(); ++j) {
        walk.push_back(index.find_or_insert(index.representative(walk.back())
                                            * Word::from_reduced({loop[j]})));
      }
      return walk;
    };
    auto add_face = [&](std::map<EdgeKey, std::int64_t>& b, std::vector<std::size_t> const& walk,
                        Letters const& loop, int sign) {
      for (std::size_t j = 0; j < loop.size(); ++j) {
        auto    u = walk[j], v = walk[(j + 1) % walk.size()];
        Letter  x = loop[j];
        EdgeKey key = x > 0 ? EdgeKey{u, generator_of(x)} : EdgeKey{v, generator_of(x)};
        auto&   c   = b[key];
        c += x > 0 ? sign : -sign;
        if (c == 0) {
          b.erase(key);
        }
      }
    };
    auto norm_of = [](std::map<EdgeKey, std::int64_t> const& b) {
      std::size_t n = 0;
      for (auto const& [k, c] : b) {
        n += static_cast<std::size_t>(c < 0 ? -c : c);
      }
      return n;
    };

    auto const& first = loops[pick(rng, loops.size())];
    if (first.size() > max_norm) {
      return out;
    }
    auto first_walk = walk_of(0, first);
    add_face(boundary, first_walk, first, 1);
    faces.insert(canonical_cycle(first_walk));

    int failures = 0;
    while (failures < 20) {
      auto it = boundary.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick(rng, boundary.size())));
      auto [key, coeff] = *it;
      auto [u, g]       = key;
      // Faces through the edge, read from u across it.
      std::vector<Letters const*> options;
      for (auto const& loop : loops) {
        if (loop.front() == make_letter(g, false)) {
          options.push_back(&loop);
        }
      }
      Letters const& loop = *options[pick(rng, options.size())];
      auto           walk = walk_of(u, loop);
      auto           id   = canonical_cycle(walk);
      if (faces.count(id)) {
        ++failures;
        continue;
      }
      auto trial = boundary;
      add_face(trial, walk, loop, coeff > 0 ? -1 : 1);
      if (norm_of(trial) > max_norm || trial.empty()) {
        ++failures;
        continue;
      }
      failures = 0;
      boundary = std::move(trial);
      faces.insert(id);
    }

    std::map<std::size_t, std::size_t> renumber;
    auto local = [&](std::size_t v) {
      auto [it, fresh] = renumber.emplace(v, out.vertices.size());
      if (fresh) {
        out.vertices.push_back(index.representative(v));
      }
      return it->second;
    };
    for (auto const& [key, coeff] : boundary) {
      auto [v, g] = key;
      auto head   = *index.find(index.representative(v) * Word::from_reduced({make_letter(g, false)}));
      auto t      = local(v);
      out.edges.push_back({t, local(head), coeff});
    }
    return out;
  }

  FillingResult fvol_in_group(GroupOracle const& oracle, GroupCycle const& c, int steps,
                              FillBudget const& budget) {
    auto  k = build_face_neighborhood(oracle, c.vertices, steps);
    Chain s(1);
    for (auto const& t : c.edges) {
      auto u = k.find_vertex(c.vertices[t.tail].letters());
      auto v = k.find_vertex(c.vertices[t.head].letters());
      auto e = u && v ? k.find_edge(*u, *v) : std::nullopt;
      if (!e) {
        throw Error(ErrorCode::invalid_argument, "cycle edge missing from the neighborhood");
      }
      s.add(*e, k.edges()[*e].tail == *u ? t.coeff : -t.coeff);
    }
    return FillingSolver(k).fvol(s, budget);
  }

  std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
      z += 0x9e3779b97f4a7c15ULL;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ stream) ^ index);
  }

}  // namespace hfill
