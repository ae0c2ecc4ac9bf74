#include "hfill/complex.hpp"

#include "hfill/errors.hpp"
#include "hfill/word.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include "json.hpp"

namespace hfill {

  namespace {
    std::uint64_t edge_key(std::size_t u, std::size_t v) {
      if (u > v) {
        std::swap(u, v);
      }
      return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
    }

    template <typename T>
    std::size_t fnv(std::vector<T> const& v) {
      std::size_t h = 0xcbf29ce484222325ULL;
      for (auto x : v) {
        h ^= static_cast<std::size_t>(x);
        h *= 0x100000001b3ULL;
      }
      return h;
    }
  }  // namespace

  std::size_t VertexLabelHash::operator()(VertexLabel const& v) const noexcept {
    return fnv(v);
  }

  std::size_t
  CycleHash::operator()(std::vector<std::size_t> const& v) const noexcept {
    return fnv(v);
  }

  std::vector<std::size_t>
  canonical_cycle(std::vector<std::size_t> const& walk) {
    auto least = [](std::vector<std::size_t> const& w) {
      std::vector<std::size_t> best = w;
      std::vector<std::size_t> rot(w.size());
      for (std::size_t s = 1; s < w.size(); ++s) {
        std::rotate_copy(w.begin(), w.begin() + s, w.end(), rot.begin());
        if (rot < best) {
          best = rot;
        }
      }
      return best;
    };
    std::vector<std::size_t> rev(walk.rbegin(), walk.rend());
    return std::min(least(walk), least(rev));
  }

  std::size_t CellComplex::cell_count(int d) const {
    switch (d) {
      case 0:
        return _vertices.size();
      case 1:
        return _edges.size();
      case 2:
        return _faces2.size();
      case 3:
        return _faces3.size();
      default:
        return 0;
    }
  }

  std::optional<std::size_t>
  CellComplex::find_vertex(VertexLabel const& label) const {
    auto it = _vertex_index.find(label);
    if (it == _vertex_index.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<std::size_t> CellComplex::find_edge(std::size_t u,
                                                    std::size_t v) const {
    auto it = _edge_index.find(edge_key(u, v));
    if (it == _edge_index.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<std::size_t>
  CellComplex::find_face(std::vector<std::size_t> const& walk) const {
    auto it = _face_index.find(canonical_cycle(walk));
    if (it == _face_index.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  std::size_t CellComplex::add_vertex(VertexLabel label) {
    if (_vertex_index.count(label) != 0) {
      throw Error(ErrorCode::invalid_argument, "duplicate vertex label");
    }
    std::size_t id = _vertices.size();
    _vertex_index.emplace(label, id);
    _vertices.push_back(std::move(label));
    _incident.emplace_back();
    return id;
  }

  std::size_t
  CellComplex::add_edge(std::size_t tail, std::size_t head, std::int32_t label) {
    if (tail >= _vertices.size() || head >= _vertices.size()) {
      throw Error(ErrorCode::invalid_argument, "edge endpoint out of range");
    }
    if (tail == head) {
      throw Error(ErrorCode::non_simplicial, "loop at vertex "
                                                 + std::to_string(tail));
    }
    auto key = edge_key(tail, head);
    if (_edge_index.count(key) != 0) {
      throw Error(ErrorCode::non_simplicial,
                  "parallel edges between vertices " + std::to_string(tail)
                      + " and " + std::to_string(head));
    }
    std::size_t id = _edges.size();
    _edges.push_back({tail, head, label});
    _edge_index.emplace(key, id);
    _incident[tail].push_back(id);
    _incident[head].push_back(id);
    return id;
  }

  std::size_t CellComplex::add_face2(std::vector<std::size_t> const& walk,
                                     std::int32_t                    relator) {
    if (walk.size() < 3) {
      throw Error(ErrorCode::non_simplicial, "2-face with fewer than 3 sides");
    }
    auto canon = canonical_cycle(walk);
    if (auto it = _face_index.find(canon); it != _face_index.end()) {
      return it->second;
    }
    Face2 f;
    f.walk    = walk;
    f.relator = relator;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      std::size_t u = walk[i];
      std::size_t v = walk[(i + 1) % walk.size()];
      auto        e = find_edge(u, v);
      if (!e) {
        throw Error(ErrorCode::mismatched_boundary,
                    "face walk uses a missing edge");
      }
      f.boundary.push_back({*e, _edges[*e].tail == u ? 1 : -1});
    }
    std::size_t id = _faces2.size();
    _faces2.push_back(std::move(f));
    _face_index.emplace(std::move(canon), id);
    if (_dim < 2) {
      _dim = 2;
    }
    return id;
  }

  std::size_t CellComplex::add_face3(std::vector<SignedCell> boundary) {
    for (auto const& sc : boundary) {
      if (sc.cell >= _faces2.size()) {
        throw Error(ErrorCode::invalid_argument, "3-cell face out of range");
      }
    }
    _faces3.push_back({std::move(boundary)});
    _dim = 3;
    return _faces3.size() - 1;
  }

  std::vector<SignedCell> CellComplex::boundary_of(int d, std::size_t cell) const {
    std::map<std::size_t, int> acc;
    switch (d) {
      case 1: {
        auto const& e = _edges.at(cell);
        acc[e.tail] -= 1;
        acc[e.head] += 1;
        break;
      }
      case 2:
        for (auto const& sc : _faces2.at(cell).boundary) {
          acc[sc.cell] += sc.sign;
        }
        break;
      case 3:
        for (auto const& sc : _faces3.at(cell).boundary) {
          acc[sc.cell] += sc.sign;
        }
        break;
      default:
        throw Error(ErrorCode::invalid_argument,
                    "boundary_of: dimension must be 1..3");
    }
    std::vector<SignedCell> out;
    for (auto const& [c, s] : acc) {
      if (s != 0) {
        out.push_back({c, s});
      }
    }
    return out;
  }

  SparseIntMatrix boundary_matrix(CellComplex const& k, int d) {
    if (d < 1 || d > 3) {
      throw Error(ErrorCode::invalid_argument,
                  "boundary_matrix: dimension must be 1..3");
    }
    SparseIntMatrix m(k.cell_count(d - 1), k.cell_count(d));
    for (std::size_t c = 0; c < k.cell_count(d); ++c) {
      for (auto const& sc : k.boundary_of(d, c)) {
        m.add(sc.cell, c, sc.sign);
      }
    }
    return m;
  }

  CellComplex build_grid_complex(int rank, int r, std::size_t vertex_cap) {
    if (rank < 1 || rank > 3) {
      throw Error(ErrorCode::invalid_argument, "grid rank must be 1..3");
    }
    if (r < 0) {
      throw Error(ErrorCode::invalid_argument, "radius must be nonnegative");
    }
    std::size_t side  = 2 * static_cast<std::size_t>(r) + 1;
    std::size_t count = 1;
    for (int i = 0; i < rank; ++i) {
      count *= side;
    }
    if (count > vertex_cap) {
      throw Error(ErrorCode::overflow, "grid ball has " + std::to_string(count)
                                           + " vertices, cap is "
                                           + std::to_string(vertex_cap));
    }

    CellComplex k(rank, LabelKind::point);
    k.set_radius(r);
    auto inside = [&](VertexLabel const& p) {
      return std::all_of(
          p.begin(), p.end(), [&](std::int32_t x) { return x >= -r && x <= r; });
    };

    // Breadth-first discovery from the origin; moves +e0, -e0, +e1, ...
    std::deque<std::size_t> queue;
    queue.push_back(k.add_vertex(VertexLabel(rank, 0)));
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      VertexLabel p = k.vertices()[v];
      for (int axis = 0; axis < rank; ++axis) {
        for (int dir : {1, -1}) {
          VertexLabel q = p;
          q[axis] += dir;
          if (!inside(q)) {
            continue;
          }
          auto u = k.find_vertex(q);
          if (!u) {
            u = k.add_vertex(q);
            queue.push_back(*u);
          }
          if (!k.find_edge(v, *u)) {
            if (dir > 0) {
              k.add_edge(v, *u, axis);
            } else {
              k.add_edge(*u, v, axis);
            }
          }
        }
      }
    }

    auto at = [&](VertexLabel const& p, std::initializer_list<int> axes) {
      VertexLabel q = p;
      for (int a : axes) {
        q[a] += 1;
      }
      return inside(q) ? k.find_vertex(q) : std::nullopt;
    };

    // Squares keyed by (base vertex, plane) for the cube pass.
    std::map<std::pair<std::size_t, int>, std::size_t> square_at;
    std::size_t const nverts = k.vertices().size();
    for (std::size_t v = 0; v < nverts; ++v) {
      VertexLabel const p = k.vertices()[v];
      for (int i = 0; i < rank; ++i) {
        for (int j = i + 1; j < rank; ++j) {
          auto pi  = at(p, {i});
          auto pij = at(p, {i, j});
          auto pj  = at(p, {j});
          if (!pi || !pij || !pj) {
            continue;
          }
          int plane = i + j - 1;  // (0,1)->0, (0,2)->1, (1,2)->2
          square_at[{v, plane}] = k.add_face2({v, *pi, *pij, *pj});
        }
      }
    }

    if (rank == 3) {
      // Face normal of the plane (i, j) is e_i x e_j: +e2, -e1, +e0.
      static constexpr std::array<int, 3> plane_of_axis = {2, 1, 0};
      static constexpr std::array<int, 3> normal_sign   = {1, -1, 1};
      for (std::size_t v = 0; v < nverts; ++v) {
        VertexLabel const p = k.vertices()[v];
        if (!at(p, {0, 1, 2})) {
          continue;
        }
        std::vector<SignedCell> bd;
        for (int axis = 0; axis < 3; ++axis) {
          int         plane = plane_of_axis[axis];
          std::size_t front = *at(p, {axis});
          bd.push_back({square_at.at({v, plane}), -normal_sign[axis]});
          bd.push_back({square_at.at({front, plane}), normal_sign[axis]});
        }
        k.add_face3(std::move(bd));
      }
    }
    return k;
  }

  CellComplex skeleton(CellComplex const& k, int d) {
    CellComplex out(std::min(d, k.dim()), k.label_kind(), k.generator_names());
    out.set_radius(k.radius());
    for (auto const& v : k.vertices()) {
      out.add_vertex(v);
    }
    if (d >= 1) {
      for (auto const& e : k.edges()) {
        out.add_edge(e.tail, e.head, e.label);
      }
    }
    if (d >= 2) {
      for (auto const& f : k.faces2()) {
        out.add_face2(f.walk, f.relator);
      }
    }
    if (d >= 3) {
      for (auto const& f : k.faces3()) {
        out.add_face3(f.boundary);
      }
    }
    return out;
  }

  Subdivision subdivide_cell(CellComplex const&        k,
                             std::size_t               face,
                             SubdivisionPattern const& pattern) {
    if (face >= k.faces2().size()) {
      throw Error(ErrorCode::invalid_argument, "subdivide_cell: no such face");
    }
    if (pattern.polygons.empty()) {
      throw Error(ErrorCode::mismatched_boundary, "empty subdivision pattern");
    }
    std::size_t const nv = k.vertices().size();
    for (auto const& poly : pattern.polygons) {
      for (auto v : poly) {
        if (v >= nv + pattern.new_vertices) {
          throw Error(ErrorCode::mismatched_boundary,
                      "pattern references an unknown vertex");
        }
      }
    }

    CellComplex out(k.dim(), k.label_kind(), k.generator_names());
    out.set_radius(k.radius());
    for (auto const& v : k.vertices()) {
      out.add_vertex(v);
    }
    // Serial numbers continue after existing auxiliary vertices.
    std::int32_t serial = 0;
    for (auto const& v : k.vertices()) {
      if (!v.empty() && v[0] == aux_label_tag) {
        serial = std::max(serial, v[1] + 1);
      }
    }
    for (std::size_t i = 0; i < pattern.new_vertices; ++i) {
      out.add_vertex({aux_label_tag, serial++});
    }
    for (auto const& e : k.edges()) {
      out.add_edge(e.tail, e.head, e.label);
    }
    for (auto const& poly : pattern.polygons) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        std::size_t u = poly[i];
        std::size_t v = poly[(i + 1) % poly.size()];
        if (!out.find_edge(u, v)) {
          out.add_edge(u, v, extra_edge_label);
        }
      }
    }

    // Check that the pattern has the boundary of the face.
    std::map<std::size_t, int> want;
    for (auto const& sc : k.boundary_of(2, face)) {
      want[sc.cell] += sc.sign;
    }
    std::map<std::size_t, int> got;
    for (auto const& poly : pattern.polygons) {
      for (std::size_t i = 0; i < poly.size(); ++i) {
        std::size_t u = poly[i];
        std::size_t v = poly[(i + 1) % poly.size()];
        std::size_t e = *out.find_edge(u, v);
        got[e] += out.edges()[e].tail == u ? 1 : -1;
      }
    }
    std::erase_if(got, [](auto const& kv) { return kv.second == 0; });
    if (got != want) {
      throw Error(ErrorCode::mismatched_boundary,
                  "pattern boundary differs from the face boundary");
    }

    Subdivision result;
    result.face_map.resize(k.faces2().size());
    for (std::size_t f = 0; f < k.faces2().size(); ++f) {
      if (f == face) {
        result.face_map[f].push_back(
            out.add_face2(pattern.polygons[0], k.faces2()[f].relator));
      } else {
        result.face_map[f].push_back(
            out.add_face2(k.faces2()[f].walk, k.faces2()[f].relator));
      }
    }
    for (std::size_t i = 1; i < pattern.polygons.size(); ++i) {
      result.face_map[face].push_back(
          out.add_face2(pattern.polygons[i], k.faces2()[face].relator));
    }
    for (auto const& f3 : k.faces3()) {
      std::vector<SignedCell> bd;
      for (auto const& sc : f3.boundary) {
        for (auto nf : result.face_map[sc.cell]) {
          bd.push_back({nf, sc.sign});
        }
      }
      out.add_face3(std::move(bd));
    }
    result.complex = std::move(out);
    return result;
  }

  std::string label_to_string(CellComplex const& k, VertexLabel const& label) {
    if (!label.empty() && label[0] == aux_label_tag) {
      return "aux:" + std::to_string(label.size() > 1 ? label[1] : 0);
    }
    if (k.label_kind() == LabelKind::word) {
      return to_string(std::span<Letter const>(label), k.generator_names());
    }
    std::string s;
    for (std::size_t i = 0; i < label.size(); ++i) {
      if (i > 0) {
        s += ' ';
      }
      s += std::to_string(label[i]);
    }
    return s;
  }

  std::string to_json(CellComplex const& k) {
    using nlohmann::json;
    json j;
    j["dim"]    = k.dim();
    j["radius"] = k.radius();
    json verts  = json::array();
    for (auto const& v : k.vertices()) {
      if (k.label_kind() == LabelKind::point
          && (v.empty() || v[0] != aux_label_tag)) {
        verts.push_back(v);
      } else {
        verts.push_back(label_to_string(k, v));
      }
    }
    j["vertices"] = std::move(verts);
    json edges    = json::array();
    for (auto const& e : k.edges()) {
      edges.push_back({e.tail, e.head, e.label});
    }
    j["edges"] = std::move(edges);
    auto cells = [](std::vector<SignedCell> const& bd) {
      json a = json::array();
      for (auto const& sc : bd) {
        a.push_back({sc.cell, sc.sign});
      }
      return a;
    };
    json f2 = json::array();
    for (auto const& f : k.faces2()) {
      f2.push_back(cells(f.boundary));
    }
    j["faces2"] = std::move(f2);
    json f3     = json::array();
    for (auto const& f : k.faces3()) {
      f3.push_back(cells(f.boundary));
    }
    j["faces3"] = std::move(f3);
    return j.dump();
  }

}  // namespace hfill
