#include "hfill/embedding.hpp"

#include "hfill/errors.hpp"
#include "hfill/presentation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hfill {

  namespace {

    constexpr std::size_t npos = ExtendedComplex::npos;

    // Breadth-first distances, optionally ignoring edges labelled
    // extra_edge_label and stopping at depth `limit` (negative: no limit).
    // Reuses its buffers between calls.
    class Bfs {
     public:
      explicit Bfs(CellComplex const& k, bool base_only = false)
          : _k(&k), _base_only(base_only), _dist(k.vertices().size(), -1) {}

      void run(std::size_t source, int limit = -1) {
        for (auto v : _touched) {
          _dist[v] = -1;
        }
        _touched.clear();
        _dist[source] = 0;
        _touched.push_back(source);
        for (std::size_t i = 0; i < _touched.size(); ++i) {
          auto v = _touched[i];
          if (limit >= 0 && _dist[v] >= limit) {
            continue;
          }
          for (auto e : _k->incident_edges(v)) {
            if (_base_only && _k->edges()[e].label == extra_edge_label) {
              continue;
            }
            auto u = _k->other_end(e, v);
            if (_dist[u] < 0) {
              _dist[u] = _dist[v] + 1;
              _touched.push_back(u);
            }
          }
        }
      }

      int operator[](std::size_t v) const {
        return _dist[v];
      }
      // Reached vertices in BFS order.
      std::vector<std::size_t> const& reached() const noexcept {
        return _touched;
      }

     private:
      CellComplex const*       _k;
      bool                     _base_only;
      std::vector<int>         _dist;
      std::vector<std::size_t> _touched;
    };

    Letter step_letter(Edge const& e, std::size_t from) {
      return make_letter(static_cast<std::size_t>(e.label), e.tail != from);
    }

    // ShortLex-least geodesic from a to b over base edges, as a vertex walk.
    std::vector<std::size_t> shortlex_geodesic(CellComplex const& k, Bfs& to_b,
                                               std::size_t a, std::size_t b, int limit) {
      to_b.run(b, limit);
      if (to_b[a] < 0) {
        return {};
      }
      std::vector<std::size_t> walk{a};
      auto                     v = a;
      while (v != b) {
        std::optional<std::size_t> next;
        Letter                     best = 0;
        for (auto e : k.incident_edges(v)) {
          auto const& edge = k.edges()[e];
          if (edge.label == extra_edge_label) {
            continue;
          }
          auto u = k.other_end(e, v);
          if (to_b[u] != to_b[v] - 1) {
            continue;
          }
          auto l = step_letter(edge, v);
          if (!next || letter_less(l, best)) {
            next = u;
            best = l;
          }
        }
        v = *next;
        walk.push_back(v);
      }
      return walk;
    }

    Chain walk_chain(CellComplex const& k, std::vector<std::size_t> const& walk) {
      Chain c(1);
      for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        auto e = *k.find_edge(walk[i], walk[i + 1]);
        c.add(e, k.edges()[e].tail == walk[i] ? 1 : -1);
      }
      return c;
    }

    Chain face_boundary(CellComplex const& k, std::size_t f) {
      Chain c(1);
      for (auto const& sc : k.boundary_of(2, f)) {
        c.add(sc.cell, sc.sign);
      }
      return c;
    }

    std::vector<std::string> split_ws(std::string_view s) {
      std::vector<std::string> out;
      std::istringstream       in{std::string(s)};
      std::string              tok;
      while (in >> tok) {
        out.push_back(tok);
      }
      return out;
    }

    // Chunks of an index range for parallel passes with ordered merging.
    struct Chunks {
      std::size_t total;
      std::size_t size;
      std::size_t count() const {
        return (total + size - 1) / size;
      }
      std::size_t begin(std::size_t c) const {
        return c * size;
      }
      std::size_t end(std::size_t c) const {
        return std::min(total, (c + 1) * size);
      }
    };

    std::pair<std::size_t, std::size_t> random_pair(std::size_t n, std::uint64_t seed) {
      std::mt19937_64 rng(seed);
      auto            i = static_cast<std::size_t>(rng() % n);
      auto            j = static_cast<std::size_t>(rng() % (n - 1));
      if (j >= i) {
        ++j;
      }
      return {std::min(i, j), std::max(i, j)};
    }

    std::string bare_message(Error const& e) {
      std::string msg    = e.what();
      std::string prefix = std::string(to_string(e.code())) + ": ";
      if (msg.rfind(prefix, 0) == 0) {
        msg.erase(0, prefix.size());
      }
      return msg;
    }

  }  // namespace

  // ---- spaces -------------------------------------------------------------

  Space Space::grid(int rank) {
    if (rank < 1 || rank > 3) {
      throw Error(ErrorCode::invalid_argument, "grid rank must be 1..3");
    }
    Space s;
    s._rank = rank;
    s._name = "grid" + std::to_string(rank);
    return s;
  }

  Space Space::group(GroupOracle oracle, std::string name) {
    Space s;
    s._oracle = std::make_shared<GroupOracle const>(std::move(oracle));
    s._name   = std::move(name);
    return s;
  }

  Space Space::parse(std::string const& name) {
    if (name.rfind("grid", 0) == 0 && name.size() == 5 && name[4] >= '1' && name[4] <= '3') {
      return grid(name[4] - '0');
    }
    return group(builtin_oracle(name), name);
  }

  GroupOracle const& Space::oracle() const {
    if (!_oracle) {
      throw Error(ErrorCode::invalid_argument, _name + " is not a group space");
    }
    return *_oracle;
  }

  std::vector<std::string> Space::generator_names() const {
    if (is_grid()) {
      return {};
    }
    return _oracle->presentation().generator_names();
  }

  CellComplex Space::ball(int radius) const {
    if (is_grid()) {
      return build_grid_complex(_rank, radius);
    }
    return build_cayley_ball(*_oracle, radius);
  }

  std::int64_t Space::distance(VertexLabel const& a, VertexLabel const& b) const {
    if (is_grid()) {
      std::int64_t d = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        d += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
      }
      return d;
    }
    auto u = Word::reduce(a), v = Word::reduce(b);
    return static_cast<std::int64_t>(_oracle->normal_form(u.inverse() * v).size());
  }

  VertexLabel Space::normalize(VertexLabel const& l) const {
    if (is_grid()) {
      return l;
    }
    return _oracle->normal_form(Word::reduce(l)).letters();
  }

  std::size_t Space::padding() const {
    if (is_grid()) {
      return 0;
    }
    auto s = _oracle->strategy();
    if (s == Strategy::surface || s == Strategy::dehn) {
      return _oracle->presentation().max_relator_length();
    }
    return 0;
  }

  // ---- specifications -----------------------------------------------------

  char const* to_string(EmbeddingKind k) noexcept {
    switch (k) {
      case EmbeddingKind::logmap: return "LOGMAP";
      case EmbeddingKind::axis_inclusion: return "AXIS_INCLUSION";
      case EmbeddingKind::plane_inclusion: return "PLANE_INCLUSION";
      case EmbeddingKind::file: return "FILE";
    }
    return "?";
  }

  EmbeddingSpec builtin_logmap() {
    EmbeddingSpec s{EmbeddingKind::logmap, Space::grid(1), Space::grid(2), {}};
    s.vertex_map = [](VertexLabel const& x) -> std::optional<VertexLabel> {
      if (x.size() != 1) {
        return std::nullopt;
      }
      auto m = static_cast<std::uint64_t>(std::abs(static_cast<std::int64_t>(x[0]))) + 1;
      return VertexLabel{static_cast<std::int32_t>(std::bit_width(m) - 1), x[0]};
    };
    return s;
  }

  EmbeddingSpec builtin_axis_inclusion() {
    EmbeddingSpec s{EmbeddingKind::axis_inclusion, Space::grid(1), Space::grid(2), {}};
    s.vertex_map = [](VertexLabel const& x) -> std::optional<VertexLabel> {
      if (x.size() != 1) {
        return std::nullopt;
      }
      return VertexLabel{x[0], 0};
    };
    return s;
  }

  EmbeddingSpec builtin_plane_inclusion() {
    EmbeddingSpec s{EmbeddingKind::plane_inclusion, Space::grid(2), Space::grid(3), {}};
    s.vertex_map = [](VertexLabel const& x) -> std::optional<VertexLabel> {
      if (x.size() != 2) {
        return std::nullopt;
      }
      return VertexLabel{x[0], x[1], 0};
    };
    return s;
  }

  EmbeddingSpec builtin_embedding(std::string const& name) {
    if (name == "logmap") {
      return builtin_logmap();
    }
    if (name == "axis") {
      return builtin_axis_inclusion();
    }
    if (name == "plane") {
      return builtin_plane_inclusion();
    }
    throw Error(ErrorCode::invalid_argument,
                "unknown builtin embedding '" + name + "' (expected logmap, axis or plane)");
  }

  VertexLabel parse_label(std::string_view text, Space const& space) {
    if (!space.is_grid()) {
      return space.normalize(parse_word(text, space.generator_names()).letters());
    }
    auto        toks = split_ws(text);
    VertexLabel out;
    for (auto const& t : toks) {
      std::int32_t v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error(ErrorCode::syntax, "bad coordinate '" + t + "'");
      }
      out.push_back(v);
    }
    if (out.size() != static_cast<std::size_t>(space.rank())) {
      throw Error(ErrorCode::syntax, "expected " + std::to_string(space.rank())
                                         + " coordinates in '" + std::string(text) + "'");
    }
    return out;
  }

  EmbeddingSpec load_embedding(std::string_view text, Space source, Space target) {
    auto table = std::make_shared<std::map<VertexLabel, VertexLabel>>();
    std::map<VertexLabel, int> images;
    int                        line_no = 0;
    std::size_t                pos     = 0;
    while (pos <= text.size()) {
      auto end  = text.find('\n', pos);
      auto line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
      pos       = end == std::string_view::npos ? text.size() + 1 : end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
        continue;
      }
      auto arrow = line.find("->");
      if (arrow == std::string_view::npos) {
        throw ParseError(ErrorCode::syntax, "expected '->'", line_no, 1);
      }
      VertexLabel x, y;
      try {
        x = parse_label(line.substr(0, arrow), source);
        y = parse_label(line.substr(arrow + 2), target);
      } catch (ParseError const& e) {
        throw ParseError(e.code(), bare_message(e), line_no, e.column());
      } catch (Error const& e) {
        throw ParseError(e.code(), bare_message(e), line_no, 1);
      }
      if (table->contains(x)) {
        throw ParseError(ErrorCode::invalid_embedding, "source point mapped twice", line_no, 1);
      }
      if (auto it = images.find(y); it != images.end()) {
        throw ParseError(ErrorCode::invalid_embedding,
                         "not injective: same image as line " + std::to_string(it->second),
                         line_no, static_cast<int>(arrow) + 3);
      }
      images.emplace(y, line_no);
      table->emplace(std::move(x), std::move(y));
    }
    EmbeddingSpec s{EmbeddingKind::file, std::move(source), std::move(target), {}};
    auto          src = s.source;
    s.vertex_map      = [table, src](VertexLabel const& x) -> std::optional<VertexLabel> {
      auto it = table->find(src.normalize(x));
      if (it == table->end()) {
        return std::nullopt;
      }
      return it->second;
    };
    return s;
  }

  // ---- moduli -------------------------------------------------------------

  ModuliEstimate estimate_moduli(EmbeddingSpec const& spec, int source_radius,
                                 std::size_t sample_count, std::uint64_t seed,
                                 std::size_t workers) {
    auto                     x = spec.source.ball(source_radius);
    auto const&              labels = x.vertices();
    std::vector<VertexLabel> images;
    for (auto const& l : labels) {
      auto y = spec(l);
      if (!y) {
        throw Error(ErrorCode::invalid_embedding,
                    "map undefined at " + label_to_string(x, l));
      }
      images.push_back(spec.target.normalize(*y));
    }
    ModuliEstimate out;
    std::size_t    n     = labels.size();
    std::size_t    total = n < 2 ? 0 : n * (n - 1) / 2;
    out.exhaustive       = total <= sample_count;
    out.pairs            = out.exhaustive ? total : sample_count;
    if (out.pairs == 0) {
      return out;
    }

    using Obs = std::vector<std::pair<std::int64_t, std::int64_t>>;
    auto measure = [&](std::size_t i, std::size_t j, Obs& obs) {
      obs.emplace_back(spec.source.distance(labels[i], labels[j]),
                       spec.target.distance(images[i], images[j]));
    };
    Chunks           chunks{out.exhaustive ? n : sample_count, out.exhaustive ? std::size_t{1} : std::size_t{256}};
    std::vector<Obs> results(chunks.count());
    parallel_for(chunks.count(), workers, [&](std::size_t c) {
      for (auto k = chunks.begin(c); k < chunks.end(c); ++k) {
        if (out.exhaustive) {
          for (auto j = k + 1; j < n; ++j) {
            measure(k, j, results[c]);
          }
        } else {
          auto [i, j] = random_pair(n, sample_seed(seed, 11, k));
          measure(i, j, results[c]);
        }
      }
    });
    for (auto const& obs : results) {
      for (auto [t, d] : obs) {
        auto [it, fresh] = out.per_distance.try_emplace(t, d, d);
        if (!fresh) {
          it->second.first  = std::min(it->second.first, d);
          it->second.second = std::max(it->second.second, d);
        }
      }
    }
    if (auto it = out.per_distance.find(1); it != out.per_distance.end()) {
      out.lipschitz_c = it->second.second;
    }
    auto top = out.per_distance.rbegin()->first;
    if (top >= 8 && out.per_distance.contains(1)) {
      auto near = out.per_distance.at(1).first;
      for (auto it = out.per_distance.lower_bound(top / 4); it != out.per_distance.end(); ++it) {
        out.not_coarse = out.not_coarse || it->second.first <= near;
      }
    }
    return out;
  }

  std::string moduli_to_csv(ModuliEstimate const& m) {
    std::string s = "t,min,max\n";
    for (auto const& [t, mm] : m.per_distance) {
      s += std::to_string(t) + "," + std::to_string(mm.first) + "," + std::to_string(mm.second) + "\n";
    }
    return s;
  }

  // ---- extended complex ---------------------------------------------------

  ExtendedComplex build_extended_complex(CellComplex const& x, CellComplex const& z,
                                         EmbeddingSpec const& spec, std::int64_t c,
                                         FillBudget const& budget) {
    if (c < 1) {
      throw Error(ErrorCode::invalid_argument, "C must be at least 1");
    }
    ExtendedComplex e;
    e.source = x;
    e.c      = c;

    auto& y = e.y;
    y       = CellComplex(2, z.label_kind(), z.generator_names());
    y.set_radius(z.radius());
    for (auto const& v : z.vertices()) {
      y.add_vertex(v);
    }
    for (auto const& ed : z.edges()) {
      y.add_edge(ed.tail, ed.head, ed.label);
    }
    if (z.dim() >= 2) {
      for (auto const& f : z.faces2()) {
        y.add_face2(f.walk, f.relator);
      }
    }
    e.base_edges = y.edges().size();
    e.base_faces = y.faces2().size();

    // Vertex map.
    std::unordered_map<std::size_t, std::size_t> preimage;
    for (std::size_t v = 0; v < x.vertices().size(); ++v) {
      auto img = spec(x.vertices()[v]);
      if (!img) {
        throw Error(ErrorCode::invalid_embedding,
                    "map undefined at " + label_to_string(x, x.vertices()[v]));
      }
      auto label = spec.target.normalize(*img);
      auto id    = z.find_vertex(label);
      if (!id) {
        throw Error(ErrorCode::geodesic_escapes_ball,
                    "image " + label_to_string(z, label) + " lies outside the target ball of radius "
                        + std::to_string(z.radius()) + "; enlarge the target radius");
      }
      if (auto [it, fresh] = preimage.emplace(*id, v); !fresh) {
        throw Error(ErrorCode::invalid_embedding,
                    "not injective: " + label_to_string(x, x.vertices()[it->second]) + " and "
                        + label_to_string(x, x.vertices()[v]) + " share an image");
      }
      if (auto pad = spec.target.padding(); pad > 0) {
        auto need = static_cast<std::int64_t>(label.size()) + c + static_cast<std::int64_t>(pad);
        if (need > z.radius()) {
          throw Error(ErrorCode::precondition_violated,
                      "target ball needs radius " + std::to_string(need)
                          + " (image length + C + longest relator)");
        }
      }
      e.vertex_map.push_back(*id);
    }

    // Added edges and faces.
    Bfs                                              near(y, true);
    Bfs                                              back(y, true);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (c >= 2) {
      for (std::size_t v = 0; v < z.vertices().size(); ++v) {
        near.run(v, static_cast<int>(c));
        for (auto w : near.reached()) {
          if (w > v && near[w] >= 2) {
            pairs.emplace_back(v, w);
          }
        }
      }
      std::sort(pairs.begin(), pairs.end());
    }
    for (auto [v, w] : pairs) {
      auto walk = shortlex_geodesic(y, back, v, w, static_cast<int>(c));
      e.added_edges.push_back(y.add_edge(v, w, extra_edge_label));
      e.added_faces.push_back(y.add_face2(walk, -1));
    }

    // Edge map.
    for (auto const& ed : x.edges()) {
      auto a = e.vertex_map[ed.tail], b = e.vertex_map[ed.head];
      auto id = y.find_edge(a, b);
      if (!id) {
        auto d = spec.target.distance(y.vertices()[a], y.vertices()[b]);
        if (d <= c) {
          throw Error(ErrorCode::geodesic_escapes_ball,
                      "geodesic between " + label_to_string(y, y.vertices()[a]) + " and "
                          + label_to_string(y, y.vertices()[b])
                          + " leaves the target ball; enlarge the target radius");
        }
        throw Error(ErrorCode::precondition_violated,
                    "edge image has length " + std::to_string(d) + " > C = " + std::to_string(c));
      }
      e.edge_map.push_back({*id, y.edges()[*id].tail == a ? 1 : -1});
    }

    // Face map.
    std::unique_ptr<FillingSolver> solver;
    for (std::size_t f = 0; f < x.faces2().size(); ++f) {
      Chain bd(1);
      for (auto const& sc : x.boundary_of(2, f)) {
        bd.add(e.edge_map[sc.cell].cell, sc.sign * e.edge_map[sc.cell].sign);
      }
      std::vector<std::size_t> walk;
      for (auto v : x.faces2()[f].walk) {
        walk.push_back(e.vertex_map[v]);
      }
      Chain image(2);
      auto single = y.find_face(walk);
      if (single) {
        auto fb = face_boundary(y, *single);
        if (fb == bd || fb == -1 * bd) {
          image.add(*single, fb == bd ? 1 : -1);
        } else {
          single.reset();
        }
      }
      if (!single) {
        if (!solver) {
          solver = std::make_unique<FillingSolver>(y);
        }
        try {
          image = solver->fvol(bd, budget).filling;
        } catch (Error const& err) {
          if (err.code() == ErrorCode::no_filling) {
            throw Error(ErrorCode::unfillable_loop,
                        "image of face " + std::to_string(f)
                            + " bounds nothing in the target ball; enlarge the target radius");
          }
          throw;
        }
      }
      e.n = std::max(e.n, image.norm());
      e.face_map.push_back(std::move(image));
    }

    // Image subcomplex.
    std::vector<bool> use_v(y.vertices().size()), use_e(y.edges().size()),
        use_f(y.faces2().size());
    for (auto v : e.vertex_map) {
      use_v[v] = true;
    }
    auto use_edge = [&](std::size_t id) {
      use_e[id]                   = true;
      use_v[y.edges()[id].tail] = true;
      use_v[y.edges()[id].head] = true;
    };
    for (auto const& sc : e.edge_map) {
      use_edge(sc.cell);
    }
    for (auto const& img : e.face_map) {
      for (auto const& [f, k] : img.coeffs()) {
        use_f[f] = true;
        for (auto const& sc : y.faces2()[f].boundary) {
          use_edge(sc.cell);
        }
      }
    }
    e.m = CellComplex(2, y.label_kind(), y.generator_names());
    e.m.set_radius(x.radius());
    e.m_vertex.assign(y.vertices().size(), npos);
    e.m_edge.assign(y.edges().size(), npos);
    e.m_face.assign(y.faces2().size(), npos);
    for (std::size_t v = 0; v < use_v.size(); ++v) {
      if (use_v[v]) {
        e.m_vertex[v] = e.m.add_vertex(y.vertices()[v]);
      }
    }
    for (std::size_t i = 0; i < use_e.size(); ++i) {
      if (use_e[i]) {
        auto const& ed = y.edges()[i];
        e.m_edge[i]    = e.m.add_edge(e.m_vertex[ed.tail], e.m_vertex[ed.head], ed.label);
      }
    }
    for (std::size_t f = 0; f < use_f.size(); ++f) {
      if (use_f[f]) {
        std::vector<std::size_t> walk;
        for (auto v : y.faces2()[f].walk) {
          walk.push_back(e.m_vertex[v]);
        }
        e.m_face[f] = e.m.add_face2(walk, y.faces2()[f].relator);
      }
    }
    return e;
  }

  Chain push_forward(ExtendedComplex const& e, Chain const& c) {
    Chain out(c.dim());
    for (auto const& [cell, k] : c.coeffs()) {
      switch (c.dim()) {
        case 0: out.add(e.vertex_map.at(cell), k); break;
        case 1: out.add(e.edge_map.at(cell).cell, k * e.edge_map.at(cell).sign); break;
        case 2: out += k * e.face_map.at(cell); break;
        default: throw Error(ErrorCode::invalid_argument, "push_forward handles dimensions 0..2");
      }
    }
    return out;
  }

  Chain restrict_to_image(ExtendedComplex const& e, Chain const& c) {
    auto const& table = c.dim() == 0 ? e.m_vertex : c.dim() == 1 ? e.m_edge : e.m_face;
    if (c.dim() > 2) {
      throw Error(ErrorCode::invalid_argument, "restrict_to_image handles dimensions 0..2");
    }
    Chain out(c.dim());
    for (auto const& [cell, k] : c.coeffs()) {
      if (cell >= table.size() || table[cell] == npos) {
        throw Error(ErrorCode::invalid_argument, "chain leaves the image subcomplex");
      }
      out.add(table[cell], k);
    }
    return out;
  }

  // ---- collision bound ----------------------------------------------------

  CollisionBound collision_bound(ExtendedComplex const& e, ModuliEstimate const* moduli) {
    CollisionBound out;
    auto const&    x = e.source;
    std::unordered_map<std::size_t, std::vector<int>> dist_cache;
    auto dist_from = [&](std::size_t v) -> std::vector<int> const& {
      auto it = dist_cache.find(v);
      if (it == dist_cache.end()) {
        Bfs bfs(x);
        bfs.run(v);
        std::vector<int> d(x.vertices().size(), -1);
        for (auto u : bfs.reached()) {
          d[u] = bfs[u];
        }
        it = dist_cache.emplace(v, std::move(d)).first;
      }
      return it->second;
    };
    auto spread = [&](std::size_t f1, std::size_t f2) {
      std::int64_t best = 0;
      for (auto a : x.faces2()[f1].walk) {
        auto const& d = dist_from(a);
        for (auto b : x.faces2()[f2].walk) {
          best = std::max<std::int64_t>(best, d[b]);
        }
      }
      return best;
    };
    std::map<std::size_t, std::vector<std::size_t>> sources;
    for (std::size_t f = 0; f < e.face_map.size(); ++f) {
      for (auto const& [t, k] : e.face_map[f].coeffs()) {
        sources[t].push_back(f);
        if (std::abs(k) >= 2) {
          out.measured = std::max(out.measured, spread(f, f));
        }
      }
    }
    for (auto const& [t, fs] : sources) {
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
          out.measured = std::max(out.measured, spread(fs[i], fs[j]));
        }
      }
    }
    out.l = std::max<std::int64_t>(out.measured, 1);
    if (moduli) {
      std::int64_t lp = 0;
      for (auto const& [t, mm] : moduli->per_distance) {
        if (mm.first <= 2 * e.n + 1) {
          lp = std::max(lp, t);
        }
      }
      out.theoretical = lp + 2 * e.n;
    }
    return out;
  }

  // ---- quasi-isometry -----------------------------------------------------

  QiReport qi_verify(ExtendedComplex const& e, std::int64_t l, std::size_t sample_count,
                     std::uint64_t seed, std::size_t workers) {
    QiReport out;
    out.l            = l;
    auto const&  x   = e.source;
    auto         in  = inner_vertices(x, default_margin(x.radius()));
    std::vector<std::size_t> inner;
    for (std::size_t v = 0; v < in.size(); ++v) {
      if (in[v]) {
        inner.push_back(v);
      }
    }
    std::size_t n     = inner.size();
    std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
    out.exhaustive    = total <= sample_count;
    out.pairs         = out.exhaustive ? total : sample_count;
    if (out.pairs == 0) {
      return out;
    }

    struct Partial {
      bool                          lower = true, upper = true;
      std::optional<QiReport::Pair> worst;
      std::int64_t                  worst_num = 0;  // (L+1) dm - dx + 2L
    };
    auto consider = [&](Partial& p, std::size_t a, std::size_t b, std::int64_t dx, std::int64_t dm) {
      std::int64_t num = (l + 1) * dm - dx + 2 * l;
      if (num < 0) {
        p.lower = false;
      }
      if (dm > dx) {
        p.upper = false;
      }
      if (!p.worst || num < p.worst_num) {
        auto lhs    = static_cast<double>(dx) / static_cast<double>(l + 1)
                   - 2.0 * static_cast<double>(l) / static_cast<double>(l + 1);
        p.worst     = QiReport::Pair{a, b, dx, dm, lhs, static_cast<double>(dm)};
        p.worst_num = num;
      }
    };
    Chunks               chunks{out.exhaustive ? n : sample_count, out.exhaustive ? std::size_t{1} : std::size_t{64}};
    std::vector<Partial> parts(chunks.count());
    parallel_for(chunks.count(), workers, [&](std::size_t c) {
      Bfs bx(x), bm(e.m);
      for (auto k = chunks.begin(c); k < chunks.end(c); ++k) {
        if (out.exhaustive) {
          auto a = inner[k];
          bx.run(a);
          bm.run(e.m_vertex[e.vertex_map[a]]);
          for (auto j = k + 1; j < n; ++j) {
            auto b = inner[j];
            consider(parts[c], a, b, bx[b], bm[e.m_vertex[e.vertex_map[b]]]);
          }
        } else {
          auto [i, j] = random_pair(n, sample_seed(seed, 13, k));
          auto a = inner[i], b = inner[j];
          bx.run(a);
          bm.run(e.m_vertex[e.vertex_map[a]]);
          consider(parts[c], a, b, bx[b], bm[e.m_vertex[e.vertex_map[b]]]);
        }
      }
    });
    std::int64_t worst_num = 0;
    for (auto const& p : parts) {
      out.lower_ok = out.lower_ok && p.lower;
      out.upper_ok = out.upper_ok && p.upper;
      if (p.worst && (!out.worst || p.worst_num < worst_num)) {
        out.worst = p.worst;
        worst_num = p.worst_num;
      }
    }
    return out;
  }

  // ---- invariants ---------------------------------------------------------

  ExtensionChecks check_extension(ExtendedComplex const& e, std::size_t chain_samples,
                                  std::size_t pair_samples, std::uint64_t seed,
                                  std::size_t workers) {
    ExtensionChecks out;
    auto const&     x = e.source;
    auto const&     y = e.y;

    std::set<std::size_t> seen_v, seen_e;
    for (auto v : e.vertex_map) {
      out.injective_1skeleton = out.injective_1skeleton && seen_v.insert(v).second;
    }
    for (auto const& sc : e.edge_map) {
      out.injective_1skeleton = out.injective_1skeleton && seen_e.insert(sc.cell).second;
    }

    Bfs base(y, true);
    for (std::size_t i = 0; i < e.added_edges.size(); ++i) {
      auto const& ed = y.edges()[e.added_edges[i]];
      base.run(ed.tail, static_cast<int>(e.c));
      int d = base[ed.head];
      if (d < 2 || d > e.c) {
        out.added_edges_short = false;
      }
      auto const& walk = y.faces2()[e.added_faces[i]].walk;
      bool        ok   = walk.front() == ed.tail && walk.back() == ed.head
                && static_cast<int>(walk.size()) - 1 == d;
      for (std::size_t j = 0; ok && j + 1 < walk.size(); ++j) {
        auto id = y.find_edge(walk[j], walk[j + 1]);
        ok      = id && y.edges()[*id].label != extra_edge_label;
      }
      if (ok) {
        Chain expected = walk_chain(y, walk);
        expected.add(e.added_edges[i], -1);
        auto got = face_boundary(y, e.added_faces[i]);
        ok       = got == expected || got == -1 * expected;
      }
      out.added_faces_ok = out.added_faces_ok && ok;
    }

    std::int64_t n = 0;
    for (auto const& img : e.face_map) {
      n = std::max(n, img.norm());
    }
    out.n_matches = n == e.n;

    // Chain map on random chains of dimension 1 and (when present) 2.
    out.chain_samples = chain_samples;
    std::vector<char> ok(chain_samples, 1);
    parallel_for(chain_samples, workers, [&](std::size_t i) {
      std::mt19937_64 rng(sample_seed(seed, 17, i));
      int             d     = (i % 2 == 1 && !x.faces2().empty()) ? 2 : 1;
      std::size_t     cells = x.cell_count(d);
      if (cells == 0) {
        return;
      }
      Chain c(d);
      auto  terms = 1 + rng() % 5;
      for (std::size_t t = 0; t < terms; ++t) {
        auto v = static_cast<std::int64_t>(rng() % 7) - 3;
        c.add(static_cast<std::size_t>(rng() % cells), v == 0 ? 1 : v);
      }
      ok[i] = apply_boundary(y, push_forward(e, c)) == push_forward(e, apply_boundary(x, c));
    });
    out.chain_map = std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; });

    // d_M >= d_Y on pairs of M vertices.
    auto const& m = e.m;
    std::vector<std::size_t> y_of_m(m.vertices().size());
    for (std::size_t v = 0; v < e.m_vertex.size(); ++v) {
      if (e.m_vertex[v] != npos) {
        y_of_m[e.m_vertex[v]] = v;
      }
    }
    std::size_t mv    = m.vertices().size();
    std::size_t total = mv < 2 ? 0 : mv * (mv - 1) / 2;
    bool        exh   = total <= pair_samples;
    out.metric_pairs  = exh ? total : pair_samples;
    Chunks            chunks{exh ? mv : pair_samples, exh ? std::size_t{1} : std::size_t{64}};
    std::vector<char> dom(chunks.count(), 1);
    parallel_for(chunks.count(), workers, [&](std::size_t c) {
      Bfs bm(m), by(y);
      for (auto k = chunks.begin(c); k < chunks.end(c); ++k) {
        std::vector<std::pair<std::size_t, std::size_t>> todo;
        if (exh) {
          for (auto j = k + 1; j < mv; ++j) {
            todo.emplace_back(k, j);
          }
        } else if (mv >= 2) {
          todo.push_back(random_pair(mv, sample_seed(seed, 19, k)));
        }
        if (todo.empty()) {
          continue;
        }
        bm.run(todo.front().first);
        by.run(y_of_m[todo.front().first]);
        for (auto [a, b] : todo) {
          int dm = bm[b], dy = by[y_of_m[b]];
          if (dm >= 0 && dm < dy) {
            dom[c] = 0;
          }
        }
      }
    });
    out.metric_dominance = std::all_of(dom.begin(), dom.end(), [](char b) { return b != 0; });
    return out;
  }

  // ---- filling comparison -------------------------------------------------

  FillingComparisonReport compare_fillings(ExtendedComplex const& e,
                                           std::vector<Chain> const& cycles,
                                           FillBudget const& budget, std::size_t workers) {
    FillingComparisonReport out;
    out.rows.resize(cycles.size());
    for (auto const& s : cycles) {
      if (s.dim() != 1 || !is_cycle(e.source, s)) {
        throw Error(ErrorCode::invalid_argument, "compare_fillings expects 1-cycles of the source");
      }
      out.vacuous = out.vacuous && s.empty();
    }
    FillingSolver sy(e.y);
    out.kernel_rank_y = sy.kernel_rank(2);
    if (out.vacuous) {
      for (std::size_t i = 0; i < cycles.size(); ++i) {
        out.rows[i].cycle = cycles[i];
      }
      return out;
    }
    FillingSolver sx(e.source), sm(e.m);
    parallel_for(cycles.size(), workers, [&](std::size_t i) {
      auto& row = out.rows[i];
      row.cycle = cycles[i];
      if (cycles[i].empty()) {
        return;
      }
      auto image     = push_forward(e, cycles[i]);
      row.image_norm = static_cast<std::size_t>(image.norm());
      auto rx        = sx.fvol(cycles[i], budget);
      auto ry        = sy.fvol(image, budget);
      auto rm        = sm.fvol(restrict_to_image(e, image), budget);
      row.fvol_x     = rx.volume;
      row.fvol_y     = ry.volume;
      row.fvol_m     = rm.volume;
      row.certified  = rx.certified && ry.certified && rm.certified;
      row.pushforward_ok = row.fvol_m <= e.n * row.fvol_x;
    });

    auto profile = [&](auto ell_of, auto fill_of) {
      std::set<std::size_t> ells;
      for (auto const& r : out.rows) {
        if (!r.cycle.empty()) {
          ells.insert(ell_of(r));
        }
      }
      std::vector<ProfilePoint> p;
      for (auto ell : ells) {
        ProfilePoint pt;
        pt.ell = ell;
        for (auto const& r : out.rows) {
          if (ell_of(r) <= ell) {
            pt.fill = std::max(pt.fill, fill_of(r));
            ++pt.count;
            pt.certified = pt.certified && r.certified;
          }
        }
        p.push_back(pt);
      }
      return p;
    };
    for (auto const& r : out.rows) {
      out.pushforward_ok = out.pushforward_ok && r.pushforward_ok;
      out.unique_equal   = out.unique_equal && r.fvol_m == r.fvol_y;
    }
    auto source_ell = [](FillingComparison const& r) { return static_cast<std::size_t>(r.cycle.norm()); };
    auto image_ell  = [](FillingComparison const& r) { return r.image_norm; };
    auto px = profile(source_ell, [](FillingComparison const& r) { return r.fvol_x; });
    auto pm = profile(image_ell, [](FillingComparison const& r) { return r.fvol_m; });
    auto py = profile(image_ell, [](FillingComparison const& r) { return r.fvol_y; });
    out.m_vs_y = compare_growth(pm, py, 8);
    out.m_vs_x = compare_growth(pm, px, 8);
    return out;
  }

}  // namespace hfill
