#include "hfill/group.hpp"

#include "hfill/chains.hpp"
#include "hfill/errors.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace hfill {

  char const* to_string(Strategy s) noexcept {
    switch (s) {
      case Strategy::free_group:
        return "FREE";
      case Strategy::free_abelian:
        return "FREE_ABELIAN";
      case Strategy::surface:
        return "SURFACE";
      case Strategy::dehn:
        return "DEHN";
    }
    return "?";
  }

  GroupOracle GroupOracle::free_group(std::size_t rank) {
    GroupOracle g;
    g._strategy     = Strategy::free_group;
    g._presentation = std::make_shared<Presentation const>(free_presentation(rank));
    return g;
  }

  GroupOracle GroupOracle::free_abelian(std::size_t rank) {
    if (rank < 1 || rank > 3) {
      throw Error(ErrorCode::invalid_argument, "free abelian oracle supports rank 1..3");
    }
    GroupOracle g;
    g._strategy = Strategy::free_abelian;
    g._presentation
        = std::make_shared<Presentation const>(free_abelian_presentation(rank));
    return g;
  }

  GroupOracle GroupOracle::surface(std::size_t genus) {
    if (genus < 2) {
      throw Error(ErrorCode::invalid_argument, "surface oracle needs genus >= 2");
    }
    GroupOracle g = dehn(surface_presentation(genus));
    g._strategy   = Strategy::surface;
    return g;
  }

  GroupOracle GroupOracle::dehn(Presentation const& p) {
    GroupOracle g;
    g._strategy     = Strategy::dehn;
    g._presentation = std::make_shared<Presentation const>(p);
    g._dehn         = std::make_shared<DehnReducer const>(p);
    g.find_invariants();
    return g;
  }

  namespace {
    constexpr std::size_t max_map_rank   = 6;
    constexpr std::size_t max_free_maps  = 12;

    std::vector<std::int64_t> exponent_sums(Letters const& w, std::size_t rank) {
      std::vector<std::int64_t> e(rank, 0);
      for (Letter l : w) {
        e[generator_of(l)] += l > 0 ? 1 : -1;
      }
      return e;
    }

    // Image of w under the map sending generator i to the letter images[i]
    // (0 for the identity) of F(x, y).
    Letters map_to_free(Letters const& w, std::vector<Letter> const& images) {
      Letters out;
      out.reserve(w.size());
      for (Letter l : w) {
        Letter t = images[generator_of(l)];
        if (t == 0) {
          continue;
        }
        if (l < 0) {
          t = -t;
        }
        if (!out.empty() && out.back() == -t) {
          out.pop_back();
        } else {
          out.push_back(t);
        }
      }
      return out;
    }
  }  // namespace

  void GroupOracle::find_invariants() {
    auto const& p    = *_presentation;
    std::size_t rank = p.rank();

    // Characters: integer vectors w with <w, exponent sums of r> = 0.
    SparseIntMatrix e(p.relators().size(), rank);
    for (std::size_t i = 0; i < p.relators().size(); ++i) {
      auto sums = exponent_sums(p.relators()[i].canonical().letters(), rank);
      for (std::size_t g = 0; g < rank; ++g) {
        e.add(i, g, sums[g]);
      }
    }
    _characters = *kernel_rank(e, true).basis;

    // Homomorphisms onto F(x, y) sending each generator to 1 or x^{+-1} or
    // y^{+-1}, kept when every relator dies and the image is nonabelian.
    if (rank > max_map_rank) {
      return;
    }
    static constexpr Letter choices[] = {0, 1, -1, 2, -2};
    std::vector<std::vector<Letter>> found;
    std::vector<std::size_t>         digit(rank, 0);
    while (true) {
      std::vector<Letter> images(rank);
      for (std::size_t g = 0; g < rank; ++g) {
        images[g] = choices[digit[g]];
      }
      bool uses_x = false, uses_y = false;
      Letter first_x = 0, first_y = 0;
      for (Letter t : images) {
        if (t == 1 || t == -1) {
          uses_x = true;
          if (first_x == 0) first_x = t;
        }
        if (t == 2 || t == -2) {
          uses_y = true;
          if (first_y == 0) first_y = t;
        }
      }
      // Normalization: first x image and first y image positive, x before y.
      bool normalized = uses_x && uses_y && first_x == 1 && first_y == 2;
      if (normalized) {
        auto fx = std::find_if(images.begin(), images.end(),
                               [](Letter t) { return t == 1 || t == -1; });
        auto fy = std::find_if(images.begin(), images.end(),
                               [](Letter t) { return t == 2 || t == -2; });
        normalized = fx < fy;
      }
      if (normalized) {
        bool kills = std::all_of(
            p.relators().begin(), p.relators().end(), [&](CyclicWord const& r) {
              Letters img = map_to_free(r.canonical().letters(), images);
              // Cyclic reduction: a conjugate of the identity is trivial.
              while (img.size() >= 2 && img.front() == -img.back()) {
                img.erase(img.begin());
                img.pop_back();
              }
              return img.empty();
            });
        if (kills) {
          found.push_back(images);
        }
      }
      std::size_t g = 0;
      while (g < rank && ++digit[g] == 5) {
        digit[g] = 0;
        ++g;
      }
      if (g == rank) {
        break;
      }
    }
    // Prefer maps that see more generators.
    std::stable_sort(found.begin(), found.end(), [](auto const& a, auto const& b) {
      auto nz = [](auto const& v) {
        return std::count_if(v.begin(), v.end(), [](Letter t) { return t != 0; });
      };
      return nz(a) > nz(b);
    });
    if (found.size() > max_free_maps) {
      found.resize(max_free_maps);
    }
    _free_maps = std::move(found);
  }

  bool GroupOracle::equal(Word const& u, Word const& v) const {
    switch (_strategy) {
      case Strategy::free_group:
        return u == v;
      case Strategy::free_abelian:
        return exponent_sums(u.letters(), rank()) == exponent_sums(v.letters(), rank());
      default:
        return _dehn->equal(u, v);
    }
  }

  Letters GroupOracle::key(Word const& w) const {
    switch (_strategy) {
      case Strategy::free_group:
        return w.letters();
      case Strategy::free_abelian: {
        auto    e = exponent_sums(w.letters(), rank());
        Letters k(e.begin(), e.end());
        return k;
      }
      default:
        break;
    }
    Letters k;
    auto    sums = exponent_sums(w.letters(), rank());
    for (auto const& c : _characters) {
      std::int64_t v = 0;
      for (std::size_t g = 0; g < sums.size(); ++g) {
        v += c[g] * sums[g];
      }
      k.push_back(static_cast<Letter>(v));
    }
    for (auto const& m : _free_maps) {
      k.push_back(0);
      auto img = map_to_free(w.letters(), m);
      k.insert(k.end(), img.begin(), img.end());
    }
    return k;
  }

  Word GroupOracle::normal_form(Word const& w) const {
    switch (_strategy) {
      case Strategy::free_group:
        return w;
      case Strategy::free_abelian: {
        auto    e = exponent_sums(w.letters(), rank());
        Letters out;
        for (std::size_t g = 0; g < e.size(); ++g) {
          for (std::int64_t i = 0; i < (e[g] < 0 ? -e[g] : e[g]); ++i) {
            out.push_back(make_letter(g, e[g] < 0));
          }
        }
        return Word::from_reduced(std::move(out));
      }
      default:
        break;
    }
    // Breadth-first search from the identity, expanding letters in order, so
    // the first label reaching an element is its ShortLex-least geodesic.
    std::size_t  bound = _dehn->reduce(w).size();
    Letters      target_key = key(w);
    ElementIndex index(*this);
    std::deque<std::pair<std::size_t, std::size_t>> queue;  // (id, dist)
    queue.emplace_back(index.insert(Word()), 0);
    if (w.empty() || equal(w, Word())) {
      return Word();
    }
    while (!queue.empty()) {
      auto [v, d] = queue.front();
      queue.pop_front();
      if (d >= bound) {
        continue;
      }
      Word const base = index.representative(v);
      for (std::size_t g = 0; g < rank(); ++g) {
        for (bool inv : {false, true}) {
          Word u = base * Word::from_reduced({make_letter(g, inv)});
          if (index.find(u)) {
            continue;
          }
          if (key(u) == target_key && equal(u, w)) {
            return u;
          }
          queue.emplace_back(index.insert(u), d + 1);
        }
      }
    }
    throw Error(ErrorCode::invalid_argument, "normal_form: element not found within bound");
  }

  std::optional<std::size_t> ElementIndex::find(Word const& w) const {
    auto it = _buckets.find(_oracle->key(w));
    if (it == _buckets.end()) {
      return std::nullopt;
    }
    if (_oracle->key_is_exact()) {
      return it->second.front();
    }
    for (std::size_t id : it->second) {
      if (_reps[id] == w || _oracle->equal(_reps[id], w)) {
        return id;
      }
    }
    return std::nullopt;
  }

  std::size_t ElementIndex::insert(Word const& w) {
    std::size_t id = _reps.size();
    _reps.push_back(w);
    _buckets[_oracle->key(w)].push_back(id);
    return id;
  }

  std::size_t ElementIndex::find_or_insert(Word const& w) {
    if (auto id = find(w)) {
      return *id;
    }
    return insert(w);
  }

  namespace {
    void check_relator_lengths(GroupOracle const& oracle) {
      for (auto const& r : oracle.presentation().relators()) {
        if (r.size() <= 2) {
          throw Error(ErrorCode::non_simplicial,
                      "relator of length " + std::to_string(r.size())
                          + " gives loops or parallel edges");
        }
      }
    }

    // Adds the generator edge v -> v x if absent; a different existing edge
    // between the same vertices means the 1-skeleton is not simplicial.
    void connect(CellComplex& k, std::size_t v, std::size_t u, Letter x) {
      std::size_t  tail  = x > 0 ? v : u;
      std::size_t  head  = x > 0 ? u : v;
      auto         label = static_cast<std::int32_t>(generator_of(x));
      if (auto e = k.find_edge(v, u)) {
        auto const& old = k.edges()[*e];
        if (old.tail != tail || old.head != head || old.label != label) {
          throw Error(ErrorCode::non_simplicial, "parallel edges in the Cayley graph");
        }
        return;
      }
      k.add_edge(tail, head, label);
    }

    // Adds every relator face whose boundary walk lies among indexed vertices.
    void attach_faces(CellComplex& k, ElementIndex const& index,
                      Presentation const& p) {
      for (std::size_t v = 0; v < index.size(); ++v) {
        for (std::size_t i = 0; i < p.relators().size(); ++i) {
          auto const&              r   = p.relators()[i].canonical().letters();
          Word                     cur = index.representative(v);
          std::vector<std::size_t> walk{v};
          bool                     inside = true;
          for (std::size_t j = 0; j + 1 < r.size(); ++j) {
            cur     = cur * Word::from_reduced({r[j]});
            auto id = index.find(cur);
            if (!id) {
              inside = false;
              break;
            }
            walk.push_back(*id);
            cur = index.representative(*id);
          }
          if (inside) {
            k.add_face2(walk, static_cast<std::int32_t>(i));
          }
        }
      }
    }
  }  // namespace

  CellComplex build_cayley_ball(GroupOracle const& oracle, int r, std::size_t vertex_cap) {
    if (r < 0) {
      throw Error(ErrorCode::invalid_argument, "radius must be nonnegative");
    }
    check_relator_lengths(oracle);
    auto const& p = oracle.presentation();
    CellComplex k(2, LabelKind::word, p.generator_names());
    k.set_radius(r);
    ElementIndex             index(oracle);
    std::vector<int>         dist;
    std::deque<std::size_t>  queue;

    index.insert(Word());
    k.add_vertex({});
    dist.push_back(0);
    queue.push_back(0);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      Word const base = index.representative(v);
      for (std::size_t g = 0; g < p.rank(); ++g) {
        for (bool inv : {false, true}) {
          Letter x  = make_letter(g, inv);
          Word   u  = base * Word::from_reduced({x});
          auto   id = index.find(u);
          if (!id) {
            if (dist[v] + 1 > r) {
              continue;
            }
            if (index.size() >= vertex_cap) {
              throw Error(ErrorCode::overflow,
                          "ball exceeds the vertex cap of " + std::to_string(vertex_cap));
            }
            id = index.insert(u);
            k.add_vertex(u.letters());
            dist.push_back(dist[v] + 1);
            queue.push_back(*id);
          }
          connect(k, v, *id, x);
        }
      }
    }
    attach_faces(k, index, p);
    return k;
  }

  CellComplex build_face_neighborhood(GroupOracle const&       oracle,
                                      std::vector<Word> const& centers,
                                      int                      steps,
                                      std::size_t              vertex_cap) {
    check_relator_lengths(oracle);
    auto const& p = oracle.presentation();

    // Every relator loop through a vertex: all rotations of r and r^-1.
    std::vector<Letters> loops;
    for (auto const& rel : p.relators()) {
      for (auto const& w : {rel.canonical().letters(),
                            inverse_letters(rel.canonical().letters())}) {
        for (auto const& rot : rotations(w)) {
          if (std::find(loops.begin(), loops.end(), rot) == loops.end()) {
            loops.push_back(rot);
          }
        }
      }
    }

    ElementIndex             index(oracle);
    std::vector<std::size_t> frontier;
    for (auto const& c : centers) {
      if (!index.find(c)) {
        frontier.push_back(index.insert(c));
      }
    }
    for (int s = 0; s < steps; ++s) {
      std::vector<std::size_t> next;
      for (std::size_t v : frontier) {
        for (auto const& loop : loops) {
          Word cur = index.representative(v);
          for (std::size_t j = 0; j + 1 < loop.size(); ++j) {
            cur     = cur * Word::from_reduced({loop[j]});
            auto id = index.find(cur);
            if (!id) {
              if (index.size() >= vertex_cap) {
                throw Error(ErrorCode::overflow, "neighborhood exceeds the vertex cap of "
                                                     + std::to_string(vertex_cap));
              }
              id = index.insert(cur);
              next.push_back(*id);
            }
            cur = index.representative(*id);
          }
        }
      }
      frontier = std::move(next);
    }

    CellComplex k(2, LabelKind::word, p.generator_names());
    k.set_radius(steps);
    for (std::size_t v = 0; v < index.size(); ++v) {
      k.add_vertex(index.representative(v).letters());
    }
    for (std::size_t v = 0; v < index.size(); ++v) {
      for (std::size_t g = 0; g < p.rank(); ++g) {
        for (bool inv : {false, true}) {
          Letter x  = make_letter(g, inv);
          auto   id = index.find(index.representative(v) * Word::from_reduced({x}));
          if (id) {
            connect(k, v, *id, x);
          }
        }
      }
    }
    attach_faces(k, index, p);
    return k;
  }

  GroupOracle builtin_oracle(std::string const& name) {
    auto number = [&](std::string const& prefix) -> std::optional<std::size_t> {
      if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) {
        return std::nullopt;
      }
      std::string rest = name.substr(prefix.size());
      if (!std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
      }
      return std::stoul(rest);
    };
    if (auto n = number("free")) {
      return GroupOracle::free_group(*n);
    }
    if (auto n = number("surface")) {
      return GroupOracle::surface(*n);
    }
    if (auto n = number("z")) {
      return GroupOracle::free_abelian(*n);
    }
    throw Error(ErrorCode::invalid_argument, "unknown builtin group '" + name
                                                 + "' (expected freeK, zK or surfaceG)");
  }

}  // namespace hfill
