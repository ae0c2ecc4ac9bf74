#ifndef HFILL_PRESENTATION_HPP_
#define HFILL_PRESENTATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfill/word.hpp"

namespace hfill {

  // Positive rational used for small-cancellation thresholds.
  struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 6;

    bool operator==(Ratio const&) const = default;
  };

  Ratio       parse_ratio(std::string_view text);
  std::string to_string(Ratio r);

  class Presentation {
   public:
    Presentation() = default;

    // Validates names and relators; relators are reduced and canonicalized.
    // Throws Error(empty_relator | duplicate_relator | invalid_argument).
    Presentation(std::vector<std::string> generator_names,
                 std::vector<Letters>     relators,
                 Ratio                    lambda_target = {});

    std::vector<std::string> const& generator_names() const noexcept {
      return _generator_names;
    }
    std::size_t rank() const noexcept {
      return _generator_names.size();
    }
    std::vector<CyclicWord> const& relators() const noexcept {
      return _relators;
    }
    Ratio lambda_target() const noexcept {
      return _lambda;
    }
    std::size_t max_relator_length() const noexcept;

    bool operator==(Presentation const&) const = default;

   private:
    std::vector<std::string> _generator_names;
    std::vector<CyclicWord>  _relators;
    Ratio                    _lambda;
  };

  // Line-oriented presentation files:
  //
  //   # comment
  //   gens: a b c d
  //   rel: [a,b][c,d]
  //   rel: (a b)^3 c^-1 C
  //   lambda: 1/6
  //
  // Generators are matched greedily (longest name first); an all upper-case
  // spelling of a name denotes its inverse unless it is itself a name.
  Presentation parse_presentation(std::string_view text);

  // Single word in the relator syntax over the given generator names; "1"
  // and the blank string denote the empty word. The result is freely reduced.
  Word parse_word(std::string_view text, std::vector<std::string> const& names);

  // Inverse of parse_presentation (up to canonicalization).
  std::string serialize(Presentation const& p);

  // Builtin presentations.
  Presentation surface_presentation(std::size_t genus);
  Presentation free_abelian_presentation(std::size_t rank);
  Presentation free_presentation(std::size_t rank);

  struct PieceReport {
    // Indexed by relator; 0 when the relator contains no piece.
    std::vector<std::size_t> per_relator;
    std::vector<Word>        witnesses;
  };

  // Exact longest pieces, by comparing all ordered pairs of distinct cyclic
  // permutations of R and R^-1.
  PieceReport compute_pieces(Presentation const& p);

  struct SmallCancellationVerdict {
    bool        satisfied = true;
    std::size_t relator   = 0;  // witness, meaningful when !satisfied
    Word        piece;
    std::size_t piece_length   = 0;
    std::size_t relator_length = 0;
  };

  // C'(lambda): every piece p of a relator r has |p| < lambda |r| (strict).
  SmallCancellationVerdict check_small_cancellation(Presentation const& p,
                                                    Ratio               lambda);

  bool is_proper_power(std::span<Letter const> cyclically_reduced);
  bool is_proper_power(CyclicWord const& r);

  // Dehn's algorithm for C'(1/6) presentations. Construction verifies the
  // condition once; reductions are then cheap and thread-safe.
  class DehnReducer {
   public:
    // Throws Error(precondition_violated) unless C'(1/6) holds and no
    // relator is a proper power.
    explicit DehnReducer(Presentation const& p);

    // Replaces the leftmost subword of w that is more than half of a
    // cyclic permutation of a relator or its inverse (longest match at that
    // position) by the inverse of the complement. Absent if none exists.
    std::optional<Word> step(Word const& w) const;

    // Iterates `step` to a fixed point. Empty iff w is trivial in the group.
    Word reduce(Word const& w) const;

    // Like reduce, recording every intermediate word (input first).
    std::vector<Word> trace(Word const& w) const;

    bool is_trivial(Word const& w) const {
      return reduce(w).empty();
    }
    bool equal(Word const& u, Word const& v) const {
      return is_trivial(u.inverse() * v);
    }

    Presentation const& presentation() const noexcept {
      return _presentation;
    }
    std::vector<Letters> const& symmetrized() const noexcept {
      return _symmetrized;
    }

   private:
    Presentation         _presentation;
    std::vector<Letters> _symmetrized;
    // Candidate indices into _symmetrized, keyed by letter_rank of the
    // first letter.
    std::vector<std::vector<std::size_t>> _by_first;
  };

  // Convenience wrappers that validate the presentation on every call.
  std::optional<Word> greendlinger_step(Word const& w, Presentation const& p);
  Word                dehn_reduce(Word const& w, Presentation const& p);

}  // namespace hfill

#endif  // HFILL_PRESENTATION_HPP_
