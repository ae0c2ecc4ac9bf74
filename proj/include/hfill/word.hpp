#ifndef HFILL_WORD_HPP_
#define HFILL_WORD_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hfill {

  // A letter is a signed, 1-based generator index: +(i+1) is generator i and
  // -(i+1) its inverse.
  using Letter  = std::int32_t;
  using Letters = std::vector<Letter>;

  inline Letter make_letter(std::size_t generator, bool inverse) {
    auto l = static_cast<Letter>(generator + 1);
    return inverse ? -l : l;
  }

  inline std::size_t generator_of(Letter l) {
    return static_cast<std::size_t>(l < 0 ? -l : l) - 1;
  }

  // Total order on letters: a < a^-1 < b < b^-1 < ...
  inline int letter_rank(Letter l) {
    return 2 * static_cast<int>(generator_of(l)) + (l < 0 ? 1 : 0);
  }

  inline bool letter_less(Letter x, Letter y) {
    return letter_rank(x) < letter_rank(y);
  }

  // Freely reduced element of F(A).
  class Word {
   public:
    Word() = default;

    // Reduces `letters` freely; the result is the unique reduced form.
    static Word reduce(std::span<Letter const> letters);

    // Caller guarantees the sequence is already freely reduced.
    static Word from_reduced(Letters letters);

    Letters const& letters() const noexcept {
      return _letters;
    }
    std::size_t size() const noexcept {
      return _letters.size();
    }
    bool empty() const noexcept {
      return _letters.empty();
    }
    Letter operator[](std::size_t i) const {
      return _letters[i];
    }

    Word inverse() const;

    // Freely reduced product.
    Word operator*(Word const& other) const;

    bool operator==(Word const& other) const = default;

    // ShortLex order.
    bool operator<(Word const& other) const;

   private:
    explicit Word(Letters letters) : _letters(std::move(letters)) {}
    Letters _letters;
  };

  Word free_reduce(std::span<Letter const> letters);

  Letters inverse_letters(std::span<Letter const> letters);

  // Cyclically reduced form of a freely reduced word (strips inverse pairs
  // wrapping around the ends).
  Word cyclically_reduce(Word const& w);

  // All rotations of w, in rotation order (duplicates kept).
  std::vector<Letters> rotations(std::span<Letter const> w);

  // Lexicographically least rotation under `letter_less`.
  Letters least_rotation(std::span<Letter const> w);

  // Relator stored up to cyclic permutation.
  class CyclicWord {
   public:
    CyclicWord() = default;

    // `w` must be nonempty; it is freely and cyclically reduced here.
    explicit CyclicWord(std::span<Letter const> w);

    Word const& canonical() const noexcept {
      return _canonical;
    }
    std::size_t size() const noexcept {
      return _canonical.size();
    }
    std::size_t original_length() const noexcept {
      return _original_length;
    }
    CyclicWord inverse() const;

    bool operator==(CyclicWord const& other) const {
      return _canonical == other._canonical;
    }

   private:
    Word        _canonical;
    std::size_t _original_length = 0;
  };

  // Renders with generator names; inverses as `x^-1`, the empty word as "1".
  std::string to_string(std::span<Letter const>         w,
                        std::vector<std::string> const& names);

  // Compact form: lower-case letters for generators, upper-case for
  // inverses; only valid for alphabets of at most 26 generators.
  std::string to_compact(std::span<Letter const> w);

  struct LettersHash {
    std::size_t operator()(Letters const& w) const noexcept;
  };

  struct WordHash {
    std::size_t operator()(Word const& w) const noexcept {
      return LettersHash{}(w.letters());
    }
  };

}  // namespace hfill

#endif  // HFILL_WORD_HPP_
