#include "hfill/word.hpp"

#include <algorithm>

namespace hfill {

  Word Word::reduce(std::span<Letter const> letters) {
    Letters out;
    out.reserve(letters.size());
    for (Letter l : letters) {
      if (!out.empty() && out.back() == -l) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return Word(std::move(out));
  }

  Word Word::from_reduced(Letters letters) {
    return Word(std::move(letters));
  }

  Word Word::inverse() const {
    return Word(inverse_letters(_letters));
  }

  Word Word::operator*(Word const& other) const {
    Letters out = _letters;
    std::size_t i = 0;
    while (i < other.size() && !out.empty() && out.back() == -other[i]) {
      out.pop_back();
      ++i;
    }
    out.insert(out.end(), other._letters.begin() + i, other._letters.end());
    return Word(std::move(out));
  }

  bool Word::operator<(Word const& other) const {
    if (size() != other.size()) {
      return size() < other.size();
    }
    return std::lexicographical_compare(_letters.begin(),
                                        _letters.end(),
                                        other._letters.begin(),
                                        other._letters.end(),
                                        letter_less);
  }

  Word free_reduce(std::span<Letter const> letters) {
    return Word::reduce(letters);
  }

  Letters inverse_letters(std::span<Letter const> letters) {
    Letters out(letters.rbegin(), letters.rend());
    for (auto& l : out) {
      l = -l;
    }
    return out;
  }

  Word cyclically_reduce(Word const& w) {
    auto const& l = w.letters();
    std::size_t i = 0, j = l.size();
    while (j - i >= 2 && l[i] == -l[j - 1]) {
      ++i;
      --j;
    }
    return Word::from_reduced(Letters(l.begin() + i, l.begin() + j));
  }

  std::vector<Letters> rotations(std::span<Letter const> w) {
    std::vector<Letters> out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      Letters r(w.begin() + i, w.end());
      r.insert(r.end(), w.begin(), w.begin() + i);
      out.push_back(std::move(r));
    }
    return out;
  }

  Letters least_rotation(std::span<Letter const> w) {
    Letters best(w.begin(), w.end());
    for (auto& r : rotations(w)) {
      if (std::lexicographical_compare(
              r.begin(), r.end(), best.begin(), best.end(), letter_less)) {
        best = std::move(r);
      }
    }
    return best;
  }

  CyclicWord::CyclicWord(std::span<Letter const> w)
      : _original_length(w.size()) {
    auto c     = cyclically_reduce(free_reduce(w));
    _canonical = Word::from_reduced(least_rotation(c.letters()));
  }

  CyclicWord CyclicWord::inverse() const {
    CyclicWord out(inverse_letters(_canonical.letters()));
    out._original_length = _original_length;
    return out;
  }

  std::string to_string(std::span<Letter const>         w,
                        std::vector<std::string> const& names) {
    if (w.empty()) {
      return "1";
    }
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i > 0) {
        out += ' ';
      }
      out += names.at(generator_of(w[i]));
      if (w[i] < 0) {
        out += "^-1";
      }
    }
    return out;
  }

  std::string to_compact(std::span<Letter const> w) {
    std::string out;
    out.reserve(w.size());
    for (Letter l : w) {
      char c = static_cast<char>('a' + generator_of(l));
      out += l < 0 ? static_cast<char>(c - 'a' + 'A') : c;
    }
    return out;
  }

  std::size_t LettersHash::operator()(Letters const& w) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (Letter l : w) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(l));
      h *= 0x100000001b3ULL;
    }
    return h;
  }

}  // namespace hfill
