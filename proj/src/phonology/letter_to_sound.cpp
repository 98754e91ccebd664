// Copyright 2026 The versekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// English spelling-to-sound rules, in the spirit of the classic NRL rule set
// but much smaller: longest-match graphemes scanned left to right with a few
// context conditions (silent final e, magic e, soft c/g, word-final y).

#include <array>
#include <cctype>

#include "versekit/phonology.hpp"

namespace versekit::phonology {

namespace {

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

struct Rule {
  std::string_view graphemes;
  std::string_view phones;  // unstressed; stress assigned afterwards
  enum Where { kAnywhere, kInitial, kFinal } where = kAnywhere;
};

// Tried in order; longer and more specific first.
constexpr auto kRules = std::to_array<Rule>({
    {"tion", "SH AH N"},
    {"sion", "ZH AH N"},
    {"ture", "CH ER"},
    {"eigh", "EY"},
    {"augh", "AO"},
    {"ough", "AO"},
    {"ious", "IY AH S"},
    {"ous", "AH S", Rule::kFinal},
    {"igh", "AY"},
    {"tch", "CH"},
    {"sch", "S K"},
    {"ing", "IH NG", Rule::kFinal},
    {"air", "EH R"},
    {"ear", "IH R"},
    {"eer", "IH R"},
    {"our", "AW ER"},
    {"dge", "JH"},
    {"kn", "N", Rule::kInitial},
    {"wr", "R", Rule::kInitial},
    {"gn", "N", Rule::kInitial},
    {"ps", "S", Rule::kInitial},
    {"gh", "G", Rule::kInitial},
    {"mb", "M", Rule::kFinal},
    {"gh", ""},
    {"ch", "CH"},
    {"sh", "SH"},
    {"th", "TH"},
    {"ph", "F"},
    {"wh", "W"},
    {"ck", "K"},
    {"ng", "NG"},
    {"qu", "K W"},
    {"ee", "IY"},
    {"ea", "IY"},
    {"oo", "UW"},
    {"ou", "AW"},
    {"ow", "OW", Rule::kFinal},
    {"ow", "AW"},
    {"ai", "EY"},
    {"ay", "EY"},
    {"oa", "OW"},
    {"oi", "OY"},
    {"oy", "OY"},
    {"au", "AO"},
    {"aw", "AO"},
    {"ew", "UW"},
    {"ey", "IY", Rule::kFinal},
    {"ey", "EY"},
    {"ie", "AY", Rule::kFinal},
    {"ie", "IY"},
    {"ei", "EY"},
    {"ue", "UW"},
    {"ui", "UW"},
    {"ar", "AA R"},
    {"or", "AO R"},
    {"er", "ER"},
    {"ir", "ER"},
    {"ur", "ER"},
    {"le", "AH L", Rule::kFinal},
    {"x", "Z", Rule::kInitial},
    {"x", "K S"},
    {"j", "JH"},
    {"y", "Y", Rule::kInitial},
    {"q", "K"},
    {"w", "W"},
    {"z", "Z"},
});

// Single consonant letters not covered above.
std::string_view consonant(char c) {
  switch (c) {
    case 'b': return "B";
    case 'd': return "D";
    case 'f': return "F";
    case 'h': return "HH";
    case 'k': return "K";
    case 'l': return "L";
    case 'm': return "M";
    case 'n': return "N";
    case 'p': return "P";
    case 'r': return "R";
    case 's': return "S";
    case 't': return "T";
    case 'v': return "V";
    default: return "";
  }
}

void append(PhonemeSeq& out, std::string_view phones) {
  for (const auto& tok : str::split_ws(phones)) {
    Phone p = *Phone::parse(tok);
    // Collapse doubled consonants ("ll", "ss") into one phoneme.
    if (!p.is_vowel() && !out.empty() && out.back() == p) continue;
    out.push_back(p);
  }
}

}  // namespace

PhonemeSeq letter_to_sound(std::string_view word) {
  std::string w;
  for (char c : word) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) w += static_cast<char>(std::tolower(u));
  }
  const std::size_t n = w.size();
  PhonemeSeq out;
  // A final 'e' is silent only after an earlier vowel sound.
  bool has_earlier_vowel = false;

  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    for (const auto& rule : kRules) {
      std::size_t len = rule.graphemes.size();
      if (w.compare(i, len, rule.graphemes) != 0) continue;
      if (rule.where == Rule::kInitial && i != 0) continue;
      if (rule.where == Rule::kFinal && i + len != n) continue;
      append(out, rule.phones);
      i += len;
      matched = true;
      break;
    }
    if (matched) {
      has_earlier_vowel = has_earlier_vowel || vowel_count(out) > 0;
      continue;
    }

    char c = w[i];
    char next = i + 1 < n ? w[i + 1] : '\0';
    if (c == 'c') {
      append(out, (next == 'e' || next == 'i' || next == 'y') ? "S" : "K");
    } else if (c == 'g') {
      append(out, (next == 'e' || next == 'i' || next == 'y') && i + 2 < n
                      ? "JH"
                      : "G");
    } else if (c == 'h') {
      // Silent unless it starts a syllable.
      if (i + 1 < n && (is_vowel_letter(next) || next == 'y')) append(out, "HH");
    } else if (c == 'y') {
      // Vowel use of y.
      if (i + 1 == n) {
        append(out, has_earlier_vowel ? "IY" : "AY");
      } else {
        append(out, "IH");
      }
    } else if (is_vowel_letter(c)) {
      bool final_e = c == 'e' && i + 1 == n && has_earlier_vowel;
      char prev = i > 0 ? w[i - 1] : '\0';
      bool sibilant = prev == 's' || prev == 'z' || prev == 'x' ||
                      (prev == 'h' && i > 1 && (w[i - 2] == 's' || w[i - 2] == 'c'));
      bool final_es = c == 'e' && i + 2 == n && has_earlier_vowel &&
                      ((next == 's' && !sibilant) ||
                       (next == 'd' && prev != 't' && prev != 'd'));
      if (final_e) {
        // silent
      } else if (final_es) {
        // "-es"/"-ed" after a consonant: the vowel drops, the consonant stays.
      } else {
        // Magic e: vowel, one consonant, then a final (or final-ish) e.
        bool magic = i + 2 < n && !is_vowel_letter(next) && next != 'y' &&
                     w[i + 2] == 'e' &&
                     (i + 3 == n ||
                      (i + 4 == n && (w[i + 3] == 's' || w[i + 3] == 'd')));
        bool open_final = i + 1 == n;
        std::string_view ph;
        switch (c) {
          case 'a': ph = magic ? "EY" : (open_final ? "AH" : "AE"); break;
          case 'e':
            ph = magic || open_final ? "IY"
                 : (i + 2 == n && (next == 's' || next == 'd')) ? "IH"
                                                                : "EH";
            break;
          case 'i': ph = magic ? "AY" : "IH"; break;
          case 'o': ph = magic || open_final ? "OW" : "AA"; break;
          default: ph = magic ? "UW" : "AH"; break;
        }
        append(out, ph);
        has_earlier_vowel = true;
      }
    } else {
      append(out, consonant(c));
    }
    ++i;
  }

  if (vowel_count(out) == 0) {
    // Vowel-less spellings ("hmm", "zzz") still form one syllable.
    std::size_t at = out.empty() ? 0 : 1;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(at),
               Phone::make(2, 0));
  }
  // Primary stress on the first vowel, the rest unstressed.
  bool stressed = false;
  for (auto& p : out) {
    if (!p.is_vowel()) continue;
    p = Phone::make(p.base(), stressed ? 0 : 1);
    stressed = true;
  }
  return out;
}

}  // namespace versekit::phonology
