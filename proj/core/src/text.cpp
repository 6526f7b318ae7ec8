#include "kwsql/text.hpp"

#include <array>
#include <cstdio>

namespace kwsql {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string fnv1a64_hex(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return std::string(buf);
}

namespace {

// Fold the Latin-1 supplement accents that show up in table/column synonyms
// (pt-BR metadata in particular). Input is the Unicode code point.
char fold_accent(unsigned cp) {
  if ((cp >= 0xC0 && cp <= 0xC5) || (cp >= 0xE0 && cp <= 0xE5)) return 'a';
  if (cp == 0xC7 || cp == 0xE7) return 'c';
  if ((cp >= 0xC8 && cp <= 0xCB) || (cp >= 0xE8 && cp <= 0xEB)) return 'e';
  if ((cp >= 0xCC && cp <= 0xCF) || (cp >= 0xEC && cp <= 0xEF)) return 'i';
  if (cp == 0xD1 || cp == 0xF1) return 'n';
  if ((cp >= 0xD2 && cp <= 0xD6) || (cp >= 0xF2 && cp <= 0xF6)) return 'o';
  if ((cp >= 0xD9 && cp <= 0xDC) || (cp >= 0xF9 && cp <= 0xFC)) return 'u';
  if (cp == 0xDD || cp == 0xFD || cp == 0xFF) return 'y';
  return 0;
}

} // namespace

std::string normalize_term(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  for (std::size_t i = 0; i < term.size();) {
    unsigned char c = static_cast<unsigned char>(term[i]);
    if (c < 0x80) {
      char l = ascii_lower(static_cast<char>(c));
      if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9')) out.push_back(l);
      ++i;
      continue;
    }
    // Decode a UTF-8 2-byte sequence; longer sequences are dropped.
    if ((c & 0xE0) == 0xC0 && i + 1 < term.size()) {
      unsigned cp = ((c & 0x1Fu) << 6) |
                    (static_cast<unsigned char>(term[i + 1]) & 0x3Fu);
      if (char f = fold_accent(cp)) out.push_back(f);
      i += 2;
      continue;
    }
    ++i;
  }
  return out;
}

} // namespace kwsql
