#include <string>

#include "clintime/preproc.hpp"
#include "clintime/text.hpp"

// Porter suffix-stripping stemmer. The single pass is applied to a fixed
// point so that stem(stem(w)) == stem(w) holds for every input.

namespace clintime::preproc {

namespace {

bool is_vowel_at(const std::string& w, std::size_t i) {
  char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
  if (c == 'y') return i > 0 && !is_vowel_at(w, i - 1);
  return false;
}

// Porter's measure m of w[0..end)
int measure(const std::string& w, std::size_t end) {
  int m = 0;
  bool prevVowel = false;
  for (std::size_t i = 0; i < end; ++i) {
    bool v = is_vowel_at(w, i);
    if (!v && prevVowel) ++m;
    prevVowel = v;
  }
  return m;
}

bool has_vowel(const std::string& w, std::size_t end) {
  for (std::size_t i = 0; i < end; ++i)
    if (is_vowel_at(w, i)) return true;
  return false;
}

bool double_consonant(const std::string& w) {
  auto n = w.size();
  if (n < 2) return false;
  if (w[n - 1] != w[n - 2]) return false;
  return !is_vowel_at(w, n - 1);
}

// consonant-vowel-consonant, final consonant not w/x/y
bool cvc(const std::string& w) {
  auto n = w.size();
  if (n < 3) return false;
  if (is_vowel_at(w, n - 1) || !is_vowel_at(w, n - 2) || is_vowel_at(w, n - 3)) return false;
  char c = w[n - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends(const std::string& w, const std::string& suf) {
  return w.size() >= suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
}

std::string porter_pass(std::string w) {
  if (w.size() <= 2) return w;

  // Step 1a
  if (ends(w, "sses"))
    w.erase(w.size() - 2);
  else if (ends(w, "ies"))
    w.erase(w.size() - 2);
  else if (!ends(w, "ss") && ends(w, "s"))
    w.erase(w.size() - 1);

  // Step 1b
  bool step1bExtra = false;
  if (ends(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.erase(w.size() - 1);
  } else if (ends(w, "ed") && has_vowel(w, w.size() - 2)) {
    w.erase(w.size() - 2);
    step1bExtra = true;
  } else if (ends(w, "ing") && has_vowel(w, w.size() - 3)) {
    w.erase(w.size() - 3);
    step1bExtra = true;
  }
  if (step1bExtra) {
    if (ends(w, "at") || ends(w, "bl") || ends(w, "iz")) {
      w.push_back('e');
    } else if (double_consonant(w) && !ends(w, "l") && !ends(w, "s") && !ends(w, "z")) {
      w.erase(w.size() - 1);
    } else if (measure(w, w.size()) == 1 && cvc(w)) {
      w.push_back('e');
    }
  }

  // Step 1c
  if (ends(w, "y") && has_vowel(w, w.size() - 1)) w[w.size() - 1] = 'i';

  // Step 2
  static const std::pair<const char*, const char*> step2[] = {
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"}, {"biliti", "ble"}};
  for (const auto& [suf, rep] : step2) {
    if (ends(w, suf)) {
      std::size_t stemEnd = w.size() - std::string(suf).size();
      if (measure(w, stemEnd) > 0) w = w.substr(0, stemEnd) + rep;
      break;
    }
  }

  // Step 3
  static const std::pair<const char*, const char*> step3[] = {
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""}};
  for (const auto& [suf, rep] : step3) {
    if (ends(w, suf)) {
      std::size_t stemEnd = w.size() - std::string(suf).size();
      if (measure(w, stemEnd) > 0) w = w.substr(0, stemEnd) + rep;
      break;
    }
  }

  // Step 4
  static const char* step4[] = {"al",   "ance", "ence", "er",  "ic",  "able", "ible",
                                "ant",  "ement", "ment", "ent", "ou",  "ism",  "ate",
                                "iti",  "ous",  "ive",  "ize"};
  for (const char* suf : step4) {
    if (ends(w, suf)) {
      std::size_t stemEnd = w.size() - std::string(suf).size();
      if (measure(w, stemEnd) > 1) w.erase(stemEnd);
      break;
    }
  }
  if (ends(w, "ion")) {
    std::size_t stemEnd = w.size() - 3;
    if (measure(w, stemEnd) > 1 && stemEnd > 0 && (w[stemEnd - 1] == 's' || w[stemEnd - 1] == 't'))
      w.erase(stemEnd);
  }

  // Step 5a
  if (ends(w, "e")) {
    std::size_t stemEnd = w.size() - 1;
    int m = measure(w, stemEnd);
    std::string head = w.substr(0, stemEnd);
    if (m > 1 || (m == 1 && !cvc(head))) w.erase(stemEnd);
  }
  // Step 5b
  if (double_consonant(w) && ends(w, "l") && measure(w, w.size()) > 1) w.erase(w.size() - 1);

  return w;
}

}  // namespace

std::string stem(const std::string& word) {
  std::string w = text::to_lower(word);
  for (char c : w)
    if (c < 'a' || c > 'z') return w;  // only plain alphabetic words are stemmed
  for (int iter = 0; iter < 8; ++iter) {
    std::string next = porter_pass(w);
    if (next == w) break;
    w = next;
  }
  return w;
}

}  // namespace clintime::preproc
