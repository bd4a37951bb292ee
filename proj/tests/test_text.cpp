#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sessiontypo/text.hpp"

using namespace sessiontypo;

namespace {

std::vector<std::pair<std::string, TokenClass>> flat(const std::vector<Token>& tokens) {
  std::vector<std::pair<std::string, TokenClass>> out;
  for (const auto& t : tokens) out.emplace_back(t.text, t.kind);
  return out;
}

}  // namespace

TEST_CASE("normalize_tokens on the first table1 query shape") {
  auto toks = flat(normalize_tokens("programme plagiat AND \"word embeddings\""));
  std::vector<std::pair<std::string, TokenClass>> want = {{"programme", TokenClass::word},
                                                          {"plagiat", TokenClass::word},
                                                          {"and", TokenClass::operator_},
                                                          {"word", TokenClass::word},
                                                          {"embeddings", TokenClass::word}};
  CHECK(toks == want);
}

TEST_CASE("full table1 query 0 has seven tokens") {
  CHECK(normalize_tokens("programme plagiat AND morphologie AND \"word embeddings\"").size() == 7);
}

TEST_CASE("diacritics fold and blank input") {
  auto toks = normalize_tokens("Détecteur");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].text == "detecteur");
  CHECK(toks[0].kind == TokenClass::word);
  CHECK(normalize_tokens("   ").empty());
  CHECK(normalize_tokens("").empty());
}

TEST_CASE("operators are case-insensitive, only as whole tokens") {
  auto toks = normalize_tokens("a or B Not c android");
  REQUIRE(toks.size() == 6);
  CHECK(toks[1].kind == TokenClass::operator_);
  CHECK(toks[3].kind == TokenClass::operator_);
  CHECK(toks[5].kind == TokenClass::word);
  CHECK(toks[5].text == "android");
}

TEST_CASE("typographic quotes and edge punctuation are stripped") {
  auto toks = normalize_tokens("\xE2\x80\x9C" "ressources externes" "\xE2\x80\x9D, (thésaurus)?");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].text == "ressources");
  CHECK(toks[1].text == "externes");
  CHECK(toks[2].text == "thesaurus");
  CHECK(normalize_tokens("\"\" ... !!").empty());
}

TEST_CASE("French letters fold to ASCII") {
  CHECK(fold_text("ÉLÈVE À Noël, ça œuvre") == "eleve a noel, ca oeuvre");
}

TEST_CASE("normalization is idempotent") {
  for (std::string s : {"Programme plagiat AND «Word» Embeddings", "  n-grammes,  phrases ", "Méthodologie!"}) {
    auto once = join_tokens(normalize_tokens(s));
    CHECK(join_tokens(normalize_tokens(once)) == once);
  }
}

TEST_CASE("Damerau-Levenshtein distances") {
  CHECK(damerau_levenshtein("", "") == 0);
  CHECK(damerau_levenshtein("abc", "") == 3);
  CHECK(damerau_levenshtein("incovenients", "inconvenients") == 1);
  CHECK(damerau_levenshtein("ab", "ba") == 1);
  CHECK(damerau_levenshtein("kitten", "sitting") == 3);
  // "no" <-> "on" is one transposition
  CHECK(damerau_levenshtein("fonctinonement", "fonctionnement") == 1);
}

TEST_CASE("Damerau-Levenshtein is a symmetric, bounded measure") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> len(0, 8), ch('a', 'd');
  for (int trial = 0; trial < 300; ++trial) {
    std::string a, b;
    for (int i = len(gen); i > 0; --i) a.push_back(static_cast<char>(ch(gen)));
    for (int i = len(gen); i > 0; --i) b.push_back(static_cast<char>(ch(gen)));
    auto d = damerau_levenshtein(a, b);
    CHECK(d == damerau_levenshtein(b, a));
    CHECK(d <= std::max(a.size(), b.size()));
    CHECK(d >= (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size()));
    CHECK((d == 0) == (a == b));
  }
}
