#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace temo::parse {

// One whitespace token of the prompt, lowercased, with sentence punctuation
// stripped off the ends. A trailing separator (, . ; : ! ?) marks the end of
// a chunk. Pure-punctuation tokens fold into the previous token's flag, so
// token positions index real words only.
struct Token {
    std::string text;
    bool ends_chunk = false;
};

std::vector<Token> tokenize(const std::string& prompt);

// The shared word-level tokenization: tokenize() texts in order. Embedding
// providers produce one feature row per entry.
std::vector<std::string> words(const std::string& prompt);

// One noun phrase: DET? ADJ* NOUN. The span covers the phrase's word
// positions, determiners included, as [begin, end). content_word_indices
// holds the word position of each adjective and then the head noun,
// aligned with content_words().
struct NounPhrase {
    std::vector<std::string> adjectives;
    std::string head_noun;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    int phrase_id = 0;
    std::vector<std::size_t> content_word_indices;

    std::vector<std::string> content_words() const {
        std::vector<std::string> w = adjectives;
        w.push_back(head_noun);
        return w;
    }
};

// Deterministic chunker over a closed-class lexicon: determiners are
// dropped, chunks split on "and" and trailing punctuation, the last word of
// a chunk is the head noun and every other non-determiner word an
// adjective. Raises when the prompt yields no phrase.
std::vector<NounPhrase> extract_noun_phrases(const std::string& prompt);

}  // namespace temo::parse
