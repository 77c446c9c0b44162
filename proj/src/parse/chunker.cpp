#include "temo/parse/chunker.hpp"

#include <cctype>

#include "temo/util/error.hpp"

namespace temo::parse {
namespace {

bool is_separator_char(char c) {
    return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?';
}

bool is_determiner(const std::string& w) {
    return w == "a" || w == "an" || w == "the";
}

}  // namespace

std::vector<Token> tokenize(const std::string& prompt) {
    std::vector<Token> tokens;
    std::string raw;
    auto flush = [&] {
        if (raw.empty()) return;
        std::size_t b = 0, e = raw.size();
        while (b < e && is_separator_char(raw[b])) ++b;
        bool trailing = false;
        while (e > b && is_separator_char(raw[e - 1])) {
            --e;
            trailing = true;
        }
        if (b == e) {
            // pure punctuation: separator only, not a word
            if (!tokens.empty()) tokens.back().ends_chunk = true;
        } else {
            tokens.push_back({raw.substr(b, e - b), trailing});
        }
        raw.clear();
    };
    for (char c : prompt) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            raw.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    flush();
    return tokens;
}

std::vector<std::string> words(const std::string& prompt) {
    std::vector<Token> tokens = tokenize(prompt);
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (Token& t : tokens) out.push_back(std::move(t.text));
    return out;
}

std::vector<NounPhrase> extract_noun_phrases(const std::string& prompt) {
    std::vector<Token> tokens = tokenize(prompt);
    std::vector<NounPhrase> phrases;

    std::size_t chunk_begin = 0;
    auto close_chunk = [&](std::size_t chunk_end, std::size_t next_begin) {
        std::vector<std::size_t> content;
        for (std::size_t i = chunk_begin; i < chunk_end; ++i)
            if (!is_determiner(tokens[i].text)) content.push_back(i);
        if (!content.empty()) {
            NounPhrase np;
            np.phrase_id = static_cast<int>(phrases.size());
            np.span_begin = chunk_begin;
            np.span_end = chunk_end;
            np.head_noun = tokens[content.back()].text;
            for (std::size_t i = 0; i + 1 < content.size(); ++i)
                np.adjectives.push_back(tokens[content[i]].text);
            np.content_word_indices = std::move(content);
            phrases.push_back(std::move(np));
        }
        chunk_begin = next_begin;
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].text == "and")
            close_chunk(i, i + 1);  // the conjunction joins no phrase
        else if (tokens[i].ends_chunk)
            close_chunk(i + 1, i + 1);
    }
    close_chunk(tokens.size(), tokens.size());

    if (phrases.empty())
        raise(ErrorKind::Parse, "no noun phrase found in prompt: " + prompt);
    return phrases;
}

}  // namespace temo::parse
