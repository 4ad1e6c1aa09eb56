#pragma once

#include "ialign/corpus.hpp"

namespace ialign {

// Standard English stop-word inventory (179 entries, already lowercase).
// Contraction fragments appear both with and without the apostrophe because
// the tokenizer splits on punctuation.
inline StopWordList default_stop_words() {
    static const char* const kWords[] = {
        "i",       "me",      "my",      "myself",  "we",       "our",
        "ours",    "ourselves", "you",   "you're",  "you've",   "you'll",
        "you'd",   "your",    "yours",   "yourself", "yourselves", "he",
        "him",     "his",     "himself", "she",     "she's",    "her",
        "hers",    "herself", "it",      "it's",    "its",      "itself",
        "they",    "them",    "their",   "theirs",  "themselves", "what",
        "which",   "who",     "whom",    "this",    "that",     "that'll",
        "these",   "those",   "am",      "is",      "are",      "was",
        "were",    "be",      "been",    "being",   "have",     "has",
        "had",     "having",  "do",      "does",    "did",      "doing",
        "a",       "an",      "the",     "and",     "but",      "if",
        "or",      "because", "as",      "until",   "while",    "of",
        "at",      "by",      "for",     "with",    "about",    "against",
        "between", "into",    "through", "during",  "before",   "after",
        "above",   "below",   "to",      "from",    "up",       "down",
        "in",      "out",     "on",      "off",     "over",     "under",
        "again",   "further", "then",    "once",    "here",     "there",
        "when",    "where",   "why",     "how",     "all",      "any",
        "both",    "each",    "few",     "more",    "most",     "other",
        "some",    "such",    "no",      "nor",     "not",      "only",
        "own",     "same",    "so",      "than",    "too",      "very",
        "s",       "t",       "can",     "will",    "just",     "don",
        "don't",   "should",  "should've", "now",   "d",        "ll",
        "m",       "o",       "re",      "ve",      "y",        "ain",
        "aren",    "aren't",  "couldn",  "couldn't", "didn",    "didn't",
        "doesn",   "doesn't", "hadn",    "hadn't",  "hasn",     "hasn't",
        "haven",   "haven't", "isn",     "isn't",   "ma",       "mightn",
        "mightn't", "mustn",  "mustn't", "needn",   "needn't",  "shan",
        "shan't",  "shouldn", "shouldn't", "wasn",  "wasn't",   "weren",
        "weren't", "won",     "won't",   "wouldn",  "wouldn't",
    };
    StopWordList list;
    list.source_name = "builtin";
    for (const char* w : kWords) list.words.insert(w);
    return list;
}

inline std::string stop_words_to_text(const StopWordList& list) {
    std::string out;
    for (const std::string& w : list.words) {
        out += w;
        out += '\n';
    }
    return out;
}

}  // namespace ialign
