#pragma once

#include "ialign/corpus.hpp"
#include "ialign/model.hpp"

namespace testsupport {

// Matched/mismatched detection accuracy for an explanation-informed model.
// Each example contributes one matched instance and one mismatched instance
// whose donor explanation comes from the next example with a different gold
// label, so the mismatch is never a verbatim duplicate of the matched pair.
inline double matched_detection_accuracy(const ialign::Classifier& model,
                                         const ialign::Corpus& corpus) {
    const size_t n = corpus.size();
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i) {
        const ialign::Example& e = corpus.examples[i];
        const ialign::TokenSequence input = ialign::concat_input(e);

        const auto matched = ialign::build_informed_sequence(
            input, ialign::tokenize(e.explanation));
        if (model.predict_six_way(matched).explanation_matched) ++correct;

        size_t donor = i;
        for (size_t step = 1; step < n; ++step) {
            const size_t j = (i + step) % n;
            if (corpus.examples[j].gold_label != e.gold_label) {
                donor = j;
                break;
            }
        }
        const auto mismatched = ialign::build_informed_sequence(
            input, ialign::tokenize(corpus.examples[donor].explanation));
        if (!model.predict_six_way(mismatched).explanation_matched) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(2 * n);
}

}  // namespace testsupport
