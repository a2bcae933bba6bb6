#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sakr/errors.hpp"
#include "sakr/eval.hpp"
#include "sakr/rng.hpp"

namespace sakr {

namespace {

// The relevant topic deliberately gets a compact vocabulary: its documents
// and the queries sample the same 8 words, which keeps the topic tight and
// the query-relevant cosine well above hash-collision noise.
constexpr std::size_t kRelevantVocab = 8;
constexpr std::size_t kTopicVocab = 40;
constexpr std::size_t kNoiseVocab = 200;
constexpr std::size_t kHeadlineWords = 4;
constexpr std::size_t kKeywordCount = 3;
constexpr std::size_t kAbstractWords = 12;
constexpr std::size_t kQueryWords = 6;

void validate(const SyntheticSpec& spec) {
    if (spec.corpus_size == 0) throw BadConfig("synthetic corpus_size must be >= 1");
    if (!(spec.relevant_fraction > 0.0 && spec.relevant_fraction < 1.0)) {
        throw BadConfig("relevant_fraction must be in (0, 1)");
    }
    if (spec.topics < 2) throw BadConfig("synthetic corpus needs >= 2 topics");
    if (spec.noise < 0.0 || spec.noise >= 1.0) {
        throw BadConfig("noise must be in [0, 1)");
    }
}

std::string topic_word(std::size_t topic, std::mt19937_64& rng) {
    if (topic == 0) {
        return "rel" + std::to_string(uniform_index(rng, kRelevantVocab));
    }
    return "t" + std::to_string(topic) + "w" +
           std::to_string(uniform_index(rng, kTopicVocab));
}

std::string draw_word(std::size_t topic, double noise, std::mt19937_64& rng) {
    if (noise > 0.0 && uniform_double(rng) < noise) {
        return "noise" + std::to_string(uniform_index(rng, kNoiseVocab));
    }
    return topic_word(topic, rng);
}

std::string join_words(std::size_t count, std::size_t topic, double noise,
                       std::mt19937_64& rng) {
    std::string out;
    for (std::size_t w = 0; w < count; ++w) {
        if (!out.empty()) out += ' ';
        out += draw_word(topic, noise, rng);
    }
    return out;
}

}  // namespace

std::string synthetic_query(const SyntheticSpec& spec, std::size_t variant) {
    validate(spec);
    std::mt19937_64 rng(hash64("query", spec.seed ^ (variant * 0x9e3779b97f4a7c15ull)));
    // Distinct words: a seeded partial shuffle of the relevant vocabulary.
    std::size_t order[kRelevantVocab];
    for (std::size_t i = 0; i < kRelevantVocab; ++i) order[i] = i;
    for (std::size_t i = kRelevantVocab; i > 1; --i) {
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    std::string text;
    for (std::size_t w = 0; w < kQueryWords && w < kRelevantVocab; ++w) {
        if (!text.empty()) text += ' ';
        text += "rel" + std::to_string(order[w]);
    }
    return text;
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    const std::size_t n_rel = static_cast<std::size_t>(
        std::llround(spec.relevant_fraction * static_cast<double>(spec.corpus_size)));

    std::mt19937_64 rng(hash64("corpus", spec.seed));

    // Topic per stream slot: relevant first, the rest round-robin over the
    // irrelevant topics, then a seeded shuffle fixes the stream order.
    std::vector<std::size_t> topic_of(spec.corpus_size);
    for (std::size_t i = 0; i < spec.corpus_size; ++i) {
        topic_of[i] = i < n_rel ? 0 : 1 + (i - n_rel) % (spec.topics - 1);
    }
    for (std::size_t i = spec.corpus_size; i > 1; --i) {
        std::swap(topic_of[i - 1], topic_of[uniform_index(rng, i)]);
    }

    SyntheticData data;
    data.corpus.reserve(spec.corpus_size);
    data.query_id = "q0";
    data.query_text = synthetic_query(spec, 0);

    QrelSet qrels;
    qrels.query_id = data.query_id;

    char id_buf[32];
    for (std::size_t i = 0; i < spec.corpus_size; ++i) {
        Document doc;
        std::snprintf(id_buf, sizeof(id_buf), "d%06zu", i);
        doc.doc_id = id_buf;
        const std::size_t topic = topic_of[i];
        doc.headline = join_words(kHeadlineWords, topic, spec.noise, rng);
        for (std::size_t k = 0; k < kKeywordCount; ++k) {
            doc.keywords.push_back(draw_word(topic, spec.noise, rng));
        }
        doc.abstract = join_words(kAbstractWords, topic, spec.noise, rng);
        doc.combined_text =
            combine_fields(doc.headline, doc.keywords, doc.abstract);
        qrels.judged.insert(doc.doc_id);
        if (topic == 0) qrels.relevant.insert(doc.doc_id);
        data.corpus.push_back(std::move(doc));
    }
    data.qrels[data.query_id] = std::move(qrels);
    return data;
}

}  // namespace sakr
