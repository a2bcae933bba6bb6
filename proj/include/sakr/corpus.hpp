#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sakr {

// A corpus record: three text features plus their combination, which is the
// single field fed to the embedder.
struct Document {
    std::string doc_id;
    std::string headline;
    std::vector<std::string> keywords;
    std::string abstract;
    std::string combined_text;  // headline + keywords + abstract, space-joined
};

// Non-empty fields joined by single spaces, in headline/keywords/abstract order.
std::string combine_fields(const std::string& headline,
                           const std::vector<std::string>& keywords,
                           const std::string& abstract);

// Relevance judgments for one query. relevant ⊆ judged.
struct QrelSet {
    std::string query_id;
    std::set<std::string> relevant;  // label 1
    std::set<std::string> judged;    // labels 0 and 1
};

struct StreamChunk {
    std::size_t seq_no = 0;
    std::vector<Document> docs;
};

enum class CorpusFormat { jsonl, csv };

// Documents in file order, combined_text populated. Throws MissingId,
// DuplicateId, MalformedRecord (with line number).
std::vector<Document> load_corpus(const std::string& path, CorpusFormat format);

// TSV `query_id<TAB>doc_id<TAB>label`, label in {0,1}. Docs absent from the
// file count as not relevant. Throws BadLabel, MalformedLine.
std::map<std::string, QrelSet> load_qrels(const std::string& path);

// Consecutive chunks of chunk_size docs (last may be short). Throws
// ZeroChunkSize.
std::vector<StreamChunk> chunk_stream(const std::vector<Document>& docs,
                                      std::size_t chunk_size);

}  // namespace sakr
