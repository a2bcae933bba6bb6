#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sakr/embed.hpp"

namespace sakr {

enum class Aggregation { max, mean };

// chunk_max is the one-replacement-per-chunk reading of the streaming update;
// per_doc applies the guarded replace to every chunk member and yields exact
// top-capacity semantics.
enum class IndexMode { chunk_max, per_doc };

// The query vector(s) stream documents are scored against for retention.
struct RetrievalProfile {
    std::vector<QueryVec> query_vecs;  // non-empty, one shared dim
    Aggregation aggregation = Aggregation::max;
};

// Aggregated cos_sim over the profile queries; with a single query this is
// plain CosSim(Q, D). Throws DimMismatch.
double profile_score(const RetrievalProfile& profile, std::span<const float> vec);

struct IndexEntry {
    EmbeddedDoc doc;
    double score = 0.0;        // profile score fixed at insertion
    std::uint64_t arrival_seq = 0;  // position in the stream, chunking-invariant
};

// Fixed-capacity replace-min buffer over a document stream. The first
// `capacity` docs are inserted unconditionally; afterwards an incoming doc
// replaces the minimum-score entry only when it scores strictly higher, so
// the retained minimum never decreases.
class HHIndex {
public:
    HHIndex(RetrievalProfile profile, std::size_t capacity, IndexMode mode);

    // Unconditional fill while under capacity. Returns how many docs were
    // consumed; the caller offers the rest. Throws if the init phase is over.
    std::size_t init_fill(std::span<const EmbeddedDoc> docs);

    // Marks the init phase complete for streams shorter than the capacity.
    void seal_init();

    // Guarded replacement for one chunk (mode-dependent). Throws
    // NotInitialized before the init phase completes.
    void offer_chunk(std::span<const EmbeddedDoc> docs);

    bool initialized() const { return sealed_ || entries_.size() == capacity_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    IndexMode mode() const { return mode_; }
    const RetrievalProfile& profile() const { return profile_; }

    // Lowest retained score; requires a non-empty index.
    double min_score() const;

    // Immutable copy ordered by score descending, ties doc_id ascending.
    std::vector<IndexEntry> snapshot() const;

private:
    struct Entry {
        EmbeddedDoc doc;
        double score;
        std::uint64_t arrival_seq;
    };
    // Ascending (score, doc_id descending): begin() is the eviction victim.
    struct MinOrder {
        bool operator()(const std::pair<double, std::string>& a,
                        const std::pair<double, std::string>& b) const {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        }
    };

    void insert_entry(const EmbeddedDoc& doc, double score);
    void guarded_offer(const EmbeddedDoc& doc);

    RetrievalProfile profile_;
    std::size_t capacity_;
    IndexMode mode_;
    bool sealed_ = false;
    std::uint64_t next_seq_ = 0;
    std::map<std::string, Entry> entries_;
    std::set<std::pair<double, std::string>, MinOrder> order_;
};

// init_fill + offer_chunk over every chunk, sealed at stream end.
// Throws ZeroCapacity.
HHIndex build_from_stream(const RetrievalProfile& profile,
                          const std::vector<std::vector<EmbeddedDoc>>& chunks,
                          std::size_t capacity, IndexMode mode);

// Mirrors chunk_stream for already-embedded docs.
std::vector<std::vector<EmbeddedDoc>> chunk_embedded(
    std::span<const EmbeddedDoc> docs, std::size_t chunk_size);

// 100 * capacity / corpus_size. Throws EmptyCorpus.
double memory_ratio(std::size_t index_capacity, std::size_t corpus_size);

// Index persistence: the SAKV vector block for the snapshot docs plus a
// footer (capacity, mode, aggregation, profile query ids, per-entry scores).
struct LoadedIndex {
    std::size_t capacity = 0;
    IndexMode mode = IndexMode::per_doc;
    Aggregation aggregation = Aggregation::max;
    std::vector<std::string> profile_query_ids;
    std::vector<IndexEntry> entries;  // snapshot order
};

void save_index(std::ostream& out, const HHIndex& index);
LoadedIndex load_index(std::istream& in);

}  // namespace sakr
