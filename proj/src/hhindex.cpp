#include "sakr/hhindex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "sakr/errors.hpp"

namespace sakr {

namespace {

void validate_profile(const RetrievalProfile& profile) {
    if (profile.query_vecs.empty()) {
        throw BadConfig("retrieval profile needs at least one query vector");
    }
    std::size_t dim = profile.query_vecs.front().vec.size();
    for (const auto& q : profile.query_vecs) {
        if (q.vec.size() != dim) {
            throw DimMismatch("profile query \"" + q.query_id + "\" has dim " +
                              std::to_string(q.vec.size()) + ", expected " +
                              std::to_string(dim));
        }
    }
}

}  // namespace

double profile_score(const RetrievalProfile& profile, std::span<const float> vec) {
    validate_profile(profile);
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& q : profile.query_vecs) {
        double cos = cos_sim(q.vec, vec);
        best = std::max(best, cos);
        sum += cos;
    }
    return profile.aggregation == Aggregation::max
               ? best
               : sum / static_cast<double>(profile.query_vecs.size());
}

HHIndex::HHIndex(RetrievalProfile profile, std::size_t capacity, IndexMode mode)
    : profile_(std::move(profile)), capacity_(capacity), mode_(mode) {
    if (capacity_ == 0) throw ZeroCapacity("index capacity must be >= 1");
    validate_profile(profile_);
}

void HHIndex::insert_entry(const EmbeddedDoc& doc, double score) {
    auto [it, inserted] = entries_.try_emplace(doc.doc_id);
    if (!inserted) {
        // Re-offered id: keep the higher-scored copy. Deterministic scoring
        // makes this a no-op in practice.
        if (score <= it->second.score) {
            ++next_seq_;
            return;
        }
        order_.erase({it->second.score, doc.doc_id});
        it->second.score = score;
        it->second.arrival_seq = next_seq_++;
        order_.emplace(score, doc.doc_id);
        return;
    }
    it->second.doc = doc;
    it->second.score = score;
    it->second.arrival_seq = next_seq_++;
    order_.emplace(score, doc.doc_id);
}

std::size_t HHIndex::init_fill(std::span<const EmbeddedDoc> docs) {
    if (initialized()) throw Error("init phase already complete");
    std::size_t consumed = 0;
    while (consumed < docs.size() && entries_.size() < capacity_) {
        const auto& doc = docs[consumed++];
        insert_entry(doc, profile_score(profile_, doc.vec));
    }
    return consumed;
}

void HHIndex::seal_init() { sealed_ = true; }

double HHIndex::min_score() const {
    if (order_.empty()) throw Error("min_score of an empty index");
    return order_.begin()->first;
}

void HHIndex::guarded_offer(const EmbeddedDoc& doc) {
    double score = profile_score(profile_, doc.vec);
    if (entries_.contains(doc.doc_id) || entries_.size() < capacity_) {
        insert_entry(doc, score);
        return;
    }
    if (score > order_.begin()->first) {
        entries_.erase(order_.begin()->second);
        order_.erase(order_.begin());
        insert_entry(doc, score);
    } else {
        ++next_seq_;
    }
}

void HHIndex::offer_chunk(std::span<const EmbeddedDoc> docs) {
    if (!initialized()) {
        throw NotInitialized("offer_chunk before the init phase completed");
    }
    if (docs.empty()) return;
    if (mode_ == IndexMode::per_doc) {
        for (const auto& doc : docs) guarded_offer(doc);
        return;
    }
    // chunk_max: one guarded replacement with the chunk's best doc
    // (highest score, ties to the lowest doc_id).
    std::size_t best = 0;
    double best_score = profile_score(profile_, docs[0].vec);
    for (std::size_t i = 1; i < docs.size(); ++i) {
        double score = profile_score(profile_, docs[i].vec);
        if (score > best_score ||
            (score == best_score && docs[i].doc_id < docs[best].doc_id)) {
            best = i;
            best_score = score;
        }
    }
    next_seq_ += best;
    guarded_offer(docs[best]);
    next_seq_ += docs.size() - best - 1;
}

std::vector<IndexEntry> HHIndex::snapshot() const {
    std::vector<IndexEntry> out;
    out.reserve(order_.size());
    // Reverse of the internal (score asc, doc_id desc) order.
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        const Entry& e = entries_.at(it->second);
        out.push_back(IndexEntry{e.doc, e.score, e.arrival_seq});
    }
    return out;
}

HHIndex build_from_stream(const RetrievalProfile& profile,
                          const std::vector<std::vector<EmbeddedDoc>>& chunks,
                          std::size_t capacity, IndexMode mode) {
    HHIndex index(profile, capacity, mode);
    for (const auto& chunk : chunks) {
        std::size_t consumed = 0;
        if (!index.initialized()) consumed = index.init_fill(chunk);
        if (consumed < chunk.size()) {
            index.offer_chunk(std::span<const EmbeddedDoc>(chunk).subspan(consumed));
        }
    }
    index.seal_init();
    return index;
}

std::vector<std::vector<EmbeddedDoc>> chunk_embedded(
    std::span<const EmbeddedDoc> docs, std::size_t chunk_size) {
    if (chunk_size == 0) throw ZeroChunkSize("chunk_size must be >= 1");
    std::vector<std::vector<EmbeddedDoc>> chunks;
    chunks.reserve((docs.size() + chunk_size - 1) / chunk_size);
    for (std::size_t begin = 0; begin < docs.size(); begin += chunk_size) {
        std::size_t end = std::min(begin + chunk_size, docs.size());
        chunks.emplace_back(docs.begin() + static_cast<std::ptrdiff_t>(begin),
                            docs.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return chunks;
}

double memory_ratio(std::size_t index_capacity, std::size_t corpus_size) {
    if (corpus_size == 0) throw EmptyCorpus("corpus size must be >= 1");
    return 100.0 * static_cast<double>(index_capacity) /
           static_cast<double>(corpus_size);
}

namespace {

constexpr char kFooterMagic[4] = {'S', 'A', 'K', 'F'};

void put_u8(std::ostream& out, std::uint8_t v) {
    out.put(static_cast<char>(v));
}

void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

std::uint8_t get_u8(std::istream& in) {
    int c = in.get();
    if (c == EOF) throw InputError("truncated index file");
    return static_cast<std::uint8_t>(c);
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(in)) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_u8(in)) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_index(std::ostream& out, const HHIndex& index) {
    auto entries = index.snapshot();
    std::vector<EmbeddedDoc> docs;
    docs.reserve(entries.size());
    for (const auto& e : entries) docs.push_back(e.doc);
    std::uint32_t dim =
        static_cast<std::uint32_t>(index.profile().query_vecs.front().vec.size());
    write_vectors_binary(out, docs, dim);

    out.write(kFooterMagic, 4);
    put_u64(out, index.capacity());
    put_u8(out, index.mode() == IndexMode::per_doc ? 1 : 0);
    put_u8(out, index.profile().aggregation == Aggregation::mean ? 1 : 0);
    put_u32(out, static_cast<std::uint32_t>(index.profile().query_vecs.size()));
    for (const auto& q : index.profile().query_vecs) {
        if (q.query_id.size() > 0xffff) throw InputError("query id too long");
        put_u8(out, static_cast<std::uint8_t>(q.query_id.size() & 0xff));
        put_u8(out, static_cast<std::uint8_t>(q.query_id.size() >> 8));
        out.write(q.query_id.data(),
                  static_cast<std::streamsize>(q.query_id.size()));
    }
    put_u64(out, entries.size());
    for (const auto& e : entries) put_f64(out, e.score);
}

LoadedIndex load_index(std::istream& in) {
    auto docs = read_vectors_binary(in);
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kFooterMagic, 4) != 0) {
        throw InputError("index file lacks a SAKF footer");
    }
    LoadedIndex loaded;
    loaded.capacity = static_cast<std::size_t>(get_u64(in));
    loaded.mode = get_u8(in) == 1 ? IndexMode::per_doc : IndexMode::chunk_max;
    loaded.aggregation = get_u8(in) == 1 ? Aggregation::mean : Aggregation::max;
    std::uint32_t n_queries = get_u32(in);
    for (std::uint32_t i = 0; i < n_queries; ++i) {
        std::uint16_t len = static_cast<std::uint16_t>(get_u8(in) |
                                                       (get_u8(in) << 8));
        std::string id(len, '\0');
        in.read(id.data(), len);
        if (in.gcount() != len) throw InputError("truncated index file");
        loaded.profile_query_ids.push_back(std::move(id));
    }
    std::uint64_t n_scores = get_u64(in);
    if (n_scores != docs.size()) {
        throw InputError("index footer score count does not match vector count");
    }
    loaded.entries.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        loaded.entries.push_back(
            IndexEntry{std::move(docs[i]), get_f64(in), i});
    }
    return loaded;
}

}  // namespace sakr
