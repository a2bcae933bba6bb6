#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sakr {

// Feature-hashing term-frequency embedder: no model files, bit-identical
// output everywhere, and cosine geometry is all the downstream math needs.
struct EmbeddingConfig {
    std::uint32_t dim = 256;  // >= 2
    std::uint64_t hash_seed = 0;
    bool lowercase = true;
};

struct EmbeddedDoc {
    std::string doc_id;
    std::vector<float> vec;  // unit L2 norm
};

struct QueryVec {
    std::string query_id;
    std::vector<float> vec;  // unit L2 norm
};

// Maximal alphanumeric runs (bytes >= 0x80 count as word bytes so UTF-8
// sequences survive intact), lowercased when configured.
std::vector<std::string> tokenize(const std::string& text, bool lowercase = true);

// Signed feature hashing: bucket = hash % dim, sign from the hash's top bit,
// ±1 per occurrence, then L2-normalized. No tokens (or exact cancellation)
// falls back to the basis vector e0.
std::vector<float> embed_text(const std::string& text, const EmbeddingConfig& cfg);

// cos(a, b) with defensive normalization, clamped to [-1, 1]. Throws
// ZeroNorm when either norm < 1e-12, DimMismatch on length mismatch.
double cos_sim(std::span<const float> a, std::span<const float> b);

// Precomputed embeddings, JSONL ({"id","vec"}) or the SAKV binary layout,
// sniffed by magic. Vectors within 1e-3 of unit norm are renormalized;
// anything further off is rejected. Throws DimMismatch, NonFiniteComponent,
// NotNormalizable.
std::vector<EmbeddedDoc> load_vectors(const std::string& path);

// SAKV binary: magic "SAKV", u32 dim, u64 count; per record u16 id length,
// id bytes, dim little-endian f32.
void write_vectors_binary(std::ostream& out, std::span<const EmbeddedDoc> docs,
                          std::uint32_t dim);
std::vector<EmbeddedDoc> read_vectors_binary(std::istream& in);

}  // namespace sakr
