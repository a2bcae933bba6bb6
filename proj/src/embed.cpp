#include "sakr/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "sakr/errors.hpp"
#include "sakr/kernels.hpp"
#include "sakr/rng.hpp"

namespace sakr {

namespace {

constexpr char kVecMagic[4] = {'S', 'A', 'K', 'V'};

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z') || c >= 0x80;
}

void write_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

bool read_exact(std::istream& in, void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    if (!read_exact(in, b, 2)) throw InputError("truncated vector file");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    if (!read_exact(in, b, 4)) throw InputError("truncated vector file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    if (!read_exact(in, b, 8)) throw InputError("truncated vector file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

float read_f32(std::istream& in) {
    std::uint32_t bits = read_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

// Unit-norm check + renormalization shared by both loaders.
void normalize_loaded(EmbeddedDoc& doc) {
    for (float c : doc.vec) {
        if (!std::isfinite(c)) {
            throw NonFiniteComponent("vector \"" + doc.doc_id + "\"");
        }
    }
    double norm = std::sqrt(kernels::squared_norm(doc.vec.data(), doc.vec.size()));
    if (std::abs(norm - 1.0) > 1e-3) {
        throw NotNormalizable("vector \"" + doc.doc_id + "\" has norm " +
                              std::to_string(norm));
    }
    for (float& c : doc.vec) c = static_cast<float>(c / norm);
}

std::vector<EmbeddedDoc> load_vectors_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::vector<EmbeddedDoc> docs;
    std::string line;
    std::size_t lineno = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("id") || !rec.contains("vec") ||
            !rec["vec"].is_array()) {
            throw InputError("malformed vector record at " + path + ":" +
                             std::to_string(lineno));
        }
        EmbeddedDoc doc;
        doc.doc_id = rec["id"].get<std::string>();
        doc.vec.reserve(rec["vec"].size());
        for (const auto& c : rec["vec"]) doc.vec.push_back(c.get<float>());
        if (dim == 0) dim = doc.vec.size();
        if (doc.vec.size() != dim) {
            throw DimMismatch("vector \"" + doc.doc_id + "\" has dim " +
                              std::to_string(doc.vec.size()) + ", expected " +
                              std::to_string(dim));
        }
        normalize_loaded(doc);
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, bool lowercase) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            if (lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
            cur += static_cast<char>(c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<float> embed_text(const std::string& text, const EmbeddingConfig& cfg) {
    if (cfg.dim < 2) throw BadConfig("embedding dim must be >= 2");
    std::vector<double> acc(cfg.dim, 0.0);
    for (const auto& token : tokenize(text, cfg.lowercase)) {
        std::uint64_t h = hash64(token, cfg.hash_seed);
        std::size_t bucket = static_cast<std::size_t>(h % cfg.dim);
        acc[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
    double sq = 0.0;
    for (double c : acc) sq += c * c;
    std::vector<float> vec(cfg.dim, 0.0f);
    if (sq == 0.0) {
        vec[0] = 1.0f;  // fallback basis vector for empty text
        return vec;
    }
    double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < acc.size(); ++i) {
        vec[i] = static_cast<float>(acc[i] / norm);
    }
    return vec;
}

double cos_sim(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw DimMismatch(std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
    }
    double na = std::sqrt(kernels::squared_norm(a.data(), a.size()));
    double nb = std::sqrt(kernels::squared_norm(b.data(), b.size()));
    if (na < 1e-12 || nb < 1e-12) throw ZeroNorm("cos_sim input");
    double cos = kernels::dot(a.data(), b.data(), a.size()) / (na * nb);
    return std::clamp(cos, -1.0, 1.0);
}

std::vector<EmbeddedDoc> load_vectors(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw InputError("cannot open file: " + path);
    char magic[4] = {};
    probe.read(magic, 4);
    if (probe.gcount() == 4 && std::memcmp(magic, kVecMagic, 4) == 0) {
        probe.seekg(0);
        auto docs = read_vectors_binary(probe);
        for (auto& doc : docs) normalize_loaded(doc);
        return docs;
    }
    return load_vectors_jsonl(path);
}

void write_vectors_binary(std::ostream& out, std::span<const EmbeddedDoc> docs,
                          std::uint32_t dim) {
    out.write(kVecMagic, 4);
    write_u32(out, dim);
    write_u64(out, docs.size());
    for (const auto& doc : docs) {
        if (doc.vec.size() != dim) {
            throw DimMismatch("vector \"" + doc.doc_id + "\" has dim " +
                              std::to_string(doc.vec.size()) + ", expected " +
                              std::to_string(dim));
        }
        if (doc.doc_id.size() > 0xffff) {
            throw InputError("doc id longer than 65535 bytes");
        }
        write_u16(out, static_cast<std::uint16_t>(doc.doc_id.size()));
        out.write(doc.doc_id.data(),
                  static_cast<std::streamsize>(doc.doc_id.size()));
        for (float c : doc.vec) write_f32(out, c);
    }
}

std::vector<EmbeddedDoc> read_vectors_binary(std::istream& in) {
    char magic[4] = {};
    if (!read_exact(in, magic, 4) || std::memcmp(magic, kVecMagic, 4) != 0) {
        throw InputError("not a SAKV vector file");
    }
    std::uint32_t dim = read_u32(in);
    std::uint64_t count = read_u64(in);
    std::vector<EmbeddedDoc> docs;
    docs.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) {
        EmbeddedDoc doc;
        std::uint16_t id_len = read_u16(in);
        doc.doc_id.resize(id_len);
        if (!read_exact(in, doc.doc_id.data(), id_len)) {
            throw InputError("truncated vector file");
        }
        doc.vec.resize(dim);
        for (std::uint32_t i = 0; i < dim; ++i) doc.vec[i] = read_f32(in);
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace sakr
